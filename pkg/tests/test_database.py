import pytest

from topsocle import database
from topsocle.services.scenarios import ScenarioConfig, verify_theorem


@pytest.fixture
def report(hartshorne):
    return verify_theorem(ScenarioConfig(hartshorne.ring, hartshorne, [2, 3, 4], preset="hartshorne"))


def test_record_then_compare(golden_db, report):
    assert database.record_goldens(report, 32003) == 3
    assert database.compare_goldens(report, 32003) == []


def test_recording_replaces_previous_goldens(golden_db, report):
    database.record_goldens(report, 32003)
    database.record_goldens(report, 32003)
    db = database.get_db_session()
    try:
        assert db.query(database.SocleGolden).count() == 3
    finally:
        db.close()


def test_missing_goldens_are_a_discrepancy(golden_db, report):
    messages = database.compare_goldens(report, 32003)
    assert messages == ["no goldens recorded for hartshorne in characteristic 32003"]
    database.record_goldens(report, 32003)
    assert database.compare_goldens(report, 0)


def test_changed_totals_are_reported(golden_db, report):
    database.record_goldens(report, 32003)
    row = report.socle_table[1]
    row.rows[1].star_socle_dim += 1
    messages = database.compare_goldens(report, 32003)
    assert len(messages) == 1
    assert messages[0].startswith("ell=3:")


def test_goldens_need_a_preset(golden_db, hartshorne):
    anonymous = verify_theorem(ScenarioConfig(hartshorne.ring, hartshorne, [2]))
    with pytest.raises(ValueError):
        database.record_goldens(anonymous, 32003)


def test_run_log(golden_db, report):
    database.log_run(report, jobs=2)
    db = database.get_db_session()
    try:
        run = db.query(database.VerificationRun).one()
        assert run.verdict == "pass"
        assert run.jobs == 2
        assert run.rows == 3
    finally:
        db.close()
