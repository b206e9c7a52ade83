import json

import pytest

from topsocle.main import EXIT_FAILED, EXIT_INVALID, EXIT_OK, run
from topsocle.utils.reporters import FAMILY_HEADER, PLOT_HEADER, SOCLE_HEADER


def _run(capsys, *argv):
    code = run(list(argv))
    return code, capsys.readouterr().out


def test_minors_of_A2(capsys):
    code, out = _run(capsys, "minors", "--n", "2")
    assert code == EXIT_OK
    assert out == "generator\nu^2\nu*v\nv^2\n"


def test_minors_of_a_matrix_as_json(capsys):
    code, out = _run(capsys, "minors", "--matrix", "u,v", "--format", "json")
    assert code == EXIT_OK
    assert json.loads(out) == {"generators": ["u", "v"]}


def test_verify_hartshorne(capsys):
    code, out = _run(capsys, "verify", "--preset", "hartshorne", "--lmax", "6")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == ",".join(SOCLE_HEADER)
    assert lines[1] == "2,1,1,1,0,7,true"
    assert len(lines) == 6


def test_verify_output_is_independent_of_jobs(capsys):
    _, serial = _run(capsys, "verify", "--preset", "hartshorne", "--lmax", "6", "--jobs", "1")
    _, parallel = _run(capsys, "verify", "--preset", "hartshorne", "--lmax", "6", "--jobs", "2")
    assert serial == parallel


def test_verify_json(capsys):
    code, out = _run(capsys, "verify", "--preset", "hartshorne", "--lmax", "3", "--format", "json")
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["verdict"] == "pass"
    assert [r["ell"] for r in payload["socle_table"]] == [2, 3]


def test_verify_scenario_file_that_fails(capsys, tmp_path):
    path = tmp_path / "unit.toml"
    path.write_text(
        'name = "unit"\n'
        "[ring]\n"
        "[hypersurface]\n"
        'f = "x + u*y"\n'
        "[ells]\n"
        "lmin = 2\n"
        "lmax = 4\n"
    )
    code, _ = _run(capsys, "verify", "--config", str(path))
    assert code == EXIT_FAILED


def test_goldens_round_trip(capsys, golden_db):
    args = ["verify", "--preset", "hartshorne", "--lmax", "4"]
    assert run(args + ["--check-goldens"]) == EXIT_FAILED
    assert run(args + ["--record-goldens"]) == EXIT_OK
    assert run(args + ["--check-goldens"]) == EXIT_OK


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--preset", "hartshorne", "--char", "4"],
        ["verify", "--preset", "nope"],
        ["socle", "--f", "u*x + w*y"],
        ["socle", "--f", "u*x + v*y", "--weights", "one,two"],
        ["socle", "--f", "u*x^2 + y^2"],
        ["socle", "--f", "u*x + v*y", "--lmin", "5", "--lmax", "3"],
        ["ann-family", "--n-max", "5", "--cap", "3"],
        ["minors"],
    ],
)
def test_invalid_input_exits_2(capsys, argv):
    code, out = _run(capsys, *argv)
    assert code == EXIT_INVALID
    assert out == ""


def test_socle_plot_table(capsys):
    code, out = _run(capsys, "socle", "--f", "u*x + v*y", "--lmin", "3", "--lmax", "3", "--plot-table")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == ",".join(PLOT_HEADER)
    assert lines[1] == "3,0,2,0,0,0"
    assert lines[2] == "3,1,1,1,1,1"


def test_vanish(capsys):
    code, out = _run(capsys, "vanish", "--f", "x + u*y", "--lmax", "4")
    assert code == EXIT_OK
    assert out.splitlines() == ["ell,coker_total", "2,0", "3,0", "4,0"]


def test_lsummand(capsys):
    code, out = _run(capsys, "lsummand", "--f", "u*x + v*y", "--qmax", "1")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[1] == "0,2,x^-1*y^-1,\"[u, v]\",true,true"


def test_ann_family(capsys):
    code, out = _run(capsys, "ann-family", "--n-max", "3", "--cap", "6")
    assert code == EXIT_OK
    assert out.splitlines() == [
        ",".join(FAMILY_HEADER),
        "1,true,true,1",
        "2,true,true,2",
        "3,true,true,3",
    ]


def test_out_file(capsys, tmp_path):
    target = tmp_path / "minors.csv"
    code, out = _run(capsys, "minors", "--n", "1", "--out", str(target))
    assert code == EXIT_OK
    assert out == ""
    assert target.read_text() == "generator\nu\nv\n"


def test_verify_flags_reach_past_the_preset(capsys):
    code, out = _run(capsys, "verify", "--preset", "hartshorne", "--lmin", "31", "--lmax", "33")
    assert code == EXIT_OK
    rows = out.splitlines()[1:]
    assert [int(r.split(",")[0]) for r in rows] == [31, 32, 33]
    assert rows[-1].startswith("33,32,")


def test_bad_environment_exits_2(capsys, monkeypatch):
    monkeypatch.setenv("TOPSOCLE_CHARACTERISTIC", "4")
    code = run(["minors", "--n", "1"])
    captured = capsys.readouterr()
    assert code == EXIT_INVALID
    assert captured.out == ""
    assert "TOPSOCLE_CHARACTERISTIC" in captured.err
    assert "Traceback" not in captured.err


def test_unwritable_out_file(capsys, tmp_path):
    target = tmp_path / "missing" / "minors.csv"
    code = run(["minors", "--n", "1", "--out", str(target)])
    captured = capsys.readouterr()
    assert code == EXIT_INVALID
    assert captured.out == ""
    assert "cannot write" in captured.err
    assert not target.exists()
