"""
CSV and JSON emitters. Output is a pure function of the reports, so the
same inputs always produce the same bytes.
"""

import csv
import json
from typing import IO, Iterable, List, Optional, Sequence

from topsocle.cohomology.socle import SocleReport
from topsocle.services.annihilator import FamilyRow

SOCLE_HEADER = ["ell", "free_rank", "star_socle_dim_total", "t_socle_dim_total", "window_lo", "window_hi", "certified"]
PLOT_HEADER = ["ell", "degree", "coker_dim", "t_socle_dim", "star_socle_dim", "i_torsion_dim"]
FAMILY_HEADER = ["n", "ann_equals_uv_pow_n", "minors_equal", "mindeg_intersection_so_far"]
VANISH_HEADER = ["ell", "coker_total"]
LSUMMAND_HEADER = ["q", "ell", "basis", "delta_matrix", "delta_ok", "closure_ok"]


def _flag(value: bool) -> str:
    return "true" if value else "false"


def _opt(value: Optional[int]) -> str:
    return "none" if value is None else str(value)


def _writer(out: IO[str]):
    return csv.writer(out, lineterminator="\n")


def socle_rows(reports: Iterable[SocleReport]) -> List[list]:
    return [
        [r.ell, r.free_rank, r.star_socle_total, r.t_socle_total, r.window[0], r.window[1], _flag(r.certified_zero_above)]
        for r in reports
    ]


def write_socle_csv(reports: Sequence[SocleReport], out: IO[str]) -> None:
    w = _writer(out)
    w.writerow(SOCLE_HEADER)
    w.writerows(socle_rows(reports))


def write_plot_table(reports: Sequence[SocleReport], out: IO[str]) -> None:
    """Long format, one row per (ell, degree)"""
    w = _writer(out)
    w.writerow(PLOT_HEADER)
    for r in reports:
        for d, row in sorted(r.rows.items()):
            w.writerow([r.ell, d, row.coker_dim, row.t_socle_dim, row.star_socle_dim, row.i_torsion_dim])


def write_family_csv(rows: Sequence[FamilyRow], out: IO[str]) -> None:
    w = _writer(out)
    w.writerow(FAMILY_HEADER)
    for r in rows:
        w.writerow([r.n, _flag(r.ann_equals_uv_pow_n), _flag(r.minors_equal), _opt(r.mindeg_intersection_so_far)])


def write_vanish_csv(totals: dict, out: IO[str]) -> None:
    w = _writer(out)
    w.writerow(VANISH_HEADER)
    for ell, total in sorted(totals.items()):
        w.writerow([ell, total])


def write_lsummand_csv(rows: Sequence[dict], out: IO[str]) -> None:
    w = _writer(out)
    w.writerow(LSUMMAND_HEADER)
    for r in rows:
        w.writerow([r["q"], r["ell"], " ".join(r["basis"]), r["delta_matrix"], _flag(r["delta_ok"]), _flag(r["closure_ok"])])


def write_json(payload, out: IO[str]) -> None:
    json.dump(payload, out, indent=2, ensure_ascii=False)
    out.write("\n")


def family_dicts(rows: Sequence[FamilyRow]) -> List[dict]:
    return [
        {
            "n": r.n,
            "ann_equals_uv_pow_n": r.ann_equals_uv_pow_n,
            "minors_equal": r.minors_equal,
            "mindeg_intersection_so_far": r.mindeg_intersection_so_far,
        }
        for r in rows
    ]


def write_generators_csv(generators: Sequence[str], out: IO[str]) -> None:
    w = _writer(out)
    w.writerow(["generator"])
    for g in generators:
        w.writerow([g])
