"""
Socle, *socle and I-torsion dimensions of the pieces of H^n_I(R/fR).

At a component (ell, d) every cokernel class is tested against three
families of actions:

  m-action   t * x^-alpha -> (g t) * x^-alpha, one per generator g of m
  x-action   t * x^-alpha -> t * x^-(alpha - e_i), zero when alpha_i = 1

The T-socle is the common kernel of the m-actions, the *socle the common
kernel of both families and the I-torsion that of the x-actions alone.
Each action image is reduced modulo the image of f in its target
component; the kernel dimension is then a rank computation.
"""

import logging
from dataclasses import dataclass, field
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

from topsocle.Config import settings
from topsocle.algebra.graded_linalg import RowEchelon
from topsocle.cohomology.top_lc import CokernelPieces, Element, HypersurfaceF, pieces_for
from topsocle.errors import UsageError
from topsocle.services.worker_pool import map_ordered

logger = logging.getLogger(__name__)

Window = Tuple[int, int]


@dataclass
class DegreeRow:
    degree: int
    coker_dim: int
    t_socle_dim: int
    star_socle_dim: int
    i_torsion_dim: int


@dataclass
class SocleReport:
    """
    Per-degree dimensions for one ell

    ``certified_zero_above`` is true when the last ``zero_run`` lattice
    degrees of the window had a zero cokernel component; the totals are
    exact then and lower bounds otherwise.
    """

    ell: int
    free_rank: int
    window: Window
    certified_zero_above: bool
    rows: Dict[int, DegreeRow] = field(default_factory=dict)

    @property
    def per_degree(self) -> Dict[int, Tuple[int, int]]:
        return {d: (r.t_socle_dim, r.star_socle_dim) for d, r in sorted(self.rows.items())}

    @property
    def star_socle_total(self) -> int:
        return sum(r.star_socle_dim for r in self.rows.values())

    @property
    def t_socle_total(self) -> int:
        return sum(r.t_socle_dim for r in self.rows.values())

    @property
    def coker_total(self) -> int:
        return sum(r.coker_dim for r in self.rows.values())

    @property
    def i_torsion_total(self) -> int:
        return sum(r.i_torsion_dim for r in self.rows.values())

    def to_dict(self) -> dict:
        return {
            "ell": self.ell,
            "free_rank": self.free_rank,
            "star_socle_dim_total": self.star_socle_total,
            "t_socle_dim_total": self.t_socle_total,
            "i_torsion_dim_total": self.i_torsion_total,
            "window_lo": self.window[0],
            "window_hi": self.window[1],
            "certified": self.certified_zero_above,
            "per_degree": [
                {
                    "degree": r.degree,
                    "coker_dim": r.coker_dim,
                    "t_socle_dim": r.t_socle_dim,
                    "star_socle_dim": r.star_socle_dim,
                    "i_torsion_dim": r.i_torsion_dim,
                }
                for _, r in sorted(self.rows.items())
            ],
        }


def _m_action(pieces: CokernelPieces, ell: int, degree: int, el: Element):
    """Yield (tag, target ell, target degree, image vector) for each m-generator"""
    alpha, t = el
    one = pieces.ring.field.one
    for k, g in enumerate(pieces.ring.m_generators()):
        target = (alpha, tuple(a + b for a, b in zip(t, g)))
        yield ("m", k), ell, degree + sum(g), {target: one}


def _x_action(pieces: CokernelPieces, ell: int, degree: int, el: Element):
    alpha, t = el
    one = pieces.ring.field.one
    for i, a in enumerate(alpha):
        if a < 2:
            continue
        target = (tuple(b - int(j == i) for j, b in enumerate(alpha)), t)
        yield ("x", i), ell - 1, pieces.x_degree(ell, degree, i), {target: one}


def _remainder(pieces: CokernelPieces, actions, columns: Dict, out: Dict[int, object]) -> None:
    for tag, ell, degree, vec in actions:
        for key, rem in pieces.reduce(ell, degree, vec).items():
            for idx, v in rem.items():
                col = columns.setdefault((tag, key, idx), len(columns))
                out[col] = v


def degree_row(pieces: CokernelPieces, ell: int, degree: int) -> DegreeRow:
    """All four dimensions at one (ell, degree)"""
    comp = pieces.component(ell, degree)
    coker = comp.dim
    if coker == 0:
        return DegreeRow(degree, 0, 0, 0, 0)

    fld = pieces.ring.field
    m_rank = x_rank = both_rank = 0
    for key, block in comp.blocks.items():
        pivots = block.image.rows
        classes = [block.elements[k] for k in range(len(block.elements)) if k not in pivots]
        if not classes:
            continue
        m_ech, x_ech, both_ech = RowEchelon(fld), RowEchelon(fld), RowEchelon(fld)
        columns: Dict = {}
        for el in classes:
            m_vec: Dict[int, object] = {}
            x_vec: Dict[int, object] = {}
            _remainder(pieces, _m_action(pieces, ell, degree, el), columns, m_vec)
            _remainder(pieces, _x_action(pieces, ell, degree, el), columns, x_vec)
            m_ech.add(m_vec)
            x_ech.add(x_vec)
            both_ech.add({**m_vec, **x_vec})
        m_rank += m_ech.rank
        x_rank += x_ech.rank
        both_rank += both_ech.rank
    return DegreeRow(degree, coker, coker - m_rank, coker - both_rank, coker - x_rank)


def default_window(pieces: CokernelPieces, ell: int) -> Window:
    """0 .. (ell + p) * max coefficient degree + 2m"""
    hi = (ell + pieces.p) * pieces.f.max_coefficient_degree() + 2 * pieces.ring.m
    return 0, hi


def socle_report(
    f: HypersurfaceF,
    ell: int,
    window: Optional[Window] = None,
    window_cap: Optional[int] = None,
    zero_run: Optional[int] = None,
) -> SocleReport:
    """
    Scan the piece of H^n_I(R/fR) at x-degree -ell

    Without an explicit window the default one is widened one lattice step
    at a time until ``zero_run`` consecutive lattice degrees at the top are
    zero, or the upper end reaches ``window_cap``.

    Args:
        f: hypersurface; weights are searched when the ring has none
        ell: x-degree of the piece
        window: inclusive (lo, hi) of normalized degrees, scanned as given
        window_cap: hard cap for widening, settings.window_cap by default
        zero_run: zero degrees needed to certify, settings.zero_run by default

    Returns:
        SocleReport: one row per lattice degree of the window

    Raises:
        NotHomogenizableError: f admits no combined grading
        UsageError: empty window
    """
    window_cap = window_cap if window_cap is not None else settings.window_cap
    zero_run = zero_run if zero_run is not None else settings.zero_run
    pieces = pieces_for(f, settings.weight_bound)
    n = pieces.n
    free_rank = comb(ell - 1, n - 1) if ell >= n else 0

    explicit = window is not None
    lo, hi = window if explicit else default_window(pieces, ell)
    if lo > hi:
        raise UsageError(f"empty window ({lo}, {hi})")
    if ell < n:
        return SocleReport(ell, 0, (lo, hi), True)

    step = pieces.degree_step()
    residue = pieces.degree_residue(ell)
    start = max(lo, 0)
    start += (residue - start) % step

    rows: Dict[int, DegreeRow] = {}
    d = start
    while d <= hi:
        rows[d] = degree_row(pieces, ell, d)
        d += step

    def certified() -> bool:
        top = [rows[k] for k in sorted(rows)[-zero_run:]]
        return len(top) == zero_run and all(r.coker_dim == 0 for r in top)

    if not explicit:
        while not certified() and d <= window_cap:
            rows[d] = degree_row(pieces, ell, d)
            hi = d
            d += step
    done = certified()
    pieces.release_below(ell)
    if not done:
        logger.debug(f"ell={ell}: window ({lo}, {hi}) not certified")
    return SocleReport(ell, free_rank, (lo, hi), done, rows)


def t_socle_dims(f: HypersurfaceF, ell: int, window: Optional[Window] = None) -> SocleReport:
    """Per-degree dimensions of Hom_T(T/m, piece); read ``t_socle_dim`` off the rows"""
    return socle_report(f, ell, window)


def star_socle_dim(f: HypersurfaceF, ell: int, window: Optional[Window] = None) -> SocleReport:
    """Per-degree dimensions of Hom_R(R/P, piece) with P = m + I"""
    return socle_report(f, ell, window)


def coker_total(f: HypersurfaceF, ell: int, window_cap: Optional[int] = None) -> Tuple[Window, int]:
    """
    Sum of the cokernel dimensions over the default window at ell

    Only dimensions are computed; the window is clipped at window_cap and
    never widened.
    """
    window_cap = window_cap if window_cap is not None else settings.window_cap
    pieces = pieces_for(f, settings.weight_bound)
    lo, hi = default_window(pieces, ell)
    hi = min(hi, window_cap)
    if ell < pieces.n:
        return (lo, hi), 0
    step = pieces.degree_step()
    d = lo + (pieces.degree_residue(ell) - lo) % step
    total = 0
    while d <= hi:
        total += pieces.coker_dim(ell, d)
        d += step
    pieces.release_below(ell + 1)
    return (lo, hi), total


def _table_worker(args) -> SocleReport:
    f, ell, window, window_cap, zero_run = args
    return socle_report(f, ell, window, window_cap, zero_run)


def star_socle_table(
    f: HypersurfaceF,
    ells: Sequence[int],
    window: Optional[Window] = None,
    jobs: int = 1,
    window_cap: Optional[int] = None,
    zero_run: Optional[int] = None,
) -> List[SocleReport]:
    """
    One SocleReport per ell, in the order of ``ells``

    The reports do not depend on ``jobs``.
    """
    window_cap = window_cap if window_cap is not None else settings.window_cap
    zero_run = zero_run if zero_run is not None else settings.zero_run
    work = [(f, ell, window, window_cap, zero_run) for ell in ells]
    logger.info(f"scanning {len(work)} pieces of H^n_I(R/fR) for f = {f}")
    return map_ordered(_table_worker, work, jobs)
