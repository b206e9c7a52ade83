"""
End-to-end pipelines and structural checks.

Hypothesis checks (system of parameters, m-primary coefficient ideal),
the vanishing criterion, the L-summand with its bidiagonal restriction
of multiplication by f, and ``verify_theorem`` which assembles them with
the socle table into a verdict.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from topsocle.Config import settings
from topsocle.algebra.coeff_ring import RingDescriptor, make_ring
from topsocle.cohomology.socle import SocleReport, Window, coker_total, star_socle_table
from topsocle.cohomology.top_lc import (
    GradedMap,
    HypersurfaceF,
    InverseMonomial,
    homogenize,
    inverse_basis,
    mult_action,
    mult_matrix,
)
from topsocle.errors import NotHomogenizableError, ScenarioError, UsageError
from topsocle.services.annihilator import GradedIdeal, ann_coker_upto
from topsocle.utils.expressions import parse_generators
from topsocle.utils.validators import ScenarioFile, load_scenario_file

logger = logging.getLogger(__name__)

PRESET_DIR = Path(__file__).resolve().parent.parent / "presets"
PRESETS = ("hartshorne", "example12")


class TriState(str, Enum):
    YES = "yes"
    NO = "no"
    INCONCLUSIVE = "inconclusive"


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


@dataclass
class ScenarioConfig:
    ring: RingDescriptor
    f: HypersurfaceF
    ells: List[int]
    window: Optional[Window] = None
    preset: Optional[str] = None
    by_q: bool = False


@dataclass
class VerificationReport:
    """
    Outcome of ``verify_theorem``; pass only when both hypothesis checks
    say yes and every required ell has a nonzero *socle
    """

    preset: Optional[str]
    f: str
    sop_check: TriState
    support_check: TriState
    socle_table: List[SocleReport]
    required_ells: List[int]
    verdict: Verdict = Verdict.INCONCLUSIVE
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "preset": self.preset,
            "f": self.f,
            "sop_check": self.sop_check.value,
            "support_check": self.support_check.value,
            "verdict": self.verdict.value,
            "required_ells": self.required_ells,
            "notes": self.notes,
            "socle_table": [r.to_dict() for r in self.socle_table],
        }


# Coefficient ideal and hypothesis checks


def coefficient_ideal(f: HypersurfaceF) -> GradedIdeal:
    """
    C_f, the ideal of T generated by the coefficients of f

    Raises:
        NotHomogenizableError: a coefficient is not homogeneous, so C_f is not graded
    """
    for c in f.coefficients():
        if not c.is_homogeneous():
            raise NotHomogenizableError(f"coefficient {c} is not homogeneous")
    return GradedIdeal(f.ring, f.coefficients())


def _quotient_dim(ideal: GradedIdeal, d: int) -> int:
    return len(ideal.ring.degree_basis(d)) - ideal.component_dim(d)


def is_m_primary_upto(ideal: GradedIdeal, cap: int) -> TriState:
    """
    Decide m-primality from the degrees up to cap

    yes: (T/I)_d vanishes on the band [cap - slack, cap], slack being the
    largest generator degree. no: I contains a unit, or some generator of
    m has no power in I up to cap while the quotient dimensions do not
    decrease over that band.
    """
    if cap < 1:
        raise UsageError(f"cap must be >= 1, got {cap}")
    ring = ideal.ring
    if ideal.component_dim(0):
        return TriState.NO
    slack = max((g.degree() for g in ideal.generators), default=0)
    band = range(max(cap - slack, 0), cap + 1)
    dims = [_quotient_dim(ideal, d) for d in band]
    if all(q == 0 for q in dims):
        return TriState.YES

    for g in ring.m_generators():
        step = sum(g)
        powers = (tuple(k * a for a in g) for k in range(1, cap // step + 1))
        if not any(ideal.contains(ring.term(e)) for e in powers):
            if all(a <= b for a, b in zip(dims, dims[1:])):
                return TriState.NO
    return TriState.INCONCLUSIVE


class SopResult(NamedTuple):
    state: TriState
    note: str


def check_sop(f: HypersurfaceF, cap: Optional[int] = None) -> SopResult:
    """
    Do the coefficients of f form a system of parameters of T?

    Counts distinct coefficients up to scalars against dim T and asks
    whether C_f is m-primary.
    """
    cap = cap if cap is not None else settings.deg_cap
    ideal = coefficient_ideal(f)
    count = len(ideal.generators)
    dim = f.ring.dim()
    primary = is_m_primary_upto(ideal, cap)
    note = f"{count} distinct coefficients, dim T = {dim}, C_f m-primary up to {cap}: {primary.value}"
    if count != dim or primary == TriState.NO:
        return SopResult(TriState.NO, note)
    return SopResult(primary, note)


@dataclass
class VanishingReport:
    f_bar: Optional[HypersurfaceF]
    coker_totals: Dict[int, int]
    consistent: bool
    windows: Dict[int, Window] = field(default_factory=dict)

    @property
    def all_zero(self) -> bool:
        return all(v == 0 for v in self.coker_totals.values())


def vanishing_check(f: HypersurfaceF, ells: Sequence[int], window_cap: Optional[int] = None) -> VanishingReport:
    """
    Compare the reduction of f modulo m with the cokernel dimensions

    f_bar nonzero (a unit coefficient) must coincide with every piece in
    range being zero. Totals are taken over each default window, so for
    f_bar = 0 they are lower bounds when C_f is not m-primary.
    """
    f_bar = f.reduction_mod_m()
    windows: Dict[int, Window] = {}
    totals: Dict[int, int] = {}
    for ell in ells:
        windows[ell], totals[ell] = coker_total(f, ell, window_cap)
    all_zero = all(v == 0 for v in totals.values())
    consistent = (f_bar is not None) == all_zero
    if not consistent:
        logger.warning(f"⚠️ vanishing criterion disagrees for f = {f}: f_bar = {f_bar}, totals = {totals}")
    return VanishingReport(f_bar, totals, consistent, windows)


# L-summand


def _two_term_blocks(f: HypersurfaceF) -> Tuple:
    if len(f.terms) != 2:
        raise ScenarioError(f"the L-summand needs exactly two terms, f has {len(f.terms)}")
    (c1, g1), (c2, g2) = f.terms
    if any(a and b for a, b in zip(g1, g2)):
        raise ScenarioError("the L-summand needs terms with disjoint x-supports")
    return c1, g1, c2, g2


def is_two_term_disjoint(f: HypersurfaceF) -> bool:
    try:
        _two_term_blocks(f)
    except ScenarioError:
        return False
    return True


def l_ell(f: HypersurfaceF, q: int) -> int:
    """ell(q) = q*p + n"""
    return q * f.p + f.n


def l_summand_basis(f: HypersurfaceF, q: int) -> List[InverseMonomial]:
    """
    x^-(s*gamma_1 + t*gamma_2 + 1) for s + t = q, s descending

    Raises:
        ScenarioError: f is not a two-term form with disjoint supports
    """
    if q < 0:
        raise UsageError(f"q must be >= 0, got {q}")
    _, g1, _, g2 = _two_term_blocks(f)
    w = homogenize(f).ring.weights()
    out = []
    for s in range(q, -1, -1):
        t = q - s
        out.append(InverseMonomial.of(tuple(s * a + t * b + 1 for a, b in zip(g1, g2)), w))
    return out


def delta_matrix(f: HypersurfaceF, q: int) -> GradedMap:
    """Multiplication by f restricted to L(q+1) -> L(q)"""
    full = mult_matrix(f, l_ell(f, q))
    rows = l_summand_basis(f, q)
    cols = l_summand_basis(f, q + 1)
    row_at = {b: i for i, b in enumerate(full.target_basis)}
    col_at = {b: j for j, b in enumerate(full.source_basis)}
    ri = [row_at[b] for b in rows]
    cj = [col_at[b] for b in cols]
    return GradedMap(
        full.ring,
        [[full.entries[i][j] for j in cj] for i in ri],
        tuple(full.source_degrees[j] for j in cj),
        tuple(full.target_degrees[i] for i in ri),
        source_basis=cols,
        target_basis=rows,
    )


class DeltaCheck(NamedTuple):
    ok: bool
    matrix: GradedMap

    def __bool__(self) -> bool:
        return self.ok


def delta_matrix_check(f: HypersurfaceF, q: int) -> DeltaCheck:
    """The restricted map is bidiagonal: first coefficient on the diagonal, second above it"""
    c1, _, c2, _ = _two_term_blocks(f)
    delta = delta_matrix(f, q)
    ring = delta.ring
    ok = True
    for i, row in enumerate(delta.entries):
        for j, entry in enumerate(row):
            expected = c1 if j == i else c2 if j == i + 1 else ring.zero()
            if entry.terms != expected.terms:
                ok = False
    return DeltaCheck(ok, delta)


def complement_closure_check(f: HypersurfaceF, q: int) -> bool:
    """
    No basis element at ell(q+1) outside L(q+1) maps into L(q)

    Together with the bidiagonal restriction this makes coker of the
    restricted map a direct summand of the piece at ell(q).
    """
    _two_term_blocks(f)
    h = homogenize(f)
    inside = set(l_summand_basis(h, q + 1))
    target = set(l_summand_basis(h, q))
    w = h.ring.weights()
    for b in inverse_basis(h.n, l_ell(h, q + 1), w):
        if b in inside:
            continue
        hits = [a for a in mult_action(h, b) if a in target]
        if hits:
            logger.debug(f"x^-{b.alpha} reaches the L-summand at {hits[0].alpha}")
            return False
    return True


def module_annihilator_profile(f: HypersurfaceF, ells: Sequence[int], cap: int) -> Dict[int, Optional[int]]:
    """Least degree of ann_T of the piece at each ell, None when nothing up to cap"""
    return {ell: ann_coker_upto(mult_matrix(f, ell), cap).min_degree(cap) for ell in ells}


# Verification


def required_ells(f: HypersurfaceF, ells: Sequence[int]) -> List[int]:
    """ell(q) values in range for a two-term disjoint f, otherwise every ell"""
    if not is_two_term_disjoint(f):
        return list(ells)
    return [ell for ell in ells if ell >= f.n and (ell - f.n) % f.p == 0]


def decide_verdict(
    sop: TriState,
    support: TriState,
    table: Sequence[SocleReport],
    required: Sequence[int],
    discrepancies: Sequence[str] = (),
) -> Verdict:
    if sop == TriState.NO or support == TriState.NO or discrepancies:
        return Verdict.FAIL
    needed = set(required)
    rows = [r for r in table if r.ell in needed]
    if any(r.star_socle_total == 0 and r.certified_zero_above for r in rows):
        return Verdict.FAIL
    if sop == TriState.YES and support == TriState.YES and all(r.star_socle_total >= 1 for r in rows):
        return Verdict.PASS
    return Verdict.INCONCLUSIVE


def verify_theorem(
    cfg: ScenarioConfig, jobs: int = 1, cap: Optional[int] = None, window_cap: Optional[int] = None
) -> VerificationReport:
    """
    Run the hypothesis checks and the *socle table for a scenario

    Failures are recorded in the report; only invalid input raises.
    """
    cap = cap if cap is not None else settings.deg_cap
    f = cfg.f
    label = cfg.preset or str(f)
    logger.info(f"verifying {label} over {cfg.ring.describe()}")

    sop = check_sop(f, cap)
    support = is_m_primary_upto(coefficient_ideal(f), cap)
    table = star_socle_table(f, cfg.ells, cfg.window, jobs, window_cap)
    required = required_ells(f, cfg.ells)

    notes = [sop.note]
    for r in table:
        if r.ell not in required and r.star_socle_total == 0:
            notes.append(f"ell={r.ell}: *socle total 0 off the L-summand degrees")
        if not r.certified_zero_above:
            notes.append(f"ell={r.ell}: window {r.window} not certified, totals are lower bounds")

    if is_two_term_disjoint(f):
        for ell in required:
            q = (ell - f.n) // f.p
            if not delta_matrix_check(f, q):
                notes.append(f"q={q}: restricted map is not bidiagonal")
            if not complement_closure_check(f, q):
                notes.append(f"q={q}: L-summand is not closed under the complement")

    report = VerificationReport(cfg.preset, str(f), sop.state, support, table, required, notes=notes)
    report.verdict = decide_verdict(sop.state, support, table, required)
    icon = {"pass": "✅", "fail": "❌"}.get(report.verdict.value, "⚠️")
    logger.info(f"{icon} {label}: {report.verdict.value}")
    return report


# Presets and scenario files


def scenario_from_file(data: ScenarioFile, characteristic: Optional[int] = None) -> ScenarioConfig:
    """
    Build a ScenarioConfig from a validated scenario file

    ``characteristic`` overrides the file; the file overrides settings.
    """
    c = characteristic
    if c is None:
        c = data.characteristic if data.characteristic is not None else settings.characteristic
    rs = data.ring
    generators = parse_generators(rs.u_vars, rs.generators) if rs.generators else ()
    ring = make_ring(rs.backend, rs.u_vars, rs.x_vars, generators, rs.weights, c)
    f = HypersurfaceF.parse(ring, data.hypersurface.f)
    e = data.ells
    if e.by_q:
        ells = [q * f.p + f.n for q in range(e.qmin, e.qmax + 1)]
    else:
        ells = list(range(e.lmin, e.lmax + 1))
    window = (data.window.lo, data.window.hi) if data.window else None
    return ScenarioConfig(ring, f, ells, window, data.name, e.by_q)


def load_preset(name: str) -> ScenarioFile:
    if name not in PRESETS:
        raise UsageError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return load_scenario_file(PRESET_DIR / f"{name}.toml")


def override_ells(
    cfg: ScenarioConfig, lmin: Optional[int] = None, lmax: Optional[int] = None, qmax: Optional[int] = None
) -> ScenarioConfig:
    """
    Replace a scenario's ell range with the command-line bounds

    Flags win over the file in both directions. A scenario stepped by q,
    or any scenario given ``qmax``, stays on the ell(q) lattice; lmin and
    lmax then bound that lattice. Bounds left out keep the file's values.

    Raises:
        UsageError: the resulting range is empty
    """
    if lmin is None and lmax is None and qmax is None:
        return cfg
    f = cfg.f
    first = cfg.ells[0] if cfg.ells else f.n
    last = cfg.ells[-1] if cfg.ells else f.n
    by_q = cfg.by_q or qmax is not None
    if by_q:
        q_lo = (first - f.n) // f.p if cfg.by_q else 0
        if lmin is not None:
            q_lo = max(-(-(lmin - f.n) // f.p), 0)
        if qmax is not None:
            q_hi = qmax
        else:
            q_hi = (lmax if lmax is not None else last) - f.n
            q_hi = q_hi // f.p if q_hi >= 0 else -1
        ells = [l_ell(f, q) for q in range(q_lo, q_hi + 1)]
        if lmax is not None:
            ells = [ell for ell in ells if ell <= lmax]
    else:
        lo = lmin if lmin is not None else first
        hi = lmax if lmax is not None else last
        ells = list(range(lo, hi + 1))
    if not ells:
        raise UsageError(f"empty ell range for lmin={lmin}, lmax={lmax}, qmax={qmax}")
    return ScenarioConfig(cfg.ring, f, ells, cfg.window, cfg.preset, by_q)
