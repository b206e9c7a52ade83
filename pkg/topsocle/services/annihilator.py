"""
Bidiagonal family A_n over k[u,v], its maximal minors and the annihilators
of its cokernels, all computed degreewise up to a cap.

Ideals are never given Groebner bases; a GradedIdeal answers questions
about its degree-d component by spanning generator multiples in the
monomial basis of T_d.
"""

import logging
from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement
from typing import Dict, FrozenSet, List, NamedTuple, Optional, Sequence, Tuple

from topsocle.Config import settings
from topsocle.algebra.coeff_ring import CoeffPoly, Exponent, RingDescriptor, make_ring
from topsocle.algebra.graded_linalg import RowEchelon, ScalarMatrix, SparseVector, kernel_basis, span_intersection
from topsocle.cohomology.top_lc import GradedMap, MapComponent
from topsocle.errors import UsageError
from topsocle.services.worker_pool import map_ordered

logger = logging.getLogger(__name__)


def default_ring(characteristic: Optional[int] = None) -> RingDescriptor:
    """k[u,v] with the configured characteristic"""
    c = settings.characteristic if characteristic is None else characteristic
    return make_ring("poly", ("u", "v"), ("x", "y"), characteristic=c)


def _to_vector(ring: RingDescriptor, poly: CoeffPoly, d: int) -> SparseVector:
    index = {e: k for k, e in enumerate(ring.degree_basis(d))}
    return {index[e]: c for e, c in poly.terms.items()}


def _from_vector(ring: RingDescriptor, vec: SparseVector, d: int) -> CoeffPoly:
    basis = ring.degree_basis(d)
    return CoeffPoly(ring, {basis[k]: c for k, c in vec.items()})


def _shift(poly: CoeffPoly, e: Exponent) -> Dict[Exponent, object]:
    return {tuple(a + b for a, b in zip(m, e)): c for m, c in poly.terms.items()}


class GradedIdeal:
    """
    Homogeneous ideal of T given by generators

    Generators are made monic, deduplicated and sorted by (degree, terms).
    Degree components are exact at every degree; ``degree_cap`` records
    up to where the generator list itself is known to be complete.
    """

    def __init__(self, ring: RingDescriptor, generators: Sequence[CoeffPoly], degree_cap: Optional[int] = None):
        clean = {}
        for g in generators:
            if g.is_zero():
                continue
            if not g.is_homogeneous():
                raise UsageError(f"generator {g} is not homogeneous")
            g = g.monic()
            clean[tuple(g.terms.items())] = g
        self.ring = ring
        self.generators: List[CoeffPoly] = sorted(
            clean.values(), key=lambda g: (g.degree(), [tuple(-a for a in e) for e in g.terms])
        )
        self.degree_cap = degree_cap
        self._components: Dict[int, RowEchelon] = {}

    def component(self, d: int) -> RowEchelon:
        """Echelon basis of I_d in the monomial basis of T_d"""
        cached = self._components.get(d)
        if cached is not None:
            return cached
        ring = self.ring
        ech = RowEchelon(ring.field)
        if d >= 0:
            index = {e: k for k, e in enumerate(ring.degree_basis(d))}
            for g in self.generators:
                for e in ring.degree_basis(d - g.degree()):
                    ech.add({index[m]: c for m, c in _shift(g, e).items()})
        self._components[d] = ech
        return ech

    def component_dim(self, d: int) -> int:
        return self.component(d).rank

    def component_basis(self, d: int) -> List[CoeffPoly]:
        return [_from_vector(self.ring, v, d) for v in self.component(d).basis()]

    def contains(self, poly: CoeffPoly) -> bool:
        if poly.is_zero():
            return True
        if not poly.is_homogeneous():
            return all(self.contains(CoeffPoly(self.ring, {e: c})) for e, c in poly.terms.items())
        d = poly.degree()
        return self.component(d).contains(_to_vector(self.ring, poly, d))

    def min_degree(self, cap: int) -> Optional[int]:
        for d in range(cap + 1):
            if self.component_dim(d):
                return d
        return None

    def __str__(self) -> str:
        return "(" + ", ".join(str(g) for g in self.generators) + ")" if self.generators else "(0)"

    def __repr__(self) -> str:
        return f"GradedIdeal{self}"


def maximal_ideal_power(ring: RingDescriptor, n: int) -> GradedIdeal:
    """m^n, generated by all products of n generators of m"""
    if n < 0:
        raise UsageError(f"power must be >= 0, got {n}")
    gens = set()
    for combo in combinations_with_replacement(ring.m_generators(), n):
        gens.add(tuple(sum(col) for col in zip(*combo)) if combo else (0,) * ring.m)
    return GradedIdeal(ring, [ring.term(e) for e in sorted(gens, reverse=True)])


def build_An(n: int, ring: Optional[RingDescriptor] = None) -> GradedMap:
    """
    n x (n+1) matrix with u on the diagonal and v on the superdiagonal

    Rows sit in degree 0 and columns in degree 1.
    """
    if n < 1:
        raise UsageError(f"n must be >= 1, got {n}")
    ring = ring or default_ring()
    if ring.m != 2:
        raise UsageError("A_n is defined over a ring with two u-variables")
    u, v = ring.variable(ring.u_var_names[0]), ring.variable(ring.u_var_names[1])
    zero = ring.zero()
    entries = [[u if j == i else v if j == i + 1 else zero for j in range(n + 1)] for i in range(n)]
    return GradedMap(ring, entries, (1,) * (n + 1), (0,) * n)


def maximal_minors(A: GradedMap) -> GradedIdeal:
    """
    Ideal of rows x rows minors by cofactor expansion along the rows

    Sub-determinants are memoized on (first row, column subset) so the
    expansions of all column choices share work.
    """
    r, c = A.rows, A.cols
    if r > c:
        raise UsageError(f"{r}x{c} matrix has more rows than columns")
    ring = A.ring
    memo: Dict[Tuple[int, FrozenSet[int]], CoeffPoly] = {}

    def det(i: int, cols: Tuple[int, ...]) -> CoeffPoly:
        if i == r:
            return ring.one()
        key = (i, frozenset(cols))
        if key in memo:
            return memo[key]
        total = ring.zero()
        for pos, j in enumerate(cols):
            entry = A.entries[i][j]
            if entry.is_zero():
                continue
            sub = det(i + 1, cols[:pos] + cols[pos + 1:])
            if sub.is_zero():
                continue
            term = entry * sub
            total = total - term if pos % 2 else total + term
        memo[key] = total
        return total

    minors = [det(0, cols) for cols in combinations(range(c), r)]
    logger.debug(f"{len(minors)} maximal minors of a {r}x{c} matrix")
    return GradedIdeal(ring, minors)


def ann_coker_upto(A: GradedMap, cap: int) -> GradedIdeal:
    """
    ann_T coker(A), degreewise up to cap

    For each d the annihilator component is the kernel of
    t -> (t * e_i mod image(A)) over all target basis vectors e_i; generators
    are the elements not already produced by lower-degree ones.

    Args:
        A: graded presentation matrix
        cap: last degree computed

    Returns:
        GradedIdeal: minimal homogeneous generating set up to cap
    """
    if cap < 1:
        raise UsageError(f"cap must be >= 1, got {cap}")
    ring = A.ring
    fld = ring.field
    components: Dict[int, MapComponent] = {}

    def comp(degree: int) -> MapComponent:
        if degree not in components:
            components[degree] = A.component(degree)
        return components[degree]

    found = GradedIdeal(ring, [], cap)
    generators: List[CoeffPoly] = []
    for d in range(cap + 1):
        basis = ring.degree_basis(d)
        if not basis:
            continue
        columns: Dict[Tuple[int, int], int] = {}
        cols: List[SparseVector] = []
        for e in basis:
            col: SparseVector = {}
            for i, b in enumerate(A.target_degrees):
                mc = comp(d + b)
                rem = mc.image.reduce({mc.index[(i, e)]: fld.one})
                for idx, val in rem.items():
                    col[columns.setdefault((i, idx), len(columns))] = val
            cols.append(col)
        M = ScalarMatrix.from_columns(fld, cols, len(columns))
        ann_d = kernel_basis(M)
        if not ann_d:
            continue
        lower = RowEchelon(fld)
        lower.extend(found.component(d).basis())
        for vec in ann_d:
            sparse = {k: a for k, a in enumerate(vec) if not fld.is_zero(a)}
            if lower.add(sparse):
                generators.append(_from_vector(ring, sparse, d))
        found = GradedIdeal(ring, generators, cap)
    return found


class IdealComparison(NamedTuple):
    equal: bool
    degree: Optional[int]
    witness: Optional[CoeffPoly]

    def __bool__(self) -> bool:
        return self.equal


def ideal_equal_upto(Ia: GradedIdeal, Ib: GradedIdeal, cap: int) -> IdealComparison:
    """
    Compare two ideals degree by degree up to cap

    Returns:
        IdealComparison: equality flag; on failure the least discrepant
            degree and an element of one ideal missing from the other
    """
    if Ia.ring.field != Ib.ring.field or Ia.ring.m != Ib.ring.m:
        raise UsageError("ideals over different rings")
    for d in range(cap + 1):
        ea, eb = Ia.component(d), Ib.component(d)
        for src, dst in ((ea, eb), (eb, ea)):
            for vec in src.basis():
                if not dst.contains(vec):
                    return IdealComparison(False, d, _from_vector(Ia.ring, vec, d))
    return IdealComparison(True, None, None)


@dataclass
class FamilyRow:
    n: int
    ann_equals_uv_pow_n: bool
    minors_equal: bool
    mindeg_intersection_so_far: Optional[int]


def _ann_worker(args) -> GradedIdeal:
    n, cap, ring = args
    return ann_coker_upto(build_An(n, ring), cap)


def _intersect(ring: RingDescriptor, current: Dict[int, List[SparseVector]], ideal: GradedIdeal, cap: int) -> None:
    for d in range(cap + 1):
        dim = len(ring.degree_basis(d))
        current[d] = span_intersection(ring.field, current[d], ideal.component(d).basis(), dim)


def family_intersection_mindeg(
    N: int, cap: int, ring: Optional[RingDescriptor] = None, jobs: int = 1
) -> Optional[int]:
    """
    Least degree of a nonzero element of the intersection of ann coker(A_n), n <= N

    Returns:
        Optional[int]: the degree, or None when nothing survives up to cap

    Raises:
        UsageError: N < 1 or cap < N
    """
    rows = ann_family(N, cap, ring, jobs)
    return rows[-1].mindeg_intersection_so_far


def ann_family(n_max: int, cap: int, ring: Optional[RingDescriptor] = None, jobs: int = 1) -> List[FamilyRow]:
    """
    Per-n comparison rows for the family A_1 .. A_{n_max}

    Each row says whether ann coker(A_n) and the maximal minors both equal
    (u,v)^n up to cap, and the least degree surviving in the intersection
    of the annihilators so far.
    """
    if n_max < 1:
        raise UsageError(f"N must be >= 1, got {n_max}")
    if cap < n_max:
        raise UsageError(f"cap {cap} is below N = {n_max}; the intersection cannot be resolved")
    ring = ring or default_ring()
    anns = map_ordered(_ann_worker, [(n, cap, ring) for n in range(1, n_max + 1)], jobs)

    out = []
    current: Dict[int, List[SparseVector]] = {}
    for n, ann in enumerate(anns, start=1):
        power = maximal_ideal_power(ring, n)
        if n == 1:
            current = {d: ann.component(d).basis() for d in range(cap + 1)}
        else:
            _intersect(ring, current, ann, cap)
        mindeg = next((d for d in range(cap + 1) if current[d]), None)
        ann_eq = ideal_equal_upto(ann, power, cap)
        minors_eq = ideal_equal_upto(maximal_minors(build_An(n, ring)), power, cap)
        if not ann_eq:
            logger.warning(f"⚠️ ann coker(A_{n}) differs from (u,v)^{n} in degree {ann_eq.degree}: {ann_eq.witness}")
        out.append(FamilyRow(n, ann_eq.equal, minors_eq.equal, mindeg))
    return out
