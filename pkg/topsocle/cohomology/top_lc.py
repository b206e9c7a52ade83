"""
Graded pieces of H^n_I(R) and H^n_I(R/fR).

H^n_I(R) at x-degree -ell is the free T-module on the inverse monomials
x^-alpha with every alpha_i >= 1 and sum(alpha) = ell. Multiplication by
f maps the piece at ell + p into the piece at ell, and its cokernel is the
piece of H^n_I(R/fR).

Everything is graded by the combined degree deg_T(t) - w . alpha of an
element t * x^-alpha, reported as the normalized degree
d = combined + W(ell) where W(ell) is the largest weighted degree of the
basis at ell. Cokernel components are built lazily, one (ell, d) at a
time, and split further into blocks of a finer multigrading.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from math import gcd, lcm
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from topsocle.algebra.coeff_ring import CoeffPoly, Exponent, RingDescriptor, exponents_of_degree
from topsocle.algebra.graded_linalg import RowEchelon, ScalarMatrix, SparseVector, in_span, kernel_basis
from topsocle.algebra.scalar_field import RawScalar, RationalField
from topsocle.errors import NotHomogenizableError, UsageError
from topsocle.utils.expressions import split_by_x_exponent

logger = logging.getLogger(__name__)

DEFAULT_WEIGHT_BOUND = 64

# (alpha, exponent of t) names the basis element t * x^-alpha
Element = Tuple[Exponent, Exponent]


@dataclass(frozen=True, order=True)
class InverseMonomial:
    """x^-alpha with every alpha_i >= 1"""

    alpha: Exponent
    weighted_deg: int

    def __post_init__(self):
        if not self.alpha or min(self.alpha) < 1:
            raise UsageError(f"inverse monomial exponents must be >= 1, got {self.alpha}")

    @classmethod
    def of(cls, alpha: Sequence[int], weights: Optional[Sequence[int]] = None) -> "InverseMonomial":
        alpha = tuple(alpha)
        weights = weights or (1,) * len(alpha)
        return cls(alpha, sum(w * a for w, a in zip(weights, alpha)))

    @property
    def ell(self) -> int:
        return sum(self.alpha)

    def render(self, names: Sequence[str]) -> str:
        return "*".join(f"{name}^-{a}" for name, a in zip(names, self.alpha))


@lru_cache(maxsize=1024)
def _compositions(n: int, ell: int) -> Tuple[Exponent, ...]:
    if n < 1:
        raise UsageError(f"n must be >= 1, got {n}")
    if ell < n:
        return ()
    return tuple(tuple(a + 1 for a in e) for e in exponents_of_degree(n, ell - n))


def inverse_basis(n: int, ell: int, weights: Optional[Sequence[int]] = None) -> List[InverseMonomial]:
    """
    Basis of the free T-module H^n_I(R) at x-degree -ell

    Args:
        n: number of x-variables
        ell: x-degree of the dual monomials
        weights: x-weights used for weighted_deg, ones when omitted

    Returns:
        List[InverseMonomial]: compositions of ell into n positive parts,
            descending lex; empty when ell < n
    """
    return [InverseMonomial.of(alpha, weights) for alpha in _compositions(n, ell)]


class HypersurfaceF:
    """
    f = sum of c_t * x^gamma_t with every gamma_t of total degree p

    Terms are ordered by descending lex on their x-exponents; that order is
    what "first" and "second" term mean elsewhere.
    """

    __slots__ = ("ring", "terms", "p")

    def __init__(self, ring: RingDescriptor, terms: Sequence[Tuple[CoeffPoly, Exponent]]):
        clean = [(c, tuple(g)) for c, g in terms if not c.is_zero()]
        if not clean:
            raise UsageError("f must be nonzero")
        exps = [g for _, g in clean]
        if len(set(exps)) != len(exps):
            raise UsageError("two terms of f share an x-exponent")
        for g in exps:
            if len(g) != ring.n or min(g) < 0:
                raise UsageError(f"x-exponent {g} does not match {ring.n} x-variables")
        degrees = {sum(g) for g in exps}
        if len(degrees) != 1:
            raise UsageError(f"f is not homogeneous in x: term degrees {sorted(degrees)}")
        self.ring = ring
        self.terms: Tuple[Tuple[CoeffPoly, Exponent], ...] = tuple(sorted(clean, key=lambda t: t[1], reverse=True))
        self.p = degrees.pop()

    @classmethod
    def parse(cls, ring: RingDescriptor, text: str) -> "HypersurfaceF":
        """Parse f from text such as ``u^4*x^2 + v^8*y*z``"""
        grouped = split_by_x_exponent(ring, text)
        return cls(ring, [(c, g) for g, c in grouped.items()])

    @property
    def n(self) -> int:
        return self.ring.n

    def coefficients(self) -> List[CoeffPoly]:
        return [c for c, _ in self.terms]

    def x_exponents(self) -> List[Exponent]:
        return [g for _, g in self.terms]

    def max_coefficient_degree(self) -> int:
        return max(max(c.degrees()) for c in self.coefficients())

    def degree_shift(self) -> int:
        """Combined degree D_f of f under the ring's weights"""
        w = self.ring.weights()
        shifts = set()
        for c, g in self.terms:
            for e in c.terms:
                shifts.add(sum(e) + sum(a * b for a, b in zip(w, g)))
        if len(shifts) != 1:
            raise NotHomogenizableError(f"f is not combined-homogeneous under weights {w}")
        return shifts.pop()

    def with_ring(self, ring: RingDescriptor) -> "HypersurfaceF":
        return HypersurfaceF(ring, [(CoeffPoly(ring, c.terms), g) for c, g in self.terms])

    def scaled(self, c: RawScalar) -> "HypersurfaceF":
        return HypersurfaceF(self.ring, [(coeff.scale(c), g) for coeff, g in self.terms])

    def times_variable(self, i: int) -> "HypersurfaceF":
        """x_i * f"""
        if not 0 <= i < self.n:
            raise UsageError(f"no x-variable with index {i}")
        return HypersurfaceF(
            self.ring, [(c, tuple(a + int(j == i) for j, a in enumerate(g))) for c, g in self.terms]
        )

    def reduction_mod_m(self) -> Optional["HypersurfaceF"]:
        """The image of f in k[x], or None when it vanishes"""
        ring = self.ring
        kept = [(ring.constant(c.constant_term()), g) for c, g in self.terms]
        kept = [(c, g) for c, g in kept if not c.is_zero()]
        return HypersurfaceF(ring, kept) if kept else None

    def __eq__(self, other) -> bool:
        if not isinstance(other, HypersurfaceF):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.ring, self.terms))

    def __str__(self) -> str:
        names = self.ring.x_var_names
        parts = []
        for c, g in self.terms:
            xs = "*".join(
                name if a == 1 else f"{name}^{a}" for name, a in zip(names, g) if a
            )
            coeff = str(c)
            if not xs:
                parts.append(f"({coeff})" if len(c.terms) > 1 else coeff)
            elif coeff == "1":
                parts.append(xs)
            elif len(c.terms) > 1:
                parts.append(f"({coeff})*{xs}")
            else:
                parts.append(f"{coeff}*{xs}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"HypersurfaceF({self})"


# Combined grading


def _weights_fit(f: HypersurfaceF, w: Sequence[int]) -> bool:
    shifts = set()
    for c, g in f.terms:
        for e in c.terms:
            shifts.add(sum(e) + sum(a * b for a, b in zip(w, g)))
            if len(shifts) > 1:
                return False
    return True


def _rationally_consistent(f: HypersurfaceF) -> bool:
    # unknowns (w_1..w_n, D): gamma . w - D = -deg(c) for every coefficient monomial
    rows, rhs = [], []
    for c, g in f.terms:
        for e in c.terms:
            rows.append([Fraction(a) for a in g] + [Fraction(-1)])
            rhs.append(Fraction(-sum(e)))
    M = ScalarMatrix.from_dense(RationalField(), rows, f.n + 1)
    return in_span(rhs, M).member


def find_combined_weights(f: HypersurfaceF, bound: int = DEFAULT_WEIGHT_BOUND) -> Tuple[int, ...]:
    """
    Search positive integer x-weights making f combined-homogeneous

    Weight vectors are tried by increasing sum; within a sum the
    lexicographically smallest candidate wins. Weights already set on the
    ring are validated instead.

    Raises:
        NotHomogenizableError: no weights within the bound work
    """
    if f.ring.x_weights is not None:
        if not _weights_fit(f, f.ring.x_weights):
            raise NotHomogenizableError(f"f is not combined-homogeneous under the given weights {f.ring.x_weights}")
        return f.ring.x_weights
    if not all(c.is_homogeneous() for c in f.coefficients()):
        raise NotHomogenizableError("a coefficient of f is not homogeneous in T")
    if not _rationally_consistent(f):
        raise NotHomogenizableError("the degree equations for f have no solution")

    n = f.n
    for total in range(n, n * bound + 1):
        # exponents_of_degree is descending lex, so walk it backwards
        candidates = [tuple(a + 1 for a in e) for e in exponents_of_degree(n, total - n)]
        for w in reversed(candidates):
            if max(w) <= bound and _weights_fit(f, w):
                logger.debug(f"combined weights {w} for f = {f}")
                return w
    raise NotHomogenizableError(f"no positive weights <= {bound}")


def homogenize(f: HypersurfaceF, bound: int = DEFAULT_WEIGHT_BOUND) -> HypersurfaceF:
    """f over a ring whose x_weights make it combined-homogeneous"""
    w = find_combined_weights(f, bound)
    if f.ring.x_weights == w:
        return f
    return f.with_ring(f.ring.with_weights(w))


def mult_action(f: HypersurfaceF, b: InverseMonomial) -> Dict[InverseMonomial, CoeffPoly]:
    """
    f * x^-beta as a T-linear combination of inverse monomials

    Summands whose exponent would drop to 0 in some variable vanish.
    """
    w = f.ring.weights()
    out: Dict[InverseMonomial, CoeffPoly] = {}
    for c, g in f.terms:
        alpha = tuple(a - e for a, e in zip(b.alpha, g))
        if min(alpha) < 1:
            continue
        key = InverseMonomial.of(alpha, w)
        out[key] = out[key] + c if key in out else c
    return {k: v for k, v in out.items() if not v.is_zero()}


@dataclass
class GradedMap:
    """
    Matrix of elements of T between graded free T-modules

    Column j has source degree ``source_degrees[j]`` and row i target
    degree ``target_degrees[i]``; a nonzero entry (i, j) is homogeneous of
    degree source_degrees[j] - target_degrees[i].
    """

    ring: RingDescriptor
    entries: List[List[CoeffPoly]]
    source_degrees: Tuple[int, ...]
    target_degrees: Tuple[int, ...]
    source_basis: Optional[List[InverseMonomial]] = None
    target_basis: Optional[List[InverseMonomial]] = None

    def __post_init__(self):
        if len(self.entries) != len(self.target_degrees):
            raise UsageError("row count does not match target degrees")
        for row in self.entries:
            if len(row) != len(self.source_degrees):
                raise UsageError("column count does not match source degrees")
        for i, row in enumerate(self.entries):
            for j, c in enumerate(row):
                if c.is_zero():
                    continue
                if not c.is_homogeneous() or c.degree() != self.source_degrees[j] - self.target_degrees[i]:
                    raise UsageError(f"entry ({i}, {j}) = {c} has the wrong degree")

    @classmethod
    def from_matrix(cls, ring: RingDescriptor, entries: List[List[CoeffPoly]]) -> "GradedMap":
        """
        Grade a matrix with homogeneous entries, targets in degree 0 where possible

        Raises:
            UsageError: the entries admit no consistent grading
        """
        rows = len(entries)
        cols = len(entries[0]) if rows else 0
        target: List[Optional[int]] = [None] * rows
        source: List[Optional[int]] = [None] * cols
        # connected components of the bipartite support graph each get one anchor
        for start in range(rows):
            if target[start] is not None:
                continue
            target[start] = 0
            stack = [("r", start)]
            while stack:
                kind, k = stack.pop()
                if kind == "r":
                    for j, c in enumerate(entries[k]):
                        if c.is_zero():
                            continue
                        if not c.is_homogeneous():
                            raise UsageError(f"entry {c} is not homogeneous")
                        deg = target[k] + c.degree()
                        if source[j] is None:
                            source[j] = deg
                            stack.append(("c", j))
                        elif source[j] != deg:
                            raise UsageError("matrix entries admit no consistent grading")
                else:
                    for i in range(rows):
                        c = entries[i][k]
                        if c.is_zero():
                            continue
                        deg = source[k] - c.degree()
                        if target[i] is None:
                            target[i] = deg
                            stack.append(("r", i))
                        elif target[i] != deg:
                            raise UsageError("matrix entries admit no consistent grading")
        source = [0 if s is None else s for s in source]
        shift = -min(target) if target else 0
        return cls(ring, entries, tuple(s + shift for s in source), tuple(t + shift for t in target))

    @property
    def rows(self) -> int:
        return len(self.target_degrees)

    @property
    def cols(self) -> int:
        return len(self.source_degrees)

    def column_image(self, j: int, t: Exponent) -> Dict[Tuple[int, Exponent], RawScalar]:
        """t * (column j) in the monomial basis (row, exponent) of the target"""
        f = self.ring.field
        out: Dict[Tuple[int, Exponent], RawScalar] = {}
        for i in range(self.rows):
            for e, c in self.entries[i][j].terms.items():
                key = (i, tuple(a + b for a, b in zip(t, e)))
                out[key] = f.add(out[key], c) if key in out else c
        return {k: v for k, v in out.items() if not f.is_zero(v)}

    def component(self, degree: int) -> "MapComponent":
        """Target monomials of one degree and the echelon image landing there"""
        ring = self.ring
        elements = [
            (i, e) for i, b in enumerate(self.target_degrees) for e in ring.degree_basis(degree - b)
        ]
        index = {el: k for k, el in enumerate(elements)}
        image = RowEchelon(ring.field)
        for j, a in enumerate(self.source_degrees):
            for t in ring.degree_basis(degree - a):
                image.add({index[k]: v for k, v in self.column_image(j, t).items()})
        return MapComponent(degree, elements, index, image)

    def coker_dim(self, degree: int) -> int:
        return self.component(degree).coker_dim

    def __str__(self) -> str:
        return "[" + "; ".join(", ".join(str(c) for c in row) for row in self.entries) + "]"


@dataclass
class MapComponent:
    degree: int
    elements: List[Tuple[int, Exponent]]
    index: Dict[Tuple[int, Exponent], int]
    image: RowEchelon

    @property
    def coker_dim(self) -> int:
        return len(self.elements) - self.image.rank


def mult_matrix(f: HypersurfaceF, ell: int) -> GradedMap:
    """
    Multiplication by f from the piece at ell + p to the piece at ell

    Degrees are combined degrees: target row alpha sits in -w.alpha and
    source column beta in D_f - w.beta, so the map has degree 0.
    """
    if ell < 0:
        raise UsageError(f"ell must be >= 0, got {ell}")
    f = homogenize(f)
    ring = f.ring
    w = ring.weights()
    shift = f.degree_shift()
    target = inverse_basis(f.n, ell, w)
    source = inverse_basis(f.n, ell + f.p, w)
    row_of = {b: i for i, b in enumerate(target)}
    entries = [[ring.zero() for _ in source] for _ in target]
    for j, b in enumerate(source):
        for a, c in mult_action(f, b).items():
            entries[row_of[a]][j] = c
    return GradedMap(
        ring,
        entries,
        tuple(shift - b.weighted_deg for b in source),
        tuple(-a.weighted_deg for a in target),
        source_basis=source,
        target_basis=target,
    )


# Cokernel components


def _integer_rows(vectors: List[List[Fraction]]) -> Tuple[Tuple[int, ...], ...]:
    out = []
    for v in vectors:
        denom = reduce(lcm, (Fraction(a).denominator for a in v), 1)
        row = [int(Fraction(a) * denom) for a in v]
        g = reduce(gcd, row, 0) or 1
        out.append(tuple(a // g for a in row))
    return tuple(out)


def grading_functionals(f: HypersurfaceF) -> Tuple[Tuple[int, ...], ...]:
    """
    Integer functionals on Z^(m+n) constant on all monomials of f

    An element t * x^-alpha has multidegree (exp t, -alpha); multiplying by
    f adds one of f's monomial multidegrees, so these functionals grade the
    whole presentation.
    """
    vecs = [list(e) + list(g) for c, g in f.terms for e in c.terms]
    base = vecs[0]
    diffs = [[a - b for a, b in zip(v, base)] for v in vecs[1:]]
    M = ScalarMatrix.from_dense(RationalField(), diffs, len(base))
    return _integer_rows(kernel_basis(M))


@dataclass
class Block:
    """One fine-graded block of a cokernel component"""

    elements: List[Element]
    index: Dict[Element, int]
    image: RowEchelon

    @property
    def coker_dim(self) -> int:
        return len(self.elements) - self.image.rank


class CokerComponent:
    """The (ell, d) component of coker(mult_matrix), split into blocks"""

    __slots__ = ("ell", "degree", "blocks")

    def __init__(self, ell: int, degree: int, blocks: Dict[Tuple[int, ...], Block]):
        self.ell = ell
        self.degree = degree
        self.blocks = blocks

    @property
    def target_dim(self) -> int:
        return sum(len(b.elements) for b in self.blocks.values())

    @property
    def dim(self) -> int:
        return sum(b.coker_dim for b in self.blocks.values())

    def coset_basis(self) -> List[Tuple[Tuple[int, ...], int]]:
        """(block key, local index) of non-pivot elements, which form a basis of the cokernel"""
        out = []
        for key, block in self.blocks.items():
            pivots = block.image.rows
            out.extend((key, k) for k in range(len(block.elements)) if k not in pivots)
        return out


class CokernelPieces:
    """
    Lazily built components of H^n_I(R/fR), cached per (ell, d)

    Args:
        f: hypersurface; weights are searched when the ring has none
        weight_bound: bound for the weight search
    """

    def __init__(self, f: HypersurfaceF, weight_bound: int = DEFAULT_WEIGHT_BOUND):
        self.f = homogenize(f, weight_bound)
        self.ring = self.f.ring
        self.weights = self.ring.weights()
        self.shift = self.f.degree_shift()
        self.functionals = grading_functionals(self.f)
        self._components: Dict[Tuple[int, int], CokerComponent] = {}
        self._monomials = [(e, c, g) for c, g in self.f.terms for e, c in c.terms.items()]

    @property
    def n(self) -> int:
        return self.ring.n

    @property
    def p(self) -> int:
        return self.f.p

    def top_weight(self, ell: int) -> int:
        """W(ell): largest weighted degree among the basis at ell"""
        if ell < self.n:
            return 0
        return sum(self.weights) + (ell - self.n) * max(self.weights)

    def degree_step(self) -> int:
        """Spacing of the degrees that can be nonempty at a fixed ell"""
        values = [sum(g) for g in self.ring.m_generators()]
        w = self.weights
        values += [abs(a - b) for a in w for b in w]
        return reduce(gcd, values, 0) or 1

    def degree_residue(self, ell: int) -> int:
        """Nonempty degrees at ell are congruent to this modulo degree_step"""
        basis = _compositions(self.n, ell)
        if not basis:
            return 0
        first = sum(a * b for a, b in zip(self.weights, basis[0]))
        return (self.top_weight(ell) - first) % self.degree_step()

    def key(self, alpha: Exponent, t: Exponent) -> Tuple[int, ...]:
        z = list(t) + [-a for a in alpha]
        return tuple(sum(a * b for a, b in zip(g, z)) for g in self.functionals)

    def elements(self, ell: int, combined: int) -> Iterator[Element]:
        """Basis elements t * x^-alpha at ell of the given combined degree"""
        for alpha in _compositions(self.n, ell):
            wa = sum(a * b for a, b in zip(self.weights, alpha))
            for t in self.ring.degree_basis(combined + wa):
                yield alpha, t

    def image(self, beta: Exponent, t: Exponent) -> Dict[Element, RawScalar]:
        """f * t * x^-beta in the monomial basis of the piece at ell(beta) - p"""
        fld = self.ring.field
        out: Dict[Element, RawScalar] = {}
        for e, c, g in self._monomials:
            alpha = tuple(a - b for a, b in zip(beta, g))
            if min(alpha) < 1:
                continue
            key = (alpha, tuple(a + b for a, b in zip(t, e)))
            out[key] = fld.add(out[key], c) if key in out else c
        return {k: v for k, v in out.items() if not fld.is_zero(v)}

    def component(self, ell: int, degree: int) -> CokerComponent:
        cached = self._components.get((ell, degree))
        if cached is not None:
            return cached
        combined = degree - self.top_weight(ell)
        blocks: Dict[Tuple[int, ...], Block] = {}
        for el in self.elements(ell, combined):
            k = self.key(*el)
            block = blocks.get(k)
            if block is None:
                block = blocks[k] = Block([], {}, RowEchelon(self.ring.field))
            block.index[el] = len(block.elements)
            block.elements.append(el)
        if blocks:
            for beta, t in self.elements(ell + self.p, combined - self.shift):
                vec = self.image(beta, t)
                if not vec:
                    continue
                first = next(iter(vec))
                block = blocks[self.key(*first)]
                block.image.add({block.index[el]: v for el, v in vec.items()})
        comp = CokerComponent(ell, degree, blocks)
        self._components[(ell, degree)] = comp
        return comp

    def release_below(self, ell: int) -> None:
        """Drop cached components whose x-degree is below ell"""
        for key in [k for k in self._components if k[0] < ell]:
            del self._components[key]

    def coker_dim(self, ell: int, degree: int) -> int:
        if ell < self.n or degree < 0:
            return 0
        return self.component(ell, degree).dim

    def locate(self, ell: int, degree: int, vec: Dict[Element, RawScalar]) -> Dict[Tuple[int, ...], SparseVector]:
        """Split a vector of (ell, degree) into per-block sparse vectors"""
        comp = self.component(ell, degree)
        out: Dict[Tuple[int, ...], SparseVector] = {}
        for el, v in vec.items():
            k = self.key(*el)
            out.setdefault(k, {})[comp.blocks[k].index[el]] = v
        return out

    def reduce(self, ell: int, degree: int, vec: Dict[Element, RawScalar]) -> Dict[Tuple[int, ...], SparseVector]:
        """Canonical remainders of a vector modulo the image, per block"""
        comp = self.component(ell, degree)
        out = {}
        for k, sub in self.locate(ell, degree, vec).items():
            r = comp.blocks[k].image.reduce(sub)
            if r:
                out[k] = r
        return out

    def x_degree(self, ell: int, degree: int, i: int) -> int:
        """Normalized degree of x_i * v for v at (ell, degree)"""
        c = degree - self.top_weight(ell)
        return c + self.weights[i] + self.top_weight(ell - 1)


@lru_cache(maxsize=8)
def pieces_for(f: HypersurfaceF, weight_bound: int = DEFAULT_WEIGHT_BOUND) -> CokernelPieces:
    """Shared cache of CokernelPieces per hypersurface"""
    return CokernelPieces(f, weight_bound)


def coker_component_dim(f: HypersurfaceF, ell: int, d: int) -> int:
    """
    dim_k of H^n_I(R/fR) at x-degree -ell and normalized degree d

    Raises:
        NotHomogenizableError: f admits no combined grading
    """
    if ell < f.n:
        return 0
    return pieces_for(f).coker_dim(ell, d)
