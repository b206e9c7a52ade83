"""
The coefficient ring T.

Two backends: the full polynomial ring k[u_1..u_m] and the monomial
subalgebra of k[u_1..u_m] spanned by a finitely generated semigroup of
exponent vectors. Every u-variable has internal degree 1, so the degree
of a monomial is the sum of its exponents in both backends.
"""

from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

from topsocle.algebra.scalar_field import RawScalar, ScalarField, field_for_characteristic
from topsocle.errors import ConfigurationError, UsageError

Exponent = Tuple[int, ...]


class Backend(str, Enum):
    POLY = "poly"
    SEMIGROUP = "semigroup"


def exponents_of_degree(m: int, d: int) -> Iterator[Exponent]:
    """All exponent vectors of length m and total degree d, descending lex"""
    if m == 1:
        yield (d,)
        return
    for first in range(d, -1, -1):
        for rest in exponents_of_degree(m - 1, d - first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _semigroup_contains(generators: Tuple[Exponent, ...], e: Exponent) -> bool:
    if not any(e):
        return True
    for g in generators:
        rest = tuple(a - b for a, b in zip(e, g))
        if min(rest) >= 0 and _semigroup_contains(generators, rest):
            return True
    return False


@dataclass(frozen=True)
class RingDescriptor:
    """
    Immutable description of T and of the x-variable block of R = T[x]

    x_weights may be left unset; the weight search in top_lc fills it in
    for a given hypersurface.
    """

    field: ScalarField
    backend: Backend
    u_var_names: Tuple[str, ...]
    x_var_names: Tuple[str, ...]
    semigroup_generators: Tuple[Exponent, ...] = ()
    x_weights: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if len(self.u_var_names) < 1:
            raise ConfigurationError("at least one u-variable is required")
        if len(self.x_var_names) < 1:
            raise ConfigurationError("at least one x-variable is required")
        names = list(self.u_var_names) + list(self.x_var_names)
        if len(set(names)) != len(names):
            raise ConfigurationError(f"variable names must be distinct: {names}")
        if self.backend == Backend.SEMIGROUP:
            gens = self.semigroup_generators
            if not gens:
                raise ConfigurationError("semigroup backend needs at least one generator")
            if len(set(gens)) != len(gens):
                raise ConfigurationError("semigroup generators must be pairwise distinct")
            for g in gens:
                if len(g) != self.m or min(g) < 0 or not any(g):
                    raise ConfigurationError(f"invalid semigroup generator {g}")
        elif self.semigroup_generators:
            raise ConfigurationError("semigroup generators given for the polynomial backend")
        if self.x_weights is not None:
            if len(self.x_weights) != self.n:
                raise ConfigurationError(
                    f"x_weights has length {len(self.x_weights)}, expected {self.n}"
                )
            if min(self.x_weights) < 1:
                raise ConfigurationError("x_weights must be positive integers")

    @property
    def characteristic(self) -> int:
        return self.field.characteristic

    @property
    def m(self) -> int:
        return len(self.u_var_names)

    @property
    def n(self) -> int:
        return len(self.x_var_names)

    def with_weights(self, weights: Iterable[int]) -> "RingDescriptor":
        return replace(self, x_weights=tuple(weights))

    def with_field(self, new_field: ScalarField) -> "RingDescriptor":
        return replace(self, field=new_field)

    def weights(self) -> Tuple[int, ...]:
        return self.x_weights if self.x_weights is not None else (1,) * self.n

    def contains(self, e: Exponent) -> bool:
        if len(e) != self.m or min(e) < 0:
            return False
        if self.backend == Backend.POLY:
            return True
        return _semigroup_contains(self.semigroup_generators, tuple(e))

    def m_generators(self) -> Tuple[Exponent, ...]:
        """Monomial generators of the homogeneous maximal ideal of T"""
        if self.backend == Backend.POLY:
            return tuple(tuple(int(i == j) for i in range(self.m)) for j in range(self.m))
        return self.semigroup_generators

    def dim(self) -> int:
        """Krull dimension of T"""
        if self.backend == Backend.POLY:
            return self.m
        # local import: graded_linalg depends on this module's types
        from topsocle.algebra.graded_linalg import ScalarMatrix, rank
        from topsocle.algebra.scalar_field import RationalField

        return rank(ScalarMatrix.from_dense(RationalField(), [list(g) for g in self.semigroup_generators]))

    def degree_basis(self, d: int) -> Tuple[Exponent, ...]:
        return _degree_basis(self, d)

    def monomial(self, exponents: Iterable[int]) -> "CoeffMonomial":
        e = tuple(exponents)
        if not self.contains(e):
            raise UsageError(f"monomial {render_monomial(self, e)} does not lie in T")
        return CoeffMonomial(e)

    def zero(self) -> "CoeffPoly":
        return CoeffPoly(self, {})

    def one(self) -> "CoeffPoly":
        return CoeffPoly(self, {(0,) * self.m: self.field.one})

    def constant(self, c: RawScalar) -> "CoeffPoly":
        return CoeffPoly(self, {(0,) * self.m: c})

    def term(self, exponents: Iterable[int], c: Optional[RawScalar] = None) -> "CoeffPoly":
        e = tuple(self.monomial(exponents).exponents)
        return CoeffPoly(self, {e: self.field.one if c is None else c})

    def variable(self, name: str) -> "CoeffPoly":
        j = self.u_var_names.index(name)
        return self.term(tuple(int(i == j) for i in range(self.m)))

    def describe(self) -> str:
        us = ",".join(self.u_var_names)
        xs = ",".join(self.x_var_names)
        if self.backend == Backend.POLY:
            base = f"k[{us}]"
        else:
            base = "k[" + ",".join(render_monomial(self, g) for g in self.semigroup_generators) + "]"
        return f"{base}[{xs}] over {self.field}"


@lru_cache(maxsize=4096)
def _degree_basis(ring: RingDescriptor, d: int) -> Tuple[Exponent, ...]:
    if d < 0:
        return ()
    return tuple(e for e in exponents_of_degree(ring.m, d) if ring.contains(e))


def make_ring(
    backend: str = "poly",
    u_vars: Iterable[str] = ("u", "v"),
    x_vars: Iterable[str] = ("x", "y"),
    generators: Iterable[Exponent] = (),
    weights: Optional[Iterable[int]] = None,
    characteristic: int = 32003,
) -> RingDescriptor:
    """Convenience constructor used by presets, the CLI and tests"""
    return RingDescriptor(
        field=field_for_characteristic(characteristic),
        backend=Backend(backend),
        u_var_names=tuple(u_vars),
        x_var_names=tuple(x_vars),
        semigroup_generators=tuple(tuple(g) for g in generators),
        x_weights=tuple(weights) if weights is not None else None,
    )


@dataclass(frozen=True, order=True)
class CoeffMonomial:
    exponents: Exponent

    @property
    def degree(self) -> int:
        return sum(self.exponents)


def render_monomial(ring: RingDescriptor, e: Exponent, names: Optional[Tuple[str, ...]] = None) -> str:
    names = names or ring.u_var_names
    parts = []
    for name, a in zip(names, e):
        if a == 1:
            parts.append(name)
        elif a > 1:
            parts.append(f"{name}^{a}")
    return "*".join(parts) if parts else "1"


class CoeffPoly:
    """
    Element of T as a sparse map exponent vector -> raw field value

    Terms are kept without zeros and in descending lex order, so equal
    polynomials print and serialize identically.
    """

    __slots__ = ("ring", "terms")

    def __init__(self, ring: RingDescriptor, terms: Dict[Exponent, RawScalar]):
        f = ring.field
        clean = {e: c for e, c in terms.items() if not f.is_zero(c)}
        self.ring = ring
        self.terms: Dict[Exponent, RawScalar] = dict(sorted(clean.items(), reverse=True))

    @classmethod
    def from_terms(cls, ring: RingDescriptor, terms: Dict[Exponent, RawScalar]) -> "CoeffPoly":
        """Build with a membership check of every monomial"""
        for e in terms:
            ring.monomial(e)
        return cls(ring, terms)

    def _check(self, other: "CoeffPoly") -> None:
        if self.ring.field != other.ring.field or self.ring.m != other.ring.m:
            raise ConfigurationError("polynomials from different coefficient rings")

    def is_zero(self) -> bool:
        return not self.terms

    def monomials(self) -> List[CoeffMonomial]:
        return [CoeffMonomial(e) for e in self.terms]

    def degrees(self) -> List[int]:
        return sorted({sum(e) for e in self.terms})

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def degree(self) -> int:
        """Degree of a nonzero homogeneous element"""
        if self.is_zero():
            raise UsageError("the zero polynomial has no degree")
        return max(self.degrees())

    def constant_term(self) -> RawScalar:
        return self.terms.get((0,) * self.ring.m, self.ring.field.zero)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def leading(self) -> Tuple[Exponent, RawScalar]:
        return next(iter(self.terms.items()))

    def monic(self) -> "CoeffPoly":
        if self.is_zero():
            return self
        lead = self.leading()[1]
        return self.scale(self.ring.field.inv(lead))

    def scale(self, c: RawScalar) -> "CoeffPoly":
        f = self.ring.field
        return CoeffPoly(self.ring, {e: f.mul(a, c) for e, a in self.terms.items()})

    def __add__(self, other: "CoeffPoly") -> "CoeffPoly":
        self._check(other)
        f = self.ring.field
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = f.add(out[e], c) if e in out else c
        return CoeffPoly(self.ring, out)

    def __neg__(self) -> "CoeffPoly":
        f = self.ring.field
        return CoeffPoly(self.ring, {e: f.neg(c) for e, c in self.terms.items()})

    def __sub__(self, other: "CoeffPoly") -> "CoeffPoly":
        return self + (-other)

    def __mul__(self, other: "CoeffPoly") -> "CoeffPoly":
        return poly_mul(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoeffPoly):
            return NotImplemented
        return self.ring.field == other.ring.field and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(tuple(self.terms.items()))

    def __repr__(self) -> str:
        return f"CoeffPoly({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        f = self.ring.field
        out = []
        for i, (e, c) in enumerate(self.terms.items()):
            coeff = f.render(c)
            negative = coeff.startswith("-")
            if negative:
                coeff = coeff[1:]
            mono = render_monomial(self.ring, e)
            if mono == "1":
                body = coeff
            elif coeff == "1":
                body = mono
            else:
                body = f"{coeff}*{mono}"
            if i == 0:
                out.append(f"-{body}" if negative else body)
            else:
                out.append(f" - {body}" if negative else f" + {body}")
        return "".join(out)


def t_degree_basis(ring: RingDescriptor, d: int) -> List[CoeffMonomial]:
    """
    Monomials of T of internal degree d in canonical (descending lex) order

    Args:
        ring: the coefficient ring
        d: nonnegative degree

    Returns:
        List[CoeffMonomial]: complete, duplicate-free basis of T_d
    """
    if d < 0:
        raise UsageError(f"degree must be nonnegative, got {d}")
    return [CoeffMonomial(e) for e in ring.degree_basis(d)]


def semigroup_member(ring: RingDescriptor, e: Iterable[int]) -> bool:
    """True iff e is a nonnegative integer combination of the semigroup generators"""
    if ring.backend != Backend.SEMIGROUP:
        raise UsageError("semigroup_member needs the semigroup backend")
    return ring.contains(tuple(e))


def poly_mul(a: CoeffPoly, b: CoeffPoly) -> CoeffPoly:
    """Product of two elements of T"""
    a._check(b)
    f = a.ring.field
    out: Dict[Exponent, RawScalar] = {}
    for ea, ca in a.terms.items():
        for eb, cb in b.terms.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            c = f.mul(ca, cb)
            out[e] = f.add(out[e], c) if e in out else c
    return CoeffPoly(a.ring, out)