"""
Exact scalar arithmetic.

Two backends share one small interface: ``PrimeField(p)`` whose raw values
are ints in ``[0, p)`` and ``RationalField()`` whose raw values are reduced
``Fraction`` objects. The linear algebra works on raw values through the
field object; ``FieldScalar`` is the checked value type for callers that
want operator syntax.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from sympy import isprime

from topsocle.errors import ConfigurationError, FieldDivisionError

DEFAULT_CHARACTERISTIC = 32003

RawScalar = Union[int, Fraction]


@dataclass(frozen=True)
class PrimeField:
    """The prime field F_p"""

    p: int

    def __post_init__(self):
        if not isprime(self.p):
            raise ConfigurationError(f"characteristic {self.p} is not prime")

    @property
    def characteristic(self) -> int:
        return self.p

    zero = 0
    one = 1

    def from_int(self, a: int) -> int:
        return a % self.p

    def from_fraction(self, a: Fraction) -> int:
        a = Fraction(a)
        if a.denominator % self.p == 0:
            raise FieldDivisionError(f"denominator of {a} vanishes mod {self.p}")
        return a.numerator * pow(a.denominator, -1, self.p) % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def neg(self, a: int) -> int:
        return -a % self.p

    def mul(self, a: int, b: int) -> int:
        return a * b % self.p

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise FieldDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def is_zero(self, a: int) -> bool:
        return a == 0

    def render(self, a: int) -> str:
        # symmetric representative reads better in printed polynomials
        return str(a - self.p) if a > self.p // 2 else str(a)

    def __str__(self) -> str:
        return f"F_{self.p}"


@dataclass(frozen=True)
class RationalField:
    """The rational numbers, used for small cross-checks"""

    @property
    def characteristic(self) -> int:
        return 0

    zero = Fraction(0)
    one = Fraction(1)

    def from_int(self, a: int) -> Fraction:
        return Fraction(a)

    def from_fraction(self, a: Fraction) -> Fraction:
        return Fraction(a)

    def add(self, a: Fraction, b: Fraction) -> Fraction:
        return a + b

    def sub(self, a: Fraction, b: Fraction) -> Fraction:
        return a - b

    def neg(self, a: Fraction) -> Fraction:
        return -a

    def mul(self, a: Fraction, b: Fraction) -> Fraction:
        return a * b

    def inv(self, a: Fraction) -> Fraction:
        if a == 0:
            raise FieldDivisionError("inverse of zero")
        return 1 / Fraction(a)

    def is_zero(self, a: Fraction) -> bool:
        return a == 0

    def render(self, a: Fraction) -> str:
        return str(a)

    def __str__(self) -> str:
        return "QQ"


ScalarField = Union[PrimeField, RationalField]


def field_for_characteristic(characteristic: int = DEFAULT_CHARACTERISTIC) -> ScalarField:
    """
    Build the scalar field for a configured characteristic

    Args:
        characteristic: a prime, or 0 for the rationals

    Returns:
        ScalarField: the matching backend

    Raises:
        ConfigurationError: if the characteristic is neither 0 nor prime
    """
    if characteristic == 0:
        return RationalField()
    if characteristic < 0:
        raise ConfigurationError(f"characteristic must be nonnegative, got {characteristic}")
    return PrimeField(characteristic)


@dataclass(frozen=True)
class FieldScalar:
    """A field element with its backend attached; always canonical"""

    field: ScalarField
    value: RawScalar

    @classmethod
    def of(cls, field: ScalarField, value) -> "FieldScalar":
        if isinstance(value, Fraction):
            return cls(field, field.from_fraction(value))
        return cls(field, field.from_int(value))

    def _check(self, other: "FieldScalar") -> None:
        if not isinstance(other, FieldScalar) or other.field != self.field:
            raise ConfigurationError(
                f"mixed scalar backends: {self.field} and {getattr(other, 'field', type(other).__name__)}"
            )

    def __add__(self, other: "FieldScalar") -> "FieldScalar":
        self._check(other)
        return FieldScalar(self.field, self.field.add(self.value, other.value))

    def __sub__(self, other: "FieldScalar") -> "FieldScalar":
        self._check(other)
        return FieldScalar(self.field, self.field.sub(self.value, other.value))

    def __mul__(self, other: "FieldScalar") -> "FieldScalar":
        self._check(other)
        return FieldScalar(self.field, self.field.mul(self.value, other.value))

    def __neg__(self) -> "FieldScalar":
        return FieldScalar(self.field, self.field.neg(self.value))

    def __truediv__(self, other: "FieldScalar") -> "FieldScalar":
        self._check(other)
        return self * other.inverse()

    def inverse(self) -> "FieldScalar":
        return FieldScalar(self.field, self.field.inv(self.value))

    def is_zero(self) -> bool:
        return self.field.is_zero(self.value)

    def reduce_mod(self, p: int) -> "FieldScalar":
        """Map a rational scalar into F_p"""
        target = PrimeField(p)
        return FieldScalar(target, target.from_fraction(Fraction(self.value)))

    def __str__(self) -> str:
        return self.field.render(self.value)


def add(a: FieldScalar, b: FieldScalar) -> FieldScalar:
    """Canonical sum of two scalars of the same backend"""
    return a + b


def mul_inv(a: FieldScalar) -> FieldScalar:
    """Multiplicative inverse; raises FieldDivisionError on zero"""
    return a.inverse()
