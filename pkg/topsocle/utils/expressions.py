"""
Expression grammar for hypersurfaces, coefficients, semigroup generators
and small matrices.

Input is checked token by token first so errors can name a position and a
token; the algebra itself is handed to sympy.
"""

import re
from fractions import Fraction
from tokenize import TokenError
from typing import Dict, Iterator, List, Sequence, Tuple

import sympy
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations
from sympy.polys.polyerrors import GeneratorsNeeded, PolynomialError

from topsocle.algebra.coeff_ring import CoeffPoly, Exponent, RingDescriptor
from topsocle.errors import ExpressionError

TOKEN_RE = re.compile(r"(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()])|(\s+)")

TRANSFORMATIONS = standard_transformations + (convert_xor,)


def tokenize(text: str) -> Iterator[Tuple[int, str, str]]:
    """Yield (position, kind, token); kind is one of number, name, op"""
    pos = 0
    while pos < len(text):
        match = TOKEN_RE.match(text, pos)
        if match is None:
            raise ExpressionError("unexpected character", pos, text[pos])
        if match.group(1):
            yield pos, "number", match.group(1)
        elif match.group(2):
            yield pos, "name", match.group(2)
        elif match.group(3):
            yield pos, "op", match.group(3)
        pos = match.end()


def parse_polynomial(text: str, variables: Sequence[str]) -> Dict[Exponent, Fraction]:
    """
    Parse a polynomial with rational coefficients

    Args:
        text: expression such as ``u^4*x^2 + v^8*y*z``
        variables: declared variable names, in exponent-vector order

    Returns:
        Dict: exponent vector -> nonzero rational coefficient

    Raises:
        ExpressionError: unknown names, bad characters, syntax errors, or
            non-polynomial input (negative powers, division by a variable)
    """
    if not text or not text.strip():
        raise ExpressionError("empty expression")
    declared = set(variables)
    for pos, kind, token in tokenize(text):
        if kind == "name" and token not in declared:
            raise ExpressionError("unknown variable", pos, token)

    symbols = [sympy.Symbol(name) for name in variables]
    local = {name: sym for name, sym in zip(variables, symbols)}
    try:
        expr = parse_expr(text, local_dict=local, transformations=TRANSFORMATIONS, evaluate=True)
    except SyntaxError as e:
        offset = (e.offset or 1) - 1
        token = text[offset] if 0 <= offset < len(text) else ""
        raise ExpressionError("syntax error", offset, token) from e
    except (TokenError, sympy.SympifyError) as e:
        raise ExpressionError(f"cannot parse {text!r}") from e

    try:
        poly = sympy.Poly(sympy.expand(expr), *symbols)
    except (PolynomialError, GeneratorsNeeded) as e:
        raise ExpressionError(f"{text!r} is not a polynomial in {', '.join(variables)}") from e
    if poly.domain not in (sympy.ZZ, sympy.QQ):
        raise ExpressionError(f"{text!r} has non-rational coefficients")

    out: Dict[Exponent, Fraction] = {}
    for monom, coeff in poly.terms():
        c = sympy.Rational(coeff)
        if c != 0:
            out[tuple(int(a) for a in monom)] = Fraction(int(c.p), int(c.q))
    return out


def to_coeff_poly(ring: RingDescriptor, terms: Dict[Exponent, Fraction]) -> CoeffPoly:
    f = ring.field
    return CoeffPoly.from_terms(ring, {e: f.from_fraction(c) for e, c in terms.items()})


def parse_coefficient(ring: RingDescriptor, text: str) -> CoeffPoly:
    """Parse an element of T over the ring's u-variables"""
    return to_coeff_poly(ring, parse_polynomial(text, ring.u_var_names))


def split_by_x_exponent(ring: RingDescriptor, text: str) -> Dict[Exponent, CoeffPoly]:
    """
    Parse f over all variables and group it as x-exponent -> coefficient in T
    """
    names = list(ring.u_var_names) + list(ring.x_var_names)
    raw = parse_polynomial(text, names)
    grouped: Dict[Exponent, Dict[Exponent, Fraction]] = {}
    for e, c in raw.items():
        u_part, x_part = e[: ring.m], e[ring.m:]
        grouped.setdefault(x_part, {})[u_part] = c
    out = {}
    for x_part, terms in grouped.items():
        coeff = to_coeff_poly(ring, terms)
        if not coeff.is_zero():
            out[x_part] = coeff
    return out


def parse_generators(u_vars: Sequence[str], generators: Sequence[str]) -> List[Exponent]:
    """Parse semigroup generators written as monomials, e.g. ``u^3*v``"""
    out = []
    for text in generators:
        terms = parse_polynomial(text, u_vars)
        if len(terms) != 1 or next(iter(terms.values())) != 1:
            raise ExpressionError(f"generator {text!r} must be a single monic monomial")
        out.append(next(iter(terms)))
    return out


def parse_matrix(ring: RingDescriptor, text: str) -> List[List[CoeffPoly]]:
    """Parse ``"u,v,0;0,u,v"`` into rows of coefficients"""
    rows = []
    for row_text in text.split(";"):
        rows.append([parse_coefficient(ring, cell) for cell in row_text.split(",")])
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ExpressionError(f"ragged matrix {text!r}")
    return rows
