"""
Exact linear algebra over a ScalarField.

Matrices are stored as sparse rows (``{column: value}``). Elimination runs
on the sparse rows through ``RowEchelon``; for prime fields a dense numpy
path takes over when the matrix is dense enough to benefit. Both paths
produce the same reduced row echelon form, which is unique.
"""

from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence

import numpy as np

from topsocle.algebra.scalar_field import PrimeField, RawScalar, ScalarField
from topsocle.errors import UsageError

SparseVector = Dict[int, RawScalar]

DENSE_DENSITY = 0.10
DENSE_MIN_ENTRIES = 400
# p*p must stay inside int64 for the vectorized row updates
DENSE_MAX_PRIME = 2 ** 31


def axpy(field: ScalarField, target: SparseVector, c: RawScalar, row: SparseVector) -> None:
    """target -= c * row, in place, dropping zeros"""
    for k, a in row.items():
        if k in target:
            val = field.sub(target[k], field.mul(c, a))
            if field.is_zero(val):
                del target[k]
            else:
                target[k] = val
        else:
            val = field.neg(field.mul(c, a))
            if not field.is_zero(val):
                target[k] = val


class RowEchelon:
    """
    Incremental reduced row echelon basis of a subspace

    Rows are kept fully reduced: every pivot column is zero in all other
    rows and every pivot entry is 1, so ``reduce`` returns a canonical
    remainder supported on non-pivot columns.
    """

    __slots__ = ("field", "rows")

    def __init__(self, field: ScalarField):
        self.field = field
        self.rows: Dict[int, SparseVector] = {}

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def pivots(self) -> List[int]:
        return sorted(self.rows)

    def reduce(self, vec: SparseVector) -> SparseVector:
        v = dict(vec)
        for p in [k for k in v if k in self.rows]:
            c = v.get(p)
            if c is not None:
                axpy(self.field, v, c, self.rows[p])
        return v

    def contains(self, vec: SparseVector) -> bool:
        return not self.reduce(vec)

    def add(self, vec: SparseVector) -> bool:
        """Insert a vector; True if it enlarged the span"""
        r = self.reduce(vec)
        if not r:
            return False
        f = self.field
        pivot = min(r)
        inv = f.inv(r[pivot])
        r = {k: f.mul(a, inv) for k, a in r.items()}
        for row in self.rows.values():
            c = row.get(pivot)
            if c is not None:
                axpy(f, row, c, r)
        self.rows[pivot] = r
        return True

    def extend(self, vectors: Iterable[SparseVector]) -> int:
        return sum(1 for v in vectors if self.add(v))

    def basis(self) -> List[SparseVector]:
        return [self.rows[p] for p in sorted(self.rows)]


class ScalarMatrix:
    """rows x cols matrix over a field, stored as sparse rows"""

    __slots__ = ("field", "rows", "cols", "entries")

    def __init__(self, field: ScalarField, rows: int, cols: int, entries: Optional[List[SparseVector]] = None):
        self.field = field
        self.rows = rows
        self.cols = cols
        if entries is None:
            entries = [{} for _ in range(rows)]
        if len(entries) != rows:
            raise UsageError(f"expected {rows} rows, got {len(entries)}")
        for row in entries:
            if row and (min(row) < 0 or max(row) >= cols):
                raise UsageError("entry outside matrix bounds")
        self.entries = [{k: a for k, a in row.items() if not field.is_zero(a)} for row in entries]

    @classmethod
    def from_dense(cls, field: ScalarField, data: Sequence[Sequence], cols: Optional[int] = None) -> "ScalarMatrix":
        rows = len(data)
        if cols is None:
            cols = len(data[0]) if rows else 0
        entries = []
        for row in data:
            if len(row) != cols:
                raise UsageError("ragged matrix data")
            entries.append({j: _coerce(field, a) for j, a in enumerate(row)})
        return cls(field, rows, cols, entries)

    @classmethod
    def from_columns(cls, field: ScalarField, columns: Sequence[SparseVector], rows: int) -> "ScalarMatrix":
        entries: List[SparseVector] = [{} for _ in range(rows)]
        for j, col in enumerate(columns):
            for i, a in col.items():
                entries[i][j] = a
        return cls(field, rows, len(columns), entries)

    @classmethod
    def identity(cls, field: ScalarField, size: int) -> "ScalarMatrix":
        return cls(field, size, size, [{i: field.one} for i in range(size)])

    def get(self, i: int, j: int) -> RawScalar:
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise UsageError(f"index ({i}, {j}) outside a {self.rows}x{self.cols} matrix")
        return self.entries[i].get(j, self.field.zero)

    def nnz(self) -> int:
        return sum(len(r) for r in self.entries)

    def density(self) -> float:
        size = self.rows * self.cols
        return self.nnz() / size if size else 0.0

    def to_dense(self) -> List[List[RawScalar]]:
        z = self.field.zero
        return [[row.get(j, z) for j in range(self.cols)] for row in self.entries]

    def transpose(self) -> "ScalarMatrix":
        entries: List[SparseVector] = [{} for _ in range(self.cols)]
        for i, row in enumerate(self.entries):
            for j, a in row.items():
                entries[j][i] = a
        return ScalarMatrix(self.field, self.cols, self.rows, entries)

    def column(self, j: int) -> SparseVector:
        return {i: row[j] for i, row in enumerate(self.entries) if j in row}

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScalarMatrix):
            return NotImplemented
        return (self.field, self.rows, self.cols, self.entries) == (other.field, other.rows, other.cols, other.entries)

    def __repr__(self) -> str:
        return f"ScalarMatrix({self.rows}x{self.cols} over {self.field}, nnz={self.nnz()})"


class RrefResult(NamedTuple):
    matrix: ScalarMatrix
    pivots: List[int]
    rank: int


class SpanResult(NamedTuple):
    member: bool
    witness: Optional[List[RawScalar]]

    def __bool__(self) -> bool:
        return self.member


def _coerce(field: ScalarField, a) -> RawScalar:
    if isinstance(a, int):
        return field.from_int(a)
    return field.from_fraction(a)


def _use_dense(M: ScalarMatrix) -> bool:
    return (
        isinstance(M.field, PrimeField)
        and M.field.p < DENSE_MAX_PRIME
        and M.rows * M.cols >= DENSE_MIN_ENTRIES
        and M.density() >= DENSE_DENSITY
    )


def _rref_dense(M: ScalarMatrix) -> RrefResult:
    p = M.field.p
    A = np.array(M.to_dense(), dtype=np.int64).reshape(M.rows, M.cols) % p
    pivots: List[int] = []
    r = 0
    for c in range(M.cols):
        if r == M.rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        A[r] = A[r] * pow(int(A[r, c]), -1, p) % p
        col = A[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            A[hit] = (A[hit] - np.outer(col[hit], A[r])) % p
        pivots.append(c)
        r += 1
    entries = [{j: int(a) for j, a in enumerate(row) if a} for row in A.tolist()]
    return RrefResult(ScalarMatrix(M.field, M.rows, M.cols, entries), pivots, len(pivots))


def _rref_sparse(M: ScalarMatrix) -> RrefResult:
    ech = RowEchelon(M.field)
    ech.extend(M.entries)
    pivots = ech.pivots
    entries = [dict(ech.rows[p]) for p in pivots] + [{} for _ in range(M.rows - len(pivots))]
    return RrefResult(ScalarMatrix(M.field, M.rows, M.cols, entries), pivots, len(pivots))


def rref(M: ScalarMatrix) -> RrefResult:
    """
    Reduced row echelon form

    Args:
        M: matrix over a field

    Returns:
        RrefResult: (reduced matrix, pivot columns, rank)
    """
    return _rref_dense(M) if _use_dense(M) else _rref_sparse(M)


def rank(M: ScalarMatrix) -> int:
    return rref(M).rank


def kernel_basis(M: ScalarMatrix) -> List[List[RawScalar]]:
    """Basis of the right null space, one vector per non-pivot column"""
    f = M.field
    R, pivots, _ = rref(M)
    pivot_set = set(pivots)
    basis = []
    for free in range(M.cols):
        if free in pivot_set:
            continue
        v = [f.zero] * M.cols
        v[free] = f.one
        for i, p in enumerate(pivots):
            a = R.entries[i].get(free)
            if a is not None:
                v[p] = f.neg(a)
        basis.append(v)
    return basis


def in_span(v: Sequence[RawScalar], M: ScalarMatrix) -> SpanResult:
    """
    Decide whether v lies in the column span of M

    Returns:
        SpanResult: membership flag and, when true, coefficients x with M x = v
    """
    if len(v) != M.rows:
        raise UsageError(f"vector of length {len(v)} against a matrix with {M.rows} rows")
    f = M.field
    entries = [dict(row) for row in M.entries]
    for i, a in enumerate(v):
        a = _coerce(f, a)
        if not f.is_zero(a):
            entries[i][M.cols] = a
    R, pivots, _ = rref(ScalarMatrix(f, M.rows, M.cols + 1, entries))
    if pivots and pivots[-1] == M.cols:
        return SpanResult(False, None)
    witness = [f.zero] * M.cols
    for i, p in enumerate(pivots):
        witness[p] = R.entries[i].get(M.cols, f.zero)
    return SpanResult(True, witness)


def span_intersection(field: ScalarField, U: Sequence[SparseVector], V: Sequence[SparseVector], dim: int) -> List[SparseVector]:
    """Echelon basis of span(U) ∩ span(V) inside field^dim"""
    if not U or not V:
        return []
    columns = list(U) + [{i: field.neg(a) for i, a in vec.items()} for vec in V]
    M = ScalarMatrix.from_columns(field, columns, dim)
    ech = RowEchelon(field)
    for k in kernel_basis(M):
        w: SparseVector = {}
        for j, c in enumerate(k[: len(U)]):
            if not field.is_zero(c):
                axpy(field, w, field.neg(c), U[j])
        ech.add(w)
    return ech.basis()
