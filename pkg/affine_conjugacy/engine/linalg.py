"""Exact dense linear algebra over Q and Q(i).

Matrices are immutable, row-major, and carry their ground field. Rank
and determinant use fraction-free (Bareiss) elimination; ``solve`` and
the kernel/image helpers use Gauss-Jordan reduction.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import numpy as np

from affine_conjugacy.engine.errors import (
    DimensionMismatchError,
    FieldMismatchError,
    NonSquareMatrixError,
    SingularMatrixError,
)
from affine_conjugacy.engine.exact_core import (
    ExactComplex,
    GroundField,
    Poly,
    Scalar,
    conj,
    format_scalar,
)

logger = logging.getLogger(__name__)

Vector = Tuple[Scalar, ...]


# -------------------------------
# Matrix
# -------------------------------
@dataclass(frozen=True)
class Matrix:
    rows: int
    cols: int
    entries: Tuple[Scalar, ...]
    field: GroundField = GroundField.Q

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise DimensionMismatchError(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, got {len(self.entries)}"
            )
        object.__setattr__(self, "entries", tuple(self.field.coerce(e) for e in self.entries))

    # ---- constructors ----
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], field: GroundField | str | None = None) -> "Matrix":
        rows = [list(r) for r in rows]
        n_cols = len(rows[0]) if rows else 0
        if any(len(r) != n_cols for r in rows):
            raise DimensionMismatchError("ragged matrix rows")
        flat = [GroundField.QI.coerce(e) for r in rows for e in r]
        f = GroundField.parse(field) if field is not None else GroundField.infer(flat)
        return cls(len(rows), n_cols, tuple(flat), f)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], n_rows: int, field: GroundField) -> "Matrix":
        cols = [list(c) for c in columns]
        if any(len(c) != n_rows for c in cols):
            raise DimensionMismatchError("column length differs from row count")
        return cls(n_rows, len(cols), tuple(cols[j][i] for i in range(n_rows) for j in range(len(cols))), field)

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None, field: GroundField = GroundField.Q) -> "Matrix":
        cols = rows if cols is None else cols
        return cls(rows, cols, (field.zero(),) * (rows * cols), field)

    @classmethod
    def identity(cls, n: int, field: GroundField = GroundField.Q) -> "Matrix":
        return cls(n, n, tuple(field.one() if i == j else field.zero() for i in range(n) for j in range(n)), field)

    @classmethod
    def diag(cls, values: Sequence, field: GroundField | None = None) -> "Matrix":
        vals = [GroundField.QI.coerce(v) for v in values]
        f = field or GroundField.infer(vals)
        n = len(vals)
        return cls(n, n, tuple(vals[i] if i == j else 0 for i in range(n) for j in range(n)), f)

    @classmethod
    def direct_sum(cls, *blocks: "Matrix", field: GroundField | None = None) -> "Matrix":
        f = field or GroundField.join(*(b.field for b in blocks))
        n = sum(b.rows for b in blocks)
        m = sum(b.cols for b in blocks)
        grid = [[f.zero()] * m for _ in range(n)]
        r0 = c0 = 0
        for b in blocks:
            for i in range(b.rows):
                for j in range(b.cols):
                    grid[r0 + i][c0 + j] = b[i, j]
            r0 += b.rows
            c0 += b.cols
        return cls(n, m, tuple(e for row in grid for e in row), f)

    # ---- access ----
    def __getitem__(self, ij: Tuple[int, int]) -> Scalar:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Vector:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> Vector:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> List[List[Scalar]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "Matrix":
        return Matrix(len(row_idx), len(col_idx), tuple(self[i, j] for i in row_idx for j in col_idx), self.field)

    def block(self, start: int, size: int) -> "Matrix":
        idx = range(start, start + size)
        return self.submatrix(idx, idx)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_zero(self) -> bool:
        return all(e == 0 for e in self.entries)

    def require_square(self, what: str = "matrix") -> None:
        if not self.is_square:
            raise NonSquareMatrixError(f"{what} must be square, got {self.rows}x{self.cols}")

    # ---- arithmetic ----
    def _check_shape(self, other: "Matrix") -> None:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatchError(f"shape {self.rows}x{self.cols} vs {other.rows}x{other.cols}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_shape(other)
        f = GroundField.join(self.field, other.field)
        return Matrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)), f)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_shape(other)
        f = GroundField.join(self.field, other.field)
        return Matrix(self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)), f)

    def __neg__(self) -> "Matrix":
        return Matrix(self.rows, self.cols, tuple(-e for e in self.entries), self.field)

    def scale(self, c) -> "Matrix":
        f = GroundField.join(self.field, GroundField.infer([GroundField.QI.coerce(c)]))
        c = f.coerce(c)
        return Matrix(self.rows, self.cols, tuple(c * e for e in self.entries), f)

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.cols != other.rows:
                raise DimensionMismatchError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
            f = GroundField.join(self.field, other.field)
            zero = f.zero()
            out = []
            for i in range(self.rows):
                r = self.row(i)
                for j in range(other.cols):
                    acc = zero
                    for k in range(self.cols):
                        a = r[k]
                        if a != 0:
                            acc = acc + a * other.entries[k * other.cols + j]
                    out.append(acc)
            return Matrix(self.rows, other.cols, tuple(out), f)
        return self.apply(other)

    def apply(self, v: Sequence) -> Vector:
        if len(v) != self.cols:
            raise DimensionMismatchError(f"vector of length {len(v)} for {self.rows}x{self.cols} matrix")
        out = []
        for i in range(self.rows):
            acc = self.field.zero()
            for a, x in zip(self.row(i), v):
                if a != 0:
                    acc = acc + a * x
            out.append(acc)
        return tuple(out)

    def transpose(self) -> "Matrix":
        return Matrix(self.cols, self.rows, tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)), self.field)

    def conjugate(self) -> "Matrix":
        return Matrix(self.rows, self.cols, tuple(conj(e) for e in self.entries), self.field)

    def power(self, k: int) -> "Matrix":
        self.require_square()
        result, base = Matrix.identity(self.rows, self.field), self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def inverse(self) -> "Matrix":
        self.require_square()
        n = self.rows
        grid, pivots = _rref(
            [list(self.row(i)) + [self.field.one() if i == j else self.field.zero() for j in range(n)] for i in range(n)],
            n,
        )
        if len(pivots) < n:
            raise SingularMatrixError("matrix is not invertible")
        return Matrix(n, n, tuple(grid[i][n + j] for i in range(n) for j in range(n)), self.field)

    def coerce(self, field: GroundField | str) -> "Matrix":
        return Matrix(self.rows, self.cols, self.entries, GroundField.parse(field))

    @cached_property
    def numeric(self) -> np.ndarray:
        dtype = float if self.field.is_real else complex
        data = [complex(e) if isinstance(e, ExactComplex) else float(e) for e in self.entries]
        return np.array(data, dtype=dtype).reshape(self.rows, self.cols)

    def to_strings(self) -> List[List[str]]:
        return [[format_scalar(e) for e in self.row(i)] for i in range(self.rows)]

    def __str__(self):
        return "[" + ", ".join("[" + ", ".join(r) + "]" for r in self.to_strings()) + "]"


# -------------------------------
# Elimination
# -------------------------------
def _bareiss(grid: List[List[Scalar]], n_cols: int) -> Tuple[int, int, Scalar]:
    """In-place fraction-free elimination; returns (rank, swap sign, last pivot)."""
    rows = len(grid)
    r, sign, prev = 0, 1, Fraction(1)
    for c in range(n_cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if grid[i][c] != 0), None)
        if p is None:
            continue
        if p != r:
            grid[r], grid[p] = grid[p], grid[r]
            sign = -sign
        piv = grid[r][c]
        for i in range(r + 1, rows):
            lead = grid[i][c]
            for j in range(c + 1, n_cols):
                grid[i][j] = (piv * grid[i][j] - lead * grid[r][j]) / prev
            grid[i][c] = piv * 0
        prev = piv
        r += 1
    return r, sign, prev


def _rref(grid: List[List[Scalar]], n_cols: int) -> Tuple[List[List[Scalar]], List[int]]:
    """Gauss-Jordan on the first ``n_cols`` columns (extra columns ride along)."""
    rows = len(grid)
    width = len(grid[0]) if grid else 0
    pivots: List[int] = []
    r = 0
    for c in range(n_cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if grid[i][c] != 0), None)
        if p is None:
            continue
        grid[r], grid[p] = grid[p], grid[r]
        inv = 1 / grid[r][c]
        grid[r] = [e * inv for e in grid[r]]
        for i in range(rows):
            if i != r and grid[i][c] != 0:
                t = grid[i][c]
                grid[i] = [a - t * b for a, b in zip(grid[i], grid[r])]
        pivots.append(c)
        r += 1
    return grid, pivots


def rank(M: Matrix) -> int:
    if M.rows == 0 or M.cols == 0:
        return 0
    return _bareiss(M.to_rows(), M.cols)[0]


def determinant(M: Matrix) -> Scalar:
    M.require_square()
    n = M.rows
    if n == 0:
        return M.field.one()
    r, sign, last = _bareiss(M.to_rows(), n)
    if r < n:
        return M.field.zero()
    return M.field.coerce(last * sign)


def solve(M: Matrix, c: Sequence) -> Optional[Vector]:
    """One exact solution of Mx = c (zeros in free positions), or None if inconsistent."""
    if len(c) != M.rows:
        raise DimensionMismatchError(f"right-hand side of length {len(c)} for {M.rows} equations")
    field = GroundField.join(M.field, GroundField.infer([GroundField.QI.coerce(v) for v in c]))
    grid = [[field.coerce(e) for e in M.row(i)] + [field.coerce(c[i])] for i in range(M.rows)]
    grid, pivots = _rref(grid, M.cols)
    for i in range(len(pivots), M.rows):
        if grid[i][M.cols] != 0:
            return None
    x = [field.zero()] * M.cols
    for i, pc in enumerate(pivots):
        x[pc] = grid[i][M.cols]
    return tuple(x)


def nullspace(M: Matrix) -> List[Vector]:
    grid, pivots = _rref(M.to_rows(), M.cols)
    free = [j for j in range(M.cols) if j not in pivots]
    basis = []
    for fj in free:
        v = [M.field.zero()] * M.cols
        v[fj] = M.field.one()
        for i, pc in enumerate(pivots):
            v[pc] = -grid[i][fj]
        basis.append(tuple(v))
    return basis


def column_basis(M: Matrix) -> List[Vector]:
    """Original columns at the pivot positions: a basis of the column space."""
    _, pivots = _rref(M.to_rows(), M.cols)
    return [M.column(j) for j in pivots]


def in_span(basis: Sequence[Vector], v: Sequence, field: GroundField) -> bool:
    if not basis:
        return all(e == 0 for e in v)
    B = Matrix.from_columns(basis, len(v), field)
    return solve(B, v) is not None


def coordinates(basis: Sequence[Vector], v: Sequence, field: GroundField) -> Vector:
    B = Matrix.from_columns(basis, len(v), field)
    x = solve(B, v)
    if x is None:
        raise DimensionMismatchError("vector is not in the span of the basis")
    return x


def charpoly(M: Matrix) -> Poly:
    """det(xI - M) by Berkowitz's division-free recursion."""
    M.require_square()
    n = M.rows
    field = M.field
    if n == 0:
        return Poly.constant(1, field)
    poly: List[Scalar] = [field.one(), -M[n - 1, n - 1]]  # highest degree first
    for k in range(n - 2, -1, -1):
        m = n - k - 1
        a = M[k, k]
        R = [M[k, j] for j in range(k + 1, n)]
        C = [M[i, k] for i in range(k + 1, n)]
        sub = M.block(k + 1, m)
        col: List[Scalar] = [field.one(), -a]
        v = tuple(C)
        for _ in range(m):
            col.append(-sum((r * x for r, x in zip(R, v)), field.zero()))
            v = sub.apply(v)
        poly = [
            sum((col[i - j] * poly[j] for j in range(0, min(i, m) + 1)), field.zero())
            for i in range(m + 2)
        ]
    return Poly(tuple(reversed(poly)), field)


def mat_poly_eval(p: Poly, M: Matrix) -> Matrix:
    M.require_square()
    field = GroundField.join(p.field, M.field)
    acc = Matrix.zeros(M.rows, M.rows, field)
    eye = Matrix.identity(M.rows, field)
    for c in reversed(p.coeffs):
        acc = acc @ M + eye.scale(c)
    return acc


def lower_toeplitz(first_column: Sequence, field: GroundField) -> Matrix:
    m = len(first_column)
    return Matrix(m, m, tuple(first_column[i - j] if i >= j else 0 for i in range(m) for j in range(m)), field)


# -------------------------------
# Affine operators
# -------------------------------
@dataclass(frozen=True)
class AffineOperator:
    """f(x) = Ax + b."""

    A: Matrix
    b: Vector

    def __post_init__(self):
        self.A.require_square("linear part")
        if len(self.b) != self.A.rows:
            raise DimensionMismatchError(f"translation of length {len(self.b)} for a {self.A.rows}x{self.A.rows} linear part")
        field = GroundField.join(self.A.field, GroundField.infer([GroundField.QI.coerce(v) for v in self.b]))
        object.__setattr__(self, "A", self.A.coerce(field) if field is not self.A.field else self.A)
        object.__setattr__(self, "b", tuple(field.coerce(v) for v in self.b))

    @property
    def n(self) -> int:
        return self.A.rows

    @property
    def field(self) -> GroundField:
        return self.A.field

    def __call__(self, x):
        if isinstance(x, np.ndarray):
            return self.evaluate(x)
        return tuple(a + c for a, c in zip(self.A.apply(x), self.b))

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return self.A.numeric @ x + self.b_numeric

    @cached_property
    def b_numeric(self) -> np.ndarray:
        dtype = float if self.field.is_real else complex
        return np.array([complex(v) if isinstance(v, ExactComplex) else float(v) for v in self.b], dtype=dtype)

    def base_change(self, S: Matrix) -> "AffineOperator":
        """(S^-1 A S, S^-1 b): the operator seen through h(x) = Sx."""
        Si = S.inverse()
        return AffineOperator(Si @ self.A @ S, Si.apply(self.b))

    def translate(self, q: Sequence) -> "AffineOperator":
        """(A, Aq + b - q): the operator seen through h(x) = x + q."""
        Aq = self.A.apply(q)
        return AffineOperator(self.A, tuple(a + c - t for a, c, t in zip(Aq, self.b, q)))

    def direct_sum(self, other: "AffineOperator") -> "AffineOperator":
        return AffineOperator(Matrix.direct_sum(self.A, other.A), tuple(self.b) + tuple(other.b))

    def coerce(self, field: GroundField | str) -> "AffineOperator":
        field = GroundField.parse(field)
        if field.is_real and any(isinstance(v, ExactComplex) and not v.is_real for v in self.A.entries + self.b):
            raise FieldMismatchError("cannot restrict a complex operator to the real field")
        return AffineOperator(self.A.coerce(field), self.b)

    def __str__(self):
        return f"({self.A}, [{', '.join(format_scalar(v) for v in self.b)}])"
