"""Jordan-structure bookkeeping from rank sequences.

Jordan blocks follow the lower-triangular convention: the eigenvalue on
the diagonal, ones on the first subdiagonal.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from affine_conjugacy.engine.errors import NotNilpotentError, NotSquareFreeError, PreconditionError
from affine_conjugacy.engine.exact_core import ExactComplex, GroundField, Poly, is_squarefree
from affine_conjugacy.engine.linalg import Matrix, Vector, charpoly, coordinates, in_span, mat_poly_eval, nullspace, rank

logger = logging.getLogger(__name__)


# -------------------------------
# Types
# -------------------------------
@dataclass(frozen=True)
class SegreCharacteristic:
    """Multiset of nilpotent block sizes, kept in descending order."""

    sizes: Tuple[int, ...] = ()

    def __post_init__(self):
        sizes = tuple(sorted((int(s) for s in self.sizes), reverse=True))
        if any(s < 1 for s in sizes):
            raise PreconditionError("block sizes must be positive")
        object.__setattr__(self, "sizes", sizes)

    @property
    def total(self) -> int:
        return sum(self.sizes)

    def __iter__(self):
        return iter(self.sizes)

    def __len__(self):
        return len(self.sizes)

    def to_list(self) -> List[int]:
        return list(self.sizes)

    def rank_of_power(self, i: int) -> int:
        """rank of J0^i for the nilpotent Jordan matrix with these blocks."""
        return sum(max(s - i, 0) for s in self.sizes)


class JordanBlockSpec(BaseModel):
    """One summand class of a canonical linear form.

    ``eigenvalue`` holds an exact scalar; unit-circle blocks with irrational
    eigenvalues are keyed by ``factor`` (coefficients, lowest degree first)
    and displayed through ``approx``.
    """

    model_config = ConfigDict(frozen=True)

    eigenvalue: Optional[str] = None
    factor: Optional[Tuple[str, ...]] = None
    factor_text: Optional[str] = None
    realified: bool = False
    size: int = Field(ge=1)
    count: int = Field(ge=1)
    approx: Tuple[str, ...] = ()


# -------------------------------
# Rank sequences
# -------------------------------
def _sizes_from_rank_drops(drops: Sequence[int]) -> List[Tuple[int, int]]:
    """drops[j-1] = number of blocks of size >= j; returns (size, count), largest first."""
    out = []
    for j in range(len(drops), 0, -1):
        nxt = drops[j] if j < len(drops) else 0
        exact = drops[j - 1] - nxt
        if exact:
            out.append((j, exact))
    return out


def segre_of_nilpotent(N: Matrix) -> SegreCharacteristic:
    N.require_square("nilpotent part")
    n = N.rows
    if n and not N.power(n).is_zero():
        raise NotNilpotentError("matrix is not nilpotent")
    ranks = [n]
    P = Matrix.identity(n, N.field)
    while ranks[-1] > 0:
        P = P @ N
        ranks.append(rank(P))
    drops = [ranks[j - 1] - ranks[j] for j in range(1, len(ranks))]
    sizes: List[int] = []
    for size, count in _sizes_from_rank_drops(drops):
        sizes.extend([size] * count)
    return SegreCharacteristic(tuple(sizes))


def block_structure_at_factor(A: Matrix, q: Poly) -> List[Tuple[int, int]]:
    """(size, count) of the Jordan blocks at each root of q, largest size first."""
    A.require_square()
    q = q.monic()
    if not is_squarefree(q):
        raise NotSquareFreeError(f"{q} is not square-free")
    if q.degree() < 1 or not q.divides(charpoly(A)):
        raise PreconditionError(f"{q} does not divide the characteristic polynomial")
    d = q.degree()
    n = A.rows
    Q = mat_poly_eval(q, A)
    ranks = [n]
    P = Matrix.identity(n, Q.field)
    while True:
        P = P @ Q
        ranks.append(rank(P))
        if ranks[-1] == ranks[-2]:
            break
    drops = []
    for j in range(1, len(ranks) - 1):
        diff = ranks[j - 1] - ranks[j]
        if diff % d:
            raise PreconditionError(f"roots of {q} carry different Jordan structures; pass an irreducible factor")
        drops.append(diff // d)
    return _sizes_from_rank_drops(drops)


# -------------------------------
# Jordan chains
# -------------------------------
def restrict(A: Matrix, basis: Sequence[Vector]) -> Matrix:
    """Matrix of A on the invariant subspace spanned by ``basis``."""
    cols = [coordinates(basis, A.apply(v), A.field) for v in basis]
    return Matrix.from_columns(cols, len(basis), A.field)


def jordan_chains(N: Matrix) -> List[List[Vector]]:
    """Chains [w, Nw, ..., N^(L-1)w] whose union is a basis; longest first.

    In chain order the matrix of N is a lower nilpotent Jordan block.
    """
    segre = segre_of_nilpotent(N)
    chains: List[List[Vector]] = []
    bottoms: List[Vector] = []
    for L in sorted(set(segre.sizes), reverse=True):
        wanted = sum(1 for s in segre.sizes if s == L)
        top = N.power(L - 1)
        for w in nullspace(N.power(L)):
            if not wanted:
                break
            bottom = top.apply(w)
            if all(e == 0 for e in bottom) or in_span(bottoms, bottom, N.field):
                continue
            bottoms.append(bottom)
            chain = [w]
            for _ in range(L - 1):
                chain.append(N.apply(chain[-1]))
            chains.append(chain)
            wanted -= 1
        if wanted:
            raise PreconditionError("Jordan chain extraction failed")
    return chains


# -------------------------------
# Constructors
# -------------------------------
def jordan_block(eigenvalue, n: int, field: GroundField | None = None) -> Matrix:
    if n < 1:
        raise PreconditionError("Jordan block size must be at least 1")
    lam = GroundField.QI.coerce(eigenvalue)
    f = field or GroundField.infer([lam])
    lam = f.coerce(lam)
    return Matrix(n, n, tuple(lam if i == j else (1 if i == j + 1 else 0) for i in range(n) for j in range(n)), f)


def nilpotent_jordan_matrix(segre: SegreCharacteristic | Iterable[int], field: GroundField = GroundField.Q) -> Matrix:
    sizes = segre.sizes if isinstance(segre, SegreCharacteristic) else SegreCharacteristic(tuple(segre)).sizes
    return Matrix.direct_sum(*(jordan_block(0, s, field) for s in sizes), field=field)


def companion_matrix(q: Poly) -> Matrix:
    """Ones on the subdiagonal, -coefficients in the last column; charpoly is monic(q)."""
    q = q.monic()
    d = q.degree()
    entries = []
    for i in range(d):
        for j in range(d):
            if j == d - 1:
                entries.append(-q.coeff(i))
            else:
                entries.append(1 if i == j + 1 else 0)
    return Matrix(d, d, tuple(entries), q.field)


def companion_jordan_block(q: Poly, k: int) -> Matrix:
    """Block-bidiagonal [C; I C; ...]: one k-block at every root of square-free q."""
    if k < 1:
        raise PreconditionError("block size must be at least 1")
    C = companion_matrix(q)
    d = C.rows
    grid = [[q.field.zero()] * (d * k) for _ in range(d * k)]
    for b in range(k):
        for i in range(d):
            for j in range(d):
                grid[b * d + i][b * d + j] = C[i, j]
            if b + 1 < k:
                grid[(b + 1) * d + i][b * d + i] = q.field.one()
    return Matrix(d * k, d * k, tuple(e for row in grid for e in row), q.field)


def realify(M: Matrix) -> Matrix:
    """Replace every entry a + bi by the real 2x2 block [[a, -b], [b, a]]."""
    n, m = M.rows, M.cols
    grid = [[0] * (2 * m) for _ in range(2 * n)]
    for i in range(n):
        for j in range(m):
            z = ExactComplex.lift(M[i, j])
            grid[2 * i][2 * j] = z.re
            grid[2 * i][2 * j + 1] = -z.im
            grid[2 * i + 1][2 * j] = z.im
            grid[2 * i + 1][2 * j + 1] = z.re
    return Matrix(2 * n, 2 * m, tuple(e for row in grid for e in row), GroundField.Q)
