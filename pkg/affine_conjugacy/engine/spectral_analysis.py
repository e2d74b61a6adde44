"""Exact eigenvalue bookkeeping: modulus strata, roots of unity, Fitting split, similarity.

Roots are never computed. Strata come from Sturm sequences and Cauchy
indices after mapping the unit circle onto the imaginary axis with
z = (1 + t) / (1 - t). Irreducible factorization (sympy) is used only to
name factors; every count is exact arithmetic on square-free layers.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy

from affine_conjugacy.engine.errors import (
    FieldMismatchError,
    InternalConsistencyError,
    NotSquareFreeError,
    PreconditionError,
)
from affine_conjugacy.engine.exact_core import (
    ExactComplex,
    GroundField,
    Poly,
    cyclotomic,
    is_squarefree,
    poly_gcd,
    squarefree_decompose,
    squarefree_part,
)
from affine_conjugacy.engine.linalg import Matrix, charpoly, column_basis, determinant, nullspace
from affine_conjugacy.engine.structure import block_structure_at_factor

logger = logging.getLogger(__name__)

_X = sympy.Symbol("x")
_Q = GroundField.Q


# -------------------------------
# Sturm sequences and Cauchy indices
# -------------------------------
def _real(p: Poly) -> Poly:
    if not p.is_real():
        raise FieldMismatchError(f"polynomial {p} has non-real coefficients")
    return p.to_field(_Q)


def _sign(c: Fraction) -> int:
    return (c > 0) - (c < 0)


def remainder_sequence(f0: Poly, f1: Poly) -> List[Poly]:
    """f0, f1, -rem(f0, f1), ... down to the last nonzero term."""
    seq = [f0, f1]
    while not seq[-1].is_zero() and seq[-1].degree() > 0:
        nxt = -(seq[-2] % seq[-1])
        if nxt.is_zero():
            break
        seq.append(nxt)
    return [s for s in seq if not s.is_zero()]


def sturm_sequence(p: Poly) -> List[Poly]:
    return remainder_sequence(p, p.derivative())


def _variations_at(seq: Sequence[Poly], point: Optional[Fraction], side: int) -> int:
    """Sign changes of seq at a finite point, or at side * infinity when point is None."""
    signs = []
    for s in seq:
        if point is None:
            sg = _sign(s.leading()) * (side ** s.degree() if s.degree() > 0 else 1)
        else:
            sg = _sign(s(point))
        if sg:
            signs.append(sg)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_real_roots(p: Poly, lo: Optional[Fraction] = None, hi: Optional[Fraction] = None) -> int:
    """Distinct real roots of p in the open interval (lo, hi); None means unbounded."""
    if p.is_zero():
        raise PreconditionError("real-root count of the zero polynomial")
    g = squarefree_part(_real(p))
    x = Poly.x()
    for end in (lo, hi):
        if end is not None and g.degree() > 0 and g(Fraction(end)) == 0:
            g = g // (x - Fraction(end))
    if g.degree() <= 0:
        return 0
    seq = sturm_sequence(g)
    v_lo = _variations_at(seq, None if lo is None else Fraction(lo), -1)
    v_hi = _variations_at(seq, None if hi is None else Fraction(hi), 1)
    return v_lo - v_hi


def cauchy_index(num: Poly, den: Poly) -> int:
    """Cauchy index of num/den over the whole real line."""
    if num.is_zero():
        return 0
    if den.is_zero():
        raise PreconditionError("Cauchy index with a zero denominator")
    seq = remainder_sequence(_real(den), _real(num))
    return _variations_at(seq, None, -1) - _variations_at(seq, None, 1)


def multiplicity_count(p: Poly, lo: Optional[Fraction] = None, hi: Optional[Fraction] = None) -> int:
    """Real roots of p in (lo, hi) counted with multiplicity."""
    return sum(m * count_real_roots(f, lo, hi) for f, m in squarefree_decompose(_real(p)))


# -------------------------------
# Unit-circle counting
# -------------------------------
_I_POWERS = ((1, 0), (0, 1), (-1, 0), (0, -1))


def _imaginary_axis_parts(q: Poly) -> Tuple[Poly, Poly]:
    """q(iy) = R(y) + i I(y) for real q."""
    re_c, im_c = [], []
    for k, a in enumerate(q.coeffs):
        r, i = _I_POWERS[k % 4]
        re_c.append(a * r)
        im_c.append(a * i)
    return Poly(tuple(re_c), _Q), Poly(tuple(im_c), _Q)


def _half_plane_counts(q: Poly) -> Tuple[int, int, int]:
    """(left, imaginary axis, right) root counts of a square-free real q."""
    R, I = _imaginary_axis_parts(q)
    G = poly_gcd(R, I)
    left = right = axis = 0
    q2 = q
    if G.degree() > 0:
        axis = count_real_roots(G)
        off = G.degree() - axis
        left += off // 2
        right += off // 2
        # G is even or odd, so G(-it) is real after normalization
        H = Poly(tuple(ExactComplex(0, -1) ** k * c for k, c in enumerate(G.coeffs)), GroundField.QI).monic()
        H = _real(H)
        q2, rem = divmod(q, H)
        if not rem.is_zero():
            raise InternalConsistencyError("imaginary-axis factor does not divide the transformed polynomial")
    m = q2.degree()
    if m > 0:
        R2, I2 = _imaginary_axis_parts(q2)
        if R2.degree() == m:
            D = -cauchy_index(I2, R2)
        else:
            D = cauchy_index(R2, I2)
        left += (m + D) // 2
        right += (m - D) // 2
    return left, axis, right


def _cayley_transform(g: Poly) -> Poly:
    """(1 - t)^d g((1 + t) / (1 - t)); |z| < 1 maps to Re t < 0."""
    d = g.degree()
    one_plus = Poly((1, 1), _Q)
    one_minus = Poly((1, -1), _Q)
    acc = Poly((), _Q)
    for k, a in enumerate(g.coeffs):
        if a != 0:
            acc = acc + (one_plus ** k) * (one_minus ** (d - k)) * a
    return acc


def _squarefree_modulus_counts(g: Poly) -> Tuple[int, int, int]:
    """(inside, on, outside) for square-free real g with g(0) != 0."""
    on = 0
    x = Poly.x()
    for r in (1, -1):
        if g.degree() > 0 and g(Fraction(r)) == 0:
            on += 1
            g = g // (x - r)
    if g.degree() <= 0:
        return 0, on, 0
    left, axis, right = _half_plane_counts(_cayley_transform(g))
    return left, on + axis, right


def _real_modulus_counts(p: Poly) -> Tuple[int, int, int, int]:
    """(n0, n01, n1, n1inf) with multiplicity for a real polynomial."""
    p = _real(p)
    n0 = 0
    while n0 < len(p.coeffs) and p.coeffs[n0] == 0:
        n0 += 1
    rest = Poly(p.coeffs[n0:], _Q)
    n01 = n1 = n1inf = 0
    for f, m in squarefree_decompose(rest):
        i, o, u = _squarefree_modulus_counts(f)
        n01 += m * i
        n1 += m * o
        n1inf += m * u
    return n0, n01, n1, n1inf


def modulus_counts(p: Poly) -> Tuple[int, int, int, int]:
    if p.is_real():
        return _real_modulus_counts(p)
    doubled = _real_modulus_counts(p * p.conj())
    return tuple(c // 2 for c in doubled)  # type: ignore[return-value]


def count_roots_on_unit_circle(p: Poly) -> int:
    if not is_squarefree(p):
        raise NotSquareFreeError(f"{p} is not square-free; decompose it first")
    return modulus_counts(p)[2]


# -------------------------------
# Irreducible factors (sympy)
# -------------------------------
def _to_sympy_scalar(c):
    if isinstance(c, ExactComplex):
        return sympy.Rational(c.re.numerator, c.re.denominator) + sympy.I * sympy.Rational(c.im.numerator, c.im.denominator)
    c = Fraction(c)
    return sympy.Rational(c.numerator, c.denominator)


def _from_sympy_scalar(c):
    c = sympy.expand(c)
    re, im = (sympy.Rational(v) for v in c.as_real_imag())
    if im == 0:
        return Fraction(int(re.p), int(re.q))
    return ExactComplex(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q)))


def to_sympy(p: Poly):
    return sum((_to_sympy_scalar(c) * _X ** k for k, c in enumerate(p.coeffs)), sympy.Integer(0))


def from_sympy(expr, field: GroundField) -> Poly:
    coeffs = sympy.Poly(expr, _X).all_coeffs()
    return Poly(tuple(_from_sympy_scalar(c) for c in reversed(coeffs)), field)


def factor_key(p: Poly) -> Tuple[int, Tuple[str, ...]]:
    return p.degree(), tuple(p.coefficient_strings())


def irreducible_factors(p: Poly) -> List[Tuple[Poly, int]]:
    """Monic irreducible factors over the polynomial's own field, with multiplicities."""
    if p.is_zero():
        raise PreconditionError("factorization of the zero polynomial")
    if p.degree() <= 0:
        return []
    expr = to_sympy(p)
    if p.field.is_real and p.is_real():
        _, factors = sympy.factor_list(expr, _X)
    else:
        _, factors = sympy.factor_list(expr, _X, extension=sympy.I)
    out = [(from_sympy(f, p.field).monic(), int(m)) for f, m in factors if sympy.Poly(f, _X).degree() > 0]
    return sorted(out, key=lambda fm: factor_key(fm[0]))


def approximate_roots(q: Poly) -> List[complex]:
    coeffs = [complex(c) if isinstance(c, ExactComplex) else float(c) for c in reversed(q.coeffs)]
    return sorted((complex(r) for r in np.roots(coeffs)), key=lambda z: (round(z.real, 12), round(z.imag, 12)))


# -------------------------------
# Modulus partition
# -------------------------------
@dataclass(frozen=True)
class ModulusPartition:
    n0: int
    n01: int
    n1: int
    n1inf: int
    p0: Poly
    p01: Poly
    p1: Poly
    p1inf: Poly
    # irreducible factors whose roots straddle two strata (Salem-type)
    mixed: Tuple[Tuple[Poly, int], ...] = ()
    det01_sign: Optional[int] = None
    det1inf_sign: Optional[int] = None

    @property
    def degree(self) -> int:
        return self.n0 + self.n01 + self.n1 + self.n1inf

    def to_dict(self) -> Dict:
        return {
            "n0": self.n0,
            "n01": self.n01,
            "n1": self.n1,
            "n1inf": self.n1inf,
            "factors": {
                "p0": str(self.p0),
                "p01": str(self.p01),
                "p1": str(self.p1),
                "p1inf": str(self.p1inf),
            },
            "mixed": [{"factor": str(f), "multiplicity": m} for f, m in self.mixed],
            "det01_sign": self.det01_sign,
            "det1inf_sign": self.det1inf_sign,
        }


def modulus_partition(p: Poly) -> ModulusPartition:
    p = p.monic()
    n0, n01, n1, n1inf = modulus_counts(p)
    field = p.field
    one = Poly.constant(1, field)
    parts = {"p0": one, "p01": one, "p1": one, "p1inf": one}
    mixed = []
    for f, m in irreducible_factors(p):
        c0, c01, c1, c1inf = modulus_counts(f)
        if c0:
            parts["p0"] = parts["p0"] * f ** m
        elif c01 == f.degree():
            parts["p01"] = parts["p01"] * f ** m
        elif c1 == f.degree():
            parts["p1"] = parts["p1"] * f ** m
        elif c1inf == f.degree():
            parts["p1inf"] = parts["p1inf"] * f ** m
        else:
            mixed.append((f, m))
    det01 = det1inf = None
    if p.is_real():
        det01 = -1 if multiplicity_count(p, Fraction(-1), Fraction(0)) % 2 else 1
        det1inf = -1 if multiplicity_count(p, None, Fraction(-1)) % 2 else 1
    logger.debug("modulus partition of %s: %s", p, (n0, n01, n1, n1inf))
    return ModulusPartition(n0, n01, n1, n1inf, mixed=tuple(mixed), det01_sign=det01, det1inf_sign=det1inf, **parts)


# -------------------------------
# Roots of unity
# -------------------------------
def root_of_unity_factor(p: Poly, n: int) -> Optional[Tuple[int, Poly]]:
    """Smallest k with gcd(p, Phi_k) nontrivial among all k with phi(k) <= n."""
    if p.degree() <= 0:
        return None
    # phi(k) >= sqrt(k / 2), so k <= 2 n^2 covers every candidate
    for k in range(1, 2 * n * n + 3):
        if int(sympy.totient(k)) > n:
            continue
        phi_k = cyclotomic(k)
        if poly_gcd(p, phi_k.to_field(p.field)).degree() > 0:
            return k, phi_k
    return None


# -------------------------------
# Fitting decomposition
# -------------------------------
@dataclass(frozen=True)
class FittingSplit:
    nonsingular_part: Matrix
    nilpotent_part: Matrix
    transition: Matrix

    def to_dict(self) -> Dict:
        return {
            "nonsingular_part": self.nonsingular_part.to_strings(),
            "nilpotent_part": self.nilpotent_part.to_strings(),
            "transition": self.transition.to_strings(),
        }


def fitting_split(A: Matrix) -> FittingSplit:
    A.require_square()
    n = A.rows
    An = A.power(n)
    image = column_basis(An)
    kernel = nullspace(An)
    S = Matrix.from_columns(image + kernel, n, A.field)
    D = S.inverse() @ A @ S
    r = len(image)
    return FittingSplit(D.block(0, r), D.block(r, n - r), S)


# -------------------------------
# Similarity via invariant factors
# -------------------------------
def invariant_factors(M: Matrix) -> List[Poly]:
    """Nonconstant diagonal of the Smith form of xI - M over F[x]."""
    M.require_square()
    n = M.rows
    field = M.field
    grid = [[Poly((-M[i, j], 1) if i == j else (-M[i, j],), field) for j in range(n)] for i in range(n)]
    for t in range(n):
        while True:
            candidates = [(grid[i][j].degree(), i, j) for i in range(t, n) for j in range(t, n) if not grid[i][j].is_zero()]
            if not candidates:
                break
            _, pi, pj = min(candidates)
            grid[t], grid[pi] = grid[pi], grid[t]
            for row in grid:
                row[t], row[pj] = row[pj], row[t]
            pivot = grid[t][t]
            clean = True
            for i in range(t + 1, n):
                quo, rem = divmod(grid[i][t], pivot)
                if not quo.is_zero():
                    grid[i] = [a - quo * b for a, b in zip(grid[i], grid[t])]
                clean = clean and rem.is_zero()
            for j in range(t + 1, n):
                quo, rem = divmod(grid[t][j], pivot)
                if not quo.is_zero():
                    for row in grid:
                        row[j] = row[j] - quo * row[t]
                clean = clean and rem.is_zero()
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, n) for j in range(t + 1, n) if not (grid[i][j] % pivot).is_zero()),
                None,
            )
            if bad is None:
                break
            grid[t] = [a + b for a, b in zip(grid[t], grid[bad])]
    diagonal = [grid[i][i].monic() for i in range(n)]
    return [d for d in diagonal if d.degree() > 0]


def similar(A: Matrix, B: Matrix) -> bool:
    if A.field is not B.field:
        raise FieldMismatchError(f"similarity over {A.field.value} vs {B.field.value}")
    A.require_square()
    B.require_square()
    if A.rows != B.rows:
        return False
    return invariant_factors(A) == invariant_factors(B)


# -------------------------------
# Spectral split of a matrix
# -------------------------------
@dataclass(frozen=True)
class SpectralSplit:
    partition: ModulusPartition
    fitting: FittingSplit
    core_det_sign: int
    unit_factors: Tuple[Tuple[Poly, int, int], ...] = dc_field(default=())

    def to_dict(self) -> Dict:
        return {
            "partition": self.partition.to_dict(),
            "fitting": self.fitting.to_dict(),
            "core_det_sign": self.core_det_sign,
            "unit_factors": [
                {"factor": str(q), "multiplicity": m, "unit_roots": u} for q, m, u in self.unit_factors
            ],
        }


def unit_circle_factors(p: Poly) -> List[Tuple[Poly, int, int]]:
    """(irreducible factor, multiplicity, number of its roots on the unit circle)."""
    out = []
    for q, m in irreducible_factors(p):
        u = modulus_counts(q)[2]
        if u:
            out.append((q, m, u))
    return out


def determinant_sign(M: Matrix) -> int:
    d = determinant(M)
    if M.field.is_real or (isinstance(d, ExactComplex) and d.is_real):
        value = d.re if isinstance(d, ExactComplex) else d
        return _sign(value)
    return 1 if d != 0 else 0


def spectral_split(A: Matrix) -> SpectralSplit:
    p = charpoly(A)
    fit = fitting_split(A)
    return SpectralSplit(
        partition=modulus_partition(p),
        fitting=fit,
        core_det_sign=determinant_sign(fit.nonsingular_part) if A.field.is_real else 1,
        unit_factors=tuple(unit_circle_factors(p)),
    )


def count_negative_real_eigenvalues(M: Matrix) -> int:
    return multiplicity_count(charpoly(M), None, Fraction(0))


def real_log_exists(M: Matrix) -> bool:
    """Every negative eigenvalue has an even number of Jordan blocks of each size."""
    if not M.field.is_real:
        raise FieldMismatchError("real logarithm test needs a real matrix")
    p = charpoly(M)
    if p.coeff(0) == 0:
        return False
    for q, _ in irreducible_factors(p):
        if count_real_roots(q, None, Fraction(0)) == 0:
            continue
        if any(count % 2 for _, count in block_structure_at_factor(M, q)):
            return False
    return True
