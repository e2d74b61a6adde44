"""Conjugating homeomorphisms and their verification.

A witness ``h`` for the pair (f, g) satisfies g = h^-1 f h, i.e.
f(h(x)) = h(g(x)). Primitive witnesses act on a contiguous coordinate
window ``[offset, offset + size)`` and leave the other coordinates alone.

Exact witnesses (translations, rational base changes, Blanc polynomial
maps) evaluate on tuples of Fractions / ExactComplex without rounding.
Flows and numeric base changes evaluate on numpy arrays.
"""

from __future__ import annotations

import logging
import dataclasses
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, ClassVar, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
from pydantic import BaseModel, Field

from affine_conjugacy.engine.errors import (
    DimensionMismatchError,
    FieldMismatchError,
    InternalConsistencyError,
    NoRealLogarithmError,
    NonSquareMatrixError,
    ParseError,
    PreconditionError,
    SingularMatrixError,
    WitnessResidualError,
)
from affine_conjugacy.engine.exact_core import ExactComplex, GroundField, format_scalar, parse_complex
from affine_conjugacy.engine.linalg import AffineOperator, Matrix, determinant, lower_toeplitz
from affine_conjugacy.engine.spectral_analysis import count_negative_real_eigenvalues, real_log_exists
from affine_conjugacy.utils.settings import settings

logger = logging.getLogger(__name__)

Point = Union[Tuple[Any, ...], np.ndarray]

# eigenvalues of a defective k-block move by ~eps**(1/k) in floating point
CLUSTER_TOL = 1e-4
RANK_TOL = 1e-7


# -------------------------------
# Array helpers
# -------------------------------
def _encode_array(M: np.ndarray) -> List:
    if np.iscomplexobj(M):
        return [[[float(z.real), float(z.imag)] for z in row] for row in M]
    return [[float(v) for v in row] for row in M]


def _decode_array(rows: Sequence) -> np.ndarray:
    if rows and rows[0] and isinstance(rows[0][0], (list, tuple)):
        return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)
    return np.array(rows, dtype=float)


def _as_array(x: Point) -> np.ndarray:
    if isinstance(x, np.ndarray):
        return x
    if any(isinstance(v, ExactComplex) or isinstance(v, complex) for v in x):
        return np.array([complex(v) for v in x], dtype=complex)
    return np.array([float(v) for v in x], dtype=float)


def _promote(x: np.ndarray, M: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(M) and not np.iscomplexobj(x):
        return x.astype(complex)
    return x


# -------------------------------
# Witness kinds
# -------------------------------
@dataclass(frozen=True, eq=False, kw_only=True)
class Witness:
    dim: int
    offset: int = 0
    inverted: bool = False

    kind: ClassVar[str] = "Witness"

    def __post_init__(self):
        if self.offset < 0 or self.offset + self.size > self.dim:
            raise DimensionMismatchError(f"window [{self.offset}, {self.offset + self.size}) outside dimension {self.dim}")

    @property
    def size(self) -> int:
        return self.dim - self.offset

    @property
    def exact(self) -> bool:
        return True

    @property
    def is_identity(self) -> bool:
        return False

    def _local(self, y, forward: bool):
        raise NotImplementedError

    def _apply(self, x: Point, forward: bool) -> Point:
        if len(x) != self.dim:
            raise DimensionMismatchError(f"point of length {len(x)} for a witness on dimension {self.dim}")
        if not self.exact and not isinstance(x, np.ndarray):
            x = _as_array(x)
        lo, hi = self.offset, self.offset + self.size
        direction = forward != self.inverted
        if isinstance(x, np.ndarray):
            mid = np.asarray(self._local(x[lo:hi], direction))
            out = _promote(x.copy(), mid)
            out[lo:hi] = mid
            return out
        return tuple(x[:lo]) + tuple(self._local(tuple(x[lo:hi]), direction)) + tuple(x[hi:])

    def forward(self, x: Point) -> Point:
        return self._apply(x, True)

    def inverse(self, x: Point) -> Point:
        return self._apply(x, False)

    def __call__(self, x: Point) -> Point:
        return self.forward(x)

    def invert(self) -> "Witness":
        return dataclasses.replace(self, inverted=not self.inverted)

    def _payload(self) -> Dict[str, Any]:
        return {}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "dim": self.dim,
            "offset": self.offset,
            "inverted": self.inverted,
            **self._payload(),
        }


@dataclass(frozen=True, eq=False, kw_only=True)
class Translation(Witness):
    """x -> x + p."""

    p: Tuple[Any, ...]

    kind: ClassVar[str] = "Translation"

    @property
    def size(self) -> int:
        return len(self.p)

    @property
    def is_identity(self) -> bool:
        return all(v == 0 for v in self.p)

    def _local(self, y, forward: bool):
        sign = 1 if forward else -1
        if isinstance(y, np.ndarray):
            return y + sign * _as_array(self.p)
        return tuple(a + sign * c for a, c in zip(y, self.p))

    def _payload(self):
        return {"p": [format_scalar(v) for v in self.p]}


@dataclass(frozen=True, eq=False, kw_only=True)
class Linear(Witness):
    """x -> S x, with S rational (exact) or a float array (numeric)."""

    S: Union[Matrix, np.ndarray]

    kind: ClassVar[str] = "Linear"

    @property
    def exact(self) -> bool:
        return isinstance(self.S, Matrix)

    @property
    def size(self) -> int:
        return self.S.rows if isinstance(self.S, Matrix) else self.S.shape[0]

    @property
    def is_identity(self) -> bool:
        if isinstance(self.S, Matrix):
            return self.S.entries == Matrix.identity(self.S.rows, self.S.field).entries
        return bool(np.array_equal(self.S, np.eye(self.S.shape[0])))

    def _local(self, y, forward: bool):
        if isinstance(y, np.ndarray):
            S = self.S.numeric if isinstance(self.S, Matrix) else self.S
            return S @ y if forward else np.linalg.solve(S, _promote(y, S))
        S = self.S if forward else self._S_inverse
        return S.apply(y)

    @cached_property
    def _S_inverse(self) -> Matrix:
        return self.S.inverse()

    def _payload(self):
        if isinstance(self.S, Matrix):
            return {"exact": True, "matrix": self.S.to_strings()}
        return {"exact": False, "matrix": _encode_array(self.S)}


def _binomial(t, j: int):
    """Generalized binomial coefficient t(t-1)...(t-j+1)/j!."""
    acc = 1
    for l in range(j):
        acc = acc * (t - l) / (l + 1)
    return acc


def blanc_polynomial(k: int, x: Sequence) -> Any:
    """P_k(x_1, ..., x_k) of the Blanc linearization (k >= 1, x indexed from 0)."""
    x1 = x[0]
    value = (-1) ** k * _binomial(x1 + k - 1, k + 1) * k
    for i in range(1, k):
        value = value + (-1) ** i * _binomial(x1 + i - 1, i) * x[k - i]
    return value


@dataclass(frozen=True, eq=False, kw_only=True)
class BlancPolynomial(Witness):
    """(x1, ..., xm) -> (x1, x2 + P_1, ..., xm + P_{m-1}).

    Satisfies h o (J_m(1), e1) = (I_m, e1) o h, so it is the witness for the
    pair ((I_m, e1), (J_m(1), e1)); its inversion linearizes the unipotent side.
    """

    m: int

    kind: ClassVar[str] = "BlancPolynomial"

    def __post_init__(self):
        if self.m < 1:
            raise PreconditionError("Blanc map needs m >= 1")
        super().__post_init__()

    @property
    def size(self) -> int:
        return self.m

    @property
    def is_identity(self) -> bool:
        return self.m == 1

    def _local(self, y, forward: bool):
        if forward:
            out = [y[0]]
            for k in range(1, self.m):
                out.append(y[k] + blanc_polynomial(k, y))
            return out
        x = [y[0]]
        for k in range(1, self.m):
            x.append(y[k] - blanc_polynomial(k, x))
        return x

    def _payload(self):
        return {"m": self.m}


@dataclass(frozen=True, eq=False, kw_only=True)
class Flow(Witness):
    """(x, y) -> (x, e^{xG} y) on the window; x is the first window coordinate.

    Witness for (1, [1]) + (E e^G, 0) against (1, [1]) + (E, 0), where the
    signature E = diag(signature) commutes with G.
    """

    G: np.ndarray
    signature: Tuple[int, ...] = ()

    kind: ClassVar[str] = "Flow"

    @property
    def exact(self) -> bool:
        return False

    @property
    def size(self) -> int:
        return 1 + self.G.shape[0]

    @property
    def is_identity(self) -> bool:
        return not np.any(self.G)

    def _local(self, y, forward: bool):
        t = y[0] if forward else -y[0]
        E = scipy.linalg.expm(t * self.G)
        out = _promote(np.array(y, copy=True), E)
        out[1:] = E @ y[1:]
        return out

    def _payload(self):
        return {"generator": _encode_array(self.G), "signature": list(self.signature)}


@dataclass(frozen=True, eq=False, kw_only=True)
class Composite(Witness):
    """h_1 o h_2 o ... o h_k for stages recorded in reduction order."""

    stages: Tuple[Witness, ...] = ()

    kind: ClassVar[str] = "Composite"

    @property
    def size(self) -> int:
        return self.dim

    @property
    def exact(self) -> bool:
        return all(s.exact for s in self.stages)

    @property
    def is_identity(self) -> bool:
        return all(s.is_identity for s in self.stages)

    def _apply(self, x: Point, forward: bool) -> Point:
        if len(x) != self.dim:
            raise DimensionMismatchError(f"point of length {len(x)} for a witness on dimension {self.dim}")
        if not self.exact and not isinstance(x, np.ndarray):
            x = _as_array(x)
        if forward != self.inverted:
            for stage in reversed(self.stages):
                x = stage.forward(x)
        else:
            for stage in self.stages:
                x = stage.inverse(x)
        return x

    def then(self, stage: Witness) -> "Composite":
        if stage.dim != self.dim:
            raise DimensionMismatchError(f"stage on dimension {stage.dim} for a composite on {self.dim}")
        return Composite(dim=self.dim, stages=self.stages + (stage,), inverted=self.inverted)

    def _payload(self):
        return {"stages": [s.to_dict() for s in self.stages]}


WITNESS_KINDS: Dict[str, type] = {
    cls.kind: cls for cls in (Translation, Linear, BlancPolynomial, Flow, Composite)
}


def witness_from_dict(data: Dict[str, Any]) -> Witness:
    try:
        kind = data["kind"]
        common = {"dim": int(data["dim"]), "offset": int(data.get("offset", 0)), "inverted": bool(data.get("inverted", False))}
        if kind == "Translation":
            p = tuple(parse_complex(v) for v in data["p"])
            field = GroundField.infer(p)
            return Translation(p=tuple(field.coerce(v) for v in p), **common)
        if kind == "Linear":
            if data.get("exact", True):
                S = Matrix.from_rows(data["matrix"])
            else:
                S = _decode_array(data["matrix"])
            return Linear(S=S, **common)
        if kind == "BlancPolynomial":
            return BlancPolynomial(m=int(data["m"]), **common)
        if kind == "Flow":
            return Flow(G=_decode_array(data["generator"]), signature=tuple(int(s) for s in data.get("signature", ())), **common)
        if kind == "Composite":
            return Composite(stages=tuple(witness_from_dict(s) for s in data.get("stages", ())), **common)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed witness: {exc}") from exc
    raise ParseError(f"unknown witness kind {data.get('kind')!r}")


# -------------------------------
# Constructors
# -------------------------------
def translation_witness(p: Sequence) -> Translation:
    """h(x) = x + p; conjugates f to its linear part when p is a fixed point of f."""
    field = GroundField.infer([GroundField.QI.coerce(v) for v in p])
    return Translation(dim=len(p), p=tuple(field.coerce(v) for v in p))


def step3_matrix(a: Sequence, field: GroundField | None = None) -> Matrix:
    """Lower Toeplitz S with first column a: S J_m(1) S^-1 = J_m(1) and S e1 = a."""
    if not a:
        raise PreconditionError("empty vector")
    field = field or GroundField.infer([GroundField.QI.coerce(v) for v in a])
    if field.coerce(a[0]) == 0:
        raise PreconditionError("first coordinate must be nonzero")
    return lower_toeplitz(a, field)


def step3_witness(a: Sequence, field: GroundField | None = None) -> Linear:
    S = step3_matrix(a, field)
    return Linear(dim=S.rows, S=S)


def blanc_witness(m: int) -> BlancPolynomial:
    return BlancPolynomial(dim=m, m=m)


# -------------------------------
# Logarithms
# -------------------------------
def _scaled_rank(M: np.ndarray, tol: float) -> int:
    if M.size == 0:
        return 0
    return int(np.linalg.matrix_rank(M, tol=tol * max(1.0, float(np.abs(M).max()))))


def _null_basis(M: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal kernel basis under the same absolute cutoff as _scaled_rank."""
    _, sv, Vh = np.linalg.svd(M)
    r = int(np.sum(sv > tol * max(1.0, float(np.abs(M).max()))))
    return Vh[r:].T


def _negative_axis_cut(M: np.ndarray, count: Optional[int], cluster_tol: float) -> float:
    """Threshold on |Im| separating the eigenvalues treated as negative real."""
    scale = max(1.0, float(np.abs(M).max()) if M.size else 1.0)
    if count is None:
        return cluster_tol * scale
    if count == 0:
        return -1.0
    eig = np.linalg.eigvals(M)
    score = np.sort(np.where(eig.real < 0, np.abs(eig.imag), np.inf))
    lo = score[count - 1]
    hi = score[count] if count < len(score) else np.inf
    if not np.isfinite(lo):
        raise InternalConsistencyError(f"expected {count} negative real eigenvalues, found fewer")
    return 0.5 * (lo + hi) if np.isfinite(hi) else np.finfo(float).max


def split_negative_real(
    M: np.ndarray,
    cluster_tol: float = CLUSTER_TOL,
    count: Optional[int] = None,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Real W with W^-1 M W = P + N, N carrying exactly the negative real eigenvalues.

    Real Schur form sorted so the negative real eigenvalues come last, then a
    Sylvester solve gives the complementary invariant subspace. Both column
    blocks of W are orthonormal. With ``count`` (the exact number of negative
    real eigenvalues) the cut is placed between the count-th and the next
    eigenvalue ordered by distance to the negative axis.
    """
    n = M.shape[0]
    cut = _negative_axis_cut(M, count, cluster_tol)

    def keep(re, im):
        return not (abs(im) <= cut and re < 0)

    T, Z, sdim = scipy.linalg.schur(M, output="real", sort=keep)
    if sdim == 0 or sdim == n:
        return Z, T[:sdim, :sdim], T[sdim:, sdim:]
    T11, T12, T22 = T[:sdim, :sdim], T[:sdim, sdim:], T[sdim:, sdim:]
    X = scipy.linalg.solve_sylvester(T11, -T22, -T12)
    Q, _ = np.linalg.qr(Z[:, :sdim] @ X + Z[:, sdim:])
    W = np.column_stack([Z[:, :sdim], Q])
    B = np.linalg.solve(W, M @ W)
    return W, B[:sdim, :sdim], B[sdim:, sdim:]


def _jordan_chains(N: np.ndarray, tol: float) -> List[List[np.ndarray]]:
    """Jordan chains [w, Nw, ..., N^{L-1}w] of a numerically nilpotent matrix."""
    s = N.shape[0]
    ranks = [s]
    P = np.eye(s)
    while ranks[-1] > 0 and len(ranks) <= s:
        P = P @ N
        ranks.append(_scaled_rank(P, tol))
    at_least = [ranks[j - 1] - ranks[j] for j in range(1, len(ranks))]
    chains: List[List[np.ndarray]] = []
    bottoms = np.zeros((s, 0))
    for L in range(len(at_least), 0, -1):
        wanted = at_least[L - 1] - (at_least[L] if L < len(at_least) else 0)
        if not wanted:
            continue
        NL1 = np.linalg.matrix_power(N, L - 1)
        candidates = _null_basis(np.linalg.matrix_power(N, L), tol)
        for w in candidates.T:
            if not wanted:
                break
            bottom = NL1 @ w
            trial = np.column_stack([bottoms, bottom])
            if _scaled_rank(trial, tol) > bottoms.shape[1]:
                bottoms = trial
                chain = [w]
                for _ in range(L - 1):
                    chain.append(N @ chain[-1])
                chains.append(chain)
                wanted -= 1
        if wanted:
            raise NoRealLogarithmError("could not resolve the Jordan structure numerically")
    return chains


def complex_structure(N: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    """Real J with J^2 = -I commuting with the nilpotent N.

    Exists iff N has an even number of Jordan blocks of each size.
    """
    chains = _jordan_chains(N, tol)
    by_length: Dict[int, List[List[np.ndarray]]] = {}
    for chain in chains:
        by_length.setdefault(len(chain), []).append(chain)
    if any(len(group) % 2 for group in by_length.values()):
        raise NoRealLogarithmError("odd number of Jordan blocks of some size at a negative eigenvalue")
    columns: List[np.ndarray] = []
    J_local = np.zeros((N.shape[0], N.shape[0]))
    for length in sorted(by_length, reverse=True):
        group = by_length[length]
        for a, b in zip(group[0::2], group[1::2]):
            base = len(columns)
            columns.extend(a)
            columns.extend(b)
            for j in range(length):
                J_local[base + length + j, base + j] = 1.0
                J_local[base + j, base + length + j] = -1.0
    V = np.column_stack(columns)
    return V @ J_local @ np.linalg.inv(V)


def _log_unipotent(N: np.ndarray) -> np.ndarray:
    """log(I + N) for nilpotent N, as the terminating series."""
    out = np.zeros_like(N)
    term = np.eye(N.shape[0])
    for k in range(1, N.shape[0] + 1):
        term = term @ N
        out = out + ((-1) ** (k + 1) / k) * term
    return out


def _log_negative_part(M: np.ndarray, cluster_tol: float = CLUSTER_TOL) -> np.ndarray:
    r = M.shape[0]
    eig = np.sort(np.linalg.eigvals(M).real)
    clusters: List[List[float]] = [[eig[0]]]
    for lam in eig[1:]:
        if abs(lam - clusters[-1][-1]) <= cluster_tol * max(1.0, abs(lam)):
            clusters[-1].append(lam)
        else:
            clusters.append([lam])
    bases, mus = [], []
    for cluster in clusters:
        mu = float(np.mean(cluster))
        K = np.linalg.matrix_power(M - mu * np.eye(r), r)
        _, _, Vh = np.linalg.svd(K)
        bases.append(Vh[-len(cluster):].T)
        mus.append(mu)
    V = np.column_stack(bases)
    Mv = np.linalg.solve(V, M @ V)
    blocks = []
    start = 0
    for basis, mu in zip(bases, mus):
        size = basis.shape[1]
        U = Mv[start:start + size, start:start + size] / mu
        N = U - np.eye(size)
        J = complex_structure(N)
        blocks.append(np.log(abs(mu)) * np.eye(size) + _log_unipotent(N) + np.pi * J)
        start += size
    return V @ scipy.linalg.block_diag(*blocks) @ np.linalg.inv(V)


def _polish_log(M: np.ndarray, G: np.ndarray, steps: int = 4) -> Tuple[np.ndarray, float]:
    """Newton corrections G + e^{-G} M - I, kept while max|e^G - M| shrinks."""
    err = float(np.abs(scipy.linalg.expm(G) - M).max())
    identity = np.eye(M.shape[0])
    for _ in range(steps):
        if err == 0.0:
            break
        trial = G + scipy.linalg.expm(-G) @ M - identity
        trial_err = float(np.abs(scipy.linalg.expm(trial) - M).max())
        if not trial_err < err:
            break
        G, err = trial, trial_err
    return G, err


def matrix_log(
    F: Union[Matrix, np.ndarray],
    want_real: Optional[bool] = None,
    tolerance: Optional[float] = None,
    negative: Optional[int] = None,
) -> np.ndarray:
    """G with expm(G) = F; real G when ``want_real``.

    For exact input the real-logarithm condition (even number of Jordan
    blocks of each size at every negative eigenvalue) is checked exactly and
    ``negative`` is counted; for arrays the caller may pass that count.
    Raises WitnessResidualError when max|expm(G) - F| exceeds
    ``tolerance * max(1, max|F|)``.
    """
    if isinstance(F, Matrix):
        F.require_square("logarithm argument")
        if determinant(F) == 0:
            raise SingularMatrixError("singular matrix has no logarithm")
        if want_real is None:
            want_real = F.field.is_real
        if want_real and not F.field.is_real:
            raise FieldMismatchError("real logarithm requested for a complex matrix")
        if want_real and not real_log_exists(F):
            raise NoRealLogarithmError("a negative eigenvalue has an odd number of Jordan blocks of some size")
        if want_real:
            negative = count_negative_real_eigenvalues(F)
        M = F.numeric
    else:
        M = np.asarray(F)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise NonSquareMatrixError(f"logarithm of a {M.shape} array")
        if want_real is None:
            want_real = not np.iscomplexobj(M)
        if want_real and np.iscomplexobj(M):
            if np.any(M.imag):
                raise FieldMismatchError("real logarithm requested for a complex matrix")
            M = M.real
        if _scaled_rank(M, 1e-12) < M.shape[0]:
            raise SingularMatrixError("singular matrix has no logarithm")

    if M.shape[0] == 0:
        return np.zeros((0, 0))
    if not want_real:
        M = M.astype(complex)
        G = scipy.linalg.logm(M)
    else:
        W, P, Nneg = split_negative_real(M, count=negative)
        if Nneg.shape[0] == 0:
            G = np.real(scipy.linalg.logm(M))
        else:
            parts = []
            if P.shape[0]:
                parts.append(np.real(scipy.linalg.logm(P)))
            parts.append(_log_negative_part(Nneg))
            G = W @ scipy.linalg.block_diag(*parts) @ np.linalg.inv(W)
    G, err = _polish_log(M, G)
    tolerance = settings.tolerance if tolerance is None else tolerance
    bound = tolerance * max(1.0, float(np.abs(M).max()))
    if err > bound:
        raise WitnessResidualError("expm of the computed logarithm misses the argument", residual=err, tolerance=bound)
    return G


def flow_witness(F: Union[Matrix, np.ndarray], epsilon: int = 1) -> Flow:
    """Witness for (1, [1]) + (eps F, 0) against (1, [1]) + (eps I, 0)."""
    if epsilon not in (1, -1):
        raise PreconditionError("epsilon must be +1 or -1")
    G = matrix_log(F)
    return Flow(dim=1 + G.shape[0], G=G, signature=(epsilon,) * G.shape[0])


# -------------------------------
# Verification
# -------------------------------
class ResidualReport(BaseModel):
    residual: float
    conjugacy_residual: float
    inverse_residual: float
    exact: bool
    samples: int
    seed: int
    box: float
    tolerance: float
    argmax: List[str] = Field(default_factory=list)
    passed: bool


def _exact_sample(rng: np.random.Generator, n: int, box: float, complex_field: bool) -> Tuple[Any, ...]:
    lim = int(round(box * 1000))

    def draw():
        return Fraction(int(rng.integers(-lim, lim + 1)), 1000)

    if complex_field:
        return tuple(ExactComplex(draw(), draw()) for _ in range(n))
    return tuple(draw() for _ in range(n))


def _numeric_sample(rng: np.random.Generator, n: int, box: float, complex_field: bool) -> np.ndarray:
    x = rng.uniform(-box, box, n)
    if complex_field:
        return x + 1j * rng.uniform(-box, box, n)
    return x


def _magnitude(x: Point) -> float:
    a = _as_array(x)
    return float(np.abs(a).max()) if a.size else 0.0


def _distance(u: Point, v: Point, floor: float = 1.0) -> float:
    """max-norm distance; relative to max(floor, |u|, |v|) for floating points."""
    if isinstance(u, np.ndarray) or isinstance(v, np.ndarray):
        a, b = _as_array(u), _as_array(v)
        if not a.size:
            return 0.0
        scale = max(floor, _magnitude(a), _magnitude(b))
        return float(np.abs(a - b).max()) / scale
    return float(max((abs(a - b) for a, b in zip(u, v)), default=0))


def _format_point(x: Point) -> List[str]:
    if isinstance(x, np.ndarray):
        return [repr(complex(v)) if np.iscomplexobj(x) else repr(float(v)) for v in x]
    return [format_scalar(v) for v in x]


def verify_conjugacy(
    f: AffineOperator,
    g: AffineOperator,
    h: Witness,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    tolerance: Optional[float] = None,
    box: Optional[float] = None,
) -> ResidualReport:
    """max |f(h(x)) - h(g(x))| and max |h^-1(h(x)) - x| over sampled points.

    Exact witnesses are replayed on rational points and must hit zero. For
    numeric witnesses each distance is relative to the largest point involved,
    floored at 1.
    """
    if not (f.n == g.n == h.dim):
        raise DimensionMismatchError(f"dimensions f={f.n}, g={g.n}, witness={h.dim}")
    samples = settings.samples if samples is None else samples
    seed = settings.seed if seed is None else seed
    tolerance = settings.tolerance if tolerance is None else tolerance
    box = settings.sample_box if box is None else box
    if samples < 1:
        raise PreconditionError("samples must be at least 1")

    complex_field = not (f.field.is_real and g.field.is_real)
    exact = h.exact
    rng = np.random.default_rng(seed)
    worst_conj, worst_inv, worst_at = 0.0, 0.0, None
    for _ in range(samples):
        x = _exact_sample(rng, f.n, box, complex_field) if exact else _numeric_sample(rng, f.n, box, complex_field)
        hx = h.forward(x)
        conj = _distance(f(hx), h.forward(g(x)))
        inv = _distance(h.inverse(hx), x, floor=1.0 if exact else max(1.0, _magnitude(hx)))
        if worst_at is None or conj > worst_conj:
            worst_conj, worst_at = conj, x
        worst_inv = max(worst_inv, inv)
    residual = max(worst_conj, worst_inv)
    report = ResidualReport(
        residual=residual,
        conjugacy_residual=worst_conj,
        inverse_residual=worst_inv,
        exact=exact,
        samples=samples,
        seed=seed,
        box=box,
        tolerance=tolerance,
        argmax=_format_point(worst_at),
        passed=residual == 0 if exact else residual <= tolerance,
    )
    logger.info("verify_conjugacy: residual=%.3e exact=%s samples=%d", residual, exact, samples)
    return report


# -------------------------------
# No-fixed-point pipeline
# -------------------------------
def nofix_pipeline(f: AffineOperator, **options: Any):
    """Run the reduction graph; returns a PipelineResult (witness, canonical, form, residual)."""
    from affine_conjugacy.orchestrator.orchestrator import run_pipeline

    return run_pipeline(f, **options)
