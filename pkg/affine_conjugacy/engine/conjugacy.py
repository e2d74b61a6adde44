"""Topological classification of affine operators f(x) = Ax + b.

Dispatch:
  * both operators have a fixed point  -> compare linear parts (hyperbolic
    strata by size and orientation, unit-circle part by Jordan structure,
    nilpotent part by similarity);
  * exactly one has a fixed point      -> never conjugate;
  * neither has a fixed point          -> compare nilpotent parts of the
    Fitting split and, over R, the sign of det of the nonsingular part.
"""

from __future__ import annotations

import enum
import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Annotated, Any, Dict, List, Literal, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, Field, TypeAdapter, model_validator

from affine_conjugacy.engine.errors import (
    DimensionMismatchError,
    FieldMismatchError,
    InternalConsistencyError,
    NotRealizableError,
    RootOfUnityError,
    SingularMatrixError,
)
from affine_conjugacy.engine.exact_core import ExactComplex, GroundField, Poly, format_scalar, parse_complex
from affine_conjugacy.engine.linalg import AffineOperator, Matrix, Vector, charpoly, determinant, rank, solve
from affine_conjugacy.engine.spectral_analysis import (
    approximate_roots,
    determinant_sign,
    factor_key,
    fitting_split,
    irreducible_factors,
    modulus_counts,
    modulus_partition,
    root_of_unity_factor,
    similar,
    unit_circle_factors,
)
from affine_conjugacy.engine.structure import (
    JordanBlockSpec,
    SegreCharacteristic,
    block_structure_at_factor,
    companion_jordan_block,
    jordan_block,
    nilpotent_jordan_matrix,
    realify,
    segre_of_nilpotent,
)

logger = logging.getLogger(__name__)

FieldLabel = Literal["R", "C"]


# -------------------------------
# Public models
# -------------------------------
class Reason(str, enum.Enum):
    FIXED_POINT_MISMATCH = "FIXED_POINT_MISMATCH"
    NILPOTENT_MISMATCH = "NILPOTENT_MISMATCH"
    ORIENTATION_MISMATCH = "ORIENTATION_MISMATCH"
    SIZE_MISMATCH = "SIZE_MISMATCH"
    UNIT_PART_MISMATCH = "UNIT_PART_MISMATCH"
    CONJUGATE = "CONJUGATE"


class Verdict(BaseModel):
    conjugate: bool
    reason: Reason
    field: FieldLabel
    evidence: Dict[str, Any] = Field(default_factory=dict)


class NoFixedPointForm(BaseModel):
    """x -> (I_k + [-1]? + J0) x + e1."""

    kind: Literal["NoFixedPoint"] = "NoFixedPoint"
    field: FieldLabel
    k: int = Field(ge=1)
    epsilon: Literal[1, -1] = 1
    segre: List[int] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check(self):
        if self.field == "C" and self.epsilon == -1:
            raise ValueError("epsilon = -1 only occurs over R")
        if any(s < 1 for s in self.segre):
            raise ValueError("segre sizes must be positive")
        self.segre = sorted(self.segre, reverse=True)
        return self

    @property
    def n(self) -> int:
        return self.k + sum(self.segre) + (1 if self.epsilon == -1 else 0)


class FixedPointLinearForm(BaseModel):
    kind: Literal["FixedPointLinear"] = "FixedPointLinear"
    field: FieldLabel
    summands: List[JordanBlockSpec] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check(self):
        if self.field == "R":
            for value in ("-1/2", "-2"):
                if sum(s.count for s in self.summands if s.eigenvalue == value) > 1:
                    raise ValueError(f"at most one [{value}] summand over R")
        return self

    @property
    def n(self) -> int:
        total = 0
        for s in self.summands:
            width = 2 if s.realified else 1
            total += s.size * s.count * width
        return total


CanonicalForm = Annotated[Union[NoFixedPointForm, FixedPointLinearForm], Field(discriminator="kind")]
canonical_form_adapter: TypeAdapter = TypeAdapter(CanonicalForm)


def _label(field: GroundField) -> FieldLabel:
    return field.label  # type: ignore[return-value]


def coerce_operator(f: AffineOperator, field: GroundField | str) -> AffineOperator:
    """Embed a Q operator into Q(i) (or restrict a real-valued Q(i) one back)."""
    return f.coerce(field)


# -------------------------------
# Fixed points
# -------------------------------
def fixed_point(f: AffineOperator) -> Optional[Vector]:
    """A solution of (A - I)x = -b, or None."""
    shifted = f.A - Matrix.identity(f.n, f.field)
    return solve(shifted, tuple(-v for v in f.b))


def corollary_check(f: AffineOperator) -> bool:
    """1 is an eigenvalue of A and (A - I)x = -b is inconsistent."""
    shifted = f.A - Matrix.identity(f.n, f.field)
    has_one = determinant(shifted) == 0
    inconsistent = solve(shifted, tuple(-v for v in f.b)) is None
    result = has_one and inconsistent
    if result != (fixed_point(f) is None):
        raise InternalConsistencyError("fixed-point test and eigenvalue-1 criterion disagree")
    return result


def orientation(f: AffineOperator) -> int:
    """+1 if f preserves orientation, -1 if it reverses it."""
    if not f.field.is_real:
        return 1
    sign = determinant_sign(f.A)
    if sign == 0:
        raise SingularMatrixError("orientation is only defined for bijective operators")
    return sign


# -------------------------------
# Linear invariants
# -------------------------------
@dataclass(frozen=True)
class UnitBlocks:
    factor: Poly
    unit_roots: int
    blocks: Tuple[Tuple[int, int], ...]

    @property
    def key(self):
        return factor_key(self.factor)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "factor": str(self.factor),
            "unit_roots": self.unit_roots,
            "blocks": [list(b) for b in self.blocks],
        }


@dataclass(frozen=True)
class LinearInvariants:
    field: GroundField
    nilpotent: Matrix
    segre: SegreCharacteristic
    n01: int
    n1: int
    n1inf: int
    det01_sign: Optional[int]
    det1inf_sign: Optional[int]
    unit_part: Tuple[UnitBlocks, ...]

    def unit_signature(self):
        return tuple((u.key, u.unit_roots, u.blocks) for u in self.unit_part)

    def evidence(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "segre": self.segre.to_list(),
            "n01": self.n01,
            "n1": self.n1,
            "n1inf": self.n1inf,
            "unit_part": [u.to_dict() for u in self.unit_part],
        }
        if self.field.is_real:
            out["det01_sign"] = self.det01_sign
            out["det1inf_sign"] = self.det1inf_sign
        return out


def check_roots_of_unity(A: Matrix) -> None:
    # over Q(i) the test runs on the realification, whose charpoly is p * conj(p)
    p = charpoly(A if A.field.is_real else realify(A))
    hit = root_of_unity_factor(p, p.degree())
    if hit is not None:
        raise RootOfUnityError(hit[0])


def _unit_part(M: Matrix) -> Tuple[UnitBlocks, ...]:
    out = []
    for q, _, u in unit_circle_factors(charpoly(M)):
        out.append(UnitBlocks(q, u, tuple(block_structure_at_factor(M, q))))
    return tuple(sorted(out, key=lambda ub: ub.key))


def linear_invariants(A: Matrix) -> LinearInvariants:
    A.require_square("linear part")
    check_roots_of_unity(A)
    part = modulus_partition(charpoly(A))
    fit = fitting_split(A)
    return LinearInvariants(
        field=A.field,
        nilpotent=fit.nilpotent_part,
        segre=segre_of_nilpotent(fit.nilpotent_part),
        n01=part.n01,
        n1=part.n1,
        n1inf=part.n1inf,
        det01_sign=part.det01_sign,
        det1inf_sign=part.det1inf_sign,
        unit_part=_unit_part(A if A.field.is_real else realify(A)),
    )


def _resolve_field(A: Matrix, B: Matrix, field) -> Tuple[Matrix, Matrix, GroundField]:
    if field is None:
        if A.field is not B.field:
            raise FieldMismatchError(f"operators over {A.field.label} and {B.field.label}; coerce explicitly")
        return A, B, A.field
    f = GroundField.parse(field)
    return A.coerce(f), B.coerce(f), f


# -------------------------------
# Linear decision and canonical form
# -------------------------------
def decide_linear(A: Matrix, B: Matrix, field: GroundField | str | None = None) -> Verdict:
    A, B, f = _resolve_field(A, B, field)
    if A.rows != B.rows:
        raise DimensionMismatchError(f"linear parts of size {A.rows} and {B.rows}")
    ia, ib = linear_invariants(A), linear_invariants(B)
    evidence = {"A": ia.evidence(), "B": ib.evidence()}

    def verdict(reason: Reason) -> Verdict:
        return Verdict(conjugate=reason is Reason.CONJUGATE, reason=reason, field=_label(f), evidence=evidence)

    if not similar(ia.nilpotent, ib.nilpotent):
        return verdict(Reason.NILPOTENT_MISMATCH)
    if (ia.n01, ia.n1inf) != (ib.n01, ib.n1inf):
        return verdict(Reason.SIZE_MISMATCH)
    if ia.unit_signature() != ib.unit_signature():
        return verdict(Reason.UNIT_PART_MISMATCH)
    if f.is_real and (ia.det01_sign, ia.det1inf_sign) != (ib.det01_sign, ib.det1inf_sign):
        return verdict(Reason.ORIENTATION_MISMATCH)
    return verdict(Reason.CONJUGATE)


def _format_root(z: complex) -> str:
    return f"{z.real:.15g}{z.imag:+.15g}i"


def _upper_unit_roots(q: Poly, how_many: int) -> Tuple[str, ...]:
    roots = [z for z in approximate_roots(q) if z.imag > 0]
    roots.sort(key=lambda z: (abs(abs(z) - 1.0), -z.imag))
    chosen = sorted(roots[:how_many], key=lambda z: z.real)
    return tuple(_format_root(z) for z in chosen)


def canonical_linear(A: Matrix, field: GroundField | str | None = None) -> FixedPointLinearForm:
    if field is not None:
        A = A.coerce(field)
    inv = linear_invariants(A)
    real = A.field.is_real
    summands: List[JordanBlockSpec] = []

    for size, count in sorted(Counter(inv.segre.sizes).items(), reverse=True):
        summands.append(JordanBlockSpec(eigenvalue="0", size=size, count=count))

    def scalar_blocks(small: str, n_stratum: int, sign: Optional[int]):
        if n_stratum == 0:
            return
        rest = n_stratum
        if real and sign == -1:
            summands.append(JordanBlockSpec(eigenvalue=f"-{small}", size=1, count=1))
            rest -= 1
        if rest:
            summands.append(JordanBlockSpec(eigenvalue=small, size=1, count=rest))

    scalar_blocks("1/2", inv.n01, inv.det01_sign)
    for ub in inv.unit_part:
        pairs = ub.unit_roots // 2
        approx = _upper_unit_roots(ub.factor, pairs)
        for size, count in ub.blocks:
            summands.append(
                JordanBlockSpec(
                    factor=tuple(ub.factor.coefficient_strings()),
                    factor_text=str(ub.factor),
                    realified=real,
                    size=size,
                    count=count * pairs,
                    approx=approx,
                )
            )
    scalar_blocks("2", inv.n1inf, inv.det1inf_sign)
    return FixedPointLinearForm(field=_label(A.field), summands=summands)


# -------------------------------
# Affine decision and canonical form
# -------------------------------
def canonical_affine(f: AffineOperator) -> Union[NoFixedPointForm, FixedPointLinearForm]:
    if fixed_point(f) is not None:
        return canonical_linear(f.A)
    fit = fitting_split(f.A)
    segre = segre_of_nilpotent(fit.nilpotent_part)
    eps = determinant_sign(fit.nonsingular_part) if f.field.is_real else 1
    k = f.n - segre.total - (1 if eps == -1 else 0)
    if k < 1:
        raise InternalConsistencyError(f"operator without fixed point produced k = {k}")
    return NoFixedPointForm(field=_label(f.field), k=k, epsilon=eps, segre=segre.to_list())


def _affine_evidence(f: AffineOperator, p: Optional[Vector]) -> Dict[str, Any]:
    out: Dict[str, Any] = {"fixed_point": None if p is None else [format_scalar(v) for v in p]}
    if p is None:
        fit = fitting_split(f.A)
        out["segre"] = segre_of_nilpotent(fit.nilpotent_part).to_list()
        if f.field.is_real:
            out["core_det_sign"] = determinant_sign(fit.nonsingular_part)
    return out


def decide_affine(f: AffineOperator, g: AffineOperator) -> Verdict:
    if f.field is not g.field:
        raise FieldMismatchError(f"operators over {f.field.label} and {g.field.label}; coerce explicitly")
    if f.n != g.n:
        raise DimensionMismatchError(f"operators of dimension {f.n} and {g.n}")
    label = _label(f.field)
    pf, pg = fixed_point(f), fixed_point(g)
    if pf is not None and pg is not None:
        return decide_linear(f.A, g.A)
    evidence = {"f": _affine_evidence(f, pf), "g": _affine_evidence(g, pg)}
    if (pf is None) != (pg is None):
        return Verdict(conjugate=False, reason=Reason.FIXED_POINT_MISMATCH, field=label, evidence=evidence)
    ff, fg = fitting_split(f.A), fitting_split(g.A)
    if not similar(ff.nilpotent_part, fg.nilpotent_part):
        return Verdict(conjugate=False, reason=Reason.NILPOTENT_MISMATCH, field=label, evidence=evidence)
    if f.field.is_real and determinant_sign(ff.nonsingular_part) != determinant_sign(fg.nonsingular_part):
        return Verdict(conjugate=False, reason=Reason.ORIENTATION_MISMATCH, field=label, evidence=evidence)
    return Verdict(conjugate=True, reason=Reason.CONJUGATE, field=label, evidence=evidence)


# -------------------------------
# Realization of canonical forms
# -------------------------------
def _unit_summand_blocks(summand: JordanBlockSpec, field: GroundField) -> List[Matrix]:
    q = Poly(tuple(parse_complex(c) for c in summand.factor or ()), GroundField.Q)
    unit_roots = modulus_counts(q)[2]
    pairs = unit_roots // 2
    if pairs == 0 or summand.count % pairs:
        raise NotRealizableError(f"count {summand.count} does not match the {unit_roots} unit roots of {q}")
    per_root = summand.count // pairs
    if field.is_real:
        if unit_roots != q.degree():
            raise NotRealizableError(f"{q} has roots off the unit circle; no rational realization")
        return [companion_jordan_block(q, summand.size)] * per_root
    upper = []
    for lin, _ in irreducible_factors(q.to_field(GroundField.QI)):
        if lin.degree() != 1:
            continue
        mu = -lin.coeff(0)
        if isinstance(mu, ExactComplex) and mu.im > 0 and mu.norm() == 1:
            upper.append(mu)
    if len(upper) != pairs:
        raise NotRealizableError(f"unit roots of {q} are not Gaussian rationals")
    return [jordan_block(mu, summand.size, GroundField.QI) for mu in upper for _ in range(per_root)]


def realize(form: Union[NoFixedPointForm, FixedPointLinearForm]) -> AffineOperator:
    """The literal operator a canonical form describes."""
    field = GroundField.parse(form.field)
    if isinstance(form, NoFixedPointForm):
        blocks = [Matrix.identity(form.k, field)]
        if form.epsilon == -1:
            blocks.append(Matrix.diag([-1], field))
        blocks.append(nilpotent_jordan_matrix(form.segre, field))
        A = Matrix.direct_sum(*blocks, field=field)
        b = tuple(1 if i == 0 else 0 for i in range(A.rows))
        return AffineOperator(A, b)
    blocks = []
    for summand in form.summands:
        if summand.factor is not None:
            blocks.extend(_unit_summand_blocks(summand, field))
        else:
            lam = parse_complex(summand.eigenvalue or "0")
            blocks.extend(jordan_block(lam, summand.size, field) for _ in range(summand.count))
    A = Matrix.direct_sum(*blocks, field=field)
    return AffineOperator(A, (0,) * A.rows)


def rank_sequence(f: AffineOperator) -> List[int]:
    """dim image(A^i) for i = 1..n."""
    return [rank(f.A.power(i)) for i in range(1, f.n + 1)]
