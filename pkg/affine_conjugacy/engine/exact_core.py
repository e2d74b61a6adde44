"""Exact scalars and univariate polynomials over Q and Q(i).

Rational entries are ``fractions.Fraction`` (reduced eagerly by the
standard library); Gaussian rationals are :class:`ExactComplex`.
Polynomials store coefficients lowest degree first.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, List, Sequence, Tuple, Union

from affine_conjugacy.engine.errors import FieldMismatchError, ParseError, PreconditionError

logger = logging.getLogger(__name__)

ExactScalar = Fraction


# -------------------------------
# Gaussian rationals
# -------------------------------
@dataclass(frozen=True, eq=False)
class ExactComplex:
    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @staticmethod
    def lift(value) -> "ExactComplex":
        if isinstance(value, ExactComplex):
            return value
        if isinstance(value, (int, Fraction)):
            return ExactComplex(Fraction(value))
        raise TypeError(f"cannot lift {type(value).__name__} to ExactComplex")

    def _coerce(self, other):
        if isinstance(other, ExactComplex):
            return other
        if isinstance(other, (int, Fraction)):
            return ExactComplex(Fraction(other))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ExactComplex(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ExactComplex(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ExactComplex(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        den = o.norm()
        if den == 0:
            raise ZeroDivisionError("division by exact zero")
        return ExactComplex(
            (self.re * o.re + self.im * o.im) / den,
            (self.im * o.re - self.re * o.im) / den,
        )

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __neg__(self):
        return ExactComplex(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return ExactComplex(1) / (self ** (-k))
        result, base = ExactComplex(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        # agrees with hash(Fraction) on the real line
        return hash(self.re) if self.im == 0 else hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self) -> float:
        return math.hypot(float(self.re), float(self.im))

    def conjugate(self) -> "ExactComplex":
        return ExactComplex(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def __str__(self):
        return format_complex(self)

    def __repr__(self):
        return f"ExactComplex({format_complex(self)!r})"


Scalar = Union[Fraction, ExactComplex]


# -------------------------------
# Text formats
# -------------------------------
def parse_scalar(text: str) -> Fraction:
    """Parse ``p/q`` (or an integer / finite decimal) into a reduced Fraction."""
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"invalid rational scalar {text!r}") from exc


def parse_complex(text: str) -> ExactComplex:
    """Parse ``p/q+r/s i`` and its short forms (``2i``, ``-i``, ``1/2``)."""
    s = str(text).replace(" ", "").replace("*", "")
    if not s:
        raise ParseError("empty scalar")
    if not s.endswith(("i", "j")):
        return ExactComplex(parse_scalar(s))
    body = s[:-1]
    split = -1
    for k in range(len(body) - 1, 0, -1):
        if body[k] in "+-" and body[k - 1] not in "eE/":
            split = k
            break
    re_part, im_part = (body[:split], body[split:]) if split > 0 else ("", body)
    if im_part in ("", "+"):
        im = Fraction(1)
    elif im_part == "-":
        im = Fraction(-1)
    else:
        im = parse_scalar(im_part)
    re = parse_scalar(re_part) if re_part else Fraction(0)
    return ExactComplex(re, im)


def format_scalar(value) -> str:
    if isinstance(value, ExactComplex):
        return format_complex(value)
    return str(Fraction(value))


def format_complex(z: ExactComplex) -> str:
    if z.im == 0:
        return str(z.re)
    if z.re == 0:
        return f"{z.im} i"
    sign = "+" if z.im > 0 else "-"
    return f"{z.re}{sign}{abs(z.im)} i"


# -------------------------------
# Ground fields
# -------------------------------
class GroundField(str, enum.Enum):
    """Q stands in for R, Q(i) for C."""

    Q = "Q"
    QI = "Qi"

    @classmethod
    def parse(cls, tag) -> "GroundField":
        if isinstance(tag, GroundField):
            return tag
        key = str(tag).strip().upper()
        if key in ("Q", "R"):
            return cls.Q
        if key in ("QI", "C"):
            return cls.QI
        raise ParseError(f"unknown field tag {tag!r}")

    @property
    def label(self) -> str:
        return "R" if self is GroundField.Q else "C"

    @property
    def is_real(self) -> bool:
        return self is GroundField.Q

    def zero(self) -> Scalar:
        return Fraction(0) if self.is_real else ExactComplex(0)

    def one(self) -> Scalar:
        return Fraction(1) if self.is_real else ExactComplex(1)

    def coerce(self, value) -> Scalar:
        if isinstance(value, str):
            value = parse_complex(value)
        elif isinstance(value, float):
            value = Fraction(repr(value))
        elif isinstance(value, complex):
            value = ExactComplex(Fraction(repr(value.real)), Fraction(repr(value.imag)))
        if self.is_real:
            if isinstance(value, ExactComplex):
                if not value.is_real:
                    raise FieldMismatchError(f"complex scalar {value} in a real (Q) context")
                return value.re
            return Fraction(value)
        return ExactComplex.lift(value)

    @staticmethod
    def join(*fields: "GroundField") -> "GroundField":
        return GroundField.QI if any(f is GroundField.QI for f in fields) else GroundField.Q

    @staticmethod
    def infer(values: Iterable[Scalar]) -> "GroundField":
        for v in values:
            if isinstance(v, ExactComplex) and not v.is_real:
                return GroundField.QI
        return GroundField.Q


def conj(value: Scalar) -> Scalar:
    return value.conjugate() if isinstance(value, ExactComplex) else value


# -------------------------------
# Polynomials
# -------------------------------
@dataclass(frozen=True)
class Poly:
    coeffs: Tuple[Scalar, ...]
    field: GroundField = GroundField.Q

    def __post_init__(self):
        cs = [self.field.coerce(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    # ---- constructors ----
    @classmethod
    def x(cls, field: GroundField = GroundField.Q) -> "Poly":
        return cls((0, 1), field)

    @classmethod
    def constant(cls, c, field: GroundField = GroundField.Q) -> "Poly":
        return cls((c,), field)

    @classmethod
    def monomial(cls, k: int, c=1, field: GroundField = GroundField.Q) -> "Poly":
        return cls((0,) * k + (c,), field)

    @classmethod
    def from_roots(cls, roots: Sequence, field: GroundField = GroundField.Q) -> "Poly":
        p = cls.constant(1, field)
        for r in roots:
            p = p * cls((-field.coerce(r), 1), field)
        return p

    # ---- shape ----
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> Scalar:
        return self.coeffs[-1] if self.coeffs else self.field.zero()

    def coeff(self, k: int) -> Scalar:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else self.field.zero()

    # ---- arithmetic ----
    def _other(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction, ExactComplex)):
            field = GroundField.join(self.field, GroundField.infer([ExactComplex.lift(other)]))
            return Poly.constant(other, field)
        return NotImplemented

    def _with(self, coeffs, other: "Poly") -> "Poly":
        return Poly(tuple(coeffs), GroundField.join(self.field, other.field))

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        n = max(len(self.coeffs), len(o.coeffs))
        return self._with((self.coeff(k) + o.coeff(k) for k in range(n)), o)

    __radd__ = __add__

    def __neg__(self):
        return Poly(tuple(-c for c in self.coeffs), self.field)

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        if self.is_zero() or o.is_zero():
            return self._with((), o)
        out = [GroundField.join(self.field, o.field).zero()] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(o.coeffs):
                out[i + j] = out[i + j] + a * b
        return self._with(out, o)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result, base = Poly.constant(1, self.field), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __divmod__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        if o.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        field = GroundField.join(self.field, o.field)
        rem = [field.coerce(c) for c in self.coeffs]
        dq = o.degree()
        lead = o.leading()
        quot = [field.zero()] * max(len(rem) - dq, 0)
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k]
            if c == 0:
                continue
            t = c / lead
            quot[k - dq] = t
            for j, b in enumerate(o.coeffs):
                rem[k - dq + j] = rem[k - dq + j] - t * b
        return Poly(tuple(quot), field), Poly(tuple(rem[:dq]) if dq > 0 else (), field)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def divides(self, other: "Poly") -> bool:
        return (other % self).is_zero()

    # ---- derived polynomials ----
    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        lead = self.leading()
        return Poly(tuple(c / lead for c in self.coeffs), self.field)

    def derivative(self) -> "Poly":
        return Poly(tuple(k * c for k, c in enumerate(self.coeffs) if k > 0), self.field)

    def __call__(self, value):
        acc = value * 0
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc

    evaluate = __call__

    def conj(self) -> "Poly":
        return Poly(tuple(conj(c) for c in self.coeffs), self.field)

    def reciprocal(self) -> "Poly":
        """x^d * conj(p)(1/x); a root z of p maps to 1/conj(z)."""
        return Poly(tuple(conj(c) for c in reversed(self.coeffs)), self.field)

    def is_real(self) -> bool:
        return all(not isinstance(c, ExactComplex) or c.is_real for c in self.coeffs)

    def to_field(self, field: GroundField) -> "Poly":
        return Poly(self.coeffs, field)

    # ---- text ----
    def coefficient_strings(self) -> List[str]:
        return [format_scalar(c) for c in self.coeffs]

    def __str__(self):
        if self.is_zero():
            return "0"
        terms = []
        for k in range(self.degree(), -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            if isinstance(c, ExactComplex) and not c.is_real:
                body = f"({format_complex(c)})"
                sign = "+"
            else:
                real = c.re if isinstance(c, ExactComplex) else c
                sign = "-" if real < 0 else "+"
                body = str(abs(real))
                if body == "1" and k > 0:
                    body = ""
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            term = body + ("*" if body and mono else "") + mono
            terms.append((sign, term))
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, term in terms[1:]:
            out += f" {sign} {term}"
        return out


def poly_gcd(p: Poly, q: Poly) -> Poly:
    """Monic gcd; gcd(p, 0) is monic(p)."""
    a, b = p, q
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def squarefree_decompose(p: Poly) -> List[Tuple[Poly, int]]:
    """Yun's algorithm: monic pairwise coprime square-free factors with multiplicities."""
    if p.is_zero():
        raise PreconditionError("square-free decomposition of the zero polynomial")
    f = p.monic()
    if f.degree() <= 0:
        return []
    fp = f.derivative()
    a = poly_gcd(f, fp)
    b = f // a
    c = fp // a
    d = c - b.derivative()
    out: List[Tuple[Poly, int]] = []
    i = 1
    while b.degree() > 0:
        a = poly_gcd(b, d)
        b = b // a
        c = d // a
        d = c - b.derivative()
        if a.degree() > 0:
            out.append((a, i))
        i += 1
    return out


def squarefree_part(p: Poly) -> Poly:
    if p.is_zero():
        raise PreconditionError("square-free part of the zero polynomial")
    return p.monic() // poly_gcd(p, p.derivative())


def is_squarefree(p: Poly) -> bool:
    return not p.is_zero() and poly_gcd(p, p.derivative()).degree() == 0


@lru_cache(maxsize=None)
def cyclotomic(k: int) -> Poly:
    """Phi_k = (x^k - 1) / prod_{d | k, d < k} Phi_d, over Q."""
    if k < 1:
        raise ValueError("cyclotomic index must be positive")
    p = Poly.monomial(k) - 1
    for d in range(1, k):
        if k % d == 0:
            p = p // cyclotomic(d)
    return p
