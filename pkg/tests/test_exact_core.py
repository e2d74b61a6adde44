from fractions import Fraction

import pytest

from affine_conjugacy.engine.errors import FieldMismatchError, ParseError
from affine_conjugacy.engine.exact_core import (
    ExactComplex,
    GroundField,
    Poly,
    cyclotomic,
    format_scalar,
    is_squarefree,
    parse_complex,
    parse_scalar,
    poly_gcd,
    squarefree_decompose,
)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("3/4", ExactComplex(Fraction(3, 4))),
        ("2i", ExactComplex(0, 2)),
        ("-i", ExactComplex(0, -1)),
        ("1+i", ExactComplex(1, 1)),
        ("1/2-3/4 i", ExactComplex(Fraction(1, 2), Fraction(-3, 4))),
        ("0.25", ExactComplex(Fraction(1, 4))),
    ],
)
def test_parse_complex(text, expected):
    assert parse_complex(text) == expected


def test_parse_scalar_rejects_garbage():
    with pytest.raises(ParseError):
        parse_scalar("two")
    with pytest.raises(ParseError):
        parse_scalar("1/0")


def test_format_scalar():
    assert format_scalar(Fraction(-6, 4)) == "-3/2"
    assert format_scalar(ExactComplex(0, 2)) == "2 i"
    assert format_scalar(ExactComplex(1, -1)) == "1-1 i"
    assert parse_complex(format_scalar(ExactComplex(Fraction(1, 3), Fraction(-2, 5)))) == ExactComplex(
        Fraction(1, 3), Fraction(-2, 5)
    )


def test_exact_complex_arithmetic():
    z = ExactComplex(1, 2) * ExactComplex(3, -1)
    assert z == ExactComplex(5, 5)
    assert z / ExactComplex(3, -1) == ExactComplex(1, 2)
    assert ExactComplex(0, 1) ** 2 == -1
    assert ExactComplex(3, 4).norm() == 25
    assert ExactComplex(2, 0) == Fraction(2)


def test_ground_field_tags():
    assert GroundField.parse("R") is GroundField.Q
    assert GroundField.parse("c") is GroundField.QI
    assert GroundField.Q.label == "R"
    with pytest.raises(ParseError):
        GroundField.parse("Z")
    with pytest.raises(FieldMismatchError):
        GroundField.Q.coerce("1+i")
    assert GroundField.Q.coerce(ExactComplex(5, 0)) == Fraction(5)


def test_poly_arithmetic_and_text():
    x = Poly.x()
    p = (x - 1) * (x + 1)
    assert p == Poly((-1, 0, 1))
    q, r = divmod(x ** 3 + 2, x - 1)
    assert q == x ** 2 + x + 1
    assert r == Poly((3,))
    assert str(x ** 2 - Fraction(6, 5) * x + 1) == "x^2 - 6/5*x + 1"
    assert poly_gcd(p, (x - 1) ** 2) == x - 1


def test_squarefree_decompose():
    x = Poly.x()
    parts = squarefree_decompose((x - 1) ** 2 * (x + 2))
    assert parts == [(x + 2, 1), (x - 1, 2)]
    assert not is_squarefree((x - 1) ** 2)
    assert is_squarefree(x ** 2 + 1)


@pytest.mark.parametrize(
    "k, coeffs",
    [(1, (-1, 1)), (2, (1, 1)), (3, (1, 1, 1)), (4, (1, 0, 1)), (6, (1, -1, 1)), (12, (1, 0, -1, 0, 1))],
)
def test_cyclotomic(k, coeffs):
    assert cyclotomic(k) == Poly(coeffs)


def test_reciprocal_maps_roots_to_inverse_conjugates():
    x = Poly.x(GroundField.QI)
    p = x - parse_complex("2i")
    r = p.reciprocal()
    assert r(parse_complex("1/2 i")) == 0
    q = Poly.from_roots([2, Fraction(1, 2)])
    assert q.reciprocal().monic() == q.monic()


def _random_poly(rng, max_degree, field=GroundField.Q):
    degree = int(rng.integers(0, max_degree + 1))
    coeffs = [int(c) for c in rng.integers(-3, 4, size=degree + 1)]
    coeffs[-1] = coeffs[-1] or 1
    return Poly(tuple(coeffs), field)


def _random_gaussian(rng):
    re, im = rng.integers(-5, 6, size=2)
    den_re, den_im = rng.integers(1, 4, size=2)
    return ExactComplex(Fraction(int(re), int(den_re)), Fraction(int(im), int(den_im)))


def test_gcd_scales_with_common_factor(rng):
    for _ in range(60):
        p, q, r = (_random_poly(rng, 4) for _ in range(3))
        if p.is_zero() or q.is_zero() or r.is_zero():
            continue
        assert poly_gcd(p * r, q * r) == r.monic() * poly_gcd(p, q)


def test_squarefree_factors_reassemble(rng):
    for _ in range(60):
        p = _random_poly(rng, 3) * _random_poly(rng, 2) ** 2 * _random_poly(rng, 1) ** 3
        parts = squarefree_decompose(p)
        product = Poly.constant(1)
        for factor, multiplicity in parts:
            assert is_squarefree(factor)
            product = product * factor ** multiplicity
        assert product == p.monic()
        for i, (a, _) in enumerate(parts):
            for b, _ in parts[i + 1:]:
                assert poly_gcd(a, b).degree() == 0


def test_gaussian_rationals_form_a_field(rng):
    zero, one = ExactComplex(0), ExactComplex(1)
    for _ in range(100):
        a, b, c = (_random_gaussian(rng) for _ in range(3))
        assert a + b == b + a
        assert a * b == b * a
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + zero == a and a * one == a
        assert a + (-a) == zero
        assert (a * b).conjugate() == a.conjugate() * b.conjugate()
        if a:
            assert a * (one / a) == one
            assert (b / a) * a == b
