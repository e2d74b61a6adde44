from fractions import Fraction

import numpy as np
import pytest

from affine_conjugacy.engine.exact_core import GroundField, Poly
from affine_conjugacy.engine.linalg import Matrix, charpoly
from affine_conjugacy.engine.spectral_analysis import (
    approximate_roots,
    count_negative_real_eigenvalues,
    count_real_roots,
    count_roots_on_unit_circle,
    determinant_sign,
    fitting_split,
    invariant_factors,
    irreducible_factors,
    modulus_counts,
    modulus_partition,
    multiplicity_count,
    real_log_exists,
    root_of_unity_factor,
    similar,
    spectral_split,
    unit_circle_factors,
)
from affine_conjugacy.engine.structure import jordan_block

x = Poly.x()
ROTATION = Matrix.from_rows([["3/5", "-4/5"], ["4/5", "3/5"]])
SALEM_FREE = x ** 2 - Fraction(6, 5) * x + 1


def test_count_real_roots():
    assert count_real_roots(x ** 2 - 2) == 2
    assert count_real_roots(x ** 2 - 2, Fraction(0), None) == 1
    assert count_real_roots(x ** 2 + 1) == 0
    # endpoints are excluded
    assert count_real_roots((x - 1) * (x + 1), Fraction(-1), Fraction(1)) == 0
    assert multiplicity_count((x + Fraction(1, 2)) ** 2 * (x + 3), Fraction(-1), Fraction(0)) == 2


@pytest.mark.parametrize(
    "p, expected",
    [
        ((x - Fraction(1, 2)) * (x - 2), (0, 1, 0, 1)),
        (x ** 3, (3, 0, 0, 0)),
        (SALEM_FREE, (0, 0, 2, 0)),
        (x * (x - Fraction(1, 2)) * (x - 3) * (x ** 2 + 1), (1, 1, 2, 1)),
        (x ** 2 - 3 * x + 1, (0, 1, 0, 1)),
        ((x + 1) ** 2 * (x - 1), (0, 0, 3, 0)),
        (x ** 2 + Fraction(1, 4), (0, 2, 0, 0)),
        (x ** 2 + 4, (0, 0, 0, 2)),
    ],
)
def test_modulus_counts(p, expected):
    assert modulus_counts(p) == expected


def test_modulus_counts_complex_coefficients():
    i = GroundField.QI.coerce("i")
    p = Poly((-2 * i, 1), GroundField.QI) * Poly((Fraction(-1, 3), 1), GroundField.QI)
    assert modulus_counts(p) == (0, 1, 0, 1)


def test_modulus_counts_agree_with_numpy(rng):
    checked = 0
    while checked < 500:
        degree = int(rng.integers(1, 9))
        coeffs = [int(c) for c in rng.integers(-6, 7, size=degree + 1)]
        if coeffs[-1] == 0:
            coeffs[-1] = 1
        p = Poly(tuple(coeffs))
        roots = np.abs(np.roots(list(reversed(coeffs))))
        n0, n01, n1, n1inf = modulus_counts(p)
        if n1:
            assert np.sum(np.abs(roots - 1.0) < 1e-3) >= n1
            continue
        if np.any(np.abs(roots - 1.0) < 1e-6):
            continue
        assert n0 + n01 == int(np.sum(roots < 1.0))
        assert n1inf == int(np.sum(roots > 1.0))
        checked += 1


def test_count_roots_on_unit_circle():
    assert count_roots_on_unit_circle(x ** 2 + 1) == 2
    assert count_roots_on_unit_circle(x - 2) == 0
    assert count_roots_on_unit_circle(SALEM_FREE) == 2


def test_modulus_partition_factors():
    part = modulus_partition((x - Fraction(1, 2)) * (x + 2) * SALEM_FREE)
    assert (part.n0, part.n01, part.n1, part.n1inf) == (0, 1, 2, 1)
    assert part.p1 == SALEM_FREE
    assert part.det01_sign == 1
    assert part.det1inf_sign == -1
    mixed = modulus_partition(x ** 2 - 3 * x + 1)
    assert mixed.mixed == ((x ** 2 - 3 * x + 1, 1),)


def test_root_of_unity_factor():
    k, phi = root_of_unity_factor(charpoly(Matrix.from_rows([[0, -1], [1, 0]])), 2)
    assert (k, phi) == (4, x ** 2 + 1)
    assert root_of_unity_factor(x - 1, 1)[0] == 1
    assert root_of_unity_factor(SALEM_FREE, 2) is None
    assert root_of_unity_factor((x - 3) * (x ** 2 + x + 1), 3)[0] == 3


def test_irreducible_factors_and_unit_factors():
    p = SALEM_FREE ** 2 * (x - 2)
    assert irreducible_factors(p) == [(x - 2, 1), (SALEM_FREE, 2)]
    assert unit_circle_factors(p) == [(SALEM_FREE, 2, 2)]
    over_qi = irreducible_factors((x ** 2 + 1).to_field(GroundField.QI))
    assert [f.degree() for f, _ in over_qi] == [1, 1]


def test_approximate_roots():
    roots = approximate_roots(SALEM_FREE)
    np.testing.assert_allclose(sorted(z.imag for z in roots), [-0.8, 0.8], atol=1e-12)
    np.testing.assert_allclose([z.real for z in roots], [0.6, 0.6], atol=1e-12)


def test_fitting_split():
    split = fitting_split(Matrix.from_rows([[1, 1], [0, 0]]))
    assert split.nonsingular_part == Matrix.from_rows([[1]])
    assert split.nilpotent_part == Matrix.from_rows([[0]])
    S = split.transition
    D = S.inverse() @ Matrix.from_rows([[1, 1], [0, 0]]) @ S
    assert D == Matrix.diag([1, 0])

    nil = fitting_split(jordan_block(0, 2))
    assert nil.nonsingular_part.rows == 0
    assert nil.nilpotent_part.rows == 2


def test_similar():
    J21 = Matrix.direct_sum(jordan_block(0, 2), jordan_block(0, 1))
    assert not similar(J21, jordan_block(0, 3))
    assert similar(Matrix.from_rows([[0, 1], [0, 0]]), Matrix.from_rows([[0, 0], [1, 0]]))
    A = Matrix.from_rows([[2, 1, 0], [0, 2, 0], [1, 0, 5]])
    S = Matrix.from_rows([[1, 2, 0], [0, 1, 3], [1, 0, 1]])
    assert similar(A, S.inverse() @ A @ S)
    assert not similar(Matrix.diag([2, 2]), jordan_block(2, 2))


def test_signs_and_logarithm_condition():
    assert determinant_sign(Matrix.diag([-1, 2])) == -1
    assert determinant_sign(Matrix.zeros(0)) == 1
    assert count_negative_real_eigenvalues(Matrix.diag([-1, -2, 3])) == 2
    assert count_negative_real_eigenvalues(ROTATION) == 0
    assert real_log_exists(Matrix.diag([-1, -1]))
    assert real_log_exists(ROTATION)
    assert not real_log_exists(Matrix.diag([-1]))
    assert not real_log_exists(Matrix.diag([-1, -2]))
    assert not real_log_exists(jordan_block(-1, 2))
    assert real_log_exists(Matrix.direct_sum(jordan_block(-1, 2), jordan_block(-1, 2)))
    assert not real_log_exists(Matrix.diag([0, 1]))


def test_invariant_factors():
    assert [str(q) for q in invariant_factors(jordan_block(2, 2))] == ["x^2 - 4*x + 4"]
    assert sorted(str(q) for q in invariant_factors(Matrix.diag([2, 2]))) == ["x - 2", "x - 2"]
    assert [str(q) for q in invariant_factors(Matrix.from_rows([[0, -1], [1, 0]]))] == ["x^2 + 1"]


def test_spectral_split():
    A = Matrix.direct_sum(Matrix.diag(["1/2", -3]), Matrix.from_rows([["3/5", "-4/5"], ["4/5", "3/5"]]), jordan_block(0, 2))
    split = spectral_split(A)
    assert (split.partition.n0, split.partition.n01, split.partition.n1, split.partition.n1inf) == (2, 1, 2, 1)
    assert split.core_det_sign == -1
    assert split.fitting.nilpotent_part.rows == 2
    assert [u for _, _, u in split.unit_factors] == [2]
    assert split.to_dict()["unit_factors"][0]["unit_roots"] == 2
