from fractions import Fraction

import pytest

from affine_conjugacy.engine.conjugacy import (
    FixedPointLinearForm,
    NoFixedPointForm,
    Reason,
    canonical_affine,
    canonical_form_adapter,
    canonical_linear,
    coerce_operator,
    corollary_check,
    decide_affine,
    decide_linear,
    fixed_point,
    linear_invariants,
    orientation,
    rank_sequence,
    realize,
)
from affine_conjugacy.engine.errors import FieldMismatchError, RootOfUnityError
from affine_conjugacy.engine.exact_core import GroundField
from affine_conjugacy.engine.linalg import AffineOperator, Matrix, determinant
from affine_conjugacy.engine.structure import SegreCharacteristic, jordan_block
from affine_conjugacy.engine.witness import translation_witness, verify_conjugacy

from helpers import operator, partitions

ROTATION = [["3/5", "-4/5"], ["4/5", "3/5"]]
CORPUS = [
    operator([[1]], [1]),
    operator([[2]], [1]),
    operator([[1, 0], [0, -1]], [1, 0]),
    operator([[1, 0], [1, 1]], [1, 0]),
    operator([[1, 0], [0, 0]], [1, 0]),
    operator([[1, 0, 0], [0, 3, 0], [0, 0, "1/2"]], [1, 1, 1]),
    operator([[1, 0, 0], [0, -2, 0], [0, 0, -3]], [1, 0, 0]),
    operator([["1/2", 0], [0, 3]], [5, 7]),
    operator([[1, 0, 0], [0, 0, 0], [0, 1, 0]], [1, 1, 0]),
]


# -------------------------------
# Fixed points
# -------------------------------
def test_fixed_point():
    assert fixed_point(operator([[2]], [1])) == (Fraction(-1),)
    assert fixed_point(operator([[1, 0], [1, 1]], [1, 0])) is None
    assert fixed_point(operator([[1]], [0])) == (Fraction(0),)


@pytest.mark.parametrize(
    "f, expected",
    [
        (operator([[1, 0], [1, 1]], [1, 0]), True),
        (operator([[2]], [1]), False),
        (operator([[1, 0], [0, 1]], [1, 1]), True),
    ],
)
def test_corollary_check(f, expected):
    assert corollary_check(f) is expected


def test_orientation():
    assert orientation(operator([[1, 0], [0, -2]], [1, 0])) == -1
    assert orientation(operator([[2]], [0])) == 1
    assert orientation(operator([["i"]], [0])) == 1


# -------------------------------
# Linear part
# -------------------------------
def test_decide_linear_real():
    v = decide_linear(Matrix.diag(["1/2", 3]), Matrix.diag(["1/3", 2]))
    assert v.conjugate and v.reason is Reason.CONJUGATE and v.field == "R"
    v = decide_linear(Matrix.diag(["1/2"]), Matrix.diag(["-1/2"]))
    assert not v.conjugate and v.reason is Reason.ORIENTATION_MISMATCH
    v = decide_linear(Matrix.diag(["1/2", 2]), Matrix.diag(["1/2", "1/3"]))
    assert v.reason is Reason.SIZE_MISMATCH
    v = decide_linear(jordan_block(0, 2), Matrix.zeros(2))
    assert v.reason is Reason.NILPOTENT_MISMATCH


def test_decide_linear_unit_part():
    rotation = Matrix.from_rows(ROTATION)
    other = Matrix.from_rows([["5/13", "-12/13"], ["12/13", "5/13"]])
    assert decide_linear(rotation, rotation.transpose()).conjugate
    assert decide_linear(rotation, other).reason is Reason.UNIT_PART_MISMATCH
    doubled = Matrix.direct_sum(rotation, rotation)
    shear = Matrix.from_rows(
        [["3/5", "-4/5", 0, 0], ["4/5", "3/5", 0, 0], [1, 0, "3/5", "-4/5"], [0, 1, "4/5", "3/5"]]
    )
    assert decide_linear(doubled, shear).reason is Reason.UNIT_PART_MISMATCH


def test_decide_linear_complex():
    v = decide_linear(Matrix.from_rows([["3/5+4/5 i"]]), Matrix.from_rows([["3/5-4/5 i"]]))
    assert v.conjugate and v.field == "C"
    v = decide_linear(Matrix.diag(["1/2"]), Matrix.diag(["-1/2"]), field="C")
    assert v.conjugate


def test_decide_linear_rejects_roots_of_unity():
    with pytest.raises(RootOfUnityError) as err:
        decide_linear(Matrix.from_rows([[0, -1], [1, 0]]), Matrix.diag([2, 2]))
    assert err.value.details["k"] == 4
    with pytest.raises(RootOfUnityError):
        canonical_linear(Matrix.from_rows([["i"]]))


def test_decide_linear_rejects_mixed_fields():
    with pytest.raises(FieldMismatchError):
        decide_linear(Matrix.diag([2]), Matrix.from_rows([["2i"]]))


def _summary(form):
    return [(s.eigenvalue, s.size, s.count) for s in form.summands]


def test_canonical_linear_real():
    assert _summary(canonical_linear(Matrix.diag([3, "1/4", 0]))) == [("0", 1, 1), ("1/2", 1, 1), ("2", 1, 1)]
    assert _summary(canonical_linear(Matrix.diag([-3, "-1/4"]))) == [("-1/2", 1, 1), ("-2", 1, 1)]
    assert _summary(canonical_linear(Matrix.diag([-3, -5]))) == [("2", 1, 2)]
    nil = canonical_linear(Matrix.direct_sum(jordan_block(0, 1), jordan_block(0, 3)))
    assert _summary(nil) == [("0", 3, 1), ("0", 1, 1)]


def test_canonical_linear_unit_circle():
    form = canonical_linear(Matrix.from_rows(ROTATION))
    (summand,) = form.summands
    assert summand.factor_text == "x^2 - 6/5*x + 1"
    assert summand.realified and summand.size == 1 and summand.count == 1
    assert summand.approx == ("0.6+0.8i",)
    assert form.n == 2


def test_canonical_linear_complex():
    form = canonical_linear(Matrix.from_rows([["3/5+4/5 i", 0], [0, "-1/3"]]))
    assert form.field == "C"
    assert [s.eigenvalue for s in form.summands if s.factor is None] == ["1/2"]
    (unit,) = [s for s in form.summands if s.factor is not None]
    assert not unit.realified and unit.count == 1
    assert form.n == 2


def test_canonical_linear_realizes_to_conjugate_matrix():
    for A in (
        Matrix.diag([-3, "-1/4", 7, 0]),
        Matrix.from_rows(ROTATION),
        Matrix.direct_sum(Matrix.from_rows(ROTATION), jordan_block(5, 2), jordan_block(0, 2)),
        Matrix.from_rows([["3/5+4/5 i", 1], [0, "2i"]]),
    ):
        form = canonical_linear(A)
        B = realize(form).A
        assert B.rows == A.rows
        assert decide_linear(A, B).conjugate
        assert canonical_linear(B) == form


def test_forms_validate():
    with pytest.raises(ValueError):
        NoFixedPointForm(field="C", k=1, epsilon=-1)
    with pytest.raises(ValueError):
        NoFixedPointForm(field="R", k=0)
    form = canonical_form_adapter.validate_python({"kind": "NoFixedPoint", "field": "R", "k": 2, "segre": [1, 3]})
    assert isinstance(form, NoFixedPointForm)
    assert form.segre == [3, 1]
    assert form.n == 6
    with pytest.raises(ValueError):
        FixedPointLinearForm(field="R", summands=[{"eigenvalue": "-2", "size": 1, "count": 2}])


# -------------------------------
# Affine operators
# -------------------------------
@pytest.mark.parametrize(
    "f, k, epsilon, segre",
    [
        (operator([[1]], [1]), 1, 1, []),
        (operator([[1, 0], [0, -1]], [1, 0]), 1, -1, []),
        (operator([[1, 0], [0, "i"]], [1, 0]), 2, 1, []),
        (operator([[1, 0], [0, 0]], [1, 0]), 1, 1, [1]),
        (operator([[1, 0], [1, 1]], [1, 0]), 2, 1, []),
    ],
)
def test_canonical_affine_without_fixed_point(f, k, epsilon, segre):
    form = canonical_affine(f)
    assert isinstance(form, NoFixedPointForm)
    assert (form.k, form.epsilon, form.segre) == (k, epsilon, segre)


def test_canonical_affine_with_fixed_point():
    form = canonical_affine(operator([[2]], [1]))
    assert isinstance(form, FixedPointLinearForm)
    assert _summary(form) == [("2", 1, 1)]


def test_decide_affine_verdicts():
    f = operator([[1, 0], [0, -2]], [1, 0])
    g = operator([[1, 0], [0, 2]], [1, 0])
    v = decide_affine(f, g)
    assert not v.conjugate and v.reason is Reason.ORIENTATION_MISMATCH
    assert decide_affine(f.coerce("C"), g.coerce("C")).conjugate
    v = decide_affine(operator([[2]], [1]), operator([[1]], [1]))
    assert v.reason is Reason.FIXED_POINT_MISMATCH
    v = decide_affine(operator([[1, 0], [0, 0]], [1, 0]), operator([[1, 0], [0, 2]], [1, 0]))
    assert v.reason is Reason.NILPOTENT_MISMATCH
    with pytest.raises(FieldMismatchError):
        decide_affine(f, g.coerce("C"))


@pytest.mark.parametrize("f", CORPUS)
def test_decide_affine_is_reflexive_and_symmetric(f):
    assert decide_affine(f, f).conjugate
    other = CORPUS[0] if f.n == 1 else CORPUS[2]
    if other.n == f.n:
        assert decide_affine(f, other).conjugate == decide_affine(other, f).conjugate


@pytest.mark.parametrize("f", CORPUS)
def test_base_change_invariance(f, rng):
    g = realize(canonical_affine(f))
    expected = decide_affine(f, g)
    assert expected.conjugate
    for _ in range(5):
        while True:
            entries = [[int(v) for v in row] for row in rng.integers(-3, 4, size=(f.n, f.n))]
            S = Matrix.from_rows(entries)
            if determinant(S) != 0:
                break
        moved = f.base_change(S)
        assert decide_affine(moved, g).conjugate
        assert canonical_affine(moved) == canonical_affine(f)


@pytest.mark.parametrize("f", CORPUS)
def test_canonical_affine_is_idempotent(f):
    form = canonical_affine(f)
    assert canonical_affine(realize(form)) == form


@pytest.mark.parametrize("f", [g for g in CORPUS if fixed_point(g) is None])
def test_rank_sequence_law(f):
    form = canonical_affine(f)
    g = realize(form)
    segre = SegreCharacteristic(tuple(form.segre))
    base = form.k + (1 if form.epsilon == -1 else 0)
    assert rank_sequence(g) == [base + segre.rank_of_power(i) for i in range(1, g.n + 1)]
    assert rank_sequence(f) == rank_sequence(g)


def test_realize_no_fixed_point_shape():
    g = realize(NoFixedPointForm(field="R", k=2, epsilon=-1, segre=[2]))
    assert g.A == Matrix.direct_sum(Matrix.identity(2), Matrix.diag([-1]), jordan_block(0, 2))
    assert g.b == (1, 0, 0, 0, 0)
    assert isinstance(g, AffineOperator)


def _forms_of_dimension(n):
    for epsilon in (1, -1):
        flip = 1 if epsilon == -1 else 0
        for nil in range(0, min(4, n - 1 - flip) + 1):
            for sizes in partitions(nil):
                yield NoFixedPointForm(field="R", k=n - nil - flip, epsilon=epsilon, segre=list(sizes))


@pytest.mark.parametrize("n", range(1, 6))
def test_no_fixed_point_classes_are_distinct(n):
    forms = list(_forms_of_dimension(n))
    ops = [realize(form) for form in forms]
    for form, g in zip(forms, ops):
        assert canonical_affine(g) == form
    for i, f in enumerate(ops):
        for g in ops[i + 1:]:
            assert not decide_affine(f, g).conjugate


def test_fixed_point_criteria_agree(rng):
    for _ in range(300):
        n = int(rng.integers(1, 5))
        rows = [[int(v) for v in row] for row in rng.integers(-2, 3, size=(n, n))]
        if rng.random() < 0.6:
            i = int(rng.integers(n))
            rows[i] = [1 if j == i else 0 for j in range(n)]
        b = [int(v) for v in rng.integers(-1, 2, size=n)]
        f = operator(rows, b)
        p = fixed_point(f)
        assert corollary_check(f) is (p is None)
        if p is not None:
            linear = AffineOperator(f.A, (0,) * n)
            report = verify_conjugacy(f, linear, translation_witness(p), samples=10)
            assert report.exact and report.residual == 0


def test_linear_invariants_evidence():
    inv = linear_invariants(Matrix.diag(["1/2", -3, 0]))
    assert (inv.n01, inv.n1, inv.n1inf) == (1, 0, 1)
    assert inv.segre.to_list() == [1]
    assert (inv.det01_sign, inv.det1inf_sign) == (1, -1)
    evidence = inv.evidence()
    assert evidence["det1inf_sign"] == -1
    assert "det01_sign" not in linear_invariants(Matrix.diag(["1/2"]).coerce("C")).evidence()


def test_coerce_operator():
    f = operator([[2, 1], [0, 2]], [1, 0])
    g = coerce_operator(f, "C")
    assert g.field is GroundField.QI
    assert coerce_operator(g, "R") == f
    with pytest.raises(FieldMismatchError):
        coerce_operator(operator([["i"]]), "R")


def _random_rational(rng):
    if rng.random() < 0.5:
        return 0
    return Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 10)))


def _random_nonsingular(rng, n):
    while True:
        S = Matrix.from_rows([[int(v) for v in row] for row in rng.integers(-3, 4, size=(n, n))])
        if determinant(S) != 0:
            return S


def test_random_base_changes_stay_conjugate(rng):
    checked = 0
    while checked < 200:
        n = int(rng.integers(1, 7))
        rows = [[_random_rational(rng) for _ in range(n)] for _ in range(n)]
        rows[0] = [1] + rows[0][1:]
        for row in rows[1:]:
            row[0] = 0
        b = [1] + [_random_rational(rng) for _ in range(n - 1)]
        f = operator(rows, b)
        if fixed_point(f) is not None:
            continue
        form = canonical_affine(f)
        for _ in range(3):
            moved = f.base_change(_random_nonsingular(rng, n))
            verdict = decide_affine(f, moved)
            assert verdict.conjugate and verdict.reason == Reason.CONJUGATE
            assert canonical_affine(moved) == form
        checked += 1
