import numpy as np
import pytest

from affine_conjugacy.engine.conjugacy import NoFixedPointForm, canonical_affine, fixed_point, realize
from affine_conjugacy.engine.errors import PreconditionError, RootOfUnityError, WitnessResidualError
from affine_conjugacy.engine.linalg import Matrix
from affine_conjugacy.engine.witness import verify_conjugacy
from affine_conjugacy.orchestrator.orchestrator import build_pipeline_graph, run_pipeline

from helpers import operator


def _kinds(result):
    return [stage.kind for stage in result.witness.stages]


def test_graph_compiles():
    assert build_pipeline_graph() is not None


def test_translation_only():
    result = run_pipeline(operator([[1]], [1]))
    assert _kinds(result) == []
    assert result.witness.is_identity
    assert result.canonical.A == Matrix.identity(1)
    assert result.residual.exact and result.residual.residual == 0
    assert [t["stage"] for t in result.trace] == [
        "jordan_reduction",
        "fixed_point_absorption",
        "unipotent_normalization",
        "blanc_linearization",
        "translation_merge",
        "flow_straightening",
        "verification",
    ]


def test_unipotent_block_is_linearized_exactly():
    result = run_pipeline(operator([[1, 0], [1, 1]], [1, 0]))
    assert _kinds(result) == ["BlancPolynomial"]
    assert result.form == NoFixedPointForm(field="R", k=2)
    assert result.residual.exact
    assert result.residual.residual == 0


def test_flow_stage_for_expanding_part():
    result = run_pipeline(operator([[1, 0], [0, 3]], [1, 0]), samples=100)
    assert "Flow" in _kinds(result)
    assert not result.residual.exact
    assert result.residual.residual < 1e-9
    assert result.residual.samples == 100
    assert result.form.k == 2


def test_rejects_operators_with_fixed_point():
    with pytest.raises(PreconditionError):
        run_pipeline(operator([[2]], [1]))


@pytest.mark.parametrize(
    "rows, b, field",
    [
        ([[1, 0], [0, 1]], [1, 1], None),
        ([[1, 0, 0], [1, 1, 0], [0, 0, 1]], [2, 5, 1], None),
        ([[1, 0, 0], [0, 2, 1], [0, 0, "1/2"]], [1, 1, 1], None),
        ([[1, 0], [0, 0]], [1, 1], None),
        ([[1, 0, 0, 0], [0, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 3]], [1, 1, 0, 1], None),
        ([[1, 0, 0], [0, -2, 0], [0, 0, 3]], [1, 0, 0], None),
        ([[1, 0, 0], [0, -2, 0], [0, 0, "-1/2"]], [1, 0, 0], None),
        ([[1, 0, 0, 0], [0, -2, 0, 0], [0, 1, -2, 0], [0, 0, 0, -3]], [1, 0, 0, 0], None),
        ([[1, 0, 0], [0, "3/5", "-4/5"], [0, "4/5", "3/5"]], [1, 0, 0], None),
        ([[1, 0], [0, "i"]], [1, 0], None),
        ([[1, 0, 0], [0, "2i", 1], [0, 0, -1]], ["1+i", 0, 0], None),
        ([[1, 0], [0, -2]], [1, 0], "C"),
    ],
)
def test_pipeline_reaches_canonical_form(rows, b, field):
    f = operator(rows, b, field)
    result = run_pipeline(f)
    g = realize(canonical_affine(f))
    assert result.canonical == g
    assert result.form == canonical_affine(f)
    assert result.residual.passed
    assert result.residual.residual <= 1e-8
    again = verify_conjugacy(f, g, result.witness, samples=50, seed=99)
    assert again.residual <= 1e-8


def test_orientation_reversing_part_keeps_one_minus_one():
    f = operator([[1, 0, 0, 0], [0, -2, 0, 0], [0, 0, -3, 0], [0, 0, 0, -5]], [1, 0, 0, 0])
    result = run_pipeline(f)
    assert result.form.epsilon == -1
    assert result.form.k == 3
    expected = np.diag([1.0, 1.0, 1.0, -1.0])
    np.testing.assert_array_equal(result.canonical.A.numeric, expected)
    assert result.residual.residual <= 1e-8


def test_result_document():
    result = run_pipeline(operator([[1, 0], [0, 3]], [1, 0]), samples=10, seed=5)
    doc = result.to_dict()
    assert doc["witness"]["kind"] == "Composite"
    assert doc["canonical"] == {"A": {"field": "R", "rows": [["1", "0"], ["0", "1"]]}, "b": ["1", "0"]}
    assert doc["form"]["kind"] == "NoFixedPoint"
    assert doc["residual"]["seed"] == 5


def test_pipeline_on_random_operators(rng):
    checked = 0
    for _ in range(400):
        n = int(rng.integers(2, 6))
        top = [1] + [int(v) for v in rng.integers(-2, 3, size=n - 1)]
        rest = [[0] + [int(v) for v in row] for row in rng.integers(-2, 3, size=(n - 1, n - 1))]
        f = operator([top] + rest, [1] + [0] * (n - 1))
        if fixed_point(f) is not None:
            continue
        try:
            result = run_pipeline(f)
        except RootOfUnityError:
            continue
        assert result.residual.passed, (f.A.to_strings(), result.residual.residual)
        assert result.canonical == realize(canonical_affine(f))
        checked += 1
        if checked == 60:
            break
    assert checked == 60


def test_residual_over_tolerance_raises():
    f = operator([[1, 0, 0], [0, -2, 0], [0, 0, 3]], [1, 0, 0])
    with pytest.raises(WitnessResidualError) as info:
        run_pipeline(f, tolerance=1e-300)
    assert info.value.exit_code == 1
    assert info.value.details["tolerance"] == 1e-300
    assert info.value.details["residual"] > 1e-300
