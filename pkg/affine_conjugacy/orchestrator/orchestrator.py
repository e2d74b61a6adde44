import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Union

from langgraph.graph import END, StateGraph

from affine_conjugacy.engine.conjugacy import FixedPointLinearForm, NoFixedPointForm, fixed_point
from affine_conjugacy.engine.errors import PreconditionError
from affine_conjugacy.engine.linalg import AffineOperator
from affine_conjugacy.engine.witness import Composite, ResidualReport
from affine_conjugacy.stages.blanc_linearization import blanc_linearization_stage
from affine_conjugacy.stages.fixed_point_absorption import fixed_point_absorption_stage
from affine_conjugacy.stages.flow_straightening import flow_straightening_stage
from affine_conjugacy.stages.jordan_reduction import jordan_reduction_stage
from affine_conjugacy.stages.translation_merge import translation_merge_stage
from affine_conjugacy.stages.unipotent_normalization import unipotent_normalization_stage
from affine_conjugacy.stages.verification import verification_stage

logger = logging.getLogger(__name__)


# -------------------------------
# Pipeline Graph
# -------------------------------
def build_pipeline_graph():
    graph = StateGraph(dict)

    graph.add_node("jordan_reduction", jordan_reduction_stage)
    graph.add_node("fixed_point_absorption", fixed_point_absorption_stage)
    graph.add_node("unipotent_normalization", unipotent_normalization_stage)
    graph.add_node("blanc_linearization", blanc_linearization_stage)
    graph.add_node("translation_merge", translation_merge_stage)
    graph.add_node("flow_straightening", flow_straightening_stage)
    graph.add_node("verification", verification_stage)

    # Flow: Jordan form → absorb fixed points → normalize → Blanc → merge → flow → verify
    graph.set_entry_point("jordan_reduction")
    graph.add_edge("jordan_reduction", "fixed_point_absorption")
    graph.add_edge("fixed_point_absorption", "unipotent_normalization")
    graph.add_edge("unipotent_normalization", "blanc_linearization")
    graph.add_edge("blanc_linearization", "translation_merge")
    graph.add_edge("translation_merge", "flow_straightening")
    graph.add_edge("flow_straightening", "verification")
    graph.add_edge("verification", END)

    return graph.compile()


_graph = None


def get_pipeline_graph():
    global _graph
    if _graph is None:
        _graph = build_pipeline_graph()
    return _graph


# -------------------------------
# Result
# -------------------------------
@dataclass
class PipelineResult:
    witness: Composite
    canonical: AffineOperator
    form: Union[NoFixedPointForm, FixedPointLinearForm]
    residual: ResidualReport
    trace: List[Dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        from affine_conjugacy.utils.serialization import operator_to_dict

        return {
            "witness": self.witness.to_dict(),
            "canonical": operator_to_dict(self.canonical),
            "form": self.form.model_dump(mode="json"),
            "residual": self.residual.model_dump(mode="json"),
            "trace": self.trace,
        }


def run_pipeline(
    f: AffineOperator,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    tolerance: Optional[float] = None,
    box: Optional[float] = None,
) -> PipelineResult:
    """Reduce an operator without fixed point to its canonical form, recording the witness."""
    if fixed_point(f) is not None:
        raise PreconditionError("operator has a fixed point; the translation witness linearizes it")
    options = {k: v for k, v in (("samples", samples), ("seed", seed), ("tolerance", tolerance), ("box", box)) if v is not None}
    state: Dict[str, Any] = {
        "operator": f,
        "current": f,
        "stages": [],
        "trace": [],
        "options": options,
    }
    final_state = get_pipeline_graph().invoke(state)
    return PipelineResult(
        witness=final_state["witness"],
        canonical=final_state["canonical"],
        form=final_state["form"],
        residual=final_state["residual"],
        trace=final_state["trace"],
    )
