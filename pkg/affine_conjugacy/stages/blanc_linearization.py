import logging
from typing import Any, Dict

from affine_conjugacy.engine.linalg import AffineOperator, Matrix
from affine_conjugacy.engine.witness import BlancPolynomial
from affine_conjugacy.stages.common import blocks_of, record_stage

logger = logging.getLogger(__name__)


# -------------------------------
# Step 4: (J_m(1), e1) -> (I_m, e1) by the inverse Blanc map
# -------------------------------
def blanc_linearization_stage(state: Dict[str, Any]) -> Dict[str, Any]:
    f = state["current"]
    field = f.field
    witnesses = []
    parts = []
    for blk in state["blocks"]:
        lo, size = blk["start"], blk["size"]
        if blk["kind"] == "p":
            parts.append(Matrix.identity(size, field))
            if size > 1:
                witnesses.append(BlancPolynomial(dim=f.n, offset=lo, m=size, inverted=True))
        else:
            parts.append(f.A.block(lo, size))
    linearized = AffineOperator(Matrix.direct_sum(*parts, field=field), f.b)
    return record_stage(
        state,
        "blanc_linearization",
        linearized,
        witnesses,
        linearized_blocks=[blk["size"] for blk in blocks_of(state, "p") if blk["size"] > 1],
    )
