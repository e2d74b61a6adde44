import logging
from typing import Any, Dict

from affine_conjugacy.engine.witness import Linear, step3_matrix
from affine_conjugacy.stages.common import block_matrix, blocks_of, record_stage

logger = logging.getLogger(__name__)


# -------------------------------
# Step 3: (J_m(1), a) -> (J_m(1), e1) on every obstructed block
# -------------------------------
def unipotent_normalization_stage(state: Dict[str, Any]) -> Dict[str, Any]:
    f = state["current"]
    replace = {}
    for blk in blocks_of(state, "p"):
        lo, size = blk["start"], blk["size"]
        replace[lo] = step3_matrix(f.b[lo:lo + size], f.field)
    S = block_matrix(state, f.field, replace)
    return record_stage(
        state,
        "unipotent_normalization",
        f.base_change(S),
        [Linear(dim=f.n, S=S)],
        normalized_blocks=len(replace),
    )
