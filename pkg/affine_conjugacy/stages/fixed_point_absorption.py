import logging
from typing import Any, Dict

from affine_conjugacy.engine.errors import InternalConsistencyError
from affine_conjugacy.engine.linalg import Matrix, solve
from affine_conjugacy.engine.witness import Translation
from affine_conjugacy.stages.common import blocks_of, record_stage

logger = logging.getLogger(__name__)


# -------------------------------
# Step 2: translate away every block that has its own fixed point
# -------------------------------
def fixed_point_absorption_stage(state: Dict[str, Any]) -> Dict[str, Any]:
    f = state["current"]
    n, field = f.n, f.field
    q = [field.zero()] * n
    absorbed = 0
    for blk in blocks_of(state, "u", "core", "nil"):
        lo, size = blk["start"], blk["size"]
        shifted = f.A.block(lo, size) - Matrix.identity(size, field)
        x = solve(shifted, tuple(-v for v in f.b[lo:lo + size]))
        if x is None:
            raise InternalConsistencyError(f"block at {lo} has no fixed point")
        q[lo:lo + size] = x
        absorbed += 1
    q = tuple(q)
    return record_stage(
        state,
        "fixed_point_absorption",
        f.translate(q),
        [Translation(dim=n, p=q)],
        absorbed_blocks=absorbed,
    )
