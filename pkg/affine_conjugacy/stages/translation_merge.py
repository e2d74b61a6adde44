import logging
from typing import Any, Dict

from affine_conjugacy.engine.linalg import Matrix
from affine_conjugacy.engine.witness import Linear
from affine_conjugacy.stages.common import blocks_of, record_stage

logger = logging.getLogger(__name__)


# -------------------------------
# Step 5: (I_P, e1 + e_j + ...) -> (I_1, [1]) + (I_{P-1}, 0)
# -------------------------------
def translation_merge_stage(state: Dict[str, Any]) -> Dict[str, Any]:
    """Collect the obstructed coordinates in front and fold their translations into e1.

    Afterwards the operator reads (1, [1]) + (D, 0) + (J0, 0) with D nonsingular.
    """
    f = state["current"]
    n, field = f.n, f.field
    obstructed = blocks_of(state, "p")
    heads = [blk["start"] for blk in obstructed]
    covered = [i for blk in obstructed for i in range(blk["start"], blk["start"] + blk["size"])]
    order = [heads[0]] + [i for i in covered if i != heads[0]] + [i for i in range(n) if i not in covered]
    moved_heads = [order.index(h) for h in heads[1:]]

    perm = Matrix.from_columns(
        [tuple(1 if r == old else 0 for r in range(n)) for old in order], n, field
    )
    merge_entries = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for j in moved_heads:
        merge_entries[j][0] = 1
    S = perm @ Matrix.from_rows(merge_entries, field)

    nil_total = sum(blk["size"] for blk in blocks_of(state, "nil"))
    d = n - 1 - nil_total
    state["flow_size"] = d
    state["segre"] = [blk["size"] for blk in blocks_of(state, "nil")]
    return record_stage(
        state,
        "translation_merge",
        f.base_change(S),
        [Linear(dim=n, S=S)],
        merged=len(heads),
        flow_size=d,
    )
