import logging
from typing import Any, Dict, List, Optional

from affine_conjugacy.engine.linalg import AffineOperator, Matrix
from affine_conjugacy.engine.witness import Witness

logger = logging.getLogger(__name__)


def record_stage(
    state: Dict[str, Any],
    name: str,
    operator: AffineOperator,
    witnesses: Optional[List[Witness]] = None,
    **details: Any,
) -> Dict[str, Any]:
    """Append the non-trivial witnesses of one reduction step and move the current operator."""
    applied = [w for w in (witnesses or []) if not w.is_identity]
    state["stages"].extend(applied)
    state["current"] = operator
    state["trace"].append({"stage": name, "witnesses": [w.kind for w in applied], **details})
    logger.info("%s: %d witness stage(s) %s", name, len(applied), details)
    return state


def blocks_of(state: Dict[str, Any], *kinds: str) -> List[Dict[str, Any]]:
    return [blk for blk in state["blocks"] if blk["kind"] in kinds]


def block_matrix(state: Dict[str, Any], field, replace: Dict[int, Matrix]) -> Matrix:
    """Direct sum over the layout, identity on blocks not in ``replace`` (keyed by start)."""
    parts = [replace.get(blk["start"], Matrix.identity(blk["size"], field)) for blk in state["blocks"]]
    return Matrix.direct_sum(*parts, field=field)
