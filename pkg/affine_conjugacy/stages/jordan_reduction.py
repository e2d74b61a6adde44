import logging
from typing import Any, Dict, List

from affine_conjugacy.engine.errors import InternalConsistencyError
from affine_conjugacy.engine.linalg import Matrix, Vector, column_basis, nullspace
from affine_conjugacy.engine.structure import jordan_chains, restrict
from affine_conjugacy.engine.witness import Linear
from affine_conjugacy.stages.common import record_stage

logger = logging.getLogger(__name__)


def _lift(basis: List[Vector], coords: Vector, n: int, field) -> Vector:
    return Matrix.from_columns(basis, n, field).apply(coords)


def _ambient_chains(A: Matrix, basis: List[Vector], shift: Matrix) -> List[List[Vector]]:
    if not basis:
        return []
    local = jordan_chains(restrict(shift, basis))
    return [[_lift(basis, v, A.rows, A.field) for v in chain] for chain in local]


# -------------------------------
# Step 1: primary decomposition and Jordan chains
# -------------------------------
def jordan_reduction_stage(state: Dict[str, Any]) -> Dict[str, Any]:
    """Base change to [unipotent blocks with obstruction | other unipotent | core | nilpotent].

    Unipotent and nilpotent parts are put in lower Jordan form; the part with
    eigenvalues outside {0, 1} is kept in an arbitrary invariant basis.
    """
    f = state["current"]
    A, n, field = f.A, f.n, f.field
    eye = Matrix.identity(n, field)
    shifted = A - eye
    unipotent_space = nullspace(shifted.power(n))
    nilpotent_space = nullspace(A.power(n))
    core_space = column_basis(A.power(n) @ shifted.power(n))
    if len(unipotent_space) + len(nilpotent_space) + len(core_space) != n:
        raise InternalConsistencyError("primary decomposition does not span the space")

    unipotent = _ambient_chains(A, unipotent_space, shifted)
    nilpotent = _ambient_chains(A, nilpotent_space, A)

    columns = [v for chain in unipotent for v in chain] + core_space + [v for chain in nilpotent for v in chain]
    b_local = Matrix.from_columns(columns, n, field).inverse().apply(f.b)

    # the top of a chain carries the only coordinate that blocks a fixed point
    obstructed, free, pos = [], [], 0
    for chain in unipotent:
        (obstructed if b_local[pos] != 0 else free).append(chain)
        pos += len(chain)
    if not obstructed:
        raise InternalConsistencyError("operator has a fixed point; no obstructed unipotent block")

    blocks, ordered, start = [], [], 0
    for kind, group in (("p", obstructed), ("u", free)):
        for chain in group:
            blocks.append({"kind": kind, "start": start, "size": len(chain)})
            ordered.extend(chain)
            start += len(chain)
    if core_space:
        blocks.append({"kind": "core", "start": start, "size": len(core_space)})
        ordered.extend(core_space)
        start += len(core_space)
    for chain in nilpotent:
        blocks.append({"kind": "nil", "start": start, "size": len(chain)})
        ordered.extend(chain)
        start += len(chain)

    S = Matrix.from_columns(ordered, n, field)
    state["blocks"] = blocks
    return record_stage(
        state,
        "jordan_reduction",
        f.base_change(S),
        [Linear(dim=n, S=S)],
        obstructed=[len(c) for c in obstructed],
        unipotent=[len(c) for c in free],
        core=len(core_space),
        nilpotent=[len(c) for c in nilpotent],
    )
