import logging
from typing import Any, Dict

import numpy as np
import scipy.linalg

from affine_conjugacy.engine.errors import InternalConsistencyError
from affine_conjugacy.engine.linalg import AffineOperator, Matrix
from affine_conjugacy.engine.spectral_analysis import count_negative_real_eigenvalues
from affine_conjugacy.engine.witness import Flow, Linear, matrix_log, split_negative_real
from affine_conjugacy.stages.common import record_stage

logger = logging.getLogger(__name__)


def _pairing_generator(d: int, q: int) -> np.ndarray:
    """pi-rotations on consecutive pairs of the last q coordinates (the odd one left out)."""
    G = np.zeros((d, d))
    for j in range(q // 2):
        a = d - q + 2 * j
        G[a + 1, a] = np.pi
        G[a, a + 1] = -np.pi
    return G


# -------------------------------
# Step 6: (1, [1]) + (D, 0) -> (1, [1]) + (I or I + [-1], 0) along e^{xG}
# -------------------------------
def flow_straightening_stage(state: Dict[str, Any]) -> Dict[str, Any]:
    f = state["current"]
    n, field = f.n, f.field
    d = state["flow_size"]
    nil_total = n - 1 - d
    J0 = f.A.block(1 + d, nil_total)
    e1 = tuple(1 if i == 0 else 0 for i in range(n))
    if d == 0:
        return record_stage(state, "flow_straightening", f, [], negative=0)

    D = f.A.block(1, d)
    if not field.is_real:
        G = matrix_log(D, want_real=False)
        target = AffineOperator(Matrix.direct_sum(Matrix.identity(1 + d, field), J0, field=field), e1)
        return record_stage(state, "flow_straightening", target, [Flow(dim=n, G=G, signature=(1,) * d)], negative=0)

    q = count_negative_real_eigenvalues(D)
    if q == 0:
        G = matrix_log(D, want_real=True)
        target = AffineOperator(Matrix.direct_sum(Matrix.identity(1 + d, field), J0, field=field), e1)
        return record_stage(state, "flow_straightening", target, [Flow(dim=n, G=G, signature=(1,) * d)], negative=0)

    W, P, N = split_negative_real(D.numeric, count=q)
    if N.shape[0] != q:
        raise InternalConsistencyError(f"numeric split found {N.shape[0]} negative eigenvalues, exact count is {q}")
    S = np.eye(n)
    S[1:1 + d, 1:1 + d] = W
    parts = []
    if P.shape[0]:
        parts.append(matrix_log(P, want_real=True, negative=0))
    parts.append(matrix_log(-N, want_real=True, negative=0))
    G = scipy.linalg.block_diag(*parts)
    r, s = divmod(q, 2)
    witnesses = [
        Linear(dim=n, S=S),
        Flow(dim=n, G=G, signature=(1,) * (d - q) + (-1,) * q),
        Flow(dim=n, G=_pairing_generator(d, q), signature=(1,) * (d - s) + (-1,) * s),
    ]
    core = [Matrix.identity(1 + d - s, field)]
    if s:
        core.append(Matrix.diag([-1], field))
    target = AffineOperator(Matrix.direct_sum(*core, J0, field=field), e1)
    return record_stage(state, "flow_straightening", target, witnesses, negative=q, paired=r, epsilon=-1 if s else 1)
