import logging
from typing import Any, Dict

from affine_conjugacy.engine.conjugacy import canonical_affine, realize
from affine_conjugacy.engine.errors import InternalConsistencyError, WitnessResidualError
from affine_conjugacy.engine.witness import Composite, verify_conjugacy

logger = logging.getLogger(__name__)


# -------------------------------
# Final check against the canonical form
# -------------------------------
def verification_stage(state: Dict[str, Any]) -> Dict[str, Any]:
    f = state["operator"]
    form = canonical_affine(f)
    canonical = realize(form)
    reduced = state["current"]
    if reduced.A.entries != canonical.A.entries or tuple(reduced.b) != tuple(canonical.b):
        raise InternalConsistencyError(
            "reduction disagrees with the canonical form",
            reduced=str(reduced),
            canonical=str(canonical),
        )
    witness = Composite(dim=f.n, stages=tuple(state["stages"]))
    options = state.get("options", {})
    report = verify_conjugacy(f, canonical, witness, **options)
    if not report.passed:
        raise WitnessResidualError(
            f"witness residual {report.residual:.3e} exceeds tolerance {report.tolerance:.1e}",
            residual=report.residual,
            tolerance=report.tolerance,
            argmax=report.argmax,
        )
    logger.info("verification residual %.3e over %d samples", report.residual, report.samples)
    state.update(form=form, canonical=canonical, witness=witness, residual=report)
    state["trace"].append({"stage": "verification", "residual": report.residual, "exact": report.exact})
    return state
