"""Error hierarchy shared by the engine, the CLI and the HTTP layer.

Every error carries a stable ``code`` (part of the public JSON contract)
and the process ``exit_code`` the CLI maps it to.
"""

from __future__ import annotations

from typing import Any, Dict


class ClassificationError(Exception):
    code = "CLASSIFICATION_ERROR"
    exit_code = 2
    http_status = 422

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {"error": self.message, "code": self.code}
        if self.details:
            payload["details"] = self.details
        return payload


class ParseError(ClassificationError):
    code = "PARSE_ERROR"
    exit_code = 3
    http_status = 400


class PreconditionError(ClassificationError):
    code = "PRECONDITION"


class DimensionMismatchError(PreconditionError):
    code = "DIMENSION_MISMATCH"


class FieldMismatchError(PreconditionError):
    code = "FIELD_MISMATCH"


class NonSquareMatrixError(PreconditionError):
    code = "NON_SQUARE"


class NotNilpotentError(PreconditionError):
    code = "NOT_NILPOTENT"


class NotSquareFreeError(PreconditionError):
    code = "NOT_SQUARE_FREE"


class SingularMatrixError(PreconditionError):
    code = "SINGULAR"


class NoRealLogarithmError(PreconditionError):
    code = "NO_REAL_LOG"


class NotRealizableError(PreconditionError):
    code = "NOT_REALIZABLE"


class RootOfUnityError(PreconditionError):
    """Linear part has an eigenvalue that is a primitive k-th root of unity."""

    code = "ROOT_OF_UNITY_PRECONDITION"

    def __init__(self, k: int, message: str | None = None):
        super().__init__(message or f"linear part has a primitive {k}-th root of unity as eigenvalue", k=k)
        self.k = k


class InternalConsistencyError(ClassificationError):
    code = "INTERNAL"
    exit_code = 4
    http_status = 500


class WitnessResidualError(ClassificationError):
    """A numeric witness or matrix logarithm misses the residual tolerance."""

    code = "WITNESS_RESIDUAL"
    exit_code = 1
    http_status = 500
