"""Operator, witness and report (de)serialization.

Operator files (JSON or YAML)::

    {"A": {"field": "R", "rows": [["1", "0"], ["0", "1/2"]]}, "b": ["1", "0"]}

``A`` may also be a bare list of rows. Scalars are strings ("p/q",
"a+b i"), integers, or decimal literals.
"""

import enum
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import orjson
import yaml
from pydantic import BaseModel

from affine_conjugacy.engine.errors import FieldMismatchError, ParseError
from affine_conjugacy.engine.exact_core import ExactComplex, GroundField, format_scalar
from affine_conjugacy.engine.linalg import AffineOperator, Matrix
from affine_conjugacy.engine.witness import Witness, witness_from_dict

logger = logging.getLogger(__name__)

_JSON_OPTIONS = orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY | orjson.OPT_PASSTHROUGH_DATACLASS


# -------------------------------
# JSON output
# -------------------------------
def _default(obj: Any) -> Any:
    if isinstance(obj, BaseModel):
        return obj.model_dump(mode="json")
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, Matrix):
        return obj.to_strings()
    if isinstance(obj, AffineOperator):
        return operator_to_dict(obj)
    if isinstance(obj, Witness):
        return obj.to_dict()
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    if isinstance(obj, (Fraction, ExactComplex)):
        return format_scalar(obj)
    if isinstance(obj, (tuple, set, frozenset)):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(payload: Any) -> str:
    """Sorted-key, 2-space JSON; byte-identical for identical payloads."""
    return orjson.dumps(payload, default=_default, option=_JSON_OPTIONS).decode("utf-8")


# -------------------------------
# Reading files
# -------------------------------
def load_document(path: str | Path) -> Any:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {p}: {exc}") from exc
    try:
        if p.suffix.lower() in (".yaml", ".yml"):
            return yaml.safe_load(text)
        return orjson.loads(text)
    except (orjson.JSONDecodeError, yaml.YAMLError) as exc:
        raise ParseError(f"{p.name}: {exc}") from exc


# -------------------------------
# Operators
# -------------------------------
def parse_matrix(obj: Any, field: GroundField | str | None = None) -> Matrix:
    declared = None
    rows = obj
    if isinstance(obj, dict):
        if "rows" not in obj:
            raise ParseError("matrix object needs a 'rows' entry")
        rows = obj["rows"]
        declared = obj.get("field")
    if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
        raise ParseError("matrix rows must be a list of lists")
    tag = field if field is not None else declared
    M = Matrix.from_rows(rows)
    if tag is None:
        return M
    target = GroundField.parse(tag)
    if target.is_real and not M.field.is_real:
        raise FieldMismatchError("complex entries in an operator declared real")
    return M.coerce(target)


def parse_operator(data: Any, field: GroundField | str | None = None) -> AffineOperator:
    """Build an operator; a complex entry forces C, an explicit R with complex entries is an error."""
    if not isinstance(data, dict) or "A" not in data:
        raise ParseError("operator needs an 'A' entry")
    declared = field if field is not None else data.get("field")
    A = parse_matrix(data["A"], declared)
    b = data.get("b")
    if b is None:
        b = [0] * A.rows
    if not isinstance(b, list):
        raise ParseError("'b' must be a list")
    values = tuple(GroundField.QI.coerce(v) for v in b)
    f = AffineOperator(A, values)
    if declared is not None:
        target = GroundField.parse(declared)
        if target.is_real and not f.field.is_real:
            raise FieldMismatchError("complex translation in an operator declared real")
        f = f.coerce(target)
    logger.info("parsed %dx%d operator over %s", f.n, f.n, f.field.label)
    return f


def load_operator(path: str | Path, field: GroundField | str | None = None) -> AffineOperator:
    return parse_operator(load_document(path), field)


def operator_to_dict(f: AffineOperator) -> Dict[str, Any]:
    return {
        "A": {"field": f.field.label, "rows": f.A.to_strings()},
        "b": [format_scalar(v) for v in f.b],
    }


# -------------------------------
# Witness files
# -------------------------------
def witness_document(result, tolerance: Optional[float] = None) -> Dict[str, Any]:
    """File form of a pipeline result: the composite witness plus what it was checked against."""
    doc = result.witness.to_dict()
    doc.update(
        field=result.canonical.field.label,
        tolerance=result.residual.tolerance if tolerance is None else tolerance,
        seed=result.residual.seed,
        canonical=operator_to_dict(result.canonical),
        form=result.form.model_dump(mode="json"),
        residual=result.residual.model_dump(mode="json"),
    )
    return doc


def load_witness(path: str | Path) -> Tuple[Witness, Dict[str, Any]]:
    doc = load_document(path)
    if not isinstance(doc, dict):
        raise ParseError("witness file must hold an object")
    return witness_from_dict(doc), doc
