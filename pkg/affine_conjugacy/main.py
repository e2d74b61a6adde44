from affine_conjugacy.utils.settings import settings  # loads .env before anything reads the environment

import logging
from typing import Any, Dict, Optional

from fastapi import FastAPI, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from affine_conjugacy.engine.conjugacy import canonical_affine, decide_affine, fixed_point
from affine_conjugacy.engine.errors import ClassificationError
from affine_conjugacy.engine.exact_core import format_scalar
from affine_conjugacy.engine.spectral_analysis import spectral_split
from affine_conjugacy.engine.witness import nofix_pipeline, verify_conjugacy, witness_from_dict
from affine_conjugacy.utils.pdf_generator import assemble_report, generate_pdf_from_report
from affine_conjugacy.utils.serialization import parse_operator, witness_document

logger = logging.getLogger(__name__)

# -------------------------------
# Initialize FastAPI
# -------------------------------
app = FastAPI(title="Affine Conjugacy API", version="1.0")

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=False,
    allow_methods=["*"],
    allow_headers=["*"],
)


@app.exception_handler(ClassificationError)
async def classification_error_handler(request, exc: ClassificationError):
    return JSONResponse(status_code=exc.http_status, content=exc.to_dict())


# -------------------------------
# Request Models
# -------------------------------
class OperatorInput(BaseModel):
    operator: Dict[str, Any]
    field: Optional[str] = None


class PairInput(BaseModel):
    f: Dict[str, Any]
    g: Dict[str, Any]
    field: Optional[str] = None


class WitnessInput(BaseModel):
    operator: Dict[str, Any]
    field: Optional[str] = None
    samples: Optional[int] = Field(default=None, ge=1)
    seed: Optional[int] = Field(default=None, ge=0)
    tolerance: Optional[float] = Field(default=None, gt=0)


class VerifyInput(BaseModel):
    f: Dict[str, Any]
    g: Dict[str, Any]
    witness: Dict[str, Any]
    field: Optional[str] = None
    samples: Optional[int] = Field(default=None, ge=1)
    seed: Optional[int] = Field(default=None, ge=0)
    tolerance: Optional[float] = Field(default=None, gt=0)


class ReportInput(BaseModel):
    f: Dict[str, Any]
    g: Optional[Dict[str, Any]] = None
    field: Optional[str] = None


def _pair(data: PairInput | VerifyInput):
    f, g = parse_operator(data.f, data.field), parse_operator(data.g, data.field)
    if data.field is None and f.field is not g.field:
        f, g = f.coerce("C"), g.coerce("C")
    return f, g


# -------------------------------
# Root Endpoint
# -------------------------------
@app.get("/")
def root():
    return {"message": "Affine Conjugacy API is running", "tolerance": settings.tolerance, "samples": settings.samples}


# -------------------------------
# Classification
# -------------------------------
@app.post("/fixed-point")
def run_fixed_point(data: OperatorInput):
    f = parse_operator(data.operator, data.field)
    p = fixed_point(f)
    return {"field": f.field.label, "fixed_point": None if p is None else [format_scalar(v) for v in p]}


@app.post("/split")
def run_split(data: OperatorInput):
    f = parse_operator(data.operator, data.field)
    return {
        "field": f.field.label,
        **spectral_split(f.A).to_dict(),
    }


@app.post("/canonical")
def run_canonical(data: OperatorInput):
    f = parse_operator(data.operator, data.field)
    return canonical_affine(f).model_dump(mode="json")


@app.post("/decide")
def run_decide(data: PairInput):
    f, g = _pair(data)
    return decide_affine(f, g).model_dump(mode="json")


# -------------------------------
# Witnesses
# -------------------------------
@app.post("/witness")
def run_witness(data: WitnessInput):
    f = parse_operator(data.operator, data.field)
    result = nofix_pipeline(f, samples=data.samples, seed=data.seed, tolerance=data.tolerance)
    return witness_document(result)


@app.post("/verify")
def run_verify(data: VerifyInput):
    f, g = _pair(data)
    h = witness_from_dict(data.witness)
    report = verify_conjugacy(f, g, h, samples=data.samples, seed=data.seed, tolerance=data.tolerance)
    return report.model_dump(mode="json")


# -------------------------------
# Generate PDF Endpoint
# -------------------------------
@app.post("/report")
def run_report(data: ReportInput):
    f = parse_operator(data.f, data.field)
    g = parse_operator(data.g, data.field) if data.g is not None else None
    if g is not None and data.field is None and f.field is not g.field:
        f, g = f.coerce("C"), g.coerce("C")
    pdf_bytes = generate_pdf_from_report(assemble_report(f, g))
    logger.info("report generated (%d bytes)", len(pdf_bytes))
    return Response(
        content=pdf_bytes,
        media_type="application/pdf",
        headers={"Content-Disposition": 'attachment; filename="classification_report.pdf"'},
    )
