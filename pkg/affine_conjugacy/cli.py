"""Command-line front end.

    python -m affine_conjugacy.cli decide f.json g.json --field R
    python -m affine_conjugacy.cli canonical f.yaml --format pretty
    python -m affine_conjugacy.cli witness f.json --out f.witness.json
    python -m affine_conjugacy.cli verify f.json g.json --witness f.witness.json
    python -m affine_conjugacy.cli canonical --corpus operators/

Exit codes: 0 success / conjugate, 1 not conjugate or residual above
tolerance, 2 precondition violation, 3 parse error, 4 internal error.
"""

import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple

import orjson
import yaml
from pydantic import BaseModel, Field, ValidationError
from tqdm import tqdm

from affine_conjugacy.engine.conjugacy import canonical_affine, decide_affine, fixed_point
from affine_conjugacy.engine.errors import ClassificationError, ParseError, PreconditionError
from affine_conjugacy.engine.exact_core import format_scalar
from affine_conjugacy.engine.spectral_analysis import spectral_split
from affine_conjugacy.engine.witness import nofix_pipeline, verify_conjugacy
from affine_conjugacy.utils.pdf_generator import assemble_report, generate_pdf_from_report
from affine_conjugacy.utils.serialization import dumps, load_operator, load_witness, witness_document
from affine_conjugacy.utils.settings import settings

logger = logging.getLogger(__name__)

ARITY = {"fixed-point": (1, 1), "split": (1, 1), "canonical": (1, 1), "witness": (1, 1),
         "decide": (2, 2), "verify": (2, 2), "report": (1, 2), "serve": (0, 0)}
OPERATOR_SUFFIXES = (".json", ".yaml", ".yml")


# -------------------------------
# Run configuration
# -------------------------------
class RunConfig(BaseModel):
    command: Literal["fixed-point", "split", "canonical", "decide", "witness", "verify", "report", "serve"]
    inputs: List[str] = Field(default_factory=list)
    field: Optional[Literal["R", "C"]] = None
    tolerance: float = Field(default=settings.tolerance, gt=0)
    samples: int = Field(default=settings.samples, ge=1)
    seed: int = Field(default=settings.seed, ge=0)
    format: Literal["json", "pretty"] = "json"
    corpus: Optional[str] = None
    out: Optional[str] = None
    witness: Optional[str] = None
    host: str = "127.0.0.1"
    port: int = 8000


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", choices=["R", "C"], default=None, help="ground field (default: inferred)")
    common.add_argument("--tol", type=float, default=settings.tolerance, help="residual tolerance")
    common.add_argument("--samples", type=int, default=settings.samples, help="verification sample points")
    common.add_argument("--seed", type=int, default=settings.seed, help="sampling seed")
    common.add_argument("--format", choices=["json", "pretty"], default="json")
    common.add_argument("--corpus", metavar="DIR", default=None, help="run over every operator (or pair directory) in DIR")
    common.add_argument("--verbose", "-v", action="store_true")

    parser = argparse.ArgumentParser(prog="affine-conjugacy", description="Topological classification of affine operators")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("fixed-point", parents=[common], help="print a fixed point or none").add_argument("inputs", nargs="*")
    sub.add_parser("split", parents=[common], help="Fitting split and modulus partition").add_argument("inputs", nargs="*")
    sub.add_parser("canonical", parents=[common], help="canonical form").add_argument("inputs", nargs="*")
    sub.add_parser("decide", parents=[common], help="decide topological conjugacy").add_argument("inputs", nargs="*")
    w = sub.add_parser("witness", parents=[common], help="build and write a conjugating homeomorphism")
    w.add_argument("inputs", nargs="*")
    w.add_argument("--out", default=None)
    v = sub.add_parser("verify", parents=[common], help="replay a witness file against two operators")
    v.add_argument("inputs", nargs="*")
    v.add_argument("--witness", default=None)
    r = sub.add_parser("report", parents=[common], help="PDF classification report")
    r.add_argument("inputs", nargs="*")
    r.add_argument("--out", default=None)
    s = sub.add_parser("serve", parents=[common], help="run the HTTP API")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8000)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    try:
        return RunConfig(
            command=args.command,
            inputs=list(getattr(args, "inputs", []) or []),
            field=args.field,
            tolerance=args.tol,
            samples=args.samples,
            seed=args.seed,
            format=args.format,
            corpus=args.corpus,
            out=getattr(args, "out", None),
            witness=getattr(args, "witness", None),
            host=getattr(args, "host", "127.0.0.1"),
            port=getattr(args, "port", 8000),
        )
    except ValidationError as exc:
        raise PreconditionError(f"invalid options: {exc.errors()[0]['msg']}") from exc


# -------------------------------
# Commands
# -------------------------------
def _load(path: str, cfg: RunConfig):
    f = load_operator(path, cfg.field)
    logger.info("%s: %dx%d operator over %s%s", path, f.n, f.n, f.field.label, "" if cfg.field else " (inferred)")
    return f


def _load_pair(inputs: Sequence[str], cfg: RunConfig):
    f, g = _load(inputs[0], cfg), _load(inputs[1], cfg)
    if cfg.field is None and f.field is not g.field:
        # an inferred mismatch means one operator has complex entries: compare over C
        f, g = f.coerce("C"), g.coerce("C")
        logger.info("mixed inferred fields; comparing over C")
    return f, g


def execute(cfg: RunConfig, inputs: Sequence[str], out: Optional[str] = None, witness: Optional[str] = None) -> Tuple[int, Any]:
    """Run one command; returns (exit code, JSON-ready payload)."""
    lo, hi = ARITY[cfg.command]
    if not lo <= len(inputs) <= hi:
        raise ParseError(f"{cfg.command} takes {lo if lo == hi else f'{lo}-{hi}'} operator file(s), got {len(inputs)}")

    if cfg.command == "fixed-point":
        f = _load(inputs[0], cfg)
        p = fixed_point(f)
        return 0, {"field": f.field.label, "fixed_point": "none" if p is None else [format_scalar(v) for v in p]}

    if cfg.command == "split":
        f = _load(inputs[0], cfg)
        return 0, {
            "field": f.field.label,
            **spectral_split(f.A).to_dict(),
        }

    if cfg.command == "canonical":
        f = _load(inputs[0], cfg)
        return 0, canonical_affine(f).model_dump(mode="json")

    if cfg.command == "decide":
        f, g = _load_pair(inputs, cfg)
        verdict = decide_affine(f, g)
        return (0 if verdict.conjugate else 1), verdict.model_dump(mode="json")

    if cfg.command == "witness":
        f = _load(inputs[0], cfg)
        result = nofix_pipeline(f, samples=cfg.samples, seed=cfg.seed, tolerance=cfg.tolerance)
        target = Path(out or Path(inputs[0]).with_suffix(".witness.json"))
        target.write_text(dumps(witness_document(result)), encoding="utf-8")
        payload = {
            "out": str(target),
            "form": result.form.model_dump(mode="json"),
            "residual": result.residual.model_dump(mode="json"),
            "stages": [s.kind for s in result.witness.stages],
        }
        return 0, payload

    if cfg.command == "verify":
        if not witness:
            raise ParseError("verify needs --witness FILE")
        f, g = _load_pair(inputs, cfg)
        h, _ = load_witness(witness)
        report = verify_conjugacy(f, g, h, samples=cfg.samples, seed=cfg.seed, tolerance=cfg.tolerance)
        return (0 if report.passed else 1), report.model_dump(mode="json")

    if cfg.command == "report":
        ops = [_load(p, cfg) for p in inputs]
        if len(ops) == 2 and cfg.field is None and ops[0].field is not ops[1].field:
            ops = [op.coerce("C") for op in ops]
        data = assemble_report(*ops)
        target = Path(out or Path(inputs[0]).with_suffix(".pdf"))
        pdf = generate_pdf_from_report(data)
        target.write_bytes(pdf)
        code = 0
        if data.get("verdict") and not data["verdict"]["conjugate"]:
            code = 1
        return code, {"out": str(target), "bytes": len(pdf), "report": data}

    raise ParseError(f"unknown command {cfg.command!r}")


def _safe_execute(cfg: RunConfig, inputs: Sequence[str], out=None, witness=None) -> Tuple[int, Any]:
    try:
        return execute(cfg, inputs, out=out, witness=witness)
    except ClassificationError as exc:
        logger.info("%s failed: %s", cfg.command, exc)
        return exc.exit_code, exc.to_dict()


def _pick(directory: Path, stem: str) -> Optional[Path]:
    for suffix in OPERATOR_SUFFIXES:
        candidate = directory / f"{stem}{suffix}"
        if candidate.exists():
            return candidate
    return None


def corpus_items(cfg: RunConfig) -> List[Tuple[str, List[str], Dict[str, Optional[str]]]]:
    root = Path(cfg.corpus)
    if not root.is_dir():
        raise ParseError(f"corpus {root} is not a directory")
    items = []
    if cfg.command in ("decide", "verify"):
        for sub in sorted(p for p in root.iterdir() if p.is_dir()):
            f, g = _pick(sub, "f"), _pick(sub, "g")
            if f is None or g is None:
                logger.warning("skipping %s: needs f and g operator files", sub.name)
                continue
            w = _pick(sub, "witness")
            items.append((sub.name, [str(f), str(g)], {"witness": str(w) if w else None}))
        return items
    for path in sorted(root.iterdir()):
        if path.suffix.lower() in OPERATOR_SUFFIXES and not path.name.endswith(".witness.json"):
            extra = {"out": str(path.with_suffix(".witness.json"))} if cfg.command == "witness" else {}
            items.append((path.stem, [str(path)], extra))
    return items


def run_corpus(cfg: RunConfig) -> Tuple[int, Any]:
    items = corpus_items(cfg)
    results: Dict[str, Any] = {}
    codes: Dict[str, int] = {}
    with ThreadPoolExecutor(max_workers=settings.workers) as pool:
        futures = {name: pool.submit(_safe_execute, cfg, inputs, **extra) for name, inputs, extra in items}
        for name, fut in tqdm(futures.items(), total=len(futures), desc=cfg.command, disable=None, file=sys.stderr):
            codes[name], results[name] = fut.result()
    exit_code = max(codes.values(), default=0)
    return exit_code, {"command": cfg.command, "items": results, "exit_codes": codes}


# -------------------------------
# Output
# -------------------------------
def render(payload: Any, fmt: str) -> str:
    text = dumps(payload)
    if fmt == "json":
        return text
    return yaml.safe_dump(orjson.loads(text), sort_keys=True, default_flow_style=False, allow_unicode=True).rstrip()


def configure_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else getattr(logging, settings.log_level, logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return ParseError.exit_code if exc.code not in (0, None) else 0
    configure_logging(args.verbose)
    fmt = args.format
    try:
        cfg = config_from_args(args)
        if cfg.command == "serve":
            import uvicorn

            uvicorn.run("affine_conjugacy.main:app", host=cfg.host, port=cfg.port)
            return 0
        if cfg.corpus:
            code, payload = run_corpus(cfg)
        else:
            code, payload = execute(cfg, cfg.inputs, out=cfg.out, witness=cfg.witness)
    except ClassificationError as exc:
        code, payload = exc.exit_code, exc.to_dict()
    print(render(payload, fmt))
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
