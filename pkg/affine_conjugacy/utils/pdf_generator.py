from datetime import datetime, timezone
from typing import Any, Dict, List, Optional

from fpdf import FPDF
from fpdf.enums import XPos, YPos

from affine_conjugacy.engine.conjugacy import canonical_affine, decide_affine, fixed_point
from affine_conjugacy.engine.errors import ClassificationError
from affine_conjugacy.engine.exact_core import format_scalar
from affine_conjugacy.engine.linalg import AffineOperator
from affine_conjugacy.utils.serialization import operator_to_dict

# -----------------------------
# Palette / constants
# -----------------------------
PAL = {
    "brand": (25, 118, 210),      # banner blue
    "ink": (28, 28, 30),          # main text
    "muted": (95, 104, 112),      # labels
    "line": (215, 220, 225),      # borders
    "soft": (246, 248, 251),      # card bg
    "chip": (242, 245, 250),      # chip bg
    "ok": (76, 175, 80),
    "warn": (255, 193, 7),
    "bad": (244, 67, 54),
}

FONT = "Helvetica"


# -----------------------------
# Helpers
# -----------------------------
def safe_str(v: Any, max_token_len: int = 60) -> str:
    """Latin-1 text with overlong tokens broken so multi_cell can wrap them."""
    s = "" if v is None else str(v)
    s = s.encode("latin-1", "replace").decode("latin-1")
    out = []
    for tok in s.split(" "):
        if len(tok) > max_token_len:
            out.append(" ".join(tok[i:i + max_token_len] for i in range(0, len(tok), max_token_len)))
        else:
            out.append(tok)
    return " ".join(out)


def matrix_lines(rows: List[List[str]]) -> List[str]:
    if not rows:
        return ["(empty)"]
    widths = [max(len(r[j]) for r in rows) for j in range(len(rows[0]))] if rows[0] else []
    return ["[ " + "  ".join(c.rjust(w) for c, w in zip(r, widths)) + " ]" for r in rows]


def summand_text(s: Dict[str, Any]) -> str:
    count = s.get("count", 1)
    size = s.get("size", 1)
    if s.get("factor") is not None:
        label = f"J_{size}(root of {s.get('factor_text')})"
        if s.get("realified"):
            label += "^R"
        if s.get("approx"):
            label += " ~ " + ", ".join(s["approx"])
    else:
        label = f"J_{size}({s.get('eigenvalue')})" if size > 1 or s.get("eigenvalue") == "0" else f"[{s.get('eigenvalue')}]"
    return f"{count} x {label}" if count > 1 else label


# -----------------------------
# PDF class
# -----------------------------
class ClassificationReport(FPDF):
    def __init__(self, title: str = "Affine Conjugacy Report"):
        super().__init__(orientation="P", unit="mm", format="A4")
        self.report_title = title
        self.set_margins(16, 18, 16)
        self.set_auto_page_break(True, 20)
        self.alias_nb_pages()
        self.set_title(title)
        self.set_author("affine-conjugacy")
        self.set_creation_date(datetime(2000, 1, 1, tzinfo=timezone.utc))

        self.row_gap = 2.0
        self.line_h = 5.0

    # ---- utilities ----
    def _cw(self) -> float:
        return self.w - self.l_margin - self.r_margin

    def ensure_space(self, needed: float):
        if self.get_y() + needed > self.page_break_trigger:
            self.add_page()

    def line_out(self, text: str, style: str = "", fs: int = 10, h: Optional[float] = None):
        self.set_font(FONT, style, fs)
        self.multi_cell(self._cw(), h or self.line_h, safe_str(text), new_x=XPos.LMARGIN, new_y=YPos.NEXT)

    # ------- aligned label/value row -------
    def kv_row(self, label: str, value: str, lab_w: float = 45, fs: int = 10):
        self.ensure_space(12)
        x0, y0 = self.l_margin, self.get_y()
        self.set_font(FONT, "B", fs)
        self.set_text_color(*PAL["muted"])
        self.set_xy(x0, y0)
        self.cell(lab_w, self.line_h, safe_str(label))
        self.set_font(FONT, "", fs)
        self.set_text_color(*PAL["ink"])
        self.set_xy(x0 + lab_w, y0)
        self.multi_cell(self._cw() - lab_w, self.line_h, safe_str(value), new_x=XPos.LMARGIN, new_y=YPos.NEXT)
        self.ln(self.row_gap)

    def bullet_list(self, items: List[str], indent: float = 3, fs: int = 10):
        self.set_font(FONT, "", fs)
        for it in items or []:
            self.set_x(self.l_margin + indent)
            self.multi_cell(self._cw() - indent, self.line_h, f"- {safe_str(it)}", new_x=XPos.LMARGIN, new_y=YPos.NEXT)
        self.ln(self.row_gap)

    def mono_block(self, lines: List[str], fs: int = 9):
        self.set_font("Courier", "", fs)
        for ln_text in lines:
            self.set_x(self.l_margin + 4)
            self.multi_cell(self._cw() - 4, 4.5, safe_str(ln_text, 200), new_x=XPos.LMARGIN, new_y=YPos.NEXT)
        self.ln(self.row_gap)

    def chip(self, text: str, good: bool):
        self.set_fill_color(*PAL["chip"])
        self.set_draw_color(*(PAL["ok"] if good else PAL["bad"]))
        self.set_text_color(*(PAL["ok"] if good else PAL["bad"]))
        self.set_font(FONT, "B", 10)
        w = self.get_string_width(text) + 8
        self.cell(w, 7, text, border=1, align="C", fill=True, new_x=XPos.LMARGIN, new_y=YPos.NEXT)
        self.set_text_color(*PAL["ink"])
        self.ln(self.row_gap)

    # ---- header/footer ----
    def header(self):
        self.set_fill_color(*PAL["brand"])
        self.rect(0, 0, self.w, 20, "F")
        self.set_y(6)
        self.set_text_color(255, 255, 255)
        self.set_font(FONT, "B", 15)
        self.cell(0, 7, self.report_title, align="C", new_x=XPos.LMARGIN, new_y=YPos.NEXT)
        self.set_font(FONT, "", 9)
        self.cell(0, 5, "Topological classification of affine operators", align="C", new_x=XPos.LMARGIN, new_y=YPos.NEXT)
        self.ln(6)
        self.set_text_color(*PAL["ink"])

    def footer(self):
        self.set_y(-18)
        self.set_draw_color(*PAL["line"])
        self.set_line_width(0.2)
        self.line(self.l_margin, self.get_y(), self.w - self.r_margin, self.get_y())
        self.ln(2)
        self.set_font(FONT, "", 9)
        self.set_text_color(140, 140, 140)
        self.cell(0, 5, f"Page {self.page_no()}/{{nb}}", align="C")
        self.set_text_color(*PAL["ink"])

    def section(self, title: str):
        self.ensure_space(20)
        self.set_fill_color(236, 239, 244)
        self.set_draw_color(180, 190, 210)
        y = self.get_y()
        self.rect(self.l_margin, y, self._cw(), 8, "DF")
        self.set_font(FONT, "B", 11)
        self.set_text_color(30, 58, 138)
        self.set_xy(self.l_margin + 2, y + 2)
        self.cell(0, 4, safe_str(title))
        self.ln(10)
        self.set_text_color(*PAL["ink"])

    # ---- content blocks ----
    def block_operator(self, name: str, op: Dict[str, Any], fixed: Optional[List[str]]):
        self.section(f"Operator {name}")
        self.kv_row("Field:", op["A"]["field"])
        self.kv_row("Dimension:", str(len(op["b"])))
        self.line_out("Linear part A", "B")
        self.mono_block(matrix_lines(op["A"]["rows"]))
        self.kv_row("Translation b:", "[" + ", ".join(op["b"]) + "]")
        self.kv_row("Fixed point:", "none" if fixed is None else "[" + ", ".join(fixed) + "]")

    def block_canonical(self, name: str, form: Dict[str, Any]):
        self.section(f"Canonical form of {name}")
        if form.get("kind") == "NoFixedPoint":
            eps = form.get("epsilon", 1)
            self.kv_row("Type:", "no fixed point")
            self.kv_row("k:", str(form.get("k")))
            self.kv_row("Orientation:", "+1" if eps == 1 else "-1")
            self.kv_row("Segre:", str(form.get("segre") or "[]"))
            shape = f"x -> (I_{form.get('k')}" + (" + [-1]" if eps == -1 else "") + (" + J0" if form.get("segre") else "") + ") x + e1"
            self.kv_row("Shape:", shape)
        else:
            self.kv_row("Type:", "fixed point (linear)")
            self.bullet_list([summand_text(s) for s in form.get("summands", [])] or ["(zero-dimensional)"])

    def block_verdict(self, verdict: Dict[str, Any]):
        self.section("Verdict")
        good = bool(verdict.get("conjugate"))
        self.chip(("CONJUGATE" if good else "NOT CONJUGATE") + f"  ({verdict.get('reason')})", good)
        self.kv_row("Field:", verdict.get("field", ""))
        evidence = verdict.get("evidence") or {}
        for side, data in evidence.items():
            if isinstance(data, dict):
                self.line_out(f"Evidence for {side}", "B")
                self.bullet_list([f"{k}: {v}" for k, v in sorted(data.items())], indent=4, fs=9)

    def block_error(self, error: Dict[str, Any]):
        self.section("Classification error")
        self.kv_row("Code:", error.get("code", ""))
        self.kv_row("Message:", error.get("error", ""))


# -----------------------------
# Report assembly
# -----------------------------
def _fixed(f: AffineOperator) -> Optional[List[str]]:
    p = fixed_point(f)
    return None if p is None else [format_scalar(v) for v in p]


def assemble_report(f: AffineOperator, g: Optional[AffineOperator] = None) -> Dict[str, Any]:
    """Everything the PDF shows, as plain data; classification errors are recorded, not raised."""
    report: Dict[str, Any] = {"operators": {}, "fixed_points": {}, "canonical": {}, "errors": {}}
    for name, op in (("f", f), ("g", g)):
        if op is None:
            continue
        report["operators"][name] = operator_to_dict(op)
        report["fixed_points"][name] = _fixed(op)
        try:
            report["canonical"][name] = canonical_affine(op).model_dump(mode="json")
        except ClassificationError as exc:
            report["errors"][name] = exc.to_dict()
    if g is not None:
        try:
            report["verdict"] = decide_affine(f, g).model_dump(mode="json")
        except ClassificationError as exc:
            report["errors"]["verdict"] = exc.to_dict()
    return report


def generate_pdf_from_report(report: Dict[str, Any]) -> bytes:
    pdf = ClassificationReport()
    pdf.add_page()
    for name, op in report.get("operators", {}).items():
        pdf.block_operator(name, op, report.get("fixed_points", {}).get(name))
        if name in report.get("canonical", {}):
            pdf.block_canonical(name, report["canonical"][name])
    if report.get("verdict"):
        pdf.block_verdict(report["verdict"])
    for error in report.get("errors", {}).values():
        pdf.block_error(error)
    return bytes(pdf.output())
