"""Moodle-ready HTML fragments: data tables, embedded PNG charts,
statistical output blocks.

Everything here is deterministic. Curly braces in data are entity-escaped
so rendered values can never be mistaken for CLOZE groups.
"""

from __future__ import annotations

import base64
import html as _html
import math
import re
from dataclasses import dataclass

from . import png
from .numfmt import format_number
from .stattests import StatResult


class HtmlGenError(ValueError):
    pass


def escape_cell(value) -> str:
    """HTML-escape a cell value; braces become entities (CLOZE safety)."""
    if isinstance(value, str):
        text = value
    else:
        text = format_number(float(value))
    return (_html.escape(text, quote=False)
            .replace("{", "&#123;").replace("}", "&#125;"))


@dataclass(frozen=True)
class DataTable:
    """Rectangular data: ordered (name, values) columns of equal length."""
    columns: tuple

    def __init__(self, columns):
        cols = tuple((name, tuple(values)) for name, values in columns)
        if not cols:
            raise HtmlGenError("table needs at least one column")
        nrows = len(cols[0][1])
        if any(len(v) != nrows for _, v in cols):
            raise HtmlGenError("columns must have equal length")
        names = [n for n, _ in cols if n is not None]
        if len(names) != len(set(names)):
            raise HtmlGenError("column names must be unique")
        object.__setattr__(self, "columns", cols)

    @property
    def nrows(self) -> int:
        return len(self.columns[0][1])

    @property
    def names(self) -> list:
        return [n for n, _ in self.columns]

    def has_names(self) -> bool:
        return any(n is not None for n, _ in self.columns)


_TABLE_STYLE = ' border="1" cellpadding="4" style="border-collapse:collapse;"'


def _is_numeric_value(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def render_vector_table(x, ncol: int = 10) -> str:
    """Lay a vector out row-major as an HTML table with ncol columns.

    The last row is padded with empty cells; reading the cells left to
    right, top to bottom reproduces x in order.
    """
    x = list(x)
    if not x:
        raise HtmlGenError("cannot render an empty vector")
    if ncol < 1:
        raise HtmlGenError("ncol must be >= 1")
    nrows = math.ceil(len(x) / ncol)
    rows = []
    for r in range(nrows):
        cells = []
        for c in range(ncol):
            i = r * ncol + c
            if i < len(x):
                align = "right" if _is_numeric_value(x[i]) else "left"
                cells.append(f'<td style="text-align:{align}">{escape_cell(x[i])}</td>')
            else:
                cells.append("<td></td>")
        rows.append("<tr>" + "".join(cells) + "</tr>")
    return f"<table{_TABLE_STYLE}>" + "".join(rows) + "</table>"


def render_data_table(t: DataTable) -> str:
    """Header row when any column is named; one <tr> per data row."""
    parts = [f"<table{_TABLE_STYLE}>"]
    if t.has_names():
        ths = "".join(f"<th>{escape_cell(n if n is not None else '')}</th>"
                      for n in t.names)
        parts.append("<tr>" + ths + "</tr>")
    for r in range(t.nrows):
        cells = []
        for _, values in t.columns:
            v = values[r]
            align = "right" if _is_numeric_value(v) else "left"
            cells.append(f'<td style="text-align:{align}">{escape_cell(v)}</td>')
        parts.append("<tr>" + "".join(cells) + "</tr>")
    parts.append("</table>")
    return "".join(parts)


_CELL_RE = re.compile(r"<t[dh][^>]*>(.*?)</t[dh]>", re.DOTALL)
_ROW_RE = re.compile(r"<tr>(.*?)</tr>", re.DOTALL)


def table_text_projection(table_html: str) -> str:
    """Plain-text form of a rendered table, as a browser copy produces it:
    one line per row, cells separated by tabs."""
    lines = []
    for row in _ROW_RE.findall(table_html):
        cells = [_html.unescape(c) for c in _CELL_RE.findall(row)]
        lines.append("\t".join(cells))
    return "\n".join(lines)


def embed_png(data: bytes) -> str:
    """Inline a PNG as a data-URI <img>; standard base64, no line breaks."""
    if not data.startswith(png.PNG_SIGNATURE):
        raise HtmlGenError("not a PNG (bad signature)")
    b64 = base64.b64encode(data).decode("ascii")
    return f'<img src="data:image/png;base64,{b64}">'


# ---------------------------------------------------------------------------
# charts

_MARGIN_LEFT = 55
_MARGIN_RIGHT = 15
_MARGIN_TOP = 15
_MARGIN_BOTTOM = 35


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    step = 10.0 ** math.floor(math.log10(span / target))
    for mult in (1, 2, 5, 10):
        if span / (step * mult) <= target:
            step *= mult
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * span:
        ticks.append(0.0 if abs(t) < 1e-12 * span else t)
        t += step
    return ticks


def _tick_label(v: float) -> str:
    return format_number(float(f"{v:.6g}"))


def histogram_geometry(x: list[float], binwidth: float) -> dict:
    """Bin edges and density heights; tested separately from rasterization."""
    if not x:
        raise HtmlGenError("empty data")
    if binwidth <= 0:
        raise HtmlGenError("binwidth must be positive")
    lo = math.floor(min(x) / binwidth) * binwidth
    nbins = max(1, math.ceil((max(x) - lo) / binwidth + 1e-9))
    counts = [0] * nbins
    for v in x:
        i = min(nbins - 1, int((v - lo) / binwidth))
        counts[i] += 1
    n = len(x)
    bars = []
    for i, cnt in enumerate(counts):
        bars.append({"left": lo + i * binwidth,
                     "right": lo + (i + 1) * binwidth,
                     "density": cnt / (n * binwidth)})
    return {"bars": bars, "xmin": lo, "xmax": lo + nbins * binwidth,
            "ymax": max(b["density"] for b in bars)}


def scatter_geometry(x: list[float], y: list[float],
                     width: int = 640, height: int = 480) -> dict:
    """Data-to-pixel mapping for a scatter plot."""
    if len(x) != len(y):
        raise HtmlGenError("x and y must have equal length")
    if not x:
        raise HtmlGenError("empty data")
    xmin, xmax = min(x), max(x)
    ymin, ymax = min(y), max(y)
    if xmax == xmin:
        xmin, xmax = xmin - 0.5, xmax + 0.5
    if ymax == ymin:
        ymin, ymax = ymin - 0.5, ymax + 0.5
    px0, px1 = _MARGIN_LEFT, width - _MARGIN_RIGHT
    py0, py1 = height - _MARGIN_BOTTOM, _MARGIN_TOP

    def to_px(v):
        return px0 + (v - xmin) / (xmax - xmin) * (px1 - px0)

    def to_py(v):
        return py0 + (v - ymin) / (ymax - ymin) * (py1 - py0)

    points = [(round(to_px(a)), round(to_py(b))) for a, b in zip(x, y)]
    return {"points": points, "xmin": xmin, "xmax": xmax,
            "ymin": ymin, "ymax": ymax}


def _draw_axes(canvas: png.Canvas, xmin, xmax, ymax, width, height,
               to_px, to_py) -> None:
    px0, px1 = _MARGIN_LEFT, width - _MARGIN_RIGHT
    py0, py1 = height - _MARGIN_BOTTOM, _MARGIN_TOP
    canvas.hline(px0, px1, py0)
    canvas.vline(px0, py1, py0)
    for t in _nice_ticks(xmin, xmax):
        px = round(to_px(t))
        if px0 <= px <= px1:
            canvas.vline(px, py0, py0 + 4)
            label = _tick_label(t)
            canvas.text(px - png.text_width(label) // 2, py0 + 7, label)
    for t in _nice_ticks(0.0, ymax):
        py = round(to_py(t))
        if py1 <= py <= py0:
            canvas.hline(px0 - 4, px0, py)
            label = _tick_label(t)
            canvas.text(px0 - 7 - png.text_width(label), py - 3, label)


def render_chart(kind: str, data: dict, options: dict | None = None) -> bytes:
    """Rasterize a histogram or scatter plot to deterministic PNG bytes."""
    options = dict(options or {})
    width = int(options.get("width_px", 640))
    height = int(options.get("height_px", 480))
    canvas = png.Canvas(width, height)
    px0, px1 = _MARGIN_LEFT, width - _MARGIN_RIGHT
    py0, py1 = height - _MARGIN_BOTTOM, _MARGIN_TOP
    if kind == "histogram":
        geom = histogram_geometry(list(data["x"]), float(options["binwidth"]))
        xmin, xmax, ymax = geom["xmin"], geom["xmax"], geom["ymax"]

        def to_px(v):
            return px0 + (v - xmin) / (xmax - xmin) * (px1 - px0)

        def to_py(v):
            return py0 + v / (ymax * 1.05) * (py1 - py0)

        for bar in geom["bars"]:
            bx0, bx1 = round(to_px(bar["left"])), round(to_px(bar["right"]))
            by = round(to_py(bar["density"]))
            if bar["density"] > 0:
                canvas.fill_rect(bx0 + 1, by + 1, bx1 - 1, py0 - 1, png.WHITE)
            canvas.rect(bx0, by, bx1, py0)
        _draw_axes(canvas, xmin, xmax, ymax, width, height, to_px, to_py)
    elif kind == "scatter":
        geom = scatter_geometry(list(data["x"]), list(data["y"]), width, height)
        xmin, xmax = geom["xmin"], geom["xmax"]
        ymin, ymax = geom["ymin"], geom["ymax"]

        def to_px(v):
            return px0 + (v - xmin) / (xmax - xmin) * (px1 - px0)

        def to_py(v):
            return py0 + (v - ymin) / (ymax - ymin) * (py1 - py0)

        for (px, py) in geom["points"]:
            canvas.fill_rect(px - 1, py - 1, px + 1, py + 1)
        canvas.hline(px0, px1, py0)
        canvas.vline(px0, py1, py0)
        for t in _nice_ticks(xmin, xmax):
            px = round(to_px(t))
            if px0 <= px <= px1:
                canvas.vline(px, py0, py0 + 4)
                label = _tick_label(t)
                canvas.text(px - png.text_width(label) // 2, py0 + 7, label)
        for t in _nice_ticks(ymin, ymax):
            py = round(to_py(t))
            if py1 <= py <= py0:
                canvas.hline(px0 - 4, px0, py)
                label = _tick_label(t)
                canvas.text(px0 - 7 - png.text_width(label), py - 3, label)
    else:
        raise HtmlGenError(f"unknown chart kind {kind!r}")
    return canvas.to_png()


# ---------------------------------------------------------------------------
# statistical output blocks

def _fmt_stat(v: float) -> str:
    if v == int(v):
        return format_number(v)
    return format_number(float(f"{v:.6g}"))


def render_stat_block(result: StatResult) -> str:
    """Fixed-layout monospace block students read numbers from."""
    f = result.fields()
    lines = []
    if result.kind == "binom_exact":
        lines.append("Exact binomial test")
        lines.append(f"successes = {_fmt_stat(result.statistic)}, "
                     f"trials = {_fmt_stat(f['n'])}, "
                     f"p-value = {_fmt_stat(result.p_value)}")
        lines.append(f"estimated proportion = {_fmt_stat(result.estimate)}")
    elif result.kind == "simple_regression":
        lines.append("Simple linear regression")
        lines.append(f"{'':>12}{'Estimate':>12}{'Std.Error':>12}")
        lines.append(f"{'(Intercept)':>12}{_fmt_stat(f['intercept']):>12}"
                     f"{_fmt_stat(f['se_intercept']):>12}")
        lines.append(f"{'x':>12}{_fmt_stat(f['slope']):>12}"
                     f"{_fmt_stat(f['se_slope']):>12}")
        lines.append(f"slope: t = {_fmt_stat(result.statistic)}, "
                     f"df = {_fmt_stat(result.df)}, "
                     f"p-value = {_fmt_stat(result.p_value)}")
    else:
        title = ("One sample t-test" if result.kind == "t_one_sample"
                 else "Welch two sample t-test")
        lines.append(title)
        lines.append(f"t = {_fmt_stat(result.statistic)}, "
                     f"df = {_fmt_stat(result.df)}, "
                     f"p-value = {_fmt_stat(result.p_value)}")
        lines.append(f"estimate = {_fmt_stat(result.estimate)}")
    lines.append(f"95 percent confidence interval: "
                 f"{_fmt_stat(result.conf_low)} {_fmt_stat(result.conf_high)}")
    body = _html.escape("\n".join(lines), quote=False)
    return f'<pre style="font-family:monospace">{body}</pre>'
