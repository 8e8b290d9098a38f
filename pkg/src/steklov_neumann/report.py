"""CSV tables, SVG line plots and the stdout summary."""
from __future__ import annotations

import csv
import io
import math
import os
import tempfile
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np


def format_value(v) -> str:
    """17-significant-digit text for floats (round-trips exactly); ints and labels verbatim."""
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    x = float(v)
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r} in result table")
    return format(x, ".17g")


@dataclass
class ResultTable:
    """Fixed column set with rows in deterministic order."""

    columns: tuple
    rows: list = field(default_factory=list)

    def add(self, **values):
        if set(values) != set(self.columns):
            raise KeyError(f"row keys {sorted(values)} do not match columns {list(self.columns)}")
        self.rows.append(tuple(values[c] for c in self.columns))

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([format_value(v) for v in row])
        return buf.getvalue()


def atomic_write(path: str | os.PathLike, text: str):
    """Write UTF-8 text with LF endings via a temporary file and rename."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _parse_cell(v: str):
    try:
        return float(v)
    except ValueError:
        return v


def read_csv(path) -> tuple:
    """``(header, rows)``; numeric cells come back as floats, labels as text."""
    with open(path, encoding="utf-8", newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        return tuple(header), [tuple(_parse_cell(v) for v in row) for row in r]


# -- SVG ---------------------------------------------------------------------

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _ticks(lo: float, hi: float, count: int = 5):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    out = []
    t = start
    while t <= hi + 1e-9 * step:
        out.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return out


def svg_line_plot(x, series: dict, xlabel: str, ylabel: str, title: str = "",
                  width: int = 640, height: int = 420) -> str:
    """Polyline plot of ``series`` (name -> y values) against ``x``."""
    x = np.asarray(x, dtype=float)
    ys = {k: np.asarray(v, dtype=float) for k, v in series.items()}
    if any(v.shape != x.shape for v in ys.values()):
        raise ValueError("every series must match x in length")
    left, right, top, bottom = 70, 150, 40, 50
    pw, ph = width - left - right, height - top - bottom
    x0, x1 = float(x.min()), float(x.max())
    allv = np.concatenate(list(ys.values())) if ys else np.zeros(1)
    y0, y1 = float(allv.min()), float(allv.max())
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    pad = 0.05 * (y1 - y0) if y1 > y0 else 0.5 * max(abs(y0), 1.0)
    y0, y1 = y0 - pad, y1 + pad

    def X(v):
        return left + pw * (v - x0) / (x1 - x0)

    def Y(v):
        return top + ph * (1 - (v - y0) / (y1 - y0))

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    if title:
        out.append(f'<text x="{left + pw / 2:.2f}" y="{top - 15}" text-anchor="middle" '
                   f'font-size="14">{escape(title)}</text>')
    for t in _ticks(x0, x1):
        if x0 <= t <= x1:
            out.append(f'<line x1="{X(t):.2f}" y1="{top + ph}" x2="{X(t):.2f}" y2="{top + ph + 5}" stroke="black"/>')
            out.append(f'<text x="{X(t):.2f}" y="{top + ph + 18}" text-anchor="middle">{t:.4g}</text>')
    for t in _ticks(y0, y1):
        if y0 <= t <= y1:
            out.append(f'<line x1="{left - 5}" y1="{Y(t):.2f}" x2="{left}" y2="{Y(t):.2f}" stroke="black"/>')
            out.append(f'<text x="{left - 8}" y="{Y(t) + 4:.2f}" text-anchor="end">{t:.4g}</text>')
    out.append(f'<text x="{left + pw / 2:.2f}" y="{height - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="18" y="{top + ph / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 18 {top + ph / 2:.2f})">{escape(ylabel)}</text>')
    for i, (name, y) in enumerate(ys.items()):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(f"{X(a):.2f},{Y(b):.2f}" for a, b in zip(x, y))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        for a, b in zip(x, y):
            out.append(f'<circle cx="{X(a):.2f}" cy="{Y(b):.2f}" r="2.5" fill="{color}"/>')
        ly = top + 15 + 18 * i
        out.append(f'<line x1="{left + pw + 10}" y1="{ly}" x2="{left + pw + 30}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 35}" y="{ly + 4}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# -- summary -----------------------------------------------------------------

@dataclass
class Assertion:
    name: str
    passed: bool
    detail: str = ""


def summary_text(command: str, assertions, diagnostics, enabled: bool = True) -> str:
    lines = [f"== {command} =="]
    if not enabled:
        lines.append("assertions: disabled")
    for a in assertions:
        tag = "PASS" if a.passed else "FAIL"
        lines.append(f"{tag} {a.name}" + (f": {a.detail}" if a.detail else ""))
    if diagnostics:
        lines.append("diagnostics:")
        lines.extend(f"  {d}" for d in diagnostics)
    failed = sum(not a.passed for a in assertions) if enabled else 0
    lines.append(f"assertions passed: {len(assertions) - failed}/{len(assertions)}" if enabled
                 else "assertions passed: n/a")
    return "\n".join(lines) + "\n"
