"""Deterministic CSV / JSON writers and a minimal SVG line plot."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

SVG_VERSION = "ptlab 0.1.0"


def fmt(v) -> str:
    """9 significant digits; integers and strings pass through."""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.9g}"
    return str(v)


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _plain(obj.real), "im": _plain(obj.imag)}
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def dumps(obj) -> str:
    """JSON with sorted keys; floats use Python's shortest round-trip repr."""
    return json.dumps(_plain(obj), sort_keys=True, indent=2)


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj) + "\n")


# ---------------------------------------------------------------- SVG

W, H, PAD = 640, 480, 60


def _ticks(lo, hi, n=5):
    if hi <= lo:
        hi = lo + 1
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    return [start + k * step for k in range(int((hi - start) / step + 1e-9) + 1)]


def svg_plot(path, series, title="", xlabel="", ylabel="", markers=()) -> None:
    """Line plot.  ``series`` items: dict(x=..., y=..., dashed=bool, label=str).

    ``markers`` are (x, y) points drawn as circles (turning points).
    """
    xs = np.concatenate([np.asarray(s["x"], float) for s in series] + [np.array([m[0] for m in markers])])
    ys = np.concatenate([np.asarray(s["y"], float) for s in series] + [np.array([m[1] for m in markers])])
    ok = np.isfinite(xs) & np.isfinite(ys)
    if not np.any(ok):
        xlo, xhi, ylo, yhi = 0.0, 1.0, 0.0, 1.0
    else:
        xlo, xhi, ylo, yhi = xs[ok].min(), xs[ok].max(), ys[ok].min(), ys[ok].max()
    if xhi == xlo:
        xlo, xhi = xlo - 1, xhi + 1
    if yhi == ylo:
        ylo, yhi = ylo - 1, yhi + 1

    def px(x):
        return PAD + (x - xlo) / (xhi - xlo) * (W - 2 * PAD)

    def py(y):
        return H - PAD - (y - ylo) / (yhi - ylo) * (H - 2 * PAD)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
           f"<!-- {SVG_VERSION} -->",
           f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
           f'<rect x="{PAD}" y="{PAD}" width="{W - 2 * PAD}" height="{H - 2 * PAD}" fill="none" stroke="black"/>']
    for t in _ticks(xlo, xhi):
        out.append(f'<text x="{px(t):.2f}" y="{H - PAD + 18}" font-size="11" text-anchor="middle">{t:.4g}</text>')
    for t in _ticks(ylo, yhi):
        out.append(f'<text x="{PAD - 6}" y="{py(t) + 4:.2f}" font-size="11" text-anchor="end">{t:.4g}</text>')
    out.append(f'<text x="{W / 2}" y="{PAD / 2}" font-size="14" text-anchor="middle">{title}</text>')
    out.append(f'<text x="{W / 2}" y="{H - 12}" font-size="12" text-anchor="middle">{xlabel}</text>')
    out.append(f'<text x="14" y="{H / 2}" font-size="12" text-anchor="middle" '
               f'transform="rotate(-90 14 {H / 2})">{ylabel}</text>')
    for s in series:
        x, y = np.asarray(s["x"], float), np.asarray(s["y"], float)
        dash = ' stroke-dasharray="5,3"' if s.get("dashed") else ""
        # NaN splits a series into separate polylines
        seg = []
        for a, b in zip(list(x) + [math.nan], list(y) + [math.nan]):
            if math.isfinite(a) and math.isfinite(b):
                seg.append(f"{px(a):.2f},{py(b):.2f}")
                continue
            if len(seg) > 1:
                out.append(f'<polyline fill="none" stroke="{s.get("color", "black")}" stroke-width="1"{dash} '
                           f'points="{" ".join(seg)}"/>')
            seg = []
    for mx, my in markers:
        out.append(f'<circle cx="{px(mx):.2f}" cy="{py(my):.2f}" r="3" fill="black"/>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")
