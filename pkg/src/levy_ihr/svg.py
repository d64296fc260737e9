"""Minimal deterministic SVG line charts."""
from __future__ import annotations

from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def line_chart(series: dict, title: str = "", width: int = 720, height: int = 360) -> str:
    """Render ``{label: [y0, y1, ...]}`` as an SVG polyline chart (x = index)."""
    pad = 50
    ys = [y for vals in series.values() for y in vals if y == y]
    n = max((len(v) for v in series.values()), default=0)
    lo, hi = (min(ys), max(ys)) if ys else (0.0, 1.0)
    if hi == lo:
        hi = lo + 1.0
    sx = (width - 2 * pad) / max(n - 1, 1)
    sy = (height - 2 * pad) / (hi - lo)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<text x="{width // 2}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
           f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
           f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
           f'<text x="{pad - 5}" y="{height - pad}" text-anchor="end" font-size="10">{lo:.4g}</text>',
           f'<text x="{pad - 5}" y="{pad}" text-anchor="end" font-size="10">{hi:.4g}</text>']
    for i, (label, vals) in enumerate(series.items()):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{pad + j * sx:.2f},{height - pad - (y - lo) * sy:.2f}"
                       for j, y in enumerate(vals) if y == y)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        out.append(f'<text x="{width - pad + 5}" y="{pad + 14 * i}" font-size="10" fill="{color}">'
                   f'{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
