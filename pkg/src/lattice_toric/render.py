"""DOT output for exchange graphs and SVG drawings of lattice paths."""

from __future__ import annotations

from typing import Sequence

from .exchange import ExchangeGraph, is_thin, vertex_text
from .lattice import BoundingPair, LatticePath
from .order import Convention

__all__ = ["emit_dot", "render_paths_svg", "path_points", "UNIT", "PALETTE"]

UNIT = 24
MARGIN = 1  # in grid units
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
DASHES = ("", "6,3", "2,3", "8,3,2,3")
GRID_COLOR = "#dddddd"
BOUND_COLOR = "#555555"


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def emit_dot(g: ExchangeGraph, convention=Convention.HI) -> str:
    """Directed exchange graph: edges run from the larger vertex to the smaller.

    Sinks are drawn as double circles and the thin vertex is filled.
    """
    if not g.vertices:
        return "digraph { }\n"
    convention = Convention(convention)
    sinks = set(g.sinks(convention))
    lines = [
        "digraph {",
        f"  label={_dot_quote(f'mu = {g.mu}, convention {convention}')};",
        "  node [shape=ellipse, fontname=Helvetica];",
    ]
    for u, V in enumerate(g.vertices):
        attrs = [f"label={_dot_quote(vertex_text(g.inst, V))}"]
        if u in sinks:
            attrs.append("shape=doublecircle")
        if is_thin(g.inst, V):
            attrs.append('style=filled, fillcolor="#ffe08a"')
        lines.append(f"  v{u} [{', '.join(attrs)}];")
    for u, v in sorted(g.oriented_edges(convention)):
        lines.append(f"  v{u} -> v{v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def path_points(p: LatticePath, r: int | None = None) -> list[tuple[int, int]]:
    """Pixel coordinates of the path's lattice points (y grows downward)."""
    r = p.r if r is None else r
    x = y = 0
    pts = [(x, y)]
    for s in p.steps:
        if s == "N":
            y += 1
        else:
            x += 1
        pts.append((x, y))
    return [((MARGIN + a) * UNIT, (MARGIN + r - b) * UNIT) for a, b in pts]


def _polyline(points, color: str, width: float, dash: str = "", extra: str = "") -> str:
    coords = " ".join(f"{x},{y}" for x, y in points)
    dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
    return (
        f'  <polyline points="{coords}" fill="none" stroke="{color}" '
        f'stroke-width="{width}"{dash_attr}{extra}/>'
    )


def render_paths_svg(paths: Sequence[LatticePath], bounds: BoundingPair | None = None) -> str:
    """Standalone SVG with a unit grid, thin bounds and bold argument paths."""
    shapes = {p.shape for p in paths}
    if bounds is not None:
        shapes.add((bounds.n, bounds.r))
    if not shapes:
        raise ValueError("nothing to draw")
    if len(shapes) > 1:
        raise ValueError(f"paths have different dimensions: {sorted(shapes)}")
    n, r = shapes.pop()
    width = (n + 2 * MARGIN) * UNIT
    height = (r + 2 * MARGIN) * UNIT
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'  <rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    for i in range(n + 1):
        x = (MARGIN + i) * UNIT
        out.append(f'  <line x1="{x}" y1="{MARGIN * UNIT}" x2="{x}" y2="{(MARGIN + r) * UNIT}" '
                   f'stroke="{GRID_COLOR}" stroke-width="1"/>')
    for j in range(r + 1):
        y = (MARGIN + j) * UNIT
        out.append(f'  <line x1="{MARGIN * UNIT}" y1="{y}" x2="{(MARGIN + n) * UNIT}" y2="{y}" '
                   f'stroke="{GRID_COLOR}" stroke-width="1"/>')
    if bounds is not None:
        for name, p in (("alpha", bounds.alpha), ("omega", bounds.omega)):
            out.append(_polyline(path_points(p, r), BOUND_COLOR, 1, extra=f' class="bound {name}"'))
    for k, p in enumerate(paths):
        color = PALETTE[k % len(PALETTE)]
        dash = DASHES[(k // len(PALETTE)) % len(DASHES)]
        out.append(_polyline(path_points(p, r), color, 3, dash, extra=f' class="path p{k}"'))
    out.append("</svg>")
    return "\n".join(out) + "\n"
