"""Deterministic SVG drawings of circuits and lattice graphs."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import FrozenSet, List, Optional, Union
from xml.sax.saxutils import escape

from ..kinggraph import BOX, DeltaWeight, LatticeGraph, Pos
from ..rational import format_rational
from ..tile import STEP, Circuit, Tile

MARGIN = 10

_SHORT = {
    "Variable": "var",
    "Terminator": "term",
    "WireStraight": "",
    "WireCorner": "",
    "FanOut": "fan",
    "Intersection": "",
    "CornerMeet": "meet",
    "OrGate": "OR",
    "AndGate": "AND",
}


class RenderError(ValueError):
    pass


@dataclass(frozen=True)
class RenderSpec:
    target: str = "circuit"  # "circuit" | "graph"
    cell: int = 40
    show_weights: bool = True
    highlight: Optional[FrozenSet[Pos]] = None
    delta: Optional[Fraction] = None

    def __post_init__(self):
        if self.target not in ("circuit", "graph"):
            raise RenderError(f"unknown render target {self.target!r}")
        if self.cell <= 0:
            raise RenderError("cell size must be positive")
        if self.highlight is not None:
            object.__setattr__(self, "highlight", frozenset(tuple(p) for p in self.highlight))


def _num(v) -> str:
    """Fixed-precision coordinate text with trailing zeros stripped."""
    s = f"{float(v):.2f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _open(width, height) -> List[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_num(width)}" height="{_num(height)}" '
        f'viewBox="0 0 {_num(width)} {_num(height)}">',
        f'<rect x="0" y="0" width="{_num(width)}" height="{_num(height)}" fill="white"/>',
    ]


def _text(x, y, body: str, size: float, color: str = "black") -> str:
    return (f'<text x="{_num(x)}" y="{_num(y)}" font-family="monospace" font-size="{_num(size)}" '
            f'text-anchor="middle" fill="{color}">{escape(body)}</text>')


def _weight_text(w) -> str:
    if isinstance(w, (int, Fraction)):
        return format_rational(w)
    return str(w)


def _tile_svg(t: Tile, x0: float, y0: float, s: float) -> List[str]:
    cx, cy = x0 + s / 2, y0 + s / 2
    out = [f'<rect x="{_num(x0)}" y="{_num(y0)}" width="{_num(s)}" height="{_num(s)}" '
           f'fill="none" stroke="#888" stroke-width="1"/>']
    for e in t.edges:
        dr, dc = STEP[e]
        out.append(f'<line x1="{_num(cx)}" y1="{_num(cy)}" x2="{_num(cx + dc * s / 2)}" '
                   f'y2="{_num(cy + dr * s / 2)}" stroke="black" stroke-width="2"/>')
    label = _SHORT.get(t.kind, t.kind)
    if label:
        out.append(_text(cx, y0 + s * 0.22, label, s * 0.18, "#333"))
    for idx, d in enumerate(t.decorations):
        mx = cx + (idx - (len(t.decorations) - 1) / 2) * s * 0.3
        my = cy + s * 0.2
        r = s * 0.1
        if d.kind == "restriction":
            out.append(f'<path d="M {_num(mx - r)} {_num(my - r)} L {_num(mx + r)} {_num(my + r)} '
                       f'M {_num(mx - r)} {_num(my + r)} L {_num(mx + r)} {_num(my - r)}" '
                       f'stroke="red" stroke-width="2"/>')
        else:
            out.append(f'<circle cx="{_num(mx)}" cy="{_num(my)}" r="{_num(r)}" fill="none" '
                       f'stroke="blue" stroke-width="2"/>')
            out.append(_text(mx, my + r + s * 0.14, _weight_text(d.weight), s * 0.14, "blue"))
    return out


def render_circuit(c: Circuit, spec: RenderSpec = RenderSpec()) -> str:
    s = spec.cell
    width = 2 * MARGIN + c.cols * s
    height = 2 * MARGIN + c.rows * s
    out = _open(width, height)
    for (r, col) in c.positions():
        out.extend(_tile_svg(c.tiles[(r, col)], MARGIN + col * s, MARGIN + r * s, s))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _vertex_weight(w: DeltaWeight, delta) -> str:
    return format_rational(w.at(delta)) if delta is not None else str(w)


def render_graph(g: LatticeGraph, spec: RenderSpec = RenderSpec(target="graph")) -> str:
    u = spec.cell / 2
    hl = spec.highlight
    if hl is not None:
        stray = sorted(p for p in hl if p not in g.vertices)
        if stray:
            raise RenderError(f"highlight position {stray[0]} is not a vertex")
        if not g.is_independent(hl):
            raise RenderError("highlight set is not independent")
    rows, cols = g.tile_rows, g.tile_cols

    def at(p: Pos):
        return MARGIN + u / 2 + p[1] * u, MARGIN + u / 2 + p[0] * u

    out = _open(2 * MARGIN + cols * BOX * u, 2 * MARGIN + rows * BOX * u)
    for br, bc in sorted(g.boxes()):
        out.append(f'<rect x="{_num(MARGIN + bc * BOX * u)}" y="{_num(MARGIN + br * BOX * u)}" '
                   f'width="{_num(BOX * u)}" height="{_num(BOX * u)}" fill="none" stroke="#ccc" '
                   f'stroke-dasharray="3,3"/>')
    for p, q in sorted(g.edges()):
        (x1, y1), (x2, y2) = at(p), at(q)
        out.append(f'<line x1="{_num(x1)}" y1="{_num(y1)}" x2="{_num(x2)}" y2="{_num(y2)}" '
                   f'stroke="#999" stroke-width="1"/>')
    for p in g.positions():
        v = g.vertices[p]
        x, y = at(p)
        fill = "black" if hl is not None and p in hl else "white"
        stroke = "green" if v.connecting else "black"
        out.append(f'<circle cx="{_num(x)}" cy="{_num(y)}" r="{_num(u * 0.28)}" fill="{fill}" '
                   f'stroke="{stroke}" stroke-width="1.5"/>')
        if spec.show_weights:
            out.append(_text(x, y + u * 0.48, _vertex_weight(v.weight, spec.delta), u * 0.2))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render(spec: RenderSpec, obj: Union[Circuit, LatticeGraph]) -> str:
    if spec.target == "circuit":
        if not isinstance(obj, Circuit):
            raise RenderError("circuit target needs a Circuit")
        return render_circuit(obj, spec)
    if not isinstance(obj, LatticeGraph):
        raise RenderError("graph target needs a LatticeGraph")
    return render_graph(obj, spec)
