"""Tile fragments: one tile compiled into a 4x4 king's-graph box."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Tuple

from ..kinggraph import DeltaWeight, LatticeGraph, Pos, Vertex
from ..tile import Row, Tile, TileError
from .certify import CertificationError, CompilationCertificate, certify_graph

MAX_FRAGMENT_VERTICES = 16

# ("delete", pos) or ("reweight", pos, DeltaWeight)
Edit = tuple


def member_means_one(edge: int) -> bool:
    """Right and bottom connecting vertices read 1 when selected; top and left read 0."""
    return edge in (1, 4)


def decode_ends(conns: Dict[int, Pos], s) -> Dict[int, int]:
    out = {}
    for e, p in conns.items():
        inside = p in s
        out[e] = int(inside) if member_means_one(e) else int(not inside)
    return out


@dataclass(frozen=True)
class TileFragment:
    label: str
    graph: LatticeGraph
    row_anchors: Dict[Row, Pos] = field(default_factory=dict)
    restrict_edits: Dict[Row, Tuple[Edit, ...]] = field(default_factory=dict)

    @property
    def conns(self) -> Dict[int, Pos]:
        return {v.edge: p for p, v in self.graph.vertices.items() if v.connecting}

    @property
    def edges(self) -> Tuple[int, ...]:
        return tuple(sorted(self.conns))

    def decode(self, s) -> Row:
        ends = decode_ends(self.conns, s)
        return tuple(ends[e] for e in sorted(ends))

    def edited(self, edits: Iterable[Edit]) -> "TileFragment":
        verts = dict(self.graph.vertices)
        for edit in edits:
            op, pos = edit[0], tuple(edit[1])
            if pos not in verts:
                raise TileError(f"{self.label}: edit touches missing vertex {pos}")
            if op == "delete":
                if verts[pos].connecting:
                    raise TileError(f"{self.label}: cannot delete connecting vertex {pos}")
                del verts[pos]
            elif op == "reweight":
                v = verts[pos]
                verts[pos] = Vertex(edit[2], v.connecting, v.edge, v.label, v.corner_ok)
            else:
                raise TileError(f"unknown edit {op!r}")
        return TileFragment(self.label, self.graph.with_vertices(verts), self.row_anchors, self.restrict_edits)

    def add_bias(self, pos: Pos, w) -> "TileFragment":
        verts = dict(self.graph.vertices)
        if pos not in verts:
            raise TileError(f"{self.label}: bias anchor {pos} was deleted")
        v = verts[pos]
        verts[pos] = Vertex(v.weight.plus_bias(w), v.connecting, v.edge, v.label, v.corner_ok)
        return TileFragment(self.label, self.graph.with_vertices(verts), self.row_anchors, self.restrict_edits)


def _check_shape(t: Tile, f: TileFragment) -> None:
    if len(f.graph) > MAX_FRAGMENT_VERTICES:
        raise CertificationError(f"{f.label}: {len(f.graph)} vertices exceed {MAX_FRAGMENT_VERTICES}")
    tags = [v.edge for v in f.graph.vertices.values() if v.connecting]
    if sorted(tags) != list(t.edges):
        raise CertificationError(
            f"{f.label}: connecting vertices on edges {sorted(tags)}, tile wires {list(t.edges)}"
        )


def certify_fragment(t: Tile, f: TileFragment) -> CompilationCertificate:
    """Certify that fragment ``f`` is a correct compilation of tile ``t``."""
    _check_shape(t, f)
    valid = {}
    for row in t.effective_rows:
        w = t.row_weight(row)
        if not isinstance(w, (int, Fraction)):
            raise CertificationError(f"{t.label}: symbolic bias {w!r} cannot be compiled")
        valid[row] = Fraction(w)
    return certify_graph(f.graph, f.decode, valid)


def _edge_anchor_rows(t: Tile, rows, edge: int):
    # rows in which the connecting vertex of ``edge`` is selected
    i = t.edges.index(edge)
    want = 1 if member_means_one(edge) else 0
    return {r for r in rows if r[i] == want}


def decorate_fragment(t: Tile, base: TileFragment) -> TileFragment:
    """Apply the tile's decorations to its undecorated fragment.

    Restrictions apply the designed edits of each removed row.  A bias goes
    onto a connecting vertex when the selected rows are exactly those in which
    that vertex is chosen; otherwise onto the interior anchor of the selected
    row, splitting negative weights through a connecting vertex so that every
    anchor carries a non-negative bias.
    """
    f = base
    rows = set(t.base.rows)
    for d in t.decorations:
        if d.kind != "restriction":
            continue
        for r in sorted(rows):
            if t.base.matches(r, d.select):
                if r not in base.restrict_edits:
                    raise TileError(f"{base.label}: row {r} cannot be restricted")
                f = f.edited(base.restrict_edits[r])
                rows.discard(r)
    conns = base.conns
    for d in t.decorations:
        if d.kind != "bias" or d.weight == 0:
            continue
        w = Fraction(d.weight)
        chosen = {r for r in rows if t.base.matches(r, d.select)}
        placed = False
        for e in t.edges:
            if _edge_anchor_rows(t, rows, e) == chosen:
                f = f.add_bias(conns[e], w)
                placed = True
                break
        if placed:
            continue
        if w > 0 and len(chosen) == 1 and next(iter(chosen)) in base.row_anchors:
            f = f.add_bias(base.row_anchors[next(iter(chosen))], w)
            continue
        if w < 0:
            for e in t.edges:
                cover = _edge_anchor_rows(t, rows, e)
                rest = cover - chosen
                if chosen <= cover and all(r in base.row_anchors for r in rest):
                    f = f.add_bias(conns[e], w)
                    for r in sorted(rest):
                        f = f.add_bias(base.row_anchors[r], -w)
                    placed = True
                    break
            if placed:
                continue
        if len(chosen) == 1 and next(iter(chosen)) in base.row_anchors:
            f = f.add_bias(base.row_anchors[next(iter(chosen))], w)
            continue
        raise TileError(f"{base.label}: no anchor can carry bias on rows {sorted(chosen)}")
    label = base.label if not t.decorations else f"{base.label}+{len(t.decorations)}dec"
    return TileFragment(label, f.graph, base.row_anchors, base.restrict_edits)


def fragment_from_spec(label: str, conns: Dict[int, Tuple[Pos, int]], interior: Dict[Pos, int],
                       row_anchors=None, restrict_edits=None, corner_ok=()) -> TileFragment:
    """Build a fragment from integer delta coefficients (no biases)."""
    verts = {}
    for e, (p, coeff) in conns.items():
        verts[tuple(p)] = Vertex(DeltaWeight(coeff), True, e, f"{label}.e{e}", tuple(p) in corner_ok)
    for p, coeff in interior.items():
        verts[tuple(p)] = Vertex(DeltaWeight(coeff), False, None, f"{label}.{p[0]}{p[1]}")
    return TileFragment(
        label,
        LatticeGraph(1, 1, verts),
        {tuple(r): tuple(p) for r, p in (row_anchors or {}).items()},
        _norm_edits(restrict_edits),
    )


def _norm_edits(edits) -> Dict[Row, Tuple[Edit, ...]]:
    out = {}
    for r, eds in (edits or {}).items():
        norm = []
        for ed in eds:
            if ed[0] == "delete":
                norm.append(("delete", tuple(ed[1])))
            else:
                w = ed[2] if isinstance(ed[2], DeltaWeight) else DeltaWeight(int(ed[2]))
                norm.append(("reweight", tuple(ed[1]), w))
        out[tuple(r)] = tuple(norm)
    return out
