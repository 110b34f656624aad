"""Circuit tiles, decorations and weighted circuits.

Edges are numbered counterclockwise from the right: 1 = right, 2 = top,
3 = left, 4 = bottom.  A row of a truth table is a tuple of bits aligned with
the tile's sorted wired edges.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from .rational import parse_rational

Row = Tuple[int, ...]
Port = Tuple[int, int, int]  # (grid row, grid col, edge)

EDGES = (1, 2, 3, 4)
HORIZONTAL = frozenset({1, 3})
VERTICAL = frozenset({2, 4})
OPPOSITE = {1: 3, 2: 4, 3: 1, 4: 2}
# grid offset of the neighbour across each edge
STEP = {1: (0, 1), 2: (-1, 0), 3: (0, -1), 4: (1, 0)}

KINDS = (
    "Variable",
    "Terminator",
    "WireStraight",
    "WireCorner",
    "Intersection",
    "CornerMeet",
    "OrGate",
    "AndGate",
    "FanOut",
)


class TileError(ValueError):
    pass


class CircuitError(ValueError):
    pass


def rotate_edge(e: int, turns: int = 1) -> int:
    """Quarter turns counterclockwise: right -> top -> left -> bottom."""
    return (e - 1 + turns) % 4 + 1


def _exact(w):
    # biases may be symbolic (sympy) in tile-level analysis; floats never
    if isinstance(w, float):
        parse_rational(w)
    if isinstance(w, (int, str, Fraction)):
        return parse_rational(w)
    return w


@dataclass(frozen=True)
class TruthTable:
    wired_edges: Tuple[int, ...]
    rows: FrozenSet[Row]

    def __post_init__(self):
        edges = tuple(sorted(self.wired_edges))
        if len(set(edges)) != len(edges) or not set(edges) <= set(EDGES):
            raise TileError(f"bad wired edges {self.wired_edges}")
        object.__setattr__(self, "wired_edges", edges)
        rows = frozenset(tuple(int(b) for b in r) for r in self.rows)
        for r in rows:
            if len(r) != len(edges) or any(b not in (0, 1) for b in r):
                raise TileError(f"row {r} does not assign exactly the edges {edges}")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_dicts(cls, edges: Iterable[int], rows: Iterable[Dict[int, int]]) -> "TruthTable":
        edges = tuple(sorted(edges))
        return cls(edges, frozenset(tuple(r[e] for e in edges) for r in rows))

    def as_dicts(self) -> List[Dict[int, int]]:
        return [dict(zip(self.wired_edges, r)) for r in sorted(self.rows)]

    def rotated(self, turns: int) -> "TruthTable":
        return TruthTable.from_dicts(
            (rotate_edge(e, turns) for e in self.wired_edges),
            ({rotate_edge(e, turns): b for e, b in d.items()} for d in self.as_dicts()),
        )

    def matches(self, row: Row, selector: Dict[int, int]) -> bool:
        d = dict(zip(self.wired_edges, row))
        return all(d.get(e) == b for e, b in selector.items())


@dataclass(frozen=True)
class Decoration:
    """A restriction deletes the selected rows; a bias adds weight to them."""

    kind: str  # "restriction" | "bias"
    selector: Tuple[Tuple[int, int], ...]
    weight: object = 0

    def __post_init__(self):
        if self.kind not in ("restriction", "bias"):
            raise TileError(f"unknown decoration kind {self.kind!r}")
        sel = self.selector.items() if isinstance(self.selector, dict) else self.selector
        sel = tuple(sorted((int(e), int(b)) for e, b in sel))
        if not sel:
            raise TileError("a decoration must select at least one edge value")
        object.__setattr__(self, "selector", sel)
        object.__setattr__(self, "weight", _exact(self.weight) if self.kind == "bias" else 0)

    @classmethod
    def restriction(cls, selector) -> "Decoration":
        return cls("restriction", selector)

    @classmethod
    def bias(cls, selector, weight) -> "Decoration":
        return cls("bias", selector, weight)

    @property
    def select(self) -> Dict[int, int]:
        return dict(self.selector)


def _base_table(kind: str) -> Tuple[TruthTable, Optional[int], Optional[int]]:
    """Unrotated truth table plus the (horizontal, vertical) selector edges."""
    if kind in ("Variable", "Terminator"):
        return TruthTable((2,), frozenset({(0,), (1,)})), None, None
    if kind == "WireStraight":
        return TruthTable((2, 4), frozenset({(0, 0), (1, 1)})), None, None
    if kind == "WireCorner":
        return TruthTable((1, 2), frozenset({(0, 0), (1, 1)})), None, None
    if kind == "FanOut":
        return TruthTable((1, 3, 4), frozenset({(0, 0, 0), (1, 1, 1)})), None, None
    if kind == "Intersection":
        rows = {(a, b, a, b) for a in (0, 1) for b in (0, 1)}
        return TruthTable((1, 2, 3, 4), frozenset(rows)), 1, 2
    if kind == "CornerMeet":
        rows = {(a, b) for a in (0, 1) for b in (0, 1)}
        return TruthTable((1, 2), frozenset(rows)), 1, 2
    if kind == "OrGate":
        rows = {(a, b, a | b) for a in (0, 1) for b in (0, 1)}
        return TruthTable((1, 2, 3), frozenset(rows)), 1, 2
    if kind == "AndGate":
        rows = {(a, b, a & b) for a in (0, 1) for b in (0, 1)}
        return TruthTable((1, 2, 3), frozenset(rows)), 1, 2
    raise TileError(f"unknown tile kind {kind!r}")


ORIENTATIONS = {
    "Variable": 4,
    "Terminator": 4,
    "WireStraight": 2,
    "WireCorner": 4,
    "FanOut": 4,
    "Intersection": 1,
    "CornerMeet": 4,
    "OrGate": 4,
    "AndGate": 4,
}


@dataclass(frozen=True)
class Tile:
    kind: str
    orientation: int
    base: TruthTable
    decorations: Tuple[Decoration, ...] = ()
    label: str = ""
    h_edge: Optional[int] = None
    v_edge: Optional[int] = None

    def __post_init__(self):
        eff = self.effective_rows
        if not eff:
            raise TileError(f"tile {self.label or self.kind} has an empty effective truth table")

    @property
    def edges(self) -> Tuple[int, ...]:
        return self.base.wired_edges

    @property
    def effective_rows(self) -> Tuple[Row, ...]:
        rows = set(self.base.rows)
        for d in self.decorations:
            if d.kind == "restriction":
                rows = {r for r in rows if not self.base.matches(r, d.select)}
        return tuple(sorted(rows))

    def row_weight(self, row: Row):
        total = 0
        for d in self.decorations:
            if d.kind == "bias" and self.base.matches(row, d.select):
                total = total + d.weight
        return total

    def pair(self, i: int, j: int) -> Dict[int, int]:
        """Selector of the (i, j)-decoration: horizontal value i, vertical value j."""
        if self.h_edge is None or self.v_edge is None:
            raise TileError(f"{self.kind} has no horizontal/vertical wire pair")
        return {self.h_edge: i, self.v_edge: j}

    def key(self) -> tuple:
        return (self.kind, self.orientation, self.decorations)


def standard_tile(kind: str, orientation: int = 0, label: str = "") -> Tile:
    """A library tile rotated ``orientation`` quarter turns counterclockwise.

    Unrotated layouts: Variable/Terminator wired on top, WireStraight vertical,
    WireCorner right+top, FanOut right+left+bottom, CornerMeet right+top,
    OR/AND gates with inputs right and top and output left.
    """
    if kind not in ORIENTATIONS:
        raise TileError(f"unknown tile kind {kind!r}")
    if not isinstance(orientation, int) or not 0 <= orientation < ORIENTATIONS[kind]:
        raise TileError(f"{kind} has no orientation {orientation!r}")
    table, h, v = _base_table(kind)
    table = table.rotated(orientation)
    if h is not None:
        h, v = rotate_edge(h, orientation), rotate_edge(v, orientation)
        if h not in HORIZONTAL:
            h, v = v, h
    return Tile(kind, orientation, table, (), label or kind, h, v)


def orientation_for(kind: str, edges: Iterable[int]) -> int:
    """Orientation of ``kind`` whose wired edges are exactly ``edges``."""
    want = tuple(sorted(edges))
    for o in range(ORIENTATIONS.get(kind, 0)):
        if standard_tile(kind, o).edges == want:
            return o
    raise TileError(f"{kind} cannot be oriented onto edges {want}")


def decorate(t: Tile, d: Decoration) -> Tile:
    if not set(d.select) <= set(t.edges):
        raise TileError(f"decoration selects edges {sorted(d.select)} not wired on {t.kind}")
    live = [r for r in t.effective_rows if t.base.matches(r, d.select)]
    if not live:
        raise TileError(f"dead decoration {d.selector} on {t.label or t.kind}")
    return Tile(t.kind, t.orientation, t.base, t.decorations + (d,), t.label, t.h_edge, t.v_edge)


def variable(edge: int, label: str = "") -> Tile:
    return standard_tile("Variable", orientation_for("Variable", [edge]), label)


# ---------------------------------------------------------------------------
# circuits


@dataclass(frozen=True)
class CircuitAssignment:
    values: Dict[Port, int]

    def __getitem__(self, port: Port) -> int:
        return self.values[port]

    def key(self) -> Tuple[Tuple[Port, int], ...]:
        return tuple(sorted(self.values.items()))

    def tile_row(self, pos, edges) -> Row:
        return tuple(self.values[(pos[0], pos[1], e)] for e in edges)


@dataclass(frozen=True)
class Circuit:
    rows: int
    cols: int
    tiles: Dict[Tuple[int, int], Tile] = field(default_factory=dict)

    def __post_init__(self):
        for (r, c), t in self.tiles.items():
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise CircuitError(f"tile at {(r, c)} outside the {self.rows}x{self.cols} grid")
            for e in EDGES:
                dr, dc = STEP[e]
                q = (r + dr, c + dc)
                if not (0 <= q[0] < self.rows and 0 <= q[1] < self.cols):
                    continue
                other = self.tiles.get(q)
                mine = e in t.edges
                theirs = other is not None and OPPOSITE[e] in other.edges
                if mine != theirs:
                    raise CircuitError(
                        f"wire mismatch across edge {e} of tile {(r, c)} ({t.label or t.kind})"
                    )

    def positions(self) -> List[Tuple[int, int]]:
        return sorted(self.tiles)

    def ports(self) -> List[Port]:
        return [(r, c, e) for (r, c) in self.positions() for e in self.tiles[(r, c)].edges]

    def partner(self, port: Port) -> Optional[Port]:
        r, c, e = port
        dr, dc = STEP[e]
        q = (r + dr, c + dc)
        if q in self.tiles:
            return (q[0], q[1], OPPOSITE[e])
        return None

    def nets(self) -> List[Tuple[Port, ...]]:
        """Wire nets: matched port pairs plus dangling single ports."""
        out = []
        for p in self.ports():
            q = self.partner(p)
            if q is None:
                out.append((p,))
            elif p < q:
                out.append((p, q))
        return out

    def dangling(self) -> List[Port]:
        return [p for p in self.ports() if self.partner(p) is None]

    @property
    def is_closed(self) -> bool:
        return not self.dangling()

    def signals(self) -> Tuple[Dict[Port, int], int]:
        """Union ports joined by nets or forced equal inside a tile.

        Returns (port -> signal index, number of signals); signal indices are
        numbered in order of first port.
        """
        parent = {p: p for p in self.ports()}

        def find(p):
            while parent[p] != p:
                parent[p] = parent[parent[p]]
                p = parent[p]
            return p

        def union(a, b):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)

        for net in self.nets():
            for q in net[1:]:
                union(net[0], q)
        for (r, c), t in self.tiles.items():
            rows = t.effective_rows
            for i, e in enumerate(t.edges):
                for j in range(i + 1, len(t.edges)):
                    if all(row[i] == row[j] for row in rows):
                        union((r, c, e), (r, c, t.edges[j]))
        index: Dict[Port, int] = {}
        roots: Dict[Port, int] = {}
        for p in self.ports():
            root = find(p)
            if root not in roots:
                roots[root] = len(roots)
            index[p] = roots[root]
        return index, len(roots)

    def with_tile(self, pos, tile: Optional[Tile]) -> "Circuit":
        tiles = dict(self.tiles)
        if tile is None:
            tiles.pop(pos, None)
        else:
            tiles[pos] = tile
        return Circuit(self.rows, self.cols, tiles)


def circuit_valid_assignments(c: Circuit, cap: int = 24) -> List[Tuple[CircuitAssignment, object]]:
    """Every valid assignment of wire values with its total bias weight.

    Backtracks over tiles in row-major order choosing rows of each effective
    truth table, with forward checking against neighbouring tiles.  Ports that
    are forced equal share one signal; ``cap`` bounds the number of signals.
    """
    signal, count = c.signals()
    if count > cap:
        raise CircuitError(f"{count} independent signals exceed the enumeration cap {cap}")
    order = c.positions()
    tiles = [c.tiles[p] for p in order]
    tile_signals = [[signal[(p[0], p[1], e)] for e in t.edges] for p, t in zip(order, tiles)]
    options = [t.effective_rows for t in tiles]
    watchers: Dict[int, List[int]] = {}
    for i, sigs in enumerate(tile_signals):
        for s in set(sigs):
            watchers.setdefault(s, []).append(i)

    values: Dict[int, int] = {}
    out: List[Tuple[CircuitAssignment, object]] = []
    ports = c.ports()

    def fits(i: int, row: Row) -> bool:
        seen: Dict[int, int] = {}
        for s, b in zip(tile_signals[i], row):
            v = values.get(s, seen.get(s))
            if v is not None and v != b:
                return False
            seen[s] = b
        return True

    def alive(i: int) -> bool:
        return any(fits(i, row) for row in options[i])

    def rec(i: int, weight):
        if i == len(tiles):
            assignment = CircuitAssignment({p: values[signal[p]] for p in ports})
            out.append((assignment, weight))
            return
        for row in options[i]:
            if not fits(i, row):
                continue
            fresh = []
            for s, b in zip(tile_signals[i], row):
                if s not in values:
                    values[s] = b
                    fresh.append(s)
            touched = {j for s in fresh for j in watchers[s] if j > i}
            if all(alive(j) for j in sorted(touched)):
                rec(i + 1, weight + tiles[i].row_weight(row))
            for s in fresh:
                del values[s]

    rec(0, 0)
    return out


def tile_row(t: Tile, assignment: Dict[int, int]) -> Row:
    return tuple(assignment[e] for e in t.edges)


# ---------------------------------------------------------------------------
# chains used by the assignment-problem circuits


def _gate(kind: str, restricted: Tuple[int, int]) -> Tile:
    g = standard_tile(kind, 0)
    return decorate(g, Decoration.restriction(g.pair(*restricted)))


def build_or_chain(k: int) -> Circuit:
    """1 x k chain enforcing x0 = x1 + ... + xk with at most one input set.

    Inputs enter through the top edges of columns 0..k-1; the output leaves
    through the left edge of column 0.  Column k-1 turns the last input
    towards the gates; every other column is a (1,1)-restricted OR gate.
    """
    if k < 1:
        raise CircuitError("an OR chain needs at least one input")
    tiles = {(0, j): _gate("OrGate", (1, 1)) for j in range(k - 1)}
    tiles[(0, k - 1)] = standard_tile("WireCorner", orientation_for("WireCorner", [2, 3]))
    return Circuit(1, k, tiles)


def build_and_chain(k: int) -> Circuit:
    """1 x k chain of (0,0)-restricted AND gates: at most one input is 0.

    Same geometry as :func:`build_or_chain`; the output is the conjunction.
    """
    if k < 1:
        raise CircuitError("an AND chain needs at least one input")
    tiles = {(0, j): _gate("AndGate", (0, 0)) for j in range(k - 1)}
    tiles[(0, k - 1)] = standard_tile("WireCorner", orientation_for("WireCorner", [2, 3]))
    return Circuit(1, k, tiles)


def chain_ports(k: int) -> Tuple[List[Port], Port]:
    """(input ports x1..xk, output port x0) of a chain built above."""
    return [(0, j, 2) for j in range(k)], (0, 0, 3)
