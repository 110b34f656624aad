"""Weighted subgraphs of king's-graph lattices with delta-affine weights.

A lattice is cut into 4x4 boxes, one per circuit tile.  Vertex weights are
kept symbolic in the unit scale delta (``DeltaWeight``) so that statements
quantified over every delta > 0 can be decided exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, Iterator, Optional, Set, Tuple

from .rational import format_rational, parse_rational

Pos = Tuple[int, int]

BOX = 4
# edge numbering: 1 = right, 2 = top, 3 = left, 4 = bottom
EDGE_NAMES = {1: "right", 2: "top", 3: "left", 4: "bottom"}
DEFAULT_RADIUS = Fraction(3, 2)


@dataclass(frozen=True)
class DeltaWeight:
    """The affine weight ``delta_coeff * delta + bias``."""

    delta_coeff: int = 0
    bias: Fraction = Fraction(0)

    def __post_init__(self):
        if not isinstance(self.delta_coeff, int) or isinstance(self.delta_coeff, bool):
            raise TypeError("delta_coeff must be an int")
        object.__setattr__(self, "bias", parse_rational(self.bias))

    def __add__(self, other: "DeltaWeight") -> "DeltaWeight":
        if not isinstance(other, DeltaWeight):
            return NotImplemented
        return DeltaWeight(self.delta_coeff + other.delta_coeff, self.bias + other.bias)

    def __sub__(self, other: "DeltaWeight") -> "DeltaWeight":
        if not isinstance(other, DeltaWeight):
            return NotImplemented
        return DeltaWeight(self.delta_coeff - other.delta_coeff, self.bias - other.bias)

    def __neg__(self) -> "DeltaWeight":
        return DeltaWeight(-self.delta_coeff, -self.bias)

    def __mul__(self, k: int) -> "DeltaWeight":
        if not isinstance(k, int):
            return NotImplemented
        return DeltaWeight(self.delta_coeff * k, self.bias * k)

    __rmul__ = __mul__

    def plus_bias(self, w) -> "DeltaWeight":
        return DeltaWeight(self.delta_coeff, self.bias + parse_rational(w))

    def at(self, delta) -> Fraction:
        return self.delta_coeff * parse_rational(delta) + self.bias

    # -- the two comparison modes -------------------------------------------
    def le_for_all(self, other: "DeltaWeight") -> bool:
        """``self <= other`` for every delta > 0 (componentwise order)."""
        return self.delta_coeff <= other.delta_coeff and self.bias <= other.bias

    def le_eventually(self, other: "DeltaWeight") -> bool:
        """``self <= other`` for all sufficiently large delta (lexicographic)."""
        if self.delta_coeff != other.delta_coeff:
            return self.delta_coeff < other.delta_coeff
        return self.bias <= other.bias

    def le_threshold(self, other: "DeltaWeight") -> Optional[Fraction]:
        """Smallest d0 >= 0 with ``self <= other`` for every delta >= d0.

        None when the inequality fails for large delta.
        """
        gap = other.delta_coeff - self.delta_coeff
        slack = other.bias - self.bias
        if gap < 0:
            return None
        if slack >= 0:
            return Fraction(0)
        if gap == 0:
            return None
        return -slack / gap

    def sort_key(self) -> Tuple[int, Fraction]:
        return (self.delta_coeff, self.bias)

    def __str__(self) -> str:
        if self.bias == 0:
            return f"{self.delta_coeff}d"
        sign = "+" if self.bias > 0 else "-"
        return f"{self.delta_coeff}d{sign}{format_rational(abs(self.bias))}"

    def to_json(self) -> dict:
        return {"delta": self.delta_coeff, "bias": format_rational(self.bias)}

    @classmethod
    def from_json(cls, obj) -> "DeltaWeight":
        return cls(int(obj["delta"]), parse_rational(obj.get("bias", 0)))


ZERO = DeltaWeight()


def dw(coeff: int, bias=0) -> DeltaWeight:
    return DeltaWeight(coeff, parse_rational(bias))


@dataclass(frozen=True)
class Vertex:
    weight: DeltaWeight
    connecting: bool = False
    edge: Optional[int] = None  # tile edge a connecting vertex sits on
    label: str = ""
    corner_ok: bool = False  # explicit exception to the no-corner rule


def king_adjacent(p: Pos, q: Pos) -> bool:
    return p != q and abs(p[0] - q[0]) <= 1 and abs(p[1] - q[1]) <= 1


def box_of(p: Pos) -> Tuple[int, int]:
    return (p[0] // BOX, p[1] // BOX)


def edge_side(p: Pos) -> Optional[int]:
    """Which perimeter side of its box ``p`` is on (None for interior/corner)."""
    r, c = p[0] % BOX, p[1] % BOX
    on_r = r in (0, BOX - 1)
    on_c = c in (0, BOX - 1)
    if on_r and on_c:
        return None
    if c == BOX - 1:
        return 1
    if r == 0:
        return 2
    if c == 0:
        return 3
    if r == BOX - 1:
        return 4
    return None


def corner_sides(p: Pos) -> Tuple[int, ...]:
    r, c = p[0] % BOX, p[1] % BOX
    sides = []
    if c == BOX - 1:
        sides.append(1)
    if r == 0:
        sides.append(2)
    if c == 0:
        sides.append(3)
    if r == BOX - 1:
        sides.append(4)
    return tuple(sides)


class LatticeGraphError(ValueError):
    pass


@dataclass(frozen=True)
class LatticeGraph:
    """Vertices placed on a (4*tile_rows) x (4*tile_cols) king's lattice."""

    tile_rows: int
    tile_cols: int
    vertices: Dict[Pos, Vertex] = field(default_factory=dict)

    def __post_init__(self):
        height, width = BOX * self.tile_rows, BOX * self.tile_cols
        for p, v in self.vertices.items():
            if not (0 <= p[0] < height and 0 <= p[1] < width):
                raise LatticeGraphError(f"vertex {p} outside the {height}x{width} box")
            if v.connecting:
                sides = corner_sides(p)
                if v.edge not in (1, 2, 3, 4):
                    raise LatticeGraphError(f"connecting vertex {p} has no edge tag")
                if len(sides) == 2:
                    if not v.corner_ok:
                        raise LatticeGraphError(f"connecting vertex {p} sits in a box corner")
                    if v.edge not in sides:
                        raise LatticeGraphError(f"corner vertex {p} tagged with edge {v.edge}")
                elif sides != (v.edge,):
                    raise LatticeGraphError(
                        f"connecting vertex {p} tagged edge {v.edge} but lies on {sides or 'interior'}"
                    )

    # -- structure -----------------------------------------------------------
    def __len__(self) -> int:
        return len(self.vertices)

    def positions(self) -> list:
        return sorted(self.vertices)

    def weight(self, p: Pos) -> DeltaWeight:
        return self.vertices[p].weight

    def neighbors(self, p: Pos) -> list:
        r, c = p
        out = []
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                q = (r + dr, c + dc)
                if q != p and q in self.vertices:
                    out.append(q)
        return out

    def edges(self) -> Iterator[Tuple[Pos, Pos]]:
        for p in self.positions():
            for q in self.neighbors(p):
                if p < q:
                    yield p, q

    def boxes(self) -> Set[Tuple[int, int]]:
        return {box_of(p) for p in self.vertices}

    def tile_connecting(self) -> list:
        """Connecting vertices of every tile fragment in the graph."""
        return [p for p in self.positions() if self.vertices[p].connecting]

    def circuit_connecting(self) -> FrozenSet[Pos]:
        """V_con of the whole graph: tile connecting vertices left unmatched.

        A tile's connecting vertex is matched when it is adjacent to a
        connecting vertex of a different box.
        """
        out = set()
        for p in self.tile_connecting():
            b = box_of(p)
            if not any(
                self.vertices[q].connecting and box_of(q) != b for q in self.neighbors(p)
            ):
                out.add(p)
        return frozenset(out)

    def restrict(self, boxes: Iterable[Tuple[int, int]]) -> "LatticeGraph":
        """Induced subgraph on the given tile boxes (same coordinate frame)."""
        keep = set(boxes)
        return LatticeGraph(
            self.tile_rows,
            self.tile_cols,
            {p: v for p, v in self.vertices.items() if box_of(p) in keep},
        )

    def with_vertices(self, vertices: Dict[Pos, Vertex]) -> "LatticeGraph":
        return replace(self, vertices=dict(vertices))

    # -- independent sets and weights -----------------------------------------
    def _check_members(self, s: Iterable[Pos]) -> FrozenSet[Pos]:
        s = frozenset(s)
        foreign = [p for p in s if p not in self.vertices]
        if foreign:
            raise LatticeGraphError(f"positions {sorted(foreign)} are not vertices of the graph")
        return s

    def is_independent(self, s: Iterable[Pos]) -> bool:
        s = self._check_members(s)
        return not any(q in s for p in s for q in self.neighbors(p))

    def plain_weight(self, s: Iterable[Pos]) -> DeltaWeight:
        total = ZERO
        for p in s:
            total = total + self.vertices[p].weight
        return total

    def circuit_weight(self, s: Iterable[Pos]) -> DeltaWeight:
        """sum of w(v) over S plus delta times the unmatched connecting vertices outside S."""
        s = self._check_members(s)
        if not self.is_independent(s):
            raise LatticeGraphError("circuit weight is defined for independent sets only")
        missing = len(self.circuit_connecting() - s)
        return self.plain_weight(s) + DeltaWeight(missing, Fraction(0))

    def independent_sets(self) -> Iterator[FrozenSet[Pos]]:
        """Every independent set, including the empty one (exponential)."""
        order = self.positions()
        index = {p: i for i, p in enumerate(order)}
        later_nbrs = [
            frozenset(index[q] for q in self.neighbors(p) if index[q] > i)
            for i, p in enumerate(order)
        ]

        def rec(i: int, blocked: FrozenSet[int], chosen: Tuple[Pos, ...]):
            if i == len(order):
                yield frozenset(chosen)
                return
            if i not in blocked:
                yield from rec(i + 1, blocked | later_nbrs[i], chosen + (order[i],))
            yield from rec(i + 1, blocked, chosen)

        yield from rec(0, frozenset(), ())

    # -- splits ----------------------------------------------------------------
    def _check_split(self, part1) -> Tuple[Set, Set]:
        part1 = set(part1)
        boxes = self.boxes()
        if not part1 <= {(r, c) for r in range(self.tile_rows) for c in range(self.tile_cols)}:
            raise LatticeGraphError("split references boxes outside the lattice")
        part2 = boxes - part1
        if not part1 & boxes or not part2:
            raise LatticeGraphError("a split needs non-empty parts on both sides")
        return part1, part2

    def split_boundary(self, part1) -> Tuple[FrozenSet[Pos], FrozenSet[Pos], FrozenSet[Pos]]:
        part1, _ = self._check_split(part1)
        b1, b2 = set(), set()
        for p, q in self.edges():
            in1, in2 = box_of(p) in part1, box_of(q) in part1
            if in1 != in2:
                (b1 if in1 else b2).add(p)
                (b1 if in2 else b2).add(q)
        return frozenset(b1), frozenset(b2), frozenset(b1 | b2)

    def check_weight_lemma(self, part1, s: Iterable[Pos]) -> bool:
        """Split-weight identity for an independent set S across a box split."""
        s = self._check_members(s)
        if not self.is_independent(s):
            raise LatticeGraphError("S must be independent")
        part1, part2 = self._check_split(part1)
        g1, g2 = self.restrict(part1), self.restrict(part2)
        s1 = frozenset(p for p in s if box_of(p) in part1)
        s2 = s - s1
        _, _, b = self.split_boundary(part1)
        lhs = self.circuit_weight(s)
        rhs = g1.circuit_weight(s1) + g2.circuit_weight(s2) - DeltaWeight(len(b - s), Fraction(0))
        return lhs == rhs

    # -- export ---------------------------------------------------------------
    def resolve(self, delta) -> Dict[Pos, Fraction]:
        delta = parse_rational(delta)
        return {p: v.weight.at(delta) for p, v in self.vertices.items()}

    def to_json(self, delta=None, radius=DEFAULT_RADIUS) -> dict:
        """Export as JSON. Weights are resolved when ``delta`` is given."""
        radius = parse_rational(radius)
        verts = []
        for p in self.positions():
            v = self.vertices[p]
            entry = {"x": p[1], "y": p[0]}
            if delta is not None:
                entry["weight"] = format_rational(v.weight.at(delta))
            entry["symbolic"] = v.weight.to_json()
            entry["connecting"] = v.connecting
            if v.connecting:
                entry["edge"] = v.edge
            if v.corner_ok:
                entry["corner_ok"] = True
            entry["label"] = v.label
            verts.append(entry)
        out = {"radius": format_rational(radius), "tile_rows": self.tile_rows, "tile_cols": self.tile_cols}
        if delta is not None:
            out["delta"] = format_rational(parse_rational(delta))
        out["vertices"] = verts
        return out

    @classmethod
    def from_json(cls, obj) -> "LatticeGraph":
        verts = {}
        for entry in obj["vertices"]:
            pos = (int(entry["y"]), int(entry["x"]))
            if pos in verts:
                raise LatticeGraphError(f"duplicate vertex position {pos}")
            if "symbolic" in entry:
                w = DeltaWeight.from_json(entry["symbolic"])
            else:
                w = DeltaWeight(0, parse_rational(entry["weight"]))
            verts[pos] = Vertex(
                weight=w,
                connecting=bool(entry.get("connecting", False)),
                edge=entry.get("edge"),
                label=str(entry.get("label", "")),
                corner_ok=bool(entry.get("corner_ok", False)),
            )
        rows = obj.get("tile_rows")
        cols = obj.get("tile_cols")
        if rows is None or cols is None:
            rows = max((p[0] for p in verts), default=0) // BOX + 1
            cols = max((p[1] for p in verts), default=0) // BOX + 1
        return cls(int(rows), int(cols), verts)


def resolved_weights(obj) -> Dict[Pos, Fraction]:
    """Numeric weights straight from a graph JSON export (the ``weight`` field)."""
    out = {}
    for entry in obj["vertices"]:
        out[(int(entry["y"]), int(entry["x"]))] = parse_rational(entry["weight"])
    return out
