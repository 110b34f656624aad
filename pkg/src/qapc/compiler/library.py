"""Fragment library: hand-picked 4x4 layouts for every supported tile.

Each entry gives, per wired edge, the connecting vertex position and its delta
coefficient; the internal vertices; for each truth-table row the single edit
(new coefficient, 0 meaning deletion) that removes the row; and for each row
the internal vertex that absorbs a bias selecting only that row.

Layout conventions: only non-corner perimeter cells carry vertices besides the
central 2x2, and a perimeter cell holds an internal vertex only on an unwired
right or bottom edge.  Certification, not the layout, is the authority.
"""
from __future__ import annotations

import hashlib
import json
from typing import Dict, List, Optional, Tuple

from ..kinggraph import DeltaWeight
from ..tile import Tile, TileError, standard_tile
from .certify import CompilationCertificate
from .fragments import TileFragment, certify_fragment, decorate_fragment, fragment_from_spec

LAYOUTS = {
    ('Variable', 0): (
        {2: ((0, 1), 2)},
        {(1, 2): 2, (2, 2): 1},
        {(0,): ((0, 1), 1), (1,): ((1, 2), 1)},
        {(0,): (2, 2), (1,): (1, 2)},
    ),
    ('Variable', 1): (
        {3: ((1, 0), 2)},
        {(2, 1): 2, (2, 2): 1},
        {(0,): ((1, 0), 1), (1,): ((2, 1), 1)},
        {(0,): (2, 2), (1,): (2, 1)},
    ),
    ('Variable', 2): (
        {4: ((3, 1), 2)},
        {(1, 2): 1, (2, 2): 2},
        {(0,): ((2, 2), 1), (1,): ((3, 1), 1)},
        {(0,): (2, 2), (1,): (1, 2)},
    ),
    ('Variable', 3): (
        {1: ((1, 3), 2)},
        {(2, 1): 1, (2, 2): 2},
        {(0,): ((2, 2), 1), (1,): ((1, 3), 1)},
        {(0,): (2, 2), (1,): (2, 1)},
    ),
    ('Terminator', 0): (
        {2: ((0, 1), 2)},
        {(1, 2): 2, (2, 2): 1},
        {(0,): ((0, 1), 1), (1,): ((1, 2), 1)},
        {(0,): (2, 2), (1,): (1, 2)},
    ),
    ('Terminator', 1): (
        {3: ((1, 0), 2)},
        {(2, 1): 2, (2, 2): 1},
        {(0,): ((1, 0), 1), (1,): ((2, 1), 1)},
        {(0,): (2, 2), (1,): (2, 1)},
    ),
    ('Terminator', 2): (
        {4: ((3, 1), 2)},
        {(1, 2): 1, (2, 2): 2},
        {(0,): ((2, 2), 1), (1,): ((3, 1), 1)},
        {(0,): (2, 2), (1,): (1, 2)},
    ),
    ('Terminator', 3): (
        {1: ((1, 3), 2)},
        {(2, 1): 1, (2, 2): 2},
        {(0,): ((2, 2), 1), (1,): ((1, 3), 1)},
        {(0,): (2, 2), (1,): (2, 1)},
    ),
    ('WireStraight', 0): (
        {2: ((0, 1), 2), 4: ((3, 1), 2)},
        {(1, 2): 2, (2, 2): 2},
        {(0, 0): ((0, 1), 1), (1, 1): ((3, 1), 1)},
        {(0, 0): (2, 2), (1, 1): (1, 2)},
    ),
    ('WireStraight', 1): (
        {1: ((1, 3), 2), 3: ((1, 0), 2)},
        {(2, 1): 2, (2, 2): 2},
        {(0, 0): ((1, 0), 1), (1, 1): ((1, 3), 1)},
        {(0, 0): (2, 2), (1, 1): (2, 1)},
    ),
    ('WireCorner', 0): (
        {1: ((1, 3), 2), 2: ((0, 2), 2)},
        {(1, 1): 1, (2, 2): 1},
        {(0, 0): ((0, 2), 1), (1, 1): ((1, 3), 1)},
        {(0, 0): (2, 2), (1, 1): (1, 1)},
    ),
    ('WireCorner', 1): (
        {2: ((0, 1), 2), 3: ((2, 0), 2)},
        {(1, 1): 3, (2, 2): 1},
        {(0, 0): ((0, 1), 1), (1, 1): ((1, 1), 2)},
        {(0, 0): (2, 2), (1, 1): (1, 1)},
    ),
    ('WireCorner', 2): (
        {3: ((2, 0), 2), 4: ((3, 1), 2)},
        {(1, 1): 1, (2, 2): 1},
        {(0, 0): ((2, 0), 1), (1, 1): ((3, 1), 1)},
        {(0, 0): (2, 2), (1, 1): (1, 1)},
    ),
    ('WireCorner', 3): (
        {1: ((1, 3), 2), 4: ((3, 1), 2)},
        {(1, 1): 1, (2, 2): 3},
        {(0, 0): ((2, 2), 2), (1, 1): ((1, 3), 1)},
        {(0, 0): (2, 2), (1, 1): (1, 1)},
    ),
    ('FanOut', 0): (
        {1: ((1, 3), 2), 3: ((2, 0), 2), 4: ((3, 1), 2)},
        {(1, 1): 1, (2, 2): 2},
        {(0, 0, 0): ((2, 0), 1), (1, 1, 1): ((1, 3), 1)},
        {(0, 0, 0): (2, 2), (1, 1, 1): (1, 1)},
    ),
    ('FanOut', 1): (
        {1: ((1, 3), 2), 2: ((0, 2), 2), 4: ((3, 1), 2)},
        {(1, 1): 1, (2, 2): 2},
        {(0, 0, 0): ((0, 2), 1), (1, 1, 1): ((1, 3), 1)},
        {(0, 0, 0): (2, 2), (1, 1, 1): (1, 1)},
    ),
    ('FanOut', 2): (
        {1: ((1, 3), 2), 2: ((0, 2), 2), 3: ((1, 0), 2)},
        {(1, 1): 2, (2, 2): 1},
        {(0, 0, 0): ((0, 2), 1), (1, 1, 1): ((1, 3), 1)},
        {(0, 0, 0): (2, 2), (1, 1, 1): (1, 1)},
    ),
    ('FanOut', 3): (
        {2: ((0, 1), 2), 3: ((2, 0), 2), 4: ((3, 1), 2)},
        {(1, 1): 2, (2, 2): 1},
        {(0, 0, 0): ((0, 1), 1), (1, 1, 1): ((3, 1), 1)},
        {(0, 0, 0): (2, 2), (1, 1, 1): (1, 1)},
    ),
    ('Intersection', 0): (
        {1: ((1, 3), 2), 2: ((0, 1), 2), 3: ((2, 0), 2), 4: ((3, 2), 2)},
        {(1, 1): 3, (1, 2): 3, (2, 1): 3, (2, 2): 3},
        {(0, 0, 0, 0): ((2, 2), 2), (0, 1, 0, 1): ((1, 2), 2), (1, 0, 1, 0): ((2, 1), 2), (1, 1, 1, 1): ((1, 1), 2)},
        {(0, 0, 0, 0): (2, 2), (0, 1, 0, 1): (1, 2), (1, 0, 1, 0): (2, 1), (1, 1, 1, 1): (1, 1)},
    ),
    ('CornerMeet', 0): (
        {1: ((1, 3), 2), 2: ((0, 1), 2)},
        {(1, 1): 2, (1, 2): 3, (2, 1): 1, (2, 2): 2},
        {(0, 0): ((2, 2), 1), (0, 1): ((1, 2), 2), (1, 0): ((2, 1), 0), (1, 1): ((1, 1), 1)},
        {(0, 0): (2, 2), (0, 1): (1, 2), (1, 0): (2, 1), (1, 1): (1, 1)},
    ),
    ('CornerMeet', 1): (
        {2: ((0, 1), 2), 3: ((2, 0), 2)},
        {(1, 1): 3, (1, 2): 2, (2, 1): 2, (2, 2): 1},
        {(0, 0): ((2, 2), 0), (0, 1): ((2, 1), 1), (1, 0): ((1, 2), 1), (1, 1): ((1, 1), 2)},
        {(0, 0): (2, 2), (0, 1): (2, 1), (1, 0): (1, 2), (1, 1): (1, 1)},
    ),
    ('CornerMeet', 2): (
        {3: ((1, 0), 2), 4: ((3, 1), 2)},
        {(1, 1): 2, (1, 2): 1, (2, 1): 3, (2, 2): 2},
        {(0, 0): ((2, 2), 1), (0, 1): ((1, 2), 0), (1, 0): ((2, 1), 2), (1, 1): ((1, 1), 1)},
        {(0, 0): (2, 2), (0, 1): (1, 2), (1, 0): (2, 1), (1, 1): (1, 1)},
    ),
    ('CornerMeet', 3): (
        {1: ((1, 3), 2), 4: ((3, 1), 2)},
        {(1, 1): 1, (1, 2): 2, (2, 1): 2, (2, 2): 3},
        {(0, 0): ((2, 2), 2), (0, 1): ((1, 2), 1), (1, 0): ((2, 1), 1), (1, 1): ((1, 1), 0)},
        {(0, 0): (2, 2), (0, 1): (1, 2), (1, 0): (2, 1), (1, 1): (1, 1)},
    ),
    ('OrGate', 0): (
        {1: ((1, 3), 2), 2: ((0, 1), 2), 3: ((2, 0), 2)},
        {(1, 1): 2, (1, 2): 3, (2, 1): 3, (2, 2): 3, (3, 1): 2},
        {(0, 0, 0): ((2, 0), 1), (0, 1, 1): ((1, 2), 2), (1, 0, 1): ((2, 1), 2), (1, 1, 1): ((1, 1), 1)},
        {(0, 0, 0): (2, 2), (0, 1, 1): (1, 2), (1, 0, 1): (2, 1), (1, 1, 1): (1, 1)},
    ),
    ('OrGate', 2): (
        {1: ((1, 3), 2), 3: ((1, 0), 2), 4: ((3, 1), 2)},
        {(1, 1): 1, (2, 1): 2, (2, 2): 2},
        {(0, 0, 0): ((2, 2), 1), (1, 1, 0): ((2, 1), 1), (1, 1, 1): ((1, 1), 0)},
        {(0, 0, 0): (2, 2), (1, 1, 0): (2, 1), (1, 1, 1): (1, 1)},
    ),
    ('OrGate', 3): (
        {1: ((1, 3), 3), 2: ((0, 2), 2), 4: ((3, 1), 2)},
        {(1, 1): 1, (1, 2): 3, (2, 1): 2, (2, 2): 3},
        {(0, 0, 0): ((0, 2), 1), (0, 1, 1): ((1, 2), 2), (1, 1, 0): ((2, 1), 1), (1, 1, 1): ((1, 1), 0)},
        {(0, 0, 0): (2, 2), (0, 1, 1): (1, 2), (1, 1, 0): (2, 1), (1, 1, 1): (1, 1)},
    ),
    ('AndGate', 0): (
        {1: ((1, 3), 2), 2: ((0, 1), 2), 3: ((2, 0), 2)},
        {(1, 1): 2, (1, 2): 2, (2, 2): 1},
        {(0, 0, 0): ((2, 2), 0), (0, 1, 0): ((1, 2), 1), (1, 1, 1): ((1, 1), 1)},
        {(0, 0, 0): (2, 2), (0, 1, 0): (1, 2), (1, 1, 1): (1, 1)},
    ),
    ('AndGate', 1): (
        {2: ((0, 1), 2), 3: ((2, 0), 3), 4: ((3, 1), 2)},
        {(1, 1): 3, (1, 2): 2, (2, 1): 3, (2, 2): 1},
        {(0, 0, 0): ((2, 2), 0), (0, 1, 0): ((2, 1), 2), (1, 0, 0): ((1, 2), 1), (1, 1, 1): ((3, 1), 1)},
        {(0, 0, 0): (2, 2), (0, 1, 0): (2, 1), (1, 0, 0): (1, 2), (1, 1, 1): (1, 1)},
    ),
}


def layout_label(kind: str, orientation: int) -> str:
    return f"{kind}/{orientation}"


def base_fragment(kind: str, orientation: int) -> TileFragment:
    try:
        conns, internal, restrict, anchors = LAYOUTS[(kind, orientation)]
    except KeyError:
        raise TileError(f"no fragment layout for {kind} orientation {orientation}") from None
    edits = {}
    for row, (pos, coeff) in restrict.items():
        edits[row] = (("delete", pos),) if coeff == 0 else (("reweight", pos, coeff),)
    return fragment_from_spec(layout_label(kind, orientation), conns, internal, anchors, edits)


def _fragment_json(f: TileFragment) -> dict:
    return {
        "graph": f.graph.to_json(),
        "row_anchors": [[list(r), list(p)] for r, p in sorted(f.row_anchors.items())],
        "restrict_edits": [
            [list(r), [[e[0], list(e[1])] + ([e[2].to_json()] if e[0] == "reweight" else []) for e in eds]]
            for r, eds in sorted(f.restrict_edits.items())
        ],
    }


def _fragment_from_json(label: str, obj: dict) -> TileFragment:
    from ..kinggraph import LatticeGraph

    graph = LatticeGraph.from_json(obj["graph"])
    anchors = {tuple(r): tuple(p) for r, p in obj["row_anchors"]}
    edits = {}
    for r, eds in obj["restrict_edits"]:
        norm = []
        for e in eds:
            if e[0] == "delete":
                norm.append(("delete", tuple(e[1])))
            else:
                norm.append(("reweight", tuple(e[1]), DeltaWeight.from_json(e[2])))
        edits[tuple(r)] = tuple(norm)
    return TileFragment(label, graph, anchors, edits)


def _digest(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


class FragmentLibrary:
    """Base fragments keyed by ``kind/orientation`` plus a certificate cache.

    ``compile(tile)`` applies the tile's decorations to its base fragment and
    certifies the result; certificates are memoized per decorated tile.
    """

    def __init__(self, fragments: Optional[Dict[str, TileFragment]] = None):
        if fragments is None:
            fragments = {layout_label(k, o): base_fragment(k, o) for k, o in LAYOUTS}
        self.fragments = dict(fragments)
        self._cache: Dict[tuple, Tuple[TileFragment, CompilationCertificate]] = {}

    def labels(self) -> List[str]:
        return sorted(self.fragments)

    def supports(self, tile: Tile) -> bool:
        return layout_label(tile.kind, tile.orientation) in self.fragments

    def base(self, tile: Tile) -> TileFragment:
        label = layout_label(tile.kind, tile.orientation)
        if label not in self.fragments:
            raise TileError(f"library has no fragment for {label}")
        return self.fragments[label]

    def compile(self, tile: Tile) -> Tuple[TileFragment, CompilationCertificate]:
        key = tile.key()
        hit = self._cache.get(key)
        if hit is None:
            frag = decorate_fragment(tile, self.base(tile))
            hit = (frag, certify_fragment(tile, frag))
            self._cache[key] = hit
        return hit

    def verify(self, restrictions: bool = True) -> List[Tuple[str, CompilationCertificate]]:
        """Certify every base fragment and, optionally, each single-row restriction."""
        from ..tile import Decoration, decorate

        out = []
        for label in self.labels():
            kind, o = label.split("/")
            t = standard_tile(kind, int(o))
            out.append((label, certify_fragment(t, self.fragments[label])))
            if not restrictions:
                continue
            for row in sorted(self.fragments[label].restrict_edits):
                sel = dict(zip(t.edges, row))
                rt = decorate(t, Decoration.restriction(sel))
                frag = decorate_fragment(rt, self.fragments[label])
                out.append((f"{label} -{''.join(map(str, row))}", certify_fragment(rt, frag)))
        return out

    def to_json(self) -> dict:
        payload = {label: _fragment_json(f) for label, f in sorted(self.fragments.items())}
        certs = {label: cert.to_json() for label, cert in self.verify(restrictions=False)}
        return {"fragments": payload, "certificates": certs, "verified_hash": _digest(payload)}

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, obj: dict) -> "FragmentLibrary":
        payload = obj["fragments"]
        lib = cls({label: _fragment_from_json(label, f) for label, f in payload.items()})
        if obj.get("verified_hash") != _digest(payload):
            lib.verify()
        return lib

    @classmethod
    def load(cls, path) -> "FragmentLibrary":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


_DEFAULT: Optional[FragmentLibrary] = None


def default_library() -> FragmentLibrary:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = FragmentLibrary()
    return _DEFAULT
