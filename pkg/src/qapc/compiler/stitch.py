"""Stitch per-tile fragments into one lattice graph for a whole circuit."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, FrozenSet, Optional, Tuple

from ..kinggraph import BOX, LatticeGraph, Pos, Vertex, box_of, king_adjacent
from ..rational import format_rational, parse_rational
from ..tile import Circuit, CircuitAssignment, Port, circuit_valid_assignments
from .certify import CompilationCertificate, certify_graph
from .fragments import TileFragment, certify_fragment, member_means_one
from .library import FragmentLibrary, default_library

DEFAULT_MARGIN = Fraction(1, 10)
MEASURE_CAP = 40  # vertices; beyond this the measured certificate is skipped


class StitchError(ValueError):
    pass


@dataclass(frozen=True)
class CompiledCircuit:
    circuit: Circuit
    graph: LatticeGraph
    certificate: CompilationCertificate
    tile_certificates: Dict[Tuple[int, int], CompilationCertificate] = field(default_factory=dict)
    delta: Optional[Fraction] = None
    measured: Optional[CompilationCertificate] = None

    @property
    def k(self) -> int:
        return self.certificate.k

    @property
    def w_tilde(self) -> Fraction:
        return self.certificate.w_tilde

    def with_delta(self, delta) -> "CompiledCircuit":
        return replace(self, delta=parse_rational(delta))

    def summary(self) -> dict:
        out = {
            "tiles": len(self.circuit.tiles),
            "vertices": len(self.graph),
            "certificate": self.certificate.to_json(),
        }
        if self.measured is not None:
            out["measured"] = self.measured.to_json()
        if self.delta is not None:
            out["delta"] = format_rational(self.delta)
        return out


def _offset(vertices: Dict[Pos, Vertex], r: int, c: int, tag: str) -> Dict[Pos, Vertex]:
    out = {}
    for (pr, pc), v in vertices.items():
        label = f"{tag}.{v.label.split('.', 1)[-1]}" if v.label else tag
        out[(pr + BOX * r, pc + BOX * c)] = Vertex(v.weight, v.connecting, v.edge, label, v.corner_ok)
    return out


def _check_adjacency(c: Circuit, g: LatticeGraph, conn_at: Dict[Port, Pos]) -> None:
    for p, q in (net for net in c.nets() if len(net) == 2):
        if not king_adjacent(conn_at[p], conn_at[q]):
            raise StitchError(f"connecting vertices of ports {p} and {q} are not adjacent")
    port_of = {pos: port for port, pos in conn_at.items()}
    for u, v in g.edges():
        bu, bv = box_of(u), box_of(v)
        if bu == bv:
            continue
        pu, pv = port_of.get(u), port_of.get(v)
        if pu is None or pv is None or c.partner(pu) != pv:
            raise StitchError(f"unintended adjacency between {u} in box {bu} and {v} in box {bv}")


def stitch(c: Circuit, library: Optional[FragmentLibrary] = None, allow_open: bool = False,
           measure: bool = True, overrides: Optional[Dict[Tuple[int, int], TileFragment]] = None
           ) -> CompiledCircuit:
    """Compile every tile, place the fragments, and compose their certificates.

    With ``n`` matched wire pairs the composed offset is ``sum(k_i) - n``; for
    a closed circuit this is ``sum(k_i - |V_con,i| / 2)``.  ``w_tilde`` adds up
    and ``delta_min`` is the largest per-tile threshold.  ``overrides`` maps
    grid positions to hand-built fragments, certified here before use.
    """
    if not allow_open and not c.is_closed:
        raise StitchError(f"circuit is open: dangling wire ends at {c.dangling()}")
    library = library or default_library()
    vertices: Dict[Pos, Vertex] = {}
    conn_at: Dict[Port, Pos] = {}
    certs = {}
    for (r, col) in c.positions():
        t = c.tiles[(r, col)]
        if overrides and (r, col) in overrides:
            frag = overrides[(r, col)]
            cert = certify_fragment(t, frag)
        else:
            frag, cert = library.compile(t)
        certs[(r, col)] = cert
        placed = _offset(frag.graph.vertices, r, col, f"t{r}_{col}")
        for pos, v in placed.items():
            if v.connecting:
                conn_at[(r, col, v.edge)] = pos
        vertices.update(placed)
    g = LatticeGraph(max(c.rows, 1), max(c.cols, 1), vertices)
    _check_adjacency(c, g, conn_at)
    matched = sum(1 for net in c.nets() if len(net) == 2)
    k = sum(cert.k for cert in certs.values()) - matched
    w_tilde = sum((cert.w_tilde for cert in certs.values()), Fraction(0))
    delta_min = max((cert.delta_min for cert in certs.values()), default=Fraction(0))
    cc = CompiledCircuit(c, g, CompilationCertificate(k, w_tilde, delta_min), certs)
    if measure and len(g) <= MEASURE_CAP:
        cc = replace(cc, measured=measure_certificate(cc))
    return cc


def decode_assignment(g: LatticeGraph, s) -> CircuitAssignment:
    """Wire values read off connecting vertices; no consistency check."""
    s = frozenset(s)
    values = {}
    for pos, v in g.vertices.items():
        if not v.connecting:
            continue
        r, c = box_of(pos)
        inside = pos in s
        values[(r, c, v.edge)] = int(inside) if member_means_one(v.edge) else int(not inside)
    return CircuitAssignment(values)


def is_consistent(c: Circuit, a: CircuitAssignment) -> bool:
    for net in c.nets():
        if len(net) == 2 and a[net[0]] != a[net[1]]:
            return False
    return True


def measure_certificate(cc: CompiledCircuit) -> CompilationCertificate:
    """Certify the whole stitched graph directly (exhaustive; small graphs only)."""
    valid = {}
    for a, w in circuit_valid_assignments(cc.circuit):
        valid[a.key()] = Fraction(w)

    def decode(s):
        return decode_assignment(cc.graph, s).key()

    return certify_graph(cc.graph, decode, valid)


def choose_delta(cc: CompiledCircuit, bound=None, margin=DEFAULT_MARGIN) -> Fraction:
    """A delta strictly above ``bound`` (default ``2 * w_tilde``) with a relative margin.

    The result also respects the certified ``delta_min`` of the fragments.
    A zero bound yields ``margin`` itself.
    """
    bound = 2 * cc.w_tilde if bound is None else parse_rational(bound)
    if bound < 0:
        raise ValueError("delta bound must be non-negative")
    margin = parse_rational(margin)
    base = max(bound, cc.certificate.delta_min)
    return base * (1 + margin) if base > 0 else margin


def matched_pairs(c: Circuit) -> int:
    return sum(1 for net in c.nets() if len(net) == 2)


def boundary_ports(c: Circuit, part1) -> FrozenSet[Port]:
    part1 = set(part1)
    out = set()
    for net in c.nets():
        if len(net) == 2:
            a, b = net
            if ((a[0], a[1]) in part1) != ((b[0], b[1]) in part1):
                out.update(net)
    return frozenset(out)


__all__ = [
    "CompiledCircuit",
    "StitchError",
    "choose_delta",
    "decode_assignment",
    "is_consistent",
    "measure_certificate",
    "stitch",
]
