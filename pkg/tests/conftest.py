import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from qapc.kinggraph import DeltaWeight, LatticeGraph, Vertex
from qapc.qap import QapInstance
from qapc.tile import Circuit, Decoration, decorate, orientation_for, standard_tile, variable

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# one line per acceptance criterion, echoed again in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


def seeded_instances(n, count, seed):
    rng = random.Random(seed)
    return [QapInstance.random(n, rng) for _ in range(count)]


def three_variable_circuit(w1, w2, w3, w4):
    """Three biased variables, pairwise OR constraints, and a bias on x1 x2 x3.

    x2 and x3 feed an AND gate restricted at (0,0), which forces x2 or x3.
    Its output meets x1 at a corner tile restricted at (0,0), forcing
    x1 or (x2 and x3); the same corner tile carries the (1,1) bias w4.
    Ports: x1 = (0,0,4), x2 = (0,1,4), x3 = (1,2,3).
    """
    v1 = decorate(variable(4, "x1"), Decoration.bias({4: 1}, w1))
    v2 = decorate(variable(4, "x2"), Decoration.bias({4: 1}, w2))
    v3 = decorate(variable(3, "x3"), Decoration.bias({3: 1}, w3))
    meet = standard_tile("CornerMeet", 0)
    meet = decorate(meet, Decoration.restriction(meet.pair(0, 0)))
    meet = decorate(meet, Decoration.bias(meet.pair(1, 1), w4))
    gate = standard_tile("AndGate", 0)
    gate = decorate(gate, Decoration.restriction(gate.pair(0, 0)))
    tiles = {(0, 0): v1, (0, 1): v2, (1, 0): meet, (1, 1): gate, (1, 2): v3}
    return Circuit(2, 3, tiles)


THREE_VARIABLE_PORTS = ((0, 0, 4), (0, 1, 4), (1, 2, 3))


def two_wire_circuit():
    """Two horizontal straight wires side by side (both outer ends dangling)."""
    left = standard_tile("WireStraight", 1)
    right = standard_tile("WireStraight", 1)
    return Circuit(1, 2, {(0, 0): left, (0, 1): right})


def corner_loop():
    """Closed loop of four corner wires."""
    return Circuit(2, 2, {
        (0, 0): standard_tile("WireCorner", 3),
        (0, 1): standard_tile("WireCorner", 2),
        (1, 0): standard_tile("WireCorner", 0),
        (1, 1): standard_tile("WireCorner", 1),
    })


def random_lattice_graph(rng, max_vertices=25):
    """Interior vertices scattered over a small lattice with mixed delta-affine weights."""
    rows, cols = rng.randint(1, 2), rng.randint(1, 3)
    cells = [(r, c) for r in range(4 * rows) for c in range(4 * cols)]
    count = rng.randint(0, min(max_vertices, len(cells)))
    verts = {}
    for p in rng.sample(cells, count):
        w = DeltaWeight(rng.randint(-1, 2), Fraction(rng.randint(-6, 6), rng.randint(1, 3)))
        verts[p] = Vertex(w)
    return LatticeGraph(rows, cols, verts)


def biased_corner_loop(ws):
    tiles = dict(corner_loop().tiles)
    for (pos, t), w in zip(sorted(tiles.items()), ws):
        tiles[pos] = decorate(t, Decoration.bias({t.edges[0]: 1}, w)) if w else t
    return Circuit(2, 2, tiles)


def variable_pair(w1, w2):
    a = decorate(variable(1), Decoration.bias({1: 1}, w1)) if w1 else variable(1)
    end = standard_tile("Terminator", orientation_for("Terminator", [3]))
    b = decorate(end, Decoration.bias({3: 0}, w2)) if w2 else end
    return Circuit(1, 2, {(0, 0): a, (0, 1): b})


def random_closed_circuits(rng, count):
    out = []
    for _ in range(count):
        pick = rng.randrange(3)
        ws = [Fraction(rng.randint(-6, 6), rng.choice([1, 2, 3])) for _ in range(4)]
        if pick == 0:
            out.append(biased_corner_loop(ws))
        elif pick == 1:
            out.append(variable_pair(ws[0], ws[1]))
        else:
            out.append(three_variable_circuit(*ws))
    return out


def random_independent(g, rng):
    order = g.positions()
    rng.shuffle(order)
    s = set()
    for p in order:
        if rng.random() < 0.5 and not any(q in s for q in g.neighbors(p)):
            s.add(p)
    return s


@pytest.fixture
def sym_instance():
    return QapInstance.from_lists([[0, 1], [1, 0]], [[0, 5], [5, 0]])
