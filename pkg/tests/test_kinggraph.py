import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import corner_loop, random_independent, three_variable_circuit, two_wire_circuit
from qapc.compiler.stitch import stitch
from qapc.kinggraph import (
    DeltaWeight,
    LatticeGraph,
    LatticeGraphError,
    Vertex,
    box_of,
    dw,
    king_adjacent,
)
from qapc.tile import build_and_chain, build_or_chain

weights = st.builds(DeltaWeight, st.integers(-4, 4), st.fractions(-10, 10, max_denominator=5))


def graph(points, rows=1, cols=1):
    return LatticeGraph(rows, cols, {p: Vertex(w) for p, w in points.items()})


def test_independence_basics():
    g = graph({(1, 1): dw(1), (2, 2): dw(1), (1, 3): dw(1)})
    assert g.is_independent([])
    assert not g.is_independent([(1, 1), (2, 2)])
    assert g.is_independent([(1, 1), (1, 3)])
    with pytest.raises(LatticeGraphError):
        g.is_independent([(0, 0)])


def test_circuit_weight_closed_empty():
    assert graph({(1, 1): dw(2)}).circuit_weight([]) == DeltaWeight(0, 0)


def test_circuit_weight_counts_unmatched_connecting():
    g = LatticeGraph(1, 1, {
        (1, 0): Vertex(dw(0), connecting=True, edge=3),
        (1, 3): Vertex(dw(0), connecting=True, edge=1),
        (2, 1): Vertex(dw(0)),
    })
    assert g.circuit_weight([]) == DeltaWeight(2, 0)
    assert g.circuit_weight([(1, 0)]) == DeltaWeight(1, 0)
    with pytest.raises(LatticeGraphError):
        g.circuit_weight([(1, 0), (2, 1)])


def test_connecting_vertex_placement_rules():
    with pytest.raises(LatticeGraphError):
        LatticeGraph(1, 1, {(0, 0): Vertex(dw(1), connecting=True, edge=2)})
    with pytest.raises(LatticeGraphError):
        LatticeGraph(1, 1, {(1, 1): Vertex(dw(1), connecting=True, edge=1)})
    with pytest.raises(LatticeGraphError):
        LatticeGraph(1, 1, {(0, 1): Vertex(dw(1), connecting=True, edge=1)})
    LatticeGraph(1, 1, {(0, 0): Vertex(dw(1), connecting=True, edge=2, corner_ok=True)})


def test_outside_box():
    with pytest.raises(LatticeGraphError):
        graph({(4, 0): dw(1)})


@given(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), st.tuples(st.integers(-3, 3), st.integers(-3, 3)))
def test_king_adjacency(p, q):
    expected = p != q and abs(p[0] - q[0]) <= 1 and abs(p[1] - q[1]) <= 1
    assert king_adjacent(p, q) == expected == king_adjacent(q, p)


@given(weights, weights, weights)
def test_for_all_order_is_partial_order(a, b, c):
    assert a.le_for_all(a)
    if a.le_for_all(b) and b.le_for_all(a):
        assert a == b
    if a.le_for_all(b) and b.le_for_all(c):
        assert a.le_for_all(c)


@given(weights, weights)
def test_comparison_modes_agree_with_evaluation(a, b):
    if a.le_for_all(b):
        for d in (Fraction(1, 100), 1, 1000):
            assert a.at(d) <= b.at(d)
    assert a.le_eventually(b) == (a.at(10 ** 6) <= b.at(10 ** 6))
    t = a.le_threshold(b)
    if t is not None:
        assert a.at(t) <= b.at(t) and a.at(t + 7) <= b.at(t + 7)


def test_weight_json_round_trip():
    w = DeltaWeight(3, Fraction(-5, 7))
    assert DeltaWeight.from_json(w.to_json()) == w


def test_split_boundaries():
    cc = stitch(two_wire_circuit(), allow_open=True, measure=False)
    b1, b2, b = cc.graph.split_boundary({(0, 0)})
    assert len(b1) == 1 and len(b2) == 1 and len(b) == 2
    far = LatticeGraph(1, 3, {(1, 1): Vertex(dw(1)), (1, 9): Vertex(dw(1))})
    assert far.split_boundary({(0, 0)})[2] == frozenset()
    with pytest.raises(LatticeGraphError):
        far.split_boundary({(0, 0), (0, 2)})


def test_lemma_empty_set():
    cc = stitch(corner_loop(), measure=False)
    assert cc.graph.check_weight_lemma({(0, 0), (1, 0)}, [])


@pytest.fixture(scope="module")
def small_graphs():
    circuits = [corner_loop(), three_variable_circuit(1, 2, 3, 4), build_or_chain(3), build_and_chain(4)]
    out = [stitch(c, allow_open=True, measure=False).graph for c in circuits]
    out.append(stitch(two_wire_circuit(), allow_open=True, measure=False).graph)
    return out


def test_connecting_partition_identity(small_graphs):
    rng = random.Random(7)
    for g in small_graphs:
        boxes = sorted(g.boxes())
        for _ in range(10):
            part1 = {b for b in boxes if rng.random() < 0.5}
            if not part1 or part1 == set(boxes):
                continue
            g1 = g.restrict(part1)
            g2 = g.restrict(set(boxes) - part1)
            _, _, b = g.split_boundary(part1)
            whole = g.circuit_connecting()
            assert not whole & b
            assert whole | b == g1.circuit_connecting() | g2.circuit_connecting()


def test_weight_lemma_random(small_graphs):
    rng = random.Random(11)
    for g in small_graphs:
        boxes = sorted(g.boxes())
        for _ in range(40):
            part1 = {b for b in boxes if rng.random() < 0.5}
            if not part1 or part1 == set(boxes):
                continue
            assert g.check_weight_lemma(part1, random_independent(g, rng))


def test_graph_json_round_trip(small_graphs):
    for g in small_graphs:
        assert LatticeGraph.from_json(g.to_json()) == g
        assert LatticeGraph.from_json(g.to_json(delta=Fraction(3, 2))) == g


def test_export_fields():
    g = stitch(corner_loop(), measure=False).graph
    obj = g.to_json(delta=2)
    assert obj["radius"] == "3/2" and obj["delta"] == "2"
    v = obj["vertices"][0]
    assert {"x", "y", "weight", "connecting", "label"} <= set(v)
    assert all(box_of((e["y"], e["x"])) in g.boxes() for e in obj["vertices"])
