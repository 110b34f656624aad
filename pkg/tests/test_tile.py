import itertools

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from conftest import THREE_VARIABLE_PORTS, corner_loop, three_variable_circuit
from qapc.tile import (
    EDGES,
    Circuit,
    CircuitError,
    Decoration,
    TileError,
    build_and_chain,
    build_or_chain,
    chain_ports,
    circuit_valid_assignments,
    decorate,
    rotate_edge,
    standard_tile,
    variable,
)

ROW_COUNTS = {
    "Variable": 2, "Terminator": 2, "WireStraight": 2, "WireCorner": 2,
    "FanOut": 2, "Intersection": 4, "CornerMeet": 4, "OrGate": 4, "AndGate": 4,
}


def rows_as_strings(t):
    return sorted("".join(map(str, r)) for r in t.effective_rows)


def test_intersection_table():
    t = standard_tile("Intersection")
    assert t.edges == (1, 2, 3, 4)
    assert rows_as_strings(t) == ["0000", "0101", "1010", "1111"]


def test_or_table():
    t = standard_tile("OrGate")
    # edges (1, 2, 3): inputs right and top, output left
    assert sorted(r for r in t.effective_rows) == [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 1)]


def test_and_table():
    t = standard_tile("AndGate")
    assert sorted(t.effective_rows) == [(0, 0, 0), (0, 1, 0), (1, 0, 0), (1, 1, 1)]


def test_variable_table():
    t = standard_tile("Variable")
    assert len(t.edges) == 1 and rows_as_strings(t) == ["0", "1"]


@pytest.mark.parametrize("kind", sorted(ROW_COUNTS))
def test_row_counts_in_every_orientation(kind):
    o = 0
    while True:
        try:
            t = standard_tile(kind, o)
        except TileError:
            break
        assert len(t.effective_rows) == ROW_COUNTS[kind]
        o += 1
    assert o >= 1


def test_unknown_kind_or_orientation():
    with pytest.raises(TileError):
        standard_tile("Teleporter")
    with pytest.raises(TileError):
        standard_tile("Intersection", 1)


def test_restriction_and_bias():
    t = standard_tile("Intersection")
    r = decorate(t, Decoration.restriction(t.pair(1, 1)))
    assert rows_as_strings(r) == ["0000", "0101", "1010"]
    b = decorate(t, Decoration.bias(t.pair(0, 1), 7))
    weights = {"".join(map(str, row)): b.row_weight(row) for row in b.effective_rows}
    assert weights == {"0000": 0, "0101": 7, "1010": 0, "1111": 0}


def test_constant_variable():
    v = decorate(variable(2), Decoration.restriction({2: 0}))
    assert v.effective_rows == ((1,),)


def test_dead_and_emptying_decorations():
    v = decorate(variable(2), Decoration.restriction({2: 0}))
    with pytest.raises(TileError):
        decorate(v, Decoration.restriction({2: 1}))
    with pytest.raises(TileError):
        decorate(v, Decoration.bias({2: 0}, 1))
    with pytest.raises(TileError):
        decorate(variable(2), Decoration.restriction({1: 0}))


def test_float_bias_rejected():
    with pytest.raises(ValueError):
        Decoration.bias({2: 1}, 0.25)


@given(st.permutations([(0, 0), (0, 1), (1, 0)]))
def test_restrictions_commute(order):
    t = standard_tile("Intersection")
    for sel in order:
        t = decorate(t, Decoration.restriction(t.pair(*sel)))
    assert rows_as_strings(t) == ["1111"]


def test_rotation_cycles():
    for e in EDGES:
        assert rotate_edge(e, 4) == e
    assert [rotate_edge(1, k) for k in range(4)] == [1, 2, 3, 4]


def test_three_variable_circuit_symbolic():
    w = sympy.symbols("w1:5")
    c = three_variable_circuit(*w)
    got = {tuple(a[p] for p in THREE_VARIABLE_PORTS): wt for a, wt in circuit_valid_assignments(c)}
    w1, w2, w3, w4 = w
    assert got == {(1, 0, 1): w1 + w3, (0, 1, 1): w2 + w3, (1, 1, 0): w1 + w2, (1, 1, 1): w1 + w2 + w3 + w4}


def test_single_variable_dangling():
    c = Circuit(1, 1, {(0, 0): variable(2)})
    got = circuit_valid_assignments(c)
    assert len(got) == 2 and all(w == 0 for _, w in got)
    assert not c.is_closed


def test_wire_mismatch_rejected():
    with pytest.raises(CircuitError):
        Circuit(1, 2, {(0, 0): variable(1)})


def test_corner_loop_closed():
    c = corner_loop()
    assert c.is_closed
    assert len(circuit_valid_assignments(c)) == 2


def test_signal_cap():
    with pytest.raises(CircuitError):
        circuit_valid_assignments(Circuit(1, 1, {(0, 0): variable(2)}), cap=0)


def chain_projection(c, k):
    ins, out = chain_ports(k)
    return {(a[out],) + tuple(a[p] for p in ins) for a, _ in circuit_valid_assignments(c)}


@pytest.mark.parametrize("k", range(1, 6))
def test_or_chain(k):
    got = chain_projection(build_or_chain(k), k)
    want = {(0,) * (k + 1)} | {(1,) + tuple(int(i == j) for i in range(k)) for j in range(k)}
    assert got == want


@pytest.mark.parametrize("k", range(1, 6))
def test_and_chain(k):
    got = {x[1:] for x in chain_projection(build_and_chain(k), k)}
    want = {x for x in itertools.product((0, 1), repeat=k) if x.count(0) <= 1}
    assert got == want


def test_chain_examples():
    assert (1, 1, 0) in chain_projection(build_or_chain(2), 2)
    assert not any(x[1:] == (1, 1) for x in chain_projection(build_or_chain(2), 2))
    ands = {x[1:] for x in chain_projection(build_and_chain(3), 3)}
    assert (1, 1, 0) in ands and (1, 0, 0) not in ands
    assert {x[1:] for x in chain_projection(build_and_chain(1), 1)} == {(0,), (1,)}


def test_chain_needs_inputs():
    with pytest.raises(CircuitError):
        build_or_chain(0)
    with pytest.raises(CircuitError):
        build_and_chain(0)
