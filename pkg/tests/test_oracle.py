import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import seeded_instances
from qapc.oracle import MAX_N, brute_qap, permutations_lex
from qapc.qap import Placement, QapError, QapInstance, cost


def test_single_facility():
    res = brute_qap(QapInstance.from_lists([[3]], [[2]]))
    assert res.cost == 6
    assert res.optima == (Placement((0,)),)
    assert res.examined == 1


def test_symmetric_pair(sym_instance):
    res = brute_qap(sym_instance)
    assert res.cost == 10
    assert res.optima == (Placement((0, 1)), Placement((1, 0)))
    assert res.to_json() == {
        "optimal_cost": "10",
        "optimal_placements": [[1, 2], [2, 1]],
        "permutations_examined": 2,
    }


@pytest.mark.parametrize("n", range(0, 7))
def test_lexicographic_enumeration(n):
    got = list(permutations_lex(n))
    assert got == list(itertools.permutations(range(n)))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_count_and_optimal_costs(n):
    for inst in seeded_instances(n, 3, 500 + n):
        res = brute_qap(inst)
        assert res.examined == math.factorial(n)
        assert all(cost(inst, p) == res.cost for p in res.optima)
        assert res.cost == min(cost(inst, Placement(p)) for p in itertools.permutations(range(n)))


def test_too_large():
    n = MAX_N + 1
    inst = QapInstance.from_lists([[0] * n for _ in range(n)], [[0] * n for _ in range(n)])
    with pytest.raises(QapError):
        brute_qap(inst)


@given(st.integers(2, 5).flatmap(lambda n: st.tuples(st.just(n), st.permutations(range(n)), st.integers(0, 999))))
def test_relabeling_maps_optima(args):
    n, sigma, seed = args
    inst = seeded_instances(n, 1, seed)[0]
    moved = inst.relabel(sigma)
    before, after = brute_qap(inst), brute_qap(moved)
    assert before.cost == after.cost
    # facility x of the relabelled instance is facility sigma[x] of the original
    mapped = {Placement(tuple(p.perm[sigma[x]] for x in range(n))) for p in before.optima}
    assert mapped == set(after.optima)
