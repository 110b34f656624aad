"""Exact maximum-weight independent set solvers for lattice graphs.

Tie-break shared by both solvers: among optimal sets, scan vertices in
ascending position order and prefer the set containing the first vertex on
which two candidates differ.  The rule is decided per connected component,
so it composes over disjoint parts of a graph.
"""
from __future__ import annotations

import math
import os
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Tuple, Union

from .kinggraph import DeltaWeight, LatticeGraph, Pos
from .rational import format_rational, parse_rational

BRUTE_CAP = 30
DEFAULT_TIMEOUT = 600.0
TIMEOUT_ENV = "QAPC_TIMEOUT_SECS"

Weight = Union[Fraction, DeltaWeight]


class SolverError(ValueError):
    pass


@dataclass(frozen=True)
class SolveReport:
    solution: FrozenSet[Pos]
    weight: Weight
    nodes: int
    wall_time: float
    solver: str
    delta: Optional[Fraction] = None
    timed_out: bool = False

    def to_json(self, timings: bool = True) -> dict:
        w = self.weight.to_json() if isinstance(self.weight, DeltaWeight) else format_rational(self.weight)
        out = {
            "solver": self.solver,
            "solution": [list(p) for p in sorted(self.solution)],
            "weight": w,
            "nodes": self.nodes,
            "optimal": not self.timed_out,
        }
        if self.delta is not None:
            out["delta"] = format_rational(self.delta)
        if timings:
            out["wall_time"] = round(self.wall_time, 6)
        return out


def timeout_budget(timeout=None) -> float:
    if timeout is not None:
        return float(timeout)
    env = os.environ.get(TIMEOUT_ENV)
    return float(env) if env else DEFAULT_TIMEOUT


def _prefer(a: int, b: int) -> int:
    """Tie-break between two bitmasks over ascending vertex indices."""
    diff = a ^ b
    if not diff:
        return a
    low = diff & -diff
    return a if a & low else b


def _adjacency(positions: List[Pos]) -> List[int]:
    index = {p: i for i, p in enumerate(positions)}
    nb = []
    for r, c in positions:
        m = 0
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                if dr or dc:
                    j = index.get((r + dr, c + dc))
                    if j is not None:
                        m |= 1 << j
        nb.append(m)
    return nb


def _weigh(g: LatticeGraph, delta) -> Dict[Pos, Weight]:
    if delta is None:
        return {p: v.weight for p, v in g.vertices.items()}
    d = parse_rational(delta)
    return {p: v.weight.at(d) for p, v in g.vertices.items()}


def _key(w: Weight):
    return w.sort_key() if isinstance(w, DeltaWeight) else w


def brute_mwis(g: LatticeGraph, delta=None, cap: int = BRUTE_CAP) -> SolveReport:
    """Enumerate independent sets.  Without ``delta`` weights compare for large delta."""
    if len(g) > cap:
        raise SolverError(f"{len(g)} vertices exceed the brute-force cap {cap}")
    start = time.perf_counter()
    positions = g.positions()
    ws = _weigh(g, delta)
    wl = [ws[p] for p in positions]
    nb = _adjacency(positions)
    n = len(positions)
    zero = DeltaWeight(0) if delta is None else Fraction(0)
    best = [None, 0]
    nodes = [0]

    def rec(i: int, blocked: int, chosen: int, w):
        nodes[0] += 1
        if i == n:
            k = _key(w)
            if best[0] is None or k > _key(best[0]):
                best[0], best[1] = w, chosen
            elif k == _key(best[0]):
                best[1] = _prefer(best[1], chosen)
            return
        if not blocked >> i & 1:
            rec(i + 1, blocked | nb[i], chosen | 1 << i, w + wl[i])
        rec(i + 1, blocked, chosen, w)

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * n + 100))
    try:
        rec(0, 0, 0, zero)
    finally:
        sys.setrecursionlimit(old)
    chosen = frozenset(positions[i] for i in range(n) if best[1] >> i & 1)
    d = None if delta is None else parse_rational(delta)
    return SolveReport(chosen, best[0], nodes[0], time.perf_counter() - start, "brute", d)


class _Timeout(Exception):
    pass


def _bits(m: int):
    while m:
        low = m & -m
        yield low.bit_length() - 1
        m ^= low


class _BnB:
    def __init__(self, positions: List[Pos], weights: List[int], deadline: float):
        self.pos = positions
        self.w = weights
        self.nb = _adjacency(positions)
        self.deadline = deadline
        self.memo: Dict[int, Tuple[int, int]] = {}
        self.nodes = 0
        # 2x2 blocks of the king lattice are cliques; four block offsets
        self.blocks = []
        for dr in (0, 1):
            for dc in (0, 1):
                groups: Dict[Tuple[int, int], int] = {}
                for i, (r, c) in enumerate(positions):
                    key = ((r + dr) // 2, (c + dc) // 2)
                    groups[key] = groups.get(key, 0) | 1 << i
                self.blocks.append(list(groups.values()))

    def bound(self, mask: int) -> int:
        best = None
        for groups in self.blocks:
            s = 0
            for gm in groups:
                sub = gm & mask
                if sub:
                    s += max(self.w[i] for i in _bits(sub))
            best = s if best is None else min(best, s)
        return best or 0

    def component(self, mask: int) -> int:
        low = mask & -mask
        comp = low
        frontier = low
        while frontier:
            grow = 0
            for i in _bits(frontier):
                grow |= self.nb[i]
            frontier = grow & mask & ~comp
            comp |= frontier
        return comp

    def solve(self, mask: int) -> Tuple[int, int]:
        if not mask:
            return 0, 0
        hit = self.memo.get(mask)
        if hit is not None:
            return hit
        self.nodes += 1
        if self.nodes & 1023 == 0 and time.perf_counter() > self.deadline:
            raise _Timeout
        comp = self.component(mask)
        if comp != mask:
            v1, s1 = self.solve(comp)
            v2, s2 = self.solve(mask & ~comp)
            out = (v1 + v2, s1 | s2)
        else:
            v = max(_bits(mask), key=lambda i: (bin(self.nb[i] & mask).count("1"), -i))
            inc_val, inc_set = self.solve(mask & ~self.nb[v] & ~(1 << v))
            inc_val += self.w[v]
            inc_set |= 1 << v
            rest = mask & ~(1 << v)
            if self.bound(rest) < inc_val:
                out = (inc_val, inc_set)
            else:
                exc_val, exc_set = self.solve(rest)
                if exc_val > inc_val:
                    out = (exc_val, exc_set)
                elif exc_val < inc_val:
                    out = (inc_val, inc_set)
                else:
                    out = (inc_val, _prefer(inc_set, exc_set))
        self.memo[mask] = out
        return out

    def greedy(self) -> int:
        chosen, blocked = 0, 0
        for i in sorted(range(len(self.w)), key=lambda i: (-self.w[i], i)):
            if not blocked >> i & 1:
                chosen |= 1 << i
                blocked |= self.nb[i] | 1 << i
        return chosen


def bnb_mwis(g: LatticeGraph, delta, timeout=None) -> SolveReport:
    """Exact MWIS at a concrete delta by memoized branch-and-bound.

    Branches on the highest-degree vertex of a connected residual (include
    first) and skips the exclude branch when a 2x2-clique-cover bound cannot
    reach the include value.  On timeout a greedy set is returned with
    ``timed_out`` set.
    """
    start = time.perf_counter()
    d = parse_rational(delta)
    if d <= 0:
        raise SolverError("delta must be positive")
    positions = g.positions()
    ws = {p: g.vertices[p].weight.at(d) for p in positions}
    keep = [p for p in positions if ws[p] >= 0]
    scale = 1
    for p in keep:
        scale = scale * ws[p].denominator // math.gcd(scale, ws[p].denominator)
    ints = [int(ws[p] * scale) for p in keep]
    solver = _BnB(keep, ints, start + timeout_budget(timeout))
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 8 * len(keep) + 200))
    timed_out = False
    try:
        _, chosen = solver.solve((1 << len(keep)) - 1)
    except _Timeout:
        timed_out = True
        chosen = solver.greedy()
    finally:
        sys.setrecursionlimit(old)
    members = frozenset(keep[i] for i in _bits(chosen))
    weight = sum((ws[p] for p in members), Fraction(0))
    return SolveReport(members, weight, solver.nodes, time.perf_counter() - start, "bnb", d, timed_out)


def verify(g: LatticeGraph, s, claimed, delta=None) -> Tuple[bool, str]:
    """Check independence and recompute the plain weight of ``s``."""
    s = frozenset(tuple(p) for p in s)
    foreign = [p for p in s if p not in g.vertices]
    if foreign:
        return False, f"vertex {foreign[0]} is not in the graph"
    if not g.is_independent(s):
        return False, "set contains an adjacent pair"
    actual = g.plain_weight(s)
    if delta is not None:
        actual = actual.at(parse_rational(delta))
    if isinstance(claimed, dict):
        claimed = DeltaWeight.from_json(claimed)
    elif not isinstance(claimed, DeltaWeight):
        claimed = parse_rational(claimed)
    if actual != claimed:
        return False, f"claimed weight {claimed} but the set weighs {actual}"
    return True, "ok"
