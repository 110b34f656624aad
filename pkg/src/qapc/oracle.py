"""Ground truth for small QAP instances by enumerating every permutation."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Tuple

from .qap import Placement, QapError, QapInstance, cost
from .rational import format_rational

MAX_N = 10


@dataclass(frozen=True)
class OracleResult:
    cost: Fraction
    optima: Tuple[Placement, ...]
    examined: int

    def to_json(self) -> dict:
        return {
            "optimal_cost": format_rational(self.cost),
            "optimal_placements": [list(p.as_one_based()) for p in self.optima],
            "permutations_examined": self.examined,
        }


def permutations_lex(n: int) -> Iterator[Tuple[int, ...]]:
    """All permutations of range(n) in lexicographic order (iterative)."""
    a = list(range(n))
    while True:
        yield tuple(a)
        i = n - 2
        while i >= 0 and a[i] >= a[i + 1]:
            i -= 1
        if i < 0:
            return
        j = n - 1
        while a[j] <= a[i]:
            j -= 1
        a[i], a[j] = a[j], a[i]
        a[i + 1:] = reversed(a[i + 1:])


def brute_qap(inst: QapInstance) -> OracleResult:
    n = inst.n
    if n > MAX_N:
        raise QapError(f"n={n} is too large for enumeration (limit {MAX_N})")
    best = None
    optima: List[Placement] = []
    count = 0
    for perm in permutations_lex(n):
        count += 1
        p = Placement(perm)
        c = cost(inst, p)
        if best is None or c < best:
            best, optima = c, [p]
        elif c == best:
            optima.append(p)
    return OracleResult(best, tuple(optima), count)
