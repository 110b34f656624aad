"""Exhaustive check of the correct-compilation properties.

Given a graph and the semantics it should realize (valid assignments and
their weights), find the smallest ``(k, w_tilde)`` such that

* every valid x is realized by an independent set of circuit weight
  ``k*delta + w(x)``;
* every independent set decoding to a valid x weighs at most
  ``k*delta + w(x)``, and one decoding to an invalid x at most
  ``(k-1)*delta + w_tilde``.

Inequalities are decided on delta-affine weights.  When they hold for every
delta > 0 the certificate has ``delta_min == 0``; otherwise ``delta_min`` is
the smallest delta from which they hold.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, Hashable, Iterable, Optional

from ..kinggraph import DeltaWeight, LatticeGraph, Pos
from ..rational import format_rational


@dataclass(frozen=True)
class CompilationCertificate:
    k: int
    w_tilde: Fraction
    delta_min: Fraction = Fraction(0)

    @property
    def strict(self) -> bool:
        """Properties hold for every delta > 0."""
        return self.delta_min == 0

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "w_tilde": format_rational(self.w_tilde),
            "delta_min": format_rational(self.delta_min),
        }

    def __str__(self) -> str:
        s = f"k={self.k}, w~={format_rational(self.w_tilde)}"
        if self.delta_min:
            s += f", delta>={format_rational(self.delta_min)}"
        return s


class CertificationError(Exception):
    def __init__(self, message: str, witness: Optional[FrozenSet[Pos]] = None, prop: int = 0):
        super().__init__(message)
        self.witness = witness
        self.property = prop


def certify_graph(
    graph: LatticeGraph,
    decode: Callable[[FrozenSet[Pos]], Hashable],
    valid: Dict[Hashable, Fraction],
    sets: Optional[Iterable[FrozenSet[Pos]]] = None,
) -> CompilationCertificate:
    if not valid:
        raise CertificationError("no valid assignments to realize", prop=1)
    if sets is None:
        sets = graph.independent_sets()
    valid_sets = []
    invalid_sets = []
    best_coeff: Dict[Hashable, int] = {}
    con = graph.circuit_connecting()
    for s in sets:
        x = decode(s)
        wc = set_weight(graph, con, s)
        if x in valid:
            valid_sets.append((s, x, wc))
            if wc.delta_coeff > best_coeff.get(x, wc.delta_coeff - 1):
                best_coeff[x] = wc.delta_coeff
        else:
            invalid_sets.append((s, wc))

    missing = [x for x in valid if x not in best_coeff]
    if missing:
        raise CertificationError(f"valid assignment {missing[0]} has no independent set", prop=1)
    k = max(best_coeff.values())
    short = [x for x, c in best_coeff.items() if c != k]
    if short:
        raise CertificationError(
            f"valid assignment {short[0]} tops out at {best_coeff[short[0]]}*delta, expected {k}",
            prop=1,
        )
    realized = set()
    for s, x, wc in valid_sets:
        if wc == DeltaWeight(k, valid[x]):
            realized.add(x)
    for x in valid:
        if x not in realized:
            raise CertificationError(f"no independent set realizes {x} at weight {k}d+{valid[x]}", prop=1)

    thresholds = [Fraction(0)]
    for s, x, wc in valid_sets:
        t = wc.le_threshold(DeltaWeight(k, valid[x]))
        if t is None:
            raise CertificationError(
                f"independent set decoding to valid {x} weighs {wc} > {k}d+{valid[x]}", s, 2
            )
        thresholds.append(t)

    w_tilde = max(abs(Fraction(w)) for w in valid.values())
    for s, wc in invalid_sets:
        if wc.delta_coeff > k - 1:
            raise CertificationError(
                f"independent set decoding to invalid {decode(s)} weighs {wc}, needs <= {k - 1}d+w~",
                s,
                2,
            )
        if wc.delta_coeff == k - 1:
            w_tilde = max(w_tilde, wc.bias)
    for s, wc in invalid_sets:
        t = wc.le_threshold(DeltaWeight(k - 1, w_tilde))
        if t is None:  # unreachable given the choice of w_tilde; kept as a guard
            raise CertificationError(f"invalid set {decode(s)} exceeds {k - 1}d+{w_tilde}", s, 2)
        thresholds.append(t)
    return CompilationCertificate(k, w_tilde, max(thresholds))


def set_weight(graph: LatticeGraph, con: FrozenSet[Pos], s: FrozenSet[Pos]) -> DeltaWeight:
    """Circuit weight with V_con precomputed (no independence re-check)."""
    coeff = len(con - s)
    bias = Fraction(0)
    for p in s:
        w = graph.vertices[p].weight
        coeff += w.delta_coeff
        bias += w.bias
    return DeltaWeight(coeff, bias)
