"""Quadratic assignment instances, their binary formulations and circuits.

Facilities are indexed by ``x, y`` and locations by ``i, j``, both 0-based in
code.  A placement maps facility ``x`` to location ``perm[x]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .cbop import BinaryProblem, Constraint, VariableMap, WeightPolynomial
from .rational import format_rational, parse_rational
from .tile import (
    Circuit,
    CircuitAssignment,
    Decoration,
    Port,
    decorate,
    orientation_for,
    standard_tile,
)

Matrix = Tuple[Tuple[Fraction, ...], ...]
Wire = Tuple[int, int]


class QapError(ValueError):
    pass


def _matrix(rows, allow_float=False) -> Matrix:
    return tuple(tuple(parse_rational(v, allow_float=allow_float) for v in row) for row in rows)


@dataclass(frozen=True)
class QapInstance:
    F: Matrix
    D: Matrix

    def __post_init__(self):
        n = len(self.F)
        for name, m in (("F", self.F), ("D", self.D)):
            if len(m) != n or any(len(row) != n for row in m):
                raise QapError(f"{name} must be {n}x{n}")

    @classmethod
    def from_lists(cls, F, D, allow_float=False) -> "QapInstance":
        return cls(_matrix(F, allow_float), _matrix(D, allow_float))

    @property
    def n(self) -> int:
        return len(self.F)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "F": [[format_rational(v) for v in row] for row in self.F],
            "D": [[format_rational(v) for v in row] for row in self.D],
        }

    @classmethod
    def from_json(cls, obj) -> "QapInstance":
        inst = cls.from_lists(obj["F"], obj["D"])
        if "n" in obj and int(obj["n"]) != inst.n:
            raise QapError(f"declared n={obj['n']} but matrices are {inst.n}x{inst.n}")
        return inst

    @classmethod
    def random(cls, n: int, rng, low: int = 0, high: int = 9) -> "QapInstance":
        """Integer instance drawn from ``rng`` (a ``random.Random``)."""
        F = [[rng.randint(low, high) for _ in range(n)] for _ in range(n)]
        D = [[rng.randint(low, high) for _ in range(n)] for _ in range(n)]
        return cls.from_lists(F, D)

    def relabel(self, sigma: Sequence[int]) -> "QapInstance":
        """Facility x of the result is facility sigma[x] of this instance."""
        n = self.n
        F = [[self.F[sigma[x]][sigma[y]] for y in range(n)] for x in range(n)]
        return QapInstance(_matrix(F), self.D)


@dataclass(frozen=True)
class Placement:
    perm: Tuple[int, ...]

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.perm))):
            raise QapError(f"{self.perm} is not a permutation")

    @classmethod
    def one_based(cls, values: Sequence[int]) -> "Placement":
        return cls(tuple(v - 1 for v in values))

    def as_one_based(self) -> Tuple[int, ...]:
        return tuple(v + 1 for v in self.perm)

    def matrix(self) -> Tuple[Tuple[int, ...], ...]:
        n = len(self.perm)
        return tuple(tuple(int(self.perm[x] == i) for i in range(n)) for x in range(n))

    def __str__(self) -> str:
        return "(" + ", ".join(str(v) for v in self.as_one_based()) + ")"


def cost(inst: QapInstance, p: Placement) -> Fraction:
    n = inst.n
    if len(p.perm) != n:
        raise QapError(f"placement of size {len(p.perm)} for an instance of size {n}")
    q = p.perm
    return sum((inst.F[x][y] * inst.D[q[x]][q[y]] for x in range(n) for y in range(n)), Fraction(0))


# -- formulations -------------------------------------------------------------


def canonical_var(n: int, x: int, i: int) -> int:
    return x * n + i


def canonical_formulation(inst: QapInstance) -> BinaryProblem:
    """n^2 assignment bits, one-per-row and one-per-column, weight -C."""
    n = inst.n
    if n < 1:
        raise QapError("empty instance")
    names = [f"pi_{x + 1}_{i + 1}" for x in range(n) for i in range(n)]
    cons = []
    for x in range(n):
        cons.append(Constraint.eq([canonical_var(n, x, i) for i in range(n)], [1] * n, 1))
    for i in range(n):
        cons.append(Constraint.eq([canonical_var(n, x, i) for x in range(n)], [1] * n, 1))
    terms: Dict[frozenset, Fraction] = {}
    for x in range(n):
        for y in range(n):
            for i in range(n):
                for j in range(n):
                    c = inst.F[x][y] * inst.D[i][j]
                    if c:
                        key = frozenset({canonical_var(n, x, i), canonical_var(n, y, j)})
                        terms[key] = terms.get(key, Fraction(0)) - c
    return BinaryProblem.build(names, cons, WeightPolynomial(terms))


@dataclass(frozen=True)
class ReducedCoefficients:
    """Coefficients of the (n-1)^2-variable formulation.

    ``linear[(x, i)]`` and ``quadratic[((x, i), (y, j))]`` for x < y and
    i != j; pairs sharing a facility or a location never both carry 1 on a
    valid assignment, so their products are dropped here (they are kept in
    the full polynomial).  For every valid assignment
    ``sum(quadratic) + sum(linear) == c_I - C``.
    """

    n: int
    linear: Dict[Wire, Fraction]
    quadratic: Dict[Tuple[Wire, Wire], Fraction]
    c_I: Fraction
    f_prime: Matrix = ()
    d_prime: Matrix = ()

    def weight(self, bits: Sequence[int]) -> Fraction:
        N = self.n - 1
        on = {(x, i) for x in range(N) for i in range(N) if bits[x * N + i]}
        total = sum((self.linear[w] for w in on), Fraction(0))
        total += sum((c for (a, b), c in self.quadratic.items() if a in on and b in on), Fraction(0))
        return total

    def theorem2_bound(self) -> Fraction:
        """max over wires of |w_xi| + sum of |w_xi,yj| over its partners."""
        best = Fraction(0)
        for w, lin in self.linear.items():
            s = abs(lin) + sum((abs(c) for (a, b), c in self.quadratic.items() if w in (a, b)), Fraction(0))
            best = max(best, s)
        return best


def reduced_var(n: int, x: int, i: int) -> int:
    return x * (n - 1) + i


def _implicit_matrix(n: int) -> List[List[WeightPolynomial]]:
    """All n^2 placement bits as polynomials in the reduced variables."""
    N = n - 1
    P = [[WeightPolynomial() for _ in range(n)] for _ in range(n)]
    total = WeightPolynomial()
    for x in range(N):
        for i in range(N):
            P[x][i] = WeightPolynomial.var(reduced_var(n, x, i))
            total = total + P[x][i]
    for x in range(N):
        P[x][N] = 1 - sum((P[x][i] for i in range(N)), WeightPolynomial())
    for i in range(N):
        P[N][i] = 1 - sum((P[x][i] for x in range(N)), WeightPolynomial())
    P[N][N] = (2 - n) + total
    return P


def variable_map(n: int) -> VariableMap:
    """Reduced bits -> canonical bits (rows and column n eliminated)."""
    N = n - 1
    exprs = []
    for x in range(n):
        for i in range(n):
            if x < N and i < N:
                exprs.append((((reduced_var(n, x, i), 1),), 0))
            elif x < N:
                exprs.append((tuple((reduced_var(n, x, j), -1) for j in range(N)), 1))
            elif i < N:
                exprs.append((tuple((reduced_var(n, y, i), -1) for y in range(N)), 1))
            else:
                exprs.append((tuple((reduced_var(n, y, j), 1) for y in range(N) for j in range(N)), 2 - n))
    return VariableMap.from_exprs(exprs)


def _primes(inst: QapInstance) -> Tuple[Matrix, Matrix]:
    n, F, D = inst.n, inst.F, inst.D
    m = n - 1
    fp = tuple(tuple(F[x][y] - F[x][m] - F[m][y] + F[m][m] for y in range(n)) for x in range(n))
    dp = tuple(tuple(D[i][j] - D[i][m] - D[m][j] + D[m][m] for j in range(n)) for i in range(n))
    return fp, dp


def reduced_formulation(inst: QapInstance) -> Tuple[BinaryProblem, ReducedCoefficients, VariableMap]:
    """Eliminate row and column n by substitution and expand -C symbolically."""
    n = inst.n
    if n < 2:
        raise QapError("the reduced formulation needs n >= 2")
    N = n - 1
    P = _implicit_matrix(n)
    # sum_i D[i][j] P[y][j] first, so the expansion stays O(n^3) products
    C = WeightPolynomial()
    for x in range(n):
        for i in range(n):
            inner = WeightPolynomial()
            for y in range(n):
                for j in range(n):
                    c = inst.F[x][y] * inst.D[i][j]
                    if c:
                        inner = inner + c * P[y][j]
            C = C + P[x][i] * inner
    c_I = C.constant_term
    weight = -(C - c_I)
    names = [f"pi_{x + 1}_{i + 1}" for x in range(N) for i in range(N)]
    cons = []
    for x in range(N):
        cons.append(Constraint.le([reduced_var(n, x, i) for i in range(N)], [1] * N, 1))
    for i in range(N):
        cons.append(Constraint.le([reduced_var(n, x, i) for x in range(N)], [1] * N, 1))
    cons.append(Constraint.ge(list(range(N * N)), [1] * (N * N), n - 2))
    problem = BinaryProblem.build(names, cons, weight)
    linear = {(x, i): weight.coeff(reduced_var(n, x, i)) for x in range(N) for i in range(N)}
    quadratic = {}
    for x in range(N):
        for y in range(x + 1, N):
            for i in range(N):
                for j in range(N):
                    if i != j:
                        quadratic[((x, i), (y, j))] = weight.coeff(reduced_var(n, x, i), reduced_var(n, y, j))
    fp, dp = _primes(inst)
    coeffs = ReducedCoefficients(n, linear, quadratic, c_I, fp, dp)
    return problem, coeffs, variable_map(n)


def closed_form_coefficients(inst: QapInstance) -> Tuple[Dict[Wire, Fraction], Dict[Tuple[Wire, Wire], Fraction]]:
    """The displayed closed-form coefficients, transcribed index for index."""
    n, F, D = inst.n, inst.F, inst.D
    N, last = n - 1, n - 1
    fp, dp = _primes(inst)
    linear = {}
    for x in range(N):
        for i in range(N):
            s = -2 * fp[x][x] * dp[i][i]
            for m in range(n):
                s += fp[x][m] * dp[i][m] - (F[x][m] - F[x][last]) * (D[i][m] - D[last][m])
                s += fp[m][x] * dp[m][i] - (F[m][x] - F[last][x]) * (D[m][i] - D[m][last])
            linear[(x, i)] = s
    quad = {}
    for x in range(N):
        for y in range(x + 1, N):
            for i in range(N):
                for j in range(N):
                    if i != j:
                        quad[((x, i), (y, j))] = -(fp[x][y] * dp[y][j] + fp[y][x] * dp[j][i])
    return linear, quad


def index_corrected_quadratic(inst: QapInstance) -> Dict[Tuple[Wire, Wire], Fraction]:
    """Same shape with the location pair (i, j) in the first product."""
    N = inst.n - 1
    fp, dp = _primes(inst)
    return {
        ((x, i), (y, j)): -(fp[x][y] * dp[i][j] + fp[y][x] * dp[j][i])
        for x in range(N)
        for y in range(x + 1, N)
        for i in range(N)
        for j in range(N)
        if i != j
    }


def decode_reduced_bits(bits: Sequence[int], n: int) -> Placement:
    """Rebuild the full placement through the elimination equations."""
    N = n - 1
    if len(bits) != N * N:
        raise QapError(f"expected {N * N} reduced bits, got {len(bits)}")
    fail = QapError(f"reduced assignment {tuple(bits)} does not reconstruct a permutation")
    try:
        m = variable_map(n).apply(bits)
    except ValueError:
        raise fail from None
    perm = []
    for x in range(n):
        row = m[x * n:(x + 1) * n]
        if sum(row) != 1:
            raise fail
        perm.append(row.index(1))
    if sorted(perm) != list(range(n)):
        raise fail
    return Placement(tuple(perm))


def encode_reduced_bits(p: Placement) -> Tuple[int, ...]:
    n = len(p.perm)
    return tuple(int(p.perm[x] == i) for x in range(n - 1) for i in range(n - 1))


# -- circuits -------------------------------------------------------------------


def default_epsilon(inst: QapInstance) -> Fraction:
    """1 for integer data, otherwise 1/den for the smallest denominator above 1."""
    dens = [v.denominator for m in (inst.F, inst.D) for row in m for v in row if v.denominator > 1]
    return Fraction(1) if not dens else Fraction(1, min(dens))


@dataclass(frozen=True)
class NaiveCircuitParams:
    w0: Fraction
    epsilon: Fraction
    wire_bias: Dict[Wire, Fraction]
    pair_bias: Dict[Tuple[Wire, Wire], Fraction]


def naive_params(inst: QapInstance, epsilon=None) -> NaiveCircuitParams:
    eps = default_epsilon(inst) if epsilon is None else parse_rational(epsilon)
    if eps <= 0:
        raise QapError("epsilon must be positive")
    n, F, D = inst.n, inst.F, inst.D
    w0 = max(F[x][y] * D[i][j] for x in range(n) for y in range(n) for i in range(n) for j in range(n)) + eps
    wires = [(x, i) for x in range(n) for i in range(n)]
    wire_bias = {(x, i): w0 - F[x][x] * D[i][i] for x, i in wires}
    pair_bias = {}
    for a in range(len(wires)):
        for b in range(a + 1, len(wires)):
            (x, i), (y, j) = wires[a], wires[b]
            if x != y and i != j:
                pair_bias[(wires[a], wires[b])] = 2 * w0 - F[x][y] * D[i][j] - F[y][x] * D[j][i]
    return NaiveCircuitParams(w0, eps, wire_bias, pair_bias)


@dataclass(frozen=True)
class QapCircuit:
    """A circuit plus where each assignment bit lives."""

    n: int
    circuit: Circuit
    wire_ports: Dict[Wire, Port]
    kind: str
    delta_bound: Optional[Fraction] = None
    coefficients: Optional[ReducedCoefficients] = None
    params: Optional[NaiveCircuitParams] = None
    notes: Dict[str, int] = field(default_factory=dict)

    def bits(self, a: CircuitAssignment) -> Tuple[int, ...]:
        order = sorted(self.wire_ports)
        return tuple(a[self.wire_ports[w]] for w in order)


def _tile(kind: str, edges, label: str = ""):
    return standard_tile(kind, orientation_for(kind, edges), label)


_H = (1, 3)
_V = (2, 4)


def _lattice(wires: List[Wire], col_of: Dict[Wire, int], row_of: Dict[Wire, int], var_col: int,
             decorate_cross) -> Dict[Tuple[int, int], object]:
    """Variables at the right, wires run left then turn down at their column."""
    tiles = {}
    bottom = max(row_of.values()) + 1
    for w in wires:
        r, c = row_of[w], col_of[w]
        tiles[(r, var_col)] = _tile("Variable", [3], f"var{w}")
        for cc in range(c + 1, var_col):
            tiles.setdefault((r, cc), "h")
        tiles[(r, c)] = _tile("WireCorner", [1, 4])
    for w in wires:
        r, c = row_of[w], col_of[w]
        for rr in range(r + 1, bottom):
            cell = tiles.get((rr, c))
            if cell == "h":
                tiles[(rr, c)] = ("x", rr, c)
            elif cell is None:
                tiles[(rr, c)] = "v"
            else:
                raise QapError(f"layout collision at {(rr, c)}")
    by_row = {row_of[w]: w for w in wires}
    by_col = {col_of[w]: w for w in wires}
    for pos, cell in list(tiles.items()):
        if cell == "h":
            tiles[pos] = _tile("WireStraight", _H)
        elif cell == "v":
            tiles[pos] = _tile("WireStraight", _V)
        elif isinstance(cell, tuple):
            a, b = by_row[pos[0]], by_col[pos[1]]
            tiles[pos] = decorate_cross(_tile("Intersection", (1, 2, 3, 4), f"x{a}{b}"), a, b)
    return tiles


def _bias_wire(w) -> object:
    t = _tile("WireStraight", _V)
    return t if w == 0 else decorate(t, Decoration.bias({4: 1}, w))


def naive_circuit(inst: QapInstance, epsilon=None) -> QapCircuit:
    """Crossing lattice over all n^2 wires (x, i) in lexicographic order."""
    n = inst.n
    if n < 1:
        raise QapError("empty instance")
    params = naive_params(inst, epsilon)
    wires = [(x, i) for x in range(n) for i in range(n)]
    M = len(wires)
    col_of = {w: k for k, w in enumerate(wires)}
    row_of = {w: M - 1 - k for k, w in enumerate(wires)}
    counts = {"restricted": 0, "biased": 0, "intersections": 0}

    def cross(t, a, b):
        counts["intersections"] += 1
        if a[0] == b[0] or a[1] == b[1]:
            counts["restricted"] += 1
            return decorate(t, Decoration.restriction(t.pair(1, 1)))
        counts["biased"] += 1
        w = params.pair_bias[(a, b)]
        return t if w == 0 else decorate(t, Decoration.bias(t.pair(1, 1), w))

    tiles = _lattice(wires, col_of, row_of, M, cross)
    for w in wires:
        tiles[(M, col_of[w])] = _bias_wire(params.wire_bias[w])
        tiles[(M + 1, col_of[w])] = _tile("Terminator", [2])
    circuit = Circuit(M + 2, M + 1, tiles)
    ports = {w: (row_of[w], M, 3) for w in wires}
    return QapCircuit(n, circuit, ports, "naive", params=params, notes=counts)


def reduced_circuit(inst: QapInstance) -> QapCircuit:
    """Circuit for the reduced formulation.

    Top block: same-facility wires run as nested parallel bundles, one bundle
    per facility, crossing every other bundle once.  Below it a row of bias
    wires, one OR-chain row per facility (at most one location per facility,
    output = row sum) and a final AND-chain row (at most one facility row
    empty) ending in a terminator.
    """
    n = inst.n
    problem, coeffs, _ = reduced_formulation(inst)
    N = n - 1
    wires = [(x, i) for x in range(N) for i in range(N)]
    col_of = {(x, i): 2 + x * N + i for x, i in wires}
    row_of = {(x, i): (N - 1 - x) * N + i for x, i in wires}
    var_col = N * N + 2
    counts = {"restricted": 0, "biased": 0, "intersections": 0}

    def cross(t, a, b):
        counts["intersections"] += 1
        if a[1] == b[1]:
            counts["restricted"] += 1
            return decorate(t, Decoration.restriction(t.pair(1, 1)))
        counts["biased"] += 1
        w = coeffs.quadratic[(a, b)]
        return t if w == 0 else decorate(t, Decoration.bias(t.pair(1, 1), w))

    tiles = _lattice(wires, col_of, row_of, var_col, cross)
    bias_row = N * N
    for w in wires:
        tiles[(bias_row, col_of[w])] = _bias_wire(coeffs.linear[w])
    and_row = bias_row + N + 1
    or_gate = standard_tile("OrGate", 0)
    or_gate = decorate(or_gate, Decoration.restriction(or_gate.pair(1, 1)))
    and_gate = standard_tile("AndGate", 0)
    and_gate = decorate(and_gate, Decoration.restriction(and_gate.pair(0, 0)))
    for x in range(N):
        r = bias_row + 1 + x
        for i in range(N):
            c = col_of[(x, i)]
            tiles[(r, c)] = or_gate if i < N - 1 else _tile("WireCorner", [2, 3])
        out_col = 1 + x * N
        tiles[(r, out_col)] = _tile("WireCorner", [1, 4])
        for rr in range(r + 1, and_row):
            tiles[(rr, out_col)] = _tile("WireStraight", _V)
        for y in range(x + 1, N):
            for i in range(N):
                tiles[(r, col_of[(y, i)])] = _tile("WireStraight", _V)
    for x in range(N):
        c = 1 + x * N
        tiles[(and_row, c)] = and_gate if x < N - 1 else _tile("WireCorner", [2, 3])
        if x < N - 1:
            for cc in range(c + 1, c + N):
                tiles[(and_row, cc)] = _tile("WireStraight", _H)
    tiles[(and_row, 0)] = _tile("Terminator", [1])
    circuit = Circuit(and_row + 1, var_col + 1, tiles)
    ports = {w: (row_of[w], var_col, 3) for w in wires}
    return QapCircuit(n, circuit, ports, "reduced", coeffs.theorem2_bound(), coeffs, notes=counts)


def decode_placement(x, n: int, qc: Optional[QapCircuit] = None) -> Placement:
    """Placement from reduced bits or from a circuit assignment of ``qc``."""
    if isinstance(x, CircuitAssignment):
        if qc is None:
            raise QapError("decoding a circuit assignment needs its circuit")
        bits = qc.bits(x)
        if qc.kind == "naive":
            perm = []
            for f in range(n):
                row = bits[f * n:(f + 1) * n]
                if sum(row) != 1:
                    raise QapError(f"naive assignment {bits} is not a permutation matrix")
                perm.append(row.index(1))
            return Placement(tuple(perm))
        return decode_reduced_bits(bits, n)
    return decode_reduced_bits(tuple(x), n)


def naive_constant(n: int) -> int:
    """Number of wire and pair biases triggered by any permutation: n + 2*C(n,2)."""
    return n + 2 * math.comb(n, 2)
