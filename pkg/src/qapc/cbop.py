"""Constrained binary optimization problems with exact rational weights."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from .rational import format_rational, parse_rational

DEFAULT_CAP = 24
TRUTH_TABLE_LIMIT = 20
KINDS = ("LinearLE", "LinearGE", "LinearEQ", "TruthTable")

Bits = Tuple[int, ...]


class ProblemError(ValueError):
    pass


class CapExceeded(ProblemError):
    pass


@dataclass(frozen=True)
class Constraint:
    kind: str
    vars: Tuple[int, ...]
    coeffs: Tuple[int, ...] = ()
    bound: int = 0
    rows: FrozenSet[Bits] = frozenset()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ProblemError(f"unknown constraint kind {self.kind!r}")
        if self.kind == "TruthTable":
            if len(self.vars) > TRUTH_TABLE_LIMIT:
                raise ProblemError(f"truth table over {len(self.vars)} variables exceeds {TRUTH_TABLE_LIMIT}")
            for r in self.rows:
                if len(r) != len(self.vars) or any(b not in (0, 1) for b in r):
                    raise ProblemError(f"bad truth-table row {r}")
        elif len(self.coeffs) != len(self.vars):
            raise ProblemError("linear constraint needs one coefficient per variable")

    @classmethod
    def le(cls, vars, coeffs, bound) -> "Constraint":
        return cls("LinearLE", tuple(vars), tuple(int(c) for c in coeffs), int(bound))

    @classmethod
    def ge(cls, vars, coeffs, bound) -> "Constraint":
        return cls("LinearGE", tuple(vars), tuple(int(c) for c in coeffs), int(bound))

    @classmethod
    def eq(cls, vars, coeffs, bound) -> "Constraint":
        return cls("LinearEQ", tuple(vars), tuple(int(c) for c in coeffs), int(bound))

    @classmethod
    def table(cls, vars, rows) -> "Constraint":
        return cls("TruthTable", tuple(vars), rows=frozenset(tuple(int(b) for b in r) for r in rows))

    def holds(self, x: Sequence[int]) -> bool:
        if self.kind == "TruthTable":
            return tuple(x[i] for i in self.vars) in self.rows
        total = sum(c * x[i] for c, i in zip(self.coeffs, self.vars))
        if self.kind == "LinearLE":
            return total <= self.bound
        if self.kind == "LinearGE":
            return total >= self.bound
        return total == self.bound

    def to_json(self) -> dict:
        out = {"kind": self.kind, "vars": list(self.vars)}
        if self.kind == "TruthTable":
            out["rows"] = [list(r) for r in sorted(self.rows)]
        else:
            out["coeffs"] = list(self.coeffs)
            out["bound"] = self.bound
        return out

    @classmethod
    def from_json(cls, obj) -> "Constraint":
        if obj["kind"] == "TruthTable":
            return cls.table(obj["vars"], obj["rows"])
        return cls(obj["kind"], tuple(obj["vars"]), tuple(int(c) for c in obj["coeffs"]), int(obj["bound"]))


class WeightPolynomial:
    """Multilinear polynomial over binary variables (x*x == x).

    Stored as a map from frozen variable-index sets to rational coefficients;
    the empty set carries the constant term.  Zero coefficients are dropped.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[FrozenSet[int], object]] = None):
        clean: Dict[FrozenSet[int], Fraction] = {}
        for mono, c in (terms or {}).items():
            c = parse_rational(c)
            if c:
                key = frozenset(mono)
                clean[key] = clean.get(key, Fraction(0)) + c
                if not clean[key]:
                    del clean[key]
        self.terms = clean

    @classmethod
    def constant(cls, c) -> "WeightPolynomial":
        return cls({frozenset(): c})

    @classmethod
    def var(cls, i: int, c=1) -> "WeightPolynomial":
        return cls({frozenset([i]): c})

    @property
    def constant_term(self) -> Fraction:
        return self.terms.get(frozenset(), Fraction(0))

    @property
    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=0)

    def monomials(self) -> List[Tuple[Tuple[int, ...], Fraction]]:
        """Non-constant monomials in a canonical order."""
        return sorted(((tuple(sorted(m)), c) for m, c in self.terms.items() if m), key=lambda t: (len(t[0]), t[0]))

    def variables(self) -> FrozenSet[int]:
        return frozenset().union(*self.terms) if self.terms else frozenset()

    def __add__(self, other) -> "WeightPolynomial":
        other = _poly(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return WeightPolynomial(out)

    __radd__ = __add__

    def __neg__(self) -> "WeightPolynomial":
        return WeightPolynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "WeightPolynomial":
        return self + (-_poly(other))

    def __rsub__(self, other) -> "WeightPolynomial":
        return _poly(other) - self

    def __mul__(self, other) -> "WeightPolynomial":
        other = _poly(other)
        out: Dict[FrozenSet[int], Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = m1 | m2
                out[m] = out.get(m, Fraction(0)) + c1 * c2
        return WeightPolynomial(out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, WeightPolynomial) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def coeff(self, *indices: int) -> Fraction:
        return self.terms.get(frozenset(indices), Fraction(0))

    def evaluate(self, x: Sequence[int]) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            if all(x[i] for i in m):
                total += c
        return total

    def __repr__(self) -> str:
        parts = [format_rational(self.constant_term)] if self.constant_term else []
        for m, c in self.monomials():
            parts.append(format_rational(c) + "*" + "*".join(f"x{i}" for i in m))
        return "WeightPolynomial(" + (" + ".join(parts) or "0") + ")"

    def to_json(self) -> dict:
        return {
            "monomials": [{"vars": list(m), "coeff": format_rational(c)} for m, c in self.monomials()],
            "constant": format_rational(self.constant_term),
        }

    @classmethod
    def from_json(cls, obj) -> "WeightPolynomial":
        terms: Dict[FrozenSet[int], Fraction] = {}
        for mono in obj.get("monomials", []):
            vs = [int(v) for v in mono["vars"]]
            if len(set(vs)) != len(vs):
                raise ProblemError(f"monomial {vs} repeats a variable")
            key = frozenset(vs)
            terms[key] = terms.get(key, Fraction(0)) + parse_rational(mono["coeff"])
        terms[frozenset()] = terms.get(frozenset(), Fraction(0)) + parse_rational(obj.get("constant", 0))
        return cls(terms)


def _poly(v) -> WeightPolynomial:
    return v if isinstance(v, WeightPolynomial) else WeightPolynomial.constant(v)


@dataclass(frozen=True)
class BinaryProblem:
    num_vars: int
    var_names: Tuple[str, ...]
    constraints: Tuple[Constraint, ...]
    weight: WeightPolynomial = field(default_factory=WeightPolynomial)

    def __post_init__(self):
        if len(self.var_names) != self.num_vars:
            raise ProblemError("one name per variable required")
        for con in self.constraints:
            if any(not 0 <= i < self.num_vars for i in con.vars):
                raise ProblemError(f"constraint references a variable outside 0..{self.num_vars - 1}")
        if any(not 0 <= i < self.num_vars for i in self.weight.variables()):
            raise ProblemError("weight references a variable outside the problem")

    @classmethod
    def build(cls, names: Iterable[str], constraints=(), weight=None) -> "BinaryProblem":
        names = tuple(names)
        return cls(len(names), names, tuple(constraints), weight or WeightPolynomial())

    def index(self, name: str) -> int:
        return self.var_names.index(name)

    def _check_len(self, x) -> None:
        if len(x) != self.num_vars:
            raise ProblemError(f"assignment has {len(x)} bits, problem has {self.num_vars} variables")

    def evaluate_weight(self, x: Sequence[int]) -> Fraction:
        self._check_len(x)
        return self.weight.evaluate(x)

    def is_valid(self, x: Sequence[int]) -> bool:
        self._check_len(x)
        return all(c.holds(x) for c in self.constraints)

    def to_json(self) -> dict:
        return {
            "vars": list(self.var_names),
            "constraints": [c.to_json() for c in self.constraints],
            "weight": self.weight.to_json(),
        }

    @classmethod
    def from_json(cls, obj) -> "BinaryProblem":
        return cls.build(
            obj["vars"],
            [Constraint.from_json(c) for c in obj.get("constraints", [])],
            WeightPolynomial.from_json(obj.get("weight", {})),
        )


def evaluate_weight(p: BinaryProblem, x: Sequence[int]) -> Fraction:
    return p.evaluate_weight(x)


def is_valid(p: BinaryProblem, x: Sequence[int]) -> bool:
    return p.is_valid(x)


def enumerate_valid(p: BinaryProblem, cap: int = DEFAULT_CAP) -> List[Tuple[Bits, Fraction]]:
    """All valid assignments with their weights, in lexicographic bit order.

    Depth-first over variables (0 before 1), pruning a prefix as soon as some
    linear constraint can no longer be met by the unassigned variables or a
    truth table over assigned variables fails.
    """
    if p.num_vars > cap:
        raise CapExceeded(f"{p.num_vars} variables exceed the enumeration cap {cap}")
    n = p.num_vars
    linear = [c for c in p.constraints if c.kind != "TruthTable"]
    coef: List[Dict[int, int]] = []
    for c in linear:
        d: Dict[int, int] = {}
        for a, i in zip(c.coeffs, c.vars):
            d[i] = d.get(i, 0) + a
        coef.append(d)
    touching: List[List[int]] = [[] for _ in range(n)]
    for ci, d in enumerate(coef):
        for i in d:
            touching[i].append(ci)
    closing: List[List[Constraint]] = [[] for _ in range(n)]
    early = []
    for c in p.constraints:
        if c.kind == "TruthTable":
            if c.vars:
                closing[max(c.vars)].append(c)
            else:
                early.append(c)
    if any(not c.holds(()) for c in early):
        return []
    partial = [0] * len(linear)
    lo = [sum(min(0, a) for a in d.values()) for d in coef]
    hi = [sum(max(0, a) for a in d.values()) for d in coef]
    if any(not _reachable(c, 0, lo[ci], hi[ci]) for ci, c in enumerate(linear)):
        return []
    x = [0] * n
    out: List[Tuple[Bits, Fraction]] = []

    def rec(i: int) -> None:
        if i == n:
            bits = tuple(x)
            out.append((bits, p.weight.evaluate(bits)))
            return
        for b in (0, 1):
            x[i] = b
            ok = True
            for ci in touching[i]:
                a = coef[ci][i]
                partial[ci] += a * b
                lo[ci] -= min(0, a)
                hi[ci] -= max(0, a)
            for ci in touching[i]:
                if not _reachable(linear[ci], partial[ci], lo[ci], hi[ci]):
                    ok = False
                    break
            if ok and all(c.holds(x) for c in closing[i]):
                rec(i + 1)
            for ci in touching[i]:
                a = coef[ci][i]
                partial[ci] -= a * b
                lo[ci] += min(0, a)
                hi[ci] += max(0, a)
        x[i] = 0

    rec(0)
    return out


def _reachable(c: Constraint, partial: int, lo: int, hi: int) -> bool:
    if c.kind == "LinearLE":
        return partial + lo <= c.bound
    if c.kind == "LinearGE":
        return partial + hi >= c.bound
    return partial + lo <= c.bound <= partial + hi


# -- encodings --------------------------------------------------------------

Affine = Tuple[Tuple[Tuple[int, int], ...], int]  # ((source index, coeff), ...), constant


@dataclass(frozen=True)
class VariableMap:
    """Each target variable as an affine integer combination of source bits."""

    exprs: Tuple[Affine, ...]

    @classmethod
    def identity(cls, n: int) -> "VariableMap":
        return cls(tuple((((i, 1),), 0) for i in range(n)))

    @classmethod
    def from_exprs(cls, exprs: Iterable[Union[int, Affine]]) -> "VariableMap":
        out = []
        for e in exprs:
            if isinstance(e, int):
                out.append((((e, 1),), 0))
            else:
                terms, const = e
                out.append((tuple((int(i), int(c)) for i, c in terms), int(const)))
        return cls(tuple(out))

    def __len__(self) -> int:
        return len(self.exprs)

    def apply(self, x: Sequence[int]) -> Bits:
        out = []
        for terms, const in self.exprs:
            v = const + sum(c * x[i] for i, c in terms)
            if v not in (0, 1):
                raise ProblemError(f"variable map produced non-binary value {v} on {tuple(x)}")
            out.append(v)
        return tuple(out)


@dataclass(frozen=True)
class EncodingResult:
    ok: bool
    offset: Optional[Fraction] = None
    witness: Optional[Bits] = None
    reason: str = ""

    def __iter__(self):
        yield self.ok
        yield self.offset if self.ok else self.witness


def check_encoding(a: BinaryProblem, b: BinaryProblem, f: VariableMap, cap: int = DEFAULT_CAP) -> EncodingResult:
    """Does ``a`` encode ``b`` through ``f``?

    Requires ``f`` to map the valid set of ``a`` onto that of ``b`` and a single
    offset ``w0`` with ``w_b(f(x)) == w_a(x) + w0`` on every valid ``x``.
    """
    if len(f) != b.num_vars:
        raise ProblemError(f"map yields {len(f)} values, target has {b.num_vars} variables")
    va = enumerate_valid(a, cap)
    vb = {x for x, _ in enumerate_valid(b, cap)}
    image = set()
    offset = None
    for x, wa in va:
        try:
            y = f.apply(x)
        except ProblemError as exc:
            return EncodingResult(False, witness=x, reason=str(exc))
        if y not in vb:
            return EncodingResult(False, witness=x, reason=f"image {y} is not valid for the target")
        image.add(y)
        d = b.weight.evaluate(y) - wa
        if offset is None:
            offset = d
        elif d != offset:
            return EncodingResult(False, witness=x, reason=f"offset {d} differs from {offset}")
    missing = sorted(vb - image)
    if missing:
        return EncodingResult(False, witness=missing[0], reason=f"target assignment {missing[0]} is not reached")
    return EncodingResult(True, offset if offset is not None else Fraction(0))
