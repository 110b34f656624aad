"""Text and JSON formats for instances and circuits."""
from __future__ import annotations

import json
import os
import re
from fractions import Fraction
from pathlib import Path
from typing import List, Tuple, Union

from ..qap import QapError, QapInstance
from ..rational import FloatRejected, format_rational, parse_rational
from ..tile import Circuit, CircuitError, Decoration, TileError, decorate, standard_tile


class ParseError(ValueError):
    """Malformed input; ``line`` and ``column`` are 1-based when known."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)
        self.line = line
        self.column = column


Token = Tuple[str, int, int]
_TOKEN = re.compile(r"\S+")


def _tokens(text: str) -> List[Token]:
    out = []
    for ln, line in enumerate(text.splitlines(), start=1):
        for m in _TOKEN.finditer(line):
            out.append((m.group(), ln, m.start() + 1))
    return out


def _end_of(text: str) -> Tuple[int, int]:
    lines = text.splitlines() or [""]
    return len(lines), len(lines[-1]) + 1


def _looks_like_path(source) -> bool:
    if isinstance(source, Path):
        return True
    return isinstance(source, str) and not any(ch.isspace() for ch in source.strip()) \
        and os.path.isfile(source)


def parse_instance(source: Union[str, Path], swap_matrices: bool = False,
                   allow_float: bool = False) -> QapInstance:
    """Read a QAP instance from a path or from literal text.

    Plain text is ``n`` followed by ``n*n`` entries of F then ``n*n`` of D
    (D first with ``swap_matrices``).  Text starting with ``{`` is read as
    JSON with ``n``, ``F`` and ``D`` fields.
    """
    text = Path(source).read_text() if _looks_like_path(source) else str(source)
    if text.lstrip().startswith("{"):
        return _instance_from_json_text(text, swap_matrices, allow_float)
    toks = _tokens(text)
    if not toks:
        raise ParseError("empty instance", 1, 1)
    head, ln, col = toks[0]
    try:
        n = int(head)
    except ValueError:
        raise ParseError(f"expected the size n, found {head!r}", ln, col) from None
    if n < 1:
        raise ParseError(f"size must be positive, found {n}", ln, col)
    need = 2 * n * n
    body = toks[1:]
    if len(body) < need:
        eline, ecol = _end_of(text)
        which = "first" if len(body) < n * n else "second"
        raise ParseError(
            f"truncated matrix: {which} {n}x{n} matrix incomplete "
            f"({len(body)} of {need} entries present)", eline, ecol)
    if len(body) > need:
        extra, ln, col = body[need]
        raise ParseError(f"unexpected token {extra!r} after two {n}x{n} matrices", ln, col)
    values = []
    for tok, ln, col in body:
        try:
            values.append(parse_rational(tok, allow_float=allow_float))
        except FloatRejected as exc:
            raise ParseError(str(exc), ln, col) from None
        except ValueError:
            raise ParseError(f"not a number: {tok!r}", ln, col) from None
    first = [values[r * n:(r + 1) * n] for r in range(n)]
    second = [values[n * n + r * n:n * n + (r + 1) * n] for r in range(n)]
    F, D = (second, first) if swap_matrices else (first, second)
    return QapInstance.from_lists(F, D)


def _instance_from_json_text(text: str, swap: bool, allow_float: bool) -> QapInstance:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    try:
        F, D = obj["F"], obj["D"]
        if swap:
            F, D = D, F
        inst = QapInstance.from_lists(F, D, allow_float=allow_float)
    except KeyError as exc:
        raise ParseError(f"missing field {exc.args[0]!r}") from None
    except (QapError, FloatRejected, TypeError, ValueError) as exc:
        raise ParseError(str(exc)) from None
    if "n" in obj and int(obj["n"]) != inst.n:
        raise ParseError(f"declared n={obj['n']} but matrices are {inst.n}x{inst.n}")
    return inst


def format_instance(inst: QapInstance) -> str:
    lines = [str(inst.n)]
    for m in (inst.F, inst.D):
        lines.extend(" ".join(format_rational(v) for v in row) for row in m)
    return "\n".join(lines) + "\n"


# -- circuits -----------------------------------------------------------------

def circuit_to_json(c: Circuit) -> dict:
    tiles = []
    for (r, col) in c.positions():
        t = c.tiles[(r, col)]
        decs = []
        for d in t.decorations:
            entry = {"kind": d.kind, "select": {str(e): b for e, b in d.selector}}
            if d.kind == "bias":
                if not isinstance(d.weight, (int, Fraction)):
                    raise ValueError(f"bias {d.weight!r} on tile {(r, col)} is not a rational")
                entry["weight"] = format_rational(d.weight)
            decs.append(entry)
        tiles.append({"r": r, "c": col, "kind": t.kind, "orientation": t.orientation,
                      "label": t.label, "decorations": decs})
    return {"rows": c.rows, "cols": c.cols, "tiles": tiles}


def circuit_from_json(obj) -> Circuit:
    try:
        tiles = {}
        for entry in obj["tiles"]:
            pos = (int(entry["r"]), int(entry["c"]))
            if pos in tiles:
                raise ParseError(f"two tiles at {pos}")
            t = standard_tile(entry["kind"], int(entry.get("orientation", 0)), entry.get("label", ""))
            for d in entry.get("decorations", []):
                sel = {int(e): int(b) for e, b in d["select"].items()}
                if d["kind"] == "restriction":
                    t = decorate(t, Decoration.restriction(sel))
                elif d["kind"] == "bias":
                    t = decorate(t, Decoration.bias(sel, parse_rational(d["weight"])))
                else:
                    raise ParseError(f"unknown decoration kind {d['kind']!r}")
            tiles[pos] = t
        return Circuit(int(obj["rows"]), int(obj["cols"]), tiles)
    except KeyError as exc:
        raise ParseError(f"missing field {exc.args[0]!r}") from None
    except (TileError, CircuitError, TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc)) from None


def dumps(obj) -> str:
    """Canonical JSON text used for every file the tools write."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
