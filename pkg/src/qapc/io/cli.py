"""Command-line front end.

Exit codes: 0 success, 1 verification mismatch, 2 usage or parse error,
3 solver timeout.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import List, Optional

from ..compiler.certify import CertificationError
from ..compiler.library import default_library
from ..kinggraph import LatticeGraph, LatticeGraphError, resolved_weights
from ..mwis import SolverError, bnb_mwis, brute_mwis, verify
from ..oracle import brute_qap
from ..pipeline import FORMULATIONS, PipelineError, SolverTimeout, compile_instance, solve_instance
from ..qap import QapError, QapInstance
from ..rational import FloatRejected, format_rational, parse_rational
from ..tile import CircuitError, TileError
from .formats import ParseError, circuit_from_json, circuit_to_json, dumps, format_instance, parse_instance
from .svg import RenderError, RenderSpec, render_circuit, render_graph

OK, MISMATCH, USAGE, TIMEOUT = 0, 1, 2, 3

_INPUT_ERRORS = (ParseError, QapError, FloatRejected, LatticeGraphError, TileError, CircuitError,
                 RenderError, SolverError, KeyError, TypeError, ValueError, OSError)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _instance(args) -> QapInstance:
    return parse_instance(Path(args.instance), swap_matrices=args.swap_matrices,
                          allow_float=args.allow_float_as_rational)


def _write(text: str, path: Optional[str]) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc.msg}", exc.lineno, exc.colno) from None


def _graph_from(obj) -> LatticeGraph:
    g = LatticeGraph.from_json(obj)
    if any("weight" in v for v in obj.get("vertices", [])):
        numeric = resolved_weights(obj)
        delta = obj.get("delta")
        if delta is not None:
            d = parse_rational(delta)
            for p, w in numeric.items():
                if g.vertices[p].weight.at(d) != w:
                    raise ParseError(f"vertex {p}: weight {format_rational(w)} disagrees with its symbolic form")
    return g


# -- subcommands --------------------------------------------------------------

def cmd_compile(args) -> int:
    inst = _instance(args)
    comp = compile_instance(inst, args.formulation, args.delta)
    cc = comp.compiled
    obj = cc.graph.to_json(delta=comp.delta)
    obj["certificate"] = cc.certificate.to_json()
    obj["pipeline"] = {
        "formulation": args.formulation,
        "n": inst.n,
        "wire_ports": [[list(w), list(p)] for w, p in sorted(comp.qap.wire_ports.items())],
    }
    _write(dumps(obj), args.output)
    if args.circuit_out:
        Path(args.circuit_out).write_text(dumps(circuit_to_json(comp.qap.circuit)))
    return OK


def cmd_solve(args) -> int:
    obj = _read_json(args.graph)
    g = _graph_from(obj)
    delta = args.delta if args.delta is not None else obj.get("delta")
    if args.solver == "brute":
        report = brute_mwis(g, None if delta is None else parse_rational(delta))
    else:
        if delta is None:
            raise ParseError("branch-and-bound needs a concrete delta (--delta or a graph exported with one)")
        report = bnb_mwis(g, parse_rational(delta), timeout=args.timeout)
    ok, reason = verify(g, report.solution, report.weight, report.delta)
    _write(dumps(report.to_json(timings=not args.no_timings)), args.output)
    if report.timed_out:
        print("solver timed out; reported set is not certified optimal", file=sys.stderr)
        return TIMEOUT
    if not ok:
        print(f"verification failed: {reason}", file=sys.stderr)
        return MISMATCH
    return OK


def cmd_qap_solve(args) -> int:
    inst = _instance(args)
    try:
        res = solve_instance(inst, args.formulation, args.delta, args.solver, args.timeout)
    except SolverTimeout as exc:
        print(str(exc), file=sys.stderr)
        return TIMEOUT
    except PipelineError as exc:
        print(f"decoding failed: {exc}", file=sys.stderr)
        return MISMATCH
    _write(dumps(res.to_json(timings=not args.no_timings)), args.output)
    return OK


def cmd_oracle(args) -> int:
    _write(dumps(brute_qap(_instance(args)).to_json()), args.output)
    return OK


def _check_one(inst: QapInstance, args, svg_dir: Optional[Path], tag: str) -> dict:
    entry = {"instance": inst.to_json()}
    oracle = brute_qap(inst)
    entry["oracle_cost"] = format_rational(oracle.cost)
    try:
        res = solve_instance(inst, args.formulation, args.delta, "bnb", args.timeout)
    except SolverTimeout:
        entry["status"] = "timeout"
        return entry
    except PipelineError as exc:
        entry["status"] = "mismatch"
        entry["error"] = str(exc)
        return entry
    entry["pipeline"] = res.to_json(timings=False)
    entry["status"] = "match" if res.cost == oracle.cost else "mismatch"
    if svg_dir is not None and inst.n >= 2:
        comp = compile_instance(inst, args.formulation, args.delta)
        (svg_dir / f"{tag}_circuit.svg").write_text(render_circuit(comp.qap.circuit))
        spec = RenderSpec("graph", highlight=res.report.solution, delta=comp.delta)
        (svg_dir / f"{tag}_graph.svg").write_text(render_graph(comp.compiled.graph, spec))
    return entry


def cmd_check(args) -> int:
    svg_dir = Path(args.svg_dir) if args.svg_dir else None
    if svg_dir is not None:
        svg_dir.mkdir(parents=True, exist_ok=True)
    if args.instance:
        instances = [_instance(args)]
    else:
        rng = random.Random(args.seed)
        instances = [QapInstance.random(args.n, rng) for _ in range(args.count)]
    entries = [_check_one(inst, args, svg_dir, f"check{idx}") for idx, inst in enumerate(instances)]
    report = {"seed": args.seed, "formulation": args.formulation, "results": entries,
              "all_match": all(e["status"] == "match" for e in entries)}
    _write(dumps(report), args.output)
    if any(e["status"] == "timeout" for e in entries):
        return TIMEOUT
    return OK if report["all_match"] else MISMATCH


def cmd_verify_tiles(args) -> int:
    lib = default_library()
    try:
        rows = lib.verify(restrictions=not args.base_only)
    except CertificationError as exc:
        print(f"certification failed: {exc}", file=sys.stderr)
        return MISMATCH
    for label, cert in rows:
        print(f"{label}: k={cert.k} w_tilde={format_rational(cert.w_tilde)} "
              f"delta_min={format_rational(cert.delta_min)}")
    print(f"{len(rows)} fragments certified")
    return OK


def cmd_render(args) -> int:
    obj = _read_json(args.input)
    highlight = None
    if args.highlight:
        h = _read_json(args.highlight)
        points = h["solution"] if isinstance(h, dict) else h
        highlight = frozenset((int(p[0]), int(p[1])) for p in points)
    if "tiles" in obj:
        svg = render_circuit(circuit_from_json(obj), RenderSpec("circuit", args.cell))
    elif "vertices" in obj:
        delta = args.delta if args.delta is not None else obj.get("delta")
        spec = RenderSpec("graph", args.cell, not args.no_weights, highlight,
                          None if delta is None else parse_rational(delta))
        svg = render_graph(_graph_from(obj), spec)
    else:
        raise ParseError("input is neither a circuit nor a graph")
    _write(svg, args.output)
    return OK


def cmd_format(args) -> int:
    _write(format_instance(_instance(args)), args.output)
    return OK


# -- argument parsing ---------------------------------------------------------

def _instance_args(p, optional: bool = False) -> None:
    if optional:
        p.add_argument("instance", nargs="?")
    else:
        p.add_argument("instance")
    p.add_argument("--swap-matrices", action="store_true", help="file lists D before F")
    p.add_argument("--allow-float-as-rational", action="store_true",
                   help="read decimal literals as exact rationals")


def _delta_arg(value: str):
    if value == "auto":
        return value
    try:
        d = parse_rational(value)
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(str(exc))
    if d <= 0:
        raise argparse.ArgumentTypeError("delta must be positive")
    return d


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qapc", description="Compile QAP instances to lattice MWIS and solve them.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compile", help="compile an instance to a lattice graph")
    _instance_args(p)
    p.add_argument("--formulation", choices=FORMULATIONS, default="reduced")
    p.add_argument("--delta", type=_delta_arg, default="auto")
    p.add_argument("-o", "--output")
    p.add_argument("--circuit-out", help="also write the circuit JSON here")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("solve", help="maximum-weight independent set of a graph JSON")
    p.add_argument("graph")
    p.add_argument("--solver", choices=("brute", "bnb"), default="bnb")
    p.add_argument("--delta", type=_delta_arg, default=None)
    p.add_argument("--timeout", type=float, default=None)
    p.add_argument("--no-timings", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("qap-solve", help="solve an instance through the compiled graph")
    _instance_args(p)
    p.add_argument("--formulation", choices=FORMULATIONS, default="reduced")
    p.add_argument("--delta", type=_delta_arg, default="auto")
    p.add_argument("--solver", choices=("brute", "bnb"), default="bnb")
    p.add_argument("--timeout", type=float, default=None)
    p.add_argument("--no-timings", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_qap_solve)

    p = sub.add_parser("oracle", help="enumerate all placements")
    _instance_args(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("check", help="compare qap-solve against the oracle")
    _instance_args(p, optional=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=3, help="size of generated instances")
    p.add_argument("--count", type=int, default=1, help="number of generated instances")
    p.add_argument("--formulation", choices=FORMULATIONS, default="reduced")
    p.add_argument("--delta", type=_delta_arg, default="auto")
    p.add_argument("--timeout", type=float, default=None)
    p.add_argument("--svg-dir", help="write circuit and graph drawings here")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("verify-tiles", help="certify the fragment library")
    p.add_argument("--base-only", action="store_true", help="skip restricted variants")
    p.set_defaults(func=cmd_verify_tiles)

    p = sub.add_parser("render", help="draw a circuit or graph JSON as SVG")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.add_argument("--highlight", help="solution JSON or list of [row, col] positions")
    p.add_argument("--cell", type=int, default=40)
    p.add_argument("--delta", type=_delta_arg, default=None)
    p.add_argument("--no-weights", action="store_true")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("format", help="rewrite an instance in canonical text form")
    _instance_args(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_format)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"qapc: error: {exc}", file=sys.stderr)
        return USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _INPUT_ERRORS as exc:
        print(f"qapc: error: {exc}", file=sys.stderr)
        return USAGE


def run() -> None:
    sys.exit(main())
