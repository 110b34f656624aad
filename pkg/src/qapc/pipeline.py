"""End-to-end QAP solving: formulate, build a circuit, compile, solve, decode."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .compiler.stitch import CompiledCircuit, choose_delta, decode_assignment, is_consistent, stitch
from .mwis import SolveReport, bnb_mwis, brute_mwis
from .qap import Placement, QapCircuit, QapError, QapInstance, cost, decode_placement, naive_circuit, reduced_circuit
from .rational import format_rational, parse_rational

FORMULATIONS = ("reduced", "canonical")


class PipelineError(RuntimeError):
    """The solver produced a set that does not decode to a placement."""


class SolverTimeout(RuntimeError):
    pass


@dataclass(frozen=True)
class Compiled:
    qap: QapCircuit
    compiled: CompiledCircuit
    delta: Fraction


@dataclass(frozen=True)
class PipelineResult:
    placement: Placement
    cost: Fraction
    formulation: str
    delta: Optional[Fraction] = None
    k: Optional[int] = None
    vertices: int = 0
    report: Optional[SolveReport] = None

    def to_json(self, timings: bool = False) -> dict:
        out = {
            "placement": list(self.placement.as_one_based()),
            "cost": format_rational(self.cost),
            "formulation": self.formulation,
            "vertices": self.vertices,
        }
        if self.delta is not None:
            out["delta"] = format_rational(self.delta)
            out["k"] = self.k
        if self.report is not None:
            out["solve"] = self.report.to_json(timings=timings)
        return out


def build_circuit(inst: QapInstance, formulation: str = "reduced") -> QapCircuit:
    if formulation == "reduced":
        return reduced_circuit(inst)
    if formulation == "canonical":
        return naive_circuit(inst)
    raise QapError(f"unknown formulation {formulation!r}")


def compile_instance(inst: QapInstance, formulation: str = "reduced", delta="auto") -> Compiled:
    """Compile the circuit of ``inst``.

    ``delta="auto"`` picks a value above the reduced-formulation bound for
    the reduced circuit and above ``2 * w_tilde`` otherwise, with the default
    relative margin.
    """
    if inst.n < 2:
        raise QapError("compilation needs n >= 2; a single facility has one placement")
    qc = build_circuit(inst, formulation)
    cc = stitch(qc.circuit, measure=False)
    if delta == "auto":
        d = choose_delta(cc, qc.delta_bound if formulation == "reduced" else None)
    else:
        d = parse_rational(delta)
        if d <= 0:
            raise QapError("delta must be positive")
    return Compiled(qc, cc.with_delta(d), d)


def solve_instance(inst: QapInstance, formulation: str = "reduced", delta="auto",
                   solver: str = "bnb", timeout=None) -> PipelineResult:
    if inst.n == 1:
        p = Placement((0,))
        return PipelineResult(p, cost(inst, p), formulation)
    comp = compile_instance(inst, formulation, delta)
    g = comp.compiled.graph
    if solver == "bnb":
        report = bnb_mwis(g, comp.delta, timeout=timeout)
    elif solver == "brute":
        report = brute_mwis(g, comp.delta)
    else:
        raise ValueError(f"unknown solver {solver!r}")
    if report.timed_out:
        raise SolverTimeout(f"solver budget exhausted after {report.nodes} nodes")
    a = decode_assignment(g, report.solution)
    if not is_consistent(comp.qap.circuit, a):
        raise PipelineError("optimal set decodes to inconsistent wire values")
    try:
        p = decode_placement(a, inst.n, comp.qap)
    except QapError as exc:
        raise PipelineError(str(exc)) from None
    return PipelineResult(p, cost(inst, p), formulation, comp.delta, comp.compiled.k, len(g), report)
