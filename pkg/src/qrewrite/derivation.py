"""Replayable derivations: ordered rule applications with snapshots.

A derivation records the initial circuit and every (match, snapshot) step.
Named marks group steps into presentation stages, so a multi-step chain can
still expose the handful of waypoint circuits a reader cares about.

Verification certifies consecutive snapshots against the simulator:
unitarily for the unitary-sound rules, and as all-zeros state maps for the
preparation-consuming rules (ancilla severing, control elision). Layout
steps (barriers) are exact no-ops and verify trivially.
"""

from dataclasses import dataclass, field

from . import sim
from .circuit import Circuit
from .cqc import circuit_hash, emit_circuit, parse_circuit
from .errors import RewriteError
from .rules import (LAYOUT_RULES, STATE_DEPENDENT_RULES, BarrierPolicy, Match,
                    apply_rule)

UNITARY_TOL = 1e-10
STATE_TOL = 1e-10


@dataclass(frozen=True)
class Step:
    match: Match
    circuit: Circuit
    verified: str = ""       # "", "unitary", "state", "layout", "skipped (size)"
    deviation: float | None = None


@dataclass
class Derivation:
    initial: Circuit
    steps: list[Step] = field(default_factory=list)
    marks: list[tuple[str, int]] = field(default_factory=list)  # (label, step count)
    policy: BarrierPolicy = BarrierPolicy.OPAQUE

    def final(self) -> Circuit:
        return self.steps[-1].circuit if self.steps else self.initial

    def snapshots(self) -> list[Circuit]:
        return [self.initial] + [s.circuit for s in self.steps]

    def snapshot_at(self, step_count: int) -> Circuit:
        return self.initial if step_count == 0 else self.steps[step_count - 1].circuit

    def marked_snapshots(self) -> list[tuple[str, Circuit]]:
        """The named waypoint circuits, in order."""
        return [(label, self.snapshot_at(pos)) for label, pos in self.marks]

    def mark(self, label: str) -> None:
        self.marks.append((label, len(self.steps)))

    def replay(self) -> bool:
        """Re-apply every match from the initial circuit and compare
        snapshots bit-exactly."""
        current = self.initial
        for step in self.steps:
            current = apply_rule(current, step.match, self.policy)
            if current != step.circuit:
                return False
        return True

    def verify(self, tol: float = UNITARY_TOL) -> "Derivation":
        """Certify every consecutive snapshot pair; returns a derivation
        with per-step flags filled in. The running unitary is threaded
        through unitary-mode steps so each snapshot is built once."""
        out = Derivation(self.initial, [], list(self.marks), self.policy)
        prev = self.initial
        prev_u = None
        for step in self.steps:
            mode, deviation, prev_u = _verify_pair(prev, step.circuit,
                                                   step.match, tol, prev_u)
            out.steps.append(Step(step.match, step.circuit, mode, deviation))
            prev = step.circuit
        return out

    def all_verified(self) -> bool:
        return all(s.verified not in ("", "failed") for s in self.steps)

    # -- trace format ---------------------------------------------------

    def to_trace(self) -> str:
        """Line-oriented replayable trace with embedded snapshots."""
        lines = ["qrewrite-trace v1", f"policy: {self.policy.value}", "initial:"]
        lines += _indent(emit_circuit(self.initial))
        for k, step in enumerate(self.steps, start=1):
            head = (f"step {k}: rule={step.match.rule.value} "
                    f"at={list(step.match.gate_indices)}")
            if step.match.wires:
                head += f" wires={list(step.match.wires)}"
            if step.match.reverse:
                head += " reverse=true"
            if step.match.variant:
                head += f" variant={step.match.variant!r}"
            if step.verified:
                head += f" verified={step.verified}"
            head += f" -> {circuit_hash(step.circuit)}"
            lines.append(head)
            lines += _indent(emit_circuit(step.circuit))
        for label, pos in self.marks:
            lines.append(f"mark: {label} after step {pos}")
        return "\n".join(lines)


def _indent(text: str) -> list[str]:
    return ["  " + line for line in text.splitlines()]


def _verify_pair(before: Circuit, after: Circuit, match: Match, tol: float,
                 before_u=None) -> tuple[str, float | None, object]:
    """Returns (mode, deviation, unitary of ``after`` when available)."""
    if match.rule in LAYOUT_RULES:
        return "layout", 0.0, before_u
    a = before.without_measurements()
    b = after.without_measurements()
    if match.rule in STATE_DEPENDENT_RULES:
        sa = sim.statevector_run(a).amplitudes
        sb = sim.statevector_run(b).amplitudes
        ok = sim.states_equal_up_to_phase(sa, sb, STATE_TOL)
        return ("state" if ok else "failed"), None, None
    if a.num_qubits > sim.MAX_UNITARY_QUBITS:
        return "skipped (size)", None, None
    ua = before_u if before_u is not None else sim.unitary_of(a)
    ub = sim.unitary_of(b)
    report = sim.matrices_equal_up_to_phase(ua, ub, tol)
    return (("unitary" if report.equivalent else "failed"),
            report.max_deviation, ub)


class DerivationBuilder:
    """Incrementally apply matches while recording a Derivation."""

    def __init__(self, initial: Circuit,
                 policy: BarrierPolicy = BarrierPolicy.OPAQUE):
        self.derivation = Derivation(initial, [], [], policy)
        self.current = initial

    def apply(self, match: Match) -> Circuit:
        self.current = apply_rule(self.current, match, self.derivation.policy)
        self.derivation.steps.append(Step(match, self.current))
        return self.current

    def mark(self, label: str) -> None:
        self.derivation.mark(label)

    def step_count(self) -> int:
        return len(self.derivation.steps)


def replay_trace(trace: str) -> Derivation:
    """Parse a trace, re-apply every step, and check the recorded
    snapshots and hashes. Raises RewriteError on any mismatch."""
    lines = trace.splitlines()
    if not lines or lines[0].strip() != "qrewrite-trace v1":
        raise RewriteError("not a qrewrite trace")
    policy = BarrierPolicy.OPAQUE
    k = 1
    if k < len(lines) and lines[k].startswith("policy:"):
        policy = BarrierPolicy(lines[k].split(":", 1)[1].strip())
        k += 1
    if k >= len(lines) or lines[k].strip() != "initial:":
        raise RewriteError("missing initial circuit")
    k += 1

    def take_snapshot(k: int) -> tuple[Circuit, int]:
        block = []
        while k < len(lines) and lines[k].startswith("  "):
            block.append(lines[k][2:])
            k += 1
        return parse_circuit("\n".join(block)), k

    initial, k = take_snapshot(k)
    derivation = Derivation(initial, [], [], policy)
    current = initial
    while k < len(lines):
        line = lines[k].strip()
        if line.startswith("mark:"):
            body = line[len("mark:"):].strip()
            label, _, pos = body.rpartition(" after step ")
            derivation.marks.append((label, int(pos)))
            k += 1
            continue
        if not line.startswith("step "):
            raise RewriteError(f"unexpected trace line: {line!r}")
        head, _, want_hash = line.rpartition(" -> ")
        match = _parse_step_head(head)
        k += 1
        snapshot, k = take_snapshot(k)
        current = apply_rule(current, match, policy)
        if current != snapshot:
            raise RewriteError(f"replay diverged at {match.describe()}")
        if circuit_hash(current) != want_hash.strip():
            raise RewriteError(f"hash mismatch at {match.describe()}")
        derivation.steps.append(Step(match, current))
    return derivation


def _parse_step_head(head: str) -> Match:
    import ast
    import re

    from .rules import RuleId

    fields = dict(re.findall(r"(\w+)=((?:\[[^\]]*\])|(?:'[^']*')|\S+)", head))
    rule = RuleId(fields["rule"])
    at = tuple(ast.literal_eval(fields["at"]))
    wires = tuple(ast.literal_eval(fields.get("wires", "[]")))
    reverse = fields.get("reverse", "false") == "true"
    variant = ast.literal_eval(fields["variant"]) if "variant" in fields else ""
    return Match(rule, at, wires, reverse, variant)
