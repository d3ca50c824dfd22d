"""CQC text format: one gate per line, ``#`` comments.

Grammar::

    qubits N
    bits M                      # optional, defaults to 0
    x|y|z|h|s|sdg|i qI
    cx qC qT
    cz qA qB
    swap qA qB
    mcx [~]qC1 [~]qC2 ... -> qT
    mcz [~]qA [~]qB ...
    barrier
    measure qI -> cJ

``~`` marks an open control. ``emit_circuit`` produces the canonical form;
re-parsing and re-emitting any valid source is a fixpoint.
"""

import hashlib

from . import circuit as g
from .circuit import Circuit, Gate, GateKind, Polarity
from .errors import ParseError

_SINGLE = {"i": g.i, "x": g.x, "y": g.y, "z": g.z, "h": g.h, "s": g.s, "sdg": g.sdg}


class _Line:
    def __init__(self, text: str, number: int):
        self.text = text
        self.number = number
        self.tokens: list[tuple[str, int]] = []  # (token, 1-based column)
        col = 1
        for raw in text.split(" "):
            if raw:
                self.tokens.append((raw, col))
            col += len(raw) + 1

    def error(self, message: str, column: int = 1) -> ParseError:
        return ParseError(message, self.number, column)


def _parse_wire(tok: str, col: int, line: _Line, prefix: str = "q") -> int:
    if not tok.startswith(prefix) or not tok[len(prefix):].isdigit():
        raise line.error(f"expected {prefix}<index>, got {tok!r}", col)
    return int(tok[len(prefix):])


def _parse_control(tok: str, col: int, line: _Line):
    if tok.startswith("~"):
        return g.Control(_parse_wire(tok[1:], col + 1, line), Polarity.OPEN)
    return g.Control(_parse_wire(tok, col, line), Polarity.CLOSED)


def parse_circuit(text: str) -> Circuit:
    """Parse CQC source into a validated Circuit."""
    lines = []
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].rstrip()
        if stripped.strip():
            lines.append(_Line(stripped, number))
    if not lines:
        raise ParseError("empty source", 1, 1)

    header = lines[0]
    if header.tokens[0][0] != "qubits":
        raise header.error("source must start with 'qubits N'", header.tokens[0][1])
    if len(header.tokens) != 2 or not header.tokens[1][0].isdigit():
        raise header.error("expected 'qubits N' with a single count")
    num_qubits = int(header.tokens[1][0])

    body = lines[1:]
    num_bits = 0
    if body and body[0].tokens[0][0] == "bits":
        bl = body[0]
        if len(bl.tokens) != 2 or not bl.tokens[1][0].isdigit():
            raise bl.error("expected 'bits M' with a single count")
        num_bits = int(bl.tokens[1][0])
        body = body[1:]

    gates: list[Gate] = []
    for line in body:
        (op, op_col), rest = line.tokens[0], line.tokens[1:]
        try:
            gates.append(_parse_gate(op, op_col, rest, line))
        except ParseError:
            raise
        except g.CircuitError as exc:
            raise line.error(str(exc), op_col) from exc

    try:
        return Circuit(num_qubits, num_bits, tuple(gates))
    except g.CircuitError as exc:
        # Re-locate structural errors on the offending line for usability.
        raise _relocate(exc, num_qubits, num_bits, gates, body) from exc


def _relocate(exc, num_qubits, num_bits, gates, body) -> ParseError:
    ok: list[Gate] = []
    for gate, line in zip(gates, body):
        try:
            Circuit(num_qubits, num_bits, tuple(ok) + (gate,))
        except g.CircuitError:
            return line.error(str(exc))
        ok.append(gate)
    return ParseError(str(exc), 1, 1)  # pragma: no cover - defensive


def _parse_gate(op: str, op_col: int, rest, line: _Line) -> Gate:
    if op in _SINGLE:
        if len(rest) != 1:
            raise line.error(f"{op} takes one wire", op_col)
        return _SINGLE[op](_parse_wire(*rest[0], line))
    if op == "cx":
        if len(rest) != 2:
            raise line.error("cx takes control and target wires", op_col)
        return g.cx(_parse_wire(*rest[0], line), _parse_wire(*rest[1], line))
    if op == "cz":
        if len(rest) != 2:
            raise line.error("cz takes two wires", op_col)
        return g.cz(_parse_wire(*rest[0], line), _parse_wire(*rest[1], line))
    if op == "swap":
        if len(rest) != 2:
            raise line.error("swap takes two wires", op_col)
        return g.swap(_parse_wire(*rest[0], line), _parse_wire(*rest[1], line))
    if op == "mcx":
        arrow = [k for k, (tok, _) in enumerate(rest) if tok == "->"]
        if len(arrow) != 1 or arrow[0] != len(rest) - 2 or not arrow[0]:
            raise line.error("mcx needs '[~]qC ... -> qT'", op_col)
        controls = [_parse_control(*tok, line) for tok in rest[:arrow[0]]]
        return g.mcx(controls, _parse_wire(*rest[-1], line))
    if op == "mcz":
        if len(rest) < 2:
            raise line.error("mcz needs at least two participants", op_col)
        return g.mcz([_parse_control(*tok, line) for tok in rest])
    if op == "barrier":
        if rest:
            raise line.error("barrier takes no arguments", rest[0][1])
        return g.barrier()
    if op == "measure":
        if len(rest) != 3 or rest[1][0] != "->":
            raise line.error("measure needs 'qI -> cJ'", op_col)
        return g.measure(_parse_wire(*rest[0], line),
                         _parse_wire(rest[2][0], rest[2][1], line, prefix="c"))
    raise line.error(f"unknown gate {op!r}", op_col)


def parse_gate_line(text: str) -> Gate:
    """Parse a single gate line (no header); used for gate payloads."""
    line = _Line(text.strip(), 1)
    if not line.tokens:
        raise ParseError("empty gate line", 1, 1)
    (op, op_col), rest = line.tokens[0], line.tokens[1:]
    return _parse_gate(op, op_col, rest, line)


def emit_gate(gate: Gate) -> str:
    """Canonical single-line form of a gate."""
    k = gate.kind
    if k is GateKind.BARRIER:
        return "barrier"
    if k is GateKind.MEASURE:
        return f"measure q{gate.targets[0]} -> c{gate.bit}"
    if k in (GateKind.SWAP,):
        a, b = gate.targets
        return f"swap q{a} q{b}"
    if k.value in _SINGLE:
        return f"{k.value} q{gate.targets[0]}"
    if gate.is_x_family:
        ctrls = " ".join(("~" if c.polarity is Polarity.OPEN else "") + f"q{c.wire}"
                         for c in gate.controls)
        if k is GateKind.CX and not gate.has_open_control():
            return f"cx q{gate.controls[0].wire} q{gate.targets[0]}"
        return f"mcx {ctrls} -> q{gate.targets[0]}"
    # Z family: emit participants ascending.
    parts = sorted(gate.participants(), key=lambda c: c.wire)
    if k is GateKind.CZ and not gate.has_open_control():
        return f"cz q{parts[0].wire} q{parts[1].wire}"
    body = " ".join(("~" if p.polarity is Polarity.OPEN else "") + f"q{p.wire}"
                    for p in parts)
    return f"mcz {body}"


def emit_circuit(c: Circuit) -> str:
    """Canonical CQC text for a circuit. No trailing newline."""
    lines = [f"qubits {c.num_qubits}"]
    if c.num_bits:
        lines.append(f"bits {c.num_bits}")
    lines.extend(emit_gate(gate) for gate in c.gates)
    return "\n".join(lines)


def circuit_hash(c: Circuit) -> str:
    """Short stable fingerprint of the canonical form."""
    return hashlib.sha256(emit_circuit(c).encode()).hexdigest()[:12]
