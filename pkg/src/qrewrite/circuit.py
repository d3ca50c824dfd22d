"""Circuit intermediate representation.

A circuit is an ordered, flat list of gates over ``num_qubits`` wires and
``num_bits`` classical bits. Column/moment structure is a rendering concern
only; rewrites are free to reorder gates.

Conventions baked in here and relied on everywhere else:

* Wire ``k`` corresponds to bit ``k`` of a basis-state index (little endian).
* Result bitstrings render classical bit ``m-1`` leftmost and bit ``0``
  rightmost.
* Symmetric phase gates (Z/CZ/MCZ) are stored canonically: participants
  sorted ascending, the highest-index closed participant acting as the
  nominal target. X-family gates keep an explicit single target.
* ``CCX``/``CCZ`` are accepted as constructors but normalize to ``MCX``/
  ``MCZ`` with two controls; an ``MCX`` with one control normalizes to
  ``CX``, and so on down the arity ladder. Structural equality therefore
  means semantic equality of the written gate.

Circuits and gates are immutable; all operations on them are pure functions,
so values can be freely shared between threads.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, NamedTuple, Sequence

from .errors import CircuitError


class GateKind(Enum):
    """Gate vocabulary. Values double as CQC mnemonics."""

    I = "i"
    X = "x"
    Y = "y"
    Z = "z"
    H = "h"
    S = "s"
    SDG = "sdg"
    CX = "cx"
    CZ = "cz"
    SWAP = "swap"
    MCX = "mcx"
    MCZ = "mcz"
    CCX = "ccx"
    CCZ = "ccz"
    BARRIER = "barrier"
    MEASURE = "measure"


class Polarity(Enum):
    CLOSED = "closed"  # fires on |1>
    OPEN = "open"      # fires on |0>


class Control(NamedTuple):
    wire: int
    polarity: Polarity = Polarity.CLOSED


# Families used by canonicalization and rule matching.
X_FAMILY = {GateKind.X, GateKind.CX, GateKind.MCX, GateKind.CCX}
Z_FAMILY = {GateKind.Z, GateKind.CZ, GateKind.MCZ, GateKind.CCZ}
DIAGONAL_KINDS = {GateKind.I, GateKind.Z, GateKind.S, GateKind.SDG,
                  GateKind.CZ, GateKind.MCZ}
CLASSICAL_KINDS = {GateKind.I, GateKind.X, GateKind.CX, GateKind.MCX}
CLIFFORD_1Q = {GateKind.I, GateKind.X, GateKind.Y, GateKind.Z,
               GateKind.H, GateKind.S, GateKind.SDG}


def _as_control(c) -> Control:
    if isinstance(c, Control):
        return c
    if isinstance(c, int):
        return Control(c, Polarity.CLOSED)
    wire, pol = c
    if isinstance(pol, str):
        pol = Polarity(pol)
    return Control(wire, pol)


@dataclass(frozen=True)
class Gate:
    """One circuit element. Construct via the factory functions below;
    the raw constructor trusts its arguments."""

    kind: GateKind
    controls: tuple[Control, ...] = ()
    targets: tuple[int, ...] = ()
    bit: int | None = None  # MEASURE only

    def wires(self) -> tuple[int, ...]:
        return tuple(c.wire for c in self.controls) + self.targets

    @property
    def is_barrier(self) -> bool:
        return self.kind is GateKind.BARRIER

    @property
    def is_measure(self) -> bool:
        return self.kind is GateKind.MEASURE

    @property
    def is_diagonal(self) -> bool:
        """Diagonal in the computational basis (phase-type)."""
        return self.kind in DIAGONAL_KINDS

    @property
    def is_x_family(self) -> bool:
        return self.kind in X_FAMILY

    @property
    def is_z_family(self) -> bool:
        return self.kind in Z_FAMILY

    def participants(self) -> tuple[Control, ...]:
        """Z-family view: every wire with its polarity, targets as closed."""
        return self.controls + tuple(Control(t, Polarity.CLOSED) for t in self.targets)

    def has_open_control(self) -> bool:
        return any(c.polarity is Polarity.OPEN for c in self.controls)

    def __str__(self) -> str:
        if self.kind is GateKind.BARRIER:
            return "barrier"
        if self.kind is GateKind.MEASURE:
            return f"measure q{self.targets[0]} -> c{self.bit}"
        parts = [self.kind.value]
        parts += [("~" if c.polarity is Polarity.OPEN else "") + f"q{c.wire}"
                  for c in self.controls]
        parts += [f"q{t}" for t in self.targets]
        return " ".join(parts)


def _check_distinct(wires: Sequence[int], what: str) -> None:
    if len(set(wires)) != len(wires):
        raise CircuitError(f"{what} uses a wire more than once: {list(wires)}")


def _single(kind: GateKind, q: int) -> Gate:
    return Gate(kind, (), (q,))


def i(q: int) -> Gate:
    return _single(GateKind.I, q)


def x(q: int) -> Gate:
    return _single(GateKind.X, q)


def y(q: int) -> Gate:
    return _single(GateKind.Y, q)


def z(q: int) -> Gate:
    return _single(GateKind.Z, q)


def h(q: int) -> Gate:
    return _single(GateKind.H, q)


def s(q: int) -> Gate:
    return _single(GateKind.S, q)


def sdg(q: int) -> Gate:
    return _single(GateKind.SDG, q)


def swap(a: int, b: int) -> Gate:
    _check_distinct((a, b), "swap")
    lo, hi = sorted((a, b))
    return Gate(GateKind.SWAP, (), (lo, hi))


def mcx(controls: Iterable, target: int) -> Gate:
    """X-family gate with any number of polarized controls.

    Normalizes arity: no controls -> X, one control -> CX, else MCX.
    """
    ctrls = tuple(sorted((_as_control(c) for c in controls), key=lambda c: c.wire))
    _check_distinct([c.wire for c in ctrls] + [target], "controlled-X gate")
    if not ctrls:
        return x(target)
    kind = GateKind.CX if len(ctrls) == 1 else GateKind.MCX
    return Gate(kind, ctrls, (target,))


def cx(control, target: int) -> Gate:
    return mcx([control], target)


def ccx(c1, c2, target: int) -> Gate:
    return mcx([c1, c2], target)


def mcz(participants: Iterable) -> Gate:
    """Z-family gate, symmetric on all participating wires.

    Canonical storage: the highest-index closed participant is the nominal
    target, remaining participants become controls sorted ascending. At
    least one participant must be closed (an all-open phase gate has no
    canonical target; express it via X conjugation instead).
    """
    parts = tuple(_as_control(p) for p in participants)
    _check_distinct([p.wire for p in parts], "controlled-Z gate")
    if not parts:
        raise CircuitError("phase gate needs at least one participant")
    closed = [p for p in parts if p.polarity is Polarity.CLOSED]
    if not closed:
        raise CircuitError("phase gate needs at least one closed participant")
    target = max(c.wire for c in closed)
    ctrls = tuple(sorted((p for p in parts if p.wire != target), key=lambda c: c.wire))
    if not ctrls:
        return z(target)
    kind = GateKind.CZ if len(ctrls) == 1 else GateKind.MCZ
    return Gate(kind, ctrls, (target,))


def cz(a, b) -> Gate:
    return mcz([a, b])


def ccz(a, b, c) -> Gate:
    return mcz([a, b, c])


def barrier() -> Gate:
    return Gate(GateKind.BARRIER)


def measure(q: int, bit: int) -> Gate:
    return Gate(GateKind.MEASURE, (), (q,), bit=bit)


def _validate_gate(g: Gate, num_qubits: int, num_bits: int) -> None:
    if g.kind is GateKind.BARRIER:
        if g.controls or g.targets or g.bit is not None:
            raise CircuitError("barrier carries no wires")
        return
    for w in g.wires():
        if not 0 <= w < num_qubits:
            raise CircuitError(f"wire q{w} out of range for {num_qubits} qubit(s)")
    if g.kind is GateKind.MEASURE:
        if len(g.targets) != 1 or g.controls or g.bit is None:
            raise CircuitError("measure maps exactly one qubit to one bit")
        if not 0 <= g.bit < num_bits:
            raise CircuitError(f"bit c{g.bit} out of range for {num_bits} bit(s)")
        return
    if g.bit is not None:
        raise CircuitError(f"{g.kind.value} gate cannot carry a classical bit")
    if g.kind in CLIFFORD_1Q:
        if g.controls or len(g.targets) != 1:
            raise CircuitError(f"{g.kind.value} takes no controls and one target")
    elif g.kind is GateKind.SWAP:
        if g.controls or len(g.targets) != 2:
            raise CircuitError("swap takes exactly two targets")
    elif g.kind in (GateKind.CX, GateKind.MCX):
        want = 1 if g.kind is GateKind.CX else 2
        if len(g.controls) < want or len(g.targets) != 1:
            raise CircuitError(f"{g.kind.value} needs controls and one target")
        if g.kind is GateKind.CX and len(g.controls) != 1:
            raise CircuitError("cx takes exactly one control")
    elif g.kind in (GateKind.CZ, GateKind.MCZ):
        want = 1 if g.kind is GateKind.CZ else 2
        if len(g.controls) != want and g.kind is GateKind.CZ:
            raise CircuitError("cz takes exactly two participants")
        if len(g.controls) < want or len(g.targets) != 1:
            raise CircuitError(f"{g.kind.value} needs participants and a target")
    elif g.kind in (GateKind.CCX, GateKind.CCZ):
        raise CircuitError(f"{g.kind.value} must be normalized to mcx/mcz at construction")
    else:  # pragma: no cover - exhaustive above
        raise CircuitError(f"unknown gate kind {g.kind}")
    _check_distinct(g.wires(), g.kind.value)


@dataclass(frozen=True)
class Circuit:
    """Immutable gate sequence. Wire/bit validity is checked here, never at
    use. Measurement is terminal per wire: once measured, a wire may not be
    touched again (barriers excepted)."""

    num_qubits: int
    num_bits: int = 0
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.num_qubits < 1:
            raise CircuitError("circuit needs at least one qubit")
        if self.num_bits < 0:
            raise CircuitError("negative bit count")
        object.__setattr__(self, "gates", tuple(self.gates))
        measured: set[int] = set()
        used_bits: set[int] = set()
        for g in self.gates:
            _validate_gate(g, self.num_qubits, self.num_bits)
            if g.is_barrier:
                continue
            touched = set(g.wires())
            dead = touched & measured
            if dead:
                w = min(dead)
                raise CircuitError(f"gate touches q{w} after it was measured")
            if g.is_measure:
                if g.bit in used_bits:
                    raise CircuitError(f"bit c{g.bit} written twice")
                used_bits.add(g.bit)
                measured.add(g.targets[0])

    def __len__(self) -> int:
        return len(self.gates)

    def replace_gates(self, gates: Iterable[Gate]) -> "Circuit":
        return Circuit(self.num_qubits, self.num_bits, tuple(gates))

    def without_measurements(self) -> "Circuit":
        return self.replace_gates(g for g in self.gates if not g.is_measure)

    def measured_wires(self) -> dict[int, int]:
        """Map wire -> classical bit for every measurement."""
        return {g.targets[0]: g.bit for g in self.gates if g.is_measure}

    def has_measurements(self) -> bool:
        return any(g.is_measure for g in self.gates)
