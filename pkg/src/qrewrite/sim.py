"""Dense statevector backend, unitaries, sampling, and equivalence checks.

Amplitude index bit ``k`` is qubit ``k``. Basis strings follow the rendering
convention used everywhere: leftmost character is the highest wire/bit.

Kernels operate on the amplitude axis with index masks and broadcast over a
trailing batch axis, so building a full unitary reuses the same code paths.
NumPy runs the inner loops; results are deterministic regardless of how the
arrays are chunked internally.
"""

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .circuit import Circuit, Gate, GateKind, Polarity
from .errors import SimulationError

MAX_STATE_QUBITS = 24
MAX_UNITARY_QUBITS = 12

_INV_SQRT2 = 1.0 / sqrt(2.0)

MATRICES_1Q = {
    GateKind.I: np.eye(2, dtype=complex),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    GateKind.H: np.array([[1, 1], [1, -1]], dtype=complex) * _INV_SQRT2,
    GateKind.S: np.array([[1, 0], [0, 1j]], dtype=complex),
    GateKind.SDG: np.array([[1, 0], [0, -1j]], dtype=complex),
}


@dataclass(frozen=True)
class StateVector:
    n: int
    amplitudes: np.ndarray  # shape (2**n,), complex

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probability(self, basis: str) -> float:
        return float(abs(self.amplitudes[basis_index(basis)]) ** 2)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class EquivalenceReport:
    equivalent: bool
    global_phase: complex | None
    max_deviation: float

    def to_json(self) -> dict:
        phase = self.global_phase if self.global_phase is not None else 0j
        return {
            "equivalent": self.equivalent,
            "phase_re": phase.real,
            "phase_im": phase.imag,
            "max_deviation": self.max_deviation,
        }


def basis_index(basis: str) -> int:
    """Index of a basis string (leftmost char = highest wire)."""
    if not basis or set(basis) - {"0", "1"}:
        raise SimulationError(f"basis string must be over 0/1, got {basis!r}")
    return int(basis, 2)


def index_to_basis(index: int, width: int) -> str:
    return format(index, f"0{width}b")


def _control_mask(idx: np.ndarray, gate: Gate) -> np.ndarray:
    mask = np.ones(idx.shape, dtype=bool)
    for c in gate.controls:
        bit = (idx >> c.wire) & 1
        mask &= bit == (1 if c.polarity is Polarity.CLOSED else 0)
    return mask


def _qubit_view(amps: np.ndarray, q: int, n: int):
    """Split the amplitude axis around qubit q: views (..0..), (..1..)."""
    post = 2 ** q
    pre = 2 ** (n - 1 - q)
    view = amps.reshape((pre, 2, post) + amps.shape[1:])
    return view[:, 0], view[:, 1]


def _apply_inplace(amps: np.ndarray, gate: Gate, n: int) -> None:
    """Apply one gate in place; amplitudes shaped (2**n,) or (2**n, batch)."""
    kind = gate.kind
    if kind is GateKind.BARRIER or kind is GateKind.I:
        return
    if kind is GateKind.MEASURE:
        raise SimulationError("cannot apply a measurement as a unitary")
    if kind in MATRICES_1Q:
        q = gate.targets[0]
        v0, v1 = _qubit_view(amps, q, n)
        if kind is GateKind.Z:
            v1 *= -1
        elif kind is GateKind.S:
            v1 *= 1j
        elif kind is GateKind.SDG:
            v1 *= -1j
        elif kind is GateKind.X:
            tmp = v0.copy()
            v0[:] = v1
            v1[:] = tmp
        elif kind is GateKind.Y:
            tmp = v0.copy()
            v0[:] = -1j * v1
            v1[:] = 1j * tmp
        else:  # H
            tmp = v0 + v1
            v1[:] = v0 - v1
            v1 *= _INV_SQRT2
            v0[:] = tmp
            v0 *= _INV_SQRT2
        return
    idx = np.arange(amps.shape[0])
    if kind is GateKind.SWAP:
        a, b = gate.targets
        sel = idx[(((idx >> a) & 1) == 1) & (((idx >> b) & 1) == 0)]
        other = (sel & ~(1 << a)) | (1 << b)
        tmp = amps[sel].copy()
        amps[sel] = amps[other]
        amps[other] = tmp
        return
    if gate.is_x_family:
        t = gate.targets[0]
        fire = _control_mask(idx, gate) & (((idx >> t) & 1) == 0)
        i0 = idx[fire]
        i1 = i0 | (1 << t)
        tmp = amps[i0].copy()
        amps[i0] = amps[i1]
        amps[i1] = tmp
        return
    if gate.is_z_family:
        t = gate.targets[0]
        fire = _control_mask(idx, gate) & (((idx >> t) & 1) == 1)
        amps[fire] *= -1
        return
    raise SimulationError(f"unsupported gate kind {kind.value}")  # pragma: no cover


def apply_gate(amps: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    """Apply one gate to amplitudes of shape (2**n,) or (2**n, batch)."""
    out = amps.copy()
    _apply_inplace(out, gate, n)
    return out


def statevector_run(c: Circuit, input: str | None = None,
                    ignore_measurements: bool = False) -> StateVector:
    """Run the circuit on a basis input (default all zeros)."""
    if c.num_qubits > MAX_STATE_QUBITS:
        raise SimulationError(
            f"{c.num_qubits} qubits exceeds the dense limit of {MAX_STATE_QUBITS}")
    if c.has_measurements() and not ignore_measurements:
        raise SimulationError(
            "circuit contains measurements; pass ignore_measurements=True "
            "or use sample()")
    basis = input if input is not None else "0" * c.num_qubits
    if len(basis) != c.num_qubits:
        raise SimulationError(
            f"input length {len(basis)} != qubit count {c.num_qubits}")
    amps = np.zeros(2 ** c.num_qubits, dtype=complex)
    amps[basis_index(basis)] = 1.0
    for gate in c.gates:
        if gate.is_measure:
            continue
        _apply_inplace(amps, gate, c.num_qubits)
    return StateVector(c.num_qubits, amps)


def unitary_of(c: Circuit) -> np.ndarray:
    """Full 2^n x 2^n unitary, gates composed in circuit order."""
    if c.num_qubits > MAX_UNITARY_QUBITS:
        raise SimulationError(
            f"{c.num_qubits} qubits exceeds the unitary limit of {MAX_UNITARY_QUBITS}")
    if c.has_measurements():
        raise SimulationError("unitary_of needs a measurement-free circuit")
    dim = 2 ** c.num_qubits
    u = np.eye(dim, dtype=complex)
    for gate in c.gates:
        _apply_inplace(u, gate, c.num_qubits)
    return u


def matrices_equal_up_to_phase(ua: np.ndarray, ub: np.ndarray,
                               tol: float = 1e-10) -> EquivalenceReport:
    """Check U_a = e^{i phi} U_b entrywise within tol. The phase is read
    off the largest-magnitude entry of U_a^dagger U_b."""
    m = ua.conj().T @ ub
    entry = m.flat[np.argmax(np.abs(m))]
    if abs(entry) < 1e-12:
        return EquivalenceReport(False, None, float("inf"))
    phase = entry / abs(entry)
    deviation = float(np.max(np.abs(ua * phase - ub)))
    if deviation <= tol:
        return EquivalenceReport(True, complex(phase), deviation)
    return EquivalenceReport(False, None, deviation)


def equivalent_up_to_phase(a: Circuit, b: Circuit,
                           tol: float = 1e-10) -> EquivalenceReport:
    """Check U_a = e^{i phi} U_b entrywise within tol."""
    if a.num_qubits != b.num_qubits:
        raise SimulationError("circuits have different widths")
    if a.has_measurements() or b.has_measurements():
        raise SimulationError(
            "measured circuits are compared via exact_distribution instead")
    return matrices_equal_up_to_phase(unitary_of(a), unitary_of(b), tol)


def states_equal_up_to_phase(a: np.ndarray, b: np.ndarray,
                             tol: float = 1e-10) -> bool:
    overlap = abs(np.vdot(a, b))
    return bool(abs(overlap - 1.0) <= tol)


def exact_distribution(c: Circuit) -> dict[str, float]:
    """Exact Born distribution of the measured bits (statevector backend).

    Keys have length ``num_bits``; unwritten bits read 0.
    """
    measured = c.measured_wires()
    if not measured:
        raise SimulationError("circuit has no measurements")
    state = statevector_run(c, ignore_measurements=True)
    probs = state.probabilities()
    idx = np.arange(probs.shape[0])
    keys = np.zeros(probs.shape[0], dtype=np.int64)
    for wire, bit in measured.items():
        keys |= ((idx >> wire) & 1) << bit
    totals = np.bincount(keys, weights=probs, minlength=1)
    out: dict[str, float] = {}
    for k, p in enumerate(totals):
        if p > 1e-15:
            out[index_to_basis(k, c.num_bits)] = float(p)
    return out


def sample(c: Circuit, shots: int, seed: int | None = None) -> dict[str, int]:
    """Sample measurement outcomes; exact Born marginal, seeded.

    Chooses the stabilizer backend for Clifford circuits and the dense
    backend otherwise.
    """
    if shots < 1:
        raise SimulationError("shots must be >= 1")
    if not c.has_measurements():
        raise SimulationError("circuit has no measurements")
    from . import tableau

    if tableau.is_clifford(c):
        dist = tableau.exact_distribution(c)
    else:
        dist = exact_distribution(c)
    keys = sorted(dist)
    probs = np.array([dist[k] for k in keys])
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    draws = rng.choice(len(keys), size=shots, p=probs)
    values, counts = np.unique(draws, return_counts=True)
    return {keys[v]: int(n) for v, n in zip(values, counts)}


# -- identity report ---------------------------------------------------------

@dataclass(frozen=True)
class IdentityCheck:
    name: str
    deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.deviation <= self.tolerance


def _kron(*ms: np.ndarray) -> np.ndarray:
    out = ms[0]
    for m in ms[1:]:
        out = np.kron(out, m)
    return out


def _rx(theta: float) -> np.ndarray:
    x = MATRICES_1Q[GateKind.X]
    return np.cos(theta / 2) * np.eye(2) - 1j * np.sin(theta / 2) * x


def _rxx(theta: float) -> np.ndarray:
    xx = _kron(MATRICES_1Q[GateKind.X], MATRICES_1Q[GateKind.X])
    return np.cos(theta / 2) * np.eye(4) - 1j * np.sin(theta / 2) * xx


def check_parity_identities(tolerance: float = 1e-12) -> list[IdentityCheck]:
    """Matrix-level checks for the basis-rotation identities the rewrite
    rules rely on. Failures signal an implementation bug, never an input
    error."""
    from . import circuit as g

    eye2 = np.eye(2)
    H = MATRICES_1Q[GateKind.H]
    X = MATRICES_1Q[GateKind.X]
    Z = MATRICES_1Q[GateKind.Z]

    def u(num_qubits: int, *gates: Gate) -> np.ndarray:
        return unitary_of(Circuit(num_qubits, 0, gates))

    checks: list[tuple[str, np.ndarray, np.ndarray]] = []

    checks.append(("h z h = x", H @ Z @ H, X))
    checks.append(("h x h = z", H @ X @ H, Z))

    # Two-wire parity rotations. kron(A, B) puts A on the high wire.
    zx, zz, xz, xx = _kron(Z, X), _kron(Z, Z), _kron(X, Z), _kron(X, X)
    ih, hi, hh = _kron(eye2, H), _kron(H, eye2), _kron(H, H)
    checks.append(("(i@h) zx (i@h) = zz", ih @ zx @ ih, zz))
    checks.append(("(h@i) xz (h@i) = zz", hi @ xz @ hi, zz))
    checks.append(("(h@h) xx (h@h) = zz", hh @ xx @ hh, zz))

    # Control/target reversal chain for cx around cz.
    cx01 = u(2, g.cx(0, 1))
    cx10 = u(2, g.cx(1, 0))
    cz01 = u(2, g.cz(0, 1))
    checks.append(("h0 cx(0->1) h0 = h0 h1 cz h0 h1",
                   u(2, g.h(0)) @ cx01 @ u(2, g.h(0)),
                   hh @ cz01 @ hh))
    checks.append(("h0 h1 cz h0 h1 = h1 cx(1->0) h1",
                   hh @ cz01 @ hh,
                   u(2, g.h(1)) @ cx10 @ u(2, g.h(1))))

    # h mcx h = mcz at control arities 1..3.
    for arity in (1, 2, 3):
        n = arity + 1
        controls = list(range(arity))
        lhs = (u(n, g.h(arity)) @ u(n, g.mcx(controls, arity)) @ u(n, g.h(arity)))
        rhs = u(n, g.mcz(controls + [arity]))
        checks.append((f"h mcx h = mcz ({arity} controls)", lhs, rhs))

    # x pushed through a ccz spawns the complementary cz.
    lhs = u(3, g.ccz(0, 1, 2)) @ u(3, g.x(2))
    rhs = u(3, g.x(2)) @ u(3, g.ccz(0, 1, 2)) @ u(3, g.cz(0, 1))
    checks.append(("x2 . ccz = cz01 . ccz . x2 (circuit order)", lhs, rhs))

    # cz pushed past x spawns a z on the partner wire.
    lhs = u(2, g.cz(0, 1)) @ u(2, g.x(0))
    rhs = u(2, g.x(0)) @ u(2, g.z(1)) @ u(2, g.cz(0, 1))
    checks.append(("cz01 . x0 = x0 . z1 . cz01 (circuit order)", lhs, rhs))

    # Fourier-side factorization of cz: fixed angles derived by brute force.
    lhs = hh @ cz01 @ hh
    rhs = (np.exp(1j * np.pi / 4) * _rxx(-np.pi / 2)
           @ _kron(_rx(np.pi / 2), _rx(np.pi / 2)))
    checks.append(("(h@h) cz (h@h) = e^{i pi/4} rxx(-pi/2) rx(pi/2)@rx(pi/2)",
                   lhs, rhs))

    return [IdentityCheck(name, float(np.max(np.abs(a - b))), tolerance)
            for name, a, b in checks]
