"""Stabilizer-tableau backend (Aaronson & Gottesman, quant-ph/0406196).

Tracks n destabilizer and n stabilizer generators as binary X/Z matrices
plus a sign column, giving polynomial-time simulation of Clifford circuits.
Rows 0..n-1 are destabilizers, rows n..2n-1 stabilizers; ``x[i, j]`` /
``z[i, j]`` are the X/Z bits of generator i on wire j, ``r[i]`` the sign bit.
"""

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Gate, GateKind, Polarity
from .errors import SimulationError

MAX_TABLEAU_QUBITS = 2000

CLIFFORD_1Q = {GateKind.I, GateKind.X, GateKind.Y, GateKind.Z,
               GateKind.H, GateKind.S, GateKind.SDG}


def is_clifford_gate(g: Gate) -> bool:
    return (g.kind in CLIFFORD_1Q or g.is_barrier or g.is_measure
            or g.kind in (GateKind.CX, GateKind.CZ, GateKind.SWAP))


def is_clifford(c: Circuit) -> bool:
    """True when every gate is in the tableau-supported Clifford set."""
    return all(is_clifford_gate(g) for g in c.gates)


def _reject_non_clifford(c: Circuit) -> None:
    for g in c.gates:
        if not is_clifford_gate(g):
            raise SimulationError(
                f"non-Clifford gate '{g}' is not tableau-simulable")


@dataclass
class Tableau:
    n: int
    x: np.ndarray  # (2n, n) uint8
    z: np.ndarray  # (2n, n) uint8
    r: np.ndarray  # (2n,) uint8 sign bits

    @classmethod
    def zeros(cls, n: int) -> "Tableau":
        if not 1 <= n <= MAX_TABLEAU_QUBITS:
            raise SimulationError(f"tableau supports 1..{MAX_TABLEAU_QUBITS} qubits")
        x = np.zeros((2 * n, n), dtype=np.uint8)
        z = np.zeros((2 * n, n), dtype=np.uint8)
        for k in range(n):
            x[k, k] = 1          # destabilizer X_k
            z[n + k, k] = 1      # stabilizer Z_k
        return cls(n, x, z, np.zeros(2 * n, dtype=np.uint8))

    def copy(self) -> "Tableau":
        return Tableau(self.n, self.x.copy(), self.z.copy(), self.r.copy())

    # -- gate conjugation rules ----------------------------------------

    def apply(self, gate: Gate) -> None:
        kind = gate.kind
        if kind is GateKind.BARRIER or kind is GateKind.I:
            return
        x, z, r = self.x, self.z, self.r
        if kind is GateKind.H:
            q = gate.targets[0]
            r ^= x[:, q] & z[:, q]
            x[:, q], z[:, q] = z[:, q].copy(), x[:, q].copy()
        elif kind is GateKind.S:
            q = gate.targets[0]
            r ^= x[:, q] & z[:, q]
            z[:, q] ^= x[:, q]
        elif kind is GateKind.SDG:
            q = gate.targets[0]
            r ^= x[:, q] & (z[:, q] ^ 1)
            z[:, q] ^= x[:, q]
        elif kind is GateKind.X:
            q = gate.targets[0]
            r ^= z[:, q]
        elif kind is GateKind.Z:
            q = gate.targets[0]
            r ^= x[:, q]
        elif kind is GateKind.Y:
            q = gate.targets[0]
            r ^= x[:, q] ^ z[:, q]
        elif kind is GateKind.CX:
            self._with_open_controls(gate, self._cx)
        elif kind is GateKind.CZ:
            self._with_open_controls(gate, self._cz)
        elif kind is GateKind.SWAP:
            a, b = gate.targets
            x[:, [a, b]] = x[:, [b, a]]
            z[:, [a, b]] = z[:, [b, a]]
        else:
            raise SimulationError(
                f"non-Clifford gate '{gate}' is not tableau-simulable")

    def _with_open_controls(self, gate: Gate, two_qubit) -> None:
        opens = [c.wire for c in gate.controls if c.polarity is Polarity.OPEN]
        for w in opens:
            self.r ^= self.z[:, w]          # conjugate by X
        two_qubit(gate.controls[0].wire, gate.targets[0])
        for w in opens:
            self.r ^= self.z[:, w]

    def _cx(self, c: int, t: int) -> None:
        x, z, r = self.x, self.z, self.r
        r ^= x[:, c] & z[:, t] & (x[:, t] ^ z[:, c] ^ 1)
        x[:, t] ^= x[:, c]
        z[:, c] ^= z[:, t]

    def _cz(self, c: int, t: int) -> None:
        x, z, r = self.x, self.z, self.r
        r ^= x[:, c] & x[:, t] & (z[:, c] ^ z[:, t])
        z[:, c] ^= x[:, t]
        z[:, t] ^= x[:, c]

    # -- Pauli row algebra ---------------------------------------------

    def _rowsum(self, h: int, i: int) -> None:
        """Generator h := generator i * generator h with sign tracking."""
        x, z = self.x, self.z
        x1, z1, x2, z2 = (a.astype(np.int64) for a in (x[i], z[i], x[h], z[h]))
        # Phase exponent of multiplying single-wire Paulis (0, +-1 each).
        g = np.where((x1 == 1) & (z1 == 1), z2 - x2,
            np.where((x1 == 1) & (z1 == 0), z2 * (2 * x2 - 1),
            np.where((x1 == 0) & (z1 == 1), x2 * (1 - 2 * z2), 0)))
        total = 2 * int(self.r[h]) + 2 * int(self.r[i]) + int(g.sum())
        self.r[h] = (total % 4) // 2
        x[h] ^= x[i]
        z[h] ^= z[i]

    # -- measurement -----------------------------------------------------

    def measure(self, q: int, rng: np.random.Generator | None = None,
                forced: int | None = None) -> tuple[int, bool, int | None]:
        """Measure wire q in the Z basis.

        Returns (outcome, was_random, pivot_row). For random outcomes the
        state collapses to the returned outcome; flipping ``r[pivot_row]``
        afterwards yields the opposite branch.
        """
        n = self.n
        p = next((row for row in range(n, 2 * n) if self.x[row, q]), None)
        if p is not None:
            for row in range(2 * n):
                if row != p and self.x[row, q]:
                    self._rowsum(row, p)
            self.x[p - n] = self.x[p]
            self.z[p - n] = self.z[p]
            self.r[p - n] = self.r[p]
            if forced is not None:
                outcome = forced
            else:
                outcome = int(rng.integers(0, 2)) if rng is not None else 0
            self.x[p] = 0
            self.z[p] = 0
            self.z[p, q] = 1
            self.r[p] = outcome
            return outcome, True, p
        # Deterministic: accumulate the stabilizer combination fixing Z_q.
        scratch = Tableau(self.n,
                          np.vstack([self.x, np.zeros(n, dtype=np.uint8)]),
                          np.vstack([self.z, np.zeros(n, dtype=np.uint8)]),
                          np.append(self.r, 0))
        for k in range(n):
            if self.x[k, q]:
                scratch._rowsum(2 * n, n + k)
        return int(scratch.r[2 * n]), False, None

    # -- inspection -------------------------------------------------------

    def stabilizer_strings(self) -> list[str]:
        """Stabilizer generators as '+XZ..' strings, highest wire leftmost."""
        out = []
        for row in range(self.n, 2 * self.n):
            chars = ["IXZY"[self.x[row, q] + 2 * self.z[row, q]]
                     for q in range(self.n - 1, -1, -1)]
            out.append(("-" if self.r[row] else "+") + "".join(chars))
        return out

    def canonical_stabilizers(self) -> list[str]:
        """Row-reduced generator set: unique per stabilizer group."""
        t = self.copy()
        n = t.n
        pivot = n
        for col_kind, col in [(k, c) for k in ("x", "z") for c in range(n)]:
            bits = t.x if col_kind == "x" else t.z
            row = next((r for r in range(pivot, 2 * n) if bits[r, col]), None)
            if row is None:
                continue
            if row != pivot:
                for arr in (t.x, t.z):
                    arr[[pivot, row]] = arr[[row, pivot]]
                t.r[[pivot, row]] = t.r[[row, pivot]]
            for r2 in range(n, 2 * n):
                if r2 != pivot and bits[r2, col]:
                    t._rowsum(r2, pivot)
            pivot += 1
            if pivot == 2 * n:
                break
        return sorted(t.stabilizer_strings())


def tableau_run(c: Circuit, input: str | None = None) -> Tableau:
    """Evolve the all-zeros (or given basis) state through a Clifford circuit."""
    _reject_non_clifford(c)
    if c.has_measurements():
        raise SimulationError("tableau_run expects a measurement-free circuit")
    basis = input if input is not None else "0" * c.num_qubits
    if len(basis) != c.num_qubits:
        raise SimulationError(
            f"input length {len(basis)} != qubit count {c.num_qubits}")
    t = Tableau.zeros(c.num_qubits)
    for k, ch in enumerate(reversed(basis)):
        if ch == "1":
            t.apply(Gate(GateKind.X, (), (k,)))
    for gate in c.gates:
        t.apply(gate)
    return t


def exact_distribution(c: Circuit) -> dict[str, float]:
    """Exact Born distribution of the measured bits via outcome branching.

    Every random measurement splits the trace with probability 1/2 per
    branch, so the result is exact, not sampled.
    """
    _reject_non_clifford(c)
    measures = [g for g in c.gates if g.is_measure]
    if not measures:
        raise SimulationError("circuit has no measurements")
    t = Tableau.zeros(c.num_qubits)
    for gate in c.gates:
        if not gate.is_measure:
            t.apply(gate)

    dist: dict[int, float] = {}

    def branch(tab: Tableau, k: int, key: int, prob: float) -> None:
        if k == len(measures):
            dist[key] = dist.get(key, 0.0) + prob
            return
        gate = measures[k]
        q, bit = gate.targets[0], gate.bit
        outcome, random, pivot = tab.measure(q, forced=0)
        if not random:
            branch(tab, k + 1, key | (outcome << bit), prob)
            return
        one = tab.copy()
        one.r[pivot] = 1
        branch(tab, k + 1, key, prob / 2)
        branch(one, k + 1, key | (1 << bit), prob / 2)

    branch(t, 0, 0, 1.0)
    width = c.num_bits
    return {format(k, f"0{width}b"): p for k, p in sorted(dist.items())}


def entanglement_entropy(t: Tableau, region: set[int]) -> int:
    """Bipartite entanglement entropy in ebits across region | complement.

    Computed as the GF(2) rank of the stabilizer generators restricted to
    the region, minus the region size.
    """
    wires = sorted(region)
    rows = [[int(t.x[row, q]) for q in wires] + [int(t.z[row, q]) for q in wires]
            for row in range(t.n, 2 * t.n)]
    return _gf2_rank(np.array(rows, dtype=np.uint8)) - len(wires)


def _gf2_rank(m: np.ndarray) -> int:
    if m.size == 0:
        return 0
    m = m.copy()
    rank = 0
    rows, cols = m.shape
    for col in range(cols):
        row = next((r for r in range(rank, rows) if m[r, col]), None)
        if row is None:
            continue
        m[[rank, row]] = m[[row, rank]]
        for r2 in range(rows):
            if r2 != rank and m[r2, col]:
                m[r2] ^= m[rank]
        rank += 1
    return rank
