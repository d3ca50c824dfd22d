"""Shared helpers: seeded random circuit generation."""

import numpy as np
import pytest

import qrewrite.circuit as g
from qrewrite.circuit import Circuit


def random_gate(rng: np.random.Generator, n: int, clifford_only: bool = False,
                open_controls: bool = True) -> g.Gate:
    kinds = ["h", "x", "y", "z", "s", "sdg", "i"]
    if n >= 2:
        kinds += ["cx", "cz", "swap"] * 2
    if n >= 3 and not clifford_only:
        kinds += ["mcx", "mcz"]
    kind = kinds[rng.integers(len(kinds))]
    wires = [int(w) for w in rng.permutation(n)]

    def ctl(w):
        if open_controls and rng.random() < 0.25:
            return (w, "open")
        return w

    if kind in ("h", "x", "y", "z", "s", "sdg", "i"):
        return getattr(g, kind)(wires[0])
    if kind == "cx":
        return g.cx(ctl(wires[0]), wires[1])
    if kind == "cz":
        return g.cz(ctl(wires[0]), wires[1])
    if kind == "swap":
        return g.swap(wires[0], wires[1])
    count = int(rng.integers(2, min(n, 4)))
    if kind == "mcx":
        return g.mcx([ctl(w) for w in wires[:count]], wires[count])
    participants = [ctl(w) for w in wires[:count]] + [wires[count]]
    return g.mcz(participants)


def random_circuit(rng: np.random.Generator, n: int, depth: int,
                   clifford_only: bool = False, barriers: bool = False,
                   measures: bool = False,
                   open_controls: bool = True) -> Circuit:
    gates = []
    for _ in range(depth):
        if barriers and rng.random() < 0.08:
            gates.append(g.barrier())
        else:
            gates.append(random_gate(rng, n, clifford_only, open_controls))
    bits = n if measures else 0
    if measures:
        gates += [g.measure(k, k) for k in range(n)]
    return Circuit(n, bits, tuple(gates))


@pytest.fixture
def rng():
    return np.random.default_rng(20240901)
