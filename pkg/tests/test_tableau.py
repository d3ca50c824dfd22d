import numpy as np
import pytest

import qrewrite.circuit as g
from qrewrite import sim, tableau
from qrewrite.circuit import Circuit
from qrewrite.errors import SimulationError

from conftest import random_circuit


def test_plus_state_stabilizer():
    t = tableau.tableau_run(Circuit(1, 0, (g.h(0),)))
    assert t.canonical_stabilizers() == ["+X"]


def test_bell_pair_stabilizers():
    t = tableau.tableau_run(Circuit(2, 0, (g.h(0), g.cx(0, 1))))
    assert t.canonical_stabilizers() == ["+XX", "+ZZ"]


def test_basis_prep_from_input_string():
    t = tableau.tableau_run(Circuit(2, 0, ()), input="10")
    assert t.canonical_stabilizers() == ["+IZ", "-ZI"]


def test_non_clifford_rejected_with_gate_name():
    c = Circuit(3, 0, (g.ccx(0, 1, 2),))
    with pytest.raises(SimulationError) as err:
        tableau.tableau_run(c)
    assert "mcx" in str(err.value)


def test_measures_rejected_in_tableau_run():
    with pytest.raises(SimulationError):
        tableau.tableau_run(Circuit(1, 1, (g.measure(0, 0),)))


def test_deterministic_measurement():
    t = tableau.tableau_run(Circuit(1, 0, (g.x(0),)))
    outcome, random, _ = t.measure(0)
    assert (outcome, random) == (1, False)


def test_random_measurement_collapses():
    t = tableau.tableau_run(Circuit(1, 0, (g.h(0),)))
    outcome, random, _ = t.measure(0, rng=np.random.default_rng(3))
    assert random
    again, random2, _ = t.measure(0)
    assert not random2 and again == outcome


def test_exact_distribution_bell():
    c = Circuit(2, 2, (g.h(0), g.cx(0, 1), g.measure(0, 0), g.measure(1, 1)))
    dist = tableau.exact_distribution(c)
    assert dist == {"00": pytest.approx(0.5), "11": pytest.approx(0.5)}


def test_entanglement_entropy_bell_and_product():
    bell = tableau.tableau_run(Circuit(2, 0, (g.h(0), g.cx(0, 1))))
    assert tableau.entanglement_entropy(bell, {0}) == 1
    product = tableau.tableau_run(Circuit(2, 0, (g.h(0), g.h(1))))
    assert tableau.entanglement_entropy(product, {0}) == 0


def test_ghz_entropy_across_cuts():
    ghz = tableau.tableau_run(Circuit(3, 0, (g.h(0), g.cx(0, 1), g.cx(0, 2))))
    assert tableau.entanglement_entropy(ghz, {0}) == 1
    assert tableau.entanglement_entropy(ghz, {0, 1}) == 1


def test_open_controls_supported():
    c = Circuit(2, 2, (g.cx((0, "open"), 1), g.measure(0, 0), g.measure(1, 1)))
    assert tableau.exact_distribution(c) == {"10": pytest.approx(1.0)}


def test_backends_agree_on_random_clifford(rng):
    for _ in range(60):
        n = int(rng.integers(1, 6))
        c = random_circuit(rng, n, int(rng.integers(1, 30)),
                           clifford_only=True, measures=True)
        dense = sim.exact_distribution(c)
        stab = tableau.exact_distribution(c)
        keys = set(dense) | set(stab)
        for key in keys:
            assert abs(dense.get(key, 0.0) - stab.get(key, 0.0)) < 1e-9


def test_stabilizer_state_matches_statevector(rng):
    # Cross-validate the tableau against dense simulation through the
    # full measurement distribution on all wires.
    for _ in range(25):
        n = int(rng.integers(1, 5))
        c = random_circuit(rng, n, 20, clifford_only=True)
        measured = Circuit(n, n, c.gates + tuple(
            g.measure(k, k) for k in range(n)))
        dense = sim.exact_distribution(measured)
        stab = tableau.exact_distribution(measured)
        for key in set(dense) | set(stab):
            assert abs(dense.get(key, 0.0) - stab.get(key, 0.0)) < 1e-9
