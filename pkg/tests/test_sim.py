import numpy as np
import pytest

import qrewrite.circuit as g
from qrewrite import sim
from qrewrite.circuit import Circuit
from qrewrite.errors import SimulationError

from conftest import random_circuit

INV_SQRT2 = 1 / np.sqrt(2)


def test_h_on_zero_gives_plus():
    state = sim.statevector_run(Circuit(1, 0, (g.h(0),)))
    assert np.allclose(state.amplitudes, [INV_SQRT2, INV_SQRT2])


def test_hzh_acts_as_x():
    state = sim.statevector_run(Circuit(1, 0, (g.h(0), g.z(0), g.h(0))))
    assert np.allclose(state.amplitudes, [0, 1], atol=1e-12)


def test_basis_input_string_is_high_wire_first():
    state = sim.statevector_run(Circuit(2, 0, ()), input="10")
    assert state.probability("10") == pytest.approx(1.0)
    assert np.argmax(np.abs(state.amplitudes)) == 0b10


def test_open_control_fires_on_zero():
    c = Circuit(2, 0, (g.cx((0, "open"), 1),))
    out = sim.statevector_run(c, "00")
    assert out.probability("10") == pytest.approx(1.0)


def test_mcz_phases_only_full_condition():
    c = Circuit(3, 0, (g.ccz(0, 1, 2),))
    u = sim.unitary_of(c)
    expected = np.eye(8, dtype=complex)
    expected[7, 7] = -1
    assert np.allclose(u, expected)


def test_unitary_of_z():
    u = sim.unitary_of(Circuit(1, 0, (g.z(0),)))
    assert np.allclose(u, np.diag([1, -1]))


def test_hczh_is_cx():
    a = Circuit(2, 0, (g.h(1), g.cz(0, 1), g.h(1)))
    b = Circuit(2, 0, (g.cx(0, 1),))
    assert np.allclose(sim.unitary_of(a), sim.unitary_of(b), atol=1e-12)


def test_unitary_respects_composition(rng):
    for _ in range(20):
        n = int(rng.integers(1, 4))
        a = random_circuit(rng, n, 6)
        b = random_circuit(rng, n, 6)
        combined = Circuit(n, 0, a.gates + b.gates)
        product = sim.unitary_of(b) @ sim.unitary_of(a)
        assert np.max(np.abs(sim.unitary_of(combined) - product)) < 1e-12


def test_norm_preserved(rng):
    for _ in range(30):
        c = random_circuit(rng, int(rng.integers(1, 6)), 25, barriers=True)
        assert abs(sim.statevector_run(c).norm() - 1.0) < 1e-12


def test_equivalence_detects_phase():
    a = Circuit(1, 0, (g.z(0), g.x(0), g.z(0), g.x(0)))  # = -I
    b = Circuit(1, 0, ())
    report = sim.equivalent_up_to_phase(a, b)
    assert report.equivalent
    assert report.global_phase == pytest.approx(-1)


def test_equivalence_rejects_different_circuits():
    a = Circuit(1, 0, (g.x(0),))
    b = Circuit(1, 0, (g.z(0),))
    assert not sim.equivalent_up_to_phase(a, b).equivalent


def test_equivalence_rejects_measured_circuits():
    c = Circuit(1, 1, (g.measure(0, 0),))
    with pytest.raises(SimulationError):
        sim.equivalent_up_to_phase(c, c)


def test_statevector_rejects_measures_unless_ignored():
    c = Circuit(1, 1, (g.h(0), g.measure(0, 0)))
    with pytest.raises(SimulationError):
        sim.statevector_run(c)
    state = sim.statevector_run(c, ignore_measurements=True)
    assert state.norm() == pytest.approx(1.0)


def test_sample_requires_measurements():
    with pytest.raises(SimulationError):
        sim.sample(Circuit(1, 0, (g.h(0),)), 10)


def test_sample_deterministic_for_seed():
    c = Circuit(1, 1, (g.h(0), g.measure(0, 0)))
    a = sim.sample(c, 500, seed=11)
    b = sim.sample(c, 500, seed=11)
    assert a == b
    assert sum(a.values()) == 500


def test_fair_coin_within_five_sigma():
    c = Circuit(1, 1, (g.h(0), g.measure(0, 0)))
    counts = sim.sample(c, 4096, seed=7)
    sigma = np.sqrt(4096 * 0.25)
    assert abs(counts.get("0", 0) - 2048) <= 5 * sigma
    assert abs(counts.get("1", 0) - 2048) <= 5 * sigma


def test_sample_uses_dense_backend_for_non_clifford():
    c = Circuit(3, 3, (g.x(0), g.x(1), g.ccx(0, 1, 2),
                       g.measure(0, 0), g.measure(1, 1), g.measure(2, 2)))
    assert sim.sample(c, 64, seed=0) == {"111": 64}


def test_exact_distribution_keys_have_bit_width():
    c = Circuit(2, 2, (g.h(0), g.measure(0, 0), g.measure(1, 1)))
    dist = sim.exact_distribution(c)
    assert set(dist) == {"00", "01"}
    assert sum(dist.values()) == pytest.approx(1.0)


def test_size_limits():
    with pytest.raises(SimulationError):
        sim.unitary_of(Circuit(13, 0, ()))


def test_parity_identities_all_pass():
    checks = sim.check_parity_identities()
    assert len(checks) >= 12
    for chk in checks:
        assert chk.passed, chk.name
        assert chk.deviation <= 1e-12
