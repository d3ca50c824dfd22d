import numpy as np
import pytest

import qrewrite.circuit as g
from qrewrite import sim
from qrewrite.circuit import Circuit, GateKind
from qrewrite.cqc import emit_circuit, parse_circuit
from qrewrite.errors import CircuitError
from qrewrite.algorithms import (DJ_MARKED, between_barriers,
                                 build_bv_canonical, build_bv_classical,
                                 build_bv_cz, build_dj_circuit,
                                 build_dj_irreducible, build_dj_quadratic,
                                 derive_bv_chain, derive_dj_reduction,
                                 dj_reduced_oracle)


def marked_truth(label):
    """f(q) = (q0 and q1) xor q2 for a 3-bit label read q2 q1 q0."""
    q2, q1, q0 = (int(ch) for ch in label)
    return (q0 & q1) ^ q2


def test_bv_classical_structure_for_single_bit():
    c = build_bv_classical("1")
    assert [str(x) for x in c.gates] == [
        "barrier", "x q1", "barrier", "cx q1 q0", "barrier",
        "measure q0 -> c0"]


def test_bv_classical_zero_secret_writes_nothing():
    c = build_bv_classical("0")
    assert all(gate.kind is not GateKind.CX for gate in c.gates)


def test_bv_classical_cx_targets_for_reference_secret():
    c = build_bv_classical("10110011")
    targets = sorted(gate.targets[0] for gate in c.gates
                     if gate.kind is GateKind.CX)
    assert targets == [0, 1, 4, 5, 7]


def test_bv_cz_structure_for_single_bit():
    c = build_bv_cz("1")
    assert [str(x) for x in c.gates] == [
        "barrier", "x q1", "barrier", "h q0", "barrier", "cz q0 q1",
        "barrier", "h q0", "barrier", "measure q0 -> c0"]


def test_bv_canonical_controls_for_101():
    c = build_bv_canonical("101")
    controls = sorted(gate.controls[0].wire for gate in c.gates
                      if gate.kind is GateKind.CX)
    assert controls == [0, 2]
    assert all(gate.targets == (3,) for gate in c.gates
               if gate.kind is GateKind.CX)


def test_all_builders_sample_the_secret():
    secret = "10110011"
    for build in (build_bv_classical, build_bv_cz, build_bv_canonical):
        counts = sim.sample(build(secret), 1024, seed=5)
        assert counts == {secret: 1024}, build.__name__


def test_zero_secret_samples_zeros():
    counts = sim.sample(build_bv_cz("000"), 256, seed=0)
    assert counts == {"000": 256}


def test_builders_pairwise_equivalent(rng):
    for _ in range(6):
        n = int(rng.integers(1, 7))
        secret = "".join(str(int(b)) for b in rng.integers(0, 2, n))
        circuits = [build(secret).without_measurements() for build in
                    (build_bv_classical, build_bv_cz, build_bv_canonical)]
        for a, b in zip(circuits, circuits[1:]):
            assert sim.equivalent_up_to_phase(a, b).equivalent, secret


def test_builders_agree_at_ten_bit_boundary():
    secret = "1011001101"
    circuits = [build(secret).without_measurements() for build in
                (build_bv_classical, build_bv_cz, build_bv_canonical)]
    for a, b in zip(circuits, circuits[1:]):
        assert sim.equivalent_up_to_phase(a, b).equivalent
    for build in (build_bv_classical, build_bv_cz, build_bv_canonical):
        assert sim.sample(build(secret), 128, seed=2) == {secret: 128}


def test_secret_validation():
    with pytest.raises(CircuitError):
        build_bv_classical("")
    with pytest.raises(CircuitError):
        build_bv_classical("10a")


def test_parse_matches_builder_for_reference_secret():
    source = emit_circuit(build_bv_classical("10110011"))
    assert parse_circuit(source) == build_bv_classical("10110011")


def test_derive_bv_chain_has_six_waypoints():
    derivation = derive_bv_chain("101")
    labels = [label for label, _ in derivation.marked_snapshots()]
    assert labels == ["classical-write", "cz-oracle", "h-at-boundaries",
                      "h-layers-complete", "kickback-oracle", "canonical"]


def test_derive_bv_chain_reaches_canonical_builder():
    for secret in ("1", "0", "110", "0101"):
        derivation = derive_bv_chain(secret)
        assert derivation.final() == build_bv_canonical(secret)
        assert derivation.all_verified()
        assert derivation.replay()


def test_bv_waypoints_equivalent_to_classical_form():
    secret = "101"
    derivation = derive_bv_chain(secret)
    base = build_bv_classical(secret).without_measurements()
    for _, snapshot in derivation.marked_snapshots():
        report = sim.equivalent_up_to_phase(base,
                                            snapshot.without_measurements())
        assert report.equivalent


def test_bv_fourth_waypoint_has_full_h_layer():
    for secret in ("101", "0011"):
        derivation = derive_bv_chain(secret, verify=False)
        snapshot = dict(derivation.marked_snapshots())["h-layers-complete"]
        n = len(secret)
        run = []
        seen_barriers = 0
        for gate in snapshot.gates:
            if gate.is_barrier:
                seen_barriers += 1
                continue
            if seen_barriers == 2:
                if gate.kind is not GateKind.H:
                    break
                run.append(gate.targets[0])
        assert run[:n + 1] == list(range(n + 1))


def test_derive_bv_chain_is_deterministic():
    a = derive_bv_chain("1011", verify=False)
    b = derive_bv_chain("1011", verify=False)
    assert [s.match for s in a.steps] == [s.match for s in b.steps]


def test_kickback_waypoint_h_pairs_consolidate_on_the_ancilla():
    # The consolidation sites sit on the ancilla line; the only other
    # wire-adjacent H pairs are the zero-bit layer pairs, which the
    # consolidation never touches.
    from qrewrite.rules import RuleId, find_matches

    derivation = derive_bv_chain("101", verify=False)
    snapshot = dict(derivation.marked_snapshots())["kickback-oracle"]
    anc = 3
    matches = find_matches(snapshot, RuleId.HH_CANCEL)
    ancilla_sites = [m for m in matches if m.wires == (anc,)]
    assert len(ancilla_sites) >= 3  # one cancellation per oracle gate + 1
    zero_wires = {1}
    assert all(m.wires == (anc,) or set(m.wires) <= zero_wires
               for m in matches)


# -- Deutsch-Jozsa -------------------------------------------------------------

def test_dj_marked_set_matches_phase_polynomial():
    assert sorted(DJ_MARKED) == ["011", "100", "101", "110"]
    for value in range(8):
        label = format(value, "03b")
        assert marked_truth(label) == (label in DJ_MARKED)


def test_dj_quadratic_truth_table():
    oracle = build_dj_quadratic()
    for value in range(8):
        label = format(value, "03b")
        state = sim.statevector_run(oracle, "0" + label)
        expected = ("1" if marked_truth(label) else "0") + label
        assert state.probability(expected) == pytest.approx(1.0), label


def test_dj_open_control_form_equivalent():
    closed = build_dj_quadratic()
    open_form = build_dj_quadratic(open_controls=True)
    assert sim.equivalent_up_to_phase(closed, open_form).equivalent


def test_dj_minus_ancilla_kicks_phase():
    oracle = build_dj_quadratic()
    prep = (g.x(3), g.h(3))
    for value in range(8):
        label = format(value, "03b")
        with_oracle = Circuit(4, 0, prep + oracle.gates)
        without = Circuit(4, 0, prep)
        a = sim.statevector_run(with_oracle, "0" + label).amplitudes
        b = sim.statevector_run(without, "0" + label).amplitudes
        sign = -1 if marked_truth(label) else 1
        assert np.allclose(a, sign * b, atol=1e-12)


def test_dj_irreducible_emit():
    assert emit_circuit(build_dj_irreducible()) == "qubits 3\ncz q0 q1\nz q2"


def test_derive_dj_reduction_reaches_irreducible_oracle():
    derivation = derive_dj_reduction()
    assert dj_reduced_oracle(derivation) == build_dj_irreducible()
    assert derivation.all_verified()
    assert derivation.replay()


def test_dj_severed_waypoint_keeps_oracle_on_data_wires():
    derivation = derive_dj_reduction(verify=False)
    snapshot = dict(derivation.marked_snapshots())["ancilla-severed"]
    for gate in between_barriers(snapshot):
        assert max(gate.wires()) <= 2


def test_dj_reduction_deterministic():
    a = derive_dj_reduction(verify=False)
    b = derive_dj_reduction(verify=False)
    assert [s.match for s in a.steps] == [s.match for s in b.steps]


def test_dj_reduction_trace_replays():
    from qrewrite.derivation import replay_trace

    derivation = derive_dj_reduction(verify=False)
    replayed = replay_trace(derivation.to_trace())
    assert replayed.final() == derivation.final()
    assert replayed.marks == derivation.marks


def test_dj_oracle_unitary_is_cz_tensor_z():
    oracle = dj_reduced_oracle(derive_dj_reduction(verify=False))
    u = sim.unitary_of(oracle)
    cz = np.diag([1, 1, 1, -1])
    z = np.diag([1, -1])
    expected = np.kron(z, cz)  # wire 2 is the most significant factor
    assert np.max(np.abs(u - expected)) <= 1e-12


def test_dj_reduction_entanglement_profile():
    from qrewrite.taxonomy import entanglement_rank

    oracle = dj_reduced_oracle(derive_dj_reduction(verify=False))
    sandwich = Circuit(3, 0, (g.h(0), g.h(1), g.h(2)) + oracle.gates
                       + (g.h(0), g.h(1), g.h(2)))
    assert entanglement_rank(sandwich, "000", (0,)) == 1
    assert entanglement_rank(sandwich, "000", (2,)) == 0


def test_dj_full_circuit_classifies_family_iii():
    from qrewrite.taxonomy import classify

    verdict = classify(build_dj_circuit())
    assert verdict.family == "III"
