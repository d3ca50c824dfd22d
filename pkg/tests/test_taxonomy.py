import numpy as np
import pytest

import qrewrite.circuit as g
from qrewrite.circuit import Circuit
from qrewrite.errors import SimulationError
from qrewrite.normalize import Strategy, normalize
from qrewrite.taxonomy import (Frame, check_verdict, classify,
                               conjugate_by_frame, entanglement_rank,
                               is_classical)
from qrewrite.algorithms import (build_bv_canonical, build_bv_classical,
                                 build_bv_cz)

from conftest import random_circuit


def test_is_classical_accepts_bitflip_networks():
    c = Circuit(3, 0, (g.x(0), g.cx(0, 1), g.ccx(0, 1, 2), g.swap(0, 2)))
    assert is_classical(c)


def test_is_classical_rejects_rotations_and_phases():
    assert not is_classical(Circuit(1, 0, (g.h(0),)))
    assert not is_classical(Circuit(2, 0, (g.cz(0, 1),)))


def test_conjugate_identity_frame_is_noop():
    c = Circuit(2, 0, (g.cx(0, 1),))
    assert conjugate_by_frame(c, Frame.all_z(2)) == c


def test_conjugate_wraps_x_wires():
    c = Circuit(2, 0, (g.z(0),))
    out = conjugate_by_frame(c, Frame(("X", "Z")))
    assert out == Circuit(2, 0, (g.h(0), g.z(0), g.h(0)))
    reduced, _ = normalize(out, Strategy.FULL)
    assert reduced == Circuit(2, 0, (g.x(0),))


def test_conjugate_keeps_measures_terminal():
    c = Circuit(1, 1, (g.h(0), g.measure(0, 0)))
    out = conjugate_by_frame(c, Frame.all_x(1))
    assert out.gates[-1].is_measure


def test_frame_involution_up_to_cancellation(rng):
    for _ in range(20):
        n = int(rng.integers(1, 5))
        c = random_circuit(rng, n, int(rng.integers(0, 10)))
        frame = Frame.from_mask(int(rng.integers(0, 2 ** n)), n)
        twice = conjugate_by_frame(conjugate_by_frame(c, frame), frame)
        lhs, _ = normalize(twice, Strategy.CANCEL_ONLY)
        rhs, _ = normalize(c, Strategy.CANCEL_ONLY)
        assert lhs == rhs


def test_classify_classical_network_family_i():
    c = Circuit(3, 0, (g.cx(0, 1), g.x(0), g.ccx(0, 1, 2)))
    verdict = classify(c)
    assert verdict.family == "I" and verdict.confirmed
    assert check_verdict(c, verdict)


def test_classify_family_i_after_cancellation():
    c = Circuit(1, 0, (g.h(0), g.h(0), g.x(0)))
    assert classify(c).family == "I"


def test_bv_canonical_is_family_ii_with_all_x_frame():
    for secret in ("1", "10", "101"):
        c = build_bv_canonical(secret)
        verdict = classify(c)
        assert verdict.family == "II"
        assert verdict.frame == Frame.all_x(len(secret) + 1)
        assert is_classical(verdict.reduced)
        assert check_verdict(c, verdict)


def test_bv_variants_classify():
    assert classify(build_bv_classical("101")).family == "I"
    assert classify(build_bv_cz("10")).family == "II"


def test_bell_prep_is_family_iii_with_rank_witness():
    bell = Circuit(2, 0, (g.h(0), g.cx(0, 1)))
    verdict = classify(bell)
    assert verdict.family == "III" and verdict.confirmed
    assert verdict.rank == 1 and verdict.cut is not None
    assert check_verdict(bell, verdict)


def test_ghz_prep_is_family_iii():
    ghz = Circuit(3, 0, (g.h(0), g.cx(0, 1), g.cx(0, 2)))
    verdict = classify(ghz)
    assert verdict.family == "III" and verdict.rank == 1
    assert check_verdict(ghz, verdict)


def test_s_gate_lands_in_family_iii_by_exhaustion():
    verdict = classify(Circuit(1, 0, (g.s(0),)))
    assert verdict.family == "III" and verdict.confirmed
    assert verdict.rank is None


def test_wide_circuit_beyond_exhaustive_search_is_unconfirmed():
    # 17 wires exceeds the exhaustive frame search; the greedy fallback
    # fails on an entangler and the verdict is honestly unconfirmed.
    c = Circuit(17, 0, (g.h(0), g.cx(0, 1)))
    verdict = classify(c)
    assert verdict.family == "III"
    assert not verdict.confirmed
    assert verdict.rank == 1  # the bounded witness scan still finds the cut


def test_family_i_composition_stays_family_i(rng):
    def classical(seed):
        r = np.random.default_rng(seed)
        gates = []
        for _ in range(6):
            kind = r.integers(3)
            wires = [int(w) for w in r.permutation(3)]
            gates.append([g.x(wires[0]), g.cx(wires[0], wires[1]),
                          g.ccx(wires[0], wires[1], wires[2])][kind])
        return Circuit(3, 0, tuple(gates))

    for seed in range(5):
        a, b = classical(seed), classical(seed + 100)
        combined = Circuit(3, 0, a.gates + b.gates)
        assert classify(combined).family == "I"


def test_family_ii_rank_zero_on_all_basis_inputs():
    # Semantic soundness: II verdicts never hide basis-state entanglement.
    for secret in ("1", "10", "011"):
        c = build_bv_canonical(secret)
        verdict = classify(c)
        assert verdict.family == "II"
        n = c.num_qubits
        for value in range(2 ** n):
            basis = format(value, f"0{n}b")
            for wire in range(n):
                assert entanglement_rank(c, basis, (wire,)) == 0


def test_entanglement_rank_examples():
    bell = Circuit(2, 0, (g.h(0), g.cx(0, 1)))
    assert entanglement_rank(bell, "00", (0,)) == 1
    ghz = Circuit(3, 0, (g.h(0), g.cx(0, 1), g.cx(0, 2)))
    assert entanglement_rank(ghz, "000", (0,)) == 1
    classical = Circuit(3, 0, (g.x(0), g.cx(0, 1)))
    for basis in ("000", "101", "111"):
        for wire in range(3):
            assert entanglement_rank(classical, basis, (wire,)) == 0


def test_entanglement_rank_rejects_non_clifford():
    c = Circuit(3, 0, (g.ccx(0, 1, 2),))
    with pytest.raises(SimulationError):
        entanglement_rank(c, "000", (0,))


def test_verdict_json_shape():
    verdict = classify(Circuit(2, 0, (g.h(0), g.cx(0, 1))))
    payload = verdict.to_json()
    assert payload["family"] == "III"
    assert payload["confirmed"] is True
    assert "input" in payload and "cut" in payload and "rank" in payload
