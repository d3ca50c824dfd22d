import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import qrewrite.circuit as g
from qrewrite.circuit import Circuit
from qrewrite.cqc import (circuit_hash, emit_circuit, parse_circuit,
                          parse_gate_line)
from qrewrite.errors import ParseError

from conftest import random_circuit

import numpy as np


def test_parse_single_gate():
    c = parse_circuit("qubits 1\nh q0")
    assert c == Circuit(1, 0, (g.h(0),))


def test_parse_cx():
    c = parse_circuit("qubits 2\ncx q0 q1")
    assert c == Circuit(2, 0, (g.cx(0, 1),))


def test_emit_single_gate():
    assert emit_circuit(Circuit(1, 0, (g.h(0),))) == "qubits 1\nh q0"


def test_emit_open_control_mcx():
    c = Circuit(3, 0, (g.mcx([(0, "open"), 1], 2),))
    assert emit_circuit(c) == "qubits 3\nmcx ~q0 q1 -> q2"


def test_open_control_cx_round_trips_through_mcx_syntax():
    c = parse_circuit("qubits 2\nmcx ~q0 -> q1")
    assert c.gates[0].kind.value == "cx"
    assert emit_circuit(c) == "qubits 2\nmcx ~q0 -> q1"


def test_mcz_collapses_to_cz_and_z():
    assert parse_circuit("qubits 2\nmcz q0 q1") == parse_circuit(
        "qubits 2\ncz q0 q1")
    two = parse_circuit("qubits 3\nmcz ~q0 q1")
    assert two.gates[0].kind.value == "cz"
    assert emit_circuit(two) == "qubits 3\nmcz ~q0 q1"


def test_comments_and_blank_lines_ignored():
    c = parse_circuit("# header\nqubits 2\n\nbits 1\nh q0  # rotate\n")
    assert c.num_bits == 1 and len(c.gates) == 1


def test_parse_error_carries_position():
    with pytest.raises(ParseError) as err:
        parse_circuit("qubits 1\nfoo q0")
    assert err.value.line == 2 and err.value.column == 1


def test_out_of_range_wire_reports_line():
    with pytest.raises(ParseError) as err:
        parse_circuit("qubits 1\nh q0\nh q3")
    assert err.value.line == 3


def test_gate_after_measure_reports_line():
    with pytest.raises(ParseError) as err:
        parse_circuit("qubits 1\nbits 1\nmeasure q0 -> c0\nh q0")
    assert err.value.line == 4


def test_measure_needs_bits_header():
    with pytest.raises(ParseError):
        parse_circuit("qubits 1\nmeasure q0 -> c0")


def test_parse_gate_line():
    assert parse_gate_line("cz q1 q0") == g.cz(0, 1)


def test_round_trip_is_canonical_fixpoint():
    source = "qubits 3\nbits 2\nmcz q2 q0 q1\ncx q1 q2\nbarrier\nmeasure q0 -> c1"
    once = emit_circuit(parse_circuit(source))
    assert emit_circuit(parse_circuit(once)) == once


def test_round_trip_random_circuits():
    rng = np.random.default_rng(7)
    for _ in range(60):
        c = random_circuit(rng, n=int(rng.integers(1, 6)),
                           depth=int(rng.integers(0, 20)),
                           barriers=True, measures=bool(rng.integers(2)))
        text = emit_circuit(c)
        assert parse_circuit(text) == c
        assert emit_circuit(parse_circuit(text)) == text


@st.composite
def circuits(draw):
    n = draw(st.integers(1, 5))
    gates = []
    for _ in range(draw(st.integers(0, 12))):
        wires = draw(st.permutations(range(n)))
        kind = draw(st.sampled_from(
            ["h", "x", "z", "s", "cx", "cz", "swap", "barrier"]))
        if kind == "barrier":
            gates.append(g.barrier())
        elif kind in ("cx", "cz", "swap"):
            if n < 2:
                continue
            gates.append(getattr(g, kind)(wires[0], wires[1]))
        else:
            gates.append(getattr(g, kind)(wires[0]))
    return Circuit(n, 0, tuple(gates))


@settings(max_examples=80, deadline=None)
@given(circuits())
def test_emit_parse_emit_fixpoint_property(c):
    text = emit_circuit(c)
    assert parse_circuit(text) == c
    assert emit_circuit(parse_circuit(text)) == text


def test_hash_stable_and_content_sensitive():
    a = parse_circuit("qubits 1\nh q0")
    b = parse_circuit("qubits 1\nx q0")
    assert circuit_hash(a) == circuit_hash(a)
    assert circuit_hash(a) != circuit_hash(b)
    assert len(circuit_hash(a)) == 12
