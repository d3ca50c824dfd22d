import xml.etree.ElementTree as ET

import qrewrite.circuit as g
from qrewrite.circuit import Circuit
from qrewrite.diagram import render
from qrewrite.algorithms import build_bv_canonical


def test_single_wire_h_box():
    out = render(Circuit(1, 0, (g.h(0),))).payload
    assert "q0:" in out and "H" in out


def test_rendering_is_deterministic():
    c = build_bv_canonical("101")
    assert render(c).payload == render(c).payload
    assert render(c, "svg").payload == render(c, "svg").payload


def test_bv_canonical_shows_layers_and_measures():
    out = render(build_bv_canonical("101")).payload
    lines = out.splitlines()
    wire_lines = [ln for ln in lines if ln.startswith("q")]
    assert len(wire_lines) == 4
    assert out.count("H") == 8  # two full layers on 4 wires
    assert "M0" in out and "M2" in out


def test_barrier_is_full_height():
    c = Circuit(3, 0, (g.h(0), g.barrier(), g.h(2)))
    out = render(c).payload
    barrier_col = None
    for line in out.splitlines():
        if line.startswith("q"):
            assert "|" in line
    # every wire line carries the barrier mark in the same column
    wire_lines = [ln for ln in out.splitlines() if ln.startswith("q")]
    cols = [ln.index("|") for ln in wire_lines]
    assert len(set(cols)) == 1


def test_open_control_rendered_hollow():
    c = Circuit(2, 0, (g.cx((0, "open"), 1),))
    out = render(c).payload
    assert "o" in out and "X" in out


def test_svg_is_well_formed_with_one_group_per_gate():
    c = Circuit(3, 0, (g.h(0), g.mcz([0, 1, 2]), g.barrier(),
                       g.swap(1, 2)))
    payload = render(c, "svg").payload
    root = ET.fromstring(payload)
    ns = "{http://www.w3.org/2000/svg}"
    groups = [el for el in root.iter(f"{ns}g")
              if el.attrib.get("class") == "gate"]
    assert len(groups) == len(c.gates)
    assert [el.attrib["data-index"] for el in groups] == ["0", "1", "2", "3"]


def test_svg_marks_open_controls_hollow():
    c = Circuit(2, 0, (g.cx((0, "open"), 1),))
    payload = render(c, "svg").payload
    assert 'fill="#fff"' in payload  # hollow circle for the open control
