"""Deterministic circuit rendering: ascii art and plain SVG 1.1.

Both formats compute gate columns greedily (earliest column whose span is
free), draw barriers as full-height delimiters, closed controls as filled
dots and open controls as hollow circles. Rendering the same circuit twice
yields byte-identical output.
"""

from dataclasses import dataclass
from enum import Enum

from .circuit import Circuit, Gate, GateKind, Polarity


class DiagramFormat(Enum):
    ASCII = "ascii"
    SVG = "svg"


@dataclass(frozen=True)
class Diagram:
    format: DiagramFormat
    payload: str


def render(c: Circuit, format: DiagramFormat | str = DiagramFormat.ASCII) -> Diagram:
    format = DiagramFormat(format)
    if format is DiagramFormat.ASCII:
        return Diagram(format, _render_ascii(c))
    return Diagram(format, _render_svg(c))


def _columns(c: Circuit) -> list[tuple[int, Gate, int]]:
    """(column, gate, gate_index) with greedy span packing."""
    free = [0] * c.num_qubits
    out = []
    for k, gate in enumerate(c.gates):
        if gate.is_barrier:
            col = max(free) if free else 0
            out.append((col, gate, k))
            free = [col + 1] * c.num_qubits
            continue
        wires = gate.wires()
        lo, hi = min(wires), max(wires)
        col = max(free[w] for w in range(lo, hi + 1))
        out.append((col, gate, k))
        for w in range(lo, hi + 1):
            free[w] = col + 1
    return out


_BOX_LABEL = {GateKind.I: "I", GateKind.X: "X", GateKind.Y: "Y", GateKind.Z: "Z",
              GateKind.H: "H", GateKind.S: "S", GateKind.SDG: "S'"}


def _ascii_symbols(gate: Gate) -> dict[int, str]:
    """wire -> symbol for one gate column."""
    if gate.is_measure:
        return {gate.targets[0]: f"M{gate.bit}"}
    if gate.kind in _BOX_LABEL:
        return {gate.targets[0]: _BOX_LABEL[gate.kind]}
    if gate.kind is GateKind.SWAP:
        a, b = gate.targets
        return {a: "x", b: "x"}
    syms = {ctl.wire: ("o" if ctl.polarity is Polarity.OPEN else "*")
            for ctl in gate.controls}
    if gate.is_z_family:
        syms[gate.targets[0]] = "*"
    else:
        syms[gate.targets[0]] = "X"
    return syms


def _render_ascii(c: Circuit) -> str:
    placed = _columns(c)
    ncols = 1 + max((col for col, _, _ in placed), default=-1)
    cells = [["" for _ in range(ncols)] for _ in range(c.num_qubits)]
    vertical = [[False] * ncols for _ in range(c.num_qubits)]
    barrier_cols = set()
    for col, gate, _ in placed:
        if gate.is_barrier:
            barrier_cols.add(col)
            continue
        syms = _ascii_symbols(gate)
        for w, sym in syms.items():
            cells[w][col] = sym
        wires = gate.wires()
        for w in range(min(wires), max(wires)):
            vertical[w][col] = True  # segment between w and w+1

    widths = [max([3] + [len(cells[w][col]) + 2 for w in range(c.num_qubits)])
              for col in range(ncols)]
    prefix = len(f"q{c.num_qubits - 1}: ")
    lines = []
    for w in range(c.num_qubits - 1, -1, -1):
        line = f"q{w}: ".ljust(prefix)
        for col in range(ncols):
            width = widths[col]
            if col in barrier_cols:
                line += "|".center(width, "-")
            elif cells[w][col]:
                line += cells[w][col].center(width, "-")
            elif _crosses(vertical, w, col, c.num_qubits):
                line += "|".center(width, "-")
            else:
                line += "-" * width
        lines.append(line)
        if w > 0:
            conn = " " * prefix
            for col in range(ncols):
                width = widths[col]
                mark = "|" if (col in barrier_cols or vertical[w - 1][col]) else " "
                conn += mark.center(width)
            lines.append(conn.rstrip())
    return "\n".join(lines)


def _crosses(vertical, w, col, n) -> bool:
    """A multi-qubit gate's stem passes through wire w in this column."""
    above = w < n - 1 and vertical[w][col]
    below = w > 0 and vertical[w - 1][col]
    return above and below


_COL_W = 44
_ROW_H = 40
_LEFT = 56
_TOP = 24


def _render_svg(c: Circuit) -> str:
    placed = _columns(c)
    ncols = 1 + max((col for col, _, _ in placed), default=-1)
    width = _LEFT + ncols * _COL_W + 24
    height = _TOP + c.num_qubits * _ROW_H + 8

    def y_of(w: int) -> int:
        return _TOP + (c.num_qubits - 1 - w) * _ROW_H + _ROW_H // 2

    def x_of(col: int) -> int:
        return _LEFT + col * _COL_W + _COL_W // 2

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="monospace" font-size="13">',
        '<g class="wires" stroke="#444" stroke-width="1">',
    ]
    for w in range(c.num_qubits):
        y = y_of(w)
        parts.append(f'<line x1="{_LEFT - 30}" y1="{y}" x2="{width - 12}" y2="{y}"/>')
    parts.append("</g>")
    parts.append('<g class="labels" fill="#222">')
    for w in range(c.num_qubits):
        parts.append(f'<text x="8" y="{y_of(w) + 4}">q{w}</text>')
    parts.append("</g>")

    for col, gate, index in placed:
        x = x_of(col)
        body = []
        if gate.is_barrier:
            body.append(
                f'<line x1="{x}" y1="{_TOP - 10}" x2="{x}" '
                f'y2="{_TOP + c.num_qubits * _ROW_H - 6}" '
                'stroke="#999" stroke-width="2" stroke-dasharray="4,4"/>')
        else:
            wires = gate.wires()
            lo, hi = min(wires), max(wires)
            if hi > lo:
                body.append(f'<line x1="{x}" y1="{y_of(hi)}" x2="{x}" '
                            f'y2="{y_of(lo)}" stroke="#222" stroke-width="1.5"/>')
            for ctl in gate.controls:
                y = y_of(ctl.wire)
                if ctl.polarity is Polarity.OPEN:
                    body.append(f'<circle cx="{x}" cy="{y}" r="5" fill="#fff" '
                                'stroke="#222" stroke-width="1.5"/>')
                else:
                    body.append(f'<circle cx="{x}" cy="{y}" r="5" fill="#222"/>')
            if gate.is_measure:
                y = y_of(gate.targets[0])
                body.append(_svg_box(x, y, f"M{gate.bit}"))
            elif gate.kind is GateKind.SWAP:
                for t in gate.targets:
                    y = y_of(t)
                    body.append(f'<path d="M {x-6} {y-6} L {x+6} {y+6} '
                                f'M {x-6} {y+6} L {x+6} {y-6}" '
                                'stroke="#222" stroke-width="1.5" fill="none"/>')
            elif gate.is_z_family:
                y = y_of(gate.targets[0])
                body.append(f'<circle cx="{x}" cy="{y}" r="5" fill="#222"/>')
            elif gate.is_x_family and gate.controls:
                y = y_of(gate.targets[0])
                body.append(f'<circle cx="{x}" cy="{y}" r="10" fill="none" '
                            'stroke="#222" stroke-width="1.5"/>')
                body.append(f'<path d="M {x-10} {y} L {x+10} {y} M {x} {y-10} '
                            f'L {x} {y+10}" stroke="#222" stroke-width="1.5"/>')
            else:
                y = y_of(gate.targets[0])
                body.append(_svg_box(x, y, _BOX_LABEL[gate.kind]))
        parts.append(f'<g class="gate" data-index="{index}" '
                     f'data-kind="{gate.kind.value}">' + "".join(body) + "</g>")
    parts.append("</svg>")
    return "\n".join(parts)


def _svg_box(x: int, y: int, label: str) -> str:
    w = max(26, 10 + 8 * len(label))
    return (f'<rect x="{x - w // 2}" y="{y - 13}" width="{w}" height="26" '
            'fill="#fff" stroke="#222" stroke-width="1.5"/>'
            f'<text x="{x}" y="{y + 4}" text-anchor="middle" fill="#222">'
            f'{label}</text>')
