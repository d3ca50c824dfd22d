"""Builders and scripted derivations for the parity-oracle algorithms.

Three Bernstein-Vazirani builders produce the same computation in three
layouts: a classical conditional write, a phase-oracle form, and the
canonical Hadamard-sandwiched form. ``derive_bv_chain`` connects the first
to the last through six named waypoints, each reached by explicit rewrite
steps, every step certified against the simulator.

The Deutsch-Jozsa side builds a quadratic oracle marking four basis states
and reduces it: bit-flip blocks become phase blocks, the prepared ancilla
severs, an X gate pushes through the phase block spawning a CZ twist, the
CZ factors out past the remaining blocks, open-control resugaring exposes
the complete polarity family, and the family collapses to a single
unconditional Z. The irreducible oracle is ``CZ(0,1)`` with ``Z(2)``.

Wire convention: data wires 0..n-1, ancilla wire n. Measurement bit k
records data wire k, so a run prints the secret verbatim.
"""

from . import circuit as g
from .circuit import Circuit, Gate, GateKind
from .derivation import Derivation, DerivationBuilder
from .errors import CircuitError, RewriteError
from .normalize import slide_h_to_boundaries
from .rules import BarrierPolicy, Match, RuleId, find_matches


def _check_secret(secret: str) -> None:
    if not secret or set(secret) - {"0", "1"}:
        raise CircuitError(f"secret must be a nonempty 0/1 string, got {secret!r}")


def _one_wires(secret: str) -> list[int]:
    """Data wires carrying a 1 bit (wire k holds secret bit n-1-k)."""
    return [k for k, bit in enumerate(reversed(secret)) if bit == "1"]


def build_bv_classical(secret: str) -> Circuit:
    """Conditional-write form: the flipped ancilla copies the secret onto
    the data wires through plain CX gates."""
    _check_secret(secret)
    n = len(secret)
    gates = [g.barrier(), g.x(n), g.barrier()]
    gates += [g.cx(n, k) for k in _one_wires(secret)]
    gates += [g.barrier()]
    gates += [g.measure(k, k) for k in range(n)]
    return Circuit(n + 1, n, tuple(gates))


def build_bv_cz(secret: str) -> Circuit:
    """Phase-oracle form: data wires rotated around a CZ core."""
    _check_secret(secret)
    n = len(secret)
    gates = [g.barrier(), g.x(n), g.barrier()]
    gates += [g.h(k) for k in range(n)]
    gates += [g.barrier()]
    gates += [g.cz(n, k) for k in _one_wires(secret)]
    gates += [g.barrier()]
    gates += [g.h(k) for k in range(n)]
    gates += [g.barrier()]
    gates += [g.measure(k, k) for k in range(n)]
    return Circuit(n + 1, n, tuple(gates))


def build_bv_canonical(secret: str) -> Circuit:
    """Textbook form: global H layers around a CX oracle with phase
    kickback from the flipped ancilla."""
    _check_secret(secret)
    n = len(secret)
    gates = [g.barrier(), g.x(n), g.barrier()]
    gates += [g.h(k) for k in range(n + 1)]
    gates += [g.barrier()]
    gates += [g.cx(k, n) for k in _one_wires(secret)]
    gates += [g.barrier()]
    gates += [g.h(k) for k in range(n + 1)]
    gates += [g.barrier()]
    gates += [g.measure(k, k) for k in range(n)]
    return Circuit(n + 1, n, tuple(gates))


def _oracle_span(c: Circuit) -> tuple[int, int]:
    """Half-open gate range of the block between the 2nd and 3rd barrier."""
    bars = [i for i, gate in enumerate(c.gates) if gate.is_barrier]
    return bars[1] + 1, bars[2]


def _runs(c: Circuit, start: int, end: int) -> tuple[list[int], list[int], list[int]]:
    """Split an oracle block into (leading H wires, core indices, trailing
    H wires). The core is everything from the first non-H to the last."""
    k = start
    lead = []
    while k < end and c.gates[k].kind is GateKind.H:
        lead.append(c.gates[k].targets[0])
        k += 1
    core_start = k
    k = end
    trail = []
    while k > core_start and c.gates[k - 1].kind is GateKind.H:
        trail.append(c.gates[k - 1].targets[0])
        k -= 1
    trail.reverse()
    return lead, list(range(core_start, k)), trail


def derive_bv_chain(secret: str, verify: bool = True) -> Derivation:
    """Six-waypoint derivation from the classical write to the canonical
    form. Waypoints: classical-write, cz-oracle, h-at-boundaries,
    h-layers-complete, kickback-oracle, canonical."""
    _check_secret(secret)
    n = len(secret)
    anc = n
    builder = DerivationBuilder(build_bv_classical(secret))
    builder.mark("classical-write")

    # Each oracle CX becomes an H-conjugated CZ on its data wire.
    while True:
        candidates = [m for m in find_matches(builder.current, RuleId.CX_TO_HCZH)
                      if m.wires[0] == anc]
        if not candidates:
            break
        builder.apply(candidates[0])
    builder.mark("cz-oracle")

    # Slide the conjugating H gates to the oracle block boundaries.
    slide_h_to_boundaries(builder)
    builder.mark("h-at-boundaries")

    # Complete the rotation layers with inserted self-cancelling H pairs:
    # untouched data wires first, then the ancilla on both sides.
    ones = _one_wires(secret)
    zeros = [k for k in range(n) if k not in set(ones)]
    if ones:
        for z in zeros:
            start, end = _oracle_span(builder.current)
            lead, core, trail = _runs(builder.current, start, end)
            p1 = start + sum(1 for w in lead if w < z)
            p2 = start + len(lead) + len(core) + sum(1 for w in trail if w < z) + 1
            builder.apply(Match(RuleId.HH_CANCEL, (p1, p2), (z,), reverse=True))
        start, end = _oracle_span(builder.current)
        lead, core, trail = _runs(builder.current, start, end)
        builder.apply(Match(RuleId.HH_CANCEL,
                            (start + len(lead), start + len(lead) + 1), (anc,),
                            reverse=True))
        start, end = _oracle_span(builder.current)
        lead, core, trail = _runs(builder.current, start, end)
        core_end = start + len(lead) + len(core)
        builder.apply(Match(RuleId.HH_CANCEL,
                            (core_end, core_end + len(trail) + 1), (anc,),
                            reverse=True))
    else:
        # Empty oracle: build the two layers directly as straddling pairs.
        start, _ = _oracle_span(builder.current)
        for i, z in enumerate(zeros):
            builder.apply(Match(RuleId.HH_CANCEL,
                                (start + i, start + 2 * i + 1), (z,),
                                reverse=True))
        builder.apply(Match(RuleId.HH_CANCEL, (start + n, start + 2 * n + 1),
                            (anc,), reverse=True))
    builder.mark("h-layers-complete")

    # Rebuild each CZ as a CX onto the ancilla, flanked by ancilla H gates.
    while True:
        candidates = [m for m in find_matches(builder.current, RuleId.CZ_TO_HCXH)
                      if m.wires[1] == anc]
        if not candidates:
            break
        builder.apply(candidates[0])
    builder.mark("kickback-oracle")

    # Consolidate the ancilla H gates: cancel pairs anchored at the second
    # ancilla H so the outermost pair survives as the rotation layers.
    while True:
        anc_hs = [i for i, gate in enumerate(builder.current.gates)
                  if gate.kind is GateKind.H and gate.targets == (anc,)]
        candidates = [m for m in find_matches(builder.current, RuleId.HH_CANCEL)
                      if m.wires == (anc,) and len(anc_hs) > 2
                      and m.gate_indices[0] == anc_hs[1]]
        if not candidates:
            break
        builder.apply(candidates[0])
    start, _ = _oracle_span(builder.current)
    after_lead = start + n + 1
    after_core = after_lead + len(ones)
    builder.apply(Match(RuleId.BARRIER_INSERT, (after_lead,)))
    builder.apply(Match(RuleId.BARRIER_INSERT, (after_core + 1,)))
    builder.mark("canonical")

    if builder.current != build_bv_canonical(secret):
        raise RewriteError("derivation did not reach the canonical layout")
    return builder.derivation.verify() if verify else builder.derivation


# ---------------------------------------------------------------------------
# Deutsch-Jozsa: quadratic oracle and its reduction

#: Marked basis states (labels read wire 2, wire 1, wire 0). The block
#: order puts a singly-wrapped block first so the factored-out CZ crosses
#: it completely during the reduction.
DJ_MARKED = ("101", "011", "100", "110")


def _dj_block(label: str, open_controls: bool) -> tuple[Gate, ...]:
    zeros = [k for k in range(3) if label[2 - k] == "0"]
    if open_controls:
        controls = [(k, "open") if k in zeros else k for k in range(3)]
        return (g.mcx(controls, 3),)
    wraps = tuple(g.x(w) for w in zeros)
    return wraps + (g.mcx([0, 1, 2], 3),) + wraps


def build_dj_quadratic(marked: tuple[str, ...] = DJ_MARKED,
                       open_controls: bool = False) -> Circuit:
    """Bit-flip oracle on 3 data wires + ancilla: flips wire 3 exactly on
    the marked data states. The canonical marked set realizes
    f(q) = (q0 and q1) xor q2."""
    for label in marked:
        if len(label) != 3 or set(label) - {"0", "1"}:
            raise CircuitError(f"marked labels must be 3-bit strings, got {label!r}")
    if len(set(marked)) != len(marked):
        raise CircuitError("marked labels must be distinct")
    gates: tuple[Gate, ...] = ()
    for label in marked:
        gates += _dj_block(label, open_controls)
    return Circuit(4, 0, gates)


def build_dj_circuit(marked: tuple[str, ...] = DJ_MARKED) -> Circuit:
    """The oracle wrapped in the algorithm's rotation layers: ancilla
    flipped and rotated, data wires rotated before and after."""
    oracle = build_dj_quadratic(marked)
    gates = (g.x(3), g.h(0), g.h(1), g.h(2), g.h(3), g.barrier())
    gates += oracle.gates
    gates += (g.barrier(), g.h(0), g.h(1), g.h(2))
    return Circuit(4, 0, gates)


def build_dj_irreducible() -> Circuit:
    """The fully reduced 3-wire phase oracle: one CZ twist plus a local Z."""
    return Circuit(3, 0, (g.cz(0, 1), g.z(2)))


def between_barriers(c: Circuit) -> tuple[Gate, ...]:
    """Gates strictly between the first and last barrier."""
    bars = [i for i, gate in enumerate(c.gates) if gate.is_barrier]
    if len(bars) < 2:
        raise CircuitError("circuit has no barrier-delimited block")
    return c.gates[bars[0] + 1:bars[-1]]


def dj_reduced_oracle(derivation: Derivation) -> Circuit:
    """The 3-wire oracle extracted from the final reduction snapshot."""
    block = between_barriers(derivation.final())
    if any(max(gate.wires(), default=0) > 2 for gate in block):
        raise RewriteError("oracle block still touches the ancilla")
    return Circuit(3, 0, block)


def derive_dj_reduction(verify: bool = True) -> Derivation:
    """Scripted reduction of the canonical quadratic oracle. Waypoints:
    bit-flip-oracle, phase-oracle, ancilla-severed, pushed-through,
    polarity-form, irreducible."""
    builder = DerivationBuilder(build_dj_circuit(),
                                policy=BarrierPolicy.TRANSPARENT)
    builder.mark("bit-flip-oracle")

    # Every bit-flip block becomes an H-conjugated phase block, and the
    # ancilla H pairs (including the preparation H) cancel through.
    while True:
        candidates = find_matches(builder.current, RuleId.MCX_TO_HMCZH,
                                  builder.derivation.policy)
        if not candidates:
            break
        builder.apply(candidates[0])
    while True:
        candidates = [m for m in find_matches(builder.current, RuleId.HH_CANCEL,
                                              builder.derivation.policy)
                      if m.wires == (3,)]
        if not candidates:
            break
        builder.apply(candidates[0])
    builder.mark("phase-oracle")

    # The ancilla sits in |1> through every phase block: sever it, then
    # park the leftover rotation next to the preparation.
    for m in find_matches(builder.current, RuleId.ANCILLA_SEVER,
                          builder.derivation.policy):
        if m.wires == (3,):
            builder.apply(m)
    stray = next(i for i, gate in enumerate(builder.current.gates)
                 if gate.kind is GateKind.H and gate.targets == (3,))
    builder.apply(Match(RuleId.DISJOINT_COMMUTE, (stray, 1)))
    builder.mark("ancilla-severed")

    # Push the wrap X on wire 2 through its phase block (the pair cancels,
    # a CZ twist appears), then factor the CZ out to the block boundary;
    # crossing the wrapped block spawns two Z gates that cancel.
    m = next(m for m in find_matches(builder.current, RuleId.X_THROUGH_MCZ,
                                     builder.derivation.policy)
             if m.wires == (2,))
    builder.apply(m)
    m = next(m for m in find_matches(builder.current, RuleId.XX_CANCEL,
                                     builder.derivation.policy)
             if builder.current.gates[m.gate_indices[0]].targets == (2,))
    builder.apply(m)
    while True:
        cz_idx = next(i for i, gate in enumerate(builder.current.gates)
                      if gate.kind is GateKind.CZ)
        past = [m for m in find_matches(builder.current, RuleId.CZ_PAST_X,
                                        builder.derivation.policy)
                if m.gate_indices[1] == cz_idx]
        if past:
            builder.apply(past[0])
            continue
        prev = builder.current.gates[cz_idx - 1]
        if prev.is_diagonal and not prev.is_barrier:
            builder.apply(Match(RuleId.DIAGONAL_COMMUTE, (cz_idx, cz_idx - 1)))
            continue
        break
    while True:
        candidates = [m for m in find_matches(builder.current, RuleId.ZZ_CANCEL,
                                              builder.derivation.policy)
                      if builder.current.gates[m.gate_indices[0]].kind is GateKind.Z]
        if not candidates:
            break
        builder.apply(candidates[0])
    builder.mark("pushed-through")

    # Fold the remaining X wraps into open controls.
    while True:
        candidates = find_matches(builder.current, RuleId.OPEN_CONTROL_RESUGAR,
                                  builder.derivation.policy)
        if not candidates:
            break
        builder.apply(candidates[0])
    builder.mark("polarity-form")

    # The four blocks now cover every control pattern on wires 0 and 1:
    # merge the family down to an unconditional Z.
    while True:
        candidates = find_matches(builder.current, RuleId.MCZ_EXHAUSTION_MERGE,
                                  builder.derivation.policy)
        if not candidates:
            break
        builder.apply(candidates[0])
    builder.mark("irreducible")

    oracle = dj_reduced_oracle(builder.derivation)
    if oracle != build_dj_irreducible():
        raise RewriteError("reduction did not reach the irreducible oracle")
    return builder.derivation.verify() if verify else builder.derivation
