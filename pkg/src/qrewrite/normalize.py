"""Normalization strategies: repeated rule application to a fixpoint.

Three strategies:

* ``cancel-only`` removes self-cancelling pairs; gate count never grows.
* ``push-left`` additionally slides H gates outward to the boundaries of
  their barrier-delimited block (left when the start of the block is
  reachable, right when the wire is blocked on the left), so rotation
  layers become visible as sandwiches around the block core.
* ``full`` runs phased passes: open-control desugaring, basis-rotation
  collapse (including reverse-direction sites of the conjugation rules),
  X push-through across phase gates, polarity-pair merging, and a final
  cancellation plus earliest-slot reordering.

Every step is recorded in a Derivation; each phase's rule set strictly
decreases a measure (gate count, or X gates ahead of phase gates), and an
application budget of ``10 * len(gates)**2`` guards against a
misconfigured rule set.
"""

from enum import Enum

from .circuit import Circuit, GateKind
from .derivation import Derivation, DerivationBuilder
from .errors import RewriteBudgetError
from .rules import BarrierPolicy, Match, RuleId, find_matches


class Strategy(Enum):
    CANCEL_ONLY = "cancel-only"
    PUSH_LEFT = "push-left"
    FULL = "full"


_CANCEL_RULES = [(RuleId.HH_CANCEL, False), (RuleId.XX_CANCEL, False),
                 (RuleId.ZZ_CANCEL, False)]

_ROTATE_RULES = _CANCEL_RULES + [
    (RuleId.HXH_TO_Z, False), (RuleId.HZH_TO_X, False),
    (RuleId.CX_FULL_H_REVERSE, False),
    (RuleId.CX_TO_HCZH, True), (RuleId.CZ_TO_HCXH, True),
    (RuleId.MCX_TO_HMCZH, True), (RuleId.MCZ_TO_HMCXH, True),
]

_PUSH_RULES = [(RuleId.XX_CANCEL, False), (RuleId.ZZ_CANCEL, False),
               (RuleId.X_THROUGH_MCZ, False)]

_MERGE_RULES = [(RuleId.ZZ_CANCEL, False), (RuleId.MCZ_EXHAUSTION_MERGE, False)]


class _Budget:
    def __init__(self, c: Circuit):
        self.limit = 10 * max(4, len(c.gates)) ** 2
        self.used = 0

    def spend(self) -> None:
        self.used += 1
        if self.used > self.limit:
            raise RewriteBudgetError(
                f"normalization exceeded {self.limit} rule applications; "
                "the rule configuration does not terminate")


def normalize(c: Circuit, strategy: Strategy | str = Strategy.CANCEL_ONLY,
              policy: BarrierPolicy = BarrierPolicy.OPAQUE,
              ) -> tuple[Circuit, Derivation]:
    """Rewrite to the strategy's fixpoint; the Derivation records every step."""
    strategy = Strategy(strategy)
    builder = DerivationBuilder(c, policy)
    budget = _Budget(c)
    if strategy is Strategy.CANCEL_ONLY:
        _fixpoint(builder, _CANCEL_RULES, budget)
    elif strategy is Strategy.PUSH_LEFT:
        while True:
            changed = _fixpoint(builder, _CANCEL_RULES, budget)
            changed |= _boundary_slide_pass(builder, budget)
            if not changed:
                break
    else:
        builder.mark("input")
        _fixpoint(builder, [(RuleId.OPEN_CONTROL_DESUGAR, False)], budget)
        builder.mark("closed-controls")
        _fixpoint(builder, _ROTATE_RULES, budget)
        builder.mark("rotations-collapsed")
        _fixpoint(builder, _PUSH_RULES, budget)
        builder.mark("x-pushed-through")
        _fixpoint(builder, _MERGE_RULES, budget)
        builder.mark("phases-merged")
        _fixpoint(builder, _CANCEL_RULES, budget)
        _earliest_slot_pass(builder, budget)
        builder.mark("normalized")
    return builder.current, builder.derivation


def _fixpoint(builder: DerivationBuilder, rules, budget: _Budget) -> bool:
    changed = False
    while True:
        match = _first_match(builder.current, rules, builder.derivation.policy)
        if match is None:
            return changed
        budget.spend()
        builder.apply(match)
        changed = True


def _first_match(c: Circuit, rules, policy) -> Match | None:
    best = None
    for rule, rev in rules:
        found = find_matches(c, rule, policy, reverse=rev)
        if found and (best is None or found[0].gate_indices < best.gate_indices):
            best = found[0]
    return best


def slide_h_to_boundaries(builder: DerivationBuilder) -> bool:
    """One boundary-slide pass, recording moves into the builder."""
    return _boundary_slide_pass(builder, _Budget(builder.current))


# -- gate reordering passes --------------------------------------------------

def _blocks(c: Circuit) -> list[tuple[int, int]]:
    """Half-open index ranges between barriers."""
    out = []
    lo = 0
    for k, gate in enumerate(c.gates):
        if gate.is_barrier:
            if k > lo:
                out.append((lo, k))
            lo = k + 1
    if len(c.gates) > lo:
        out.append((lo, len(c.gates)))
    return out


def _boundary_slide_pass(builder: DerivationBuilder, budget: _Budget) -> bool:
    """Slide H gates to the boundaries of their block: left when nothing
    earlier in the block touches their wire, right when left-blocked but
    right-free. Everything else keeps its relative order."""
    c = builder.current

    def wire_of(k: int) -> int:
        return c.gates[k].targets[0]

    target: list[int] = []
    cursor = 0
    for lo, hi in _blocks(c):
        target.extend(range(cursor, lo))  # barriers between blocks
        left: list[int] = []
        mid: list[int] = []
        right: list[int] = []
        for k in range(lo, hi):
            gate = c.gates[k]
            if gate.kind is GateKind.H:
                w = gate.targets[0]
                blocked_left = any(w in c.gates[p].wires() for p in range(lo, k))
                blocked_right = any(w in c.gates[p].wires()
                                    for p in range(k + 1, hi))
                if not blocked_left:
                    left.append(k)
                    continue
                if not blocked_right:
                    right.append(k)
                    continue
            mid.append(k)
        target += sorted(left, key=wire_of) + mid + sorted(right, key=wire_of)
        cursor = hi
    target.extend(range(cursor, len(c.gates)))
    return _realize_order(builder, target, budget)


def _earliest_slot_pass(builder: DerivationBuilder, budget: _Budget) -> bool:
    """Stable-sort gates by their earliest schedulable slot (barriers fence)."""
    c = builder.current
    last = [0] * c.num_qubits
    floor = 0
    depth = []
    for gate in c.gates:
        if gate.is_barrier:
            d = 1 + max([floor] + last)
            floor = d
            last = [d] * c.num_qubits
        else:
            wires = gate.wires()
            d = 1 + max([floor] + [last[w] for w in wires])
            for w in wires:
                last[w] = d
        depth.append(d)
    order = sorted(range(len(c.gates)), key=lambda k: (depth[k], k))
    return _realize_order(builder, order, budget)


def _realize_order(builder: DerivationBuilder, target: list[int],
                   budget: _Budget) -> bool:
    """Apply commuting moves until the gate order matches ``target``, a
    permutation of current indices that preserves per-wire gate order (so
    every crossed pair is wire-disjoint)."""
    current = list(range(len(builder.current.gates)))
    changed = False
    for p, want in enumerate(target):
        q = current.index(want)
        if q == p:
            continue
        moved_wires = set(builder.current.gates[q].wires())
        crossed = builder.current.gates[p:q]
        rule = RuleId.DISJOINT_COMMUTE
        if any(moved_wires & set(g2.wires()) for g2 in crossed):
            rule = RuleId.DIAGONAL_COMMUTE
        budget.spend()
        builder.apply(Match(rule, (q, p)))
        current.insert(p, current.pop(q))
        changed = True
    return changed
