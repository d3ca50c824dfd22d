"""Identity catalogue and rewrite engine.

Rules are identities between a pattern and a replacement. Matching is
*wire-adjacent*: pattern gates must be consecutive on the wires they bind,
while unrelated gates may sit between them in the flat list. Cancellation
and merge rules on phase gates additionally tolerate diagonal gates inside
the span, which commute with the pattern.

Every rule can be applied in the reverse direction (``Match.reverse``), and
``apply_rule_traced`` returns the inverse match that undoes an application.
Two bookkeeping rules (BARRIER_INSERT/BARRIER_REMOVE) move the non-semantic
block delimiters so derivations can land exactly on a builder's layout.

All rules except ANCILLA_SEVER and CX_CONTROL_SAME_AS_X preserve the
circuit unitary up to global phase. Those two consume a known wire
preparation, so they are sound for circuits run from the all-zeros state
and their derivation steps are verified against statevectors instead of
unitaries.
"""

from dataclasses import dataclass, replace
from enum import Enum
from typing import Sequence

import numpy as np

from . import circuit as g
from .circuit import Circuit, Control, Gate, GateKind, Polarity
from .errors import (BarrierViolationError, CircuitError, RewriteError,
                     SeverPreconditionError, StaleMatchError)


class BarrierPolicy(Enum):
    OPAQUE = "opaque"            # matches never span a barrier
    TRANSPARENT = "transparent"  # barriers are invisible to matching


class RuleId(Enum):
    HH_CANCEL = "HH_CANCEL"
    XX_CANCEL = "XX_CANCEL"
    ZZ_CANCEL = "ZZ_CANCEL"
    HXH_TO_Z = "HXH_TO_Z"
    HZH_TO_X = "HZH_TO_X"
    CX_TO_HCZH = "CX_TO_HCZH"
    CZ_TO_HCXH = "CZ_TO_HCXH"
    CX_FULL_H_REVERSE = "CX_FULL_H_REVERSE"
    MCX_TO_HMCZH = "MCX_TO_HMCZH"
    MCZ_TO_HMCXH = "MCZ_TO_HMCXH"
    DISJOINT_COMMUTE = "DISJOINT_COMMUTE"
    DIAGONAL_COMMUTE = "DIAGONAL_COMMUTE"
    X_THROUGH_MCZ = "X_THROUGH_MCZ"
    CZ_PAST_X = "CZ_PAST_X"
    MCZ_EXHAUSTION_MERGE = "MCZ_EXHAUSTION_MERGE"
    OPEN_CONTROL_DESUGAR = "OPEN_CONTROL_DESUGAR"
    OPEN_CONTROL_RESUGAR = "OPEN_CONTROL_RESUGAR"
    ANCILLA_SEVER = "ANCILLA_SEVER"
    CX_CONTROL_SAME_AS_X = "CX_CONTROL_SAME_AS_X"
    BARRIER_INSERT = "BARRIER_INSERT"
    BARRIER_REMOVE = "BARRIER_REMOVE"


#: Rules whose soundness depends on the all-zeros input state.
STATE_DEPENDENT_RULES = {RuleId.ANCILLA_SEVER, RuleId.CX_CONTROL_SAME_AS_X}

#: Rules that neither touch the unitary nor the state (layout bookkeeping).
LAYOUT_RULES = {RuleId.BARRIER_INSERT, RuleId.BARRIER_REMOVE}


@dataclass(frozen=True)
class Match:
    """A concrete applicable site.

    ``gate_indices`` index into ``Circuit.gates``; for insertions they are
    the indices where the inserted gates land. ``wires`` bind the pattern's
    wire variables. ``variant`` disambiguates multi-mode rules and carries
    the payload for insertions that need one.
    """

    rule: RuleId
    gate_indices: tuple[int, ...]
    wires: tuple[int, ...] = ()
    reverse: bool = False
    variant: str = ""

    def describe(self) -> str:
        direction = " (reverse)" if self.reverse else ""
        return f"{self.rule.value} at {list(self.gate_indices)}{direction}"

    def to_json(self) -> dict:
        out = {"rule": self.rule.value, "at": list(self.gate_indices),
               "wires": list(self.wires)}
        if self.reverse:
            out["reverse"] = True
        if self.variant:
            out["variant"] = self.variant
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Match":
        return cls(RuleId(data["rule"]), tuple(data["at"]),
                   tuple(data.get("wires", ())), bool(data.get("reverse", False)),
                   data.get("variant", ""))


@dataclass(frozen=True)
class RuleInfo:
    rule: RuleId
    pattern: str
    replacement: str
    wires: str
    notes: str = ""

    def to_json(self) -> dict:
        return {"rule": self.rule.value, "pattern": self.pattern,
                "replacement": self.replacement, "wires": self.wires,
                "notes": self.notes}


_RULE_INFO = {
    RuleId.HH_CANCEL: RuleInfo(
        RuleId.HH_CANCEL, "H(w) H(w)", "(nothing)", "w",
        "reverse direction inserts the pair"),
    RuleId.XX_CANCEL: RuleInfo(
        RuleId.XX_CANCEL, "G G for identical X-family G", "(nothing)", "(site)",
        "covers X, CX, MCX self-inverse pairs"),
    RuleId.ZZ_CANCEL: RuleInfo(
        RuleId.ZZ_CANCEL, "G G for identical phase-family G", "(nothing)", "(site)",
        "covers Z, CZ, MCZ; diagonal gates may sit between"),
    RuleId.HXH_TO_Z: RuleInfo(RuleId.HXH_TO_Z, "H(w) X(w) H(w)", "Z(w)", "w"),
    RuleId.HZH_TO_X: RuleInfo(RuleId.HZH_TO_X, "H(w) Z(w) H(w)", "X(w)", "w"),
    RuleId.CX_TO_HCZH: RuleInfo(
        RuleId.CX_TO_HCZH, "CX(c->t)", "H(t) CZ(c,t) H(t)", "c, t"),
    RuleId.CZ_TO_HCXH: RuleInfo(
        RuleId.CZ_TO_HCXH, "CZ(c,t)", "H(t) CX(c->t) H(t)", "c, t",
        "two orientations per site"),
    RuleId.CX_FULL_H_REVERSE: RuleInfo(
        RuleId.CX_FULL_H_REVERSE, "H(c) H(t) CX(c->t) H(c) H(t)", "CX(t->c)",
        "c, t"),
    RuleId.MCX_TO_HMCZH: RuleInfo(
        RuleId.MCX_TO_HMCZH, "MCX(cs->t)", "H(t) MCZ(cs,t) H(t)", "t"),
    RuleId.MCZ_TO_HMCXH: RuleInfo(
        RuleId.MCZ_TO_HMCXH, "MCZ(ps)", "H(t) MCX(ps-t -> t) H(t)", "t",
        "t is any closed participant"),
    RuleId.DISJOINT_COMMUTE: RuleInfo(
        RuleId.DISJOINT_COMMUTE, "A B on disjoint wires", "B A", "(none)",
        "application may slide a gate across any disjoint span"),
    RuleId.DIAGONAL_COMMUTE: RuleInfo(
        RuleId.DIAGONAL_COMMUTE, "D1 D2 both diagonal", "D2 D1", "(none)"),
    RuleId.X_THROUGH_MCZ: RuleInfo(
        RuleId.X_THROUGH_MCZ, "X(a) MCZ(a,rest)", "MCZ(rest) MCZ(a,rest) X(a)",
        "a", "any participant arity >= 2"),
    RuleId.CZ_PAST_X: RuleInfo(
        RuleId.CZ_PAST_X, "X(b) CZ(b,c)", "CZ(b,c) Z(c) X(b)", "b, c"),
    RuleId.MCZ_EXHAUSTION_MERGE: RuleInfo(
        RuleId.MCZ_EXHAUSTION_MERGE,
        "MCZ pair equal except one participant's polarity",
        "MCZ without that wire", "w (the dropped wire)",
        "diagonal gates may sit between"),
    RuleId.OPEN_CONTROL_DESUGAR: RuleInfo(
        RuleId.OPEN_CONTROL_DESUGAR, "G with open control on w",
        "X(w) G[w closed] X(w)", "w"),
    RuleId.OPEN_CONTROL_RESUGAR: RuleInfo(
        RuleId.OPEN_CONTROL_RESUGAR, "X(w) G[w closed control] X(w)",
        "G with open control on w", "w"),
    RuleId.ANCILLA_SEVER: RuleInfo(
        RuleId.ANCILLA_SEVER, "gate participation of a prepared ancilla",
        "gate on the remaining wires", "a",
        "sound from the all-zeros input; see sever_ancilla"),
    RuleId.CX_CONTROL_SAME_AS_X: RuleInfo(
        RuleId.CX_CONTROL_SAME_AS_X, "X(c) CX(c->t) with c untouched before",
        "X(c) X(t)", "c, t", "sound from the all-zeros input"),
    RuleId.BARRIER_INSERT: RuleInfo(
        RuleId.BARRIER_INSERT, "(nothing)", "barrier", "(none)",
        "layout only; inverse of BARRIER_REMOVE"),
    RuleId.BARRIER_REMOVE: RuleInfo(
        RuleId.BARRIER_REMOVE, "barrier", "(nothing)", "(none)",
        "layout only; inverse of BARRIER_INSERT"),
}


def rule_semantics(rule: RuleId) -> RuleInfo:
    """Human-readable and machine-usable description of a rule."""
    return _RULE_INFO[rule]


def all_rule_info() -> list[RuleInfo]:
    return [_RULE_INFO[r] for r in RuleId]


# ---------------------------------------------------------------------------
# wire adjacency helpers

def _touches(gate: Gate, wires: set[int]) -> bool:
    return bool(set(gate.wires()) & wires)


def _scan(c: Circuit, start: int, wires: set[int], policy: BarrierPolicy,
          step: int) -> tuple[int | None, bool]:
    """Next index in the given direction whose gate touches ``wires``.
    Returns (index, blocked_by_barrier)."""
    j = start + step
    while 0 <= j < len(c.gates):
        gate = c.gates[j]
        if gate.is_barrier:
            if policy is BarrierPolicy.OPAQUE:
                return None, True
        elif _touches(gate, wires):
            return j, False
        j += step
    return None, False


def _next_on_wires(c, start, wires, policy) -> int | None:
    return _scan(c, start, wires, policy, +1)[0]


def _prev_on_wires(c, start, wires, policy) -> int | None:
    return _scan(c, start, wires, policy, -1)[0]


def _span_clear(c: Circuit, indices: Sequence[int], support: set[int],
                policy: BarrierPolicy, allow_diagonal: bool = False) -> bool:
    """No interior gate touches the support (diagonals optionally exempt);
    no barrier inside under the opaque policy."""
    chosen = set(indices)
    for j in range(min(indices) + 1, max(indices)):
        if j in chosen:
            continue
        gate = c.gates[j]
        if gate.is_barrier:
            if policy is BarrierPolicy.OPAQUE:
                return False
            continue
        if _touches(gate, support):
            if allow_diagonal and gate.is_diagonal:
                continue
            return False
    return True


def _is_kind(gate: Gate, kind: GateKind, wire: int) -> bool:
    return gate.kind is kind and gate.targets == (wire,) and not gate.controls


def _polarity_map(gate: Gate) -> dict[int, Polarity]:
    return {p.wire: p.polarity for p in gate.participants()}


def _zgate(participants: Sequence[Control]) -> Gate:
    return g.mcz(participants)


def _flip_participant(gate: Gate, wire: int) -> Gate:
    """Same gate with the polarity of participant/control ``wire`` flipped."""
    if gate.is_z_family:
        parts = [Control(p.wire,
                         (Polarity.OPEN if p.polarity is Polarity.CLOSED
                          else Polarity.CLOSED) if p.wire == wire else p.polarity)
                 for p in gate.participants()]
        return _zgate(parts)
    ctrls = [Control(ctl.wire,
                     (Polarity.OPEN if ctl.polarity is Polarity.CLOSED
                      else Polarity.CLOSED) if ctl.wire == wire else ctl.polarity)
             for ctl in gate.controls]
    return g.mcx(ctrls, gate.targets[0])


def _drop_participant(gate: Gate, wire: int) -> Gate:
    if gate.is_z_family:
        rest = [p for p in gate.participants() if p.wire != wire]
        try:
            return _zgate(rest)
        except CircuitError as exc:
            raise RewriteError(
                f"dropping q{wire} leaves no closed participant") from exc
    rest = [ctl for ctl in gate.controls if ctl.wire != wire]
    return g.mcx(rest, gate.targets[0])


# ---------------------------------------------------------------------------
# forward matchers

def _match_hh_cancel(c, policy):
    out = []
    for i, gate in enumerate(c.gates):
        if gate.kind is not GateKind.H:
            continue
        w = gate.targets[0]
        j = _next_on_wires(c, i, {w}, policy)
        if j is not None and _is_kind(c.gates[j], GateKind.H, w):
            out.append(Match(RuleId.HH_CANCEL, (i, j), (w,)))
    return out


def _match_identical_pair(c, policy, family_z):
    rule = RuleId.ZZ_CANCEL if family_z else RuleId.XX_CANCEL
    out = []
    for i, gate in enumerate(c.gates):
        if family_z != gate.is_z_family or not (gate.is_z_family or gate.is_x_family):
            continue
        if gate.kind is GateKind.I:
            continue
        support = set(gate.wires())
        j = i
        while True:
            j = _next_on_wires(c, j, support, policy)
            if j is None:
                break
            other = c.gates[j]
            if other == gate and _span_clear(c, (i, j), support, policy,
                                             allow_diagonal=family_z):
                out.append(Match(rule, (i, j)))
                break
            if family_z and other.is_diagonal:
                continue
            break
    return out


def _match_chain(c, policy, rule, kinds):
    out = []
    for i, gate in enumerate(c.gates):
        if not _is_kind(gate, kinds[0], gate.targets[0] if gate.targets else -1):
            continue
        w = gate.targets[0]
        indices = [i]
        ok = True
        for kind in kinds[1:]:
            j = _next_on_wires(c, indices[-1], {w}, policy)
            if j is None or not _is_kind(c.gates[j], kind, w):
                ok = False
                break
            indices.append(j)
        if ok:
            out.append(Match(rule, tuple(indices), (w,)))
    return out


def _match_single_gate(c, rule):
    out = []
    for i, gate in enumerate(c.gates):
        if rule is RuleId.CX_TO_HCZH and gate.kind is GateKind.CX:
            out.append(Match(rule, (i,), (gate.controls[0].wire, gate.targets[0])))
        elif rule is RuleId.MCX_TO_HMCZH and gate.kind is GateKind.MCX:
            out.append(Match(rule, (i,), (gate.targets[0],)))
        elif rule is RuleId.CZ_TO_HCXH and gate.kind is GateKind.CZ:
            for t in sorted(p.wire for p in gate.participants()
                            if p.polarity is Polarity.CLOSED):
                other = next(p.wire for p in gate.participants() if p.wire != t)
                out.append(Match(rule, (i,), (other, t)))
        elif rule is RuleId.MCZ_TO_HMCXH and gate.kind is GateKind.MCZ:
            for t in sorted(p.wire for p in gate.participants()
                            if p.polarity is Polarity.CLOSED):
                out.append(Match(rule, (i,), (t,)))
    return out


def _match_cx_full_h_reverse(c, policy):
    out = []
    for i, gate in enumerate(c.gates):
        if gate.kind is not GateKind.CX or gate.has_open_control():
            continue
        ctl, tgt = gate.controls[0].wire, gate.targets[0]
        around = (_prev_on_wires(c, i, {ctl}, policy),
                  _prev_on_wires(c, i, {tgt}, policy),
                  _next_on_wires(c, i, {ctl}, policy),
                  _next_on_wires(c, i, {tgt}, policy))
        if None in around:
            continue
        wires = (ctl, tgt, ctl, tgt)
        if not all(_is_kind(c.gates[k], GateKind.H, w)
                   for k, w in zip(around, wires)):
            continue
        indices = tuple(sorted(set(around) | {i}))
        if len(indices) == 5 and _span_clear(c, indices, {ctl, tgt}, policy):
            out.append(Match(RuleId.CX_FULL_H_REVERSE, indices, (ctl, tgt)))
    return out


def _match_commute(c, diagonal):
    out = []
    for i in range(len(c.gates) - 1):
        a, b = c.gates[i], c.gates[i + 1]
        if a.is_barrier or b.is_barrier or a.is_measure or b.is_measure:
            continue
        shared = set(a.wires()) & set(b.wires())
        if diagonal:
            if shared and a.is_diagonal and b.is_diagonal:
                out.append(Match(RuleId.DIAGONAL_COMMUTE, (i, i + 1)))
        elif not shared:
            out.append(Match(RuleId.DISJOINT_COMMUTE, (i, i + 1)))
    return out


def _match_x_through(c, policy, rule):
    out = []
    for i, gate in enumerate(c.gates):
        if not _is_kind(gate, GateKind.X, gate.targets[0] if gate.targets else -1):
            continue
        a = gate.targets[0]
        j = _next_on_wires(c, i, {a}, policy)
        if j is None:
            continue
        other = c.gates[j]
        if not other.is_z_family or len(other.participants()) < 2:
            continue
        if rule is RuleId.CZ_PAST_X and (other.kind is not GateKind.CZ
                                         or other.has_open_control()):
            continue
        rest = [p for p in other.participants() if p.wire != a]
        if not any(p.polarity is Polarity.CLOSED for p in rest):
            continue  # the residual phase gate would have no closed wire
        support = set(other.wires()) | {a}
        if not _span_clear(c, (i, j), support, policy):
            continue
        if rule is RuleId.CZ_PAST_X:
            partner = next(w for w in other.wires() if w != a)
            out.append(Match(rule, (i, j), (a, partner)))
        else:
            out.append(Match(rule, (i, j), (a,)))
    return out


def _match_exhaustion(c, policy):
    out = []
    for i, gate in enumerate(c.gates):
        if not gate.is_z_family:
            continue
        support = set(gate.wires())
        mine = _polarity_map(gate)
        j = i
        while True:
            j = _next_on_wires(c, j, support, policy)
            if j is None:
                break
            other = c.gates[j]
            if other.is_z_family and set(other.wires()) == support:
                diff = [w for w in mine if mine[w] is not _polarity_map(other)[w]]
                if len(diff) == 1 and _span_clear(c, (i, j), support, policy,
                                                  allow_diagonal=True):
                    out.append(Match(RuleId.MCZ_EXHAUSTION_MERGE, (i, j),
                                     (diff[0],)))
                break
            if other.is_diagonal:
                continue
            break
    return out


def _match_desugar(c):
    out = []
    for i, gate in enumerate(c.gates):
        for ctl in gate.controls:
            if ctl.polarity is Polarity.OPEN:
                out.append(Match(RuleId.OPEN_CONTROL_DESUGAR, (i,), (ctl.wire,)))
    return out


def _match_resugar(c, policy):
    out = []
    for i, gate in enumerate(c.gates):
        if not _is_kind(gate, GateKind.X, gate.targets[0] if gate.targets else -1):
            continue
        w = gate.targets[0]
        j = _next_on_wires(c, i, {w}, policy)
        if j is None:
            continue
        mid = c.gates[j]
        is_closed_ctl = any(ctl.wire == w and ctl.polarity is Polarity.CLOSED
                            for ctl in mid.controls)
        is_z_target = mid.is_z_family and w in mid.targets
        if not (is_closed_ctl or is_z_target):
            continue
        if mid.is_z_family:
            closed = [p for p in mid.participants()
                      if p.polarity is Polarity.CLOSED]
            if len(closed) < 2:
                continue  # the flipped gate would have no closed participant
        k = _next_on_wires(c, j, {w}, policy)
        if k is None or not _is_kind(c.gates[k], GateKind.X, w):
            continue
        out.append(Match(RuleId.OPEN_CONTROL_RESUGAR, (i, j, k), (w,)))
    return out


def _match_cx_control_same_as_x(c, policy):
    out = []
    for i, gate in enumerate(c.gates):
        if not _is_kind(gate, GateKind.X, gate.targets[0] if gate.targets else -1):
            continue
        w = gate.targets[0]
        if _prev_on_wires(c, i, {w}, BarrierPolicy.TRANSPARENT) is not None:
            continue  # the control wire must be pristine before the X
        j = _next_on_wires(c, i, {w}, policy)
        if j is None:
            continue
        nxt = c.gates[j]
        if (nxt.kind is GateKind.CX and not nxt.has_open_control()
                and nxt.controls[0].wire == w):
            out.append(Match(RuleId.CX_CONTROL_SAME_AS_X, (i, j),
                             (w, nxt.targets[0])))
    return out


def find_matches(c: Circuit, rule: RuleId,
                 policy: BarrierPolicy = BarrierPolicy.OPAQUE,
                 reverse: bool = False) -> list[Match]:
    """Complete list of applicable sites, ordered by ascending primary gate
    index, then wire bindings. Empty when the rule does not apply."""
    if reverse:
        out = _find_reverse(c, rule, policy)
    elif rule is RuleId.HH_CANCEL:
        out = _match_hh_cancel(c, policy)
    elif rule is RuleId.XX_CANCEL:
        out = _match_identical_pair(c, policy, family_z=False)
    elif rule is RuleId.ZZ_CANCEL:
        out = _match_identical_pair(c, policy, family_z=True)
    elif rule is RuleId.HXH_TO_Z:
        out = _match_chain(c, policy, rule, (GateKind.H, GateKind.X, GateKind.H))
    elif rule is RuleId.HZH_TO_X:
        out = _match_chain(c, policy, rule, (GateKind.H, GateKind.Z, GateKind.H))
    elif rule in (RuleId.CX_TO_HCZH, RuleId.CZ_TO_HCXH,
                  RuleId.MCX_TO_HMCZH, RuleId.MCZ_TO_HMCXH):
        out = _match_single_gate(c, rule)
    elif rule is RuleId.CX_FULL_H_REVERSE:
        out = _match_cx_full_h_reverse(c, policy)
    elif rule is RuleId.DISJOINT_COMMUTE:
        out = _match_commute(c, diagonal=False)
    elif rule is RuleId.DIAGONAL_COMMUTE:
        out = _match_commute(c, diagonal=True)
    elif rule in (RuleId.X_THROUGH_MCZ, RuleId.CZ_PAST_X):
        out = _match_x_through(c, policy, rule)
    elif rule is RuleId.MCZ_EXHAUSTION_MERGE:
        out = _match_exhaustion(c, policy)
    elif rule is RuleId.OPEN_CONTROL_DESUGAR:
        out = _match_desugar(c)
    elif rule is RuleId.OPEN_CONTROL_RESUGAR:
        out = _match_resugar(c, policy)
    elif rule is RuleId.ANCILLA_SEVER:
        out = _match_sever(c)
    elif rule is RuleId.CX_CONTROL_SAME_AS_X:
        out = _match_cx_control_same_as_x(c, policy)
    elif rule is RuleId.BARRIER_REMOVE:
        out = [Match(rule, (i,)) for i, gate in enumerate(c.gates)
               if gate.is_barrier]
    elif rule is RuleId.BARRIER_INSERT:
        out = []  # insertion points are chosen, not searched
    else:  # pragma: no cover - exhaustive
        raise RewriteError(f"no matcher for {rule}")
    return sorted(out, key=lambda m: (m.gate_indices, m.wires))


def _find_reverse(c: Circuit, rule: RuleId, policy: BarrierPolicy) -> list[Match]:
    """Reverse-direction sites for rules whose replacement is a findable
    pattern (used by the full normalization strategy)."""
    out = []
    if rule in (RuleId.CX_TO_HCZH, RuleId.MCX_TO_HMCZH):
        want = GateKind.CZ if rule is RuleId.CX_TO_HCZH else GateKind.MCZ
        for j, gate in enumerate(c.gates):
            if gate.kind is not want:
                continue
            for t in sorted(p.wire for p in gate.participants()
                            if p.polarity is Polarity.CLOSED):
                i = _prev_on_wires(c, j, {t}, policy)
                k = _next_on_wires(c, j, {t}, policy)
                if (i is not None and k is not None
                        and _is_kind(c.gates[i], GateKind.H, t)
                        and _is_kind(c.gates[k], GateKind.H, t)):
                    if rule is RuleId.CX_TO_HCZH:
                        other = next(p.wire for p in gate.participants()
                                     if p.wire != t)
                        out.append(Match(rule, (i, j, k), (other, t),
                                         reverse=True))
                    else:
                        out.append(Match(rule, (i, j, k), (t,), reverse=True))
    elif rule in (RuleId.CZ_TO_HCXH, RuleId.MCZ_TO_HMCXH):
        want = GateKind.CX if rule is RuleId.CZ_TO_HCXH else GateKind.MCX
        for j, gate in enumerate(c.gates):
            if gate.kind is not want:
                continue
            t = gate.targets[0]
            i = _prev_on_wires(c, j, {t}, policy)
            k = _next_on_wires(c, j, {t}, policy)
            if (i is not None and k is not None
                    and _is_kind(c.gates[i], GateKind.H, t)
                    and _is_kind(c.gates[k], GateKind.H, t)):
                if rule is RuleId.CZ_TO_HCXH:
                    out.append(Match(rule, (i, j, k),
                                     (gate.controls[0].wire, t), reverse=True))
                else:
                    out.append(Match(rule, (i, j, k), (t,), reverse=True))
    elif rule is RuleId.HXH_TO_Z:
        out = [Match(rule, (i,), (gate.targets[0],), reverse=True)
               for i, gate in enumerate(c.gates) if gate.kind is GateKind.Z]
    elif rule is RuleId.HZH_TO_X:
        out = [Match(rule, (i,), (gate.targets[0],), reverse=True)
               for i, gate in enumerate(c.gates)
               if _is_kind(gate, GateKind.X, gate.targets[0] if gate.targets else -1)]
    elif rule is RuleId.CX_FULL_H_REVERSE:
        out = [Match(rule, (i,),
                     (gate.targets[0], gate.controls[0].wire), reverse=True)
               for i, gate in enumerate(c.gates)
               if gate.kind is GateKind.CX and not gate.has_open_control()]
    elif rule in (RuleId.DISJOINT_COMMUTE, RuleId.DIAGONAL_COMMUTE):
        out = [replace(m, reverse=True) for m in find_matches(c, rule, policy)]
    elif rule is RuleId.OPEN_CONTROL_DESUGAR:
        out = [replace(m, rule=rule, reverse=True)
               for m in _match_resugar(c, policy)]
    elif rule is RuleId.OPEN_CONTROL_RESUGAR:
        out = [replace(m, rule=rule, reverse=True) for m in _match_desugar(c)]
    else:
        raise RewriteError(
            f"reverse sites of {rule.value} are constructed, not searched")
    return out


# ---------------------------------------------------------------------------
# application

def _stale(m: Match, why: str) -> StaleMatchError:
    return StaleMatchError(f"{m.describe()}: {why}")


def _gates_at(c: Circuit, m: Match) -> list[Gate]:
    try:
        return [c.gates[k] for k in m.gate_indices]
    except IndexError as exc:
        raise _stale(m, "index out of range") from exc


def _require_adjacent(c: Circuit, m: Match, indices: Sequence[int],
                      support: set[int], policy: BarrierPolicy,
                      allow_diagonal: bool = False) -> None:
    if len(indices) < 2:
        return
    if _span_clear(c, indices, support, policy, allow_diagonal):
        return
    if (policy is BarrierPolicy.OPAQUE
            and _span_clear(c, indices, support, BarrierPolicy.TRANSPARENT,
                            allow_diagonal)):
        raise BarrierViolationError(
            f"{m.describe()}: pattern spans a barrier under the opaque policy")
    raise _stale(m, "pattern gates are no longer wire-adjacent")


def _surgery(c: Circuit, remove: Sequence[int], insert_at: int,
             new_gates: Sequence[Gate]) -> tuple[Circuit, tuple[int, ...]]:
    """Remove indices, insert ``new_gates`` contiguously at the slot where
    index ``insert_at`` sat. Returns (circuit, landing indices)."""
    removed = set(remove)
    keep = [gate for k, gate in enumerate(c.gates) if k not in removed]
    pos = insert_at - sum(1 for r in removed if r < insert_at)
    gates = keep[:pos] + list(new_gates) + keep[pos:]
    return c.replace_gates(gates), tuple(range(pos, pos + len(new_gates)))


def _insert_landing(c: Circuit, landings: Sequence[tuple[int, Gate]]) -> Circuit:
    """Insert gates so that each lands at its stated final index."""
    gates = list(c.gates)
    for pos, gate in sorted(landings, key=lambda p: p[0]):
        if not 0 <= pos <= len(gates):
            raise RewriteError(f"insertion index {pos} out of range")
        gates.insert(pos, gate)
    return c.replace_gates(gates)


def _pair_gate_for_insert(m: Match) -> Gate:
    from .cqc import parse_gate_line

    if m.variant:
        return parse_gate_line(m.variant)
    if m.rule is RuleId.HH_CANCEL:
        return g.h(m.wires[0])
    if m.rule is RuleId.XX_CANCEL:
        return g.x(m.wires[0])
    return g.z(m.wires[0])


def apply_rule(c: Circuit, m: Match,
               policy: BarrierPolicy = BarrierPolicy.OPAQUE) -> Circuit:
    """Apply a rule at a match, revalidating it against the circuit."""
    return apply_rule_traced(c, m, policy)[0]


def apply_rule_traced(c: Circuit, m: Match,
                      policy: BarrierPolicy = BarrierPolicy.OPAQUE,
                      ) -> tuple[Circuit, Match]:
    """Apply a rule and also return the inverse match that undoes it."""
    rule = m.rule
    if rule in (RuleId.HH_CANCEL, RuleId.XX_CANCEL, RuleId.ZZ_CANCEL):
        return _apply_cancel(c, m, policy)
    if rule in (RuleId.HXH_TO_Z, RuleId.HZH_TO_X):
        return _apply_conjugation_chain(c, m, policy)
    if rule in (RuleId.CX_TO_HCZH, RuleId.CZ_TO_HCXH,
                RuleId.MCX_TO_HMCZH, RuleId.MCZ_TO_HMCXH):
        return _apply_basis_swap(c, m, policy)
    if rule is RuleId.CX_FULL_H_REVERSE:
        return _apply_cx_full_reverse(c, m, policy)
    if rule in (RuleId.DISJOINT_COMMUTE, RuleId.DIAGONAL_COMMUTE):
        return _apply_move(c, m, policy)
    if rule in (RuleId.X_THROUGH_MCZ, RuleId.CZ_PAST_X):
        return _apply_x_through(c, m, policy)
    if rule is RuleId.MCZ_EXHAUSTION_MERGE:
        return _apply_exhaustion(c, m, policy)
    if rule in (RuleId.OPEN_CONTROL_DESUGAR, RuleId.OPEN_CONTROL_RESUGAR):
        return _apply_polarity_sugar(c, m, policy)
    if rule is RuleId.ANCILLA_SEVER:
        return _apply_sever_step(c, m)
    if rule is RuleId.CX_CONTROL_SAME_AS_X:
        return _apply_cx_control_same_as_x(c, m, policy)
    if rule is RuleId.BARRIER_INSERT:
        new = _insert_landing(c, [(m.gate_indices[0], g.barrier())])
        return new, Match(RuleId.BARRIER_REMOVE, m.gate_indices)
    if rule is RuleId.BARRIER_REMOVE:
        if not _gates_at(c, m)[0].is_barrier:
            raise _stale(m, "no barrier at index")
        new, _ = _surgery(c, m.gate_indices, m.gate_indices[0], [])
        return new, Match(RuleId.BARRIER_INSERT, m.gate_indices)
    raise RewriteError(f"no applier for {rule}")  # pragma: no cover


def _apply_cancel(c, m, policy):
    if m.reverse:  # insertion of a self-cancelling pair
        if len(m.gate_indices) != 2:
            raise _stale(m, "pair insertion needs two landing indices")
        gate = _pair_gate_for_insert(m)
        p1, p2 = m.gate_indices
        new = _insert_landing(c, [(p1, gate), (p2, gate)])
        _require_adjacent(new, m, (p1, p2), set(gate.wires()), policy,
                          allow_diagonal=m.rule is RuleId.ZZ_CANCEL)
        return new, replace(m, reverse=False)
    i, j = m.gate_indices
    a, b = _gates_at(c, m)
    if a != b:
        raise _stale(m, "gates are not identical")
    if m.rule is RuleId.HH_CANCEL and a.kind is not GateKind.H:
        raise _stale(m, "not a pair of H gates")
    if m.rule is RuleId.XX_CANCEL and not a.is_x_family:
        raise _stale(m, "not an X-family pair")
    if m.rule is RuleId.ZZ_CANCEL and not a.is_z_family:
        raise _stale(m, "not a phase-family pair")
    _require_adjacent(c, m, (i, j), set(a.wires()), policy,
                      allow_diagonal=m.rule is RuleId.ZZ_CANCEL)
    from .cqc import emit_gate
    new, _ = _surgery(c, (i, j), i, [])
    inverse = Match(m.rule, (i, j), m.wires, reverse=True,
                    variant=emit_gate(a))
    return new, inverse


def _apply_conjugation_chain(c, m, policy):
    w = m.wires[0]
    inner_kind = GateKind.X if m.rule is RuleId.HXH_TO_Z else GateKind.Z
    result_kind = GateKind.Z if m.rule is RuleId.HXH_TO_Z else GateKind.X
    if m.reverse:
        (i,) = m.gate_indices
        if not _is_kind(_gates_at(c, m)[0], result_kind, w):
            raise _stale(m, f"expected {result_kind.value} q{w}")
        new, landed = _surgery(c, (i,), i,
                               [g.h(w), Gate(inner_kind, (), (w,)), g.h(w)])
        return new, Match(m.rule, landed, (w,))
    i, j, k = m.gate_indices
    gates = _gates_at(c, m)
    if not (_is_kind(gates[0], GateKind.H, w) and _is_kind(gates[1], inner_kind, w)
            and _is_kind(gates[2], GateKind.H, w)):
        raise _stale(m, "chain gates changed")
    _require_adjacent(c, m, (i, j, k), {w}, policy)
    new, landed = _surgery(c, (i, j, k), j, [Gate(result_kind, (), (w,))])
    return new, Match(m.rule, landed, (w,), reverse=True)


def _basis_swap_replacement(rule, m, gate):
    """(pattern gate at the site) -> list of replacement gates."""
    if rule is RuleId.CX_TO_HCZH:
        ctl, t = gate.controls[0], gate.targets[0]
        return [g.h(t), g.mcz([ctl, Control(t)]), g.h(t)]
    if rule is RuleId.MCX_TO_HMCZH:
        t = gate.targets[0]
        return [g.h(t), g.mcz(tuple(gate.controls) + (Control(t),)), g.h(t)]
    if rule is RuleId.CZ_TO_HCXH:
        t = m.wires[1]
        other = next(p for p in gate.participants() if p.wire != t)
        return [g.h(t), g.mcx([other], t), g.h(t)]
    # MCZ_TO_HMCXH
    t = m.wires[0]
    others = [p for p in gate.participants() if p.wire != t]
    return [g.h(t), g.mcx(others, t), g.h(t)]


def _apply_basis_swap(c, m, policy):
    rule = m.rule
    if not m.reverse:
        (i,) = m.gate_indices
        gate = _gates_at(c, m)[0]
        want = {RuleId.CX_TO_HCZH: GateKind.CX, RuleId.CZ_TO_HCXH: GateKind.CZ,
                RuleId.MCX_TO_HMCZH: GateKind.MCX,
                RuleId.MCZ_TO_HMCXH: GateKind.MCZ}[rule]
        if gate.kind is not want:
            raise _stale(m, f"expected {want.value}")
        t = m.wires[-1] if rule in (RuleId.CX_TO_HCZH, RuleId.CZ_TO_HCXH) \
            else m.wires[0]
        if rule in (RuleId.CZ_TO_HCXH, RuleId.MCZ_TO_HMCXH):
            pol = _polarity_map(gate).get(t)
            if pol is not Polarity.CLOSED:
                raise _stale(m, f"q{t} is not a closed participant")
        new, landed = _surgery(c, (i,), i, _basis_swap_replacement(rule, m, gate))
        return new, Match(rule, landed, m.wires, reverse=True)
    # Reverse: H(t) G H(t) collapses back to the unconjugated gate.
    i, j, k = m.gate_indices
    gates = _gates_at(c, m)
    t = m.wires[-1] if rule in (RuleId.CX_TO_HCZH, RuleId.CZ_TO_HCXH) else m.wires[0]
    if not (_is_kind(gates[0], GateKind.H, t) and _is_kind(gates[2], GateKind.H, t)):
        raise _stale(m, "flanking H gates changed")
    mid = gates[1]
    _require_adjacent(c, m, (i, j), {t}, policy)
    _require_adjacent(c, m, (j, k), {t}, policy)
    if rule is RuleId.CX_TO_HCZH:
        if mid.kind is not GateKind.CZ:
            raise _stale(m, "expected cz between the H gates")
        other = next(p for p in mid.participants() if p.wire != t)
        repl = g.mcx([other], t)
    elif rule is RuleId.MCX_TO_HMCZH:
        if mid.kind is not GateKind.MCZ:
            raise _stale(m, "expected mcz between the H gates")
        others = [p for p in mid.participants() if p.wire != t]
        repl = g.mcx(others, t)
    elif rule is RuleId.CZ_TO_HCXH:
        if mid.kind is not GateKind.CX or mid.targets[0] != t:
            raise _stale(m, "expected cx targeting the conjugated wire")
        repl = g.mcz(tuple(mid.controls) + (Control(t),))
    else:  # MCZ_TO_HMCXH reverse
        if mid.kind is not GateKind.MCX or mid.targets[0] != t:
            raise _stale(m, "expected mcx targeting the conjugated wire")
        repl = g.mcz(tuple(mid.controls) + (Control(t),))
    new, landed = _surgery(c, (i, j, k), j, [repl])
    return new, Match(rule, landed, m.wires)


def _apply_cx_full_reverse(c, m, policy):
    if m.reverse:
        (i,) = m.gate_indices
        gate = _gates_at(c, m)[0]
        if gate.kind is not GateKind.CX or gate.has_open_control():
            raise _stale(m, "expected a closed-control cx")
        u, v = gate.controls[0].wire, gate.targets[0]
        lo, hi = sorted((u, v))
        new, landed = _surgery(c, (i,), i,
                               [g.h(lo), g.h(hi), g.cx(v, u), g.h(lo), g.h(hi)])
        return new, Match(m.rule, landed, (v, u))
    if m not in find_matches(c, RuleId.CX_FULL_H_REVERSE, policy):
        fallback = [x for x in find_matches(
            c, RuleId.CX_FULL_H_REVERSE, BarrierPolicy.TRANSPARENT)
            if x.gate_indices == m.gate_indices]
        if fallback and policy is BarrierPolicy.OPAQUE:
            raise BarrierViolationError(
                f"{m.describe()}: pattern spans a barrier under the opaque policy")
        raise _stale(m, "pattern no longer present")
    cx_index = m.gate_indices[2]
    ctl, tgt = m.wires
    new, landed = _surgery(c, m.gate_indices, cx_index, [g.cx(tgt, ctl)])
    return new, Match(m.rule, landed, (ctl, tgt), reverse=True)


def _apply_move(c, m, policy):
    i, j = m.gate_indices
    if i == j:
        raise _stale(m, "move needs two distinct positions")
    moved = _gates_at(c, m)[0]
    if moved.is_barrier or moved.is_measure:
        raise _stale(m, "barriers and measurements do not commute")
    crossed = c.gates[j:i] if j < i else c.gates[i + 1:j + 1]
    for other in crossed:
        if other.is_barrier:
            if policy is BarrierPolicy.OPAQUE:
                raise BarrierViolationError(
                    f"{m.describe()}: move crosses a barrier under the opaque policy")
            continue
        disjoint = not (set(moved.wires()) & set(other.wires()))
        if m.rule is RuleId.DISJOINT_COMMUTE:
            if not disjoint:
                raise _stale(m, "crossed gate shares a wire")
        else:
            if not disjoint and not (moved.is_diagonal and other.is_diagonal):
                raise _stale(m, "crossed gate does not commute")
    gates = list(c.gates)
    gates.pop(i)
    gates.insert(j, moved)
    return c.replace_gates(gates), Match(m.rule, (j, i))


def _apply_x_through(c, m, policy):
    # The spawned residual gate precedes the phase gate for the generic
    # push-through; the two-wire CZ form spawns its Z after the CZ. The
    # orders are interchangeable (diagonals commute) but fixed per rule.
    a = m.wires[0]
    past_x = m.rule is RuleId.CZ_PAST_X
    if not m.reverse:
        i, j = m.gate_indices
        xg, zg = _gates_at(c, m)
        if not _is_kind(xg, GateKind.X, a) or not zg.is_z_family \
                or a not in zg.wires():
            raise _stale(m, "pattern gates changed")
        if past_x and zg.kind is not GateKind.CZ:
            raise _stale(m, "expected a cz")
        support = set(zg.wires()) | {a}
        _require_adjacent(c, m, (i, j), support, policy)
        rest = _drop_participant(zg, a)
        repl = [zg, rest, g.x(a)] if past_x else [rest, zg, g.x(a)]
        new, landed = _surgery(c, (i, j), i, repl)
        return new, Match(m.rule, landed, m.wires, reverse=True)
    p, q, r = m.gate_indices
    first, second, xg = _gates_at(c, m)
    zg, rest = (first, second) if past_x else (second, first)
    if not _is_kind(xg, GateKind.X, a) or not zg.is_z_family \
            or a not in zg.wires() or rest != _drop_participant(zg, a):
        raise _stale(m, "pattern gates changed")
    support = set(zg.wires()) | {a}
    _require_adjacent(c, m, (p, q, r), support, policy)
    new, landed = _surgery(c, (p, q, r), p, [g.x(a), zg])
    return new, Match(m.rule, landed, m.wires)


def _apply_exhaustion(c, m, policy):
    w = m.wires[0]
    if m.reverse:  # split one phase gate into the two polarity variants
        (i,) = m.gate_indices
        gate = _gates_at(c, m)[0]
        if not gate.is_z_family:
            raise _stale(m, "expected a phase gate")
        pol = Polarity(m.variant) if m.variant else Polarity.CLOSED
        first = g.mcz(tuple(gate.participants()) + (Control(w, pol),))
        other_pol = Polarity.OPEN if pol is Polarity.CLOSED else Polarity.CLOSED
        second = g.mcz(tuple(gate.participants()) + (Control(w, other_pol),))
        new, landed = _surgery(c, (i,), i, [first, second])
        return new, Match(m.rule, landed, (w,))
    i, j = m.gate_indices
    first, second = _gates_at(c, m)
    if not (first.is_z_family and second.is_z_family):
        raise RewriteError(f"{m.describe()}: not phase gates")
    if set(first.wires()) != set(second.wires()):
        raise RewriteError(f"{m.describe()}: different support, not mergeable")
    mine, theirs = _polarity_map(first), _polarity_map(second)
    diff = [wd for wd in mine if mine[wd] is not theirs[wd]]
    if diff != [w]:
        raise RewriteError(
            f"{m.describe()}: polarities must differ exactly at q{w}, not mergeable")
    _require_adjacent(c, m, (i, j), set(first.wires()), policy,
                      allow_diagonal=True)
    merged = _drop_participant(first, w)
    new, landed = _surgery(c, (i, j), i, [merged])
    return new, Match(m.rule, landed, (w,), reverse=True,
                      variant=mine[w].value)


def _apply_polarity_sugar(c, m, policy):
    w = m.wires[0]
    resugaring = (m.rule is RuleId.OPEN_CONTROL_RESUGAR) != m.reverse
    if resugaring:
        i, j, k = m.gate_indices
        xa, mid, xb = _gates_at(c, m)
        if not (_is_kind(xa, GateKind.X, w) and _is_kind(xb, GateKind.X, w)):
            raise _stale(m, "flanking X gates changed")
        pol = _polarity_map(mid).get(w)
        if pol is not Polarity.CLOSED:
            raise _stale(m, f"q{w} is not a closed control/participant")
        if mid.is_z_family and w in mid.targets:
            pass  # canonical target counts as a closed participant
        elif not any(ctl.wire == w for ctl in mid.controls):
            raise _stale(m, f"q{w} is not a control of the wrapped gate")
        _require_adjacent(c, m, (i, j), {w}, policy)
        _require_adjacent(c, m, (j, k), {w}, policy)
        flipped = _flip_participant(mid, w)
        new, landed = _surgery(c, (i, j, k), j, [flipped])
        return new, replace(m, gate_indices=landed, reverse=not m.reverse)
    (i,) = m.gate_indices
    gate = _gates_at(c, m)[0]
    if not any(ctl.wire == w and ctl.polarity is Polarity.OPEN
               for ctl in gate.controls):
        raise _stale(m, f"q{w} is not an open control")
    closed = _flip_participant(gate, w)
    new, landed = _surgery(c, (i,), i, [g.x(w), closed, g.x(w)])
    return new, replace(m, gate_indices=landed, reverse=not m.reverse)


def _apply_sever_step(c, m):
    (i,) = m.gate_indices
    a = m.wires[0]
    gate = _gates_at(c, m)[0]
    mode, _, detail = m.variant.partition(":")
    if not m.reverse:
        if mode == "drop-participant":
            if a not in gate.wires():
                raise _stale(m, f"q{a} does not participate")
            pol = _polarity_map(gate)[a].value if gate.is_z_family else \
                next(ctl.polarity.value for ctl in gate.controls if ctl.wire == a)
            new, landed = _surgery(c, (i,), i, [_drop_participant(gate, a)])
            return new, Match(m.rule, landed, (a,), reverse=True,
                              variant=f"drop-participant:{pol}")
        if mode == "kickback":
            if gate.kind not in (GateKind.CX, GateKind.MCX) or gate.targets != (a,):
                raise _stale(m, f"expected a bit-flip gate targeting q{a}")
            new, landed = _surgery(c, (i,), i,
                                   [g.mcz(tuple(gate.controls))])
            return new, Match(m.rule, landed, (a,), reverse=True,
                              variant="kickback")
        if mode == "vanish":
            from .cqc import emit_gate
            payload = emit_gate(gate)
            new, _ = _surgery(c, (i,), i, [])
            return new, Match(m.rule, (i,), (a,), reverse=True,
                              variant=f"vanish:{payload}")
        raise RewriteError(f"unknown sever variant {m.variant!r}")
    # Reverse: reattach the ancilla.
    if mode == "drop-participant":
        pol = Polarity(detail) if detail else Polarity.CLOSED
        if gate.is_z_family:
            restored = g.mcz(tuple(gate.participants()) + (Control(a, pol),))
        else:
            restored = g.mcx(tuple(gate.controls) + (Control(a, pol),),
                             gate.targets[0])
        new, landed = _surgery(c, (i,), i, [restored])
        return new, Match(m.rule, landed, (a,), variant="drop-participant")
    if mode == "kickback":
        if not gate.is_z_family:
            raise _stale(m, "expected a phase gate to reattach to")
        restored = g.mcx(tuple(gate.participants()), a)
        new, landed = _surgery(c, (i,), i, [restored])
        return new, Match(m.rule, landed, (a,), variant="kickback")
    if mode == "vanish":
        from .cqc import parse_gate_line
        new = _insert_landing(c, [(i, parse_gate_line(detail))])
        return new, Match(m.rule, (i,), (a,), variant="vanish")
    raise RewriteError(f"unknown sever variant {m.variant!r}")


def _apply_cx_control_same_as_x(c, m, policy):
    cw, t = m.wires
    i, j = m.gate_indices
    xg, second = _gates_at(c, m)
    if not _is_kind(xg, GateKind.X, cw):
        raise _stale(m, "preparation X changed")
    if _prev_on_wires(c, i, {cw}, BarrierPolicy.TRANSPARENT) is not None:
        raise _stale(m, "control wire is not pristine before the X")
    if not m.reverse:
        if (second.kind is not GateKind.CX or second.has_open_control()
                or second.controls[0].wire != cw or second.targets != (t,)):
            raise _stale(m, "expected cx from the prepared control")
        _require_adjacent(c, m, (i, j), {cw}, policy)
        new, landed = _surgery(c, (j,), j, [g.x(t)])
        return new, Match(m.rule, (i, landed[0]), m.wires, reverse=True)
    if not _is_kind(second, GateKind.X, t):
        raise _stale(m, "expected the written X")
    _require_adjacent(c, m, (i, j), {cw}, policy)
    new, landed = _surgery(c, (j,), j, [g.cx(cw, t)])
    return new, Match(m.rule, (i, landed[0]), m.wires)


# ---------------------------------------------------------------------------
# ancilla severing (whole-wire analysis)

_SEVER_STATES = {
    (1, 0): "zero", (0, 1): "one",
}


def _prep_state(c: Circuit, prefix: list[Gate]) -> str | None:
    """Classify the state a 1-qubit prep prefix leaves the wire in.
    Returns 'zero' | 'one' | 'plus' | 'minus' | None."""
    from .sim import MATRICES_1Q

    vec = np.array([1.0, 0.0], dtype=complex)
    for gate in prefix:
        if gate.kind not in MATRICES_1Q:
            return None
        vec = MATRICES_1Q[gate.kind] @ vec
    for name, ref in (("zero", (1, 0)), ("one", (0, 1)),
                      ("plus", (1 / np.sqrt(2), 1 / np.sqrt(2))),
                      ("minus", (1 / np.sqrt(2), -1 / np.sqrt(2)))):
        ref = np.array(ref, dtype=complex)
        if abs(abs(np.vdot(ref, vec)) - 1.0) < 1e-9:
            return name
    return None


def _sever_plan(c: Circuit, a: int) -> list[tuple[int, str]]:
    """Plan of (gate index, variant) severing steps for ancilla wire a.
    Raises SeverPreconditionError when severing would be unsound."""
    occs = [(k, gate) for k, gate in enumerate(c.gates)
            if not gate.is_barrier and a in gate.wires()]
    if not occs:
        return []
    prep_kinds = (GateKind.I, GateKind.X, GateKind.Y, GateKind.H)
    prefix: list[Gate] = []
    first_other = 0
    for k, gate in occs:
        if gate.wires() == (a,) and gate.kind in prep_kinds:
            prefix.append(gate)
            first_other += 1
        else:
            break
    state = _prep_state(c, prefix)
    rest = occs[first_other:]
    if not rest:
        return []  # wire only carries its preparation

    def classify(gate: Gate) -> str | None:
        """Severing variant for this occurrence, or None if foreign."""
        if state in ("zero", "one"):
            fires_on = Polarity.CLOSED if state == "one" else Polarity.OPEN
            if gate.is_z_family:
                # A never-firing phase gate is the identity on reachable
                # states and disappears outright.
                return "drop-participant" if _polarity_map(gate)[a] is fires_on \
                    else "vanish"
            if gate.is_x_family and any(ctl.wire == a for ctl in gate.controls):
                pol = next(ctl.polarity for ctl in gate.controls if ctl.wire == a)
                return "drop-participant" if pol is fires_on else "vanish"
            return None
        if state in ("plus", "minus"):
            if gate.is_x_family and gate.targets == (a,):
                return "kickback" if state == "minus" else "vanish"
            return None
        return None

    plan: list[tuple[int, str]] = []
    tail = False
    for k, gate in rest:
        variant = classify(gate)
        if variant is None:
            tail = True
            continue
        if tail:
            raise SeverPreconditionError(
                f"q{a} is touched by a foreign gate between participations; "
                "refusing an unsound rewrite")
        if variant == "drop-participant" and gate.is_z_family:
            closed = [p for p in gate.participants()
                      if p.polarity is Polarity.CLOSED and p.wire != a]
            if not closed:
                raise SeverPreconditionError(
                    f"severing q{a} from '{gate}' leaves no closed participant")
        plan.append((k, variant))
    if plan and state is None:
        raise SeverPreconditionError(
            f"q{a} preparation is not a control-basis eigenstate")
    return plan


def _match_sever(c: Circuit) -> list[Match]:
    out = []
    for a in range(c.num_qubits):
        try:
            plan = _sever_plan(c, a)
        except SeverPreconditionError:
            continue
        out.extend(Match(RuleId.ANCILLA_SEVER, (k,), (a,), variant=variant)
                   for k, variant in plan)
    return out


def sever_ancilla(c: Circuit, ancilla: int) -> Circuit:
    """Remove every phase/control participation of a prepared ancilla wire,
    keeping each gate on its remaining wires and the preparation intact.

    The wire must be prepared in an eigenstate of the basis in which it
    participates: |1> (or |0> with open controls) for phase-type
    participations, |-> for bit-flip gates targeting the wire. Anything
    else raises SeverPreconditionError rather than producing an unsound
    rewrite.
    """
    if not 0 <= ancilla < c.num_qubits:
        raise CircuitError(f"wire q{ancilla} out of range")
    plan = _sever_plan(c, ancilla)
    out = c
    for k, variant in sorted(plan, reverse=True):
        out = apply_rule(out, Match(RuleId.ANCILLA_SEVER, (k,), (ancilla,),
                                    variant=variant))
    return out


# ---------------------------------------------------------------------------
# exhaustion merging

def exhaustion_merge(c: Circuit, group: Sequence[int],
                     policy: BarrierPolicy = BarrierPolicy.OPAQUE) -> Circuit:
    """Merge a complete polarity family of phase gates.

    ``group`` lists gate indices of phase gates over one support whose
    polarity patterns pair off; merging repeats until a single gate
    remains (a full 2^k family over k controls collapses to one Z).
    """
    positions = sorted(set(group))
    if len(positions) < 2:
        raise RewriteError("merge needs at least two gates")
    current = c
    while len(positions) > 1:
        merged_one = False
        for pi in range(len(positions)):
            for qi in range(pi + 1, len(positions)):
                i, j = positions[pi], positions[qi]
                first, second = current.gates[i], current.gates[j]
                if not (first.is_z_family and second.is_z_family):
                    raise RewriteError(f"gate {i} or {j} is not a phase gate")
                if set(first.wires()) != set(second.wires()):
                    continue
                mine, theirs = _polarity_map(first), _polarity_map(second)
                diff = [w for w in mine if mine[w] is not theirs[w]]
                if len(diff) != 1:
                    continue
                m = Match(RuleId.MCZ_EXHAUSTION_MERGE, (i, j), (diff[0],))
                try:
                    current = apply_rule(current, m, policy)
                except RewriteError:
                    continue
                new_positions = []
                for r in positions:
                    if r == j:
                        continue
                    new_positions.append(r if r < j else r - 1)
                positions = new_positions
                merged_one = True
                break
            if merged_one:
                break
        if not merged_one:
            raise RewriteError(
                "gates not mergeable: need equal support and a single "
                "polarity difference (identical gates cancel via ZZ_CANCEL)")
    return current
