"""Clifford circuit rewriting and verification toolkit."""

__version__ = "0.1.0"

from .circuit import Circuit, Control, Gate, GateKind, Polarity  # noqa: F401
from .cqc import circuit_hash, emit_circuit, parse_circuit  # noqa: F401
from .derivation import Derivation, replay_trace  # noqa: F401
from .diagram import Diagram, DiagramFormat, render  # noqa: F401
from .normalize import Strategy, normalize  # noqa: F401
from .rules import (  # noqa: F401
    BarrierPolicy, Match, RuleId, RuleInfo, all_rule_info, apply_rule,
    apply_rule_traced, exhaustion_merge, find_matches, rule_semantics,
    sever_ancilla)
from .sim import (  # noqa: F401
    EquivalenceReport, StateVector, check_parity_identities,
    equivalent_up_to_phase, exact_distribution, sample, statevector_run,
    unitary_of)
from .tableau import Tableau, tableau_run  # noqa: F401
from .taxonomy import (  # noqa: F401
    FamilyVerdict, Frame, classify, conjugate_by_frame, entanglement_rank,
    is_classical)
