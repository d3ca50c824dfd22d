"""JSON-over-HTTP session service backing the interactive explorer.

Each session holds a circuit, its snapshot history, and a derivation of
applied matches. Mutating requests carry the session revision and are
rejected with 409 on mismatch, so a stale UI can never apply against the
wrong snapshot. Operations within a session are serialized by a lock;
different sessions are fully independent.

Every apply is verified on the spot (equivalence badge) up to the dense
simulation limit; larger circuits get an honest "unverified (size)" badge.
"""

import threading
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException, Query, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from . import sim, taxonomy
from .circuit import Circuit
from .cli import circuit_to_json
from .cqc import parse_circuit
from .derivation import UNITARY_TOL, _verify_pair
from .diagram import render
from .errors import QrewriteError
from .rules import (BarrierPolicy, Match, RuleId, all_rule_info, apply_rule,
                    find_matches)


class CreateSessionRequest(BaseModel):
    source: str
    policy: str = "opaque"


class ApplyRequest(BaseModel):
    rule: str
    at: list[int]
    wires: list[int] = []
    reverse: bool = False
    variant: str = ""
    revision: int


@dataclass
class Session:
    id: str
    policy: BarrierPolicy
    snapshots: list[Circuit]
    matches_applied: list[Match] = field(default_factory=list)
    badges: list[str] = field(default_factory=lambda: ["initial"])
    revision: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def current(self) -> Circuit:
        return self.snapshots[-1]

    def summary(self) -> dict:
        return {
            "id": self.id,
            "revision": self.revision,
            "policy": self.policy.value,
            "history_length": len(self.snapshots),
            "badge": self.badges[-1],
            "circuit": circuit_to_json(self.current),
        }


def _badge_for(before: Circuit, after: Circuit, match: Match) -> str:
    if before.num_qubits > sim.MAX_UNITARY_QUBITS:
        return "unverified (size)"
    mode, _, _ = _verify_pair(before, after, match, UNITARY_TOL)
    if mode == "failed":
        return "NOT EQUIVALENT"
    if mode == "layout":
        return "verified (layout)"
    return "verified" if mode == "unitary" else "verified (state)"


def create_app() -> FastAPI:
    app = FastAPI(title="qrewrite session service")
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()

    def get_session(session_id: str) -> Session:
        with registry_lock:
            session = sessions.get(session_id)
        if session is None:
            raise HTTPException(404, f"no session {session_id}")
        return session

    @app.exception_handler(QrewriteError)
    async def _domain_error(request, exc: QrewriteError):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.get("/rules")
    def rules():
        return [info.to_json() for info in all_rule_info()]

    @app.post("/sessions")
    def create_session(req: CreateSessionRequest):
        circuit = parse_circuit(req.source)
        session = Session(uuid.uuid4().hex[:12], BarrierPolicy(req.policy),
                          [circuit])
        with registry_lock:
            sessions[session.id] = session
        summary = session.summary()
        summary["matches_summary"] = {
            rule.value: len(find_matches(circuit, rule, session.policy))
            for rule in RuleId
            if find_matches(circuit, rule, session.policy)}
        return summary

    @app.get("/sessions/{session_id}")
    def get_state(session_id: str):
        return get_session(session_id).summary()

    @app.get("/sessions/{session_id}/matches")
    def matches(session_id: str, rule: str = Query(...),
                reverse: bool = False):
        session = get_session(session_id)
        with session.lock:
            found = find_matches(session.current, RuleId(rule),
                                 session.policy, reverse=reverse)
            return {"revision": session.revision,
                    "matches": [m.to_json() for m in found]}

    @app.post("/sessions/{session_id}/apply")
    def apply(session_id: str, req: ApplyRequest):
        session = get_session(session_id)
        with session.lock:
            if req.revision != session.revision:
                raise HTTPException(
                    409, f"revision {req.revision} is stale "
                         f"(current {session.revision})")
            match = Match(RuleId(req.rule), tuple(req.at), tuple(req.wires),
                          req.reverse, req.variant)
            before = session.current
            after = apply_rule(before, match, session.policy)
            badge = _badge_for(before, after, match)
            session.snapshots.append(after)
            session.matches_applied.append(match)
            session.badges.append(badge)
            session.revision += 1
            return session.summary()

    @app.post("/sessions/{session_id}/undo")
    def undo(session_id: str):
        session = get_session(session_id)
        with session.lock:
            if len(session.snapshots) == 1:
                raise HTTPException(409, "nothing to undo")
            session.snapshots.pop()
            session.matches_applied.pop()
            session.badges.pop()
            session.revision += 1
            return session.summary()

    @app.get("/sessions/{session_id}/verify")
    def verify(session_id: str):
        session = get_session(session_id)
        with session.lock:
            initial = session.snapshots[0].without_measurements()
            current = session.current.without_measurements()
            if initial.num_qubits > sim.MAX_UNITARY_QUBITS:
                return {"badge": "unverified (size)"}
            report = sim.equivalent_up_to_phase(initial, current)
            badge = "verified" if report.equivalent else "NOT EQUIVALENT"
            if not report.equivalent and session.matches_applied and any(
                    m.rule.value in ("ANCILLA_SEVER", "CX_CONTROL_SAME_AS_X")
                    for m in session.matches_applied):
                sa = sim.statevector_run(initial).amplitudes
                sb = sim.statevector_run(current).amplitudes
                if sim.states_equal_up_to_phase(sa, sb):
                    badge = "verified (state)"
            return {"badge": badge, "report": report.to_json(),
                    "against": "initial snapshot"}

    @app.get("/sessions/{session_id}/classify")
    def classify(session_id: str):
        session = get_session(session_id)
        with session.lock:
            return taxonomy.classify(session.current).to_json()

    @app.get("/sessions/{session_id}/diagram.svg")
    def diagram(session_id: str):
        session = get_session(session_id)
        with session.lock:
            payload = render(session.current, "svg").payload
        return Response(content=payload, media_type="image/svg+xml")

    return app
