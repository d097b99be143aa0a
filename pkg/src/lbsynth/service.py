"""HTTP facade for synthesis and interactive play sessions.

A thin adapter over the library: every response is reproducible with the
same inputs through direct calls.  Specs are checked once and cached; a
session owns one play state, mutated under its own lock.  All numeric
values cross the wire as exact decimal or p/q strings.
"""

from __future__ import annotations

import secrets
import threading
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles

from .arena import ArenaError, build_graph
from .fragments import classify
from .parser import SpecError, parse_spec, fo_to_sexp
from .qe import TheoryBackend
from .semantics import evaluate, parse_number
from .strategy import (
    PlayState,
    StrategyArtifact,
    StrategyError,
    init_play,
    respond,
    state_trace,
)
from .winning import REALIZABLE, iterate_win


def _fmt(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass
class SpecEntry:
    id: str
    verdict: str
    bound: int | None
    artifact: StrategyArtifact | None
    graph_doc: dict
    fragment_lines: list[str]


@dataclass
class Session:
    id: str
    spec_id: str
    artifact: StrategyArtifact
    state: PlayState
    created_at: float
    touched_at: float
    lock: threading.Lock = field(default_factory=threading.Lock)


def _graph_doc(graph) -> dict:
    return {
        "initial": graph.initial,
        "and_nodes": [
            {"id": n.id, "label": str(n.label), "final": n.is_final}
            for n in graph.and_nodes
        ],
        "or_nodes": [o.id for o in graph.or_nodes],
        "env_edges": [
            {"from": e.src, "to": e.dst, "guard": str(e.guard)} for e in graph.env_edges
        ],
        "agent_edges": [
            {"from": e.src, "to": e.dst, "guard": str(e.guard)} for e in graph.ag_edges
        ],
    }


def _trace_rows(artifact: StrategyArtifact, state: PlayState) -> list[dict[str, str]]:
    return [{n: _fmt(v) for n, v in step} for step in state.history]


def create_app(max_iter: int = 50, session_ttl: float = 3600.0) -> FastAPI:
    app = FastAPI(title="lbsynth", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    specs: dict[str, SpecEntry] = {}
    sessions: dict[str, Session] = {}
    store_lock = threading.Lock()

    def sweep_sessions() -> None:
        now = time.monotonic()
        with store_lock:
            stale = [sid for sid, s in sessions.items()
                     if now - s.touched_at > session_ttl]
            for sid in stale:
                del sessions[sid]

    def get_spec(spec_id: str) -> SpecEntry:
        entry = specs.get(spec_id)
        if entry is None:
            raise HTTPException(404, f"unknown spec {spec_id}")
        return entry

    def get_session(session_id: str) -> Session:
        sweep_sessions()
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(404, f"unknown session {session_id}")
        session.touched_at = time.monotonic()
        return session

    @app.post("/specs")
    def post_spec(body: dict):
        text = body.get("text")
        if not isinstance(text, str):
            raise HTTPException(400, "body must carry a spec in 'text'")
        try:
            problem = parse_spec(text)
            graph = build_graph(problem)
            table = iterate_win(graph, TheoryBackend(problem.theory), max_iter)
            report = classify(problem, graph=graph)
        except (SpecError, ArenaError) as exc:
            raise HTTPException(400, str(exc))
        artifact = None
        if table.verdict == REALIZABLE:
            artifact = StrategyArtifact.from_synthesis(problem, graph, table)
        spec_id = secrets.token_hex(8)
        entry = SpecEntry(spec_id, table.verdict, table.bound, artifact,
                          _graph_doc(graph), report.lines())
        with store_lock:
            specs[spec_id] = entry
        return {
            "specId": spec_id,
            "verdict": entry.verdict,
            "K": entry.bound,
            "graph": {
                "andNodes": len(graph.and_nodes),
                "orNodes": len(graph.or_nodes),
            },
            "fragment": entry.fragment_lines,
        }

    @app.get("/specs/{spec_id}/graph")
    def get_graph(spec_id: str):
        return get_spec(spec_id).graph_doc

    @app.post("/specs/{spec_id}/sessions")
    def post_session(spec_id: str):
        entry = get_spec(spec_id)
        if entry.artifact is None:
            raise HTTPException(409, f"spec is {entry.verdict}; no strategy to play")
        state = init_play(entry.artifact)
        session = Session(secrets.token_hex(8), spec_id, entry.artifact, state,
                          time.monotonic(), time.monotonic())
        with store_lock:
            sessions[session.id] = session
        node = entry.artifact.graph.node(state.current)
        return {
            "sessionId": session.id,
            "nodeLabel": str(node.label),
            "nodeId": node.id,
            "k": state.k,
            "done": state.done,
            "K": entry.artifact.bound,
            "envVars": [[n, s] for n, s in entry.artifact.env_vars],
            "agentVars": [[n, s] for n, s in entry.artifact.agent_vars],
        }

    def snapshot(session: Session, satisfied: bool | None) -> dict:
        artifact = session.artifact
        state = session.state
        node = artifact.graph.node(state.current)
        level = max(artifact.bound - state.k, 0)
        return {
            "sessionId": session.id,
            "specId": session.spec_id,
            "k": state.k,
            "nodeLabel": str(node.label),
            "nodeId": node.id,
            "done": state.done,
            "winFormula": fo_to_sexp(artifact.win[level][node.id]),
            "traceSoFar": _trace_rows(artifact, state),
            "satisfied": satisfied,
        }

    @app.get("/sessions/{session_id}")
    def get_snapshot(session_id: str):
        session = get_session(session_id)
        with session.lock:
            satisfied = None
            if session.state.done:
                trace = state_trace(session.artifact, session.state)
                satisfied = trace is None or evaluate(trace, session.artifact.effective)
            return snapshot(session, satisfied)

    @app.post("/sessions/{session_id}/move")
    def post_move(session_id: str, body: dict):
        session = get_session(session_id)
        with session.lock:
            if session.state.done:
                raise HTTPException(410, "the play is over")
            beta = {}
            for name, _ in session.artifact.env_vars:
                raw = body.get(name)
                if raw is None:
                    raise HTTPException(400, f"missing value for {name}")
                try:
                    beta[name] = parse_number(str(raw))
                except (ValueError, ZeroDivisionError):
                    raise HTTPException(400, f"cannot read {name}={raw!r}")
            try:
                gamma, new_state = respond(session.artifact, session.state, beta)
            except StrategyError as exc:
                raise HTTPException(400, str(exc))
            session.state = new_state
            satisfied = None
            if new_state.done:
                trace = state_trace(session.artifact, new_state)
                satisfied = trace is None or evaluate(trace, session.artifact.effective)
            out = snapshot(session, satisfied)
            out["agent"] = {n: _fmt(v) for n, v in gamma.items()}
            return out

    # serve the browser arena when a built frontend sits next to the package
    frontend = Path(__file__).resolve().parents[2] / "frontend"
    if (frontend / "index.html").exists() and (frontend / "dist").exists():
        app.mount("/ui", StaticFiles(directory=frontend, html=True), name="ui")

    return app
