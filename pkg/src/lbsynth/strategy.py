"""Controller extraction and execution.

A synthesized artifact packages the arena, the winning levels 0..K, and
the problem data.  The controller is stateless beyond (current node,
previous assignment): at step k it follows the unique environment edge
whose guard the observed values satisfy, then takes the first agent edge
whose guard, conjoined with the target's level-(K-k-1) winning formula,
is satisfiable under the observed values; the witness of that formula is
the response.  Runs stop at the first accepting node.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

from . import fol
from .arena import AgEdge, AndNode, AndOrGraph, EnvEdge, OrNode
from .fol import FOFormula, f_and, substitute_values
from .parser import (
    SpecError,
    VarTable,
    fo_to_sexp,
    parse_fo,
    parse_prop,
    parse_sexp,
    property_to_sexp,
)
from .props import Property, atoms_of
from .qe import TheoryBackend
from .semantics import Trace, evaluate as trace_eval
from .terms import INT, pre_name
from .winning import REALIZABLE, WinTable

ARTIFACT_VERSION = 1


class StrategyError(Exception):
    pass


@dataclass(frozen=True)
class StrategyArtifact:
    theory: str
    env_vars: tuple[tuple[str, str], ...]
    agent_vars: tuple[tuple[str, str], ...]
    effective: Property
    graph: AndOrGraph
    win: list[dict[int, FOFormula]]      # levels 0..K
    bound: int                           # K

    @property
    def backend(self) -> TheoryBackend:
        return TheoryBackend(self.theory)

    @staticmethod
    def from_synthesis(problem, graph: AndOrGraph, table: WinTable) -> "StrategyArtifact":
        if table.verdict != REALIZABLE:
            raise StrategyError(f"no strategy: verdict is {table.verdict}")
        k = table.bound
        return StrategyArtifact(
            problem.theory, problem.env_vars, problem.agent_vars,
            problem.effective, graph, table.levels[: k + 1], k)


@dataclass(frozen=True)
class PlayState:
    k: int
    current: int
    previous: tuple[tuple[str, Fraction], ...] | None   # full V-assignment of step k-1
    history: tuple[tuple[tuple[str, Fraction], ...], ...]
    done: bool


def init_play(artifact: StrategyArtifact) -> PlayState:
    node = artifact.graph.node(artifact.graph.initial)
    return PlayState(0, node.id, None, (), node.is_final)


def _check_env_assignment(artifact: StrategyArtifact, beta: Mapping[str, Fraction]) -> dict[str, Fraction]:
    out: dict[str, Fraction] = {}
    for name, sort in artifact.env_vars:
        if name not in beta:
            raise StrategyError(f"missing environment value for {name}")
        value = Fraction(beta[name])
        if sort == INT and value.denominator != 1:
            raise StrategyError(f"non-integer value for {name}: {value}")
        out[name] = value
    extra = set(beta) - {n for n, _ in artifact.env_vars}
    if extra:
        raise StrategyError(f"not an environment variable: {sorted(extra)[0]}")
    return out


def respond(artifact: StrategyArtifact, state: PlayState,
            beta: Mapping[str, Fraction]) -> tuple[dict[str, Fraction], PlayState]:
    """One controller step: consume the environment values, produce the
    agent values, and advance the play."""
    if state.done:
        raise StrategyError("the play is over")
    if state.k >= artifact.bound:
        raise StrategyError("internal error: play exceeded the bound")
    beta = _check_env_assignment(artifact, beta)
    eta: dict[str, Fraction] = dict(beta)
    if state.previous is not None:
        for name, value in state.previous:
            eta[pre_name(name)] = value

    graph = artifact.graph
    matching = [e for e in graph.env_edges_of(state.current)
                if fol.evaluate(e.guard, eta)]
    if len(matching) != 1:
        raise StrategyError(
            f"internal error: {len(matching)} environment edges apply at node "
            f"{state.current}")
    env_edge = matching[0]

    level = artifact.bound - state.k - 1
    backend = artifact.backend
    for ag_edge in graph.ag_edges_of(env_edge.dst):
        goal = f_and([ag_edge.guard, artifact.win[level][ag_edge.dst]])
        closed = substitute_values(goal, eta)
        gamma = backend.witness(closed)
        if gamma is None:
            continue
        for name, _ in artifact.agent_vars:
            gamma.setdefault(name, Fraction(0))
        full = dict(beta)
        full.update({n: gamma[n] for n, _ in artifact.agent_vars})
        target = graph.node(ag_edge.dst)
        new_state = PlayState(
            state.k + 1, target.id,
            tuple(sorted(full.items())),
            state.history + (tuple(sorted(full.items())),),
            target.is_final)
        return {n: gamma[n] for n, _ in artifact.agent_vars}, new_state
    raise StrategyError(
        f"internal error: no satisfiable agent branch at node {state.current} "
        f"(step {state.k}, level {level})")


def state_trace(artifact: StrategyArtifact, state: PlayState) -> Trace | None:
    if not state.history:
        return None
    return Trace(artifact.theory, tuple(dict(step) for step in state.history))


@dataclass
class SimulationReport:
    episodes: int
    passed: int
    adversary: str
    seed: int
    failures: list[Trace]

    @property
    def all_passed(self) -> bool:
        return self.passed == self.episodes and not self.failures


def _constant_pool(artifact: StrategyArtifact) -> list[Fraction]:
    consts = {Fraction(0), Fraction(1), Fraction(-1)}
    for atom in atoms_of(artifact.effective):
        consts.add(atom.expr.const)
        consts.add(-atom.expr.const)
    return sorted(consts)


def _random_adversary(artifact: StrategyArtifact, rng: random.Random) -> Callable[[], dict[str, Fraction]]:
    pool = _constant_pool(artifact)
    span = int(max(abs(c) for c in pool)) + 3

    def draw() -> dict[str, Fraction]:
        out = {}
        for name, sort in artifact.env_vars:
            if sort == INT:
                out[name] = Fraction(rng.randint(-2 * span, 2 * span))
            else:
                out[name] = Fraction(rng.randint(-4 * span, 4 * span), rng.choice((1, 1, 2, 4)))
        return out

    return draw


def _boundary_adversary(artifact: StrategyArtifact, rng: random.Random) -> Callable[[], dict[str, Fraction]]:
    pool = _constant_pool(artifact)
    candidates = sorted({c + d for c in pool for d in (Fraction(-1), Fraction(0), Fraction(1))})

    def draw() -> dict[str, Fraction]:
        return {name: rng.choice(candidates) for name, _ in artifact.env_vars}

    return draw


def simulate(artifact: StrategyArtifact, episodes: int = 100, seed: int = 0,
             adversary: str = "random") -> SimulationReport:
    """Play the controller against a value generator and check every
    finished trace against the property with the direct evaluator."""
    factory = {"random": _random_adversary, "boundary": _boundary_adversary}
    if adversary not in factory:
        raise ValueError(f"unknown adversary {adversary}")
    passed = 0
    failures: list[Trace] = []
    for episode in range(episodes):
        rng = random.Random(seed * 1_000_003 + episode)
        draw = factory[adversary](artifact, rng)
        state = init_play(artifact)
        steps = 0
        while not state.done:
            if steps > artifact.bound:
                raise StrategyError("internal error: episode exceeded the bound")
            _, state = respond(artifact, state, draw())
            steps += 1
        if not state.history:
            # degenerate true-property artifact: pad one instant
            beta = draw()
            full = dict(beta)
            full.update({n: Fraction(0) for n, _ in artifact.agent_vars})
            trace = Trace(artifact.theory, (full,))
        else:
            trace = state_trace(artifact, state)
        if trace_eval(trace, artifact.effective):
            passed += 1
        else:
            failures.append(trace)
    return SimulationReport(episodes, passed, adversary, seed, failures)


# ---- persistence ------------------------------------------------------------


def save_artifact(artifact: StrategyArtifact) -> str:
    doc = {
        "version": ARTIFACT_VERSION,
        "theory": artifact.theory,
        "env": [[n, s] for n, s in artifact.env_vars],
        "agent": [[n, s] for n, s in artifact.agent_vars],
        "property": property_to_sexp(artifact.effective),
        "K": artifact.bound,
        "initial": artifact.graph.initial,
        "and_nodes": [
            {
                "id": n.id,
                "label": property_to_sexp(n.label),
                "final": n.is_final,
                "win": [fo_to_sexp(artifact.win[i][n.id]) for i in range(artifact.bound + 1)],
            }
            for n in artifact.graph.and_nodes
        ],
        "or_nodes": [o.id for o in artifact.graph.or_nodes],
        "env_edges": [
            {"from": e.src, "to": e.dst, "guard": fo_to_sexp(e.guard)}
            for e in artifact.graph.env_edges
        ],
        "agent_edges": [
            {"from": e.src, "to": e.dst, "guard": fo_to_sexp(e.guard)}
            for e in artifact.graph.ag_edges
        ],
    }
    return json.dumps(doc, indent=1)


def load_artifact(text: str) -> StrategyArtifact:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StrategyError(f"unreadable artifact: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("version") != ARTIFACT_VERSION:
        raise StrategyError("unsupported artifact version")
    try:
        theory = doc["theory"]
        env_vars = tuple((n, s) for n, s in doc["env"])
        agent_vars = tuple((n, s) for n, s in doc["agent"])
        table = VarTable(dict(env_vars) | dict(agent_vars), theory)
        effective = parse_prop(parse_sexp(doc["property"]), table)
        bound = int(doc["K"])
        graph = AndOrGraph(theory, env_vars, agent_vars, initial=int(doc["initial"]))
        win: list[dict[int, FOFormula]] = [dict() for _ in range(bound + 1)]
        for entry in doc["and_nodes"]:
            nid = int(entry["id"])
            label = parse_prop(parse_sexp(entry["label"]), table)
            graph.and_nodes.append(AndNode(nid, label, bool(entry["final"])))
            if len(entry["win"]) != bound + 1:
                raise StrategyError(f"node {nid} carries {len(entry['win'])} win levels, "
                                    f"expected {bound + 1}")
            for i, text_i in enumerate(entry["win"]):
                win[i][nid] = parse_fo(text_i, table)
        for oid in doc["or_nodes"]:
            graph.or_nodes.append(OrNode(int(oid)))
        for e in doc["env_edges"]:
            graph.env_edges.append(EnvEdge(int(e["from"]), parse_fo(e["guard"], table), int(e["to"])))
        for e in doc["agent_edges"]:
            graph.ag_edges.append(AgEdge(int(e["from"]), parse_fo(e["guard"], table), int(e["to"])))
    except (KeyError, ValueError, TypeError, SpecError) as exc:
        raise StrategyError(f"malformed artifact: {exc}") from exc
    pool = atoms_of(effective)
    from .arena import split_atoms
    env_atoms, ag_atoms = split_atoms(pool, tuple(n for n, _ in env_vars),
                                      tuple(n for n, _ in agent_vars))
    graph.c_env, graph.c_ag = tuple(env_atoms), tuple(ag_atoms)
    return StrategyArtifact(theory, env_vars, agent_vars, effective, graph, win, bound)
