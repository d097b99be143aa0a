"""Winning-region iteration over the arena.

``win_levels[i][s]`` is a state formula describing the previous-instant
values from which the agent can force satisfaction within i more steps
when the play stands at node s.  Level 0 is true exactly at accepting
nodes; each round adds the controllable preimage.  The loop stops as
soon as the initial node's formula is satisfiable (realizable, bound =
round index), or at a pointwise fixpoint with an unsatisfiable initial
value (not boundedly realizable), or when the round budget runs out.
"""

from __future__ import annotations

from dataclasses import dataclass

from .arena import AndOrGraph
from .fol import (
    FFalse,
    FOFormula,
    FTrue,
    F_FALSE,
    F_TRUE,
    f_and,
    f_exists,
    f_forall,
    f_not,
    f_or,
    free_vars,
    from_lookback,
)
from .props import FALSE
from .qe import TheoryBackend

REALIZABLE = "realizable"
NOT_BOUNDEDLY_REALIZABLE = "not-boundedly-realizable"
UNKNOWN = "unknown"


class WinError(Exception):
    pass


@dataclass
class WinTable:
    verdict: str
    bound: int | None                       # K for realizable verdicts
    fixpoint_index: int | None
    levels: list[dict[int, FOFormula]]
    iterations_used: int
    last_initial: FOFormula

    def at(self, node_id: int, level: int) -> FOFormula:
        return self.levels[level][node_id]


def pre_image(graph: AndOrGraph, cmap: dict[int, FOFormula], node_id: int,
              backend: TheoryBackend) -> FOFormula:
    """States (as previous-instant values) from which every environment
    move leaves some agent move into the configuration map."""
    x_bound = tuple(graph.env_vars)
    y_bound = tuple(graph.agent_vars)
    conjuncts = []
    for env_edge in graph.env_edges_of(node_id):
        options = [
            f_exists(y_bound, f_and([ag.guard, cmap[ag.dst]]))
            for ag in graph.ag_edges_of(env_edge.dst)
        ]
        conjuncts.append(f_forall(x_bound, f_or([f_not(env_edge.guard), f_or(options)])))
    eliminated = backend.qe(f_and(conjuncts))
    return from_lookback(eliminated)


def iterate_win(graph: AndOrGraph, backend: TheoryBackend, max_iter: int = 50) -> WinTable:
    if max_iter < 1:
        raise ValueError("max_iter must be positive")
    level0 = {n.id: (F_TRUE if n.is_final else F_FALSE) for n in graph.and_nodes}
    levels = [level0]

    def initial_value(level: dict[int, FOFormula]) -> FOFormula:
        value = level[graph.initial]
        if free_vars(value):
            raise WinError(
                f"initial winning formula is not closed: {value} "
                "(the property is not well-formed)")
        return value

    if isinstance(initial_value(level0), FTrue):
        return WinTable(REALIZABLE, 0, None, levels, 0, F_TRUE)

    for i in range(1, max_iter + 1):
        prev = levels[-1]
        cur: dict[int, FOFormula] = {}
        for node in graph.and_nodes:
            if node.is_final:
                cur[node.id] = F_TRUE
            elif node.label == FALSE:
                cur[node.id] = F_FALSE
            else:
                cur[node.id] = backend.simplify(
                    f_or([prev[node.id], pre_image(graph, prev, node.id, backend)]))
        levels.append(cur)
        init = initial_value(cur)
        if isinstance(init, FTrue):
            return WinTable(REALIZABLE, i, None, levels, i, init)
        if not isinstance(init, FFalse):
            # a closed quantifier-free formula always folds; be loud otherwise
            raise WinError(f"initial winning formula did not fold: {init}")
        stable = all(
            backend.equiv(cur[n.id], prev[n.id]) for n in graph.and_nodes
        )
        if stable:
            return WinTable(NOT_BOUNDEDLY_REALIZABLE, None, i - 1, levels, i, init)
    return WinTable(UNKNOWN, None, None, levels, max_iter, levels[-1][graph.initial])
