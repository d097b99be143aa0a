"""Game arena: alternating environment/agent choice graph over a property.

Each AND-node is labelled by the obligation that remains after the play
so far; consuming one instant walks an environment edge (guard over the
atoms the agent cannot influence) and then an agent edge.  Nodes are
shared up to propositional equivalence of their labels, which keeps the
graph finite.  A node is accepting ("final") when stopping the trace
right there satisfies its label, i.e. the label holds with the end
marker set; the plain true label is the degenerate case.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .boolfn import Bdd
from .decomp import Abstraction, DecompPair, bdd_of, decompose
from .fol import FLit, FOFormula, f_and, f_or
from .parser import SpecProblem
from .props import FALSE, PAtom, PNegAtom, Property, TRUE, atoms_of, rm_next, subst_last, tnps, xnf
from .terms import Atom, base_name

SPLIT_DEFAULT = "lookback-env"      # lookback values count as environment-known
SPLIT_FIG_STYLE = "lookback-agent"  # agent keeps atoms over its own lookback values


def split_atoms(atoms: list[Atom], env_names: tuple[str, ...],
                agent_names: tuple[str, ...], mode: str = SPLIT_DEFAULT) -> tuple[list[Atom], list[Atom]]:
    """Partition atoms into environment-determined and agent-influenced."""
    env_side: list[Atom] = []
    ag_side: list[Atom] = []
    for atom in atoms:
        currents = {v for v in atom.variables if not v.endswith("@pre")}
        pres = {base_name(v) for v in atom.variables if v.endswith("@pre")}
        if currents & set(agent_names):
            ag_side.append(atom)
        elif mode == SPLIT_FIG_STYLE and pres & set(agent_names):
            ag_side.append(atom)
        else:
            env_side.append(atom)
    return env_side, ag_side


@dataclass(frozen=True)
class AndNode:
    id: int
    label: Property
    is_final: bool


@dataclass(frozen=True)
class OrNode:
    id: int


@dataclass(frozen=True)
class EnvEdge:
    src: int
    guard: FOFormula
    dst: int


@dataclass(frozen=True)
class AgEdge:
    src: int
    guard: FOFormula
    dst: int


@dataclass
class AndOrGraph:
    theory: str
    env_vars: tuple[tuple[str, str], ...]
    agent_vars: tuple[tuple[str, str], ...]
    and_nodes: list[AndNode] = field(default_factory=list)
    or_nodes: list[OrNode] = field(default_factory=list)
    env_edges: list[EnvEdge] = field(default_factory=list)
    ag_edges: list[AgEdge] = field(default_factory=list)
    initial: int = 0
    c_env: tuple[Atom, ...] = ()
    c_ag: tuple[Atom, ...] = ()

    def env_edges_of(self, and_id: int) -> list[EnvEdge]:
        return [e for e in self.env_edges if e.src == and_id]

    def ag_edges_of(self, or_id: int) -> list[AgEdge]:
        return [e for e in self.ag_edges if e.src == or_id]

    def node(self, and_id: int) -> AndNode:
        return self.and_nodes[and_id]

    @property
    def final_ids(self) -> list[int]:
        return [n.id for n in self.and_nodes if n.is_final]


class ArenaError(Exception):
    pass


def _guard_formula(pair: DecompPair, ab: Abstraction, sort: str) -> FOFormula:
    # negative literals stay on the original atom so guards of one node
    # remain propositional complements of each other
    cubes = []
    for cube in pair.guard_cubes:
        lits = []
        for ix, pol in cube:
            unit = ab.units[ix]
            assert isinstance(unit, Atom)
            lits.append(FLit(unit, pol))
        cubes.append(f_and(lits))
    return f_or(cubes)


def build_graph(problem: SpecProblem, split_mode: str = SPLIT_DEFAULT,
                max_nodes: int = 4000) -> AndOrGraph:
    """Breadth-first arena construction with node sharing."""
    psi = xnf(problem.effective)
    pool = atoms_of(psi)
    env_atoms, ag_atoms = split_atoms(pool, problem.env_names, problem.agent_names, split_mode)
    graph = AndOrGraph(problem.theory, problem.env_vars, problem.agent_vars,
                       c_env=tuple(env_atoms), c_ag=tuple(ag_atoms))

    share_mgr = Bdd()
    share_ab = Abstraction.empty()
    by_key: dict[int, int] = {}

    def canonical(label: Property) -> tuple[int, Property]:
        key = bdd_of(share_mgr, label, share_ab)
        if key == 1:
            return key, TRUE
        if key == 0:
            return key, FALSE
        return key, label

    def stop_ok(label: Property) -> bool:
        closed = subst_last(label, True)
        return bdd_of(share_mgr, closed, share_ab) == 1

    def mk_node(label: Property) -> int:
        key, label = canonical(label)
        found = by_key.get(key)
        if found is not None:
            return found
        nid = len(graph.and_nodes)
        if nid >= max_nodes:
            raise ArenaError("arena exceeds the node budget")
        graph.and_nodes.append(AndNode(nid, label, stop_ok(label)))
        by_key[key] = nid
        queue.append(nid)
        return nid

    queue: deque[int] = deque()
    graph.initial = 0
    mk_node(psi)

    env_set = set(env_atoms)
    ag_set = set(ag_atoms)
    while queue:
        nid = queue.popleft()
        node = graph.and_nodes[nid]
        if node.label == TRUE:
            continue
        d_env = decompose(xnf(node.label), env_set)
        _check_partition(d_env)
        for env_pair in d_env.pairs:
            or_id = len(graph.or_nodes)
            graph.or_nodes.append(OrNode(or_id))
            graph.env_edges.append(EnvEdge(
                nid, _guard_formula(env_pair, d_env.abstraction, problem.theory), or_id))
            d_ag = decompose(xnf(env_pair.residue), ag_set)
            _check_partition(d_ag)
            for ag_pair in d_ag.pairs:
                for member in tnps(ag_pair.residue):
                    if isinstance(member, (PAtom, PNegAtom)):
                        raise ArenaError(f"residue kept a top-level atom: {ag_pair.residue}")
                target = mk_node(xnf(rm_next(ag_pair.residue)))
                graph.ag_edges.append(AgEdge(
                    or_id, _guard_formula(ag_pair, d_ag.abstraction, problem.theory), target))
    return graph


def _check_partition(dec) -> None:
    """Guards of one decomposition must be pairwise disjoint and covering."""
    mgr = Bdd()
    total = 0
    nodes = []
    for pair in dec.pairs:
        node = mgr.disj(mgr.cube(c) for c in pair.guard_cubes)
        nodes.append(node)
    for i, a in enumerate(nodes):
        for b in nodes[i + 1:]:
            if mgr.apply_and(a, b) != 0:
                raise ArenaError("guards overlap")
    if mgr.disj(nodes) != 1:
        raise ArenaError("guards do not cover")


def export_dot(graph: AndOrGraph) -> str:
    def esc(text: str) -> str:
        return text.replace("\\", "\\\\").replace('"', '\\"')

    lines = ["digraph arena {", "  rankdir=LR;"]
    for n in graph.and_nodes:
        shape = "box"
        extras = ", peripheries=2" if n.is_final else ""
        start = ", style=bold" if n.id == graph.initial else ""
        lines.append(f'  a{n.id} [shape={shape}, label="{esc(str(n.label))}"{extras}{start}];')
    for o in graph.or_nodes:
        lines.append(f'  o{o.id} [shape=circle, label="∨"];')
    for e in graph.env_edges:
        lines.append(f'  a{e.src} -> o{e.dst} [label="{esc(str(e.guard))}"];')
    for e in graph.ag_edges:
        lines.append(f'  o{e.src} -> a{e.dst} [label="{esc(str(e.guard))}", style=dashed];')
    lines.append("}")
    return "\n".join(lines) + "\n"
