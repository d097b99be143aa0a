"""Syntactic fragment classification and lookback-dependency analysis.

Monotonicity constraints (rationals, order comparisons between two
variables or a variable and a constant) and integer periodicity
constraints (integer equalities, constant comparisons, modular
congruences) are closed under quantifier elimination, so membership
promises termination of the winning iteration.  Lookback interaction is
measured on computation graphs: one variable copy per instant, an edge
where two copies share a literal, equality edges contracted; the length
of the longest simple path bounds how far information travels.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .arena import AndOrGraph, build_graph
from .fol import FOFormula, f_and, literals
from .parser import SpecProblem
from .props import atoms_of
from .terms import Atom, EQ, EQUIV_MOD, INT, LT, NEQ, REAL, base_name, is_pre


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def is_mc_atom(atom: Atom) -> bool:
    """Order comparison between two variables or a variable and a constant."""
    if atom.sort != REAL or atom.op == EQUIV_MOD:
        return False
    coeffs = [c for _, c in atom.expr.coeffs]
    if len(coeffs) == 1:
        return abs(coeffs[0]) == 1
    if len(coeffs) == 2:
        return sorted(coeffs) == [Fraction(-1), Fraction(1)] and atom.expr.const == 0
    return False


def mc_constant(atom: Atom) -> Fraction | None:
    """The comparison constant of a single-variable MC atom."""
    if len(atom.expr.coeffs) != 1:
        return Fraction(0)
    coeff = atom.expr.coeffs[0][1]
    return -atom.expr.const / coeff


def is_ipc_atom(atom: Atom) -> bool:
    if atom.sort != INT:
        return False
    coeffs = [c for _, c in atom.expr.coeffs]
    if atom.op == EQUIV_MOD:
        k = atom.modulus
        if len(coeffs) == 1:
            return coeffs[0] in (1, k - 1) or k == 1
        if len(coeffs) == 2:
            return sorted(coeffs) == sorted([Fraction(1), Fraction(k - 1) if k > 1 else Fraction(1)])
        return False
    if atom.op == EQ:
        if len(coeffs) == 1:
            return abs(coeffs[0]) == 1
        if len(coeffs) == 2:
            return sorted(coeffs) == [Fraction(-1), Fraction(1)] and atom.expr.const == 0
        return False
    if atom.op in (LT, NEQ):
        return len(coeffs) == 1 and abs(coeffs[0]) == 1
    return False


def mc_constants(atoms) -> set[Fraction]:
    out: set[Fraction] = {Fraction(0)}
    for atom in atoms:
        if len(atom.expr.coeffs) == 1:
            out.add(mc_constant(atom))
    return out


def ipc_moduli(atoms) -> set[int]:
    out: set[int] = {1}
    for atom in atoms:
        if atom.op == EQUIV_MOD:
            out.add(atom.modulus)
    closure = set(out)
    changed = True
    while changed:
        changed = False
        for a in list(closure):
            for b in list(closure):
                if _lcm(a, b) not in closure:
                    closure.add(_lcm(a, b))
                    changed = True
    return closure


def mc_closed(f: FOFormula, constants: set[Fraction]) -> bool:
    """Every literal is again an MC atom over the given constant set."""
    for lit in literals(f):
        if not is_mc_atom(lit.atom):
            return False
        if len(lit.atom.expr.coeffs) == 1 and mc_constant(lit.atom) not in constants:
            return False
    return True


def ipc_closed(f: FOFormula, moduli: set[int]) -> bool:
    for lit in literals(f):
        if not is_ipc_atom(lit.atom):
            return False
        if lit.atom.op == EQUIV_MOD and lit.atom.modulus not in moduli:
            return False
    return True


@dataclass(frozen=True)
class BoundedLookback:
    bound: int
    status: str          # "proved-up-to-unroll" | "exceeded"
    depth: int
    witness: tuple[FOFormula, ...] | None = None


@dataclass(frozen=True)
class FragmentReport:
    lookback_free: bool
    mc: bool
    ipc: bool
    bounded: BoundedLookback | None
    constants: tuple[Fraction, ...]
    moduli: tuple[int, ...]

    def lines(self) -> list[str]:
        out = [
            f"lookback-free: {'yes' if self.lookback_free else 'no'}",
            f"monotonicity-constraints: {'yes' if self.mc else 'no'}",
            f"integer-periodicity-constraints: {'yes' if self.ipc else 'no'}",
        ]
        if self.bounded is not None:
            b = self.bounded
            out.append(
                f"bounded-lookback: K={b.bound} ({b.status} depth {b.depth})")
        else:
            out.append("bounded-lookback: not determined")
        if self.mc:
            out.append("constants: " + ", ".join(str(c) for c in self.constants))
        if self.ipc:
            out.append("moduli: " + ", ".join(str(m) for m in self.moduli))
        return out


# ---- computation graphs ------------------------------------------------------

Vertex = tuple[int, str]            # (instant index, variable name)


@dataclass
class ComputationGraph:
    vertices: set[Vertex]
    edges: set[tuple[Vertex, Vertex]]
    eq_edges: set[tuple[Vertex, Vertex]]
    collapsed: bool = False


def _literal_vertices(lit, layer: int) -> list[Vertex]:
    out = []
    for name in lit.atom.variables:
        if is_pre(name):
            out.append((layer - 1, base_name(name)))
        else:
            out.append((layer, name))
    return out


def _is_equality_literal(lit) -> bool:
    if not lit.positive or lit.atom.op != EQ or lit.atom.expr.const != 0:
        return False
    coeffs = [c for _, c in lit.atom.expr.coeffs]
    return len(coeffs) == 2 and sorted(coeffs) == [Fraction(-1), Fraction(1)]


def computation_graph(guards: list[FOFormula]) -> ComputationGraph:
    """Variable-dependency graph of one arena path; step i's literals link
    instant-i copies with instant-(i-1) copies of the variables."""
    g = ComputationGraph(set(), set(), set())
    for layer, guard in enumerate(guards):
        for lit in literals(guard):
            vs = _literal_vertices(lit, layer)
            g.vertices.update(vs)
            for i in range(len(vs)):
                for j in range(i + 1, len(vs)):
                    if vs[i] == vs[j]:
                        continue
                    edge = tuple(sorted((vs[i], vs[j])))
                    g.edges.add(edge)
                    if _is_equality_literal(lit):
                        g.eq_edges.add(edge)
    return g


def collapse_equalities(g: ComputationGraph) -> ComputationGraph:
    parent: dict[Vertex, Vertex] = {v: v for v in g.vertices}

    def find(v: Vertex) -> Vertex:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in sorted(g.eq_edges):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    vertices = {find(v) for v in g.vertices}
    edges = set()
    for a, b in g.edges:
        if (a, b) in g.eq_edges:
            continue
        ra, rb = find(a), find(b)
        if ra != rb:
            edges.add(tuple(sorted((ra, rb))))
    return ComputationGraph(vertices, edges, set(), collapsed=True)


def max_acyclic_path(g: ComputationGraph) -> int:
    """Instants spanned by the longest simple path, i.e. its vertex count
    (0 for the empty graph; exhaustive search, the graphs are small)."""
    adjacency: dict[Vertex, set[Vertex]] = {v: set() for v in g.vertices}
    for a, b in g.edges:
        adjacency[a].add(b)
        adjacency[b].add(a)
    best = 0

    def walk(v: Vertex, seen: set[Vertex]) -> None:
        nonlocal best
        best = max(best, len(seen))
        for w in adjacency[v]:
            if w not in seen:
                seen.add(w)
                walk(w, seen)
                seen.remove(w)

    for v in sorted(g.vertices):
        walk(v, {v})
    return best


def _composite_steps(graph: AndOrGraph) -> dict[int, list[tuple[FOFormula, int]]]:
    steps: dict[int, list[tuple[FOFormula, int]]] = {}
    for n in graph.and_nodes:
        out = []
        for env_edge in graph.env_edges_of(n.id):
            for ag_edge in graph.ag_edges_of(env_edge.dst):
                out.append((f_and([env_edge.guard, ag_edge.guard]), ag_edge.dst))
        steps[n.id] = out
    return steps


def check_bounded_lookback(graph: AndOrGraph, bound: int, depth: int,
                           budget: int = 200_000) -> BoundedLookback:
    """Depth-bounded refutation/verification: explore every guard path of
    at most `depth` composite steps from every node; a path whose
    collapsed computation graph has a longer simple path refutes the
    bound.  A clean sweep proves the bound up to the explored depth."""
    steps = _composite_steps(graph)
    spent = 0
    covered = depth

    def explore(node: int, path: list[FOFormula], d: int) -> BoundedLookback | None:
        nonlocal spent, covered
        if d == 0:
            return None
        for guard, target in steps[node]:
            spent += 1
            if spent > budget:
                covered = min(covered, depth - d)
                return None
            path.append(guard)
            length = max_acyclic_path(collapse_equalities(computation_graph(path)))
            if length > bound:
                found = BoundedLookback(bound, "exceeded", len(path), tuple(path))
                path.pop()
                return found
            found = explore(target, path, d - 1)
            path.pop()
            if found is not None:
                return found
        return None

    for n in graph.and_nodes:
        found = explore(n.id, [], depth)
        if found is not None:
            return found
    return BoundedLookback(bound, "proved-up-to-unroll", covered)


def observed_lookback(graph: AndOrGraph, depth: int, budget: int = 100_000) -> tuple[int, int]:
    """Largest collapsed path length over all guard paths up to `depth`,
    with the depth actually covered under the budget."""
    steps = _composite_steps(graph)
    best = 0
    spent = 0
    covered = depth

    def explore(node: int, path: list[FOFormula], d: int) -> None:
        nonlocal best, spent, covered
        if d == 0:
            return
        for guard, target in steps[node]:
            spent += 1
            if spent > budget:
                covered = min(covered, depth - d)
                return
            path.append(guard)
            best = max(best, max_acyclic_path(collapse_equalities(computation_graph(path))))
            explore(target, path, d - 1)
            path.pop()

    for n in graph.and_nodes:
        explore(n.id, [], depth)
    return best, covered


def classify(problem: SpecProblem, graph: AndOrGraph | None = None,
             unroll_depth: int | None = None) -> FragmentReport:
    atoms = atoms_of(problem.effective)
    lookback_free = not any(a.has_lookback() for a in atoms)
    mc = problem.theory == "lra" and bool(atoms) and all(is_mc_atom(a) for a in atoms)
    ipc = problem.theory == "lia" and bool(atoms) and all(is_ipc_atom(a) for a in atoms)
    constants = tuple(sorted(mc_constants(atoms))) if mc else ()
    moduli = tuple(sorted(ipc_moduli(atoms))) if ipc else ()
    if lookback_free:
        bounded = BoundedLookback(0, "proved-up-to-unroll", 0)
    else:
        if graph is None:
            graph = build_graph(problem)
        depth = unroll_depth or min(2 * len(graph.and_nodes), 8)
        k, covered = observed_lookback(graph, depth)
        bounded = BoundedLookback(k, "proved-up-to-unroll", covered)
    return FragmentReport(lookback_free, mc, ipc, bounded, constants, moduli)
