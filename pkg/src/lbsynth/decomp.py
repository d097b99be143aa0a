"""Boolean abstraction of XNF properties and two-sided guard decomposition.

A property in XNF is viewed propositionally: each distinct atom, each
temporal-rooted member, and the end marker becomes one abstract
proposition.  ``decompose`` splits a property against an atom set C by
Shannon cofactoring over the occurring C-propositions, grouping
assignments whose residues are propositionally equivalent, so the guards
are disjoint, covering, and the residues pairwise distinct.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .boolfn import Bdd, Cube, FALSE_NODE, TRUE_NODE
from .props import (
    LAST,
    PAnd,
    PAtom,
    PNegAtom,
    PNegLast,
    PLast,
    POr,
    PFalse,
    PTrue,
    Property,
    TRUE,
    p_and,
    p_atom,
    p_or,
)
from .terms import Atom

MAX_COFACTOR_VARS = 16


@dataclass
class Abstraction:
    """Mapping between abstract proposition indices and concrete units.

    A unit is an Atom, a temporal-rooted Property, or the LAST marker.
    Indices are assigned in discovery order, so identical inputs
    abstract identically.
    """

    units: list[object]
    index: dict[object, int]

    @staticmethod
    def empty() -> "Abstraction":
        return Abstraction([], {})

    def learn(self, unit: object) -> int:
        ix = self.index.get(unit)
        if ix is None:
            ix = len(self.units)
            self.units.append(unit)
            self.index[unit] = ix
        return ix

    def scan(self, p: Property) -> None:
        if isinstance(p, (PTrue, PFalse)):
            return
        if isinstance(p, (PLast, PNegLast)):
            self.learn(LAST)
        elif isinstance(p, (PAtom, PNegAtom)):
            self.learn(p.atom)
        elif isinstance(p, (PAnd, POr)):
            for a in p.args:
                self.scan(a)
        else:
            self.learn(p)   # temporal-rooted: opaque proposition


def abstract(p: Property) -> Abstraction:
    ab = Abstraction.empty()
    ab.scan(p)
    return ab


def bdd_of(mgr: Bdd, p: Property, ab: Abstraction) -> int:
    if isinstance(p, PTrue):
        return TRUE_NODE
    if isinstance(p, PFalse):
        return FALSE_NODE
    if isinstance(p, PLast):
        return mgr.var(ab.learn(LAST))
    if isinstance(p, PNegLast):
        return mgr.nvar(ab.learn(LAST))
    if isinstance(p, PAtom):
        return mgr.var(ab.learn(p.atom))
    if isinstance(p, PNegAtom):
        return mgr.nvar(ab.learn(p.atom))
    if isinstance(p, PAnd):
        return mgr.conj(bdd_of(mgr, a, ab) for a in p.args)
    if isinstance(p, POr):
        return mgr.disj(bdd_of(mgr, a, ab) for a in p.args)
    return mgr.var(ab.learn(p))


def prop_equiv(p: Property, q: Property) -> bool:
    """Propositional equivalence under a shared abstraction."""
    ab = abstract(p)
    ab.scan(q)
    mgr = Bdd()
    return bdd_of(mgr, p, ab) == bdd_of(mgr, q, ab)


def prop_is_true(p: Property) -> bool:
    return prop_equiv(p, TRUE)


def assign_atoms(p: Property, valuation: dict[Atom, bool]) -> Property:
    """Substitute truth values for top-layer occurrences of the given
    atoms; occurrences below temporal operators are later instants."""
    if isinstance(p, PAtom) and p.atom in valuation:
        return TRUE if valuation[p.atom] else PFalse()
    if isinstance(p, PNegAtom) and p.atom in valuation:
        return PFalse() if valuation[p.atom] else TRUE
    if isinstance(p, PAnd):
        return p_and(assign_atoms(a, valuation) for a in p.args)
    if isinstance(p, POr):
        return p_or(assign_atoms(a, valuation) for a in p.args)
    return p


def cube_to_property(cube: Cube, ab: Abstraction) -> Property:
    # negative literals stay literal (PNegAtom) so the guard mentions
    # exactly the C-atoms it was cofactored on
    lits: list[Property] = []
    for ix, pol in cube:
        unit = ab.units[ix]
        assert isinstance(unit, Atom), "guard cubes may mention atoms only"
        lits.append(p_atom(unit) if pol else PNegAtom(unit))
    return p_and(lits)


def cubes_to_property(cubes: list[Cube], ab: Abstraction) -> Property:
    return p_or(cube_to_property(c, ab) for c in cubes)


@dataclass(frozen=True)
class DecompPair:
    guard: Property        # over C-atoms only, no temporal operators
    guard_cubes: tuple[Cube, ...]
    residue: Property      # free of top-layer C-atoms


@dataclass(frozen=True)
class Decomposition:
    pairs: tuple[DecompPair, ...]
    abstraction: Abstraction


def decompose(p: Property, c_atoms: set[Atom]) -> Decomposition:
    """Split an XNF property against the atom set C.

    Enumerates the truth assignments of the occurring C-propositions in
    index order (false before true), groups assignments with
    propositionally equivalent residues, and emits one (guard, residue)
    pair per group, the guard being an irredundant cover of the group.
    """
    ab = abstract(p)
    cof = [ix for ix, u in enumerate(ab.units) if isinstance(u, Atom) and u in c_atoms]
    if len(cof) > MAX_COFACTOR_VARS:
        raise ValueError(f"cofactor enumeration over {len(cof)} atoms refused")
    mgr = Bdd()
    # group key: BDD node of the residue under the shared abstraction
    order: list[int] = []
    residues: dict[int, Property] = {}
    minterms: dict[int, list[int]] = {}
    for bits in itertools.product((False, True), repeat=len(cof)):
        valuation = {ab.units[ix]: val for ix, val in zip(cof, bits)}
        residue = assign_atoms(p, valuation)
        key = bdd_of(mgr, residue, ab)
        if key not in residues:
            order.append(key)
            residues[key] = residue
            minterms[key] = []
        minterms[key].append(mgr.cube(zip(cof, bits)))
    pairs = []
    for key in order:
        guard_node = mgr.disj(minterms[key])
        cubes, _ = mgr.isop(guard_node, guard_node)
        cubes = sorted(cubes)
        pairs.append(DecompPair(
            guard=cubes_to_property(cubes, ab),
            guard_cubes=tuple(cubes),
            residue=residues[key],
        ))
    return Decomposition(tuple(pairs), ab)
