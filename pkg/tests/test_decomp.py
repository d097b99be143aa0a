import itertools
import random


from conftest import atom_pool, prop_truth, prop_units, random_property, truth_assignments
from lbsynth.decomp import (
    abstract,
    assign_atoms,
    decompose,
    prop_equiv,
    )
from lbsynth.props import (
    FALSE,
    LAST,
    PAtom,
    PNegAtom,
    TRUE,
    atoms_of,
    p_and,
    p_atom,
    p_eventually,
    p_next,
    p_or,
    rm_next,
    tnps,
    xnf,
)
from lbsynth.semantics import progress
from lbsynth.terms import Atom, LinExpr, REAL

X, Y = LinExpr.var("x"), LinExpr.var("y")
PX, PY = LinExpr.var("x@pre"), LinExpr.var("y@pre")


def atom(op, lhs, rhs):
    return p_atom(Atom.compare(op, lhs, rhs, REAL))


def example_4_xnf():
    psi2 = p_eventually(p_or([atom("<", X, LinExpr.constant(0)),
                              atom(">", X.sub(PX), LinExpr.constant(2))]))
    return p_or([atom("<", X, LinExpr.constant(0)), p_next(psi2),
                 p_next(atom(">", PY, X))])


class TestAbstract:
    def test_example_4(self):
        p = example_4_xnf()
        ab = abstract(p)
        assert len(ab.units) == 3
        assert isinstance(ab.units[0], Atom)

    def test_true_empty(self):
        assert abstract(TRUE).units == []

    def test_duplicate_atom_single_unit(self):
        a = atom("<", X, Y)
        ab = abstract(p_and([a, a]))
        assert len(ab.units) == 1

    def test_last_reserved_unit(self):
        from lbsynth.props import NEG_LAST
        ab = abstract(p_or([atom("<", X, Y), NEG_LAST]))
        assert LAST in ab.units


class TestDecomposeExamples:
    def test_paper_example(self):
        p = example_4_xnf()
        c = {atoms_of(p)[0]}            # {x < 0}
        dec = decompose(p, c)
        residues = [pr.residue for pr in dec.pairs]
        assert TRUE in residues
        other = [r for r in residues if r != TRUE][0]
        assert prop_equiv(other, p_or([tnps(p)[1], tnps(p)[2]]))
        assert len(dec.pairs) == 2

    def test_true_decomposition(self):
        dec = decompose(TRUE, set())
        assert len(dec.pairs) == 1
        assert dec.pairs[0].guard == TRUE and dec.pairs[0].residue == TRUE

    def test_conjunction_truth_table(self):
        a, b = atom("<", X, Y), atom("=", X, Y)
        dec = decompose(p_and([a, b]), {a.atom})
        # one pair per cofactor of a: (a, b) and (!a, false)
        got = {(str(pr.guard), str(pr.residue)) for pr in dec.pairs}
        assert len(dec.pairs) == 2
        assert any(pr.residue == b for pr in dec.pairs)
        assert any(pr.residue == FALSE for pr in dec.pairs)


def check_conditions(p, c_atoms):
    """The five decomposition conditions, verified by direct truth tables
    over the property's opaque units (independent of the BDD route)."""
    dec = decompose(p, c_atoms)
    units = prop_units(p, [])
    for valuation in truth_assignments(units):
        # (1) representation
        rebuilt = any(
            prop_truth(pr.guard, valuation) and prop_truth(pr.residue, valuation)
            for pr in dec.pairs
        )
        assert rebuilt == prop_truth(p, valuation)
        # (3) pairwise disjoint and (4) covering
        hits = [pr for pr in dec.pairs if prop_truth(pr.guard, valuation)]
        assert len(hits) == 1
    # (2) guards over C without temporal operators, residues C-free on top
    for pr in dec.pairs:
        for member in tnps(pr.guard):
            assert isinstance(member, (PAtom, PNegAtom))
            assert member.atom in c_atoms
        for member in tnps(pr.residue):
            if isinstance(member, (PAtom, PNegAtom)):
                assert member.atom not in c_atoms
    # (5) compressed: residues pairwise inequivalent
    for i, a in enumerate(dec.pairs):
        for b in dec.pairs[i + 1:]:
            assert not prop_equiv(a.residue, b.residue)
    return dec


class TestDecomposeConditions:
    def test_random_sweep(self):
        rng = random.Random(41)
        pool = atom_pool("lra")
        for _ in range(120):
            p = xnf(random_property(rng, pool, 3))
            atoms = atoms_of(p)
            chosen = {a for a in atoms if rng.random() < 0.5}
            check_conditions(p, chosen)

    def test_progression_consistency_full_c(self):
        # with C covering every atom, the pair selected by an atom set
        # progresses exactly to the stripped residue
        rng = random.Random(43)
        pool = atom_pool("lra")
        for _ in range(80):
            p = xnf(random_property(rng, pool, 3))
            atoms = atoms_of(p)
            dec = decompose(p, set(atoms))
            for bits in itertools.product((False, True), repeat=len(atoms)):
                chosen = frozenset(a for a, bit in zip(atoms, bits) if bit)
                valuation = {a: a in chosen for a in atoms}
                valuation[LAST] = False
                hits = [pr for pr in dec.pairs if prop_truth(pr.guard, valuation)]
                assert len(hits) == 1
                assert prop_equiv(progress(p, chosen), rm_next(hits[0].residue))


class TestPropEquiv:
    def test_commutativity(self):
        a, b = atom("<", X, Y), atom("=", X, Y)
        assert prop_equiv(p_or([a, b]), p_or([b, a]))

    def test_label_reuse_after_fold(self):
        from lbsynth.props import NEG_LAST, subst_last
        psi2 = p_eventually(atom("<", X, LinExpr.constant(0)))
        dressed = rm_next(p_next(psi2))
        assert prop_equiv(subst_last(dressed, False), psi2)

    def test_against_truth_tables_random(self):
        rng = random.Random(47)
        pool = atom_pool("lra")
        agree = 0
        for _ in range(500):
            p = random_property(rng, pool, 2)
            q = random_property(rng, pool, 2)
            units = prop_units(p, [])
            prop_units(q, units)
            table_equal = all(
                prop_truth(p, v) == prop_truth(q, v)
                for v in truth_assignments(units)
            )
            assert prop_equiv(p, q) == table_equal
            agree += 1
        assert agree == 500

    def test_assign_atoms_is_top_layer_only(self):
        a = atom("<", X, Y)
        p = p_and([a, p_next(a)])
        got = assign_atoms(p, {a.atom: True})
        assert got == p_next(a)
