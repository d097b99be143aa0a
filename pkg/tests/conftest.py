"""Shared fixtures: example specifications, random generators, and small
independent oracles (truth tables, box enumeration, trace enumeration)."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from lbsynth import fol
from lbsynth.parser import parse_spec
from lbsynth.props import (
    PAtom,
    Property,
    p_always,
    p_and,
    p_atom,
    p_eventually,
    p_neg_atom,
    p_next,
    p_or,
    p_release,
    p_until,
    p_weak_next,
)
from lbsynth.semantics import Trace
from lbsynth.terms import Atom, INT, LinExpr, REAL

# ---- worked example specifications -----------------------------------------

EX4_SPEC = """
(spec (theory lra)
      (env (x real))
      (agent (y real))
      (assume (and (G (>= x 0)) (WX (G (<= (- x (pre x)) 2)))))
      (property (X (> (pre y) x))))
"""

EX7_SPEC = """
(spec (theory lia)
      (env (x int) (u int))
      (agent (y int))
      (assume (and (>= u 0) (= x 0) (WX (G (= x (+ (pre x) 1))))))
      (property (and (= y u) (F (= x y)) (X (G (= y (pre y)))))))
"""

A3_PROPERTY = "(G (and (implies (< x 2) (X (> y 1))) (implies (>= x 2) (< y x))))"

MC_BENCH_SPEC = """
(spec (theory lra)
      (env (x real))
      (agent (y real))
      (property (U (> x (pre x)) (and (= x y) (= y 10)))))
"""

IPC_BENCH_SPEC = """
(spec (theory lia)
      (env (x int))
      (agent (y int))
      (property (and (F (G (= x (pre x)))) (G (equiv 3 y 0)))))
"""


def spec_text(theory: str, prop: str, env="(x {s})", agent="(y {s})") -> str:
    s = "int" if theory == "lia" else "real"
    return (f"(spec (theory {theory}) (env {env.format(s=s)}) "
            f"(agent {agent.format(s=s)}) (property {prop}))")


# realizable benchmark corpus for strategy soundness sweeps
REALIZABLE_BENCH = [
    ("ex4", EX4_SPEC),
    ("eq", spec_text("lra", "(= x y)")),
    ("eq-lia", spec_text("lia", "(= x y)")),
    ("g-eq", spec_text("lra", "(G (= x y))")),
    ("g-copy", spec_text("lra", "(G (= y (pre x)))")),
    ("g-copy-lia", spec_text("lia", "(G (= y (pre x)))")),
    ("weak-pre", spec_text("lra", "(= (pre y) x)")),
    ("f-impl", spec_text("lia", "(F (implies (= x 1) (X (F (= (pre y) x)))))")),
    ("true", spec_text("lra", "true")),
    ("xw-bound", spec_text("lra", "(WX (> y 1))")),
]


@pytest.fixture(scope="session")
def ex4_problem():
    return parse_spec(EX4_SPEC)


# ---- random generators -------------------------------------------------------


def atom_pool(theory: str) -> list[Atom]:
    """Small mixed pool over x (environment) and y (agent), with lookback."""
    sort = INT if theory == "lia" else REAL
    x, y = LinExpr.var("x"), LinExpr.var("y")
    px, py = LinExpr.var("x@pre"), LinExpr.var("y@pre")
    pool = [
        Atom.compare("<", x, LinExpr.constant(1), sort),
        Atom.compare(">=", x, LinExpr.constant(0), sort),
        Atom.compare("=", x, y, sort),
        Atom.compare("<=", y, x, sort),
        Atom.compare(">", x, px, sort),
        Atom.compare("=", y, px, sort),
        Atom.compare("<", py, x, sort),
    ]
    return [a for a in pool if not isinstance(a, bool)]


def random_property(rng: random.Random, atoms: list[Atom], depth: int,
                    allow_lookback_top: bool = True) -> Property:
    """Random NNF property; lookback atoms only below X/Xw unless allowed."""
    choices = ["atom", "neg"]
    if depth > 0:
        choices += ["and", "or", "next", "wnext", "until", "release", "F", "G"]
    kind = rng.choice(choices)
    if kind in ("atom", "neg"):
        usable = atoms if allow_lookback_top else [a for a in atoms if not a.has_lookback()]
        atom = rng.choice(usable)
        return p_atom(atom) if kind == "atom" else p_neg_atom(atom)
    sub = lambda top: random_property(rng, atoms, depth - 1, top)  # noqa: E731
    if kind == "and":
        return p_and([sub(allow_lookback_top), sub(allow_lookback_top)])
    if kind == "or":
        return p_or([sub(allow_lookback_top), sub(allow_lookback_top)])
    if kind == "next":
        return p_next(sub(True))
    if kind == "wnext":
        return p_weak_next(sub(True))
    if kind == "until":
        return p_until(sub(allow_lookback_top), sub(allow_lookback_top))
    if kind == "release":
        return p_release(sub(allow_lookback_top), sub(allow_lookback_top))
    if kind == "F":
        return p_eventually(sub(allow_lookback_top))
    return p_always(sub(allow_lookback_top))


def random_well_formed(rng: random.Random, atoms: list[Atom], depth: int) -> Property:
    from lbsynth.props import is_well_formed
    for _ in range(200):
        p = random_property(rng, atoms, depth, allow_lookback_top=False)
        if is_well_formed(p).ok:
            return p
    raise AssertionError("generator failed to produce a well-formed property")


def random_trace(rng: random.Random, theory: str, length: int,
                 domain: list[int]) -> Trace:
    steps = tuple(
        {"x": Fraction(rng.choice(domain)), "y": Fraction(rng.choice(domain))}
        for _ in range(length)
    )
    return Trace(theory, steps)


def all_traces(theory: str, length: int, domain: list[int]):
    """Every trace of exactly `length` steps over the x/y domain grid."""
    cells = [
        {"x": Fraction(a), "y": Fraction(b)} for a in domain for b in domain
    ]
    for combo in itertools.product(cells, repeat=length):
        yield Trace(theory, tuple(dict(c) for c in combo))


# ---- independent oracles ------------------------------------------------------


def truth_assignments(units: list):
    for bits in itertools.product((False, True), repeat=len(units)):
        yield dict(zip(units, bits))


def prop_truth(p: Property, valuation) -> bool:
    """Direct propositional evaluation of a property over opaque units
    (atoms, last, temporal-rooted members); independent of the BDD path."""
    from lbsynth.props import (
        LAST,
        PAnd,
        PAtom,
        PFalse,
        PLast,
        PNegAtom,
        PNegLast,
        POr,
        PTrue,
    )

    if isinstance(p, PTrue):
        return True
    if isinstance(p, PFalse):
        return False
    if isinstance(p, PLast):
        return valuation[LAST]
    if isinstance(p, PNegLast):
        return not valuation[LAST]
    if isinstance(p, PAtom):
        return valuation[p.atom]
    if isinstance(p, PNegAtom):
        return not valuation[p.atom]
    if isinstance(p, PAnd):
        return all(prop_truth(a, valuation) for a in p.args)
    if isinstance(p, POr):
        return any(prop_truth(a, valuation) for a in p.args)
    return valuation[p]


def prop_units(p: Property, acc: list) -> list:
    """Opaque units of a property in discovery order (test-side mirror)."""
    from lbsynth.props import (
        LAST,
        PAnd,
        PAtom,
        PFalse,
        PLast,
        PNegAtom,
        PNegLast,
        POr,
        PTrue,
    )

    if isinstance(p, (PTrue, PFalse)):
        return acc
    if isinstance(p, (PLast, PNegLast)):
        if LAST not in acc:
            acc.append(LAST)
    elif isinstance(p, (PAtom, PNegAtom)):
        if p.atom not in acc:
            acc.append(p.atom)
    elif isinstance(p, (PAnd, POr)):
        for a in p.args:
            prop_units(a, acc)
    else:
        if p not in acc:
            acc.append(p)
    return acc


def fo_box_eval(f, env: dict, box) -> bool:
    """Evaluate a first-order formula with quantifiers enumerated over a
    finite box of values; the brute-force oracle for QE tests."""
    if isinstance(f, fol.FExists):
        (name, _), rest = f.bound[0], f.bound[1:]
        inner = fol.FExists(rest, f.body) if rest else f.body
        return any(fo_box_eval(inner, {**env, name: v}, box) for v in box)
    if isinstance(f, fol.FForall):
        (name, _), rest = f.bound[0], f.bound[1:]
        inner = fol.FForall(rest, f.body) if rest else f.body
        return all(fo_box_eval(inner, {**env, name: v}, box) for v in box)
    if isinstance(f, fol.FAnd):
        return all(fo_box_eval(a, env, box) for a in f.args)
    if isinstance(f, fol.FOr):
        return any(fo_box_eval(a, env, box) for a in f.args)
    if isinstance(f, fol.FTrue):
        return True
    if isinstance(f, fol.FFalse):
        return False
    return f.atom.holds(env) == f.positive


# ---- acceptance reporting ------------------------------------------------------


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if "test_acceptance" in report.nodeid and name.startswith("test_a"):
        criterion = name.split("_")[1].upper()
        if hasattr(report, "wasxfail"):
            outcome = "XFAIL (documented: expected value unattainable; see the test's reason)"
        else:
            outcome = report.outcome.upper()
        print(f"\nACCEPTANCE {criterion}: {outcome}")
