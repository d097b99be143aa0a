"""Finite-trace semantics and progression.

The direct evaluator implements the weak first-instant rule: an atom whose
terms refer to the instant before the trace starts holds vacuously, and
its negation does not.  Progression rewrites a property by one observed
set of atoms; a trace satisfies a property exactly when progressing
through its atom-set sequence (closed by a final end-marker step) leaves
the constant true.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .props import (
    LAST,
    NEG_LAST,
    PAnd,
    PAtom,
    PFalse,
    PLast,
    PNegAtom,
    PNegLast,
    PNext,
    POr,
    PRelease,
    PTrue,
    PUntil,
    PWeakNext,
    Property,
    FALSE,
    TRUE,
    atoms_of,
    p_and,
    p_or,
)
from .terms import LinExpr, is_pre, pre_name

NOT_WELL_DEFINED = object()

Assignment = dict[str, Fraction]


def fuse(prev: Mapping[str, Fraction] | None, cur: Mapping[str, Fraction]) -> Assignment:
    """Assignment over V plus the lookback copies of the previous one."""
    env = dict(cur)
    if prev is not None:
        for name, value in prev.items():
            env[pre_name(name)] = value
    return env


@dataclass(frozen=True)
class Trace:
    theory: str
    steps: tuple[Assignment, ...]

    def __post_init__(self) -> None:
        if not self.steps:
            raise ValueError("traces are nonempty")
        keys = set(self.steps[0])
        for st in self.steps:
            if set(st) != keys:
                raise ValueError("all steps must assign the same variables")

    def __len__(self) -> int:
        return len(self.steps)

    def env_at(self, i: int) -> Assignment:
        return fuse(self.steps[i - 1] if i > 0 else None, self.steps[i])

    def to_json(self) -> str:
        def fmt(v: Fraction) -> str:
            v = Fraction(v)
            return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"

        return json.dumps({
            "theory": self.theory,
            "steps": [{k: fmt(v) for k, v in sorted(st.items())} for st in self.steps],
        })

    @staticmethod
    def from_json(text: str) -> "Trace":
        doc = json.loads(text)
        steps = tuple(
            {k: parse_number(v) for k, v in st.items()} for st in doc["steps"]
        )
        return Trace(doc["theory"], steps)


def parse_number(text: str) -> Fraction:
    return Fraction(str(text).replace("−", "-").strip())


def eval_term(expr: LinExpr, trace: Trace, i: int):
    """Value of a linear term at instant i, or NOT_WELL_DEFINED when the
    term looks back past the start of the trace."""
    if not 0 <= i < len(trace):
        raise IndexError(i)
    if i == 0 and any(is_pre(n) for n in expr.variables):
        return NOT_WELL_DEFINED
    return expr.evaluate(trace.env_at(i))


def eval_at(trace: Trace, p: Property, i: int) -> bool:
    n = len(trace)
    if not 0 <= i < n:
        raise IndexError(i)
    if isinstance(p, PTrue):
        return True
    if isinstance(p, PFalse):
        return False
    # the end marker names the position after the trace, never an instant
    if isinstance(p, PLast):
        return False
    if isinstance(p, PNegLast):
        return True
    if isinstance(p, PAtom):
        if i == 0 and p.atom.has_lookback():
            return True
        return p.atom.holds(trace.env_at(i))
    if isinstance(p, PNegAtom):
        if i == 0 and p.atom.has_lookback():
            return False
        return not p.atom.holds(trace.env_at(i))
    if isinstance(p, PAnd):
        return all(eval_at(trace, a, i) for a in p.args)
    if isinstance(p, POr):
        return any(eval_at(trace, a, i) for a in p.args)
    if isinstance(p, PNext):
        return i < n - 1 and eval_at(trace, p.arg, i + 1)
    if isinstance(p, PWeakNext):
        return i == n - 1 or eval_at(trace, p.arg, i + 1)
    if isinstance(p, PUntil):
        for j in range(i, n):
            if eval_at(trace, p.right, j):
                return True
            if not eval_at(trace, p.left, j):
                return False
        return False
    if isinstance(p, PRelease):
        for j in range(i, n):
            if not eval_at(trace, p.right, j):
                return False
            if eval_at(trace, p.left, j):
                return True
        return True
    raise TypeError(p)


def evaluate(trace: Trace, p: Property) -> bool:
    return eval_at(trace, p, 0)


AtomSet = frozenset


def progress(p: Property, atoms: AtomSet) -> Property:
    """One-step rewriting against an observed atom set (plus, possibly,
    the LAST marker); the result is constant-folded."""
    if isinstance(p, (PTrue, PFalse)):
        return p
    if isinstance(p, PLast):
        return TRUE if LAST in atoms else FALSE
    if isinstance(p, PNegLast):
        return FALSE if LAST in atoms else TRUE
    if isinstance(p, PAtom):
        return TRUE if p.atom in atoms else FALSE
    if isinstance(p, PNegAtom):
        return FALSE if p.atom in atoms else TRUE
    if isinstance(p, PAnd):
        return p_and(progress(a, atoms) for a in p.args)
    if isinstance(p, POr):
        return p_or(progress(a, atoms) for a in p.args)
    if isinstance(p, PNext):
        return p_and([p.arg, NEG_LAST])
    if isinstance(p, PWeakNext):
        return p_or([p.arg, LAST])
    if isinstance(p, PUntil):
        return p_or([
            progress(p.right, atoms),
            p_and([progress(p.left, atoms), progress(PNext(p), atoms)]),
        ])
    if isinstance(p, PRelease):
        return p_and([
            progress(p.right, atoms),
            p_or([progress(p.left, atoms), progress(PWeakNext(p), atoms)]),
        ])
    raise TypeError(p)


def progress_seq(p: Property, sets: Sequence[AtomSet]) -> Property:
    out = p
    for atoms in sets:
        out = progress(out, atoms)
    return out


END_MARKER_SET: AtomSet = frozenset({LAST})


def seq_of_trace(p: Property, trace: Trace) -> list[AtomSet]:
    """Atom-set sequence of a trace: which atoms of p hold at each instant
    (at the first instant only the lookback-free ones), closed by the
    virtual end-marker set that discharges weak-next obligations."""
    pool = atoms_of(p)
    sets: list[AtomSet] = []
    first = {a for a in pool if not a.has_lookback() and a.holds(trace.env_at(0))}
    sets.append(frozenset(first))
    for i in range(1, len(trace)):
        env = trace.env_at(i)
        sets.append(frozenset(a for a in pool if a.holds(env)))
    sets.append(END_MARKER_SET)
    return sets


def seq_models(sets: Sequence[AtomSet], i: int, p: Property) -> bool:
    """Propositional finite-trace semantics over an atom-set sequence of
    real instants; position len(sets) is the past-the-end position where
    only the end marker holds."""
    n = len(sets)
    if not 0 <= i <= n:
        raise IndexError(i)
    at_end = i == n
    if isinstance(p, PTrue):
        return True
    if isinstance(p, PFalse):
        return False
    if isinstance(p, PLast):
        return at_end
    if isinstance(p, PNegLast):
        return not at_end
    if isinstance(p, PAtom):
        return (not at_end) and p.atom in sets[i]
    if isinstance(p, PNegAtom):
        return at_end or p.atom not in sets[i]
    if isinstance(p, PAnd):
        return all(seq_models(sets, i, a) for a in p.args)
    if isinstance(p, POr):
        return any(seq_models(sets, i, a) for a in p.args)
    if isinstance(p, PNext):
        return i < n - 1 and seq_models(sets, i + 1, p.arg)
    if isinstance(p, PWeakNext):
        return i >= n - 1 or seq_models(sets, i + 1, p.arg)
    if isinstance(p, PUntil):
        for j in range(i, n):
            if seq_models(sets, j, p.right):
                return True
            if not seq_models(sets, j, p.left):
                return False
        return False
    if isinstance(p, PRelease):
        for j in range(i, n):
            if not seq_models(sets, j, p.right):
                return False
            if seq_models(sets, j, p.left):
                return True
        return True
    raise TypeError(p)
