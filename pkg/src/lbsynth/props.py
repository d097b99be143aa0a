"""Temporal property ASTs in negation normal form.

Properties are immutable; the ``p_and``/``p_or`` constructors fold the
boolean constants and deduplicate operands, so identities like ``T & p -> p``
hold structurally.  Negation exists only on atoms (``PNegAtom``) and on the
end-of-trace marker (``PNegLast``); ``last`` itself is never written by
users, it enters through ``xnf`` unfolding and through ``rm_next``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

from .terms import Atom


@dataclass(frozen=True)
class Property:
    pass


@dataclass(frozen=True)
class PTrue(Property):
    def __str__(self) -> str:
        return "true"


@dataclass(frozen=True)
class PFalse(Property):
    def __str__(self) -> str:
        return "false"


@dataclass(frozen=True)
class PLast(Property):
    def __str__(self) -> str:
        return "last"


@dataclass(frozen=True)
class PNegLast(Property):
    def __str__(self) -> str:
        return "!last"


@dataclass(frozen=True)
class PAtom(Property):
    atom: Atom

    def __str__(self) -> str:
        return f"({self.atom})"


@dataclass(frozen=True)
class PNegAtom(Property):
    atom: Atom

    def __str__(self) -> str:
        return f"!({self.atom})"


@dataclass(frozen=True)
class PAnd(Property):
    args: tuple[Property, ...]

    def __str__(self) -> str:
        return "(" + " & ".join(map(str, self.args)) + ")"


@dataclass(frozen=True)
class POr(Property):
    args: tuple[Property, ...]

    def __str__(self) -> str:
        return "(" + " | ".join(map(str, self.args)) + ")"


@dataclass(frozen=True)
class PNext(Property):
    arg: Property

    def __str__(self) -> str:
        return f"X{self.arg}"


@dataclass(frozen=True)
class PWeakNext(Property):
    arg: Property

    def __str__(self) -> str:
        return f"Xw{self.arg}"


@dataclass(frozen=True)
class PUntil(Property):
    left: Property
    right: Property

    def __str__(self) -> str:
        return f"({self.left} U {self.right})"


@dataclass(frozen=True)
class PRelease(Property):
    left: Property
    right: Property

    def __str__(self) -> str:
        return f"({self.left} R {self.right})"


TRUE = PTrue()
FALSE = PFalse()
LAST = PLast()
NEG_LAST = PNegLast()


def p_atom(atom: Atom | bool) -> Property:
    if atom is True:
        return TRUE
    if atom is False:
        return FALSE
    return PAtom(atom)


def p_neg_atom(atom: Atom | bool) -> Property:
    """Negated atom; comparisons flip into a positive atom."""
    if atom is True:
        return FALSE
    if atom is False:
        return TRUE
    flipped = atom.negated()
    if flipped is None:
        return PNegAtom(atom)     # only equiv-mod atoms have no flip
    return p_atom(flipped)


def p_and(args: Iterable[Property]) -> Property:
    out: list[Property] = []
    for a in args:
        if isinstance(a, PFalse):
            return FALSE
        if isinstance(a, PTrue):
            continue
        if isinstance(a, PAnd):
            for b in a.args:
                if b not in out:
                    out.append(b)
        elif a not in out:
            out.append(a)
    if not out:
        return TRUE
    if len(out) == 1:
        return out[0]
    return PAnd(tuple(out))


def p_or(args: Iterable[Property]) -> Property:
    out: list[Property] = []
    for a in args:
        if isinstance(a, PTrue):
            return TRUE
        if isinstance(a, PFalse):
            continue
        if isinstance(a, POr):
            for b in a.args:
                if b not in out:
                    out.append(b)
        elif a not in out:
            out.append(a)
    if not out:
        return FALSE
    if len(out) == 1:
        return out[0]
    return POr(tuple(out))


def p_next(arg: Property) -> Property:
    return PNext(arg)


def p_weak_next(arg: Property) -> Property:
    return PWeakNext(arg)


def p_until(left: Property, right: Property) -> Property:
    return PUntil(left, right)


def p_release(left: Property, right: Property) -> Property:
    return PRelease(left, right)


def p_eventually(arg: Property) -> Property:
    return PUntil(TRUE, arg)


def p_always(arg: Property) -> Property:
    return PRelease(FALSE, arg)


def negate(p: Property) -> Property:
    """Dual of an NNF property (used by xnf-level rewrites and tests)."""
    if isinstance(p, PTrue):
        return FALSE
    if isinstance(p, PFalse):
        return TRUE
    if isinstance(p, PLast):
        return NEG_LAST
    if isinstance(p, PNegLast):
        return LAST
    if isinstance(p, PAtom):
        return p_neg_atom(p.atom)
    if isinstance(p, PNegAtom):
        return p_atom(p.atom)
    if isinstance(p, PAnd):
        return p_or(negate(a) for a in p.args)
    if isinstance(p, POr):
        return p_and(negate(a) for a in p.args)
    if isinstance(p, PNext):
        return p_weak_next(negate(p.arg))
    if isinstance(p, PWeakNext):
        return p_next(negate(p.arg))
    if isinstance(p, PUntil):
        return p_release(negate(p.left), negate(p.right))
    if isinstance(p, PRelease):
        return p_until(negate(p.left), negate(p.right))
    raise TypeError(p)


def subproperties(p: Property) -> Iterator[Property]:
    yield p
    if isinstance(p, (PAnd, POr)):
        for a in p.args:
            yield from subproperties(a)
    elif isinstance(p, (PNext, PWeakNext)):
        yield from subproperties(p.arg)
    elif isinstance(p, (PUntil, PRelease)):
        yield from subproperties(p.left)
        yield from subproperties(p.right)


def atoms_of(p: Property) -> list[Atom]:
    """All atoms occurring anywhere in p, deduplicated, in discovery order."""
    seen: list[Atom] = []
    for q in subproperties(p):
        if isinstance(q, (PAtom, PNegAtom)) and q.atom not in seen:
            seen.append(q.atom)
    return seen


def tnps(p: Property) -> list[Property]:
    """Members of the top boolean layer: atoms, last markers, and
    temporal-rooted subproperties.  The boolean constants contribute none."""
    if isinstance(p, (PTrue, PFalse)):
        return []
    if isinstance(p, (PAnd, POr)):
        out: list[Property] = []
        for a in p.args:
            for m in tnps(a):
                if m not in out:
                    out.append(m)
        return out
    return [p]


def xnf(p: Property) -> Property:
    """Unfold until/release one step so that every member of the top
    boolean layer is an atom, a last marker, or rooted by X/Xw."""
    if isinstance(p, (PTrue, PFalse, PAtom, PNegAtom, PLast, PNegLast, PNext, PWeakNext)):
        return p
    if isinstance(p, PAnd):
        return p_and(xnf(a) for a in p.args)
    if isinstance(p, POr):
        return p_or(xnf(a) for a in p.args)
    if isinstance(p, PUntil):
        return p_or([xnf(p.right), p_and([xnf(p.left), p_next(p)])])
    if isinstance(p, PRelease):
        return p_and([p_or([xnf(p.right), LAST]),
                      p_or([xnf(p.left), p_weak_next(p)])])
    raise TypeError(p)


def rm_next(p: Property) -> Property:
    """Strip the outer X/Xw layer of a transition residue, attaching the
    end-marker guards that record strict/weak nexts; bare last markers
    refer to the instant just consumed and resolve to constants."""
    if isinstance(p, (PTrue, PFalse)):
        return p
    if isinstance(p, PLast):
        return FALSE
    if isinstance(p, PNegLast):
        return TRUE
    if isinstance(p, PNext):
        return p_and([p.arg, NEG_LAST])
    if isinstance(p, PWeakNext):
        return p_or([p.arg, LAST])
    if isinstance(p, PAnd):
        return p_and(rm_next(a) for a in p.args)
    if isinstance(p, POr):
        return p_or(rm_next(a) for a in p.args)
    raise ValueError(f"rm_next applied to a non-residue: {p}")


def subst_last(p: Property, value: bool) -> Property:
    """Resolve the top-layer last markers to a constant (constant-folding);
    markers below a temporal operator belong to later instants and stay."""
    if isinstance(p, PLast):
        return TRUE if value else FALSE
    if isinstance(p, PNegLast):
        return FALSE if value else TRUE
    if isinstance(p, PAnd):
        return p_and(subst_last(a, value) for a in p.args)
    if isinstance(p, POr):
        return p_or(subst_last(a, value) for a in p.args)
    return p


class WellFormedness(NamedTuple):
    ok: bool
    offending: Atom | None


def is_well_formed(p: Property) -> WellFormedness:
    """A property is well-formed when no lookback atom is evaluated at the
    first instant, i.e. every atom in the top layer of xnf(p) is
    lookback-free."""
    for m in tnps(xnf(p)):
        if isinstance(m, (PAtom, PNegAtom)) and m.atom.has_lookback():
            return WellFormedness(False, m.atom)
    return WellFormedness(True, None)


def weaken_first_instant(p: Property) -> Property:
    """Equivalent well-formed form of p: unfold once, then resolve the
    top-layer lookback atoms by the first-instant rule (an atom whose
    terms are undefined holds; its negation does not)."""

    def resolve(q: Property) -> Property:
        if isinstance(q, PAtom) and q.atom.has_lookback():
            return TRUE
        if isinstance(q, PNegAtom) and q.atom.has_lookback():
            return FALSE
        if isinstance(q, PAnd):
            return p_and(resolve(a) for a in q.args)
        if isinstance(q, POr):
            return p_or(resolve(a) for a in q.args)
        return q

    if is_well_formed(p).ok:
        return p
    return resolve(xnf(p))


def rename_atoms(p: Property, mapping: dict[str, str]) -> Property:
    if isinstance(p, PAtom):
        return p_atom(p.atom.rename(mapping))
    if isinstance(p, PNegAtom):
        return PNegAtom(p.atom.rename(mapping))
    if isinstance(p, PAnd):
        return p_and(rename_atoms(a, mapping) for a in p.args)
    if isinstance(p, POr):
        return p_or(rename_atoms(a, mapping) for a in p.args)
    if isinstance(p, PNext):
        return p_next(rename_atoms(p.arg, mapping))
    if isinstance(p, PWeakNext):
        return p_weak_next(rename_atoms(p.arg, mapping))
    if isinstance(p, PUntil):
        return p_until(rename_atoms(p.left, mapping), rename_atoms(p.right, mapping))
    if isinstance(p, PRelease):
        return p_release(rename_atoms(p.left, mapping), rename_atoms(p.right, mapping))
    return p
