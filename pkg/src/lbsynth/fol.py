"""First-order formulas over linear arithmetic, in negation normal form.

Literals hold canonical atoms; a negative literal survives only for
modular-equivalence atoms, every other negation flips the comparison.
Ground atoms fold to the boolean constants at construction, so a closed
quantifier-free formula is always exactly FTrue or FFalse.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .terms import Atom, LinExpr, Number, is_pre, pre_name, base_name


@dataclass(frozen=True)
class FOFormula:
    pass


@dataclass(frozen=True)
class FTrue(FOFormula):
    def __str__(self) -> str:
        return "true"


@dataclass(frozen=True)
class FFalse(FOFormula):
    def __str__(self) -> str:
        return "false"


@dataclass(frozen=True)
class FLit(FOFormula):
    atom: Atom
    positive: bool = True

    def __str__(self) -> str:
        return f"({self.atom})" if self.positive else f"!({self.atom})"


@dataclass(frozen=True)
class FAnd(FOFormula):
    args: tuple[FOFormula, ...]

    def __str__(self) -> str:
        return "(" + " & ".join(map(str, self.args)) + ")"


@dataclass(frozen=True)
class FOr(FOFormula):
    args: tuple[FOFormula, ...]

    def __str__(self) -> str:
        return "(" + " | ".join(map(str, self.args)) + ")"


@dataclass(frozen=True)
class FExists(FOFormula):
    bound: tuple[tuple[str, str], ...]   # (name, sort)
    body: FOFormula

    def __str__(self) -> str:
        names = ", ".join(n for n, _ in self.bound)
        return f"(exists {names}. {self.body})"


@dataclass(frozen=True)
class FForall(FOFormula):
    bound: tuple[tuple[str, str], ...]
    body: FOFormula

    def __str__(self) -> str:
        names = ", ".join(n for n, _ in self.bound)
        return f"(forall {names}. {self.body})"


F_TRUE = FTrue()
F_FALSE = FFalse()


def f_lit(atom: Atom | bool, positive: bool = True) -> FOFormula:
    if isinstance(atom, bool):
        return F_TRUE if atom == positive else F_FALSE
    if not positive:
        flipped = atom.negated()
        if flipped is not None:
            return f_lit(flipped)
        return FLit(atom, False)
    return FLit(atom, True)


def f_and(args: Iterable[FOFormula]) -> FOFormula:
    out: list[FOFormula] = []
    for a in args:
        if isinstance(a, FFalse):
            return F_FALSE
        if isinstance(a, FTrue):
            continue
        if isinstance(a, FAnd):
            for b in a.args:
                if b not in out:
                    out.append(b)
        elif a not in out:
            out.append(a)
    if not out:
        return F_TRUE
    return out[0] if len(out) == 1 else FAnd(tuple(out))


def f_or(args: Iterable[FOFormula]) -> FOFormula:
    out: list[FOFormula] = []
    for a in args:
        if isinstance(a, FTrue):
            return F_TRUE
        if isinstance(a, FFalse):
            continue
        if isinstance(a, FOr):
            for b in a.args:
                if b not in out:
                    out.append(b)
        elif a not in out:
            out.append(a)
    if not out:
        return F_FALSE
    return out[0] if len(out) == 1 else FOr(tuple(out))


def f_exists(bound: Iterable[tuple[str, str]], body: FOFormula) -> FOFormula:
    bound = tuple(bound)
    if not bound or isinstance(body, (FTrue, FFalse)):
        return body
    return FExists(bound, body)


def f_forall(bound: Iterable[tuple[str, str]], body: FOFormula) -> FOFormula:
    bound = tuple(bound)
    if not bound or isinstance(body, (FTrue, FFalse)):
        return body
    return FForall(bound, body)


def f_not(f: FOFormula) -> FOFormula:
    if isinstance(f, FTrue):
        return F_FALSE
    if isinstance(f, FFalse):
        return F_TRUE
    if isinstance(f, FLit):
        return f_lit(f.atom, not f.positive)
    if isinstance(f, FAnd):
        return f_or(f_not(a) for a in f.args)
    if isinstance(f, FOr):
        return f_and(f_not(a) for a in f.args)
    if isinstance(f, FExists):
        return f_forall(f.bound, f_not(f.body))
    if isinstance(f, FForall):
        return f_exists(f.bound, f_not(f.body))
    raise TypeError(f)


def f_implies(a: FOFormula, b: FOFormula) -> FOFormula:
    return f_or([f_not(a), b])


def free_vars(f: FOFormula) -> set[str]:
    if isinstance(f, FLit):
        return set(f.atom.variables)
    if isinstance(f, (FAnd, FOr)):
        out: set[str] = set()
        for a in f.args:
            out |= free_vars(a)
        return out
    if isinstance(f, (FExists, FForall)):
        return free_vars(f.body) - {n for n, _ in f.bound}
    return set()


def substitute(f: FOFormula, env: Mapping[str, LinExpr]) -> FOFormula:
    """Capture-free substitution (bound names must not occur in env)."""
    if isinstance(f, FLit):
        expr = f.atom.expr
        for name, repl in env.items():
            expr = expr.substitute(name, repl)
        return f_lit(Atom.make(f.atom.op, expr, f.atom.modulus, f.atom.sort), f.positive)
    if isinstance(f, FAnd):
        return f_and(substitute(a, env) for a in f.args)
    if isinstance(f, FOr):
        return f_or(substitute(a, env) for a in f.args)
    if isinstance(f, (FExists, FForall)):
        for n, _ in f.bound:
            if n in env:
                raise ValueError(f"substitution captures bound variable {n}")
        ctor = f_exists if isinstance(f, FExists) else f_forall
        return ctor(f.bound, substitute(f.body, env))
    return f


def substitute_values(f: FOFormula, env: Mapping[str, Number]) -> FOFormula:
    return substitute(f, {k: LinExpr.constant(v) for k, v in env.items()})


def rename_free(f: FOFormula, mapping: Mapping[str, str]) -> FOFormula:
    if isinstance(f, FLit):
        return f_lit(f.atom.rename(mapping), f.positive)
    if isinstance(f, FAnd):
        return f_and(rename_free(a, mapping) for a in f.args)
    if isinstance(f, FOr):
        return f_or(rename_free(a, mapping) for a in f.args)
    if isinstance(f, (FExists, FForall)):
        inner = {k: v for k, v in mapping.items() if k not in {n for n, _ in f.bound}}
        ctor = f_exists if isinstance(f, FExists) else f_forall
        return ctor(f.bound, rename_free(f.body, inner))
    return f


def to_lookback(f: FOFormula) -> FOFormula:
    """Rename every current-instant variable to its lookback copy."""
    mapping = {n: pre_name(n) for n in free_vars(f) if not is_pre(n)}
    return rename_free(f, mapping)


def from_lookback(f: FOFormula) -> FOFormula:
    """Rename every lookback variable to its current-instant copy."""
    mapping = {n: base_name(n) for n in free_vars(f) if is_pre(n)}
    return rename_free(f, mapping)


def evaluate(f: FOFormula, env: Mapping[str, Number]) -> bool:
    """Evaluate a quantifier-free formula under a total assignment."""
    if isinstance(f, FTrue):
        return True
    if isinstance(f, FFalse):
        return False
    if isinstance(f, FLit):
        return f.atom.holds(env) == f.positive
    if isinstance(f, FAnd):
        return all(evaluate(a, env) for a in f.args)
    if isinstance(f, FOr):
        return any(evaluate(a, env) for a in f.args)
    raise ValueError(f"not quantifier-free: {f}")


def literals(f: FOFormula) -> list[FLit]:
    out: list[FLit] = []

    def walk(g: FOFormula) -> None:
        if isinstance(g, FLit) and g not in out:
            out.append(g)
        elif isinstance(g, (FAnd, FOr)):
            for a in g.args:
                walk(a)
        elif isinstance(g, (FExists, FForall)):
            walk(g.body)

    walk(f)
    return out


def is_quantifier_free(f: FOFormula) -> bool:
    if isinstance(f, (FExists, FForall)):
        return False
    if isinstance(f, (FAnd, FOr)):
        return all(is_quantifier_free(a) for a in f.args)
    return True
