"""Sorts, linear terms, and canonical arithmetic atoms.

All arithmetic is exact: integers for the int sort, fractions.Fraction for
the real sort.  A variable name ending in the reserved suffix ``@pre``
refers to the value of the base variable at the previous instant.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Union

REAL = "real"
INT = "int"

PRE_SUFFIX = "@pre"

Number = Union[int, Fraction]


def pre_name(name: str) -> str:
    """Lookback-variable name for ``name``."""
    if name.endswith(PRE_SUFFIX):
        raise ValueError(f"already a lookback variable: {name}")
    return name + PRE_SUFFIX


def is_pre(name: str) -> bool:
    return name.endswith(PRE_SUFFIX)


def base_name(name: str) -> str:
    """Strip the lookback marker, if present."""
    return name[: -len(PRE_SUFFIX)] if is_pre(name) else name


class SortError(Exception):
    """Raised on mixed-sort or theory-inconsistent constructions."""


@dataclass(frozen=True)
class LinExpr:
    """Linear expression: sum of coeff*var plus a constant.

    ``coeffs`` is a tuple of (variable name, coefficient) sorted by name;
    zero coefficients are dropped.  Coefficients and the constant are
    Fractions internally; integer-sorted atoms normalise them to ints.
    """

    coeffs: tuple[tuple[str, Fraction], ...]
    const: Fraction

    @staticmethod
    def make(coeffs: Mapping[str, Number], const: Number = 0) -> LinExpr:
        items = []
        for name in sorted(coeffs):
            c = Fraction(coeffs[name])
            if c != 0:
                items.append((name, c))
        return LinExpr(tuple(items), Fraction(const))

    @staticmethod
    def var(name: str) -> LinExpr:
        return LinExpr(((name, Fraction(1)),), Fraction(0))

    @staticmethod
    def constant(value: Number) -> LinExpr:
        return LinExpr((), Fraction(value))

    def as_dict(self) -> dict[str, Fraction]:
        return dict(self.coeffs)

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.coeffs)

    def is_constant(self) -> bool:
        return not self.coeffs

    def coeff(self, name: str) -> Fraction:
        for n, c in self.coeffs:
            if n == name:
                return c
        return Fraction(0)

    def add(self, other: LinExpr) -> LinExpr:
        d = self.as_dict()
        for n, c in other.coeffs:
            d[n] = d.get(n, Fraction(0)) + c
        return LinExpr.make(d, self.const + other.const)

    def scale(self, k: Number) -> LinExpr:
        k = Fraction(k)
        return LinExpr.make({n: c * k for n, c in self.coeffs}, self.const * k)

    def sub(self, other: LinExpr) -> LinExpr:
        return self.add(other.scale(-1))

    def drop(self, name: str) -> LinExpr:
        return LinExpr.make({n: c for n, c in self.coeffs if n != name}, self.const)

    def substitute(self, name: str, replacement: LinExpr) -> LinExpr:
        """Replace a variable by a linear expression."""
        c = self.coeff(name)
        if c == 0:
            return self
        return self.drop(name).add(replacement.scale(c))

    def rename(self, mapping: Mapping[str, str]) -> LinExpr:
        d: dict[str, Fraction] = {}
        for n, c in self.coeffs:
            m = mapping.get(n, n)
            d[m] = d.get(m, Fraction(0)) + c
        return LinExpr.make(d, self.const)

    def evaluate(self, env: Mapping[str, Number]) -> Fraction:
        total = self.const
        for n, c in self.coeffs:
            total += c * Fraction(env[n])
        return total

    def __str__(self) -> str:
        if not self.coeffs:
            return str(self.const)
        parts = []
        for n, c in self.coeffs:
            disp = f"pre({base_name(n)})" if is_pre(n) else n
            if c == 1:
                parts.append(disp)
            elif c == -1:
                parts.append(f"-{disp}")
            else:
                parts.append(f"{c}*{disp}")
        s = " + ".join(parts).replace("+ -", "- ")
        if self.const != 0:
            s += f" + {self.const}" if self.const > 0 else f" - {-self.const}"
        return s


# Comparison operators kept in canonical positive form.  The parser maps
# >, >= and user-level negation onto these by swapping or flipping sides.
LT = "<"
LE = "<="
EQ = "="
NEQ = "distinct"
EQUIV_MOD = "equiv"

FLIP_NEG = {LT: LE, LE: LT, EQ: NEQ, NEQ: EQ}


def _ceil(f: Fraction) -> int:
    return -((-f.numerator) // f.denominator)


def _primitive(expr: LinExpr) -> LinExpr:
    """Positive-scale to integer coefficients with overall gcd 1."""
    nums = [c for _, c in expr.coeffs] + [expr.const]
    denom_lcm = 1
    for v in nums:
        denom_lcm = denom_lcm * v.denominator // gcd(denom_lcm, v.denominator)
    scaled = expr.scale(denom_lcm)
    g = 0
    for _, c in scaled.coeffs:
        g = gcd(g, int(c))
    g = gcd(g, int(scaled.const))
    if g > 1:
        scaled = scaled.scale(Fraction(1, g))
    return scaled


@dataclass(frozen=True)
class Atom:
    """Canonical atom ``expr op 0`` (or ``expr = 0 (mod k)`` for equiv).

    Invariants: integer primitive coefficients; for sign-symmetric
    operators (=, distinct, equiv) the first coefficient is positive; for
    equiv the modulus is >= 1 and the constant is reduced into [0, k).
    """

    op: str
    expr: LinExpr
    modulus: int = 0
    sort: str = REAL

    @staticmethod
    def make(op: str, expr: LinExpr, modulus: int = 0, sort: str = REAL) -> "Atom | bool":
        """Build a canonical atom; constant expressions fold to a bool."""
        if op == EQUIV_MOD:
            if modulus < 1:
                raise ValueError("equiv modulus must be >= 1")
            if sort != INT:
                raise SortError("equiv atoms require the int sort")
            for _, c in list(expr.coeffs) + [("", expr.const)]:
                if c.denominator != 1:
                    raise SortError("equiv atoms require integer terms")
            coeffs = {n: int(c) % modulus for n, c in expr.coeffs}
            const = int(expr.const) % modulus
            expr = LinExpr.make(coeffs, const)
            if expr.is_constant():
                return int(expr.const) % modulus == 0
            return Atom(EQUIV_MOD, expr, modulus, sort)
        expr = _primitive(expr)
        if expr.is_constant():
            v = expr.const
            return {LT: v < 0, LE: v <= 0, EQ: v == 0, NEQ: v != 0}[op]
        if sort == INT:
            if op == LE:
                # over the integers e <= 0 is e < 1, keeping one strict form
                return Atom.make(LT, LinExpr(expr.coeffs, expr.const - 1), 0, sort)
            g = 0
            for _, c in expr.coeffs:
                g = gcd(g, int(c))
            if g > 1:
                if op in (EQ, NEQ):
                    if int(expr.const) % g != 0:
                        return op == NEQ
                    expr = expr.scale(Fraction(1, g))
                else:  # LT: g*t + d < 0  iff  t < -d/g  iff  t - ceil(-d/g) < 0
                    bound = _ceil(Fraction(-int(expr.const), g))
                    coeffs = tuple((n, Fraction(int(c) // g)) for n, c in expr.coeffs)
                    expr = LinExpr(coeffs, Fraction(-bound))
        if op in (EQ, NEQ) and expr.coeffs[0][1] < 0:
            expr = expr.scale(-1)
        return Atom(op, expr, 0, sort)

    @staticmethod
    def compare(op: str, lhs: LinExpr, rhs: LinExpr, sort: str, modulus: int = 0) -> "Atom | bool":
        """Atom for ``lhs op rhs``; >, >= swap onto <, <=."""
        if op in (">", ">="):
            lhs, rhs = rhs, lhs
            op = LT if op == ">" else LE
        return Atom.make(op, lhs.sub(rhs), modulus, sort)

    def negated(self) -> "Atom | bool | None":
        """Atom for the negation, or None when none exists (equiv)."""
        if self.op == EQUIV_MOD:
            return None
        if self.op in (EQ, NEQ):
            return Atom.make(FLIP_NEG[self.op], self.expr, 0, self.sort)
        # not(e < 0) is -e <= 0; not(e <= 0) is -e < 0
        return Atom.make(FLIP_NEG[self.op], self.expr.scale(-1), 0, self.sort)

    @property
    def variables(self) -> tuple[str, ...]:
        return self.expr.variables

    def has_lookback(self) -> bool:
        return any(is_pre(n) for n in self.expr.variables)

    def rename(self, mapping: Mapping[str, str]) -> "Atom":
        res = Atom.make(self.op, self.expr.rename(mapping), self.modulus, self.sort)
        assert isinstance(res, Atom)
        return res

    def substitute(self, name: str, replacement: LinExpr) -> "Atom | bool":
        return Atom.make(self.op, self.expr.substitute(name, replacement), self.modulus, self.sort)

    def holds(self, env: Mapping[str, Number]) -> bool:
        v = self.expr.evaluate(env)
        if self.op == LT:
            return v < 0
        if self.op == LE:
            return v <= 0
        if self.op == EQ:
            return v == 0
        if self.op == NEQ:
            return v != 0
        assert v.denominator == 1
        return int(v) % self.modulus == 0

    def sort_key(self) -> tuple:
        return (self.op, self.modulus, self.expr.coeffs, self.expr.const)

    def __str__(self) -> str:
        pos: dict[str, Fraction] = {}
        neg: dict[str, Fraction] = {}
        for n, c in self.expr.coeffs:
            (pos if c > 0 else neg)[n] = abs(c)
        lhs = LinExpr.make(pos, self.expr.const if self.expr.const > 0 else 0)
        rhs = LinExpr.make(neg, -self.expr.const if self.expr.const < 0 else 0)
        if self.op == EQUIV_MOD:
            return f"{lhs} = {rhs} (mod {self.modulus})"
        op = {LT: "<", LE: "<=", EQ: "=", NEQ: "!=", }[self.op]
        return f"{lhs} {op} {rhs}"


def vars_of_atoms(atoms: Iterable[Atom]) -> set[str]:
    out: set[str] = set()
    for a in atoms:
        out.update(a.variables)
    return out
