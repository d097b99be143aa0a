"""Reduced ordered binary decision diagrams with irredundant-cover extraction.

One ``Bdd`` manager is scratch state for a single computation; nothing is
shared between calls.  Variables are dense integer indices; the variable
order is the index order.  ``isop`` extracts an irredundant sum of
products (Minato's algorithm), used both to canonicalise guard formulas
and to minimise quantifier-free formulas after elimination.
"""

from __future__ import annotations

from typing import Iterable

FALSE_NODE = 0
TRUE_NODE = 1

# a cube is a sorted tuple of (variable index, polarity)
Cube = tuple[tuple[int, bool], ...]


class Bdd:
    def __init__(self) -> None:
        # node id -> (var, low, high); ids 0/1 are the terminals
        self.nodes: list[tuple[int, int, int]] = [(-1, -1, -1), (-1, -1, -1)]
        self.unique: dict[tuple[int, int, int], int] = {}
        self._ite_cache: dict[tuple[int, int, int], int] = {}

    def mk(self, var: int, low: int, high: int) -> int:
        if low == high:
            return low
        key = (var, low, high)
        found = self.unique.get(key)
        if found is None:
            found = len(self.nodes)
            self.nodes.append(key)
            self.unique[key] = found
        return found

    def var(self, var: int) -> int:
        return self.mk(var, FALSE_NODE, TRUE_NODE)

    def nvar(self, var: int) -> int:
        return self.mk(var, TRUE_NODE, FALSE_NODE)

    def top_var(self, u: int) -> int:
        return self.nodes[u][0]

    def ite(self, f: int, g: int, h: int) -> int:
        if f == TRUE_NODE:
            return g
        if f == FALSE_NODE:
            return h
        if g == h:
            return g
        if g == TRUE_NODE and h == FALSE_NODE:
            return f
        key = (f, g, h)
        found = self._ite_cache.get(key)
        if found is not None:
            return found
        vs = [self.top_var(u) for u in (f, g, h) if u > TRUE_NODE]
        v = min(vs)
        r = self.mk(
            v,
            self.ite(self._cof(f, v, False), self._cof(g, v, False), self._cof(h, v, False)),
            self.ite(self._cof(f, v, True), self._cof(g, v, True), self._cof(h, v, True)),
        )
        self._ite_cache[key] = r
        return r

    def _cof(self, u: int, var: int, val: bool) -> int:
        if u <= TRUE_NODE or self.top_var(u) != var:
            return u
        _, low, high = self.nodes[u]
        return high if val else low

    def apply_not(self, u: int) -> int:
        return self.ite(u, FALSE_NODE, TRUE_NODE)

    def apply_and(self, a: int, b: int) -> int:
        return self.ite(a, b, FALSE_NODE)

    def apply_or(self, a: int, b: int) -> int:
        return self.ite(a, TRUE_NODE, b)

    def conj(self, args: Iterable[int]) -> int:
        out = TRUE_NODE
        for a in args:
            out = self.apply_and(out, a)
        return out

    def disj(self, args: Iterable[int]) -> int:
        out = FALSE_NODE
        for a in args:
            out = self.apply_or(out, a)
        return out

    def restrict(self, u: int, var: int, val: bool) -> int:
        if u <= TRUE_NODE:
            return u
        v, low, high = self.nodes[u]
        if v > var:
            return u
        if v == var:
            return high if val else low
        return self.mk(v, self.restrict(low, var, val), self.restrict(high, var, val))

    def cube(self, literals: Iterable[tuple[int, bool]]) -> int:
        out = TRUE_NODE
        for var, pol in sorted(literals, reverse=True):
            out = self.mk(var, FALSE_NODE if pol else out, out if pol else FALSE_NODE)
        return out

    def support(self, u: int) -> set[int]:
        out: set[int] = set()
        stack, seen = [u], set()
        while stack:
            n = stack.pop()
            if n <= TRUE_NODE or n in seen:
                continue
            seen.add(n)
            v, low, high = self.nodes[n]
            out.add(v)
            stack.extend((low, high))
        return out

    def evaluate(self, u: int, assignment: dict[int, bool]) -> bool:
        while u > TRUE_NODE:
            v, low, high = self.nodes[u]
            u = high if assignment.get(v, False) else low
        return u == TRUE_NODE

    def isop(self, lower: int, upper: int) -> tuple[list[Cube], int]:
        """Irredundant sum of products covering at least ``lower`` and at
        most ``upper``; returns the cubes and the cover's own node."""
        if lower == FALSE_NODE:
            return [], FALSE_NODE
        if upper == TRUE_NODE:
            return [()], TRUE_NODE
        v = min(self.top_var(u) for u in (lower, upper) if u > TRUE_NODE)
        l0, l1 = self.restrict(lower, v, False), self.restrict(lower, v, True)
        u0, u1 = self.restrict(upper, v, False), self.restrict(upper, v, True)
        cubes0, cover0 = self.isop(self.apply_and(l0, self.apply_not(u1)), u0)
        cubes1, cover1 = self.isop(self.apply_and(l1, self.apply_not(u0)), u1)
        rest_lower = self.apply_or(
            self.apply_and(l0, self.apply_not(cover0)),
            self.apply_and(l1, self.apply_not(cover1)),
        )
        cubes_d, cover_d = self.isop(rest_lower, self.apply_and(u0, u1))
        cubes = (
            [tuple(sorted(((v, False),) + c)) for c in cubes0]
            + [tuple(sorted(((v, True),) + c)) for c in cubes1]
            + cubes_d
        )
        cover = self.disj([
            self.apply_and(self.nvar(v), cover0),
            self.apply_and(self.var(v), cover1),
            cover_d,
        ])
        return cubes, cover

    def cover(self, u: int) -> list[Cube]:
        cubes, cover = self.isop(u, u)
        assert cover == u
        return sorted(cubes)
