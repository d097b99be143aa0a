"""Quantifier elimination and decisions for linear arithmetic.

Rational variables are eliminated by Fourier-Motzkin bound combination,
integer variables by Cooper's method; universal quantifiers dualize onto
the existential path.  Everything operates on cube covers extracted from
a decision diagram over the literal abstraction, so propositional
structure is canonicalised for free along the way.  All arithmetic is
exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping

from .boolfn import Bdd, FALSE_NODE, TRUE_NODE
from .fol import (
    FAnd,
    FExists,
    FFalse,
    FForall,
    FLit,
    FOr,
    FOFormula,
    FTrue,
    F_FALSE,
    F_TRUE,
    evaluate,
    f_and,
    f_exists,
    f_forall,
    f_lit,
    f_not,
    f_or,
    free_vars,
    is_quantifier_free,
    substitute_values,
)
from .terms import Atom, EQ, EQUIV_MOD, INT, LE, LT, NEQ, LinExpr, Number, REAL


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _ceil(f: Fraction) -> int:
    return -((-f.numerator) // f.denominator)


def _floor(f: Fraction) -> int:
    return f.numerator // f.denominator


Cube = tuple[FLit, ...]


class QeError(Exception):
    pass


@dataclass
class TheoryBackend:
    """Decision procedures for one of the two linear-arithmetic theories."""

    theory: str  # "lra" | "lia"
    stats: dict = field(default_factory=lambda: {"eliminations": 0, "literals": 0})

    @property
    def sort(self) -> str:
        return INT if self.theory == "lia" else REAL

    # ---- cube covers ----------------------------------------------------

    def _cubes(self, f: FOFormula) -> list[Cube]:
        """Irredundant cube cover of a quantifier-free formula."""
        atoms: list[Atom] = []
        index: dict[Atom, int] = {}

        def learn(a: Atom) -> int:
            if a not in index:
                index[a] = len(atoms)
                atoms.append(a)
            return index[a]

        mgr = Bdd()

        def build(g: FOFormula) -> int:
            if isinstance(g, FTrue):
                return TRUE_NODE
            if isinstance(g, FFalse):
                return FALSE_NODE
            if isinstance(g, FLit):
                ix = learn(g.atom)
                return mgr.var(ix) if g.positive else mgr.nvar(ix)
            if isinstance(g, FAnd):
                return mgr.conj(build(a) for a in g.args)
            if isinstance(g, FOr):
                return mgr.disj(build(a) for a in g.args)
            raise QeError(f"not quantifier-free: {g}")

        node = build(f)
        if node == FALSE_NODE:
            return []
        if node == TRUE_NODE:
            return [()]
        cubes, _ = mgr.isop(node, node)
        out: list[Cube] = []
        for cube in sorted(cubes):
            lits = []
            for ix, pol in cube:
                lit = f_lit(atoms[ix], pol)
                assert isinstance(lit, FLit)
                lits.append(lit)
            out.append(tuple(lits))
        return out

    @staticmethod
    def _cube_formula(cube: Cube) -> FOFormula:
        return f_and(cube)

    # ---- quantifier elimination -----------------------------------------

    def qe(self, f: FOFormula) -> FOFormula:
        """Quantifier-free equivalent of f, simplified."""
        return self.simplify(self._qe_raw(f))

    def _qe_raw(self, f: FOFormula) -> FOFormula:
        if isinstance(f, (FTrue, FFalse, FLit)):
            return f
        if isinstance(f, FAnd):
            return f_and(self._qe_raw(a) for a in f.args)
        if isinstance(f, FOr):
            return f_or(self._qe_raw(a) for a in f.args)
        if isinstance(f, FExists):
            body = self._qe_raw(f.body)
            for name, sort in reversed(f.bound):
                if sort != self.sort:
                    raise QeError(f"variable {name}:{sort} in a {self.theory} problem")
                body = self._eliminate(name, body)
            return body
        if isinstance(f, FForall):
            return f_not(self._qe_raw(FExists(f.bound, f_not(f.body))))
        raise TypeError(f)

    def _eliminate(self, var: str, body: FOFormula) -> FOFormula:
        """Existentially eliminate one variable from a QF formula."""
        self.stats["eliminations"] += 1
        if var not in free_vars(body):
            return body
        parts = []
        for cube in self._cubes(body):
            for split in self._split_neq(var, cube):
                parts.append(self._eliminate_cube(var, split))
        result = f_or(parts)
        self.stats["literals"] += len(
            [1 for _ in self._iter_lits(result)]
        )
        return result

    @staticmethod
    def _iter_lits(f: FOFormula):
        if isinstance(f, FLit):
            yield f
        elif isinstance(f, (FAnd, FOr)):
            for a in f.args:
                yield from TheoryBackend._iter_lits(a)

    def _split_neq(self, var: str, cube: Cube) -> list[Cube]:
        """Replace var-bearing disequalities by the two strict orders."""
        out: list[Cube] = [()]
        for lit in cube:
            if (
                lit.positive
                and lit.atom.op == NEQ
                and lit.atom.expr.coeff(var) != 0
            ):
                lo = f_lit(Atom.make(LT, lit.atom.expr, 0, lit.atom.sort))
                hi = f_lit(Atom.make(LT, lit.atom.expr.scale(-1), 0, lit.atom.sort))
                branches = [b for b in (lo, hi) if isinstance(b, FLit)]
                out = [c + (b,) for c in out for b in branches]
            else:
                out = [c + (lit,) for c in out]
        return out

    def _eliminate_cube(self, var: str, cube: Cube) -> FOFormula:
        rest = [lit for lit in cube if lit.atom.expr.coeff(var) == 0]
        mine = [lit for lit in cube if lit.atom.expr.coeff(var) != 0]
        if not mine:
            return f_and(cube)
        if self.sort == REAL:
            head = self._fm_eliminate(var, mine)
        else:
            head = self._cooper_eliminate(var, mine)
        return f_and(rest + [head])

    # ---- Fourier-Motzkin (rationals) -------------------------------------

    def _fm_eliminate(self, var: str, lits: list[FLit]) -> FOFormula:
        lowers: list[tuple[LinExpr, bool]] = []   # (bound, strict)
        uppers: list[tuple[LinExpr, bool]] = []
        equalities: list[LinExpr] = []
        for lit in lits:
            atom = lit.atom
            assert lit.positive and atom.op in (LT, LE, EQ), f"unexpected {lit}"
            c = atom.expr.coeff(var)
            bound = atom.expr.drop(var).scale(Fraction(-1) / c)
            if atom.op == EQ:
                equalities.append(bound)
            elif c > 0:      # c*v + r < 0  ->  v < -r/c
                uppers.append((bound, atom.op == LT))
            else:            # c < 0: v > bound
                lowers.append((bound, atom.op == LT))
        if equalities:
            value = equalities[0]
            subs = []
            for lit in lits:
                atom = lit.atom
                if atom.expr.coeff(var) != 0:
                    subs.append(f_lit(atom.substitute(var, value), lit.positive))
            return f_and(subs)
        combos = []
        for lo, lo_strict in lowers:
            for up, up_strict in uppers:
                op = LT if (lo_strict or up_strict) else LE
                combos.append(f_lit(Atom.make(op, lo.sub(up), 0, REAL)))
        return f_and(combos)

    # ---- Cooper (integers) ------------------------------------------------

    def _cooper_eliminate(self, var: str, lits: list[FLit]) -> FOFormula:
        # scale every occurrence of var to a common coefficient delta
        delta = 1
        for lit in lits:
            delta = _lcm(delta, abs(int(lit.atom.expr.coeff(var))))
        uppers: list[LinExpr] = []   # scaled_var < t
        lowers: list[LinExpr] = []   # t < scaled_var
        eqs: list[LinExpr] = []      # scaled_var = t
        congs: list[tuple[int, LinExpr, bool]] = []  # scaled_var === t (mod k)
        for lit in lits:
            atom = lit.atom
            c = int(atom.expr.coeff(var))
            m = delta // abs(c)
            rest = atom.expr.drop(var).scale(m)
            sign = 1 if c > 0 else -1
            if atom.op == LT:
                # sign*delta*v + rest < 0
                if sign > 0:
                    uppers.append(rest.scale(-1))
                else:
                    lowers.append(rest)
            elif atom.op == EQ:
                eqs.append(rest.scale(-sign))
            elif atom.op == EQUIV_MOD:
                k = atom.modulus * m
                t = rest.scale(-sign)
                congs.append((k, t, lit.positive))
            else:
                raise QeError(f"unexpected literal in cube: {lit}")
        # v' = delta * v ranges over the multiples of delta
        if delta > 1:
            congs.append((delta, LinExpr.constant(0), True))

        def on_value(value: LinExpr) -> FOFormula:
            parts: list[FOFormula] = []
            for t in uppers:
                parts.append(f_lit(Atom.make(LT, value.sub(t), 0, INT)))
            for t in lowers:
                parts.append(f_lit(Atom.make(LT, t.sub(value), 0, INT)))
            for t in eqs:
                parts.append(f_lit(Atom.make(EQ, value.sub(t), 0, INT)))
            for k, t, pos in congs:
                parts.append(f_lit(Atom.make(EQUIV_MOD, value.sub(t), k, INT), pos))
            return f_and(parts)

        if eqs:
            return on_value(eqs[0])
        period = 1
        for k, _, _ in congs:
            period = _lcm(period, k)
        options: list[FOFormula] = []
        if not lowers:
            # arbitrarily small values: order literals resolve downward
            for j in range(1, period + 1):
                parts: list[FOFormula] = []
                for k, t, pos in congs:
                    parts.append(f_lit(
                        Atom.make(EQUIV_MOD, LinExpr.constant(j).sub(t), k, INT), pos))
                options.append(f_and(parts))
        else:
            for j in range(1, period + 1):
                for b in lowers:
                    options.append(on_value(b.add(LinExpr.constant(j))))
        return f_or(options)

    # ---- decisions --------------------------------------------------------

    def is_sat(self, f: FOFormula, frees: Iterable[tuple[str, str]] | None = None) -> bool:
        """Satisfiability; free variables are read existentially."""
        if frees is None:
            frees = sorted((n, self.sort) for n in free_vars(f))
        result = self.qe(f_exists(tuple(frees), f))
        if not isinstance(result, (FTrue, FFalse)):
            raise QeError(f"free variables escaped the closure: {result}")
        return isinstance(result, FTrue)

    def is_valid(self, f: FOFormula, frees: Iterable[tuple[str, str]] | None = None) -> bool:
        """Validity; free variables are read universally."""
        if frees is None:
            frees = sorted((n, self.sort) for n in free_vars(f))
        result = self.qe(f_forall(tuple(frees), f))
        if not isinstance(result, (FTrue, FFalse)):
            raise QeError(f"free variables escaped the closure: {result}")
        return isinstance(result, FTrue)

    def equiv(self, f: FOFormula, g: FOFormula) -> bool:
        if f == g:
            return True
        if is_quantifier_free(f) and is_quantifier_free(g):
            return self.entails(f, g) and self.entails(g, f)
        both = f_and([f_or([f_not(f), g]), f_or([f_not(g), f])])
        return self.is_valid(both)

    def entails(self, f: FOFormula, g: FOFormula) -> bool:
        """Theory-level implication f -> g between quantifier-free
        formulas: no cube of f survives against the negation of g."""
        if f == g:
            return True
        for cube in self._cubes(f_and([f, f_not(g)])):
            if self._cube_sat(cube):
                return False
        return True

    # ---- simplification ----------------------------------------------------

    def simplify(self, f: FOFormula) -> FOFormula:
        """Theory-equivalent cleanup of a quantifier-free formula: drop
        unsatisfiable cubes, drop literals implied by their cube, then
        drop subsumed cubes."""
        if not is_quantifier_free(f):
            raise QeError("simplify expects a quantifier-free formula")
        cubes = [self._prune_cube(c) for c in self._cubes(f) if self._cube_sat(c)]
        if not cubes:
            return F_FALSE
        if any(not c for c in cubes):
            return F_TRUE
        kept: list[Cube] = []
        for i, cube in enumerate(cubes):
            lits = set(cube)
            subsumed = False
            for j, other in enumerate(cubes):
                others = set(other)
                if (others < lits) or (others == lits and j < i):
                    subsumed = True
                    break
            if not subsumed:
                kept.append(cube)
        kept = self._merge_cubes(kept)
        return f_or(self._cube_formula(c) for c in kept)

    # interval view of a cube: linear form -> [lo, lo_strict, up, up_strict]

    def _cube_intervals(self, cube: Cube):
        """Bounds per linear form, or None when the cube has literals that
        do not describe an interval (congruences, disequalities)."""
        boxes: dict[tuple, list] = {}
        for lit in cube:
            atom = lit.atom
            if not lit.positive or atom.op not in (LT, LE, EQ):
                return None
            coeffs = atom.expr.coeffs
            positive_first = coeffs[0][1] > 0
            form = coeffs if positive_first else tuple((n, -c) for n, c in coeffs)
            box = boxes.setdefault(form, [None, True, None, True])
            if atom.op == EQ:
                value = -atom.expr.const
                updates = [(value, False, "lo"), (value, False, "up")]
            elif positive_first:   # form + c (<|<=) 0: upper bound -c
                updates = [(-atom.expr.const, atom.op == LT, "up")]
            else:                  # -form + c (<|<=) 0: lower bound c
                updates = [(atom.expr.const, atom.op == LT, "lo")]
            for value, strict, side in updates:
                if side == "lo":
                    if box[0] is None or value > box[0] or (value == box[0] and strict):
                        box[0], box[1] = value, strict
                else:
                    if box[2] is None or value < box[2] or (value == box[2] and strict):
                        box[2], box[3] = value, strict
        if self.sort == INT:
            for box in boxes.values():
                if box[0] is not None:
                    box[0] = Fraction(_floor(box[0]) + 1 if box[1] or box[0].denominator != 1 else int(box[0]))
                    box[1] = False
                if box[2] is not None:
                    box[2] = Fraction(_ceil(box[2]) - 1 if box[3] or box[2].denominator != 1 else int(box[2]))
                    box[3] = False
        for box in boxes.values():
            if box[0] is not None and box[2] is not None:
                if box[0] > box[2] or (box[0] == box[2] and (box[1] or box[3])):
                    return None    # empty interval; leave the cube alone
        return boxes

    def _union_interval(self, a: list, b: list) -> list | None:
        """Union of two intervals when it is again an interval."""
        def lo_le(p, q):   # lower bound p at most as strong as q
            if p[0] is None:
                return True
            if q[0] is None:
                return False
            return (p[0], p[1]) <= (q[0], q[1])   # smaller value, nonstrict first

        first, second = (a, b) if lo_le(a, b) else (b, a)
        touches = False
        if first[2] is None or second[0] is None:
            touches = True
        elif self.sort == INT:
            touches = second[0] <= first[2] + 1
        elif second[0] < first[2] or (second[0] == first[2] and not (second[1] and first[3])):
            touches = True
        if not touches:
            return None
        if first[2] is None or second[2] is None:
            up, ups = None, True
        else:
            up, ups = max(((first[2], not first[3]), (second[2], not second[3])))
            ups = not ups
        return [first[0], first[1], up, ups]

    def _merge_cubes(self, cubes: list[Cube]) -> list[Cube]:
        views = [(c, self._cube_intervals(c)) for c in cubes]
        changed = True
        while changed:
            changed = False
            for i in range(len(views)):
                ci, vi = views[i]
                if vi is None:
                    continue
                for j in range(i + 1, len(views)):
                    cj, vj = views[j]
                    if vj is None or set(vi) != set(vj):
                        continue
                    diffs = [k for k in vi if vi[k] != vj[k]]
                    if len(diffs) > 1:
                        continue
                    if not diffs:
                        merged = dict(vi)
                    else:
                        k = diffs[0]
                        union = self._union_interval(vi[k], vj[k])
                        if union is None:
                            continue
                        merged = dict(vi)
                        merged[k] = union
                    new_cube = self._intervals_to_cube(merged)
                    if new_cube is None:
                        continue
                    views[i] = (new_cube, merged)
                    del views[j]
                    changed = True
                    break
                if changed:
                    break
        return [c for c, _ in views]

    def _intervals_to_cube(self, boxes: dict) -> Cube | None:
        lits: list[FLit] = []
        for form in boxes:
            lo, lo_strict, up, up_strict = boxes[form]
            expr = LinExpr(form, Fraction(0))
            if lo is not None and up is not None and lo == up and not (lo_strict or up_strict):
                made = f_lit(Atom.make(EQ, LinExpr(form, -lo), 0, self.sort))
                if not isinstance(made, FLit):
                    return None
                lits.append(made)
                continue
            if up is not None:
                op = LT if up_strict else LE
                made = f_lit(Atom.make(op, LinExpr(form, -up), 0, self.sort))
                if not isinstance(made, FLit):
                    return None
                lits.append(made)
            if lo is not None:
                op = LT if lo_strict else LE
                made = f_lit(Atom.make(op, expr.scale(-1).add(LinExpr.constant(lo)), 0, self.sort))
                if not isinstance(made, FLit):
                    return None
                lits.append(made)
        return tuple(lits)

    def _prune_cube(self, cube: Cube) -> Cube:
        """Drop order literals implied by a sibling over the same linear
        form: of e+c < 0 and e+c' <= 0 the tightest bound survives, and a
        disequality shadowed by a strict bound goes away."""
        bounds: dict[tuple, tuple[Fraction, str]] = {}
        for lit in cube:
            atom = lit.atom
            if atom.op in (LT, LE) and lit.positive:
                key = atom.expr.coeffs
                best = bounds.get(key)
                cand = (atom.expr.const, atom.op)
                if best is None or cand[0] > best[0] or (cand[0] == best[0] and cand[1] == LT):
                    bounds[key] = cand
        eq_forms = {lit.atom.expr.coeffs for lit in cube if lit.atom.op == EQ and lit.positive}
        out = []
        for lit in cube:
            atom = lit.atom
            if atom.op in (LT, LE) and lit.positive:
                if atom.expr.coeffs in eq_forms:
                    continue    # the equality pins the value; sat was checked
                if bounds.get(atom.expr.coeffs) != (atom.expr.const, atom.op):
                    continue
            if atom.op == NEQ and lit.positive:
                covered = False
                for key, (const, op) in bounds.items():
                    if op != LT:
                        continue
                    if key == atom.expr.coeffs and const >= atom.expr.const:
                        covered = True   # e < -const <= -c, so e != -c
                    neg_key = tuple((n, -c) for n, c in atom.expr.coeffs)
                    if key == neg_key and const >= -atom.expr.const:
                        covered = True   # e > const' >= -c
                if covered:
                    continue
            out.append(lit)
        return tuple(out)

    def _cube_sat(self, cube: Cube) -> bool:
        """Satisfiability of a literal conjunction, without simplification."""
        f: FOFormula = f_and(cube)
        while True:
            if isinstance(f, FTrue):
                return True
            if isinstance(f, FFalse):
                return False
            vs = sorted(free_vars(f))
            if not vs:
                raise QeError(f"ground formula not folded: {f}")
            nxt = []
            for c in self._cubes(f):
                for split in self._split_neq(vs[0], c):
                    nxt.append(self._eliminate_cube(vs[0], split))
            f = f_or(nxt)

    # ---- witness extraction -------------------------------------------------

    def witness(
        self,
        f: FOFormula,
        partial: Mapping[str, Number] | None = None,
    ) -> dict[str, Fraction] | None:
        """A satisfying assignment for the remaining free variables of a
        quantifier-free formula, or None when unsatisfiable.  Deterministic:
        bounded intervals take midpoints, half-bounded ones sit one unit
        inside, unconstrained variables default to zero."""
        if partial:
            f = substitute_values(f, partial)
        if not is_quantifier_free(f):
            raise QeError("witness expects a quantifier-free formula")
        names = sorted(free_vars(f))
        if isinstance(f, FFalse):
            return None
        out: dict[str, Fraction] = {}
        g = f
        for i, name in enumerate(names):
            rest = [(n, self.sort) for n in names[i + 1:]]
            unary = self.qe(f_exists(rest, g))
            if isinstance(unary, FFalse):
                return None
            value = self._pick_value(unary, name)
            if value is None:
                return None
            out[name] = value
            g = substitute_values(g, {name: value})
        if isinstance(g, FFalse):
            return None
        if not isinstance(g, FTrue):
            raise QeError(f"witness left a residue: {g}")
        if not evaluate(f, out):
            raise QeError("witness failed its own check")
        return out

    def _pick_value(self, unary: FOFormula, var: str) -> Fraction | None:
        if isinstance(unary, FTrue):
            return Fraction(0)
        for cube in self._cubes(unary):
            value = self._pick_cube_value(cube, var)
            if value is not None:
                return value
        return None

    def _pick_cube_value(self, cube: Cube, var: str) -> Fraction | None:
        lowers: list[tuple[Fraction, bool]] = []
        uppers: list[tuple[Fraction, bool]] = []
        forbidden: list[Fraction] = []
        congs: list[tuple[int, int, int, bool]] = []
        for lit in cube:
            atom = lit.atom
            c = atom.expr.coeff(var)
            if c == 0:
                raise QeError(f"non-unary literal while picking {var}: {lit}")
            if atom.op == EQUIV_MOD:
                congs.append((atom.modulus, int(c), int(atom.expr.const), lit.positive))
                continue
            bound = -atom.expr.drop(var).const / c
            if atom.op == EQ:
                lowers.append((bound, False))
                uppers.append((bound, False))
            elif atom.op == NEQ:
                forbidden.append(bound)
            else:
                strict = atom.op == LT
                if c > 0:
                    uppers.append((bound, strict))
                else:
                    lowers.append((bound, strict))
        if self.sort == INT:
            return self._pick_int(lowers, uppers, forbidden, congs)
        return self._pick_rational(lowers, uppers, forbidden)

    @staticmethod
    def _pick_rational(lowers, uppers, forbidden) -> Fraction | None:
        lo = max(lowers, default=None, key=lambda t: (t[0], t[1]))
        up = min(uppers, default=None, key=lambda t: (t[0], -t[1]))
        if lo is not None and up is not None:
            if lo[0] > up[0] or (lo[0] == up[0] and (lo[1] or up[1])):
                return None
            base = (lo[0] + up[0]) / 2
            step = (up[0] - lo[0]) / 4 if up[0] != lo[0] else Fraction(0)
        elif lo is not None:
            base, step = lo[0] + 1, Fraction(1, 2)
        elif up is not None:
            base, step = up[0] - 1, Fraction(-1, 2)
        else:
            base, step = Fraction(0), Fraction(1, 2)
        candidate = base
        for _ in range(len(forbidden) + 1):
            if candidate not in forbidden:
                ok_lo = lo is None or candidate > lo[0] or (candidate == lo[0] and not lo[1])
                ok_up = up is None or candidate < up[0] or (candidate == up[0] and not up[1])
                if ok_lo and ok_up:
                    return candidate
            step = step / 2
            candidate = candidate + step
        return None

    @staticmethod
    def _pick_int(lowers, uppers, forbidden, congs) -> Fraction | None:
        lo = None
        for bound, strict in lowers:
            b = _floor(bound) + 1 if (strict or bound.denominator != 1) else int(bound)
            lo = b if lo is None else max(lo, b)
        up = None
        for bound, strict in uppers:
            b = _ceil(bound) - 1 if (strict or bound.denominator != 1) else int(bound)
            up = b if up is None else min(up, b)
        period = 1
        for k, _, _, _ in congs:
            period = _lcm(period, k)
        window = period * (len(forbidden) + 2)
        if lo is not None:
            base = lo
        elif up is not None:
            base = up - window + 1
        else:
            base = 0
        for v in range(base, base + window):
            if up is not None and v > up:
                break
            if lo is not None and v < lo:
                continue
            if Fraction(v) in forbidden:
                continue
            ok = True
            for k, cc, d, pos in congs:
                if ((cc * v + d) % k == 0) != pos:
                    ok = False
                    break
            if ok:
                return Fraction(v)
        return None
