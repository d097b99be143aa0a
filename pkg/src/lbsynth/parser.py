"""Reading and writing the s-expression surface syntax.

A specification document looks like::

    (spec (theory lra)
          (env (x real))
          (agent (y real))
          (assume (G (and (>= x 0) (<= (- x (pre x)) 2))))
          (property (X (> (pre y) x))))

Properties may use general negation, implication, and the F/G sugar; they
are normalised on the fly.  The printers emit the same syntax (with a
``last`` literal as an internal extension), and parsing a printed
property or formula yields the original structure back.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import fol
from .fol import FLit, FAnd, FOr, FExists, FForall, FOFormula, FTrue, FFalse, f_and, f_exists, f_forall, f_lit, f_or
from .props import (
    FALSE,
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
    TRUE,
    is_well_formed,
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
    weaken_first_instant,
)
from .terms import Atom, EQUIV_MOD, INT, LinExpr, REAL, SortError, is_pre, pre_name

ATOM_OPS = {"=", "<", "<=", ">", ">=", "distinct"}


class SpecError(Exception):
    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line, self.col = line, col
        where = f" at {line}:{col}" if line is not None else ""
        super().__init__(message + where)


@dataclass(frozen=True)
class Token:
    text: str
    line: int
    col: int


@dataclass(frozen=True)
class Node:
    """Parsed s-expression: a token or a parenthesised list of nodes."""
    token: Token | None
    items: tuple["Node", ...] | None

    @property
    def line(self) -> int:
        if self.token:
            return self.token.line
        return self.items[0].line if self.items else 0

    @property
    def col(self) -> int:
        if self.token:
            return self.token.col
        return self.items[0].col if self.items else 0

    def head(self) -> str | None:
        if self.items and self.items[0].token:
            return self.items[0].token.text
        return None


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line, col = line + 1, 1
            i += 1
        elif ch in " \t\r":
            col += 1
            i += 1
        elif ch == ";":
            while i < len(text) and text[i] != "\n":
                i += 1
        elif ch in "()":
            out.append(Token(ch, line, col))
            col += 1
            i += 1
        else:
            start = i
            start_col = col
            while i < len(text) and text[i] not in " \t\r\n();":
                i += 1
                col += 1
            out.append(Token(text[start:i], line, start_col))
    return out


def parse_sexp(text: str) -> Node:
    tokens = tokenize(text)
    pos = 0

    def parse_one() -> Node:
        nonlocal pos
        if pos >= len(tokens):
            raise SpecError("unexpected end of input")
        tok = tokens[pos]
        if tok.text == "(":
            pos += 1
            items = []
            while True:
                if pos >= len(tokens):
                    raise SpecError("missing ')'", tok.line, tok.col)
                if tokens[pos].text == ")":
                    pos += 1
                    return Node(None, tuple(items))
                items.append(parse_one())
        if tok.text == ")":
            raise SpecError("unexpected ')'", tok.line, tok.col)
        pos += 1
        return Node(tok, None)

    node = parse_one()
    if pos != len(tokens):
        t = tokens[pos]
        raise SpecError("trailing input", t.line, t.col)
    return node


def _is_number(text: str) -> bool:
    body = text.replace("−", "-")
    if body.startswith("-"):
        body = body[1:]
    if "/" in body:
        num, _, den = body.partition("/")
        return num.isdigit() and den.isdigit()
    return body.isdigit()


@dataclass
class VarTable:
    sorts: dict[str, str]
    theory: str

    @property
    def sort(self) -> str:
        return INT if self.theory == "lia" else REAL


def parse_term(node: Node, vars: VarTable) -> LinExpr:
    if node.token is not None:
        text = node.token.text
        if _is_number(text):
            value = Fraction(text.replace("−", "-"))
            if vars.sort == INT and value.denominator != 1:
                raise SpecError(f"non-integer constant {text} in an integer theory",
                                node.line, node.col)
            return LinExpr.constant(value)
        if text not in vars.sorts:
            raise SpecError(f"undeclared variable {text}", node.line, node.col)
        return LinExpr.var(text)
    head = node.head()
    if head == "pre":
        if len(node.items) != 2 or node.items[1].token is None:
            raise SpecError("pre expects a variable name", node.line, node.col)
        name = node.items[1].token.text
        if name not in vars.sorts:
            raise SpecError(f"undeclared variable {name}", node.line, node.col)
        return LinExpr.var(pre_name(name))
    if head == "+":
        if len(node.items) < 3:
            raise SpecError("+ expects at least two terms", node.line, node.col)
        out = parse_term(node.items[1], vars)
        for item in node.items[2:]:
            out = out.add(parse_term(item, vars))
        return out
    if head == "-":
        if len(node.items) == 2:
            return parse_term(node.items[1], vars).scale(-1)
        if len(node.items) == 3:
            return parse_term(node.items[1], vars).sub(parse_term(node.items[2], vars))
        raise SpecError("- expects one or two terms", node.line, node.col)
    if head == "*":
        if len(node.items) != 3 or node.items[1].token is None or not _is_number(node.items[1].token.text):
            raise SpecError("* expects a constant and a term", node.line, node.col)
        factor = Fraction(node.items[1].token.text.replace("−", "-"))
        if vars.sort == INT and factor.denominator != 1:
            raise SpecError("non-integer coefficient in an integer theory", node.line, node.col)
        return parse_term(node.items[2], vars).scale(factor)
    raise SpecError(f"cannot parse term {head or node.token}", node.line, node.col)


def parse_atom(node: Node, vars: VarTable) -> Atom | bool:
    head = node.head()
    try:
        if head == "equiv":
            if len(node.items) != 4 or node.items[1].token is None:
                raise SpecError("equiv expects a modulus and two terms", node.line, node.col)
            k = int(node.items[1].token.text)
            lhs = parse_term(node.items[2], vars)
            rhs = parse_term(node.items[3], vars)
            return Atom.compare(EQUIV_MOD, lhs, rhs, vars.sort, modulus=k)
        if head in ATOM_OPS:
            if len(node.items) != 3:
                raise SpecError(f"{head} expects two terms", node.line, node.col)
            lhs = parse_term(node.items[1], vars)
            rhs = parse_term(node.items[2], vars)
            return Atom.compare(head, lhs, rhs, vars.sort)
    except SortError as exc:
        raise SpecError(str(exc), node.line, node.col) from exc
    raise SpecError(f"unknown atom operator {head}", node.line, node.col)


def parse_prop(node: Node, vars: VarTable, negate: bool = False) -> Property:
    if node.token is not None:
        text = node.token.text
        if text == "true":
            return FALSE if negate else TRUE
        if text == "false":
            return TRUE if negate else FALSE
        if text == "last":
            return NEG_LAST if negate else LAST
        raise SpecError(f"cannot parse property {text}", node.line, node.col)
    head = node.head()
    if head is None:
        raise SpecError("empty property", node.line, node.col)
    items = node.items
    if head == "not":
        if len(items) != 2:
            raise SpecError("not expects one argument", node.line, node.col)
        return parse_prop(items[1], vars, not negate)
    if head in ("and", "or"):
        args = [parse_prop(a, vars, negate) for a in items[1:]]
        make_and = (head == "and") != negate
        return p_and(args) if make_and else p_or(args)
    if head == "implies":
        if len(items) != 3:
            raise SpecError("implies expects two arguments", node.line, node.col)
        left = parse_prop(items[1], vars, not negate)
        right = parse_prop(items[2], vars, negate)
        return p_or([left, right]) if not negate else p_and([left, right])
    if head == "X":
        arg = parse_prop(items[1], vars, negate)
        return p_weak_next(arg) if negate else p_next(arg)
    if head == "WX":
        arg = parse_prop(items[1], vars, negate)
        return p_next(arg) if negate else p_weak_next(arg)
    if head in ("U", "R"):
        if len(items) != 3:
            raise SpecError(f"{head} expects two arguments", node.line, node.col)
        left = parse_prop(items[1], vars, negate)
        right = parse_prop(items[2], vars, negate)
        make_until = (head == "U") != negate
        return p_until(left, right) if make_until else p_release(left, right)
    if head == "F":
        arg = parse_prop(items[1], vars, negate)
        return p_always(arg) if negate else p_eventually(arg)
    if head == "G":
        arg = parse_prop(items[1], vars, negate)
        return p_eventually(arg) if negate else p_always(arg)
    atom = parse_atom(node, vars)
    return p_neg_atom(atom) if negate else p_atom(atom)


def to_nnf(text_or_node: str | Node, vars: VarTable) -> Property:
    """Parse a property with general negation into negation normal form."""
    node = parse_sexp(text_or_node) if isinstance(text_or_node, str) else text_or_node
    return parse_prop(node, vars)


@dataclass(frozen=True)
class SpecProblem:
    theory: str
    env_vars: tuple[tuple[str, str], ...]     # environment-controlled (name, sort)
    agent_vars: tuple[tuple[str, str], ...]   # agent-controlled (name, sort)
    assumption: Property | None
    goal: Property
    effective: Property                        # well-formed NNF of (assume -> goal)

    @property
    def var_sorts(self) -> dict[str, str]:
        return dict(self.env_vars) | dict(self.agent_vars)

    @property
    def env_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.env_vars)

    @property
    def agent_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.agent_vars)


def parse_spec(text: str) -> SpecProblem:
    root = parse_sexp(text)
    if root.head() != "spec":
        raise SpecError("expected (spec ...)", root.line, root.col)
    sections: dict[str, Node] = {}
    for item in root.items[1:]:
        head = item.head()
        if head is None:
            raise SpecError("expected a (section ...)", item.line, item.col)
        if head in sections:
            raise SpecError(f"duplicate section {head}", item.line, item.col)
        sections[head] = item
    for required in ("theory", "env", "agent", "property"):
        if required not in sections:
            raise SpecError(f"missing section ({required} ...)", root.line, root.col)
    unknown = set(sections) - {"theory", "env", "agent", "assume", "property"}
    if unknown:
        bad = sections[sorted(unknown)[0]]
        raise SpecError(f"unknown section {sorted(unknown)[0]}", bad.line, bad.col)

    theory_node = sections["theory"]
    if len(theory_node.items) != 2 or theory_node.items[1].token is None or \
            theory_node.items[1].token.text not in ("lra", "lia"):
        raise SpecError("theory must be lra or lia", theory_node.line, theory_node.col)
    theory = theory_node.items[1].token.text
    expected_sort = INT if theory == "lia" else REAL

    def parse_decls(node: Node) -> tuple[tuple[str, str], ...]:
        decls = []
        for item in node.items[1:]:
            if item.items is None or len(item.items) != 2 or \
                    item.items[0].token is None or item.items[1].token is None:
                raise SpecError("expected (name real|int)", item.line, item.col)
            name = item.items[0].token.text
            sort = item.items[1].token.text
            if sort not in (REAL, INT):
                raise SpecError(f"unknown sort {sort}", item.line, item.col)
            if sort != expected_sort:
                raise SpecError(
                    f"sort mismatch: {name}:{sort} under theory {theory}",
                    item.line, item.col)
            if _is_number(name) or name in ("pre", "last", "true", "false"):
                raise SpecError(f"reserved variable name {name}", item.line, item.col)
            if is_pre(name):
                raise SpecError(f"variable name may not contain the lookback marker",
                                item.line, item.col)
            decls.append((name, sort))
        return tuple(decls)

    env_vars = parse_decls(sections["env"])
    agent_vars = parse_decls(sections["agent"])
    seen: set[str] = set()
    for name, _ in env_vars + agent_vars:
        if name in seen:
            raise SpecError(f"variable declared twice: {name}")
        seen.add(name)
    if not seen:
        raise SpecError("no variables declared")

    table = VarTable(dict(env_vars) | dict(agent_vars), theory)
    assumption = None
    if "assume" in sections:
        node = sections["assume"]
        if len(node.items) != 2:
            raise SpecError("assume expects one property", node.line, node.col)
        assumption = parse_prop(node.items[1], table)
        bad = _uses_outside(assumption, set(n for n, _ in env_vars))
        if bad is not None:
            raise SpecError(f"assumption mentions the agent variable {bad}")
    prop_node = sections["property"]
    if len(prop_node.items) != 2:
        raise SpecError("property expects one property", prop_node.line, prop_node.col)
    goal = parse_prop(prop_node.items[1], table)

    if assumption is None:
        effective = goal
    else:
        effective = p_or([_negate_nnf(assumption), goal])
    effective = weaken_first_instant(effective)
    check = is_well_formed(effective)
    if not check.ok:
        raise SpecError(f"ill-formed property: the atom ({check.offending}) "
                        "looks back past the first instant")
    return SpecProblem(theory, env_vars, agent_vars, assumption, goal, effective)


def _negate_nnf(p: Property) -> Property:
    from .props import negate
    return negate(p)


def _uses_outside(p: Property, allowed: set[str]) -> str | None:
    from .props import atoms_of
    from .terms import base_name
    for atom in atoms_of(p):
        for v in atom.variables:
            if base_name(v) not in allowed:
                return base_name(v)
    return None


# ---- printers -------------------------------------------------------------

def _format_number(v: Fraction) -> str:
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def term_to_sexp(expr: LinExpr) -> str:
    parts: list[str] = []
    for name, coeff in expr.coeffs:
        var = f"(pre {name[:-4]})" if is_pre(name) else name
        if coeff == 1:
            parts.append(var)
        else:
            parts.append(f"(* {_format_number(coeff)} {var})")
    if expr.const != 0 or not parts:
        parts.append(_format_number(expr.const))
    if len(parts) == 1:
        return parts[0]
    return "(+ " + " ".join(parts) + ")"


def atom_to_sexp(atom: Atom) -> str:
    pos: dict[str, Fraction] = {}
    neg: dict[str, Fraction] = {}
    for name, coeff in atom.expr.coeffs:
        (pos if coeff > 0 else neg)[name] = abs(coeff)
    lhs = LinExpr.make(pos, atom.expr.const if atom.expr.const > 0 else 0)
    rhs = LinExpr.make(neg, -atom.expr.const if atom.expr.const < 0 else 0)
    if atom.op == EQUIV_MOD:
        return f"(equiv {atom.modulus} {term_to_sexp(lhs)} {term_to_sexp(rhs)})"
    return f"({atom.op} {term_to_sexp(lhs)} {term_to_sexp(rhs)})"


def property_to_sexp(p: Property) -> str:
    if isinstance(p, PTrue):
        return "true"
    if isinstance(p, PFalse):
        return "false"
    if isinstance(p, PLast):
        return "last"
    if isinstance(p, PNegLast):
        return "(not last)"
    if isinstance(p, PAtom):
        return atom_to_sexp(p.atom)
    if isinstance(p, PNegAtom):
        return f"(not {atom_to_sexp(p.atom)})"
    if isinstance(p, PAnd):
        return "(and " + " ".join(property_to_sexp(a) for a in p.args) + ")"
    if isinstance(p, POr):
        return "(or " + " ".join(property_to_sexp(a) for a in p.args) + ")"
    if isinstance(p, PNext):
        return f"(X {property_to_sexp(p.arg)})"
    if isinstance(p, PWeakNext):
        return f"(WX {property_to_sexp(p.arg)})"
    if isinstance(p, PUntil):
        return f"(U {property_to_sexp(p.left)} {property_to_sexp(p.right)})"
    if isinstance(p, PRelease):
        return f"(R {property_to_sexp(p.left)} {property_to_sexp(p.right)})"
    raise TypeError(p)


def fo_to_sexp(f: FOFormula) -> str:
    if isinstance(f, FTrue):
        return "true"
    if isinstance(f, FFalse):
        return "false"
    if isinstance(f, FLit):
        inner = atom_to_sexp(f.atom)
        return inner if f.positive else f"(not {inner})"
    if isinstance(f, FAnd):
        return "(and " + " ".join(fo_to_sexp(a) for a in f.args) + ")"
    if isinstance(f, FOr):
        return "(or " + " ".join(fo_to_sexp(a) for a in f.args) + ")"
    if isinstance(f, (FExists, FForall)):
        kind = "exists" if isinstance(f, FExists) else "forall"
        binders = " ".join(f"({n} {s})" for n, s in f.bound)
        return f"({kind} ({binders}) {fo_to_sexp(f.body)})"
    raise TypeError(f)


def parse_fo(text_or_node: str | Node, vars: VarTable, negate: bool = False) -> FOFormula:
    """First-order formula in the atom syntax plus not/and/or/implies and
    (exists ((x real) ...) P) / (forall ...) binders."""
    node = parse_sexp(text_or_node) if isinstance(text_or_node, str) else text_or_node
    if node.token is not None:
        text = node.token.text
        if text == "true":
            return fol.F_FALSE if negate else fol.F_TRUE
        if text == "false":
            return fol.F_TRUE if negate else fol.F_FALSE
        raise SpecError(f"cannot parse formula {text}", node.line, node.col)
    head = node.head()
    if head == "not":
        return parse_fo(node.items[1], vars, not negate)
    if head in ("and", "or"):
        args = [parse_fo(a, vars, negate) for a in node.items[1:]]
        make_and = (head == "and") != negate
        return f_and(args) if make_and else f_or(args)
    if head == "implies":
        if len(node.items) != 3:
            raise SpecError("implies expects two arguments", node.line, node.col)
        left = parse_fo(node.items[1], vars, not negate)
        right = parse_fo(node.items[2], vars, negate)
        return f_or([left, right]) if not negate else f_and([left, right])
    if head in ("exists", "forall"):
        if len(node.items) != 3 or node.items[1].items is None:
            raise SpecError(f"{head} expects a binder list and a body", node.line, node.col)
        binders = []
        inner_table = VarTable(dict(vars.sorts), vars.theory)
        for b in node.items[1].items:
            if b.items is None or len(b.items) != 2 or b.items[0].token is None or b.items[1].token is None:
                raise SpecError("binder must be (name sort)", node.line, node.col)
            name, sort = b.items[0].token.text, b.items[1].token.text
            if sort not in (REAL, INT):
                raise SpecError(f"unknown sort {sort}", b.line, b.col)
            binders.append((name, sort))
            inner_table.sorts[name] = sort
        body = parse_fo(node.items[2], inner_table, negate)
        make_exists = (head == "exists") != negate
        return f_exists(binders, body) if make_exists else f_forall(binders, body)
    atom = parse_atom(node, vars)
    if isinstance(atom, bool):
        return f_lit(atom, not negate)
    return FLit(atom, not negate)
