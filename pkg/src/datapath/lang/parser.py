"""Recursive-descent parser for REMs, RL/NRL+ formulas, WL formulas and query files."""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import ast as A


class QuerySyntaxError(ValueError):
    def __init__(self, message: str, pos: int | None = None, text: str | None = None):
        self.pos = pos
        if pos is not None and text is not None:
            line = text.count("\n", 0, pos) + 1
            col = pos - (text.rfind("\n", 0, pos) + 1) + 1
            message = f"{message} (line {line}, column {col})"
        super().__init__(message)


class SortError(QuerySyntaxError):
    pass


class FragmentViolation(QuerySyntaxError):
    pass


class UnboundVariables(QuerySyntaxError):
    def __init__(self, names):
        self.names = sorted(names)
        super().__init__("unbound variables: " + ", ".join(self.names))


REM_RESERVED = {"eps", "any"}
FORMULA_RESERVED = {"exists", "forall", "not", "and", "or", "node", "path", "reg", "bot",
                    "edge", "eps", "any"}

_TOKEN = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<arrow>->)
  | (?P<neq>!=)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<num>[0-9]+)
  | (?P<str>'[^'\n]*'|"[^"\n]*")
  | (?P<punct>[()\[\]{}<>,.|+*=!&~@])
""", re.VERBOSE)


@dataclass
class Tok:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Tok]:
    out, i = [], 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if not m:
            raise QuerySyntaxError(f"unexpected character {text[i]!r}", i, text)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Tok(kind, m.group(), i))
        i = m.end()
    out.append(Tok("eof", "", len(text)))
    return out


class _Stream:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    def peek(self, off: int = 0) -> Tok:
        return self.toks[min(self.i + off, len(self.toks) - 1)]

    def next(self) -> Tok:
        t = self.toks[self.i]
        self.i = min(self.i + 1, len(self.toks) - 1)
        return t

    def at(self, *texts: str) -> bool:
        t = self.peek()
        return t.kind in ("punct", "arrow", "neq", "ident") and t.text in texts

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.next()
            return True
        return False

    def expect(self, text: str) -> Tok:
        if not self.at(text):
            self.fail(f"expected {text!r}")
        return self.next()

    def ident(self, reserved=frozenset()) -> str:
        t = self.peek()
        if t.kind != "ident" or t.text in reserved:
            self.fail("expected identifier")
        return self.next().text

    def fail(self, msg: str, tok: Tok | None = None):
        t = tok or self.peek()
        found = t.text or "end of input"
        raise QuerySyntaxError(f"{msg}, found {found!r}", t.pos, self.text)


# ------------------------------------------------------------------------ REM

class _RemParser:
    def __init__(self, s: _Stream, k: int, nested: bool):
        self.s, self.k, self.nested = s, k, nested

    def rem(self):
        e = self.concat()
        while self.s.accept("|"):
            e = A.Union_(e, self.concat())
        return e

    def concat(self):
        e = self.element()
        while self.s.accept("."):
            e = A.Concat(e, self.element())
        return e

    def element(self):
        s = self.s
        if s.at("!") and s.peek(1).text == "{":
            s.next()
            s.next()
            regs = [self.register()]
            while s.accept(","):
                regs.append(self.register())
            s.expect("}")
            s.expect(".")
            return A.Store(tuple(sorted(set(regs))), self.element())
        return self.postfix()

    def postfix(self):
        e = self.atom()
        s = self.s
        while True:
            if s.accept("+"):
                e = A.Plus(e)
            elif s.accept("*"):
                e = A.Star(e)
            elif s.accept("["):
                c = self.cond()
                s.expect("]")
                e = A.Test(e, c)
            else:
                return e

    def atom(self):
        s = self.s
        t = s.peek()
        if t.kind == "ident":
            s.next()
            if t.text == "eps":
                return A.Epsilon()
            if t.text == "any":
                return A.AnyLetter()
            return A.Letter(t.text)
        if t.kind == "str":
            s.next()
            return A.Letter(t.text[1:-1])
        if s.accept("("):
            e = self.rem()
            s.expect(")")
            return e
        if s.at("<"):
            if not self.nested:
                raise FragmentViolation("nesting <...> is not allowed in a plain REM", t.pos, s.text)
            s.next()
            e = self.rem()
            s.expect(">")
            return A.Nest(e)
        s.fail("expected a REM")

    def register(self) -> int:
        t = self.s.peek()
        if t.kind != "ident" or not re.fullmatch(r"r[0-9]+", t.text):
            self.s.fail("expected a register r1..rk")
        self.s.next()
        i = int(t.text[1:])
        if not 1 <= i <= self.k:
            raise QuerySyntaxError(f"register r{i} out of range 1..{self.k}", t.pos, self.s.text)
        return i

    def cond(self):
        c = self.cond_atom()
        while self.s.accept("&"):
            c = A.CAnd(c, self.cond_atom())
        return c

    def cond_atom(self):
        s = self.s
        if s.accept("="):
            return A.CEq(self.register())
        if s.accept("!="):
            return A.CNot(A.CEq(self.register()))
        if s.accept("!"):
            return A.CNot(self.cond_atom())
        if s.accept("("):
            c = self.cond()
            s.expect(")")
            return c
        s.fail("expected a condition")


def parse_rem(text: str, k: int = 1, dialect: str = "REM"):
    if dialect not in ("REM", "NREM"):
        raise ValueError(f"unknown REM dialect {dialect}")
    s = _Stream(text)
    e = _RemParser(s, k, dialect == "NREM").rem()
    if s.peek().kind != "eof":
        s.fail("trailing input")
    return e


# -------------------------------------------------------------------- formulas

@dataclass(frozen=True)
class _Eq:
    """Equality whose sort is decided after parsing."""
    x: str
    y: str


class _FormulaParser:
    def __init__(self, s: _Stream, dialect: str, k: int, rems: dict):
        self.s, self.dialect, self.k, self.rems = s, dialect, k, rems
        self.wl = dialect == "WL"
        self.pos_env: list[dict] = [{}]

    def formula(self):
        left = self.disj()
        if self.s.at("->"):
            tok = self.s.next()
            self._no_negation(tok, "->")
            return A.Or(A.Not(left), self.formula())
        return left

    def disj(self):
        f = self.conj()
        while self.s.accept("or"):
            f = A.Or(f, self.conj())
        return f

    def conj(self):
        f = self.unary()
        while self.s.accept("and"):
            f = A.And(f, self.unary())
        return f

    def _no_negation(self, tok, what):
        if self.dialect == "NRLPLUS":
            raise FragmentViolation(f"{what} introduces negation, not allowed in NRL+",
                                    tok.pos, self.s.text)

    def unary(self):
        s = self.s
        if s.at("not"):
            tok = s.next()
            self._no_negation(tok, "not")
            return A.Not(self.unary())
        if s.at("exists", "forall"):
            return self.quantifier()
        return self.primary()

    def quantifier(self):
        s = self.s
        tok = s.next()
        universal = tok.text == "forall"
        if universal:
            self._no_negation(tok, "forall")
        binders = []  # (sort, name or PosVar)
        if self.wl:
            if s.accept("path"):
                binders = [("path", n) for n in self._names()]
            else:
                while True:
                    name = s.ident(FORMULA_RESERVED)
                    s.expect("@")
                    binders.append(("pos", A.PosVar(name, s.ident(FORMULA_RESERVED))))
                    if not s.accept(","):
                        break
        else:
            if not s.at(*A.SORTS):
                s.fail("expected node, path or reg")
            sort = s.next().text
            binders = [(sort, n) for n in self._names()]
        s.expect(".")
        env = dict(self.pos_env[-1])
        for sort, v in binders:
            if sort == "pos":
                env[v.name] = v.path
        self.pos_env.append(env)
        body = self.formula()
        self.pos_env.pop()
        for sort, v in reversed(binders):
            if sort == "pos":
                body = A.Not(A.ExistsPos(v, A.Not(body))) if universal else A.ExistsPos(v, body)
            else:
                body = A.Not(A.Exists(sort, v, A.Not(body))) if universal else A.Exists(sort, v, body)
        return body

    def _names(self):
        names = [self.s.ident(FORMULA_RESERVED)]
        while self.s.accept(","):
            names.append(self.s.ident(FORMULA_RESERVED))
        return names

    def primary(self):
        s = self.s
        if s.at("("):
            if (not self.wl and s.peek(1).kind == "ident" and s.peek(2).text == ","):
                s.next()
                x = s.ident(FORMULA_RESERVED)
                s.expect(",")
                p = s.ident(FORMULA_RESERVED)
                s.expect(",")
                y = s.ident(FORMULA_RESERVED)
                s.expect(")")
                return A.Endpoints(x, p, y)
            s.next()
            f = self.formula()
            s.expect(")")
            return f
        return self.wl_atom() if self.wl else self.rl_atom()

    # RL atoms
    def rl_atom(self):
        s = self.s
        if s.at("{"):
            tok = s.next()
            rem = _RemParser(s, self.k, self.dialect == "NRLPLUS").rem()
            s.expect("}")
            return self._rem_args(rem)
        t = s.peek()
        if t.kind == "ident" and t.text in self.rems and s.peek(1).text == "(":
            s.next()
            return self._rem_args(self.rems[t.text])
        x = s.ident(FORMULA_RESERVED)
        if s.at("=", "!="):
            op = s.next()
            if s.accept("bot"):
                f = A.RegBot(x)
            else:
                f = _Eq(x, s.ident(FORMULA_RESERVED))
            if op.text == "!=":
                self._no_negation(op, "!=")
                f = A.Not(f)
            return f
        s.fail("expected an atom")

    def _rem_args(self, rem):
        s = self.s
        s.expect("(")
        p = s.ident(FORMULA_RESERVED)
        s.expect(",")
        v1 = s.ident(FORMULA_RESERVED)
        s.expect(",")
        v2 = s.ident(FORMULA_RESERVED)
        s.expect(")")
        return A.RemAtom(rem, p, v1, v2)

    # WL atoms
    def posvar(self) -> A.PosVar:
        s = self.s
        tok = s.peek()
        name = s.ident(FORMULA_RESERVED)
        if s.accept("@"):
            return A.PosVar(name, s.ident(FORMULA_RESERVED))
        env = self.pos_env[-1]
        if name not in env:
            raise SortError(f"position variable {name} has no path sort; write {name}@p",
                            tok.pos, s.text)
        return A.PosVar(name, env[name])

    def wl_atom(self):
        s = self.s
        if s.accept("edge"):
            s.expect("(")
            t = s.next()
            if t.kind not in ("ident", "str"):
                s.fail("expected a symbol", t)
            sym = t.text[1:-1] if t.kind == "str" else t.text
            s.expect(",")
            t1 = self.posvar()
            s.expect(",")
            t2 = self.posvar()
            s.expect(")")
            self._same_sort(t1, t2, "edge")
            return A.EdgeAtom(sym, t1, t2)
        t1 = self.posvar()
        op = s.next()
        if op.text not in ("<", "~", "=", "!="):
            s.fail("expected <, ~, = or !=", op)
        t2 = self.posvar()
        if op.text == "~":
            return A.Sim(t1, t2)
        self._same_sort(t1, t2, op.text, op)
        if op.text == "<":
            return A.Less(t1, t2)
        differ = A.Or(A.Less(t1, t2), A.Less(t2, t1))
        return differ if op.text == "!=" else A.Not(differ)

    def _same_sort(self, t1, t2, what, tok=None):
        if t1.path != t2.path:
            tok = tok or self.s.peek()
            raise SortError(f"{what} needs positions on the same path, got {t1.path} and {t2.path}",
                            tok.pos, self.s.text)


def _free_sorts(f, bound, out):
    """Collect sorts of free RL variables from unambiguous atoms."""
    def note(name, sort):
        if name in bound:
            return
        if out.get(name, sort) != sort:
            raise SortError(f"variable {name} used as both {out[name]} and {sort}")
        out[name] = sort
    if isinstance(f, A.Endpoints):
        note(f.x, "node"), note(f.p, "path"), note(f.y, "node")
    elif isinstance(f, A.RemAtom):
        note(f.p, "path"), note(f.v_in, "reg"), note(f.v_out, "reg")
    elif isinstance(f, A.RegBot):
        note(f.v, "reg")
    elif isinstance(f, A.Exists):
        _free_sorts(f.body, {**bound, f.var: f.sort}, out)
        return
    for c in A.children(f):
        _free_sorts(c, bound, out)


def _resolve(f, bound: dict, free: dict):
    """Turn provisional equalities into sorted atoms and check sorts everywhere."""
    def sort_of(name):
        return bound.get(name, free.get(name))

    def need(name, sort):
        got = sort_of(name)
        if got is None:
            free[name] = sort
        elif got != sort:
            raise SortError(f"variable {name} is a {got} variable, used as {sort}")

    if isinstance(f, _Eq):
        sx, sy = sort_of(f.x), sort_of(f.y)
        sort = sx or sy
        if sort is None:
            raise SortError(f"cannot infer the sort of {f.x} = {f.y}; declare it with 'free'")
        need(f.x, sort), need(f.y, sort)
        return {"node": A.NodeEq, "path": A.PathEq, "reg": A.RegEq}[sort](f.x, f.y)
    if isinstance(f, A.Endpoints):
        need(f.x, "node"), need(f.p, "path"), need(f.y, "node")
        return f
    if isinstance(f, A.RemAtom):
        need(f.p, "path"), need(f.v_in, "reg"), need(f.v_out, "reg")
        return f
    if isinstance(f, A.RegBot):
        need(f.v, "reg")
        return f
    if isinstance(f, A.Not):
        return A.Not(_resolve(f.arg, bound, free))
    if isinstance(f, A.Or):
        return A.Or(_resolve(f.left, bound, free), _resolve(f.right, bound, free))
    if isinstance(f, A.And):
        return A.And(_resolve(f.left, bound, free), _resolve(f.right, bound, free))
    if isinstance(f, A.Exists):
        return A.Exists(f.sort, f.var, _resolve(f.body, {**bound, f.var: f.sort}, free))
    return f


def parse_formula(text: str, dialect: str = "RL", k: int = 1, rems: dict | None = None,
                  free: dict | None = None, closed: bool = False):
    """Parse one formula. `free` pre-declares sorts of free RL variables.

    With closed=True an UnboundVariables error lists any free variables.
    """
    dialect = dialect.upper().replace("+", "PLUS")
    if dialect not in ("RL", "WL", "NRLPLUS"):
        raise ValueError(f"unknown dialect {dialect}")
    s = _Stream(text)
    f = _FormulaParser(s, dialect, k, rems or {}).formula()
    if s.peek().kind != "eof":
        s.fail("trailing input")
    if dialect != "WL":
        sorts = dict(free or {})
        _free_sorts(f, {}, sorts)
        f = _resolve(f, {}, sorts)
    if closed:
        from .analysis import free_vars
        fv = free_vars(f)
        if fv:
            raise UnboundVariables(["@".join(v[1:]) if v[0] == "pos" else v[1] for v in fv])
    return f


def parse_query(text: str) -> A.Query:
    """Query file: header lines (dialect, registers, rem NAME = ..., free SORT names), then a formula."""
    dialect, k = "RL", 1
    rems: dict = {}
    free: dict = {}
    body: list[str] = []
    lines = text.splitlines()
    for idx, raw in enumerate(lines):
        line = raw.strip()
        if body:
            body.append(raw)
            continue
        if not line or line.startswith("#"):
            continue
        word = line.split()[0]
        if word == "dialect":
            dialect = line.split()[1].upper().replace("+", "PLUS")
        elif word == "registers":
            k = int(line.split()[1])
        elif word == "rem":
            m = re.fullmatch(r"rem\s+([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*)", line)
            if not m:
                raise QuerySyntaxError(f"line {idx + 1}: expected rem NAME = REM")
            rems[m.group(1)] = parse_rem(m.group(2), k, "NREM" if dialect == "NRLPLUS" else "REM")
        elif word == "free":
            parts = line.replace(",", " ").split()
            if len(parts) < 3 or parts[1] not in A.SORTS:
                raise QuerySyntaxError(f"line {idx + 1}: expected free node|path|reg names")
            for n in parts[2:]:
                free[n] = parts[1]
        else:
            body.append(raw)
    if not body:
        raise QuerySyntaxError("query file has no formula")
    f = parse_formula("\n".join(body), dialect, k, rems, free)
    return A.Query(dialect, k, f)
