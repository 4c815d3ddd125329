"""Syntax trees for conditions, (nested) REMs, RL-family formulas and WL formulas.

All nodes are frozen dataclasses so structural equality and hashing come for free;
the parser/printer round trip is stated in terms of that equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

# ------------------------------------------------------------------ conditions


@dataclass(frozen=True)
class CEq:
    reg: int  # 1-based


@dataclass(frozen=True)
class CAnd:
    left: "Condition"
    right: "Condition"


@dataclass(frozen=True)
class CNot:
    arg: "Condition"


Condition = Union[CEq, CAnd, CNot]

# ------------------------------------------------------------------------ REMs


@dataclass(frozen=True)
class Epsilon:
    pass


@dataclass(frozen=True)
class Letter:
    symbol: str


@dataclass(frozen=True)
class AnyLetter:
    pass


@dataclass(frozen=True)
class Union_:
    left: "Rem"
    right: "Rem"


@dataclass(frozen=True)
class Concat:
    left: "Rem"
    right: "Rem"


@dataclass(frozen=True)
class Plus:
    arg: "Rem"


@dataclass(frozen=True)
class Star:
    arg: "Rem"


@dataclass(frozen=True)
class Test:
    arg: "Rem"
    cond: Condition


@dataclass(frozen=True)
class Store:
    regs: tuple[int, ...]  # sorted, 1-based
    arg: "Rem"


@dataclass(frozen=True)
class Nest:
    arg: "Rem"


Rem = Union[Epsilon, Letter, AnyLetter, Union_, Concat, Plus, Star, Test, Store, Nest]


def rem_children(e) -> tuple:
    if isinstance(e, (Union_, Concat)):
        return (e.left, e.right)
    if isinstance(e, (Plus, Star, Test, Store, Nest)):
        return (e.arg,)
    return ()


def cond_regs(c) -> set[int]:
    if isinstance(c, CEq):
        return {c.reg}
    if isinstance(c, CAnd):
        return cond_regs(c.left) | cond_regs(c.right)
    return cond_regs(c.arg)


def rem_regs(e) -> set[int]:
    out: set[int] = set()
    if isinstance(e, Test):
        out |= cond_regs(e.cond)
    if isinstance(e, Store):
        out |= set(e.regs)
    for c in rem_children(e):
        out |= rem_regs(c)
    return out


def has_nest(e) -> bool:
    return isinstance(e, Nest) or any(has_nest(c) for c in rem_children(e))


def nesting_depth(e) -> int:
    inner = max((nesting_depth(c) for c in rem_children(e)), default=0)
    return inner + 1 if isinstance(e, Nest) else inner


def rem_size(e) -> int:
    return 1 + sum(rem_size(c) for c in rem_children(e))


# -------------------------------------------------------------- RL formulas


@dataclass(frozen=True)
class NodeEq:
    x: str
    y: str


@dataclass(frozen=True)
class PathEq:
    p: str
    q: str


@dataclass(frozen=True)
class RegEq:
    u: str
    v: str


@dataclass(frozen=True)
class RegBot:
    v: str


@dataclass(frozen=True)
class Endpoints:
    x: str
    p: str
    y: str


@dataclass(frozen=True)
class RemAtom:
    rem: Rem
    p: str
    v_in: str
    v_out: str


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


SORTS = ("node", "path", "reg")


@dataclass(frozen=True)
class Exists:
    sort: str  # node | path | reg
    var: str
    body: "Formula"


# -------------------------------------------------------------- WL formulas


@dataclass(frozen=True)
class PosVar:
    name: str
    path: str


@dataclass(frozen=True)
class EdgeAtom:
    symbol: str
    t1: PosVar
    t2: PosVar


@dataclass(frozen=True)
class Less:
    t1: PosVar
    t2: PosVar


@dataclass(frozen=True)
class Sim:
    t1: PosVar
    t2: PosVar


@dataclass(frozen=True)
class ExistsPos:
    var: PosVar
    body: "Formula"


Formula = Union[NodeEq, PathEq, RegEq, RegBot, Endpoints, RemAtom, Not, Or, And, Exists,
                EdgeAtom, Less, Sim, ExistsPos]

ATOMS = (NodeEq, PathEq, RegEq, RegBot, Endpoints, RemAtom, EdgeAtom, Less, Sim)


def children(f) -> tuple:
    if isinstance(f, (Or, And)):
        return (f.left, f.right)
    if isinstance(f, Not):
        return (f.arg,)
    if isinstance(f, (Exists, ExistsPos)):
        return (f.body,)
    return ()


def walk(f):
    yield f
    for c in children(f):
        yield from walk(c)


def rem_atoms(f) -> list[Rem]:
    """Distinct REMs used in atoms, in first-occurrence order."""
    seen: dict = {}
    for g in walk(f):
        if isinstance(g, RemAtom):
            seen.setdefault(g.rem, None)
    return list(seen)


def conj(*fs):
    out = fs[0]
    for f in fs[1:]:
        out = And(out, f)
    return out


def disj(*fs):
    out = fs[0]
    for f in fs[1:]:
        out = Or(out, f)
    return out


def forall(sort: str, var: str, body):
    return Not(Exists(sort, var, Not(body)))


def implies(a, b):
    return Or(Not(a), b)


def exists_many(sort: str, names, body):
    for v in reversed(list(names)):
        body = Exists(sort, v, body)
    return body


def forall_pos(t: PosVar, body):
    return Not(ExistsPos(t, Not(body)))


def rem_concat(*es):
    out = es[0]
    for e in es[1:]:
        out = Concat(out, e)
    return out


def rem_union(*es):
    out = es[0]
    for e in es[1:]:
        out = Union_(out, e)
    return out


@dataclass(frozen=True)
class Query:
    """A parsed query file: dialect, register count and one formula."""
    dialect: str  # RL | WL | NRLPLUS
    k: int
    formula: Formula
