"""Canonical printers; parse(print(x)) == x for every well-formed tree."""

from __future__ import annotations

import re

from . import ast as A
from .parser import FORMULA_RESERVED, REM_RESERVED

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def print_symbol(a: str, reserved=REM_RESERVED) -> str:
    if _IDENT.fullmatch(a) and a not in reserved:
        return a
    if "'" in a:
        return '"' + a + '"'
    return "'" + a + "'"


def print_cond(c, top: bool = True) -> str:
    if isinstance(c, A.CEq):
        return f"=r{c.reg}"
    if isinstance(c, A.CNot):
        return f"!({print_cond(c.arg)})"
    right = print_cond(c.right, False)
    if isinstance(c.right, A.CAnd):
        right = f"({right})"
    return f"{print_cond(c.left, False)} & {right}"


# precedence: union 0, concat 1, store 2, postfix 3, atom 4
def _rem_prec(e) -> int:
    if isinstance(e, A.Union_):
        return 0
    if isinstance(e, A.Concat):
        return 1
    if isinstance(e, A.Store):
        return 2
    if isinstance(e, (A.Plus, A.Star, A.Test)):
        return 3
    return 4


def print_rem(e) -> str:
    def p(x, need):
        s = print_rem(x)
        return f"({s})" if _rem_prec(x) < need else s

    if isinstance(e, A.Epsilon):
        return "eps"
    if isinstance(e, A.AnyLetter):
        return "any"
    if isinstance(e, A.Letter):
        return print_symbol(e.symbol)
    if isinstance(e, A.Union_):
        return f"{p(e.left, 0)} | {p(e.right, 1)}"
    if isinstance(e, A.Concat):
        return f"{p(e.left, 1)} . {p(e.right, 2)}"
    if isinstance(e, A.Store):
        regs = ",".join(f"r{i}" for i in e.regs)
        return f"!{{{regs}}}.{p(e.arg, 2)}"
    if isinstance(e, A.Plus):
        return f"{p(e.arg, 3)}+"
    if isinstance(e, A.Star):
        return f"{p(e.arg, 3)}*"
    if isinstance(e, A.Test):
        return f"{p(e.arg, 3)}[{print_cond(e.cond)}]"
    if isinstance(e, A.Nest):
        return f"<{print_rem(e.arg)}>"
    raise TypeError(e)


def _f_prec(f) -> int:
    if isinstance(f, (A.Exists, A.ExistsPos)):
        return 0
    if isinstance(f, A.Or):
        return 1
    if isinstance(f, A.And):
        return 2
    if isinstance(f, A.Not):
        return 3
    return 4


def _pv(t: A.PosVar) -> str:
    return f"{t.name}@{t.path}"


def print_formula(f) -> str:
    def p(x, need):
        s = print_formula(x)
        return f"({s})" if _f_prec(x) < need else s

    if isinstance(f, (A.NodeEq, A.PathEq, A.RegEq)):
        a, b = (getattr(f, n) for n in f.__dataclass_fields__)
        return f"{a} = {b}"
    if isinstance(f, A.RegBot):
        return f"{f.v} = bot"
    if isinstance(f, A.Endpoints):
        return f"({f.x}, {f.p}, {f.y})"
    if isinstance(f, A.RemAtom):
        return f"{{{print_rem(f.rem)}}}({f.p}, {f.v_in}, {f.v_out})"
    if isinstance(f, A.EdgeAtom):
        return f"edge({print_symbol(f.symbol, FORMULA_RESERVED)}, {_pv(f.t1)}, {_pv(f.t2)})"
    if isinstance(f, A.Less):
        return f"{_pv(f.t1)} < {_pv(f.t2)}"
    if isinstance(f, A.Sim):
        return f"{_pv(f.t1)} ~ {_pv(f.t2)}"
    if isinstance(f, A.Not):
        return f"not {p(f.arg, 3)}"
    if isinstance(f, A.Or):
        return f"{p(f.left, 1)} or {p(f.right, 2)}"
    if isinstance(f, A.And):
        return f"{p(f.left, 2)} and {p(f.right, 3)}"
    if isinstance(f, A.Exists):
        return f"exists {f.sort} {f.var} . {print_formula(f.body)}"
    if isinstance(f, A.ExistsPos):
        return f"exists {_pv(f.var)} . {print_formula(f.body)}"
    raise TypeError(f)


def print_query(q: A.Query) -> str:
    from .analysis import free_vars
    lines = [f"dialect {q.dialect}", f"registers {q.k}"]
    if q.dialect != "WL":
        by_sort: dict = {}
        for v in sorted(free_vars(q.formula)):
            by_sort.setdefault(v[0], []).append(v[1])
        for sort, names in by_sort.items():
            lines.append(f"free {sort} " + " ".join(names))
    lines.append(print_formula(q.formula))
    return "\n".join(lines) + "\n"
