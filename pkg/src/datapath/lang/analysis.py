"""Free variables, fragment classification and small syntactic helpers."""

from __future__ import annotations

from . import ast as A

# Variables are tuples: ("node", x), ("path", p), ("reg", v), ("pos", t, p).


def free_vars(f) -> frozenset:
    if isinstance(f, A.NodeEq):
        return frozenset({("node", f.x), ("node", f.y)})
    if isinstance(f, A.PathEq):
        return frozenset({("path", f.p), ("path", f.q)})
    if isinstance(f, A.RegEq):
        return frozenset({("reg", f.u), ("reg", f.v)})
    if isinstance(f, A.RegBot):
        return frozenset({("reg", f.v)})
    if isinstance(f, A.Endpoints):
        return frozenset({("node", f.x), ("path", f.p), ("node", f.y)})
    if isinstance(f, A.RemAtom):
        return frozenset({("path", f.p), ("reg", f.v_in), ("reg", f.v_out)})
    if isinstance(f, (A.EdgeAtom, A.Less, A.Sim)):
        return frozenset({("pos", f.t1.name, f.t1.path), ("path", f.t1.path),
                          ("pos", f.t2.name, f.t2.path), ("path", f.t2.path)})
    if isinstance(f, A.Exists):
        inner = free_vars(f.body) - {(f.sort, f.var)}
        if f.sort == "path":
            inner = frozenset(v for v in inner if not (v[0] == "pos" and v[2] == f.var))
        return inner
    if isinstance(f, A.ExistsPos):
        t = f.var
        inner = free_vars(f.body) - {("pos", t.name, t.path)}
        # the sort survives only if another free position variable still needs it
        if not any(v[0] == "pos" and v[2] == t.path for v in inner):
            inner = inner - {("path", t.path)}
        return inner
    out: frozenset = frozenset()
    for c in A.children(f):
        out |= free_vars(c)
    return out


def is_wl(f) -> bool:
    return any(isinstance(g, (A.EdgeAtom, A.Less, A.Sim, A.ExistsPos)) for g in A.walk(f))


def classify(f) -> str:
    if is_wl(f):
        return "WL"
    if any(isinstance(g, A.Not) for g in A.walk(f)):
        return "RL"
    if any(isinstance(g, A.RemAtom) and A.has_nest(g.rem) for g in A.walk(f)):
        return "NRL+"
    return "RL+"


def var_name(v) -> str:
    return f"{v[1]}@{v[2]}" if v[0] == "pos" else v[1]


def quantifier_rank(f) -> int:
    if isinstance(f, (A.Exists, A.ExistsPos)):
        return 1 + quantifier_rank(f.body)
    return max((quantifier_rank(c) for c in A.children(f)), default=0)


def count_quantifiers(f) -> int:
    own = 1 if isinstance(f, (A.Exists, A.ExistsPos)) else 0
    return own + sum(count_quantifiers(c) for c in A.children(f))


def bound_path_vars(f) -> set[str]:
    return {g.var for g in A.walk(f) if isinstance(g, A.Exists) and g.sort == "path"}
