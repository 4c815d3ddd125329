"""Walk logic with path quantification bounded by edge length L.

Assignments map ("path", p) to a Path and ("pos", t, p) to a 1-based position.
A position quantifier over a sort that the current assignment does not bind picks
a path and a position at once; if the sort is bound it ranges over that path.
"""

from __future__ import annotations

from ..graph import DataGraph
from ..lang import ast as A
from ..lang.analysis import free_vars
from ..oracles import enum_paths
from .errors import PositionOutOfRange, UnassignedVariable


def _sorts_mentioned(f) -> frozenset:
    """Path sorts a subformula can consult in the assignment."""
    if isinstance(f, (A.EdgeAtom, A.Less, A.Sim)):
        return frozenset({f.t1.path, f.t2.path})
    if isinstance(f, A.ExistsPos):
        return _sorts_mentioned(f.body) | {f.var.path}
    if isinstance(f, A.Exists):
        return _sorts_mentioned(f.body) - {f.var}
    out = frozenset()
    for c in A.children(f):
        out |= _sorts_mentioned(c)
    return out


class WlEvaluator:
    def __init__(self, g: DataGraph, L: int):
        self.g, self.L = g, L
        self.paths = list(enum_paths(g, L))
        self._keys: dict = {}
        self._memo: dict = {}

    def key_vars(self, f) -> tuple:
        hit = self._keys.get(id(f))
        if hit is None:
            pos = tuple(sorted(v for v in free_vars(f) if v[0] == "pos"))
            paths = tuple(("path", p) for p in sorted(_sorts_mentioned(f)))
            hit = self._keys[id(f)] = (pos + paths, f)
        return hit[0]

    def node_at(self, alpha, t: A.PosVar):
        try:
            path = alpha[("path", t.path)]
            i = alpha[("pos", t.name, t.path)]
        except KeyError as exc:
            raise UnassignedVariable(str(exc)) from None
        if not 1 <= i <= len(path.nodes):
            raise PositionOutOfRange(f"{t.name}@{t.path} = {i}")
        return path, i

    def holds(self, f, alpha) -> bool:
        if isinstance(f, (A.Not, A.Or, A.And, A.Exists, A.ExistsPos)):
            key = (id(f),) + tuple(alpha.get(v) for v in self.key_vars(f))
            hit = self._memo.get(key)
            if hit is None:
                hit = self._memo[key] = self._holds(f, alpha)
            return hit
        return self._holds(f, alpha)

    def _holds(self, f, alpha) -> bool:
        if isinstance(f, A.EdgeAtom):
            path, i = self.node_at(alpha, f.t1)
            _, j = self.node_at(alpha, f.t2)
            return j == i + 1 and path.labels[i - 1] == f.symbol
        if isinstance(f, A.Less):
            _, i = self.node_at(alpha, f.t1)
            _, j = self.node_at(alpha, f.t2)
            return i < j
        if isinstance(f, A.Sim):
            p1, i = self.node_at(alpha, f.t1)
            p2, j = self.node_at(alpha, f.t2)
            kap = self.g.kappa
            return kap[p1.nodes[i - 1]] == kap[p2.nodes[j - 1]]
        if isinstance(f, A.Not):
            return not self.holds(f.arg, alpha)
        if isinstance(f, A.Or):
            return self.holds(f.left, alpha) or self.holds(f.right, alpha)
        if isinstance(f, A.And):
            return self.holds(f.left, alpha) and self.holds(f.right, alpha)
        if isinstance(f, A.Exists):
            if f.sort != "path":
                raise TypeError("walk logic only quantifies paths and positions")
            if f.var not in _sorts_mentioned(f.body):
                return self.holds(f.body, alpha)
            var = ("path", f.var)
            inner = {v: x for v, x in alpha.items() if not (v[0] == "pos" and v[2] == f.var)}
            return any(self.holds(f.body, {**inner, var: p}) for p in self.paths)
        if isinstance(f, A.ExistsPos):
            t = f.var
            tv = ("pos", t.name, t.path)
            if tv not in free_vars(f.body):
                return self.holds(f.body, alpha)
            pv = ("path", t.path)
            if pv in alpha:
                n = len(alpha[pv].nodes)
                return any(self.holds(f.body, {**alpha, tv: i}) for i in range(1, n + 1))
            for p in self.paths:
                for i in range(1, len(p.nodes) + 1):
                    if self.holds(f.body, {**alpha, pv: p, tv: i}):
                        return True
            return False
        raise TypeError(f"not a WL formula: {f!r}")


def wl_eval_bounded(g: DataGraph, formula, alpha: dict | None = None, L: int = 3) -> bool:
    alpha = dict(alpha or {})
    for v, p in alpha.items():
        if v[0] == "path" and len(p) > L:
            raise ValueError(f"assigned path {v[1]} is longer than the bound {L}")
    return WlEvaluator(g, L).holds(formula, alpha)
