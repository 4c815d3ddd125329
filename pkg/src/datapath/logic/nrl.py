"""Evaluation of positive formulas with nested REMs (RL+ and NRL+).

The formula is put in prenex form with bound variables renamed apart, and its
matrix in disjunctive normal form. For each disjunct the search assigns node and
register variables; path variables are grouped into classes by path equalities,
and a class is satisfiable from a start node and input registers iff the product
of the automata of its REM atoms reaches a configuration where all are final.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import count

from ..graph import DataGraph, NodeId, Path
from ..lang import ast as A
from ..lang.analysis import classify, free_vars
from ..lang.parser import FragmentViolation
from ..rem import RemRunner, bottom, register_space


def prenex(f, fresh=None):
    """(list of (sort, name), matrix) with every bound name made unique."""
    fresh = fresh or count()

    def go(x, ren):
        if isinstance(x, A.Exists):
            new = f"{x.var}_{next(fresh)}"
            qs, body = go(x.body, {**ren, (x.sort, x.var): new})
            return [(x.sort, new)] + qs, body
        if isinstance(x, (A.And, A.Or)):
            ql, left = go(x.left, ren)
            qr, right = go(x.right, ren)
            return ql + qr, type(x)(left, right)
        if isinstance(x, A.Not):
            raise FragmentViolation("negation is not allowed in positive formulas")
        return [], _rename(x, ren)
    return go(f, {})


def _rename(atom, ren):
    def r(sort, name):
        return ren.get((sort, name), name)
    if isinstance(atom, A.NodeEq):
        return A.NodeEq(r("node", atom.x), r("node", atom.y))
    if isinstance(atom, A.PathEq):
        return A.PathEq(r("path", atom.p), r("path", atom.q))
    if isinstance(atom, A.RegEq):
        return A.RegEq(r("reg", atom.u), r("reg", atom.v))
    if isinstance(atom, A.RegBot):
        return A.RegBot(r("reg", atom.v))
    if isinstance(atom, A.Endpoints):
        return A.Endpoints(r("node", atom.x), r("path", atom.p), r("node", atom.y))
    if isinstance(atom, A.RemAtom):
        return A.RemAtom(atom.rem, r("path", atom.p), r("reg", atom.v_in), r("reg", atom.v_out))
    raise FragmentViolation(f"unexpected formula in positive fragment: {atom!r}")


def dnf(f) -> list[list]:
    if isinstance(f, A.Or):
        return dnf(f.left) + dnf(f.right)
    if isinstance(f, A.And):
        return [a + b for a in dnf(f.left) for b in dnf(f.right)]
    return [[f]]


@dataclass
class PathClass:
    members: list
    endpoints: list = field(default_factory=list)  # (x, y)
    atoms: list = field(default_factory=list)  # (rem, v_in, v_out)


class _Product:
    """Intersection of several REM automata read along one path."""

    def __init__(self, runners):
        self.runners = runners

    def search(self, g: DataGraph, u: NodeId, lams: tuple):
        """BFS over (node, per-automaton (state, regs)); returns {(v, outs): path}."""
        runs = self.runners
        start = (u, tuple((r.aut.initial, lam) for r, lam in zip(runs, lams)))
        parent = {start: None}
        todo = deque([start])
        found: dict = {}
        while todo:
            c = todo.popleft()
            node, comps = c
            if all(q in r.aut.finals for r, (q, _) in zip(runs, comps)):
                key = (node, tuple(regs for _, regs in comps))
                if key not in found:
                    found[key] = c
            for c2, label in self._moves(g, node, comps):
                if c2 not in parent:
                    parent[c2] = (c, label)
                    todo.append(c2)
        return {key: _LazyPath(parent, c) for key, c in found.items()}

    def _moves(self, g, node, comps):
        runs = self.runners
        for i, (r, (q, regs)) in enumerate(zip(runs, comps)):
            for q2, regs2 in r.silent_moves(node, q, regs):
                yield (node, comps[:i] + ((q2, regs2),) + comps[i + 1:]), None
        for a, w in g.out(node):
            options = []
            for r, (q, regs) in zip(runs, comps):
                nxt = [(q2, regs) for q2 in r.edge_moves(q, a)]
                if not nxt:
                    break
                options.append(nxt)
            else:
                for combo in _product(options):
                    yield (w, combo), (a, w)


def _product(options):
    if not options:
        yield ()
        return
    for first in options[0]:
        for rest in _product(options[1:]):
            yield (first,) + rest


class _LazyPath:
    """Witness path rebuilt from BFS parents only when someone asks for it."""

    __slots__ = ("parent", "c", "_path")

    def __init__(self, parent, c):
        self.parent, self.c, self._path = parent, c, None

    def get(self) -> Path:
        if self._path is None:
            self._path = _unwind(self.parent, self.c)
        return self._path


def _unwind(parent, c) -> Path:
    nodes, labels = [c[0]], []
    while parent[c] is not None:
        prev, step = parent[c]
        if step is not None:
            labels.append(step[0])
            nodes.append(prev[0])
        c = prev
    return Path(tuple(reversed(nodes)), tuple(reversed(labels)))


class NrlEvaluator:
    def __init__(self, g: DataGraph, formula, k: int):
        tag = classify(formula)
        if tag not in ("RL+", "NRL+"):
            raise FragmentViolation(f"formula is {tag}, not positive")
        self.g, self.k = g, k
        self.formula = formula
        self.quants, self.matrix = prenex(formula)
        self.disjuncts = dnf(self.matrix)
        self.regs = register_space(g, k)
        self.bot = bottom(k)
        self.tables: dict = {}
        self.runners: dict = {}
        self._search_memo: dict = {}

    def runner(self, e) -> RemRunner:
        r = self.runners.get(e)
        if r is None:
            r = self.runners[e] = RemRunner(self.g, e, self.k, self.tables)
        return r

    # -------------------------------------------------------------- search
    def solutions(self, alpha: dict, want: list | None = None):
        """Yield solutions of the matrix extending alpha.

        `want` lists extra free node variables to enumerate (answer variables).
        """
        want = list(want or [])
        for atoms in self.disjuncts:
            yield from self._disjunct(atoms, alpha, want)

    def _disjunct(self, atoms, alpha, want):
        # union-find on path variables
        parent: dict = {}

        def find(p):
            while parent.setdefault(p, p) != p:
                p = parent[p]
            return p
        simple = []
        for a in atoms:
            if isinstance(a, A.PathEq):
                parent[find(a.p)] = find(a.q)
            elif isinstance(a, (A.Endpoints, A.RemAtom)):
                find(a.p)
            else:
                simple.append(a)
        classes: dict = {}
        for p in parent:
            classes.setdefault(find(p), PathClass([])).members.append(p)
        for a in atoms:
            if isinstance(a, A.Endpoints):
                classes[find(a.p)].endpoints.append((a.x, a.y))
            elif isinstance(a, A.RemAtom):
                classes[find(a.p)].atoms.append((a.rem, a.v_in, a.v_out))
        cls = list(classes.values())
        node_vars = sorted({v for a in atoms for v in free_vars(a) if v[0] == "node"}
                           | {("node", w) for w in want})
        reg_vars = sorted({v for a in atoms for v in free_vars(a) if v[0] == "reg"})
        yield from self._rec(cls, 0, dict(alpha), {}, simple, node_vars, reg_vars)

    def _simple_ok(self, simple, alpha) -> bool:
        for a in simple:
            vs = free_vars(a)
            if not all(v in alpha for v in vs):
                continue
            if isinstance(a, A.NodeEq) and alpha[("node", a.x)] != alpha[("node", a.y)]:
                return False
            if isinstance(a, A.RegEq) and alpha[("reg", a.u)] != alpha[("reg", a.v)]:
                return False
            if isinstance(a, A.RegBot) and alpha[("reg", a.v)] != self.bot:
                return False
        return True

    def _rec(self, cls, i, alpha, paths, simple, node_vars, reg_vars):
        if not self._simple_ok(simple, alpha):
            return
        if i == len(cls):
            for sol in self._finish(alpha, paths, simple, node_vars + reg_vars, 0):
                yield _Solution(sol[0], sol[1])
            return
        c = cls[i]
        fixed = next((alpha[("path", p)] for p in c.members if ("path", p) in alpha), None)
        if fixed is None:
            fixed = next((paths[p].get() for p in c.members if p in paths), None)
        start_var = ("node", c.endpoints[0][0]) if c.endpoints else None
        in_vars = [("reg", v_in) for _, v_in, _ in c.atoms]
        if fixed is not None:
            starts = [fixed.first]
        elif start_var is not None and start_var in alpha:
            starts = [alpha[start_var]]
        else:
            starts = list(self.g.nodes)
        for u in starts:
            a1 = dict(alpha)
            if start_var is not None and not _unify(a1, start_var, u):
                continue
            for a2 in self._assign_all(a1, [v for v in dict.fromkeys(in_vars) if v not in a1]):
                if not self._simple_ok(simple, a2):
                    continue
                lams = tuple(a2[v] for v in in_vars)
                for (end, outs), path in self._class_results(c, u, lams, fixed).items():
                    a3 = dict(a2)
                    ok = all(_unify(a3, ("node", x), u) and _unify(a3, ("node", y), end)
                             for x, y in c.endpoints)
                    ok = ok and all(_unify(a3, ("reg", v_out), lam)
                                    for (_, _, v_out), lam in zip(c.atoms, outs))
                    if not ok:
                        continue
                    p2 = dict(paths)
                    for p in c.members:
                        p2[p] = path
                    yield from self._rec(cls, i + 1, a3, p2, simple, node_vars, reg_vars)

    def _class_results(self, c, u, lams, fixed):
        if fixed is not None:
            outs_per_atom = [sorted(self.runner(e).parse(fixed, lam), key=repr)
                             for (e, _, _), lam in zip(c.atoms, lams)]
            return {(fixed.last, outs): _Fixed(fixed) for outs in _product(outs_per_atom)}
        key = (tuple(e for e, _, _ in c.atoms), u, lams)
        hit = self._search_memo.get(key)
        if hit is None:
            prod = _Product([self.runner(e) for e, _, _ in c.atoms])
            hit = self._search_memo[key] = prod.search(self.g, u, lams)
        return hit

    def _assign_all(self, alpha, vars_):
        if not vars_:
            yield alpha
            return
        v, rest = vars_[0], vars_[1:]
        dom = self.g.nodes if v[0] == "node" else self.regs
        for d in dom:
            yield from self._assign_all({**alpha, v: d}, rest)

    def _finish(self, alpha, paths, simple, vars_, j):
        while j < len(vars_) and vars_[j] in alpha:
            j += 1
        if j == len(vars_):
            if self._simple_ok(simple, alpha):
                yield alpha, paths
            return
        v = vars_[j]
        for d in (self.g.nodes if v[0] == "node" else self.regs):
            a = {**alpha, v: d}
            if self._simple_ok(simple, a):
                yield from self._finish(a, paths, simple, vars_, j + 1)


class _Fixed:
    __slots__ = ("path",)

    def __init__(self, path):
        self.path = path

    def get(self) -> Path:
        return self.path


class _Solution:
    """Node/register assignment plus lazily materialized paths per path variable."""

    def __init__(self, alpha, paths):
        self.alpha, self.paths = alpha, paths

    def full(self) -> dict:
        out = dict(self.alpha)
        for p, lazy in self.paths.items():
            out[("path", p)] = lazy.get()
        return out


def _unify(alpha, var, value) -> bool:
    if var in alpha:
        return alpha[var] == value
    alpha[var] = value
    return True


@dataclass
class NrlResult:
    value: bool
    witness: dict | None  # assignment over prenex variable names
    prenex_formula: object  # the formula the witness refers to


def nrlplus_eval(g: DataGraph, formula, alpha: dict | None = None, k: int = 1,
                 with_witness: bool = False):
    ev = NrlEvaluator(g, formula, k)
    alpha = dict(alpha or {})
    for sol in ev.solutions(alpha):
        if with_witness:
            return NrlResult(True, sol.full(), rebuild_prenex(ev.quants, ev.matrix))
        return True
    return NrlResult(False, None, rebuild_prenex(ev.quants, ev.matrix)) if with_witness else False


def nrlplus_answers(g: DataGraph, formula, answer_vars: list[str], alpha: dict | None = None,
                    k: int = 1) -> set[tuple]:
    """All tuples of nodes for the given free node variables that make the formula true."""
    ev = NrlEvaluator(g, formula, k)
    out = set()
    for sol in ev.solutions(dict(alpha or {}), want=answer_vars):
        out.add(tuple(sol.alpha[("node", x)] for x in answer_vars))
    return out


def rebuild_prenex(quants, matrix):
    f = matrix
    for sort, name in reversed(quants):
        f = A.Exists(sort, name, f)
    return f
