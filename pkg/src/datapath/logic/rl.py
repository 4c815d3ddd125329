"""Bounded register-logic evaluation by direct search over the path domain.

Two path domains are available. `naive` enumerates every path of length <= L.
`classes` keeps, per signature class, the canonically first P+1 paths of length
<= L where P counts the formula's path variables. Swapping two paths of one class
is an automorphism of the bounded structure (they have equal endpoints and satisfy
the same REM atoms), so a quantifier only needs the assigned path values plus one
unassigned member of each class; P+1 kept members always leave one unassigned.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..graph import DataGraph, Path, validate_path
from ..lang import ast as A
from ..lang.analysis import free_vars
from ..oracles import enum_paths
from ..rem import ProfileTracker, RemRunner, bottom, input_free, register_space
from .errors import UnassignedVariable
from .universe import discover


def key_of(var) -> tuple:
    return var


def path_var_count(f) -> int:
    bound = sum(1 for g in A.walk(f) if isinstance(g, A.Exists) and g.sort == "path")
    return bound + sum(1 for v in free_vars(f) if v[0] == "path")


class RlEvaluator:
    def __init__(self, g: DataGraph, formula, k: int, L: int, domain: str = "classes",
                 budget: int | None = None, tables: dict | None = None):
        self.g, self.formula, self.k, self.L = g, formula, k, L
        target = _prune_target(formula) if domain == "classes" else None
        # atoms under delegated path quantifiers are evaluated by inner evaluators
        self.rems = _outer_atoms(formula, target[0]) if target else A.rem_atoms(formula)
        self.tables = dict(tables or {})
        self.runners = {e: RemRunner(g, e, k, self.tables) for e in self.rems}
        self.regs = register_space(g, k)
        self.bot = bottom(k)
        self.domain = domain
        self.budget = budget
        self._fv: dict = {}
        self._memo: dict = {}
        self._parse: dict = {}
        self._by_id: dict = {}
        self._keep: list = []
        self._scoped: dict = {}
        self.rem_index = {e: i for i, e in enumerate(self.rems)}
        self.sig_of: dict = {}
        if domain == "classes":
            doms = input_domains(formula, self.rems)
            # input-free REMs answer for every λ_in from the all-bottom run
            self.free = {i for i, e in enumerate(self.rems) if input_free(e, k)}
            inputs = [(self.bot,) if doms.get(e) == "bot" or i in self.free else None
                      for i, e in enumerate(self.rems)]
            self.tracker = ProfileTracker(g, self.rems, k, self.tables, inputs)
            self.prune_var = target[0] if target else None
            dead = _DeadCheck(self, target[0], miniscope(target[1])).dead if target else None
            self.universe = discover(g, self.tracker, path_var_count(formula) + 1, L,
                                     budget=budget, dead=dead)
            self.paths = [p for p, _ in self.universe.paths]
            self.sig_of = dict(self.universe.paths)
            self.complete = self.universe.complete
        else:
            self.free = set()
            self.prune_var = None
            self.tracker = None
            self.universe = None
            self.paths = list(enum_paths(g, L))
            self.complete = False
        self._inner: dict = {}
        self.paths_by_start: dict = {}
        for p in self.paths:
            self.paths_by_start.setdefault(p.first, []).append(p)

    # ------------------------------------------------------------------ atoms
    def profile(self, path: Path) -> frozenset:
        sig = self.sig_of.get(path)
        if sig is None:
            sig = self.tracker.start(path.nodes[0])
            for a, v in zip(path.labels, path.nodes[1:]):
                sig = self.tracker.step(sig, a, v)
            self.sig_of[path] = sig
        return self.tracker.profile(sig)

    def rem_id(self, e) -> int:
        # AST hashes are recursive, so look REMs up by identity
        i = self._by_id.get(id(e))
        if i is None:
            i = self._by_id[id(e)] = self.rem_index[e]
            self._keep.append(e)
        return i

    def rem_holds(self, e, path: Path, lam, lam2) -> bool:
        if self.tracker is not None:
            i = self.rem_id(e)
            return (i, self.bot if i in self.free else lam, lam2) in self.profile(path)
        return lam2 in self.parse(e, path, lam)

    def outputs(self, e, path: Path, lam) -> frozenset:
        """λ' with (path, lam, λ') in the relation of e."""
        if self.tracker is not None:
            i = self.rem_id(e)
            self.profile(path)
            key = (i, self.bot if i in self.free else lam)
            return self.tracker.outputs(self.sig_of[path]).get(key, frozenset())
        return self.parse(e, path, lam)

    def parse(self, e, path: Path, lam) -> frozenset:
        key = (id(e), path, lam)
        hit = self._parse.get(key)
        if hit is None:
            hit = self.runners[e].parse(path, lam)
            self._parse[key] = hit
        return hit

    def fv(self, f) -> tuple:
        hit = self._fv.get(id(f))
        if hit is None:
            hit = self._fv[id(f)] = (tuple(sorted(free_vars(f))), f)
        return hit[0]

    @staticmethod
    def get(alpha, var):
        try:
            return alpha[var]
        except KeyError:
            raise UnassignedVariable(var[1]) from None

    # ------------------------------------------------------------- evaluation
    def candidates(self, sort, var, body, alpha):
        if sort == "node":
            return self.g.nodes
        if sort == "reg":
            return self.regs
        start = _start_hint(body, var, alpha)
        base = self.paths_by_start.get(start, []) if start is not None else self.paths
        extra = [p for (v, p) in alpha.items() if v[0] == "path" and p not in base
                 and (start is None or p.first == start) and len(p) <= self.L]
        return extra + base if extra else base

    def holds(self, f, alpha) -> bool:
        if isinstance(f, (A.Not, A.Or, A.And, A.Exists)):
            key = (id(f),) + tuple(alpha.get(v) for v in self.fv(f))
            hit = self._memo.get(key)
            if hit is None:
                hit = self._holds(f, alpha)
                self._memo[key] = hit
            return hit
        return self._holds(f, alpha)

    def _holds(self, f, alpha) -> bool:
        get = self.get
        if isinstance(f, A.NodeEq):
            return get(alpha, ("node", f.x)) == get(alpha, ("node", f.y))
        if isinstance(f, A.PathEq):
            return get(alpha, ("path", f.p)) == get(alpha, ("path", f.q))
        if isinstance(f, A.RegEq):
            return get(alpha, ("reg", f.u)) == get(alpha, ("reg", f.v))
        if isinstance(f, A.RegBot):
            return get(alpha, ("reg", f.v)) == self.bot
        if isinstance(f, A.Endpoints):
            p = get(alpha, ("path", f.p))
            return p.first == get(alpha, ("node", f.x)) and p.last == get(alpha, ("node", f.y))
        if isinstance(f, A.RemAtom):
            p = get(alpha, ("path", f.p))
            return self.rem_holds(f.rem, p, get(alpha, ("reg", f.v_in)), get(alpha, ("reg", f.v_out)))
        if isinstance(f, A.Not):
            return not self.holds(f.arg, alpha)
        if isinstance(f, A.Or):
            return self.holds(f.left, alpha) or self.holds(f.right, alpha)
        if isinstance(f, A.And):
            return self.holds(f.left, alpha) and self.holds(f.right, alpha)
        if isinstance(f, A.Exists):
            var = (f.sort, f.var)
            if var not in self.fv(f.body):
                return self.holds(f.body, alpha)
            b = f.body
            if isinstance(b, A.RemAtom) and b.v_out == f.var and b.v_in != f.var:
                # some output register: one lookup instead of a loop over registers
                p = get(alpha, ("path", b.p))
                return bool(self.outputs(b.rem, p, get(alpha, ("reg", b.v_in))))
            if f.sort == "path" and self.prune_var not in (None, f.var):
                return self.inner(f).holds(f, alpha)
            for c in self.candidates(f.sort, f.var, f.body, alpha):
                if self.holds(f.body, {**alpha, var: c}):
                    return True
            return False
        raise TypeError(f"not an RL formula: {f!r}")

    def inner(self, f) -> "RlEvaluator":
        """Evaluator for a path quantifier independent of the pruned one: its paths
        come from a separate, unpruned discovery over the REMs it uses."""
        hit = self._inner.get(id(f))
        if hit is None:
            hit = self._inner[id(f)] = (RlEvaluator(self.g, f, self.k, self.L, self.domain,
                                                    self.budget, self.tables), f)
            ev = hit[0]
            self.complete = self.complete and ev.complete
        return hit[0]

    def witness(self, f, alpha):
        """Assignment for the leading existential block of f, or None if f fails."""
        if isinstance(f, A.Exists):
            var = (f.sort, f.var)
            for c in self.candidates(f.sort, f.var, f.body, alpha):
                w = self.witness(f.body, {**alpha, var: c})
                if w is not None:
                    return {var: c, **w}
            return None
        return {} if self.holds(self.scoped(f), alpha) else None

    def scoped(self, f):
        hit = self._scoped.get(id(f))
        if hit is None:
            hit = self._scoped[id(f)] = (miniscope(f), f)
        return hit[0]


def _outer_atoms(f, var) -> list:
    """REMs of f outside path quantifiers over variables other than var."""
    out: list = []

    def go(g):
        if isinstance(g, A.Exists) and g.sort == "path" and g.var != var:
            return
        if isinstance(g, A.RemAtom) and g.rem not in out:
            out.append(g.rem)
        for c in A.children(g):
            go(c)
    go(f)
    return out


def _prune_target(f):
    """(π, body) when f is a closed ∃π body whose other path quantifiers do not
    mention π (they are evaluated over their own, unpruned paths)."""
    if not (isinstance(f, A.Exists) and f.sort == "path") or free_vars(f):
        return None
    for g in A.walk(f.body):
        if isinstance(g, A.Exists) and g.sort == "path":
            if g.var == f.var or ("path", f.var) in free_vars(g):
                return None
        if isinstance(g, A.PathEq):
            return None
    return f.var, f.body


class _DeadCheck:
    """Three-valued reading of the body of ∃π body on a path prefix. A prefix is
    dead when the body is false for the prefix and for every extension of it:
    an atom is settled true once a held-register universal state is reached and
    settled false once no run is left for its input registers."""

    def __init__(self, ev: "RlEvaluator", var: str, body):
        self.ev, self.var, self.body = ev, var, body
        self.lam_index = [{lam: li for li, lam in enumerate(lams)} for lams in ev.tracker.inputs]
        self._memo: dict = {}
        self._atoms: dict = {}

    def input(self, i, lam):
        return self.ev.bot if i in self.ev.free else lam

    def dead(self, sig) -> bool:
        key = (sig[0], sig[2])
        hit = self._memo.get(key)
        if hit is None:
            self._atoms = {}
            hit = self._memo[key] = self.value(self.body, {}, sig) is False
        return hit

    def atom(self, i, lam, lam2, sig):
        """Value of REM i from input lam, for output lam2 or (lam2 None) any output."""
        li = self.lam_index[i].get(self.input(i, lam))
        if li is None:
            return None
        key = (i, li, lam2)
        if key in self._atoms:
            return self._atoms[key]
        runner = self.ev.tracker.runners[i]
        out = False
        for lj, q, regs in sig[2][i]:
            if lj == li:
                out = None
                if (lam2 is None or regs == lam2) and q in runner.universal_states(regs):
                    out = True
                    break
        self._atoms[key] = out
        return out

    def value(self, f, alpha, sig):
        if isinstance(f, A.RemAtom):
            return self.atom(self.ev.rem_id(f.rem), alpha[("reg", f.v_in)],
                             alpha[("reg", f.v_out)], sig)
        if isinstance(f, A.Not):
            v = self.value(f.arg, alpha, sig)
            return None if v is None else not v
        if isinstance(f, (A.Or, A.And)):
            stop = isinstance(f, A.Or)
            a = self.value(f.left, alpha, sig)
            if a is stop:
                return stop
            b = self.value(f.right, alpha, sig)
            if b is stop:
                return stop
            return None if (a is None or b is None) else (not stop)
        if isinstance(f, A.Exists) and f.sort == "path":
            return None
        if isinstance(f, A.Exists) and isinstance(f.body, A.RemAtom) \
                and f.body.v_out == f.var and f.body.v_in != f.var:
            a = f.body
            return self.atom(self.ev.rem_id(a.rem), alpha[("reg", a.v_in)], None, sig)
        if isinstance(f, A.Exists):
            dom = self.ev.regs if f.sort == "reg" else self.ev.g.nodes
            unknown = False
            for c in dom:
                v = self.value(f.body, {**alpha, (f.sort, f.var): c}, sig)
                if v is True:
                    return True
                unknown |= v is None
            return None if unknown else False
        if isinstance(f, A.RegBot):
            return alpha[("reg", f.v)] == self.ev.bot
        if isinstance(f, A.RegEq):
            return alpha[("reg", f.u)] == alpha[("reg", f.v)]
        if isinstance(f, A.NodeEq):
            return alpha[("node", f.x)] == alpha[("node", f.y)]
        if isinstance(f, A.Endpoints) and f.p == self.var:
            return False if sig[0] != alpha[("node", f.x)] else None
        return None


def input_domains(formula, rems) -> dict:
    """REM -> "bot" when every atom of it reads its input register from a variable
    bound as `exists reg z . z = bot and ...`; such REMs are only ever queried
    (inside a true conjunction) with the all-bottom input."""
    out = {e: "bot" for e in rems}

    def visit(f, botvars):
        if isinstance(f, A.RemAtom):
            if f.v_in not in botvars:
                out[f.rem] = "any"
            return
        if isinstance(f, A.Exists):
            inner = set(botvars) - {f.var}
            if f.sort == "reg" and any(isinstance(c, A.RegBot) and c.v == f.var
                                       for c in _conjuncts(f.body)):
                inner.add(f.var)
            visit(f.body, frozenset(inner))
            return
        for c in A.children(f):
            visit(c, botvars)

    visit(formula, frozenset())
    return out


def _conjuncts(f) -> list:
    return _conjuncts(f.left) + _conjuncts(f.right) if isinstance(f, A.And) else [f]


def miniscope(f):
    """Drop double negations and push existential quantifiers inward past conjuncts
    and disjuncts that do not mention the variable. The result is equivalent and evaluates the quantifier
    once per relevant assignment instead of once per outer assignment."""
    if isinstance(f, A.Exists):
        return _push(f.sort, f.var, miniscope(f.body))
    if isinstance(f, A.Not):
        if isinstance(f.arg, A.Not):
            return miniscope(f.arg.arg)
        return A.Not(miniscope(f.arg))
    if isinstance(f, A.Or):
        return A.Or(miniscope(f.left), miniscope(f.right))
    if isinstance(f, A.And):
        return A.And(miniscope(f.left), miniscope(f.right))
    return f


def _push(sort, var, f):
    v = (sort, var)
    if v not in free_vars(f):
        return A.Exists(sort, var, f)
    if isinstance(f, A.Or):
        return A.Or(_push(sort, var, f.left), _push(sort, var, f.right))
    if isinstance(f, A.Exists) and f.var != var:
        inner = _push(sort, var, f.body)
        if not (isinstance(inner, A.Exists) and inner.var == var and inner.body is f.body):
            return A.Exists(f.sort, f.var, inner)
    if isinstance(f, A.And):
        parts = _conjuncts(f)
        inside = [c for c in parts if v in free_vars(c)]
        outside = [c for c in parts if v not in free_vars(c)]
        if outside:
            inner = _push(sort, var, A.conj(*inside)) if len(inside) == 1 else A.Exists(sort, var, A.conj(*inside))
            return A.conj(*outside, inner)
    return A.Exists(sort, var, f)


def _start_hint(body, var, alpha):
    """A node the path must start at, read off top-level conjuncts (x, π, y)."""
    stack = [body]
    while stack:
        f = stack.pop()
        if isinstance(f, A.And):
            stack += [f.left, f.right]
        elif isinstance(f, A.Endpoints) and f.p == var and ("node", f.x) in alpha:
            return alpha[("node", f.x)]
    return None


@dataclass
class RlResult:
    value: bool
    witness: dict | None
    complete: bool
    bound: int


def rl_eval_brute(g: DataGraph, formula, alpha: dict | None = None, L: int = 4, k: int = 1,
                  domain: str = "classes", budget: int | None = None, with_witness: bool = False):
    """Register-logic semantics with path quantifiers restricted to length <= L.

    `alpha` maps ("node"|"path"|"reg", name) to values. Returns a bool, or an
    RlResult when with_witness is set.
    """
    alpha = dict(alpha or {})
    ev = RlEvaluator(g, formula, k, L, domain, budget)
    if not with_witness:
        return ev.holds(ev.scoped(formula), alpha)
    w = ev.witness(formula, alpha)
    return RlResult(w is not None, w, ev.complete, L)


def strip_existentials(f):
    names = []
    while isinstance(f, A.Exists):
        names.append((f.sort, f.var))
        f = f.body
    return names, f


def check_witness(g: DataGraph, formula, alpha: dict, witness: dict, k: int, L: int | None = None) -> bool:
    """Independent re-check: paths are walks of g and the body holds under the witness."""
    names, body = strip_existentials(formula)
    full = {**alpha}
    for var in names:
        if var not in witness:
            if var in free_vars(body):
                return False
            continue
        val = witness[var]
        if var[0] == "path":
            validate_path(g, val.nodes, val.labels)
        elif var[0] == "node" and val not in g.kappa:
            return False
        elif var[0] == "reg" and (len(val) != k or any(x is not None and x not in set(g.values()) for x in val)):
            return False
        full[var] = val
    lengths = [len(v) for (s, _), v in full.items() if s == "path"]
    bound = max(lengths + [L or 0])
    return rl_eval_brute(g, body, full, bound, k, domain="classes")
