"""Exact register-logic evaluation through a finite first-order structure.

The formula becomes a first-order sentence over the vocabulary
Nodes, Paths, Registers, Endpoints, e_1..e_m and a constant for the all-⊥ tuple.
Paths are grouped by (start, end, profile), where a profile is the set of
(i, λ, λ') with e_i(ρ, λ, λ'). Each group keeps min(T, size) representatives,
T being the prenex quantifier rank plus the number of free path variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from ..graph import DataGraph, NodeId, Path
from ..lang import ast as A
from ..lang.analysis import count_quantifiers, free_vars
from ..rem import ProfileTracker, RemRunner, bottom, register_space
from .errors import ResourceLimit, UnassignedVariable
from .universe import discover

DEFAULT_BUDGET = 200_000

# ------------------------------------------------------------------ FO syntax


@dataclass(frozen=True)
class FAtom:
    rel: str
    args: tuple  # variable names, or BOT_CONST


@dataclass(frozen=True)
class FEq:
    a: str
    b: str


@dataclass(frozen=True)
class FNot:
    arg: object


@dataclass(frozen=True)
class FOr:
    left: object
    right: object


@dataclass(frozen=True)
class FAnd:
    left: object
    right: object


@dataclass(frozen=True)
class FExists:
    var: str
    body: object


BOT_CONST = "⊥̄"
GUARD = {"node": "Nodes", "path": "Paths", "reg": "Registers"}


def fo_translate(f, rems: list | None = None):
    """Guard quantifiers by sort, keep atoms as relation atoms, ⊥ tests as equalities."""
    rems = A.rem_atoms(f) if rems is None else rems
    index = {e: i + 1 for i, e in enumerate(rems)}

    def tr(x):
        if isinstance(x, (A.NodeEq, A.PathEq, A.RegEq)):
            a, b = (getattr(x, n) for n in x.__dataclass_fields__)
            return FEq(a, b)
        if isinstance(x, A.RegBot):
            return FEq(x.v, BOT_CONST)
        if isinstance(x, A.Endpoints):
            return FAtom("Endpoints", (x.x, x.p, x.y))
        if isinstance(x, A.RemAtom):
            return FAtom(f"e{index[x.rem]}", (x.p, x.v_in, x.v_out))
        if isinstance(x, A.Not):
            return FNot(tr(x.arg))
        if isinstance(x, A.Or):
            return FOr(tr(x.left), tr(x.right))
        if isinstance(x, A.And):
            return FAnd(tr(x.left), tr(x.right))
        if isinstance(x, A.Exists):
            return FExists(x.var, FAnd(FAtom(GUARD[x.sort], (x.var,)), tr(x.body)))
        raise TypeError(f"not an RL formula: {x!r}")
    return tr(f)


def fo_rank(phi) -> int:
    if isinstance(phi, FExists):
        return 1 + fo_rank(phi.body)
    if isinstance(phi, (FOr, FAnd)):
        return max(fo_rank(phi.left), fo_rank(phi.right))
    if isinstance(phi, FNot):
        return fo_rank(phi.arg)
    return 0


def fo_print(phi) -> str:
    if isinstance(phi, FAtom):
        return f"{phi.rel}({', '.join(phi.args)})"
    if isinstance(phi, FEq):
        return f"{phi.a} = {phi.b}"
    if isinstance(phi, FNot):
        return f"¬{fo_print(phi.arg)}"
    if isinstance(phi, FOr):
        return f"({fo_print(phi.left)} ∨ {fo_print(phi.right)})"
    if isinstance(phi, FAnd):
        return f"({fo_print(phi.left)} ∧ {fo_print(phi.right)})"
    return f"∃{phi.var} {fo_print(phi.body)}"


def threshold(f) -> int:
    """Rank of the prenex form (one quantifier per binder) plus free path variables."""
    return count_quantifiers(f) + sum(1 for v in free_vars(f) if v[0] == "path")


# ------------------------------------------------------- profiles and counts

def path_profile(g: DataGraph, path: Path, rems: list, k: int, tables: dict | None = None) -> frozenset:
    tables = dict(tables or {})
    out = []
    for i, e in enumerate(rems):
        r = RemRunner(g, e, k, tables)
        for lam in register_space(g, k):
            for lam2 in r.parse(path, lam):
                out.append((i, lam, lam2))
    return frozenset(out)


@dataclass
class RepresentativeStructure:
    nodes: tuple
    paths: list  # representatives plus assigned free paths, canonical order
    regs: list
    bot: tuple
    profile: dict  # Path -> frozenset of (i, λ, λ')
    counts: dict  # (u, v, profile) -> capped count
    T: int
    m: int
    rel: dict = field(default_factory=dict)  # e_i -> set of (path, λ, λ')

    def domain_size(self) -> int:
        return len(self.nodes) + len(self.paths) + len(self.regs)


def _classes(g, rems, k, cap, budget, starts=None, L=None):
    tracker = ProfileTracker(g, rems, k)
    uni = discover(g, tracker, cap, L=L, starts=starts, budget=budget)
    groups: dict = {}
    for p, sig in uni.paths:
        E = tracker.profile(sig)
        groups.setdefault((p.first, p.last, E), []).append(p)
    return tracker, uni, {key: sorted(ps, key=Path.sort_key)[:cap] for key, ps in groups.items()}


def build_representative(g: DataGraph, f, alpha: dict | None = None, k: int = 1,
                         budget: int | None = DEFAULT_BUDGET) -> RepresentativeStructure:
    alpha = dict(alpha or {})
    rems = A.rem_atoms(f)
    T = threshold(f)
    tracker, uni, groups = _classes(g, rems, k, T, budget)
    if not uni.complete:
        raise ResourceLimit("path discovery did not saturate")
    paths: list = []
    profile: dict = {}
    counts: dict = {}
    for key in sorted(groups, key=lambda key: groups[key][0].sort_key()):
        counts[key] = len(groups[key])
        for p in groups[key]:
            paths.append(p)
            profile[p] = key[2]
    for v, p in alpha.items():
        if v[0] == "path" and p not in profile:
            profile[p] = path_profile(g, p, rems, k)
            paths.append(p)
    paths.sort(key=Path.sort_key)
    rel: dict = {i: set() for i in range(len(rems))}
    for p in paths:
        for (i, lam, lam2) in profile[p]:
            rel[i].add((p, lam, lam2))
    return RepresentativeStructure(g.nodes, paths, register_space(g, k), bottom(k), profile,
                                   counts, T, len(rems), rel)


class FoEvaluator:
    def __init__(self, M: RepresentativeStructure):
        self.M = M
        self.dom = {"Nodes": list(M.nodes), "Paths": M.paths, "Registers": M.regs}
        self.node_set = set(M.nodes)
        self.path_set = set(M.paths)
        self.reg_set = set(M.regs)
        self._memo: dict = {}
        self._fv: dict = {}

    def fv(self, phi) -> tuple:
        hit = self._fv.get(id(phi))
        if hit is None:
            hit = self._fv[id(phi)] = (tuple(sorted(_fo_free(phi))), phi)
        return hit[0]

    def val(self, env, name):
        if name == BOT_CONST:
            return self.M.bot
        try:
            return env[name]
        except KeyError:
            raise UnassignedVariable(name) from None

    def holds(self, phi, env) -> bool:
        if isinstance(phi, (FExists, FNot, FOr, FAnd)):
            key = (id(phi),) + tuple(env.get(v) for v in self.fv(phi))
            hit = self._memo.get(key)
            if hit is None:
                hit = self._memo[key] = self._holds(phi, env)
            return hit
        return self._holds(phi, env)

    def _holds(self, phi, env) -> bool:
        M = self.M
        if isinstance(phi, FEq):
            return _tag(self.val(env, phi.a)) == _tag(self.val(env, phi.b))
        if isinstance(phi, FAtom):
            args = [self.val(env, a) for a in phi.args]
            if phi.rel == "Nodes":
                return isinstance(args[0], str) and args[0] in self.node_set
            if phi.rel == "Paths":
                return isinstance(args[0], Path) and args[0] in self.path_set
            if phi.rel == "Registers":
                return isinstance(args[0], tuple) and not isinstance(args[0], Path) and args[0] in self.reg_set
            if phi.rel == "Endpoints":
                x, p, y = args
                return isinstance(p, Path) and p in self.path_set and p.first == x and p.last == y
            i = int(phi.rel[1:]) - 1
            return tuple(args) in M.rel[i]
        if isinstance(phi, FNot):
            return not self.holds(phi.arg, env)
        if isinstance(phi, FOr):
            return self.holds(phi.left, env) or self.holds(phi.right, env)
        if isinstance(phi, FAnd):
            return self.holds(phi.left, env) and self.holds(phi.right, env)
        if isinstance(phi, FExists):
            body = phi.body
            # guarded quantifier: only range over the guard's sort
            if isinstance(body, FAnd) and isinstance(body.left, FAtom) and body.left.rel in self.dom \
                    and body.left.args == (phi.var,):
                domain, body = self.dom[body.left.rel], body.right
            else:
                domain = list(M.nodes) + M.paths + M.regs
            return any(self.holds(body, {**env, phi.var: d}) for d in domain)
        raise TypeError(phi)


def _tag(x):
    return (type(x).__name__, x)


def _fo_free(phi) -> set:
    if isinstance(phi, FAtom):
        return {a for a in phi.args if a != BOT_CONST}
    if isinstance(phi, FEq):
        return {a for a in (phi.a, phi.b) if a != BOT_CONST}
    if isinstance(phi, FNot):
        return _fo_free(phi.arg)
    if isinstance(phi, (FOr, FAnd)):
        return _fo_free(phi.left) | _fo_free(phi.right)
    return _fo_free(phi.body) - {phi.var}


def rl_eval_exact(g: DataGraph, f, alpha: dict | None = None, k: int = 1,
                  budget: int | None = DEFAULT_BUDGET) -> bool:
    alpha = dict(alpha or {})
    M = build_representative(g, f, alpha, k, budget)
    env = {name: v for (sort, name), v in alpha.items()}
    return FoEvaluator(M).holds(fo_translate(f), env)


# --------------------------------------------------------------- counting

def count_paths_threshold(g: DataGraph, u: NodeId, v: NodeId, E: frozenset, t: int,
                          rems: list, k: int, budget: int | None = DEFAULT_BUDGET) -> int:
    """min(t, number of u-to-v paths whose profile is exactly E)."""
    _, uni, groups = _classes(g, rems, k, t, budget, starts=[u])
    if not uni.complete:
        raise ResourceLimit("path discovery did not saturate")
    return len(groups.get((u, v, E), []))


def count_paths_product(g: DataGraph, u: NodeId, v: NodeId, E: frozenset, t: int,
                        rems: list, k: int, limit: int = 2_000_000) -> int:
    """Same count via i-tuples of simultaneously read paths.

    For i = 1..t, search the product of i copies of the signature automaton. A copy
    either reads the next edge or stops for good (then it reads only padding). The
    search also tracks which pairs of copies have already read different strings.
    Acceptance: every copy stopped at v with profile E and all pairs differ.
    """
    tracker = ProfileTracker(g, rems, k)
    best = 0
    for i in range(1, t + 1):
        if _tuple_search(g, tracker, u, v, E, i, limit):
            best = i
        else:
            break
    return best


def _tuple_search(g, tracker, u, v, E, i, limit) -> bool:
    pairs = list(combinations(range(i), 2))
    s0 = tracker.start(u)
    start = (tuple((s0, False) for _ in range(i)), 0)
    seen = {start}
    todo = [start]
    full = (1 << len(pairs)) - 1
    while todo:
        copies, differ = todo.pop()
        if all(stop for _, stop in copies) and differ == full:
            if all(sig[1] == v and tracker.profile(sig) == E for sig, _ in copies):
                return True
        # each running copy picks an edge or stops; stopped copies read padding
        options = []
        for sig, stop in copies:
            if stop:
                options.append([((sig, True), None)])
            else:
                opts = [((sig, True), None)]
                for a, w in g.out(sig[1]):
                    opts.append(((tracker.step(sig, a, w), False), (a, w)))
                options.append(opts)
        if all(stop for _, stop in copies):
            continue
        for combo in _product(options):
            letters = [x for _, x in combo]
            d = differ
            for bit, (a, b) in enumerate(pairs):
                if letters[a] != letters[b]:
                    d |= 1 << bit
            nxt = (tuple(c for c, _ in combo), d)
            if nxt not in seen:
                seen.add(nxt)
                if len(seen) > limit:
                    raise ResourceLimit("tuple product too large")
                todo.append(nxt)
    return False


def _product(options):
    if not options:
        yield ()
        return
    for first in options[0]:
        for rest in _product(options[1:]):
            yield (first,) + rest
