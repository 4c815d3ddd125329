"""REM semantics: register assignments, compilation to register automata, parsing,
reachability over (node, state, registers) configurations and nesting tables."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Optional

from .graph import DataGraph, DataValue, NodeId, Path
from .lang import ast as A

BOT = None  # the unset register value; never equal to a data value
Regs = tuple  # k-tuple over D ∪ {BOT}


def bottom(k: int) -> Regs:
    return (BOT,) * k


def eval_condition(c, d: DataValue, tau: Regs) -> bool:
    if isinstance(c, A.CEq):
        v = tau[c.reg - 1]
        return v is not BOT and v == d
    if isinstance(c, A.CAnd):
        return eval_condition(c.left, d, tau) and eval_condition(c.right, d, tau)
    if isinstance(c, A.CNot):
        return not eval_condition(c.arg, d, tau)
    raise TypeError(c)


def with_stores(lam: Regs, regs: Iterable[int], d: DataValue) -> Regs:
    regs = set(regs)
    return tuple(d if i + 1 in regs else x for i, x in enumerate(lam))


def register_space(g: DataGraph, k: int) -> list[Regs]:
    """(D ∪ {⊥})^k in a fixed order, ⊥ first."""
    dom = [BOT] + g.values()
    return [tuple(t) for t in product(dom, repeat=k)]


# ------------------------------------------------------------------ automaton

@dataclass(frozen=True)
class EdgeStep:
    src: int
    symbol: Optional[str]  # None reads any letter
    dst: int


@dataclass(frozen=True)
class SilentStep:
    src: int
    dst: int
    test: Optional[object] = None
    store: Optional[tuple] = None
    nest: Optional[object] = None  # Rem whose nesting table guards the step


@dataclass(frozen=True)
class RegisterAutomaton:
    n_states: int
    initial: int
    finals: frozenset
    steps: tuple

    def edge_steps(self, q: int):
        return self._index()[0].get(q, ())

    def silent_steps(self, q: int):
        return self._index()[1].get(q, ())

    def _index(self):
        idx = self.__dict__.get("_idx")
        if idx is None:
            edges: dict = {}
            silent: dict = {}
            for s in self.steps:
                (edges if isinstance(s, EdgeStep) else silent).setdefault(s.src, []).append(s)
            idx = ({q: tuple(v) for q, v in edges.items()}, {q: tuple(v) for q, v in silent.items()})
            object.__setattr__(self, "_idx", idx)
        return idx


def compile_rem(e) -> RegisterAutomaton:
    """Thompson-style construction; stores fire at a sub-parse's first node and tests
    at its last node, both as silent steps reading the current node's value."""
    steps: list = []
    counter = [0]

    def new() -> int:
        counter[0] += 1
        return counter[0] - 1

    def build(x) -> tuple[int, int]:
        if isinstance(x, A.Epsilon):
            s = new()
            return s, s
        if isinstance(x, (A.Letter, A.AnyLetter)):
            s, f = new(), new()
            steps.append(EdgeStep(s, x.symbol if isinstance(x, A.Letter) else None, f))
            return s, f
        if isinstance(x, A.Union_):
            s, f = new(), new()
            for part in (x.left, x.right):
                ps, pf = build(part)
                steps.append(SilentStep(s, ps))
                steps.append(SilentStep(pf, f))
            return s, f
        if isinstance(x, A.Concat):
            ls, lf = build(x.left)
            rs, rf = build(x.right)
            steps.append(SilentStep(lf, rs))
            return ls, rf
        if isinstance(x, (A.Plus, A.Star)):
            s, f = new(), new()
            is_, if_ = build(x.arg)
            steps.append(SilentStep(s, is_))
            steps.append(SilentStep(if_, f))
            steps.append(SilentStep(if_, is_))
            if isinstance(x, A.Star):
                steps.append(SilentStep(s, f))
            return s, f
        if isinstance(x, A.Test):
            is_, if_ = build(x.arg)
            f = new()
            steps.append(SilentStep(if_, f, test=x.cond))
            return is_, f
        if isinstance(x, A.Store):
            s = new()
            is_, if_ = build(x.arg)
            steps.append(SilentStep(s, is_, store=x.regs))
            return s, if_
        if isinstance(x, A.Nest):
            s, f = new(), new()
            steps.append(SilentStep(s, f, nest=x.arg))
            return s, f
        raise TypeError(x)

    s, f = build(e)
    return _normalize(counter[0], s, f, steps)


def _is_pure(step) -> bool:
    return isinstance(step, SilentStep) and step.test is None and step.store is None and step.nest is None


def _normalize(n: int, initial: int, final: int, steps: list) -> RegisterAutomaton:
    """Remove unguarded silent steps, then keep only useful states renumbered from 0."""
    pure: dict = {}
    rest: dict = {}
    for st in steps:
        (pure if _is_pure(st) else rest).setdefault(st.src, []).append(st)
    closure = {}
    for q in range(n):
        seen, todo = {q}, [q]
        while todo:
            x = todo.pop()
            for st in pure.get(x, ()):
                if st.dst not in seen:
                    seen.add(st.dst)
                    todo.append(st.dst)
        closure[q] = seen
    finals = {q for q in range(n) if final in closure[q]}
    new_steps = set()
    for q in range(n):
        for x in closure[q]:
            for st in rest.get(x, ()):
                if isinstance(st, EdgeStep):
                    new_steps.add(EdgeStep(q, st.symbol, st.dst))
                else:
                    new_steps.add(SilentStep(q, st.dst, st.test, st.store, st.nest))
    # keep states reachable from the initial state and able to reach a final state
    fwd = {initial}
    todo = [initial]
    out: dict = {}
    for st in new_steps:
        out.setdefault(st.src, []).append(st.dst)
    while todo:
        x = todo.pop()
        for y in out.get(x, ()):
            if y not in fwd:
                fwd.add(y)
                todo.append(y)
    back = set(finals)
    todo = list(finals)
    inc: dict = {}
    for st in new_steps:
        inc.setdefault(st.dst, []).append(st.src)
    while todo:
        x = todo.pop()
        for y in inc.get(x, ()):
            if y not in back:
                back.add(y)
                todo.append(y)
    useful = sorted((fwd & back) | {initial})
    ren = {q: i for i, q in enumerate(useful)}
    kept = []
    for st in sorted(new_steps, key=repr):
        if st.src in ren and st.dst in ren:
            if isinstance(st, EdgeStep):
                kept.append(EdgeStep(ren[st.src], st.symbol, ren[st.dst]))
            else:
                kept.append(SilentStep(ren[st.src], ren[st.dst], st.test, st.store, st.nest))
    return RegisterAutomaton(len(useful), 0, frozenset(ren[q] for q in finals if q in ren), tuple(kept))


# --------------------------------------------------------------------- runner

class RemRunner:
    """Evaluates one REM over one graph; memoizes closures and steps.

    A configuration set is a frozenset of (state, regs) pairs closed under silent
    steps at the current node.
    """

    def __init__(self, g: DataGraph, e, k: int, tables: dict | None = None):
        self.g, self.e, self.k = g, e, k
        self.aut = compile_rem(e)
        self.tables = tables if tables is not None else {}
        for sub in _nest_args(e):
            if sub not in self.tables:
                self.tables.update(nesting_sets(g, A.Nest(sub), k, self.tables))
        self._closure_memo: dict = {}
        self._step_memo: dict = {}
        self._universal: dict = {}

    # single-configuration moves
    def silent_moves(self, node: NodeId, q: int, regs: Regs):
        d = self.g.kappa[node]
        for s in self.aut.silent_steps(q):
            if s.test is not None and not eval_condition(s.test, d, regs):
                continue
            if s.nest is not None and (node, regs) not in self.tables[s.nest]:
                continue
            yield s.dst, (with_stores(regs, s.store, d) if s.store is not None else regs)

    def edge_moves(self, q: int, label: str):
        for s in self.aut.edge_steps(q):
            if s.symbol is None or s.symbol == label:
                yield s.dst

    def closure1(self, node: NodeId, q: int, regs: Regs) -> frozenset:
        """Silent-step closure of one configuration at node."""
        key = (node, q, regs)
        hit = self._closure_memo.get(key)
        if hit is not None:
            return hit
        seen = {(q, regs)}
        stack = [(q, regs)]
        while stack:
            x, r = stack.pop()
            for c in self.silent_moves(node, x, r):
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        out = frozenset(seen)
        self._closure_memo[key] = out
        return out

    def step1(self, q: int, regs: Regs, label: str, node: NodeId) -> frozenset:
        """Configurations after reading one edge into node, closed at node."""
        key = (q, regs, label, node)
        hit = self._step_memo.get(key)
        if hit is not None:
            return hit
        out: set = set()
        for q2 in self.edge_moves(q, label):
            out |= self.closure1(node, q2, regs)
        hit = self._step_memo[key] = frozenset(out)
        return hit

    def universal_states(self, regs: Regs) -> frozenset:
        """Final states q such that (q, regs) accepts with output regs after any
        further sequence of edges of the graph (greatest fixpoint, registers held)."""
        hit = self._universal.get(regs)
        if hit is not None:
            return hit
        moves = {(a, v) for (_, a, v) in self.g.edges}
        cand = set(self.aut.finals)
        changed = True
        while changed:
            changed = False
            for q in list(cand):
                for a, v in moves:
                    if not any(r == regs and q2 in cand for q2, r in self.step1(q, regs, a, v)):
                        cand.discard(q)
                        changed = True
                        break
        hit = self._universal[regs] = frozenset(cand)
        return hit

    def closure(self, node: NodeId, configs) -> frozenset:
        out: set = set()
        for q, regs in configs:
            out |= self.closure1(node, q, regs)
        return frozenset(out)

    def start(self, node: NodeId, lam: Regs) -> frozenset:
        return self.closure1(node, self.aut.initial, lam)

    def step(self, configs: frozenset, label: str, node: NodeId) -> frozenset:
        out: set = set()
        for q, regs in configs:
            out |= self.step1(q, regs, label, node)
        return frozenset(out)

    def finals(self, configs: frozenset) -> frozenset:
        f = self.aut.finals
        return frozenset(regs for (q, regs) in configs if q in f)

    def parse(self, path: Path, lam: Regs) -> frozenset:
        cur = self.start(path.nodes[0], lam)
        for a, v in zip(path.labels, path.nodes[1:]):
            if not cur:
                return frozenset()
            cur = self.step(cur, a, v)
        return self.finals(cur)

    # configuration-graph search
    def successors(self, node: NodeId, q: int, regs: Regs):
        """(node', state', regs', label or None) one move away."""
        for q2, r2 in self.silent_moves(node, q, regs):
            yield node, q2, r2, None
        for s in self.aut.edge_steps(q):
            for a, w in self.g.out(node):
                if s.symbol is None or s.symbol == a:
                    yield w, s.dst, regs, a

    def reach(self, u: NodeId, lam: Regs) -> frozenset:
        start = (u, self.aut.initial, lam)
        seen = {start}
        todo = deque([start])
        out = set()
        while todo:
            node, q, regs = todo.popleft()
            if q in self.aut.finals:
                out.add((node, regs))
            for w, q2, r2, _ in self.successors(node, q, regs):
                c = (w, q2, r2)
                if c not in seen:
                    seen.add(c)
                    todo.append(c)
        return frozenset(out)

    def witness(self, u: NodeId, v: NodeId, lam: Regs) -> Optional[Path]:
        """Shortest path ρ from u to v with some λ' such that (u, λ, ρ, v, λ') is parsed."""
        start = (u, self.aut.initial, lam)
        parent = {start: None}
        dist = {start: 0}
        todo = deque([(0, start)])
        # 0-1 BFS: silent moves cost nothing, so the returned path is shortest
        while todo:
            d, c = todo.popleft()
            if d > dist[c]:
                continue
            node, q, regs = c
            if q in self.aut.finals and node == v:
                return _unwind(parent, c)
            for w, q2, r2, a in self.successors(node, q, regs):
                c2 = (w, q2, r2)
                d2 = d + (a is not None)
                if d2 < dist.get(c2, d2 + 1):
                    dist[c2] = d2
                    parent[c2] = (c, a)
                    if a is None:
                        todo.appendleft((d2, c2))
                    else:
                        todo.append((d2, c2))
        return None

    def co_reachable(self) -> set:
        """All configurations from which a final configuration is reachable."""
        regs_space = register_space(self.g, self.k)
        rev: dict = {}
        finals = []
        for node in self.g.nodes:
            for q in range(self.aut.n_states):
                for regs in regs_space:
                    c = (node, q, regs)
                    if q in self.aut.finals:
                        finals.append(c)
                    for w, q2, r2, _ in self.successors(node, q, regs):
                        rev.setdefault((w, q2, r2), []).append(c)
        seen = set(finals)
        todo = list(finals)
        while todo:
            c = todo.pop()
            for p in rev.get(c, ()):
                if p not in seen:
                    seen.add(p)
                    todo.append(p)
        return seen


def _unwind(parent, c) -> Path:
    nodes, labels = [c[0]], []
    while parent[c] is not None:
        prev, a = parent[c]
        if a is not None:
            labels.append(a)
            nodes.append(prev[0])
        c = prev
    return Path(tuple(reversed(nodes)), tuple(reversed(labels)))


def _nest_args(e) -> list:
    """Arguments of Nest subexpressions, innermost first."""
    out: list = []

    def go(x):
        for c in A.rem_children(x):
            go(c)
        if isinstance(x, A.Nest) and x.arg not in out:
            out.append(x.arg)
    go(e)
    return out


# ------------------------------------------------------------- module API

def nesting_sets(g: DataGraph, e, k: int, tables: dict | None = None) -> dict:
    """Map each nested ⟨e'⟩ in e (keyed by e') to U(e') ⊆ nodes × (D⊥)^k.

    Tables are filled innermost first so inner tests are answered from finished tables.
    """
    tables = dict(tables or {})
    for sub in _nest_args(e):
        if sub in tables:
            continue
        runner = RemRunner(g, sub, k, tables)
        co = runner.co_reachable()
        init = runner.aut.initial
        tables[sub] = frozenset((node, regs) for (node, q, regs) in co if q == init)
    return tables


def path_parse(g: DataGraph, e, path: Path, lam: Regs, k: int | None = None) -> frozenset:
    k = len(lam) if k is None else k
    return RemRunner(g, e, k).parse(path, lam)


def reach(g: DataGraph, e, u: NodeId, lam: Regs) -> frozenset:
    return RemRunner(g, e, len(lam)).reach(u, lam)


def rem_pairs(g: DataGraph, e, k: int) -> frozenset:
    runner = RemRunner(g, e, k)
    lam = bottom(k)
    return frozenset((u, v) for u in g.nodes for (v, _) in runner.reach(u, lam))


def witness_path(g: DataGraph, e, u: NodeId, v: NodeId, k: int) -> Optional[Path]:
    return RemRunner(g, e, k).witness(u, v, bottom(k))


def input_free(e, k: int) -> bool:
    """True when every run stores each register before a test or nesting reads it and
    has stored all k registers on reaching a final state. Then the relation does not
    depend on λ_in: (ρ, λ, λ') holds iff (ρ, ⊥^k, λ') does."""
    aut = compile_rem(e)
    full = frozenset(range(1, k + 1))
    start = (aut.initial, frozenset())
    seen = {start}
    todo = [start]
    while todo:
        q, stored = todo.pop()
        if q in aut.finals and stored != full:
            return False
        nxt = [(s.dst, stored) for s in aut.edge_steps(q)]
        for s in aut.silent_steps(q):
            if s.test is not None and not A.cond_regs(s.test) <= stored:
                return False
            if s.nest is not None and stored != full:
                return False
            nxt.append((s.dst, stored | frozenset(s.store) if s.store else stored))
        for c in nxt:
            if c not in seen:
                seen.add(c)
                todo.append(c)
    return True


def config_bound(g: DataGraph, e, k: int) -> int:
    """|V| · |Q| · (|D| + 1)^k, the pumping bound on shortest witnesses."""
    return len(g.nodes) * compile_rem(e).n_states * (len(g.values()) + 1) ** k


# ------------------------------------------------------------ profile tracker

class ProfileTracker:
    """Incremental parse state of a path prefix for a list of REMs and every λ_in.

    Per REM the state is one set of (λ_in index, automaton state, registers).
    Two prefixes with the same signature (start node, current node, parse states)
    satisfy exactly the same REM atoms under every extension.
    """

    def __init__(self, g: DataGraph, rems, k: int, tables: dict | None = None,
                 inputs: list | None = None):
        """`inputs` optionally lists, per REM, the λ_in values worth tracking."""
        self.g, self.k = g, k
        self.tables = dict(tables or {})
        self.runners = [RemRunner(g, e, k, self.tables) for e in rems]
        self.lams = register_space(g, k)
        self.inputs = [tuple(inputs[i]) if inputs and inputs[i] is not None else self.lams
                       for i in range(len(self.runners))]
        self._profiles: dict = {}
        self._outputs: dict = {}
        self._steps: list = [{} for _ in self.runners]

    def start(self, node: NodeId):
        states = tuple(frozenset((li, q, regs) for li, lam in enumerate(lams)
                                 for (q, regs) in r.start(node, lam))
                       for r, lams in zip(self.runners, self.inputs))
        return (node, node, states)

    def step(self, sig, label: str, node: NodeId):
        u, _, states = sig
        new = []
        for r, memo, cs in zip(self.runners, self._steps, states):
            key = (cs, label, node)
            hit = memo.get(key)
            if hit is None:
                out: set = set()
                for li, q, regs in cs:
                    for c in r.step1(q, regs, label, node):
                        out.add((li,) + c)
                hit = memo[key] = frozenset(out)
            new.append(hit)
        return (u, node, tuple(new))

    def outputs(self, sig) -> dict:
        """(i, λ) -> set of λ' over the profile of sig."""
        hit = self._outputs.get(sig[2])
        if hit is None:
            acc: dict = {}
            for i, lam, lam2 in self.profile(sig):
                acc.setdefault((i, lam), set()).add(lam2)
            hit = self._outputs[sig[2]] = {key: frozenset(v) for key, v in acc.items()}
        return hit

    def profile(self, sig) -> frozenset:
        """{(i, λ, λ')} satisfied by any path with this signature."""
        hit = self._profiles.get(sig[2])
        if hit is None:
            out = []
            for i, (r, cs) in enumerate(zip(self.runners, sig[2])):
                fin, lams = r.aut.finals, self.inputs[i]
                for li, q, regs in cs:
                    if q in fin:
                        out.append((i, lams[li], regs))
            hit = self._profiles[sig[2]] = frozenset(out)
        return hit
