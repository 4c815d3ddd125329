"""Shared test fixtures: small graph builders, a direct denotational REM
evaluator and hypothesis strategies for graphs and syntax trees."""

from __future__ import annotations

from itertools import combinations

from hypothesis import strategies as st

from datapath.graph import DataGraph, Path, encode_undirected
from datapath.lang import ast as A
from datapath.oracles import enum_paths

BOT = None

# acceptance criterion number -> PASS/FAIL line, printed by conftest at the end
RESULTS: dict = {}


# ----------------------------------------------------------------- graphs

def undirected(n, pairs):
    ids = [str(i) for i in range(1, n + 1)]
    return encode_undirected([(str(u), str(v)) for u, v in pairs], ids)


def cycle(n):
    return undirected(n, [(i, i % n + 1) for i in range(1, n + 1)])


def complete(n):
    return undirected(n, list(combinations(range(1, n + 1), 2)))


def directed(edges, kappa=None, nodes=None):
    ns = set(nodes or [])
    for u, _, v in edges:
        ns |= {u, v}
    return DataGraph.build(ns, edges, kappa)


def connected_graphs(max_n):
    """All connected simple graphs on 1..max_n nodes, one per isomorphism class."""
    import networkx as nx
    from networkx.generators.atlas import graph_atlas_g
    out = []
    for h in graph_atlas_g():
        if 1 <= h.number_of_nodes() <= max_n and nx.is_connected(h):
            out.append(undirected(h.number_of_nodes(), [(u + 1, v + 1) for u, v in h.edges()]))
    return out


@st.composite
def data_graphs(draw, max_nodes=4, labels=("a", "b"), max_values=3):
    n = draw(st.integers(1, max_nodes))
    ids = [str(i) for i in range(1, n + 1)]
    triples = [(u, a, v) for u in ids for a in labels for v in ids]
    edges = draw(st.lists(st.sampled_from(triples), unique=True, max_size=min(len(triples), 8)))
    kappa = {v: draw(st.integers(1, max_values)) for v in ids}
    return DataGraph.build(ids, edges, kappa, alphabet=labels)


# --------------------------------------------------------- REM denotation

def cond_holds(c, d, tau) -> bool:
    if isinstance(c, A.CEq):
        return tau[c.reg - 1] is not BOT and tau[c.reg - 1] == d
    if isinstance(c, A.CAnd):
        return cond_holds(c.left, d, tau) and cond_holds(c.right, d, tau)
    return not cond_holds(c.arg, d, tau)


class Denotation:
    """The relation of an REM on one path, clause by clause: den(e, i, j, λ) is
    the set of λ' with (v_i, λ, v_i..v_j, v_j, λ') in the relation. Nesting tests
    search all paths up to `nest_bound` edges."""

    def __init__(self, g: DataGraph, path: Path, nest_bound: int = 6):
        self.g, self.p, self.nest_bound = g, path, nest_bound
        self.memo = {}

    def den(self, e, i, j, lam) -> frozenset:
        key = (e, i, j, lam)
        if key not in self.memo:
            self.memo[key] = frozenset(self._den(e, i, j, lam))
        return self.memo[key]

    def _den(self, e, i, j, lam):
        p, g = self.p, self.g
        if isinstance(e, A.Epsilon):
            return {lam} if i == j else set()
        if isinstance(e, A.Letter):
            return {lam} if j == i + 1 and p.labels[i] == e.symbol else set()
        if isinstance(e, A.AnyLetter):
            return {lam} if j == i + 1 else set()
        if isinstance(e, A.Union_):
            return self.den(e.left, i, j, lam) | self.den(e.right, i, j, lam)
        if isinstance(e, A.Concat):
            out = set()
            for m in range(i, j + 1):
                for mid in self.den(e.left, i, m, lam):
                    out |= self.den(e.right, m, j, mid)
            return out
        if isinstance(e, A.Plus):
            # least fixpoint of X = e | e.X, as reachability over (position, registers)
            seen, todo, out = set(), [(i, lam)], set()
            while todo:
                a, r = todo.pop()
                for b in range(a, j + 1):
                    for r2 in self.den(e.arg, a, b, r):
                        if b == j:
                            out.add(r2)
                        if (b, r2) not in seen:
                            seen.add((b, r2))
                            todo.append((b, r2))
            return out
        if isinstance(e, A.Star):
            return ({lam} if i == j else set()) | self.den(A.Plus(e.arg), i, j, lam)
        if isinstance(e, A.Test):
            d = g.kappa[p.nodes[j]]
            return {r for r in self.den(e.arg, i, j, lam) if cond_holds(e.cond, d, r)}
        if isinstance(e, A.Store):
            d = g.kappa[p.nodes[i]]
            lam2 = tuple(d if k + 1 in e.regs else x for k, x in enumerate(lam))
            return self.den(e.arg, i, j, lam2)
        if isinstance(e, A.Nest):
            if i != j:
                return set()
            u = p.nodes[i]
            for q in enum_paths(g, self.nest_bound, start=u):
                if Denotation(g, q, self.nest_bound).den(e.arg, 0, len(q), lam):
                    return {lam}
            return set()
        raise TypeError(e)


def denote(g, e, path, lam, nest_bound=6) -> frozenset:
    return Denotation(g, path, nest_bound).den(e, 0, len(path), lam)


# ----------------------------------------------------------- syntax trees

def conditions(k):
    leaf = st.builds(A.CEq, st.integers(1, k))
    return st.recursive(leaf, lambda c: st.one_of(st.builds(A.CAnd, c, c), st.builds(A.CNot, c)),
                        max_leaves=3)


def rems(k=1, letters=("a", "b"), nest=False, max_leaves=6):
    leaf = st.one_of(st.just(A.Epsilon()), st.builds(A.Letter, st.sampled_from(letters)),
                     st.just(A.AnyLetter()))
    regsets = st.sets(st.integers(1, k), min_size=1).map(lambda s: tuple(sorted(s)))

    def grow(e):
        opts = [st.builds(A.Union_, e, e), st.builds(A.Concat, e, e), st.builds(A.Plus, e),
                st.builds(A.Star, e), st.builds(A.Test, e, conditions(k)),
                st.builds(A.Store, regsets, e)]
        if nest:
            opts.append(st.builds(A.Nest, e))
        return st.one_of(*opts)
    return st.recursive(leaf, grow, max_leaves=max_leaves)


def rl_formulas(k=1, positive=False):
    """Well-sorted RL formulas over a fixed pool of variable names."""
    nodes, paths, regs = ["x", "y"], ["p", "q"], ["u", "v"]
    atom = st.one_of(
        st.builds(A.NodeEq, st.sampled_from(nodes), st.sampled_from(nodes)),
        st.builds(A.PathEq, st.sampled_from(paths), st.sampled_from(paths)),
        st.builds(A.RegEq, st.sampled_from(regs), st.sampled_from(regs)),
        st.builds(A.RegBot, st.sampled_from(regs)),
        st.builds(A.Endpoints, st.sampled_from(nodes), st.sampled_from(paths), st.sampled_from(nodes)),
        st.builds(A.RemAtom, rems(k, max_leaves=3), st.sampled_from(paths), st.sampled_from(regs),
                  st.sampled_from(regs)),
    )

    def quant(f):
        return st.one_of(
            st.builds(lambda v, b: A.Exists("node", v, b), st.sampled_from(nodes), f),
            st.builds(lambda v, b: A.Exists("path", v, b), st.sampled_from(paths), f),
            st.builds(lambda v, b: A.Exists("reg", v, b), st.sampled_from(regs), f))

    def grow(f):
        opts = [st.builds(A.Or, f, f), st.builds(A.And, f, f), quant(f)]
        if not positive:
            opts.append(st.builds(A.Not, f))
        return st.one_of(*opts)
    return st.recursive(atom, grow, max_leaves=5)
