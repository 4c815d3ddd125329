"""Independent ground truth: path enumeration and classical graph predicates.

Nothing here touches the automata or the logic evaluators.
"""

from __future__ import annotations

from collections import deque
from itertools import permutations
from typing import Iterator, Optional

from .graph import DataGraph, NodeId, Path, node_key


class NotSymmetric(ValueError):
    pass


def enum_paths(g: DataGraph, L: int, start: Optional[NodeId] = None,
               end: Optional[NodeId] = None) -> Iterator[Path]:
    """All paths of edge-length <= L, shortest first, then by node ids and labels."""
    layer = [Path((v,)) for v in g.nodes if start is None or v == start]
    for length in range(L + 1):
        for p in layer:
            if end is None or p.last == end:
                yield p
        if length == L:
            break
        nxt = []
        for p in layer:
            for a, w in g.out(p.last):
                nxt.append(p.extend(a, w))
        nxt.sort(key=Path.sort_key)
        layer = nxt


def walk_count(g: DataGraph, L: int) -> int:
    """Number of paths of length <= L by dynamic programming over edge counts."""
    ways = {v: 1 for v in g.nodes}
    total = len(g.nodes)
    for _ in range(L):
        nxt = {v: 0 for v in g.nodes}
        for (u, _, v) in g.edges:
            nxt[v] += ways[u]
        ways = nxt
        total += sum(ways.values())
    return total


def _succ(g: DataGraph) -> dict:
    out: dict = {v: set() for v in g.nodes}
    for (u, _, v) in g.edges:
        out[u].add(v)
    return out


def hamiltonian_path_exists(g: DataGraph) -> bool:
    """Permutation check, fine up to 8 nodes."""
    succ = _succ(g)
    if not g.nodes:
        return False
    for perm in permutations(g.nodes):
        if all(perm[i + 1] in succ[perm[i]] for i in range(len(perm) - 1)):
            return True
    return False


def hamiltonian_path_dp(g: DataGraph) -> bool:
    """Bitmask dynamic program (independent second implementation)."""
    nodes = list(g.nodes)
    n = len(nodes)
    if n == 0:
        return False
    idx = {v: i for i, v in enumerate(nodes)}
    succ = [set() for _ in range(n)]
    for (u, _, v) in g.edges:
        succ[idx[u]].add(idx[v])
    full = (1 << n) - 1
    ok = [[False] * n for _ in range(1 << n)]
    for i in range(n):
        ok[1 << i][i] = True
    for mask in range(1, 1 << n):
        for i in range(n):
            if not ok[mask][i]:
                continue
            for j in succ[i]:
                if not mask >> j & 1:
                    ok[mask | 1 << j][j] = True
    return any(ok[full])


def _undirected(g: DataGraph) -> dict:
    adj: dict = {v: set() for v in g.nodes}
    for (u, _, v) in g.edges:
        adj[u].add(v)
        adj[v].add(u)
    return adj


def _check_symmetric(g: DataGraph):
    pairs = {(u, v) for (u, _, v) in g.edges}
    if any((v, u) not in pairs for (u, v) in pairs):
        raise NotSymmetric("graph is not an undirected encoding")


def _components(adj: dict) -> list[set]:
    seen, comps = set(), []
    for v in sorted(adj, key=node_key):
        if v in seen:
            continue
        comp, todo = {v}, [v]
        while todo:
            x = todo.pop()
            for y in adj[x]:
                if y not in comp:
                    comp.add(y)
                    todo.append(y)
        seen |= comp
        comps.append(comp)
    return comps


def eulerian_trail_exists(g: DataGraph) -> bool:
    """Undirected criterion: edges in one component and 0 or 2 odd-degree nodes.

    Self-loops count twice towards the degree.
    """
    _check_symmetric(g)
    edges = {frozenset((u, v)) for (u, _, v) in g.edges}
    deg = {v: 0 for v in g.nodes}
    for e in edges:
        ends = tuple(e)
        if len(ends) == 1:
            deg[ends[0]] += 2
        else:
            deg[ends[0]] += 1
            deg[ends[1]] += 1
    touched = [v for v in g.nodes if deg[v] > 0]
    if touched:
        comp = next(c for c in _components(_undirected(g)) if touched[0] in c)
        if any(v not in comp for v in touched):
            return False
    return sum(d % 2 for d in deg.values()) in (0, 2)


def is_bipartite(g: DataGraph) -> bool:
    adj = _undirected(g)
    colour: dict = {}
    for v in sorted(adj, key=node_key):
        if v in colour:
            continue
        colour[v] = 0
        todo = deque([v])
        while todo:
            x = todo.popleft()
            for y in adj[x]:
                if y not in colour:
                    colour[y] = 1 - colour[x]
                    todo.append(y)
                elif colour[y] == colour[x]:
                    return False
    return True


def connected_parity(g: DataGraph) -> tuple[bool, str]:
    comps = _components(_undirected(g))
    return len(comps) <= 1, ("even" if len(g.nodes) % 2 == 0 else "odd")


def _reaches(succ: dict, z: NodeId) -> set:
    """Nodes with a path to z (z included)."""
    pred: dict = {v: set() for v in succ}
    for u, vs in succ.items():
        for v in vs:
            pred[v].add(u)
    out, todo = {z}, [z]
    while todo:
        x = todo.pop()
        for y in pred[x]:
            if y not in out:
                out.add(y)
                todo.append(y)
    return out


def query_q_oracle(g: DataGraph) -> set[tuple[NodeId, NodeId]]:
    """Pairs (x, y) with a node z and an x-to-y path whose nodes all reach z.

    A minimal witness path can be shortcut to a simple one whose node set only
    shrinks, so a search inside the nodes that reach z is complete.
    """
    succ = _succ(g)
    out = set()
    for z in g.nodes:
        inside = _reaches(succ, z)
        for x in inside:
            seen, todo = {x}, [x]
            while todo:
                u = todo.pop()
                for w in succ[u]:
                    if w in inside and w not in seen:
                        seen.add(w)
                        todo.append(w)
            out |= {(x, y) for y in seen}
    return out
