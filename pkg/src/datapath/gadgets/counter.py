"""k-counter graphs and the k=1 counter formulas in walk logic.

A 1-counter of length f0*n is a walk through a chain of f0*n bit stages, each
offering an a1 (bit 0) or b1 (bit 1) edge. Stage j carries weight 2**j, so the
first stage on the walk is the least significant bit.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..graph import DataGraph, Path
from ..lang.parser import parse_formula

MERGE = "N"


def sigma(k: int) -> tuple[str, str]:
    """Bit letters of level k: (zero, one)."""
    return (f"a{k}", f"b{k}")


def init_label(k: int) -> str:
    return f"i{k}"


def final_label(k: int) -> str:
    return f"f{k}"


@dataclass(frozen=True)
class Block:
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str, str], ...]
    init: str     # only node with an outgoing init edge, no incoming edges
    final: str    # only node with an incoming final edge, no outgoing edges


def counter_block(k: int, n: int, f0: int, delta=None, prefix: str = "") -> Block:
    """Node and edge lists of G^delta_{k,n}; node ids carry `prefix`."""
    if k < 1 or n < 1 or f0 < 1:
        raise ValueError("k, n and f0 must be positive")
    delta = tuple(delta) if delta is not None else sigma(k)
    if not delta:
        raise ValueError("delta must be nonempty")
    p = prefix
    if k == 1:
        m = f0 * n
        nodes = [f"{p}ss", f"{p}S"]
        edges = [(f"{p}ss", init_label(1), f"{p}S")]
        prev = [f"{p}S"]
        for j in range(m):
            c = f"{p}c{j}"
            nodes.append(c)
            edges += [(u, MERGE, c) for u in prev]
            prev = []
            for x, d in enumerate(delta):
                v = f"{p}c{j}.{x}"
                nodes.append(v)
                edges.append((c, d, v))
                prev.append(v)
        nodes += [f"{p}f", f"{p}ff"]
        edges += [(u, MERGE, f"{p}f") for u in prev]
        edges.append((f"{p}f", final_label(1), f"{p}ff"))
        return Block(tuple(nodes), tuple(edges), f"{p}ss", f"{p}ff")
    inner = counter_block(k - 1, n, f0, sigma(k - 1), f"{p}g{k - 1}.")
    S, Si, b, F = f"{p}S{k}", f"{p}Si{k}", f"{p}b{k}", f"{p}F{k}"
    nodes = [S, *inner.nodes, Si, b, F]
    edges = [(S, init_label(k), inner.init), *inner.edges, (inner.final, f"D{k}", Si)]
    edges += [(Si, d, b) for d in delta]
    edges += [(b, final_label(k), F), (b, f"Df{k}", inner.init)]
    return Block(tuple(nodes), tuple(edges), S, F)


def gen_counter_graph(k: int, n: int, f0: int, delta=None) -> DataGraph:
    """G^delta_{k,n}; every node gets its own data value."""
    b = counter_block(k, n, f0, delta)
    return DataGraph.build(b.nodes, b.edges, {v: i + 1 for i, v in enumerate(b.nodes)})


def counter_path(n: int, f0: int, value: int) -> Path:
    """The full walk of G_{1,n} encoding `value` (bit j taken at stage j)."""
    m = f0 * n
    if not 0 <= value < 2 ** m:
        raise ValueError(f"value {value} does not fit in {m} bits")
    nodes = ["ss", "S"]
    labels = [init_label(1)]
    for j in range(m):
        bit = (value >> j) & 1
        nodes += [f"c{j}", f"c{j}.{bit}"]
        labels += [MERGE, sigma(1)[bit]]
    nodes += ["f", "ff"]
    labels += [MERGE, final_label(1)]
    return Path(tuple(nodes), tuple(labels))


def counter_value(path: Path) -> int:
    """Number encoded by the a1/b1 letters of a walk, least significant first."""
    bits = [lab for lab in path.labels if lab in sigma(1)]
    return sum(1 << j for j, lab in enumerate(bits) if lab == sigma(1)[1])


# k = 1 formulas. Positions are compared across walks with ~, which identifies
# nodes because every node of the counter graph has its own data value.

_LABELS_1 = (init_label(1), MERGE, *sigma(1), final_label(1))


def _next(t: str, u: str) -> str:
    return "(" + " or ".join(f"edge({a}, {t}, {u})" for a in _LABELS_1) + ")"


def phi_text(p: str) -> str:
    """Walk starts with the init edge and ends with the final edge."""
    return (f"(exists s@{p} . (not exists t@{p} . t < s) and (exists u@{p} . edge(i1, s, u)))"
            f" and (exists s@{p} . (not exists t@{p} . s < t) and (exists u@{p} . edge(f1, u, s)))")


def last_text(p: str) -> str:
    return f"not exists s@{p}, t@{p} . edge(a1, s, t)"


def zero_text(p: str) -> str:
    return f"not exists s@{p}, t@{p} . edge(b1, s, t)"


def eq_text(p: str, q: str) -> str:
    return (f"forall t@{p} . forall t2@{q} . t ~ t2 -> "
            f"(forall u@{p} . {_next('t', 'u')} -> "
            f"(forall u2@{q} . {_next('t2', 'u2')} -> u ~ u2))")


def _carry(s: str, p: str) -> str:
    # every stage before s took the one-bit
    return f"(not exists w@{p}, w2@{p} . w < {s} and edge(a1, w, w2))"


def succ_text(p: str, q: str) -> str:
    """q encodes the value of p plus one (p not all ones)."""
    rules = []
    for bit_in, carry, bit_out in (("a1", True, "b1"), ("b1", True, "a1"),
                                   ("a1", False, "a1"), ("b1", False, "b1")):
        c = _carry("s", p) if carry else f"(not {_carry('s', p)})"
        rules.append(
            f"(forall s@{p} . ((exists u@{p} . edge({bit_in}, s, u)) and {c}) -> "
            f"(forall s2@{q} . s ~ s2 -> "
            f"(forall u2@{q} . {_next('s2', 'u2')} -> edge({bit_out}, s2, u2))))")
    return f"(not ({last_text(p)})) and " + " and ".join(rules)


def num_text(i: int, p: str) -> str:
    if i < 0:
        raise ValueError("num needs i >= 0")
    if i == 0:
        return zero_text(p)
    prev = f"{p}_{i - 1}"
    return (f"exists path {prev} . ({phi_text(prev)}) and ({num_text(i - 1, prev)})"
            f" and ({succ_text(prev, p)})")


def gen_counter_formulas_k1(n: int, f0: int, p: str = "p", q: str = "q") -> dict:
    """Parsed WL formulas over free walks p (and q): phi, num0, last, eq, succ.

    The `num` entry is a builder: num(i) returns the formula for value i over p.
    """
    def wl(text):
        return parse_formula(text, "WL")
    return {
        "phi": wl(phi_text(p)),
        "num0": wl(zero_text(p)),
        "last": wl(last_text(p)),
        "eq": wl(eq_text(p, q)),
        "succ": wl(succ_text(p, q)),
        "num": lambda i: wl(num_text(i, p)),
        "bound": 2 * f0 * n + 3,
    }
