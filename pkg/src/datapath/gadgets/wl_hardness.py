"""Graph side of the k=1 walk-logic hardness reduction.

G_w is I_w followed by H. I_w chains K_0 .. K_{n-1} (one cell of the initial
configuration each, a 1-counter then the cell letter) and K (the blank cells,
a 2-counter over the single letter ($,B)). H is the 2-counter over all pair
letters with a back edge from its final node to its initial node.
"""

from __future__ import annotations

from .bundle import GadgetBundle
from .counter import counter_block
from .pspace import DOLLAR, pair
from .tm import BLANK, TuringMachine
from ..graph import DataGraph

IN, LINK, BACK = "in", "link", "back"


def _delta(m: TuringMachine) -> list[str]:
    return [pair(x, a) for x in (*m.states, DOLLAR) for a in m.alphabet]


def gen_wl_hardness_k1(m: TuringMachine, w, f0: int = 1) -> GadgetBundle:
    w = tuple(w)
    n = len(w)
    if n < 1:
        raise ValueError("the input word must be nonempty")
    for a in w:
        if a not in m.alphabet:
            raise ValueError(f"input symbol {a!r} not in the machine alphabet")
    nodes: list[str] = []
    edges: list[tuple[str, str, str]] = []
    ends = []          # (left-most, right-most) of each piece of I_w
    for i, a in enumerate(w):
        c = counter_block(1, n, f0, prefix=f"K{i}.")
        left, right = f"K{i}.in", f"K{i}.out"
        head = [left]
        if i == 0:
            head = [f"K0.E0", left]
            edges.append(("K0.E0", IN, left))
        nodes += [*head, *c.nodes, right]
        edges.append((left, f"#{i}", c.init))
        edges += c.edges
        edges.append((c.final, pair(m.initial if i == 0 else DOLLAR, a), right))
        ends.append((head[0], right))
    k = counter_block(2, n, f0, (pair(DOLLAR, BLANK),), prefix="K.")
    nodes += k.nodes
    edges += k.edges
    ends.append((k.init, k.final))
    h = counter_block(2, n, f0, _delta(m), prefix="H.")
    nodes += h.nodes
    edges += h.edges
    edges.append((h.final, BACK, h.init))
    for (_, right), (left, _) in zip(ends, ends[1:]):
        edges.append((right, LINK, left))
    edges.append((k.final, LINK, h.init))
    if len(set(nodes)) != len(nodes):
        raise AssertionError("node name clash in the hardness graph")
    g = DataGraph.build(nodes, edges, {v: i + 1 for i, v in enumerate(nodes)})
    meta = {"k": 1, "n": n, "f0": f0, "construction": "wl-hardness-k1",
            "start": "K0.E0", "h_init": h.init, "fan": len(_delta(m))}
    return GadgetBundle(g, None, meta)
