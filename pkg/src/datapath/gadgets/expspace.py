"""Graph and printed REM pieces of the RL EXPSPACE reduction.

Cells are addressed by f0*n bits, most significant first. The bit chain has
one node per bit position, carrying that position as its data value, so a
register stored at a chain node remembers a bit position. Cell encodings are
separated by & inside a configuration and by # between configurations.
"""

from __future__ import annotations

from ..graph import DataGraph
from ..lang.printer import print_symbol
from .bundle import GadgetBundle
from .pspace import DOLLAR, pair
from .tm import BLANK, TuringMachine

START, AMP, HASH = "s", "&", "#"
BITS = ("0", "1")


def _bits(i: int, width: int) -> str:
    if not 0 <= i < 2 ** width:
        raise ValueError(f"cell number {i} does not fit in {width} bits")
    return format(i, f"0{width}b")


class _Builder:
    def __init__(self):
        self.kappa: dict = {}
        self.edges: list = []
        self.fresh = None

    def node(self, name, value=None):
        self.kappa[name] = next(self.fresh) if value is None else value
        return name


def expspace_graph(m: TuringMachine, w, f0: int) -> DataGraph:
    n = len(w)
    width = f0 * n
    b = _Builder()
    b.fresh = iter(range(width + 1, 10 ** 9))
    delta = [pair(x, a) for x in (*m.states, DOLLAR) for a in m.alphabet]

    def chooser(tag):
        """Positions 1..width with 0/1 double edges, ending in a fresh node."""
        pos = [b.node(f"{tag}.{j}", j) for j in range(1, width + 1)]
        end = b.node(f"{tag}.f")
        for j, u in enumerate(pos):
            nxt = pos[j + 1] if j + 1 < width else end
            b.edges += [(u, x, nxt) for x in BITS]
        return pos[0], end

    # K_i: the bits of i, then the cell letter
    b.node("s0")
    prev, link = "s0", START
    for i, a in enumerate(w, 1):
        bits = _bits(i, width)
        pos = [b.node(f"K{i}.{j}", j) for j in range(1, width + 1)]
        tail, end = b.node(f"K{i}.y"), b.node(f"K{i}.f")
        b.edges.append((prev, link, pos[0]))
        chain = pos + [tail]
        b.edges += [(chain[j], bits[j], chain[j + 1]) for j in range(width)]
        b.edges.append((tail, pair(m.initial if i == 1 else DOLLAR, a), end))
        prev, link = end, AMP
    # K: every other cell blank and unscanned
    first, f = chooser("K")
    d = b.node("K.d")
    b.edges += [(prev, AMP, first), (f, pair(DOLLAR, BLANK), d), (d, AMP, first)]
    # H: the run after the initial configuration
    h1, hf = chooser("H")
    f2 = b.node("H.f2")
    b.edges += [(hf, x, f2) for x in delta]
    b.edges += [(f2, AMP, h1), (f2, HASH, h1), (d, HASH, h1)]
    return DataGraph.build(list(b.kappa), b.edges, b.kappa)


def _alt(labels) -> str:
    return "(" + " | ".join(print_symbol(a) for a in sorted(set(labels))) + ")"


def _alphabet(m: TuringMachine):
    delta = {pair(x, a) for x in (*m.states, DOLLAR) for a in m.alphabet}
    lam = delta | set(BITS) | {START, AMP, HASH}
    final = {pair(m.final, a) for a in m.alphabet}
    return delta, lam, final


def succ_violation_rems(m: TuringMachine) -> dict:
    """The four ways c(j) can fail to be c(i)+1 after c(i) d &.

    Case a is the printed REM. Cases b to d follow it by analogy: the bits
    after the stored position are 1..1 (a), 0 1..1 (b) or contain a 0 (c, d)."""
    delta, lam, final = _alphabet(m)
    pre = f"{_alt(lam - final)}*"
    rest = f"{_alt(lam)}*"
    sep = f"{_alt(delta)} . '&' . ('0' | '1')*"
    ones = "'1'*"
    has0 = "('0' | '1')* . '0' . ('0' | '1')*"
    forms = {
        "succ_a": ("eps", ones, "1"),        # bits from k are 1..1, b'_k must be 0
        "succ_b": ("'0'", ones, "0"),        # 0 1..1, b'_k must be 1
        "succ_c": ("'1'", has0, "0"),        # 1 then a 0 later, b'_k stays 1
        "succ_d": ("'0'", has0, "1"),        # 0 then a 0 later, b'_k stays 0
    }
    out = {}
    for name, (bit, tail, bad) in forms.items():
        body = ones if bit == "eps" else f"{bit} . {tail}"
        out[name] = f"{pre} . !{{r1}}. {body} . {sep} [=r1] . '{bad}' . {rest}"
    return out


def move_right_rems(m: TuringMachine, width: int) -> dict:
    """The printed e^R_(q,a) family, one REM per right-moving transition."""
    delta, lam, _ = _alphabet(m)
    anyb = "('0' | '1')"
    no_hash = f"{_alt(lam - {HASH})}*"
    one_hash = f"({no_hash} . (eps | '#' . {no_hash}))"
    out = {}
    for (q, a), (q2, b2, d) in sorted(m.delta.items()):
        if d != "R":
            continue
        stores = " . ".join(f"!{{r{j}}}. {anyb}" for j in range(1, width + 1))
        tests = " . ".join(f"{anyb} [=r{j}]" for j in range(1, width + 1))
        out[f"moveR_{q}_{a}"] = (
            f"{_alt(lam)}* . {stores} . {print_symbol(pair(q, a))} . {one_hash} . {tests}"
            f" . {_alt(delta)} . '&' . {anyb}* . {_alt(delta - {pair(q2, b2)})} . {_alt(lam)}*")
    return out


def gen_rl_expspace(m: TuringMachine, w, f0: int = 1) -> GadgetBundle:
    w = tuple(w)
    if len(w) < 1:
        raise ValueError("the input word must be nonempty")
    for a in w:
        if a not in m.alphabet:
            raise ValueError(f"input symbol {a!r} not in the machine alphabet")
    g = expspace_graph(m, w, f0)
    width = f0 * len(w)
    rems = {**succ_violation_rems(m), **move_right_rems(m, width)}
    meta = {"k": width, "n": len(w), "f0": f0, "construction": "rl-expspace",
            "rems": rems, "derived_by_analogy": ["succ_b", "succ_c", "succ_d"],
            "graph_database": False}
    return GadgetBundle(g, None, meta)
