"""Linear-space Turing machine runs as paths: the one-register RL gadget.

A configuration over f0*n cells is written N d1 N d2 ... N dm, each d a pair
(state or '$', content). The run is s C0 # C1 # ... and the formula says some
path is not rejected by chi, a disjunction of REM atoms that each spot one way
the label can fail to encode an accepting run.

Cell j is the node with data value j. The initial configuration and the run
graph share these nodes so that every data value occurs once. The initial
configuration's edges carry marked copies of the pair letters (suffix ^0), which
lets the fixed formula force the first configuration to follow them.
"""

from __future__ import annotations

from ..graph import DataGraph
from ..lang.parser import parse_query
from ..lang.printer import print_symbol
from .bundle import GadgetBundle
from .tm import BLANK, TuringMachine

N, HASH, START = "N", "#", "s"
DOLLAR = "$"
MARK = "^0"


def pair(x: str, a: str) -> str:
    return f"{x}/{a}"


def marked(label: str) -> str:
    return label + MARK


def _check(m: TuringMachine, w, f0: int):
    if len(w) < 1:
        raise ValueError("the input word must be nonempty")
    if f0 < 1:
        raise ValueError("f0 must be positive")
    for a in w:
        if a not in m.alphabet:
            raise ValueError(f"input symbol {a!r} not in the machine alphabet")


def pspace_graph(m: TuringMachine, w, f0: int) -> DataGraph:
    _check(m, w, f0)
    cells = f0 * len(w)
    init = [pair(m.initial, w[0])] + [pair(DOLLAR, a) for a in w[1:]]
    init += [pair(DOLLAR, BLANK)] * (cells - len(w))
    fan = [pair(x, a) for x in (*m.states, DOLLAR) for a in m.alphabet]
    kappa: dict = {}
    edges = []
    pos = [f"P{j}" for j in range(1, cells + 1)]
    for j, v in enumerate(pos, 1):
        kappa[v] = j
    fresh = iter(range(cells + 1, 10 ** 9))

    def node(name):
        kappa[name] = next(fresh)
        return name

    # initial configuration: i -s-> S -N-> P1 -d1^0-> V1 -N-> P2 ... -dm^0-> Vm -#-> h
    node("i"), node("S")
    edges += [("i", START, "S"), ("S", N, pos[0])]
    for j, d in enumerate(init):
        v = node(f"V{j + 1}")
        edges.append((pos[j], marked(d), v))
        edges.append((v, N, pos[j + 1]) if j + 1 < cells else (v, HASH, "h"))
    # later configurations: h -N-> P1 -d-> X -N-> P2 ... -d-> X -N-> F -#-> h
    node("h")
    edges.append(("h", N, pos[0]))
    node("F")
    for j in range(cells):
        nxt = pos[j + 1] if j + 1 < cells else "F"
        for x, d in enumerate(fan):
            v = node(f"X{j + 1}.{x}")
            edges += [(pos[j], d, v), (v, N, nxt)]
    edges.append(("F", HASH, "h"))
    return DataGraph.build(list(kappa), edges, kappa)


def _alt(labels) -> str:
    labels = sorted(set(labels))
    if not labels:
        raise ValueError("empty letter class")
    return "(" + " | ".join(print_symbol(a) for a in labels) + ")"


def at_most_one(letter: str, lam) -> str:
    """REM text for words over lam with at most one occurrence of letter."""
    rest = _alt(set(lam) - {letter}) + "*"
    return f"({rest} . (eps | {print_symbol(letter)} . {rest}))"


def chi_rems(m: TuringMachine) -> dict:
    """Named REM texts whose atoms make up chi."""
    sig = m.alphabet
    delta = [pair(x, a) for x in (*m.states, DOLLAR) for a in sig]

    def both(ls):
        return set(ls) | {marked(x) for x in ls}

    D = both(delta)                      # every pair letter
    Dmark = {marked(x) for x in delta}
    Df = both(pair(m.final, a) for a in sig)
    lam = D | {N, HASH, START}
    any_ = _alt(lam)
    no_final = _alt(lam - Df) + "*"
    no_hash = _alt(lam - {HASH}) + "*"
    one_hash = at_most_one(HASH, lam)
    sym = print_symbol
    right_moves = {pair(q, a) for (q, a) in m.moves("R")}
    left_moves = {pair(q, a) for (q, a) in m.moves("L")}

    rems = {
        # the path does not start with s
        "nostart": f"{_alt(lam - {START})} . {any_}*",
        # no final pair anywhere
        "nofinal": no_final,
        # an unmarked letter inside the initial configuration
        "unmarked0": f"{sym(START)} . {_alt(lam - {HASH} - set(delta))}* . {_alt(delta)} . {any_}*",
        # a marked letter after the initial configuration
        "marked1": f"{any_}* . {sym(HASH)} . {any_}* . {_alt(Dmark)} . {any_}*",
    }
    # the scanned cell keeps its content and loses the head
    for q in m.working_states:
        for a in sig:
            keep = both([pair(DOLLAR, a)])
            rems[f"scan_{len(rems)}"] = (
                f"{no_final} . !{{r1}}. {_alt(both([pair(q, a)]))} . {one_hash} [=r1]"
                f" . {_alt(D - keep)} . {any_}*")
    # an unscanned cell that no head enters keeps its content
    left_ok = _alt((D - both(right_moves)) | {START, HASH})
    for a in sig:
        keep = both([pair(DOLLAR, a)])
        right = (f"({sym(N)} . {_alt(D - both(left_moves))} . {one_hash}"
                 f" | {sym(N)} . {sym(HASH)} . {no_hash} | {sym(HASH)} . {no_hash})")
        rems[f"idle_{len(rems)}"] = (
            f"{no_final} . {left_ok} . {sym(N)} . !{{r1}}. {_alt(keep)} . {right} [=r1]"
            f" . {_alt(D - keep)} . {any_}*")
    # the head enters the neighbour cell in the new state with the written symbol
    for (q, a), (q2, b, d) in sorted(m.delta.items()):
        want = both([pair(q2, b)])
        src = _alt(both([pair(q, a)]))
        if d == "R":
            body = f"{src} . {sym(N)} . !{{r1}}. {_alt(D)} . {one_hash} [=r1]"
        else:
            body = f"!{{r1}}. {_alt(D)} . {sym(N)} . {src} . {one_hash} [=r1]"
        rems[f"move_{len(rems)}"] = f"{no_final} . {body} . {_alt(D - want)} . {any_}*"
    return rems


STORELESS = ("nostart", "nofinal", "unmarked0", "marked1")


def pspace_query_text(m: TuringMachine) -> str:
    rems = chi_rems(m)
    lines = ["dialect RL", "registers 1"]
    lines += [f"rem {name} = {text}" for name, text in rems.items()]
    atoms = []
    for name in rems:
        if name in STORELESS:
            atoms.append(f"{name}(p, z, z)")
        else:
            atoms.append(f"(exists reg v . {name}(p, z, v))")
    lines.append("exists path p . exists reg z . z = bot and not (")
    lines.append("    " + "\n    or ".join(atoms) + ")")
    return "\n".join(lines) + "\n"


def run_length_bound(cells: int, configs: int) -> int:
    """Edges of s C0 # C1 # ... covering `configs` configurations after C0."""
    return 1 + 2 * cells + configs * (2 * cells + 2)


def gen_rl_pspace(m: TuringMachine, w, f0: int = 1) -> GadgetBundle:
    w = tuple(w)
    g = pspace_graph(m, w, f0)
    text = pspace_query_text(m)
    q = parse_query(text)
    return GadgetBundle(g, q.formula, {"k": 1, "n": len(w), "f0": f0,
                                       "construction": "rl-pspace", "registers": q.k},
                        query_text=text)
