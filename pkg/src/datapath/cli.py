"""datapath command line: eval, gen, oracle, bench.

Exit codes: 0 for true or success, 1 for false, 2 for any error.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
import time
from pathlib import Path as FsPath

from . import oracles as O
from .graph import DataGraph, Path, encode_undirected, load_graph, save_graph
from .lang.analysis import classify, free_vars
from .lang.parser import QuerySyntaxError, parse_query
from .logic.errors import ResourceLimit
from .logic.exact import DEFAULT_BUDGET, rl_eval_exact
from .logic.nrl import nrlplus_answers, nrlplus_eval
from .logic.rl import rl_eval_brute
from .logic.wl import wl_eval_bounded


class CliError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return FsPath(path).read_text(encoding="utf-8")
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror}") from None


def _budget() -> int:
    raw = os.environ.get("DATAPATH_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        return int(raw)
    except ValueError:
        raise CliError(f"DATAPATH_BUDGET must be an integer, got {raw!r}") from None


# ------------------------------------------------------------------ output

class Report:
    """Ordered key/value lines, printed plain or tab-separated."""

    def __init__(self, fmt: str):
        self.fmt, self.rows = fmt, []

    def add(self, key: str, value) -> None:
        self.rows.append((key, str(value)))

    def emit(self, out=None) -> None:
        out = out or sys.stdout
        sep = "\t" if self.fmt == "tsv" else ": "
        for k, v in self.rows:
            print(f"{k}{sep}{v}", file=out)


def show_path(p: Path) -> str:
    parts = [str(p.nodes[0])]
    for a, v in zip(p.labels, p.nodes[1:]):
        parts += [a, str(v)]
    return " ".join(parts)


def show_value(v) -> str:
    if isinstance(v, Path):
        return show_path(v)
    if isinstance(v, tuple):
        return "(" + ", ".join("bot" if x is None else str(x) for x in v) + ")"
    return str(v)


def _bool(v: bool) -> str:
    return "true" if v else "false"


# ------------------------------------------------------------------ eval

def _node_of(g: DataGraph, text: str):
    for v in g.nodes:
        if str(v) == text:
            return v
    raise CliError(f"unknown node {text!r}")


def _assignment(g: DataGraph, items) -> dict:
    alpha = {}
    for item in items or []:
        name, sep, val = item.partition("=")
        if not sep:
            raise CliError(f"--assign expects name=node, got {item!r}")
        alpha[("node", name.strip())] = _node_of(g, val.strip())
    return alpha


def evaluate(g: DataGraph, q, alpha: dict, mode: str, bound: int | None):
    """One boolean evaluation. Returns (value, mode text, witness or None)."""
    frag = classify(q.formula)
    L = bound if bound is not None else max(1, len(g.nodes))
    if q.dialect == "WL" or frag == "WL":
        if mode == "exact":
            raise CliError("WL supports bounded mode only")
        return wl_eval_bounded(g, q.formula, alpha, L), f"wl-bounded L={L}", None
    if frag == "NRL+" and mode == "auto":
        r = nrlplus_eval(g, q.formula, alpha, q.k, with_witness=True)
        return r.value, "nrl+", r.witness
    if mode in ("auto", "exact"):
        try:
            value = rl_eval_exact(g, q.formula, alpha, q.k, _budget())
        except ResourceLimit:
            if mode == "exact":
                raise
        else:
            witness = None
            if value:
                r = rl_eval_brute(g, q.formula, alpha, L, q.k, with_witness=True)
                witness = r.witness
            return value, "exact", witness
    r = rl_eval_brute(g, q.formula, alpha, L, q.k, budget=_budget(), with_witness=True)
    return r.value, f"brute L={L} ({'complete' if r.complete else 'bounded'})", r.witness


def cmd_eval(args) -> int:
    g = load_graph(_read(args.graph))
    q = parse_query(_read(args.query))
    rep = Report(args.format)
    alpha = _assignment(g, args.assign)
    if args.answers:
        names = [x.strip() for x in args.answers.split(",") if x.strip()]
        free = {v for s, v in free_vars(q.formula) if s == "node"}
        missing = [x for x in names if x not in free]
        if missing:
            raise CliError(f"--answers names non-free node variables: {', '.join(missing)}")
        if classify(q.formula) == "NRL+" and args.mode == "auto":
            pairs = nrlplus_answers(g, q.formula, names, alpha, q.k)
            used = "nrl+"
        else:
            pairs, used = set(), None
            for combo in _tuples(sorted(g.nodes, key=str), len(names)):
                a = {**alpha, **{("node", x): v for x, v in zip(names, combo)}}
                value, used, _ = evaluate(g, q, a, args.mode, args.bound)
                if value:
                    pairs.add(combo)
            used = used or args.mode
        rep.add("mode", used)
        rep.add("answers", len(pairs))
        rep.emit()
        sep = "\t" if args.format == "tsv" else " "
        for t in sorted(pairs, key=lambda t: tuple(map(str, t))):
            print(sep.join(map(str, t)))
        return 0 if pairs else 1
    value, used, witness = evaluate(g, q, alpha, args.mode, args.bound)
    rep.add("result", _bool(value))
    rep.add("mode", used)
    if witness:
        for (sort, name), v in sorted(witness.items(), key=lambda kv: (kv[0][0], kv[0][1])):
            rep.add(f"witness {sort} {name}", show_value(v))
    rep.emit()
    return 0 if value else 1


def _tuples(nodes, n):
    if n == 0:
        yield ()
        return
    for rest in _tuples(nodes, n - 1):
        for v in nodes:
            yield rest + (v,)


# ------------------------------------------------------------------ gen

def random_graph(nodes: int, p: float, seed: int, labels=("a",), values: int | None = None,
                 undirected: bool = False) -> DataGraph:
    rng = random.Random(seed)
    ids = [str(i) for i in range(1, nodes + 1)]
    if undirected:
        es = [(u, v) for i, u in enumerate(ids) for v in ids[i + 1:] if rng.random() < p]
        return encode_undirected(es, ids)
    edges = [(u, a, v) for u in ids for a in labels for v in ids if rng.random() < p]
    if values is None:
        kappa = {v: i for i, v in enumerate(ids, 1)}
    else:
        kappa = {v: rng.randint(1, values) for v in ids}
    return DataGraph.build(ids, edges, kappa)


def cycle_graph(n: int) -> DataGraph:
    ids = [str(i) for i in range(1, n + 1)]
    return encode_undirected([(ids[i], ids[(i + 1) % n]) for i in range(n)], ids)


def complete_graph(n: int) -> DataGraph:
    ids = [str(i) for i in range(1, n + 1)]
    return encode_undirected([(u, v) for i, u in enumerate(ids) for v in ids[i + 1:]], ids)


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        FsPath(path).write_text(text, encoding="utf-8")


def cmd_gen(args) -> int:
    from . import gadgets as G

    query_text = None
    extra = None
    if args.kind == "counter":
        g = G.gen_counter_graph(args.k, args.n, args.f0)
    elif args.kind in ("wl-hardness", "rl-pspace", "rl-expspace"):
        if not args.tm or args.w is None:
            raise CliError(f"gen {args.kind} needs --tm and --w")
        m = G.parse_tm(_read(args.tm))
        w = tuple(args.w)
        maker = {"wl-hardness": G.gen_wl_hardness_k1, "rl-pspace": G.gen_rl_pspace,
                 "rl-expspace": G.gen_rl_expspace}[args.kind]
        b = maker(m, w, args.f0)
        g, query_text = b.graph, b.query_text
        if args.kind == "rl-expspace":
            extra = "".join(f"{k} = {v}\n" for k, v in b.metadata["rems"].items())
    elif args.kind == "random":
        labels = tuple(args.labels.split(","))
        g = random_graph(args.nodes, args.p, args.seed, labels, args.values, args.undirected)
    elif args.kind == "cycle":
        g = cycle_graph(args.nodes)
    else:
        g = complete_graph(args.nodes)
    if args.out:
        _write(args.out + ".graph", save_graph(g))
        if query_text:
            _write(args.out + ".query", query_text)
        if extra:
            _write(args.out + ".rems", extra)
    else:
        _write(None, save_graph(g))
        if query_text and args.query_out:
            _write(args.query_out, query_text)
    return 0


# ------------------------------------------------------------------ oracle

def cmd_oracle(args) -> int:
    g = load_graph(_read(args.graph))
    rep = Report(args.format)
    if args.kind == "query-q":
        pairs = O.query_q_oracle(g)
        rep.add("answers", len(pairs))
        rep.emit()
        sep = "\t" if args.format == "tsv" else " "
        for t in sorted(pairs, key=lambda t: tuple(map(str, t))):
            print(sep.join(map(str, t)))
        return 0 if pairs else 1
    if args.kind == "connected-parity":
        conn, par = O.connected_parity(g)
        rep.add("connected", _bool(conn))
        rep.add("parity", par)
        rep.emit()
        return 0 if conn else 1
    fn = {"hamiltonian": O.hamiltonian_path_exists, "eulerian": O.eulerian_trail_exists,
          "bipartite": O.is_bipartite}[args.kind]
    value = fn(g)
    rep.add("result", _bool(value))
    rep.emit()
    return 0 if value else 1


# ------------------------------------------------------------------ bench

FAMILIES = {"cycle": cycle_graph, "complete": complete_graph}


def _sizes(text: str) -> list[int]:
    try:
        out = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise CliError(f"malformed size list {text!r}") from None
    if not out or any(n < 1 for n in out):
        raise CliError(f"malformed size list {text!r}")
    return out


def cmd_bench(args) -> int:
    q = parse_query(_read(args.query))
    sizes = _sizes(args.sizes)
    names = [x for x in (args.answers or "").split(",") if x]
    print("n\tseconds\tresult")
    for n in sizes:
        g = FAMILIES[args.family](n)
        t0 = time.perf_counter()
        if names and classify(q.formula) == "NRL+" and args.mode == "auto":
            res = str(len(nrlplus_answers(g, q.formula, names, {}, q.k)))
        else:
            value, _, _ = evaluate(g, q, {}, args.mode, args.bound)
            res = _bool(value)
        print(f"{n}\t{time.perf_counter() - t0:.6f}\t{res}", flush=True)
    return 0


# ------------------------------------------------------------------ main

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="datapath", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    e = sub.add_parser("eval", help="evaluate a query on a graph")
    e.add_argument("graph")
    e.add_argument("query")
    e.add_argument("--mode", choices=["auto", "brute", "exact"], default="auto")
    e.add_argument("--bound", type=int, help="path length bound L (default |V|)")
    e.add_argument("--answers", help="comma-separated free node variables to enumerate")
    e.add_argument("--assign", action="append", help="fix a free node variable, name=node")
    e.add_argument("--format", choices=["text", "tsv"], default="text")
    e.set_defaults(run=cmd_eval)

    g = sub.add_parser("gen", help="generate gadget or test graphs")
    g.add_argument("kind", choices=["counter", "wl-hardness", "rl-pspace", "rl-expspace",
                                    "random", "cycle", "complete"])
    g.add_argument("--k", type=int, default=1)
    g.add_argument("--n", type=int, default=2)
    g.add_argument("--f0", type=int, default=1)
    g.add_argument("--tm", help="machine file")
    g.add_argument("--w", help="input word, one symbol per character")
    g.add_argument("--nodes", type=int, default=5)
    g.add_argument("--p", type=float, default=0.4)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--labels", default="a")
    g.add_argument("--values", type=int, help="draw data values from 1..VALUES")
    g.add_argument("--undirected", action="store_true")
    g.add_argument("--out", help="file prefix; writes PREFIX.graph and PREFIX.query")
    g.add_argument("--query-out", help="query file when printing the graph to stdout")
    g.set_defaults(run=cmd_gen)

    o = sub.add_parser("oracle", help="run a graph-theoretic oracle")
    o.add_argument("kind", choices=["hamiltonian", "eulerian", "bipartite",
                                    "connected-parity", "query-q"])
    o.add_argument("graph")
    o.add_argument("--format", choices=["text", "tsv"], default="text")
    o.set_defaults(run=cmd_oracle)

    b = sub.add_parser("bench", help="time a query over a graph family")
    b.add_argument("query")
    b.add_argument("--family", choices=sorted(FAMILIES), default="cycle")
    b.add_argument("--sizes", default="8,16,32,64")
    b.add_argument("--mode", choices=["auto", "brute", "exact"], default="auto")
    b.add_argument("--bound", type=int)
    b.add_argument("--answers")
    b.set_defaults(run=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except (CliError, QuerySyntaxError, ValueError, ResourceLimit) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
