"""Wall time of query Q on undirected cycles: NRL+ answer enumeration against brute-force RL.

    python3 scripts/bench_scaling.py --nrl-sizes 8,16,32,64 --brute-sizes 6,8,10,12 --budget 30

Prints a TSV table (evaluator, n, seconds, result). Brute force stops at the first
size whose time exceeds the budget.
"""

from __future__ import annotations

import argparse
import math
import time
from dataclasses import dataclass
from statistics import linear_regression

from datapath.cli import cycle_graph
from datapath.lang.corpus import corpus
from datapath.logic.nrl import nrlplus_answers
from datapath.logic.rl import rl_eval_brute


@dataclass
class BenchConfig:
    nrl_sizes: tuple = (8, 16, 32, 64)
    brute_sizes: tuple = (6, 8, 10, 12, 14)
    budget: float = 30.0
    domain: str = "naive"  # brute-force path domain: naive or classes


def _sizes(text: str) -> tuple:
    return tuple(int(x) for x in text.split(",") if x)


def run(cfg: BenchConfig) -> dict:
    q = corpus()
    rows = {"nrl+": [], f"brute-{cfg.domain}": []}
    print("evaluator\tn\tseconds\tresult")
    for n in cfg.nrl_sizes:
        t0 = time.perf_counter()
        res = len(nrlplus_answers(cycle_graph(n), q["nrl_query_q"].formula, ["x", "y"]))
        dt = time.perf_counter() - t0
        rows["nrl+"].append((n, dt))
        print(f"nrl+\t{n}\t{dt:.4f}\t{res} pairs", flush=True)
    for n in cfg.brute_sizes:
        alpha = {("node", "x"): "1", ("node", "y"): str(n // 2 + 1)}
        t0 = time.perf_counter()
        res = rl_eval_brute(cycle_graph(n), q["rl_query_q"].formula, alpha, L=n, domain=cfg.domain)
        dt = time.perf_counter() - t0
        rows[f"brute-{cfg.domain}"].append((n, dt))
        print(f"brute-{cfg.domain}\t{n}\t{dt:.4f}\t{res}", flush=True)
        if dt > cfg.budget:
            break
    for name, pts in rows.items():
        if len(pts) >= 2:
            fit = linear_regression([math.log(n) for n, _ in pts], [math.log(t) for _, t in pts])
            print(f"# {name}: log-log slope {fit.slope:.2f}")
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    d = BenchConfig()
    ap.add_argument("--nrl-sizes", default=",".join(map(str, d.nrl_sizes)))
    ap.add_argument("--brute-sizes", default=",".join(map(str, d.brute_sizes)))
    ap.add_argument("--budget", type=float, default=d.budget)
    ap.add_argument("--domain", choices=["naive", "classes"], default=d.domain)
    a = ap.parse_args()
    run(BenchConfig(_sizes(a.nrl_sizes), _sizes(a.brute_sizes), a.budget, a.domain))


if __name__ == "__main__":
    main()
