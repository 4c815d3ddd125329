"""Built-in queries over the single-letter alphabet {a} (undirected encodings)."""

from __future__ import annotations

from .parser import parse_query

TEXTS = {
    "wl_hamiltonian": """\
dialect WL
# a node-repetition-free walk that meets every node of every walk
exists path p .
  (forall t1@p, t2@p . (t1 != t2 -> not t1 ~ t2))
  and (forall path q . forall s@q . exists u@p . s ~ u)
""",
    "rl_hamiltonian": """\
dialect RL
registers 1
rem repeat = a* . (!{r1}. a+ [=r1]) . a*
rem visits = a* [=r1] . a*
exists path p .
  (forall reg l, l2 . not repeat(p, l, l2))
  and (forall reg l . (l != bot -> visits(p, l, l)))
""",
    "rl_eulerian": """\
dialect RL
registers 2
# r1, r2 hold the two ends of an edge
rem reused = a* . (!{r1}. a . (!{r2}. a* . (eps[=r1] . a . eps[=r2] | eps[=r2] . a . eps[=r1]))) . a*
rem isedge = eps[=r1] . a . eps[=r2]
rem covers = a* . (eps[=r1] . a . eps[=r2] | eps[=r2] . a . eps[=r1]) . a*
exists path p .
  (forall reg l, l2 . not reused(p, l, l2))
  and (forall reg l . ((exists path q . isedge(q, l, l)) -> covers(p, l, l)))
""",
    "rl_odd_cycle": """\
dialect RL
registers 1
rem odd = !{r1}. (a . (a . a)*) [=r1]
exists path p . exists reg l, l2 . odd(p, l, l2)
""",
    "rl_even_hamiltonian": """\
dialect RL
registers 1
rem repeat = a* . (!{r1}. a+ [=r1]) . a*
rem visits = a* [=r1] . a*
rem even = (a . a)*
exists reg n, n2 . exists path p .
  (forall reg l, l2 . not repeat(p, l, l2))
  and (forall reg l . (l != bot -> visits(p, l, l)))
  and even(p, n, n2)
""",
    "rl_query_q": """\
dialect RL
registers 1
free node x, y
rem onpath = a* [=r1] . a*
rem startsat = eps [=r1] . a*
exists path p . (x, p, y) and exists node z . forall reg v .
  (onpath(p, v, v) -> exists node z2 . exists path q . (z2, q, z) and startsat(q, v, v))
""",
    "nrl_query_q": """\
dialect NRLPLUS
registers 1
free node x, y
rem allreach = (<a* [=r1]> . a)* . <a* [=r1]>
exists path p . exists reg l . (x, p, y) and allreach(p, l, l)
""",
}

FRAGMENT = {
    "wl_hamiltonian": "WL",
    "rl_hamiltonian": "RL",
    "rl_eulerian": "RL",
    "rl_odd_cycle": "RL+",
    "rl_even_hamiltonian": "RL",
    "rl_query_q": "RL",
    "nrl_query_q": "NRL+",
}


def corpus() -> dict:
    """Name -> parsed Query."""
    return {name: parse_query(text) for name, text in TEXTS.items()}


def corpus_rems() -> list:
    """Every REM used by the RL corpus with its register count, for REM-level tests."""
    from . import ast as A
    out = []
    for name, q in corpus().items():
        if q.dialect == "WL":
            continue
        for e in A.rem_atoms(q.formula):
            out.append((name, e, q.k))
    return out
