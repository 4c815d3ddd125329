from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from datapath import oracles as O
from datapath.graph import DataGraph, Path
from datapath.lang import ast as A
from datapath.lang.corpus import corpus
from datapath.lang.parser import FragmentViolation, parse_formula, parse_rem
from datapath.logic.errors import PositionOutOfRange, UnassignedVariable
from datapath.logic.exact import (BOT_CONST, FAnd, FAtom, FEq, FExists, build_representative,
                                  count_paths_product, count_paths_threshold, fo_rank,
                                  fo_translate, path_profile, rl_eval_exact, threshold)
from datapath.logic.nrl import nrlplus_answers, nrlplus_eval
from datapath.logic.rl import check_witness, rl_eval_brute
from datapath.logic.wl import wl_eval_bounded
from datapath.rem import register_space

from helpers import complete, cycle, data_graphs, directed, undirected

Q = corpus()


def _all_graphs(max_n):
    from networkx.generators.atlas import graph_atlas_g
    return [undirected(h.number_of_nodes(), [(u + 1, v + 1) for u, v in h.edges()])
            for h in graph_atlas_g() if 1 <= h.number_of_nodes() <= max_n]


# ------------------------------------------------------------------- WL

def test_wl_hamiltonian_examples():
    f = Q["wl_hamiltonian"].formula
    assert wl_eval_bounded(complete(3), f, L=3)
    assert not wl_eval_bounded(undirected(2, []), f, L=2)


def test_wl_reflexive_sim():
    f = parse_formula("exists path p . exists t@p . t ~ t", "WL")
    assert wl_eval_bounded(undirected(1, []), f, L=0)
    assert wl_eval_bounded(cycle(3), f, L=2)


def test_wl_errors():
    f = parse_formula("exists u@p . t@p ~ u", "WL")
    with pytest.raises(UnassignedVariable):
        wl_eval_bounded(complete(3), f, {}, L=2)
    alpha = {("path", "p"): Path(("1",)), ("pos", "t", "p"): 5}
    with pytest.raises(PositionOutOfRange):
        wl_eval_bounded(complete(3), f, alpha, L=2)


def test_wl_edge_and_order_atoms():
    g = directed([("1", "a", "2"), ("2", "b", "3")])
    p = Path(("1", "2", "3"), ("a", "b"))
    f = parse_formula("exists t@p, u@p . edge(b, t, u) and not (u < t)", "WL")
    assert wl_eval_bounded(g, f, {("path", "p"): p}, L=2)
    f2 = parse_formula("exists t@p, u@p . edge(c, t, u)", "WL")
    assert not wl_eval_bounded(g, f2, {("path", "p"): p}, L=2)


def test_wl_rl_hamiltonian_agree_small():
    for g in _all_graphs(4):
        L = len(g.nodes)
        wl = wl_eval_bounded(g, Q["wl_hamiltonian"].formula, L=L)
        rl = rl_eval_brute(g, Q["rl_hamiltonian"].formula, L=L, k=1)
        assert wl == rl == O.hamiltonian_path_exists(g)


# ------------------------------------------------------------- brute RL

def test_rl_hamiltonian_examples():
    f = Q["rl_hamiltonian"].formula
    assert rl_eval_brute(complete(3), f, L=3)
    assert rl_eval_brute(cycle(4), f, L=4)
    assert not rl_eval_brute(undirected(4, [(1, 2), (3, 4)]), f, L=4)


def test_odd_cycle_examples():
    f = Q["rl_odd_cycle"].formula
    assert rl_eval_brute(complete(3), f, L=3)
    assert not rl_eval_brute(cycle(4), f, L=8)


def test_query_q_rl_matches_oracle_on_five_nodes():
    g = directed([("1", "a", "2"), ("2", "a", "3"), ("3", "a", "1"), ("3", "a", "4"), ("5", "a", "4")])
    f = Q["rl_query_q"].formula
    got = {(x, y) for x, y in product(g.nodes, repeat=2)
           if rl_eval_brute(g, f, {("node", "x"): x, ("node", "y"): y}, L=5)}
    assert got == O.query_q_oracle(g)


def test_unassigned_free_variable():
    f = parse_formula("exists path p . (x, p, x)", free={"x": "node"})
    with pytest.raises(UnassignedVariable):
        rl_eval_brute(complete(3), f)


@settings(max_examples=40)
@given(data_graphs(max_nodes=3, labels=("a",), max_values=2))
def test_brute_monotone_in_L(g):
    f = parse_formula("exists path p . exists reg l, l2 . {!{r1}. a+ [=r1]}(p, l, l2)")
    vals = [rl_eval_brute(g, f, L=L) for L in range(0, 5)]
    assert vals == sorted(vals)


def test_brute_witness_rechecks():
    r = rl_eval_brute(complete(3), Q["rl_hamiltonian"].formula, L=3, with_witness=True)
    assert r.value and r.complete
    assert check_witness(complete(3), Q["rl_hamiltonian"].formula, {}, r.witness, 1, 3)


# ------------------------------------------------------------ exact RL

def test_fo_translate_guards_and_atoms():
    f = parse_formula("exists node x . (x, p, x)", free={"p": "path"})
    phi = fo_translate(f)
    assert isinstance(phi, FExists) and phi.var == "x"
    assert phi.body == FAnd(FAtom("Nodes", ("x",)), FAtom("Endpoints", ("x", "p", "x")))
    assert fo_translate(parse_formula("v = bot", free={"v": "reg"})) == FEq("v", BOT_CONST)
    assert fo_rank(phi) == 1


def test_path_profile_examples():
    g = directed([("u", "a", "v")], {"u": 1, "v": 2})
    single = Path(("u",))
    assert path_profile(g, single, [A.Letter("a")], 1) == frozenset()
    eps = path_profile(g, single, [A.Epsilon()], 1)
    assert eps == {(0, lam, lam) for lam in register_space(g, 1)}
    e = parse_rem("any* . (!{r1}. any+ [=r1]) . any*")
    h = directed([("1", "a", "2"), ("2", "a", "3")], {"1": 1, "2": 2, "3": 1})
    p = Path(("1", "2", "3"), ("a", "a"))
    prof = path_profile(h, p, [e], 1)
    assert (0, (None,), (1,)) in prof and (0, (None,), (2,)) not in prof


def test_count_threshold_examples():
    g = directed([("u", "a", "v")])
    p = Path(("u", "v"), ("a",))
    rems = [A.Letter("a")]
    E = path_profile(g, p, rems, 1)
    assert count_paths_threshold(g, "u", "v", E, 3, rems, 1) == 1
    assert count_paths_threshold(g, "v", "u", E, 3, rems, 1) == 0
    two = directed([("u", "a", "v"), ("v", "a", "u")])
    star = [parse_rem("a*")]
    E2 = path_profile(two, Path(("u", "v"), ("a",)), star, 1)
    assert count_paths_threshold(two, "u", "v", E2, 2, star, 1) == 2
    assert count_paths_product(two, "u", "v", E2, 2, star, 1) == 2


def test_representative_without_edges():
    g = DataGraph.build(["u", "v"], [])
    f = parse_formula("exists path p . exists node x . (x, p, x)")
    M = build_representative(g, f)
    assert sorted(M.paths, key=Path.sort_key) == [Path(("u",)), Path(("v",))]


def test_representative_threshold_cap():
    labels = [f"l{i}" for i in range(8)]
    g = directed([("u", a, "v") for a in labels])
    f = parse_formula("exists path p, q . exists node x, y . (x, p, y) and (x, q, y)")
    M = build_representative(g, f)
    assert len(labels) > threshold(f)
    assert M.counts[("u", "v", frozenset())] == threshold(f)


def test_exact_examples():
    assert rl_eval_exact(complete(3), Q["rl_hamiltonian"].formula)
    f = parse_formula("exists node x . exists reg v . v = bot")
    assert rl_eval_exact(complete(3), f)


@settings(max_examples=30)
@given(data_graphs(max_nodes=3, labels=("a",), max_values=2))
def test_exact_matches_brute_small(g):
    f = Q["rl_odd_cycle"].formula
    assert rl_eval_exact(g, f) == rl_eval_brute(g, f, L=2 * len(g.nodes) + 1)


# ------------------------------------------------------------------ NRL+

def test_nrl_query_q_matches_oracle():
    g = directed([("1", "a", "2"), ("2", "a", "3"), ("3", "a", "1"), ("3", "a", "4"), ("5", "a", "4")])
    got = nrlplus_answers(g, Q["nrl_query_q"].formula, ["x", "y"])
    assert got == O.query_q_oracle(g)


def test_nrl_star_through_path():
    g = directed([("1", "a", "2"), ("2", "a", "3")] + [(v, "a", "z") for v in "123"])
    assert ("1", "3") in nrlplus_answers(g, Q["nrl_query_q"].formula, ["x", "y"])


def test_nrl_trivial_path_everywhere():
    f = parse_formula("exists path p . (x, p, x)", "NRLPLUS", free={"x": "node"})
    g = directed([("1", "a", "2")])
    assert all(nrlplus_eval(g, f, {("node", "x"): v}) for v in g.nodes)


def test_nrl_rejects_negation():
    f = parse_formula("not exists path p . (x, p, x)", free={"x": "node"})
    with pytest.raises(FragmentViolation):
        nrlplus_eval(complete(3), f, {("node", "x"): "1"})


def test_nrl_witness_rechecks():
    g = directed([("1", "a", "2"), ("2", "a", "3")] + [(v, "a", "z") for v in "123"])
    alpha = {("node", "x"): "1", ("node", "y"): "3"}
    r = nrlplus_eval(g, Q["nrl_query_q"].formula, alpha, with_witness=True)
    assert r.value
    L = max(len(v) for (s, _), v in r.witness.items() if s == "path")
    assert check_witness(g, r.prenex_formula, alpha, r.witness, 1, L)
