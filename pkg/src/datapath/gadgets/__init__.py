"""Reduction gadgets: counter graphs, machine encodings and a TM simulator."""

from .bundle import GadgetBundle  # noqa: F401
from .counter import gen_counter_graph, gen_counter_formulas_k1  # noqa: F401
from .expspace import gen_rl_expspace  # noqa: F401
from .pspace import gen_rl_pspace, run_length_bound  # noqa: F401
from .tm import Outcome, TuringMachine, parse_tm, tm_simulate  # noqa: F401
from .wl_hardness import gen_wl_hardness_k1  # noqa: F401
