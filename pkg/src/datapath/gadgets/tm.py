"""Deterministic one-tape Turing machines, their text format, and a bounded simulator.

Runs use the write-on-move convention of the reductions: from state q reading a
under delta(q, a) = (q2, b, D) the head moves one cell in direction D, the new
state is q2 and b is written into the cell the head lands on. The cell that was
left keeps its old content.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

BLANK = "B"


class TmFormatError(ValueError):
    def __init__(self, msg: str, line: int | None = None):
        super().__init__(f"line {line}: {msg}" if line else msg)
        self.line = line


class Outcome(str, Enum):
    ACCEPT = "accept"
    REJECT = "reject"
    OVERFLOW = "overflow"


@dataclass(frozen=True)
class TuringMachine:
    states: tuple[str, ...]
    initial: str
    final: str
    alphabet: tuple[str, ...]
    delta: dict = field(hash=False, compare=True)

    def __post_init__(self):
        if BLANK not in self.alphabet:
            raise TmFormatError(f"alphabet must contain the blank {BLANK}")
        for q in (self.initial, self.final):
            if q not in self.states:
                raise TmFormatError(f"unknown state {q}")
        for (q, a), (q2, b, d) in self.delta.items():
            if q == self.final:
                raise TmFormatError(f"final state {q} has a transition")
            if q not in self.states or q2 not in self.states:
                raise TmFormatError(f"unknown state in delta({q}, {a})")
            if a not in self.alphabet or b not in self.alphabet:
                raise TmFormatError(f"unknown symbol in delta({q}, {a})")
            if d not in ("L", "R"):
                raise TmFormatError(f"direction must be L or R, got {d}")
        missing = [(q, a) for q in self.states if q != self.final
                   for a in self.alphabet if (q, a) not in self.delta]
        if missing:
            raise TmFormatError(f"delta is not total, missing {missing[0]}")

    @property
    def working_states(self) -> tuple[str, ...]:
        return tuple(q for q in self.states if q != self.final)

    def moves(self, direction: str) -> frozenset:
        """Pairs (q, a) whose transition moves the head in `direction`."""
        return frozenset(k for k, v in self.delta.items() if v[2] == direction)


def parse_tm(text: str) -> TuringMachine:
    """`states q0 qf q1 ...` (initial, final, others), optional `alphabet ...`,
    then one `delta q a -> q2 b R|L` line per transition. `%` starts a comment."""
    states: list[str] | None = None
    alphabet: list[str] | None = None
    delta: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("%", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if toks[0] == "states":
            if len(toks) < 3:
                raise TmFormatError("expected: states <initial> <final> [others...]", lineno)
            states = toks[1:]
        elif toks[0] == "alphabet":
            alphabet = toks[1:]
        elif toks[0] == "delta":
            if len(toks) != 7 or toks[3] != "->":
                raise TmFormatError("expected: delta q a -> q2 b L|R", lineno)
            _, q, a, _, q2, b, d = toks
            if (q, a) in delta:
                raise TmFormatError(f"duplicate transition for ({q}, {a})", lineno)
            delta[(q, a)] = (q2, b, d)
        else:
            raise TmFormatError(f"unknown directive {toks[0]!r}", lineno)
    if states is None:
        raise TmFormatError("missing states line")
    if alphabet is None:
        syms = {a for (_, a) in delta} | {b for (_, b, _) in delta.values()} | {BLANK}
        alphabet = sorted(syms)
    ordered = list(dict.fromkeys(states))
    return TuringMachine(tuple(ordered), states[0], states[1], tuple(alphabet), delta)


def format_tm(m: TuringMachine) -> str:
    others = [q for q in m.states if q not in (m.initial, m.final)]
    lines = [" ".join(["states", m.initial, m.final] + others),
             " ".join(["alphabet", *m.alphabet])]
    for (q, a), (q2, b, d) in sorted(m.delta.items()):
        lines.append(f"delta {q} {a} -> {q2} {b} {d}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Config:
    state: str
    head: int          # 0-based cell index
    tape: tuple[str, ...]

    def cells(self) -> list[tuple[str, str]]:
        """Per-cell pairs (state or '$', content)."""
        return [(self.state if i == self.head else "$", a) for i, a in enumerate(self.tape)]


def initial_config(m: TuringMachine, w, space: int) -> Config:
    w = tuple(w)
    return Config(m.initial, 0, w + (BLANK,) * (space - len(w)))


def tm_step(m: TuringMachine, c: Config) -> Config | None:
    """Successor configuration, or None when the head would leave the tape."""
    q2, b, d = m.delta[(c.state, c.tape[c.head])]
    h = c.head + (1 if d == "R" else -1)
    if not 0 <= h < len(c.tape):
        return None
    tape = list(c.tape)
    tape[h] = b
    return Config(q2, h, tuple(tape))


@dataclass(frozen=True)
class SimResult:
    outcome: Outcome
    run: tuple[Config, ...]

    @property
    def steps(self) -> int:
        return len(self.run) - 1


def tm_run(m: TuringMachine, w, space_bound: int, step_bound: int) -> SimResult:
    """Simulate until q_f (accept), a tape exit (reject), or step_bound steps
    (overflow). A repeated configuration means the run never ends, so it also
    reports overflow without spending the remaining steps."""
    w = tuple(w)
    for a in w:
        if a not in m.alphabet:
            raise ValueError(f"input symbol {a!r} not in the machine alphabet")
    if len(w) > space_bound:
        return SimResult(Outcome.REJECT, ())
    c = initial_config(m, w, space_bound)
    run = [c]
    seen = {c}
    while c.state != m.final:
        if len(run) - 1 >= step_bound:
            return SimResult(Outcome.OVERFLOW, tuple(run))
        c = tm_step(m, c)
        if c is None:
            return SimResult(Outcome.REJECT, tuple(run))
        if c in seen:
            return SimResult(Outcome.OVERFLOW, tuple(run))
        seen.add(c)
        run.append(c)
    return SimResult(Outcome.ACCEPT, tuple(run))


def tm_simulate(m: TuringMachine, w, space_bound: int, step_bound: int) -> Outcome:
    return tm_run(m, w, space_bound, step_bound).outcome
