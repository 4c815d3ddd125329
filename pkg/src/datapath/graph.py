"""Data graphs, paths and the line-oriented graph file format."""

from __future__ import annotations

import shlex
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

NodeId = str
Symbol = str
DataValue = Union[int, str]


class GraphFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class NotAWalk(ValueError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"step {index} is not an edge of the graph")


class JunctionMismatch(ValueError):
    pass


def node_key(v: NodeId):
    """Natural order on node ids: numeric ids by value, then the rest as strings."""
    return (0, int(v), "") if v.isdigit() else (1, 0, v)


@dataclass(frozen=True)
class DataGraph:
    nodes: tuple[NodeId, ...]
    edges: frozenset[tuple[NodeId, Symbol, NodeId]]
    kappa: Mapping[NodeId, DataValue]
    alphabet: frozenset[Symbol]
    _out: dict = field(default=None, compare=False, repr=False, hash=False)

    @staticmethod
    def build(nodes: Iterable[NodeId], edges: Iterable[tuple[NodeId, Symbol, NodeId]],
              kappa: Mapping[NodeId, DataValue] | None = None,
              alphabet: Iterable[Symbol] | None = None) -> "DataGraph":
        ns = tuple(sorted(set(nodes), key=node_key))
        es = frozenset(edges)
        node_set = set(ns)
        for (u, a, v) in es:
            if u not in node_set or v not in node_set:
                raise GraphFormatError(f"undeclared node in edge {u} {a} {v}")
        kap = {v: (kappa[v] if kappa is not None and v in kappa else v) for v in ns}
        alpha = set(alphabet) if alphabet is not None else set()
        alpha |= {a for (_, a, _) in es}
        out: dict[NodeId, list] = {v: [] for v in ns}
        for (u, a, v) in es:
            out[u].append((a, v))
        out2 = {u: tuple(sorted(lst, key=lambda av: (node_key(av[1]), av[0]))) for u, lst in out.items()}
        return DataGraph(ns, es, kap, frozenset(alpha), out2)

    def out(self, u: NodeId) -> tuple[tuple[Symbol, NodeId], ...]:
        """Outgoing (label, target) pairs in canonical order."""
        return self._out[u]

    def values(self) -> list[DataValue]:
        """Distinct data values in a fixed order."""
        seen = {}
        for v in self.nodes:
            seen.setdefault(self.kappa[v], None)
        return sorted(seen, key=lambda d: (isinstance(d, str), d))

    def __len__(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True, eq=True, unsafe_hash=False)
class Path:
    nodes: tuple[NodeId, ...]
    labels: tuple[Symbol, ...] = ()

    def __post_init__(self):
        if not self.nodes or len(self.labels) != len(self.nodes) - 1:
            raise ValueError("a path needs n >= 1 nodes and n - 1 labels")

    def __len__(self) -> int:
        """Edge length."""
        return len(self.labels)

    def __hash__(self) -> int:
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.nodes, self.labels))
            object.__setattr__(self, "_hash", h)
        return h

    @property
    def first(self) -> NodeId:
        return self.nodes[0]

    @property
    def last(self) -> NodeId:
        return self.nodes[-1]

    def extend(self, label: Symbol, node: NodeId) -> "Path":
        return Path(self.nodes + (node,), self.labels + (label,))

    def sort_key(self):
        k = self.__dict__.get("_key")
        if k is None:
            k = (len(self.labels), tuple(node_key(v) for v in self.nodes), self.labels)
            object.__setattr__(self, "_key", k)
        return k

    def __str__(self) -> str:
        parts = [self.nodes[0]]
        for a, v in zip(self.labels, self.nodes[1:]):
            parts += [a, v]
        return " ".join(parts)


def is_graph_database(g: DataGraph) -> bool:
    return len(set(g.kappa.values())) == len(g.nodes)


def validate_path(g: DataGraph, nodes, labels) -> Path:
    nodes, labels = tuple(nodes), tuple(labels)
    if not nodes or len(labels) != len(nodes) - 1:
        raise ValueError("a path needs n >= 1 nodes and n - 1 labels")
    if nodes[0] not in g.kappa:
        raise NotAWalk(0)
    for i, a in enumerate(labels):
        if (nodes[i], a, nodes[i + 1]) not in g.edges:
            raise NotAWalk(i)
    return Path(nodes, labels)


def concat_paths(p1: Path, p2: Path) -> Path:
    if p1.last != p2.first:
        raise JunctionMismatch(f"{p1.last} != {p2.first}")
    return Path(p1.nodes + p2.nodes[1:], p1.labels + p2.labels)


def encode_undirected(edges: Iterable[tuple], nodes: Iterable | None = None) -> DataGraph:
    """Symmetric single-letter encoding; node values are fresh integers 1..n."""
    edges = [tuple(e) for e in edges]
    ns = set(str(v) for v in nodes) if nodes is not None else set()
    for v, w in edges:
        ns |= {str(v), str(w)}
    order = sorted(ns, key=node_key)
    kappa = {v: i + 1 for i, v in enumerate(order)}
    directed = set()
    for v, w in edges:
        directed.add((str(v), "a", str(w)))
        directed.add((str(w), "a", str(v)))
    return DataGraph.build(order, directed, kappa, {"a"})


# ---------------------------------------------------------------- file format

def _parse_value(tok: str, lineno: int) -> DataValue:
    if tok.startswith('"'):
        return tok
    try:
        return int(tok)
    except ValueError:
        raise GraphFormatError(f"bad data value {tok!r}", lineno) from None


def load_graph(text: str) -> DataGraph:
    nodes: list[NodeId] = []
    kappa: dict[NodeId, DataValue] = {}
    edges = []
    alphabet: set[Symbol] | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            toks = shlex.split(line, posix=False)
        except ValueError as exc:
            raise GraphFormatError(str(exc), lineno) from None
        head, args = toks[0], toks[1:]
        if head == "alphabet":
            alphabet = (alphabet or set()) | {_unquote(a) for a in args}
        elif head == "node":
            if len(args) not in (1, 2):
                raise GraphFormatError("expected: node <id> [<value>]", lineno)
            v = args[0]
            if v in kappa:
                raise GraphFormatError(f"duplicate node {v}", lineno)
            nodes.append(v)
            kappa[v] = _unquote(_parse_value(args[1], lineno)) if len(args) == 2 else v
        elif head == "edge":
            if len(args) != 3:
                raise GraphFormatError("expected: edge <src> <label> <dst>", lineno)
            u, a, v = args[0], _unquote(args[1]), args[2]
            for w in (u, v):
                if w not in kappa:
                    raise GraphFormatError(f"undeclared node {w}", lineno)
            edges.append((u, a, v))
        else:
            raise GraphFormatError(f"unknown directive {head!r}", lineno)
    return DataGraph.build(nodes, edges, kappa, alphabet)


def _unquote(tok):
    if isinstance(tok, str) and len(tok) >= 2 and tok[0] == tok[-1] == '"':
        return tok[1:-1]
    return tok


def _fmt_value(d: DataValue) -> str:
    return str(d) if isinstance(d, int) else '"' + d + '"'


def _fmt_symbol(a: Symbol) -> str:
    return a if a and all(c.isalnum() or c in "_:$&#'-" for c in a) and not a.startswith("#") else '"' + a + '"'


def save_graph(g: DataGraph) -> str:
    lines = ["alphabet " + " ".join(_fmt_symbol(a) for a in sorted(g.alphabet))] if g.alphabet else []
    for v in g.nodes:
        lines.append(f"node {v} {_fmt_value(g.kappa[v])}")
    for (u, a, v) in sorted(g.edges, key=lambda e: (node_key(e[0]), e[1], node_key(e[2]))):
        lines.append(f"edge {u} {_fmt_symbol(a)} {v}")
    return "\n".join(lines) + "\n"
