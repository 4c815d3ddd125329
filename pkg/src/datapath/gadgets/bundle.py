from __future__ import annotations

from dataclasses import dataclass, field

from ..graph import DataGraph, save_graph


@dataclass(frozen=True)
class GadgetBundle:
    """A generated graph with its formula (when one is generated) and metadata."""
    graph: DataGraph
    formula: object | None
    metadata: dict = field(hash=False, compare=False)
    query_text: str | None = None

    def graph_text(self) -> str:
        return save_graph(self.graph)
