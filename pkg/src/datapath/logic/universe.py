"""Capped path discovery by signature.

Paths are explored breadth first in canonical order (length, then node ids, then
labels). A prefix is kept only while its signature has been seen fewer than `cap`
times, so each signature class keeps its `cap` canonically smallest members: if a
prefix is dropped, `cap` smaller prefixes share its signature, and every extension
of the dropped prefix has `cap` smaller classmates as well.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..graph import DataGraph, NodeId, Path
from ..rem import ProfileTracker
from .errors import ResourceLimit


@dataclass
class Universe:
    paths: list  # (Path, signature) in canonical order
    complete: bool  # True if exploration saturated before the length bound
    depth: int  # longest kept path
    tracker: ProfileTracker = field(repr=False)

    def by_start(self) -> dict:
        out: dict = {}
        for p, _ in self.paths:
            out.setdefault(p.first, []).append(p)
        return out


def discover(g: DataGraph, tracker: ProfileTracker, cap: int, L: int | None = None,
             starts=None, budget: int | None = None, dead=None) -> Universe:
    """`dead(sig)` may flag signatures whose every extension is irrelevant; such
    prefixes are neither kept nor extended."""
    starts = list(g.nodes) if starts is None else list(starts)
    layer = sorted(((Path((v,)), tracker.start(v)) for v in starts), key=lambda x: x[0].sort_key())
    kept_count: dict = {}
    kept: list = []
    length = 0
    while layer:
        nxt = []
        for p, sig in layer:
            c = kept_count.get(sig, 0)
            if c >= cap or (dead is not None and dead(sig)):
                continue
            kept_count[sig] = c + 1
            kept.append((p, sig))
            if budget is not None and len(kept) > budget:
                raise ResourceLimit(f"more than {budget} representative paths needed")
            for a, w in g.out(p.last):
                nxt.append((p.extend(a, w), tracker.step(sig, a, w)))
        nxt.sort(key=lambda x: x[0].sort_key())
        if L is not None and length >= L:
            # complete only if nothing beyond the bound would have been kept
            return Universe(kept, not _any_survivor(nxt, kept_count, cap, dead), length, tracker)
        if not nxt:
            return Universe(kept, True, length, tracker)
        layer = nxt
        length += 1
    return Universe(kept, True, length, tracker)


def _any_survivor(layer, kept_count, cap, dead=None) -> bool:
    return any(kept_count.get(sig, 0) < cap and not (dead is not None and dead(sig))
               for _, sig in layer)
