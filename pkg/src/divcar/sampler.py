"""Random-walk subgraph sampling seeded from query keyword vertices."""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from typing import Sequence

from .errors import EmptyKeywordCover
from .graph import CorrelationGraph, _GraphView


@dataclass(frozen=True)
class SampleConfig:
    z: int = 100
    p: int = 100
    seed: int = 0
    max_stall_steps: int = 100

    def __post_init__(self) -> None:
        if self.z < 1 or self.p < 1 or self.max_stall_steps < 1:
            raise ValueError(f"z, p and max_stall_steps must be positive: {self}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True, eq=False)
class Subgraph(_GraphView):
    """Induced subgraph of ``parent`` on ``vertex_set``; lengths are inherited."""

    parent: CorrelationGraph
    vertex_set: frozenset[int]
    _adj: dict = field(default_factory=dict, repr=False, compare=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subgraph):
            return NotImplemented
        return self.parent is other.parent and self.vertex_set == other.vertex_set

    def __hash__(self) -> int:
        return hash(self.vertex_set)

    def __len__(self) -> int:
        return len(self.vertex_set)

    @property
    def scale(self) -> int:
        return self.parent.scale

    def vertex_indices(self) -> list[int]:
        return sorted(self.vertex_set)

    def tags(self, v: int) -> frozenset[str]:
        return self.parent.vertex_tags[v]

    def neighbor_counts(self, v: int) -> tuple[tuple[int, int], ...]:
        got = self._adj.get(v)
        if got is None:
            keep = self.vertex_set
            got = tuple((u, c) for u, c in self.parent.adjacency[v] if u in keep)
            self._adj[v] = got
        return got

    def keyword_vertices(self, k: str) -> frozenset[int]:
        return self.parent.keyword_vertices(k) & self.vertex_set

    def edges(self) -> list[tuple[int, int, int]]:
        return [(u, v, c) for u in self.vertex_indices() for v, c in self.neighbor_counts(u) if u < v]

    def api_ids(self) -> list[str]:
        return [self.parent.api_ids[v] for v in self.vertex_indices()]


def sample_rng(seed: int, index: int) -> random.Random:
    """Independent RNG for one sample, derived only from (seed, index)."""
    digest = hashlib.sha256(f"divcar-walk:{seed}:{index}".encode()).digest()
    return random.Random(int.from_bytes(digest[:16], "big"))


def keyword_nodes(g: CorrelationGraph, keywords: Sequence[str]) -> list[int]:
    missing = [k for k in keywords if not g.keyword_vertices(k)]
    if missing:
        raise EmptyKeywordCover(missing)
    return sorted(set().union(*(g.keyword_vertices(k) for k in keywords)))


def random_walk(g: CorrelationGraph, starts: Sequence[int], target: int, rng: random.Random,
                max_stall_steps: int = 100) -> frozenset[int]:
    """Walk from a random start until ``target`` distinct vertices are seen.

    After ``max_stall_steps`` consecutive moves that discover nothing new, the
    walk jumps back to a random start vertex.
    """
    target = min(target, len(g))
    if target == len(g):
        return frozenset(g.vertex_indices())
    current = starts[rng.randrange(len(starts))]
    seen = {current}
    stall = 0
    adjacency = g.adjacency
    while len(seen) < target:
        if stall >= max_stall_steps:
            current = starts[rng.randrange(len(starts))]
            stall = 0
            if current not in seen:
                seen.add(current)
                continue
        nbrs = adjacency[current]
        current = nbrs[rng.randrange(len(nbrs))][0]
        if current in seen:
            stall += 1
        else:
            seen.add(current)
            stall = 0
    return frozenset(seen)


def sample_one(g: CorrelationGraph, starts: Sequence[int], cfg: SampleConfig, index: int) -> Subgraph:
    rng = sample_rng(cfg.seed, index)
    return Subgraph(g, random_walk(g, starts, cfg.p, rng, cfg.max_stall_steps))


def sample_subgraphs(g: CorrelationGraph, keywords: Sequence[str], cfg: SampleConfig) -> list[Subgraph]:
    starts = keyword_nodes(g, keywords)
    return [sample_one(g, starts, cfg, i) for i in range(cfg.z)]


def coverage_report(subgraphs: Sequence[Subgraph], keywords: Sequence[str]) -> list[frozenset[str]]:
    return [frozenset(k for k in keywords if sg.keyword_vertices(k)) for sg in subgraphs]


def dump_subgraphs(subgraphs: Sequence[Subgraph]) -> list[list[str]]:
    """Debug view: each sample as a sorted list of API ids."""
    return [sg.api_ids() for sg in subgraphs]
