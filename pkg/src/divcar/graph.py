"""Weighted API correlation graph built from co-usage counts.

Vertices are APIs (indexed in sorted id order), edges join APIs that were
used together in at least one app, and each edge keeps its co-usage count
``c`` plus the exact length ``1/c``.  Searches work on integer lengths
``scale // c`` where ``scale`` is the lcm of all counts, so every comparison
is exact.
"""

from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import CorruptPayload, NoEdges, VersionMismatch
from .ingest import Ecosystem

FORMAT_VERSION = 1


class _GraphView:
    """Read-only methods shared by the full graph and its sampled subgraphs."""

    def vertex_indices(self) -> Sequence[int]:
        raise NotImplementedError

    def neighbors(self, v: int) -> list[tuple[int, Fraction]]:
        return [(u, Fraction(1, c)) for u, c in self.neighbor_counts(v)]

    def int_neighbors(self, v: int) -> list[tuple[int, int]]:
        scale = self.scale
        return [(u, scale // c) for u, c in self.neighbor_counts(v)]

    def keyword_mask(self, v: int, keywords: Sequence[str]) -> int:
        tags = self.tags(v)
        mask = 0
        for i, k in enumerate(keywords):
            if k in tags:
                mask |= 1 << i
        return mask


@dataclass(eq=False)
class CorrelationGraph(_GraphView):
    api_ids: tuple[str, ...]
    vertex_tags: tuple[frozenset[str], ...]
    adjacency: tuple[tuple[tuple[int, int], ...], ...]
    keyword_index: Mapping[str, frozenset[int]] = field(repr=False)
    scale: int = field(repr=False)

    @classmethod
    def from_edges(
        cls,
        api_ids: Sequence[str],
        tags: Sequence[Iterable[str]],
        edges: Iterable[tuple[int, int, int]],
    ) -> "CorrelationGraph":
        """Assemble a graph from vertex data and (u, v, count) triples.

        No connectivity check is done here; ``build_wacg`` guarantees it.
        """
        n = len(api_ids)
        adj: list[dict[int, int]] = [{} for _ in range(n)]
        for u, v, c in edges:
            if u == v:
                raise ValueError(f"self-loop on vertex {u}")
            if c < 1:
                raise ValueError(f"edge ({u},{v}) has count {c} < 1")
            if v in adj[u]:
                raise ValueError(f"duplicate edge ({u},{v})")
            adj[u][v] = c
            adj[v][u] = c
        vtags = tuple(frozenset(t) for t in tags)
        index: dict[str, set[int]] = defaultdict(set)
        for i, ts in enumerate(vtags):
            for t in ts:
                index[t].add(i)
        counts = {c for a in adj for c in a.values()}
        return cls(
            api_ids=tuple(api_ids),
            vertex_tags=vtags,
            adjacency=tuple(tuple(sorted(a.items())) for a in adj),
            keyword_index={k: frozenset(s) for k, s in index.items()},
            scale=math.lcm(*counts) if counts else 1,
        )

    def __len__(self) -> int:
        return len(self.api_ids)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CorrelationGraph):
            return NotImplemented
        return (
            self.api_ids == other.api_ids
            and self.vertex_tags == other.vertex_tags
            and self.adjacency == other.adjacency
        )

    def vertex_indices(self) -> range:
        return range(len(self.api_ids))

    def tags(self, v: int) -> frozenset[str]:
        return self.vertex_tags[v]

    def neighbor_counts(self, v: int) -> tuple[tuple[int, int], ...]:
        return self.adjacency[v]

    def keyword_vertices(self, k: str) -> frozenset[int]:
        return self.keyword_index.get(k, frozenset())

    def edges(self) -> list[tuple[int, int, int]]:
        return [(u, v, c) for u in range(len(self)) for v, c in self.adjacency[u] if u < v]

    def count(self, u: int, v: int) -> int | None:
        return dict(self.adjacency[u]).get(v)

    @cached_property
    def _positions(self) -> dict[str, int]:
        return {a: i for i, a in enumerate(self.api_ids)}

    def index_of(self, api: str) -> int:
        return self._positions[api]

    def stats(self) -> dict:
        return {"vertices": len(self), "edges": len(self.edges()), "keywords": len(self.keyword_index)}


def _components(n: int, adj: Sequence[Iterable[int]]) -> list[list[int]]:
    seen = [False] * n
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        seen[s] = True
        stack, comp = [s], []
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in adj[x]:
                if not seen[y]:
                    seen[y] = True
                    stack.append(y)
        comps.append(sorted(comp))
    return comps


def co_usage_counts(eco: Ecosystem) -> dict[tuple[str, str], int]:
    """Number of distinct apps using each unordered API pair (keys sorted)."""
    counts: dict[tuple[str, str], int] = defaultdict(int)
    for members in eco.apps.values():
        for a, b in combinations(sorted(members), 2):
            counts[(a, b)] += 1
    return dict(counts)


def build_wacg(eco: Ecosystem) -> CorrelationGraph:
    """Build the co-usage graph and keep its largest connected component.

    Ties between equally large components go to the one holding the
    lexicographically smallest API id.
    """
    counts = co_usage_counts(eco)
    if not counts:
        raise NoEdges()
    ids = sorted({a for pair in counts for a in pair})
    pos = {a: i for i, a in enumerate(ids)}
    nbrs: list[list[int]] = [[] for _ in ids]
    for a, b in counts:
        nbrs[pos[a]].append(pos[b])
        nbrs[pos[b]].append(pos[a])
    # comps come out ordered by their smallest member, so max() keeps the first on ties
    best = max(_components(len(ids), nbrs), key=len)
    kept = [ids[i] for i in best]
    new = {a: i for i, a in enumerate(kept)}
    edges = [(new[a], new[b], c) for (a, b), c in counts.items() if a in new and b in new]
    return CorrelationGraph.from_edges(kept, [eco.apis[a] for a in kept], edges)


def component_coverage(eco: Ecosystem, g: CorrelationGraph) -> float:
    """Fraction of edge-bearing APIs retained in the graph."""
    bearing = {a for pair in co_usage_counts(eco) for a in pair}
    return len(g) / len(bearing) if bearing else 0.0


def serialize(g: CorrelationGraph) -> bytes:
    doc = {
        "version": FORMAT_VERSION,
        "vertices": [{"api": a, "tags": sorted(t)} for a, t in zip(g.api_ids, g.vertex_tags)],
        "edges": [list(e) for e in sorted(g.edges())],
    }
    return (json.dumps(doc, separators=(",", ":"), ensure_ascii=False) + "\n").encode("utf-8")


def deserialize(data: bytes | str) -> CorrelationGraph:
    try:
        doc = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CorruptPayload(f"graph payload is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or "version" not in doc:
        raise CorruptPayload("graph payload lacks a version header")
    if doc["version"] != FORMAT_VERSION:
        raise VersionMismatch(doc["version"])
    try:
        verts = doc["vertices"]
        ids = [v["api"] for v in verts]
        tags = [v["tags"] for v in verts]
        edges = [(int(u), int(v), int(c)) for u, v, c in doc["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptPayload(f"graph payload has bad structure: {exc!r}") from None
    n = len(ids)
    if len(set(ids)) != n:
        raise CorruptPayload("duplicate vertex ids")
    for u, v, c in edges:
        if not (0 <= u < v < n) or c < 1:
            raise CorruptPayload(f"bad edge {[u, v, c]}")
    try:
        return CorrelationGraph.from_edges(ids, tags, edges)
    except ValueError as exc:
        raise CorruptPayload(str(exc)) from None


def load_graph(path) -> CorrelationGraph:
    with open(path, "rb") as fh:
        return deserialize(fh.read())
