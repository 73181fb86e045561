"""Brute-force group Steiner solver for small graphs, plus a random instance maker.

Enumerates every vertex subset, keeps those that cover the query and induce a
connected subgraph, and scores each by its induced minimum spanning tree.
Shares nothing with the DP search except the graph and tree types.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

from .errors import KeywordUncoveredInGraph, TooLarge
from .graph import CorrelationGraph
from .steiner import Query, SteinerTree

ORACLE_MAX_VERTICES = 14


def _induced_mst(subset: list[int], adj: dict[int, dict[int, int]]) -> tuple[int, list[tuple[int, int]]] | None:
    """Prim's algorithm on integer lengths; None if the induced graph is disconnected."""
    inside = set(subset)
    start = subset[0]
    in_tree = {start}
    total = 0
    chosen = []
    while len(in_tree) < len(subset):
        pick = None
        for a in sorted(in_tree):
            for b, w in adj[a].items():
                if b in inside and b not in in_tree:
                    cand = (w, a, b)
                    if pick is None or cand < pick:
                        pick = cand
        if pick is None:
            return None
        w, a, b = pick
        in_tree.add(b)
        total += w
        chosen.append((min(a, b), max(a, b)))
    return total, chosen


def oracle_exact(g, q: Query, max_vertices: int = ORACLE_MAX_VERTICES) -> SteinerTree | None:
    verts = list(g.vertex_indices())
    n = len(verts)
    if n > max_vertices:
        raise TooLarge(n, max_vertices)
    missing = [k for k in q.keywords if not g.keyword_vertices(k)]
    if missing:
        raise KeywordUncoveredInGraph(missing)

    scale = math.lcm(*(c for v in verts for _, c in g.neighbor_counts(v))) if n else 1
    adj = {v: {u: scale // c for u, c in g.neighbor_counts(v)} for v in verts}
    kmask = [g.keyword_mask(v, q.keywords) for v in verts]
    full = q.full_mask

    best = None  # (total, sorted vertex list, edges)
    cover = [0] * (1 << n)
    for s in range(1, 1 << n):
        low = s & -s
        cover[s] = cover[s ^ low] | kmask[low.bit_length() - 1]
        if cover[s] != full:
            continue
        subset = [verts[i] for i in range(n) if s >> i & 1]
        got = _induced_mst(subset, adj)
        if got is None:
            continue
        total, edges = got
        cand = (total, subset, edges)
        if best is None or cand[:2] < best[:2]:
            best = cand
    if best is None:
        return None
    total, subset, edges = best
    apis = getattr(getattr(g, "parent", g), "api_ids", None)
    return SteinerTree(
        root=subset[0],
        vertices=frozenset(subset),
        edges=tuple(sorted((u, v, Fraction(adj[u][v], scale)) for u, v in edges)),
        total_length=Fraction(total, scale),
        covered=full,
        apis=tuple(sorted(apis[v] for v in subset)) if apis is not None else (),
    )


def random_instance(
    rng: random.Random,
    n_max: int = 10,
    r_max: int = 3,
    density: tuple[float, float] = (0.3, 0.8),
    counts: tuple[int, int] = (1, 5),
) -> tuple[CorrelationGraph, Query]:
    """A connected random graph with random keyword tags and a query over them.

    Every query keyword is placed on at least one vertex.
    """
    n = rng.randint(1, n_max)
    r = rng.randint(1, r_max)
    keywords = [f"k{i}" for i in range(r)]
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    target = round(rng.uniform(*density) * len(pairs))
    order = list(range(n))
    rng.shuffle(order)
    edges = set()
    for i in range(1, n):
        a, b = order[i], order[rng.randrange(i)]
        edges.add((min(a, b), max(a, b)))
    rest = [e for e in pairs if e not in edges]
    rng.shuffle(rest)
    edges.update(rest[: max(0, target - len(edges))])
    tags = [set() for _ in range(n)]
    for v in range(n):
        for k in keywords:
            if rng.random() < 0.3:
                tags[v].add(k)
        if rng.random() < 0.2:
            tags[v].add("noise")
    for k in keywords:
        if not any(k in t for t in tags):
            tags[rng.randrange(n)].add(k)
    g = CorrelationGraph.from_edges(
        [f"v{i}" for i in range(n)],
        tags,
        [(u, v, rng.randint(*counts)) for u, v in sorted(edges)],
    )
    return g, Query(tuple(keywords))
