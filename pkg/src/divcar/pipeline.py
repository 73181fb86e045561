"""Query-time pipeline: sample subgraphs, solve each, rank the trees."""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from .graph import CorrelationGraph
from .ranker import DEFAULT_K, DEFAULT_THETA, RankedResult, rank_and_diversify
from .sampler import SampleConfig, Subgraph, keyword_nodes, sample_one
from .steiner import Query, SteinerTree, search_min_gst


def parallel_map(fn: Callable, items: Sequence, jobs: int = 1, initializer=None, initargs=()) -> list:
    """Ordered map, in-process for ``jobs <= 1`` and over a process pool otherwise."""
    if jobs <= 1 or len(items) <= 1:
        if initializer is not None:
            initializer(*initargs)
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs, initializer=initializer, initargs=initargs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


def solve_sample(sg: Subgraph, q: Query) -> Optional[SteinerTree]:
    """Optimal tree on one sample, or None if the sample misses a keyword or is split."""
    if any(not sg.keyword_vertices(k) for k in q.keywords):
        return None
    return search_min_gst(sg, q)


_worker: dict = {}


def _init_worker(g: CorrelationGraph, q: Query, cfg: SampleConfig) -> None:
    _worker["g"], _worker["q"], _worker["cfg"] = g, q, cfg
    _worker["starts"] = keyword_nodes(g, q.keywords)


def _sample_and_solve(index: int) -> tuple[frozenset[int], Optional[SteinerTree]]:
    sg = sample_one(_worker["g"], _worker["starts"], _worker["cfg"], index)
    return sg.vertex_set, solve_sample(sg, _worker["q"])


def solve_all(g: CorrelationGraph, q: Query, cfg: SampleConfig, jobs: int = 1) -> list[Optional[SteinerTree]]:
    """One tree (or None) per sample index, in index order."""
    if jobs > 1:
        pairs = parallel_map(_sample_and_solve, list(range(cfg.z)), jobs, _init_worker, (g, q, cfg))
        return [t for _, t in pairs]
    starts = keyword_nodes(g, q.keywords)
    solved: dict[frozenset[int], Optional[SteinerTree]] = {}
    out = []
    for i in range(cfg.z):
        sg = sample_one(g, starts, cfg, i)
        # identical samples give identical trees
        if sg.vertex_set not in solved:
            solved[sg.vertex_set] = solve_sample(sg, q)
        out.append(solved[sg.vertex_set])
    return out


@dataclass
class Recommendation:
    query: Query
    result: RankedResult
    trees: list[Optional[SteinerTree]]
    elapsed: float


def recommend(
    g: CorrelationGraph,
    q: Query,
    cfg: SampleConfig = SampleConfig(),
    k: int = DEFAULT_K,
    theta=DEFAULT_THETA,
    *,
    jobs: int = 1,
    truth: Iterable[str] | None = None,
    dedupe: bool = True,
) -> Recommendation:
    t0 = time.perf_counter()
    trees = solve_all(g, q, cfg, jobs)
    result = rank_and_diversify(trees, k, theta, truth=truth, dedupe=dedupe)
    return Recommendation(q, result, trees, time.perf_counter() - t0)
