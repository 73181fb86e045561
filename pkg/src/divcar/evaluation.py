"""Synthetic corpora, leave-one-app-out evaluation and (z, p, r) sweeps."""

from __future__ import annotations

import csv
import io
import random
import statistics
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import ExcludedApp, InfeasibleSpec, KeywordLost, NoEdges
from .graph import CorrelationGraph, build_wacg
from .ingest import Ecosystem, derive_query_sets
from .metrics import MetricsReport, harmonic, report
from .pipeline import parallel_map, recommend
from .ranker import DEFAULT_K, DEFAULT_THETA
from .sampler import SampleConfig
from .steiner import Query

P_ALL = 2**31 - 1  # sample size that always saturates the graph

CSV_COLUMNS = [
    "z", "p", "r", "K", "theta", "seed", "mp", "mr", "mild", "milc",
    "harmonic", "mean_wall_s", "n_instances", "n_skipped",
]


@dataclass(frozen=True)
class SyntheticSpec:
    n_apis: int = 500
    n_apps: int = 2000
    n_keywords: int = 60
    community_count: int = 6
    apis_per_app: tuple[int, int] = (3, 5)
    seed: int = 7
    tags_per_api: tuple[int, int] = (1, 3)
    in_community: float = 0.9


def _zipf_weights(n: int, s: float = 1.0) -> list[float]:
    return [1.0 / (i + 1) ** s for i in range(n)]


def generate_corpus(spec: SyntheticSpec) -> Ecosystem:
    """Planted-community corpus, deterministic per ``spec.seed``.

    Keywords and APIs are split into communities.  APIs mostly take tags
    from their own community and apps mostly pick APIs from one community,
    with Zipf-skewed popularity so some API pairs recur across many apps.
    """
    lo, hi = spec.apis_per_app
    if min(spec.n_apis, spec.n_apps, spec.n_keywords, spec.community_count) < 1:
        raise InfeasibleSpec("all counts must be >= 1")
    if not 2 <= lo <= hi <= spec.n_apis:
        raise InfeasibleSpec(f"apis_per_app {spec.apis_per_app} must lie within [2, {spec.n_apis}]")
    if spec.community_count > min(spec.n_keywords, spec.n_apis):
        raise InfeasibleSpec("more communities than keywords or APIs")
    tlo, thi = spec.tags_per_api
    if not 1 <= tlo <= thi:
        raise InfeasibleSpec(f"bad tags_per_api {spec.tags_per_api}")

    rng = random.Random(spec.seed)
    C = spec.community_count
    width = len(str(max(spec.n_apis, spec.n_apps, spec.n_keywords)))
    keywords = [f"kw{i:0{width}d}" for i in range(spec.n_keywords)]
    kw_comm = [[k for i, k in enumerate(keywords) if i % C == c] for c in range(C)]
    api_ids = [f"api{i:0{width}d}" for i in range(spec.n_apis)]
    api_comm = [[a for i, a in enumerate(api_ids) if i % C == c] for c in range(C)]

    apis: dict[str, frozenset[str]] = {}
    for i, a in enumerate(api_ids):
        home = kw_comm[i % C]
        weights = _zipf_weights(len(home), 1.5)
        counts = list(range(tlo, thi + 1))
        n_tags = min(rng.choices(counts, _zipf_weights(len(counts), 1.5))[0], spec.n_keywords)
        tags: set[str] = set()
        while len(tags) < n_tags:
            if rng.random() < spec.in_community:
                tags.add(rng.choices(home, weights)[0])
            else:
                tags.add(rng.choice(keywords))
            if len(tags) >= len(home) and len(tags) >= n_tags:
                break
        apis[a] = frozenset(tags)

    apps: dict[str, frozenset[str]] = {}
    comm_weights = [_zipf_weights(len(pool), 0.8) for pool in api_comm]
    for j in range(spec.n_apps):
        c = rng.randrange(C)
        size = rng.randint(lo, hi)
        chosen: set[str] = set()
        while len(chosen) < size:
            if rng.random() < spec.in_community and len(chosen) < len(api_comm[c]):
                chosen.add(rng.choices(api_comm[c], comm_weights[c])[0])
            else:
                chosen.add(rng.choice(api_ids))
        apps[f"app{j:0{width}d}"] = frozenset(chosen)
    return Ecosystem(apis, apps)


def app_query(eco: Ecosystem, app_id: str) -> Query:
    kws = frozenset().union(*(eco.apis[a] for a in eco.apps[app_id]))
    return Query(tuple(sorted(kws)))


def holdout_graph(eco: Ecosystem, app_id: str) -> CorrelationGraph:
    """Graph built with the app's own co-usage removed."""
    return build_wacg(eco.without_app(app_id))


def evaluate_on_graph(
    g: CorrelationGraph,
    q: Query,
    truth: frozenset[str],
    *,
    k: int = DEFAULT_K,
    theta=DEFAULT_THETA,
    z: int = 100,
    p: int = 100,
    seed: int = 0,
    ranking: str = "compatibility",
    dedupe: bool = True,
    jobs: int = 1,
) -> MetricsReport:
    lost = [kw for kw in q.keywords if not g.keyword_vertices(kw)]
    if lost:
        raise KeywordLost(f"holdout removed every vertex for {lost}")
    rec = recommend(
        g, q, SampleConfig(z=z, p=p, seed=seed), k, theta,
        jobs=jobs, truth=truth if ranking == "accuracy" else None, dedupe=dedupe,
    )
    return report(rec.result.lists, truth, rec.elapsed)


def leave_one_out_eval(
    eco: Ecosystem,
    app_id: str,
    k: int = DEFAULT_K,
    theta=DEFAULT_THETA,
    z: int = 100,
    p: int = 100,
    seed: int = 0,
    **kwargs,
) -> MetricsReport:
    """Hold one app out, query with its keywords, score against its APIs."""
    q = app_query(eco, app_id)
    if q.r < 3:
        raise ExcludedApp(f"app {app_id!r} has only {q.r} keywords")
    g = holdout_graph(eco, app_id)
    return evaluate_on_graph(g, q, eco.apps[app_id], k=k, theta=theta, z=z, p=p, seed=seed, **kwargs)


def eligible_apps(eco: Ecosystem, r_values: Sequence[int] | None = None) -> list[str]:
    """Apps usable for evaluation (>= 3 keywords), optionally filtered by keyword count."""
    out = []
    for qs in derive_query_sets(eco):
        r = len(qs.keywords)
        if r >= 3 and (r_values is None or r in r_values):
            out.append(qs.app)
    return out


def pick_eval_apps(eco: Ecosystem, n: int, seed: int, r_values: Sequence[int] | None = None) -> list[str]:
    pool = eligible_apps(eco, r_values)
    if len(pool) <= n:
        return pool
    return sorted(random.Random(f"eval-apps:{seed}").sample(pool, n))


@dataclass(frozen=True)
class SweepSpec:
    z_values: tuple[int, ...] = (10, 100)
    p_values: tuple[int, ...] = (50, 100, 200)
    r_values: tuple[int, ...] = (3, 4, 5, 6)
    repetitions: int = 1
    seed: int = 0
    n_eval_apps: int = 100
    k: int = DEFAULT_K
    theta: float = DEFAULT_THETA
    dedupe: bool = True

    def __post_init__(self) -> None:
        if not (self.z_values and self.p_values and self.r_values):
            raise ValueError("sweep grids must be nonempty")
        if any(r < 3 for r in self.r_values):
            raise ValueError("sweep keyword counts must be >= 3")
        if self.repetitions < 1 or self.n_eval_apps < 1:
            raise ValueError("repetitions and n_eval_apps must be positive")


@dataclass
class CellResult:
    z: int
    p: int
    r: int
    reports: list[MetricsReport] = field(default_factory=list)
    skipped: int = 0

    def _mean(self, attr: str) -> Optional[float]:
        vals = [getattr(m, attr) for m in self.reports if getattr(m, attr) is not None]
        return statistics.fmean(vals) if vals else None

    def summary(self) -> dict:
        mp_, mild_ = self._mean("mp"), self._mean("mild")
        return {
            "mp": mp_,
            "mr": self._mean("mr"),
            "mild": mild_,
            "milc": self._mean("milc"),
            "harmonic": None if mp_ is None or mild_ is None else harmonic(mp_, mild_),
            "mean_wall_s": self._mean("wall_time_seconds"),
            "n_instances": len(self.reports),
            "n_skipped": self.skipped,
        }


_sweep_state: dict = {}


def _init_sweep(eco: Ecosystem) -> None:
    _sweep_state.clear()
    _sweep_state["eco"] = eco
    _sweep_state["graphs"] = {}


def _run_instance(task: tuple) -> Optional[MetricsReport]:
    app_id, z, p, seed, k, theta, ranking, dedupe = task
    eco = _sweep_state["eco"]
    graphs = _sweep_state["graphs"]
    if app_id not in graphs:
        try:
            graphs[app_id] = holdout_graph(eco, app_id)
        except NoEdges:
            graphs[app_id] = None
    g = graphs[app_id]
    if g is None:
        return None
    try:
        return evaluate_on_graph(g, app_query(eco, app_id), eco.apps[app_id], k=k, theta=theta,
                                 z=z, p=p, seed=seed, ranking=ranking, dedupe=dedupe)
    except KeywordLost:
        return None


def run_cells(
    eco: Ecosystem,
    cells: Sequence[tuple[int, int]],
    apps: Sequence[str],
    seeds: Sequence[int],
    *,
    k: int = DEFAULT_K,
    theta=DEFAULT_THETA,
    ranking: str = "compatibility",
    dedupe: bool = True,
    jobs: int = 1,
) -> dict[tuple[int, int], CellResult]:
    """Evaluate every (z, p) cell over ``apps`` x ``seeds``; order-independent results."""
    tasks = [(a, z, p, s, k, theta, ranking, dedupe) for z, p in cells for a in apps for s in seeds]
    reports = parallel_map(_run_instance, tasks, jobs, _init_sweep, (eco,))
    out = {cell: CellResult(cell[0], cell[1], 0) for cell in cells}
    for task, rep in zip(tasks, reports):
        cell = out[(task[1], task[2])]
        if rep is None:
            cell.skipped += 1
        else:
            cell.reports.append(rep)
    return out


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


def run_sweep(eco: Ecosystem, sweep: SweepSpec, *, jobs: int = 1, timing: bool = True) -> str:
    """CSV table with one aggregated row per (z, p, r) cell.

    With ``timing=False`` the wall-time column is left blank so the output
    is byte-reproducible.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    seeds = [sweep.seed + i for i in range(sweep.repetitions)]
    cells = [(z, p) for z in sweep.z_values for p in sweep.p_values]
    for r in sweep.r_values:
        apps = pick_eval_apps(eco, sweep.n_eval_apps, sweep.seed, [r])
        results = run_cells(eco, cells, apps, seeds, k=sweep.k, theta=sweep.theta,
                            dedupe=sweep.dedupe, jobs=jobs)
        for z, p in cells:
            s = results[(z, p)].summary()
            writer.writerow([
                z, "all" if p == P_ALL else p, r, sweep.k, _fmt(float(sweep.theta)), sweep.seed,
                _fmt(s["mp"]), _fmt(s["mr"]), _fmt(s["mild"]), _fmt(s["milc"]), _fmt(s["harmonic"]),
                _fmt(s["mean_wall_s"]) if timing else "", s["n_instances"], s["n_skipped"],
            ])
    return buf.getvalue()
