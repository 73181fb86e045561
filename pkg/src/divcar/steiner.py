"""Exact minimum group Steiner tree search (growth/merge dynamic program).

States are ``(root, mask)`` pairs: a tree rooted at ``root`` that covers the
query keywords in ``mask``.  States leave a min-weight priority queue in
nondecreasing weight order, so the first full-mask state popped is optimal.
"""

from __future__ import annotations

import heapq
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import KeywordUncoveredInGraph, MaskWidthExceeded, ProvenanceCycle

MAX_KEYWORDS = 32
MAX_SCORE = math.inf  # compatibility of a zero-length (single vertex) tree
_INF = math.inf
_FLAT_LIMIT = 1 << 22


@dataclass(frozen=True)
class Query:
    keywords: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.keywords:
            raise ValueError("a query needs at least one keyword")
        if len(set(self.keywords)) != len(self.keywords):
            raise ValueError(f"duplicate keywords in {self.keywords}")
        if len(self.keywords) > MAX_KEYWORDS:
            raise MaskWidthExceeded(len(self.keywords), MAX_KEYWORDS)

    @classmethod
    def of(cls, keywords: Iterable[str]) -> "Query":
        """Build a query from raw keywords, trimming and dropping repeats."""
        seen: dict[str, None] = {}
        for k in keywords:
            k = k.strip()
            if k:
                seen.setdefault(k)
        return cls(tuple(seen))

    @property
    def r(self) -> int:
        return len(self.keywords)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.keywords)) - 1

    def __len__(self) -> int:
        return len(self.keywords)


@dataclass(frozen=True, eq=False)
class SteinerState:
    """One DP state plus the provenance it was derived from.

    ``kind`` is ``"leaf"``, ``"grown"`` (``parts == (child,)``, edge from
    ``child.root`` to ``root``) or ``"merged"`` (``parts == (a, b)``, both at
    ``root``).
    """

    root: int
    mask: int
    weight: Fraction
    kind: str = "leaf"
    parts: tuple["SteinerState", ...] = ()

    @classmethod
    def leaf(cls, root: int, mask: int) -> "SteinerState":
        return cls(root, mask, Fraction(0))

    @classmethod
    def grown(cls, child: "SteinerState", root: int, length: Fraction) -> "SteinerState":
        return cls(root, child.mask, child.weight + length, "grown", (child,))

    @classmethod
    def merged(cls, a: "SteinerState", b: "SteinerState") -> "SteinerState":
        return cls(a.root, a.mask | b.mask, a.weight + b.weight, "merged", (a, b))


@dataclass(frozen=True)
class SteinerTree:
    root: int
    vertices: frozenset[int]
    edges: tuple[tuple[int, int, Fraction], ...]
    total_length: Fraction
    covered: int
    apis: tuple[str, ...] = field(default=())

    @property
    def compatibility(self):
        return tree_compatibility(self)


def tree_compatibility(t: SteinerTree):
    """Reciprocal total length; ``MAX_SCORE`` for a single-vertex tree."""
    if t.total_length == 0:
        return MAX_SCORE
    return 1 / t.total_length


def _collect(state: SteinerState, active: set[int]) -> tuple[set[int], dict[tuple[int, int], Fraction]]:
    key = id(state)
    if key in active:
        raise ProvenanceCycle(f"state ({state.root}, {state.mask:b}) reached itself")
    active.add(key)
    try:
        if state.kind == "leaf":
            return {state.root}, {}
        if state.kind == "grown":
            (child,) = state.parts
            verts, edges = _collect(child, active)
            e = (min(child.root, state.root), max(child.root, state.root))
            if e in edges:
                raise ProvenanceCycle(f"edge {e} added twice")
            edges[e] = state.weight - child.weight
            verts.add(state.root)
            return verts, edges
        if state.kind == "merged":
            a, b = state.parts
            va, ea = _collect(a, active)
            vb, eb = _collect(b, active)
            if ea.keys() & eb.keys():
                raise ProvenanceCycle(f"merged subtrees share edges {sorted(ea.keys() & eb.keys())}")
            ea.update(eb)
            return va | vb, ea
        raise ProvenanceCycle(f"unknown provenance kind {state.kind!r}")
    finally:
        active.discard(key)


def reconstruct(state: SteinerState, apis: Sequence[str] | None = None) -> SteinerTree:
    """Materialize the tree a full-mask state stands for.

    Merged parts must be edge-disjoint and the union must be a tree whose
    lengths add up to the state weight; anything else is an internal error.
    """
    verts, edges = _collect(state, set())
    total = sum(edges.values(), Fraction(0))
    if total != state.weight:
        raise ProvenanceCycle(f"edge lengths sum to {total}, state says {state.weight}")
    if len(edges) != len(verts) - 1 or not _connected(verts, edges):
        raise ProvenanceCycle("reconstructed structure is not a tree")
    return SteinerTree(
        root=state.root,
        vertices=frozenset(verts),
        edges=tuple((u, v, w) for (u, v), w in sorted(edges.items())),
        total_length=total,
        covered=state.mask,
        apis=tuple(sorted(apis[v] for v in verts)) if apis is not None else (),
    )


def _connected(verts: set[int], edges: Iterable[tuple[int, int]]) -> bool:
    adj: dict[int, list[int]] = {v: [] for v in verts}
    for u, v in edges:
        if u not in adj or v not in adj:
            return False
        adj[u].append(v)
        adj[v].append(u)
    start = next(iter(verts))
    seen, stack = {start}, [start]
    while stack:
        for y in adj[stack.pop()]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == len(verts)


@dataclass
class SearchStats:
    """Optional trace of a search run."""

    pushes: int = 0
    pops: int = 0
    dequeued_weights: list[int] = field(default_factory=list)
    dequeued_priorities: list[int] = field(default_factory=list)


def keyword_distances(g, q: Query, nbrs_of) -> list[dict[int, int]]:
    """Per query keyword, integer shortest-path distance from each vertex to
    the nearest vertex carrying it (multi-source Dijkstra)."""
    out = []
    for k in q.keywords:
        dist = {v: 0 for v in g.keyword_vertices(k)}
        heap = [(0, v) for v in sorted(dist)]
        while heap:
            d, x = heapq.heappop(heap)
            if d > dist[x]:
                continue
            for y, length in nbrs_of(x):
                nd = d + length
                if nd < dist.get(y, _INF):
                    dist[y] = nd
                    heapq.heappush(heap, (nd, y))
        out.append(dist)
    return out


def search_min_gst(g, q: Query, stats: SearchStats | None = None, *, guided: bool = True) -> SteinerTree | None:
    """Minimum-length tree covering every keyword of ``q`` in ``g``.

    ``g`` is a ``CorrelationGraph`` or ``Subgraph``.  Raises
    ``KeywordUncoveredInGraph`` when some keyword has no vertex in ``g``;
    returns None when the keywords are covered but no connected tree joins
    them (sampled subgraphs can be disconnected).

    With ``guided`` the queue is ordered by weight plus a lower bound on the
    cost of reaching the still-missing keywords (the largest distance from
    the root to any of them).  The bound is consistent under both growth and
    merging, so the first full-mask pop is still optimal; unguided, the
    queue is ordered by weight alone.
    """
    keywords = q.keywords
    missing = [k for k in keywords if not g.keyword_vertices(k)]
    if missing:
        raise KeywordUncoveredInGraph(missing)
    r = len(keywords)
    full = q.full_mask

    nbr_cache: dict[int, list[tuple[int, int]]] = {}

    def nbrs_of(x: int) -> list[tuple[int, int]]:
        got = nbr_cache.get(x)
        if got is None:
            got = nbr_cache[x] = g.int_neighbors(x)
        return got

    # state (v, m) is keyed as v << r | m; flat list while that stays small
    span = (max(g.vertex_indices(), default=0) + 1) << r
    best = [_INF] * span if span <= _FLAT_LIMIT else defaultdict(lambda: _INF)
    prov: dict[int, tuple] = {}
    heap: list[tuple] = []
    push = heapq.heappush
    upper = _INF  # lightest full-mask weight relaxed so far

    if guided:
        dists = keyword_distances(g, q, nbrs_of)
        bound_memo: dict[int, float] = {}

        def bound(v: int, m: int) -> float:
            key = v << r | m
            b = bound_memo.get(key)
            if b is None:
                b = 0
                rest = full & ~m
                i = 0
                while rest:
                    if rest & 1:
                        d = dists[i].get(v, _INF)
                        if d > b:
                            b = d
                    rest >>= 1
                    i += 1
                bound_memo[key] = b
            return b
    else:
        def bound(v: int, m: int) -> int:
            return 0

    def seed(v: int, m: int) -> None:
        key = v << r | m
        if best[key] != 0:
            best[key] = 0
            prov[key] = ("leaf",)
            f = bound(v, m)
            if f < _INF:
                push(heap, (f, m.bit_count(), v, m, 0))

    # Seed the vertex's full keyword set plus each single keyword; the singles
    # let two vertices that share a keyword still merge on disjoint masks.
    for v in g.vertex_indices():
        km = g.keyword_mask(v, keywords)
        if not km:
            continue
        seed(v, km)
        if km == full:
            upper = 0
        if km & (km - 1):
            bits = km
            while bits:
                low = bits & -bits
                seed(v, low)
                bits ^= low

    settled: dict[int, list[tuple[int, int]]] = {}
    pushes = len(heap)

    while heap:
        f, pc, v, m, w = heapq.heappop(heap)
        if w > best[v << r | m]:
            continue
        if stats is not None:
            stats.pops += 1
            stats.dequeued_weights.append(w)
            stats.dequeued_priorities.append(f)
        if m == full:
            if stats is not None:
                stats.pushes = pushes
            state = _build_state(v, m, r, best, prov, g.scale)
            parent = getattr(g, "parent", g)
            return reconstruct(state, parent.api_ids)

        how = ("grow", v)
        for u, length in nbrs_of(v):
            nw = w + length
            if nw > upper:
                continue
            ukey = u << r | m
            if nw < best[ukey]:
                best[ukey] = nw
                prov[ukey] = how
                nf = nw + bound(u, m)
                if nf <= upper:
                    push(heap, (nf, pc, u, m, nw))
                    pushes += 1

        here = settled.get(v)
        if here is None:
            here = settled[v] = []
        for m2, w2 in here:
            if m & m2:
                continue
            nw = w + w2
            if nw > upper:
                continue
            nm = m | m2
            nkey = v << r | nm
            if nw < best[nkey]:
                best[nkey] = nw
                prov[nkey] = ("merge", m, m2)
                nf = nw + bound(v, nm)
                if nf <= upper:
                    push(heap, (nf, nm.bit_count(), v, nm, nw))
                    pushes += 1
                if nm == full and nw < upper:
                    upper = nw
        here.append((m, w))
    if stats is not None:
        stats.pushes = pushes
    return None


def _build_state(v: int, m: int, r: int, best, prov, scale: int) -> SteinerState:
    def k(x):
        return x[0] << r | x[1]

    memo: dict[tuple[int, int], SteinerState] = {}
    # explicit stack: provenance chains can be long on big graphs
    stack = [(v, m)]
    while stack:
        key = stack[-1]
        if key in memo:
            stack.pop()
            continue
        how = prov[k(key)]
        if how[0] == "leaf":
            memo[key] = SteinerState.leaf(*key)
            stack.pop()
        elif how[0] == "grow":
            child = (how[1], key[1])
            if child not in memo:
                stack.append(child)
                continue
            length = Fraction(best[k(key)] - best[k(child)], scale)
            memo[key] = SteinerState.grown(memo[child], key[0], length)
            stack.pop()
        else:
            a, b = (key[0], how[1]), (key[0], how[2])
            pending = [x for x in (a, b) if x not in memo]
            if pending:
                stack.extend(pending)
                if len(stack) > 4 * len(best) + 8:
                    raise ProvenanceCycle("provenance does not bottom out")
                continue
            memo[key] = SteinerState.merged(memo[a], memo[b])
            stack.pop()
    return memo[(v, m)]


def tree_violations(t: SteinerTree, g, q: Query) -> list[str]:
    """Check the structural invariants of a returned tree; empty means valid."""
    problems = []
    verts = set(t.vertices)
    if len(t.edges) != len(verts) - 1:
        problems.append(f"|E|={len(t.edges)} but |V|={len(verts)}")
    if not _connected(verts, [(u, v) for u, v, _ in t.edges]):
        problems.append("not connected")
    for u, v, w in t.edges:
        c = dict(g.neighbor_counts(u)).get(v)
        if c is None:
            problems.append(f"edge ({u},{v}) not in graph")
        elif w != Fraction(1, c):
            problems.append(f"edge ({u},{v}) length {w} != 1/{c}")
    if sum((w for *_, w in t.edges), Fraction(0)) != t.total_length:
        problems.append("length sum mismatch")
    covered = 0
    for x in verts:
        covered |= g.keyword_mask(x, q.keywords)
    if covered != q.full_mask:
        problems.append("keywords not covered")
    degree = {x: 0 for x in verts}
    for u, v, _ in t.edges:
        degree[u] += 1
        degree[v] += 1
    for x in verts:
        if degree[x] <= 1:
            others = 0
            for y in verts - {x}:
                others |= g.keyword_mask(y, q.keywords)
            if not g.keyword_mask(x, q.keywords) & ~others:
                problems.append(f"leaf {x} contributes no unique keyword")
    return problems
