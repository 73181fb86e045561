"""Turn per-sample trees into ranked, pairwise-diverse recommendation lists."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .steiner import MAX_SCORE, SteinerTree, tree_compatibility

DEFAULT_K = 10
DEFAULT_THETA = 0.5


@dataclass(frozen=True)
class RecommendationList:
    apis: frozenset[str]
    total_length: Fraction
    compatibility: object  # Fraction or MAX_SCORE
    source_subgraph: int

    def __post_init__(self) -> None:
        if not self.apis:
            raise ValueError("a recommendation list cannot be empty")

    @classmethod
    def from_tree(cls, tree: SteinerTree, source: int) -> "RecommendationList":
        return cls(frozenset(tree.apis), tree.total_length, tree_compatibility(tree), source)

    def sort_key(self):
        # descending compatibility, then fewer APIs, then lexicographic ids
        return (-self.compatibility, len(self.apis), sorted(self.apis))


@dataclass(frozen=True)
class RankedResult:
    lists: tuple[RecommendationList, ...]
    theta: float
    k: int
    candidates: int = field(default=0)

    def __len__(self) -> int:
        return len(self.lists)


def diversity(a: RecommendationList | Iterable[str], b: RecommendationList | Iterable[str]) -> Fraction:
    """1 - |A ∩ B| / (|A| + |B|), exactly."""
    sa = a.apis if isinstance(a, RecommendationList) else frozenset(a)
    sb = b.apis if isinstance(b, RecommendationList) else frozenset(b)
    if not sa or not sb:
        raise ValueError("diversity is undefined for empty lists")
    return 1 - Fraction(len(sa & sb), len(sa) + len(sb))


def precision(lst: RecommendationList, truth: frozenset[str]) -> Fraction:
    return Fraction(len(lst.apis & truth), len(lst.apis))


def rank_by_accuracy(lists: Sequence[RecommendationList], truth: Iterable[str]) -> list[RecommendationList]:
    """Order by precision against ``truth``; ties fall back to the compatibility order."""
    truth = frozenset(truth)
    if not truth:
        raise ValueError("ground truth must be nonempty")
    return sorted(lists, key=lambda l: (-precision(l, truth), l.sort_key()))


def _dedupe(lists: Iterable[RecommendationList]) -> list[RecommendationList]:
    kept: dict[frozenset[str], RecommendationList] = {}
    for l in lists:
        cur = kept.get(l.apis)
        if cur is None or (l.total_length, l.source_subgraph) < (cur.total_length, cur.source_subgraph):
            kept[l.apis] = l
    return list(kept.values())


def select_diverse(ordered: Sequence[RecommendationList], k: int, theta) -> list[RecommendationList]:
    """Greedy pass: keep a list iff it is at least ``theta``-diverse from all kept ones."""
    out: list[RecommendationList] = []
    for cand in ordered:
        if len(out) >= k:
            break
        if all(diversity(cand, prev) >= theta for prev in out):
            out.append(cand)
    return out


def rank_and_diversify(
    trees: Sequence[Optional[SteinerTree]],
    k: int = DEFAULT_K,
    theta=DEFAULT_THETA,
    *,
    truth: Iterable[str] | None = None,
    dedupe: bool = True,
) -> RankedResult:
    """Rank candidate trees and pick up to ``k`` pairwise-diverse ones.

    Absent trees are dropped.  With ``truth`` given the order is by precision
    first (evaluation only); otherwise by compatibility.  Fewer than ``k``
    lists is a normal outcome.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0 <= theta <= 1:
        raise ValueError("theta must lie in [0, 1]")
    lists = [RecommendationList.from_tree(t, i) for i, t in enumerate(trees) if t is not None]
    if dedupe:
        lists = _dedupe(lists)
    if truth is not None:
        ordered = rank_by_accuracy(lists, truth)
    else:
        ordered = sorted(lists, key=lambda l: (l.sort_key(), l.source_subgraph))
    theta_exact = Fraction(theta).limit_denominator(10**9) if isinstance(theta, float) else Fraction(theta)
    chosen = select_diverse(ordered, k, theta_exact)
    return RankedResult(tuple(chosen), float(theta), k, candidates=len(lists))


def compatibility_json(score):
    return "max" if score == MAX_SCORE else float(score)


def result_to_json(result: RankedResult, query: Sequence[str], **extra) -> dict:
    lists = []
    for i, l in enumerate(result.lists):
        lists.append({
            "apis": sorted(l.apis),
            "compatibility": compatibility_json(l.compatibility),
            "total_length": float(l.total_length),
            "source_subgraph": l.source_subgraph,
            "diversity_to_prev": [float(diversity(l, prev)) for prev in result.lists[:i]],
        })
    doc = {
        "query": list(query),
        "k": result.k,
        "theta": result.theta,
        "found": len(result.lists),
        "candidates": result.candidates,
        "lists": lists,
    }
    doc.update(extra)
    return doc
