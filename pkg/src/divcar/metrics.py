"""Evaluation metrics: inter-list diversity, compatibility, precision, recall."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .steiner import MAX_SCORE


def _apis(x) -> frozenset:
    return x.apis if hasattr(x, "apis") else frozenset(x)


def hmd(a, b) -> Fraction:
    """Hamming-style distance between two lists: 1 - |A∩B| / (|A|+|B|).

    Note the result is 1 for disjoint lists and 0.5 for identical ones.
    """
    sa, sb = _apis(a), _apis(b)
    if not sa or not sb:
        raise ValueError("hmd needs nonempty lists")
    return 1 - Fraction(len(sa & sb), len(sa) + len(sb))


def mild(lists: Sequence) -> Optional[Fraction]:
    """Mean hmd over all ordered pairs i != j; None for fewer than two lists."""
    k = len(lists)
    if k < 2:
        return None
    total = sum((hmd(a, b) for a, b in combinations(lists, 2)), Fraction(0))
    return 2 * total / (k * (k - 1))


def milc(scores: Iterable) -> tuple[Optional[float], int]:
    """Mean of finite compatibility scores, plus how many were MAX (excluded)."""
    finite, n_max = [], 0
    for s in scores:
        if s == MAX_SCORE:
            n_max += 1
        else:
            finite.append(Fraction(s))
    if not finite:
        return None, n_max
    return float(sum(finite) / len(finite)), n_max


def mp(lists: Sequence, truth: Iterable[str]) -> Fraction:
    truth = frozenset(truth)
    if not truth or not lists:
        raise ValueError("mp needs a nonempty truth set and at least one list")
    return sum((Fraction(len(_apis(l) & truth), len(_apis(l))) for l in lists), Fraction(0)) / len(lists)


def mr(lists: Sequence, truth: Iterable[str]) -> Fraction:
    truth = frozenset(truth)
    if not truth or not lists:
        raise ValueError("mr needs a nonempty truth set and at least one list")
    return sum((Fraction(len(_apis(l) & truth), len(truth)) for l in lists), Fraction(0)) / len(lists)


def harmonic(precision, diversity, beta2: int = 4) -> float:
    """Weighted harmonic mean (1+b²)·P·D / (b²·P + D) with b² = 4; 0 when both are 0."""
    denom = beta2 * precision + diversity
    if denom == 0:
        return 0.0
    return float((1 + beta2) * precision * diversity / denom)


@dataclass
class MetricsReport:
    mild: Optional[float]
    milc: Optional[float]
    milc_max_count: int
    mp: float
    mr: float
    harmonic: Optional[float]
    k_effective: int
    wall_time_seconds: float

    def as_dict(self) -> dict:
        return asdict(self)


def report(lists: Sequence, truth: Iterable[str], wall_time: float = 0.0) -> MetricsReport:
    """All metrics for one recommendation result against one ground truth."""
    truth = frozenset(truth)
    if not lists:
        return MetricsReport(None, None, 0, 0.0, 0.0, None, 0, wall_time)
    d = mild(lists)
    p = mp(lists, truth)
    c, n_max = milc(l.compatibility for l in lists)
    return MetricsReport(
        mild=None if d is None else float(d),
        milc=c,
        milc_max_count=n_max,
        mp=float(p),
        mr=float(mr(lists, truth)),
        harmonic=None if d is None else harmonic(p, d),
        k_effective=len(lists),
        wall_time_seconds=wall_time,
    )
