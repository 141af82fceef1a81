"""Non-dominated (total params, loss) envelope extraction.

Default dominance is weak: q dominates p iff q is no worse on both axes and
strictly better on at least one. This discards duplicates and same-budget,
worse-loss points, yielding a clean staircase. The strict rule (both axes
strictly better) is available via ``dominance="strict"``.

Floating-point comparison is exact; no epsilon. Ties among identical
(params, loss) pairs keep the lexicographically smallest ensemble_key.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

WEAK = "weak"
STRICT = "strict"


@dataclass(frozen=True, order=True)
class FrontierPoint:
    """One evaluated ensemble as a point in (budget, loss) space."""

    total_params_billions: float
    loss: float
    ensemble_key: tuple[str, ...]

    def __post_init__(self):
        if not (math.isfinite(self.total_params_billions) and math.isfinite(self.loss)):
            raise ValueError(f"non-finite frontier point {self!r}")
        if self.total_params_billions <= 0:
            raise ValueError(f"non-positive budget in frontier point {self!r}")


@dataclass(frozen=True)
class Frontier:
    """Points sorted ascending by total params."""

    points: tuple[FrontierPoint, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def pareto_front(points: Iterable[FrontierPoint], dominance: str = WEAK) -> Frontier:
    """Extract the non-dominated subset, sorted ascending by params.

    Deterministic under input permutation: candidates are sorted by
    (params, loss, ensemble_key) before the dominance sweep.
    """
    pts = sorted(points)
    if not pts:
        raise ValueError("empty point set")
    if dominance == WEAK:
        kept: list[FrontierPoint] = []
        best = math.inf
        for p in pts:
            if p.loss < best:
                kept.append(p)
                best = p.loss
    elif dominance == STRICT:
        # p survives unless some point with strictly smaller params has strictly smaller loss
        kept = []
        min_prev = math.inf  # min loss over strictly smaller budgets
        i = 0
        while i < len(pts):
            j = i
            while j < len(pts) and pts[j].total_params_billions == pts[i].total_params_billions:
                j += 1
            group = pts[i:j]
            kept.extend(p for p in group if p.loss <= min_prev)
            min_prev = min(min_prev, min(p.loss for p in group))
            i = j
        # exact duplicates: keep only the key-smallest (sort order guarantees it comes first)
        seen: set[tuple[float, float]] = set()
        deduped = []
        for p in kept:
            sig = (p.total_params_billions, p.loss)
            if sig not in seen:
                seen.add(sig)
                deduped.append(p)
        kept = deduped
    else:
        raise ValueError(f"unknown dominance rule {dominance!r}")
    return Frontier(tuple(kept))


def merge_frontiers(a: Frontier, b: Frontier, dominance: str = WEAK) -> Frontier:
    """Pareto front of the union; idempotent and commutative. An empty side acts as identity."""
    combined = list(a.points) + list(b.points)
    if not combined:
        return Frontier(())
    return pareto_front(combined, dominance=dominance)
