"""Ensemble-space search: generational Pareto-pruned enumeration and an exact
brute-force enumerator used as a correctness oracle on small pools.

The pruned search only extends Pareto-optimal size-(k-1) ensembles by one
model, so it is tractable but not exhaustive; the brute-force path evaluates
every subset and is guarded to pools of at most 20 models.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from poolscale.core_data import LossMatrix
from poolscale.oracle import MinLossVector, build_min_vector, extend_min_vector, oracle_loss
from poolscale.pareto import WEAK, Frontier, FrontierPoint, pareto_front

BRUTE_FORCE_MODEL_LIMIT = 20


@dataclass(frozen=True)
class Generation:
    """Search state at one ensemble size: its frontier and how many candidates were scored."""

    k: int
    frontier: Frontier
    explored_count: int


@dataclass(frozen=True)
class PrunedEnumeration:
    generations: tuple[Generation, ...]
    merged: Frontier


def _point(ev) -> FrontierPoint:
    return FrontierPoint(ev.total_params_billions, ev.oracle_loss, tuple(sorted(ev.member_ids)))


def enumerate_pruned(matrix: LossMatrix, k_max: int, dominance: str = WEAK) -> PrunedEnumeration:
    """Generational Pareto-pruned enumeration up to ensembles of size ``k_max``.

    Generation 1 is the frontier over all singletons; generation k extends
    each size-(k-1) frontier member by every absent model, deduplicating
    children by canonical sorted key. Candidates are generated in sorted
    parent-then-model order, so counts and output are reproducible.
    """
    n = len(matrix.models)
    if not (1 <= k_max <= n):
        raise ValueError(f"invalid k_max {k_max}: pool has {n} models")

    generations: list[Generation] = []
    frontier_vecs: dict[tuple[str, ...], MinLossVector] = {}

    # generation 1: all singletons
    candidates: dict[tuple[str, ...], MinLossVector] = {
        (mid,): build_min_vector(matrix, {mid}) for mid in matrix.model_ids
    }
    for k in range(1, k_max + 1):
        points = {key: _point(oracle_loss(matrix, vec)) for key, vec in candidates.items()}
        frontier = pareto_front(points.values(), dominance=dominance)
        frontier_vecs = {p.ensemble_key: candidates[p.ensemble_key] for p in frontier}
        generations.append(Generation(k, frontier, len(candidates)))
        if k == k_max:
            break
        candidates = {}
        for parent_key in sorted(frontier_vecs):
            parent_vec = frontier_vecs[parent_key]
            for mid in matrix.model_ids:
                if mid in parent_vec.member_ids:
                    continue
                child_key = tuple(sorted(parent_key + (mid,)))
                if child_key in candidates:
                    continue
                candidates[child_key] = extend_min_vector(parent_vec, matrix, mid)

    merged = generations[0].frontier
    for gen in generations[1:]:
        merged = pareto_front(list(merged.points) + list(gen.frontier.points), dominance=dominance)
    return PrunedEnumeration(tuple(generations), merged)


def brute_force_enumerate(matrix: LossMatrix, k_max: int, dominance: str = WEAK) -> Frontier:
    """Exact global frontier over every non-empty subset of size <= k_max.

    Exponential in pool size; refuses pools larger than
    ``BRUTE_FORCE_MODEL_LIMIT`` models.
    """
    n = len(matrix.models)
    if n > BRUTE_FORCE_MODEL_LIMIT:
        raise ValueError(f"pool exceeds brute-force limit: {n} models > {BRUTE_FORCE_MODEL_LIMIT}")
    if not (1 <= k_max <= n):
        raise ValueError(f"invalid k_max {k_max}: pool has {n} models")

    loss = matrix.loss_grid
    params = [m.params_billions for m in matrix.models]
    ids = matrix.model_ids
    points: list[FrontierPoint] = []
    for k in range(1, k_max + 1):
        for idx in combinations(range(n), k):
            subset_loss = float(loss[list(idx)].min(axis=0).mean() / matrix.n_bar)
            key = tuple(sorted(ids[i] for i in idx))
            # sum params in sorted-id order to match oracle_loss bit-for-bit
            total = float(sum(params[matrix.model_index(mid)] for mid in key))
            points.append(FrontierPoint(total, subset_loss, key))
    return pareto_front(points, dominance=dominance)
