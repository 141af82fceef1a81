"""Same-family vs cross-family pair analysis.

Partitions every unordered model pair by exact family-label equality, then
runs the generic frontier + power-law fit pipeline on each side. All C(n, 2)
pairs are evaluated exhaustively, independent of the pruned k=2 generation.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from poolscale.core_data import LossMatrix
from poolscale.fitting import FitConfig, ScalingFit, fit_scaling_law
from poolscale.oracle import build_min_vector, oracle_loss
from poolscale.pareto import WEAK, Frontier, FrontierPoint, pareto_front


@dataclass(frozen=True)
class PairPartition:
    """All unordered pairs, split into same-family and cross-family keys."""

    homogeneous: tuple[tuple[str, str], ...]
    heterogeneous: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class SideReport:
    """Frontier and fit for one side of the pair partition."""

    label: str
    raw_pairs: int
    frontier: Frontier
    fit: ScalingFit | None
    skip_reason: str | None = None


def partition_pairs(matrix: LossMatrix) -> PairPartition:
    """Exhaustive, disjoint partition of all unordered pairs by family label."""
    if len(matrix.models) < 2:
        raise ValueError(f"insufficient pool: {len(matrix.models)} models, need >= 2")
    homogeneous = []
    heterogeneous = []
    for a, b in combinations(sorted(matrix.models, key=lambda m: m.model_id), 2):
        key = (a.model_id, b.model_id)
        if a.family == b.family:
            homogeneous.append(key)
        else:
            heterogeneous.append(key)
    return PairPartition(tuple(homogeneous), tuple(heterogeneous))


def _evaluate_side(matrix: LossMatrix, pairs, label: str, config: FitConfig, dominance: str) -> SideReport:
    if not pairs:
        return SideReport(label, 0, Frontier(()), None, "empty side")
    points = []
    for key in pairs:
        ev = oracle_loss(matrix, build_min_vector(matrix, set(key)))
        points.append(FrontierPoint(ev.total_params_billions, ev.oracle_loss, key))
    frontier = pareto_front(points, dominance=dominance)
    try:
        fit = fit_scaling_law(frontier, config)
    except ValueError as exc:
        return SideReport(label, len(pairs), frontier, None, str(exc))
    return SideReport(label, len(pairs), frontier, fit)


def pairwise_frontiers_and_fits(
    matrix: LossMatrix, config: FitConfig | None = None, dominance: str = WEAK
) -> tuple[SideReport, SideReport]:
    """Evaluate all pairs, extract one frontier per partition side, fit each.

    A side with fewer than 4 Pareto points still gets its frontier; the fit
    is skipped with the reason recorded.
    """
    config = config or FitConfig()
    partition = partition_pairs(matrix)
    homo = _evaluate_side(matrix, partition.homogeneous, "homogeneous", config, dominance)
    hetero = _evaluate_side(matrix, partition.heterogeneous, "heterogeneous", config, dominance)
    return homo, hetero
