"""Normalized single-model loss, oracle ensemble loss, and aggregated parameter budgets.

The oracle credits an ensemble, per text, with the minimum text-level summed
loss achieved by any member under its own tokenizer. The per-text minimum is
kept as a vector so that adding one model to an ensemble is an O(n_texts)
elementwise min rather than a full re-scan.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from poolscale.core_data import LossMatrix


@dataclass(frozen=True)
class MinLossVector:
    """Running per-text minimum of summed losses (nats) for one ensemble."""

    per_text_min: np.ndarray
    member_ids: frozenset[str]

    def __post_init__(self):
        if not self.member_ids:
            raise ValueError("empty ensemble")


@dataclass(frozen=True)
class EnsembleEval:
    """(members, total params, normalized oracle loss) for one evaluated ensemble."""

    member_ids: frozenset[str]
    total_params_billions: float
    oracle_loss: float


def single_model_loss(matrix: LossMatrix, model_id: str) -> float:
    """Expected loss of one model: mean over texts of summed loss, divided by n_bar."""
    row = matrix.loss_row(model_id)
    return float(row.mean() / matrix.n_bar)


def build_min_vector(matrix: LossMatrix, member_ids) -> MinLossVector:
    """Per-text minimum of summed losses over the given member set."""
    members = frozenset(member_ids)
    if not members:
        raise ValueError("empty ensemble")
    rows = [matrix.model_index(mid) for mid in members]
    per_text = matrix.loss_grid[rows].min(axis=0)
    return MinLossVector(per_text, members)


def extend_min_vector(base: MinLossVector, matrix: LossMatrix, new_model_id: str) -> MinLossVector:
    """Extend an ensemble by one model via elementwise min; equals build_min_vector on the union."""
    if new_model_id in base.member_ids:
        raise ValueError(f"duplicate member {new_model_id!r}")
    row = matrix.loss_row(new_model_id)
    return MinLossVector(np.minimum(base.per_text_min, row), base.member_ids | {new_model_id})


def oracle_loss(matrix: LossMatrix, vec: MinLossVector) -> EnsembleEval:
    """Normalized expected oracle loss and aggregated parameter budget of an ensemble."""
    # sorted order pins float summation order so equal ensembles compare bit-identically
    total_params = sum(matrix.meta(mid).params_billions for mid in sorted(vec.member_ids))
    loss = float(vec.per_text_min.mean() / matrix.n_bar)
    return EnsembleEval(vec.member_ids, float(total_params), loss)
