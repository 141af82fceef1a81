"""Oracle-ensemble loss frontiers and saturating power-law fits for pools of language models."""

from poolscale.core_data import LossCell, LossMatrix, ModelMeta, load_loss_matrix, mean_token_length
from poolscale.oracle import (
    EnsembleEval,
    MinLossVector,
    build_min_vector,
    extend_min_vector,
    oracle_loss,
    single_model_loss,
)
from poolscale.pareto import Frontier, FrontierPoint, merge_frontiers, pareto_front
from poolscale.enumeration import Generation, PrunedEnumeration, brute_force_enumerate, enumerate_pruned
from poolscale.fitting import FitConfig, ScalingFit, fit_scaling_law, initialize_params, predict
from poolscale.diversity import PairPartition, SideReport, pairwise_frontiers_and_fits, partition_pairs
from poolscale.synth import SynthConfig, synth_curve_points, synth_pool

__version__ = "0.1.0"

__all__ = [
    "LossCell",
    "LossMatrix",
    "ModelMeta",
    "load_loss_matrix",
    "mean_token_length",
    "EnsembleEval",
    "MinLossVector",
    "build_min_vector",
    "extend_min_vector",
    "oracle_loss",
    "single_model_loss",
    "Frontier",
    "FrontierPoint",
    "merge_frontiers",
    "pareto_front",
    "Generation",
    "PrunedEnumeration",
    "brute_force_enumerate",
    "enumerate_pruned",
    "FitConfig",
    "ScalingFit",
    "fit_scaling_law",
    "initialize_params",
    "predict",
    "PairPartition",
    "SideReport",
    "pairwise_frontiers_and_fits",
    "partition_pairs",
    "SynthConfig",
    "synth_curve_points",
    "synth_pool",
]
