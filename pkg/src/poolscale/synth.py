"""Seeded synthetic loss matrices with controllable scaling and diversity structure.

Randomness comes from a 64-bit counter-based generator (splitmix64
finalizer, Weyl increment 0x9E3779B97F4A7C15) implemented in pure integer
arithmetic, so identical seeds give bit-identical matrices on every platform
and are portable across reimplementations.

Generative model, per (model with params P in family f, text t):

    expected per-token loss  l = base_floor + scale_coeff * P^(-alpha_true)
                                 + off_stratum(f, t) * family_signature_strength
    sum_loss = max(0, n_bar * (l + noise_sigma * N(0, 1)))

where texts are partitioned into ``n_families`` disjoint strata round-robin
and ``off_stratum`` is 0 on the family's own stratum, 1 elsewhere: each
family is cheap on its own slice of texts, which makes cross-family pools
complementary. ``n_bar`` is the mean of the drawn token counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from poolscale.core_data import LossCell, LossMatrix, ModelMeta
from poolscale.pareto import Frontier, FrontierPoint

_MASK = (1 << 64) - 1
_WEYL = 0x9E3779B97F4A7C15
_TOKEN_MIN = 64
_TOKEN_MAX = 192


def _mix(z: int) -> int:
    """splitmix64 finalizer."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class CounterRng:
    """Stateless counter-based generator: value i is mix(key + i * WEYL)."""

    def __init__(self, seed: int, stream: int = 0):
        self.key = _mix(_mix(seed & _MASK) ^ _mix(stream & _MASK))

    def uniform(self, counter: int) -> float:
        """Uniform in [0, 1) with 53 random bits."""
        return (_mix((self.key + counter * _WEYL) & _MASK) >> 11) / float(1 << 53)

    def randint(self, counter: int, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi]."""
        return lo + int(self.uniform(counter) * (hi - lo + 1))

    def normal(self, counter: int) -> float:
        """Standard normal via Box-Muller on counters (2c, 2c+1)."""
        u1 = self.uniform(2 * counter)
        u2 = self.uniform(2 * counter + 1)
        u1 = max(u1, 1e-300)
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


@dataclass(frozen=True)
class SynthConfig:
    n_families: int = 3
    models_per_family: int = 4
    params_grid_billions: tuple[float, ...] = (0.5, 1.0, 2.0, 4.0)
    n_texts: int = 60
    base_floor: float = 1.0
    family_signature_strength: float = 0.0
    noise_sigma: float = 0.0
    seed: int = 0
    scale_coeff: float = 2.0
    alpha_true: float = 0.35

    def __post_init__(self):
        if self.n_families < 1 or self.models_per_family < 1 or self.n_texts < 1:
            raise ValueError("invalid synth config: counts must be >= 1")
        if not self.params_grid_billions or any(p <= 0 for p in self.params_grid_billions):
            raise ValueError("invalid synth config: params grid must be non-empty and positive")
        if self.base_floor < 0 or self.family_signature_strength < 0 or self.noise_sigma < 0:
            raise ValueError("invalid synth config: negative floor, signature, or noise")
        if self.scale_coeff <= 0 or self.alpha_true <= 0:
            raise ValueError("invalid synth config: scale_coeff and alpha_true must be > 0")


def generative_equation(config: SynthConfig) -> str:
    """Human-readable statement of the generator, emitted alongside the matrix."""
    return (
        "sum_loss(model, text) = max(0, n_bar * (base_floor + scale_coeff * P^(-alpha_true) "
        "+ off_stratum(family, text) * family_signature_strength + noise_sigma * N(0,1))); "
        f"base_floor={config.base_floor}, scale_coeff={config.scale_coeff}, "
        f"alpha_true={config.alpha_true}, family_signature_strength={config.family_signature_strength}, "
        f"noise_sigma={config.noise_sigma}, token_count ~ U[{_TOKEN_MIN},{_TOKEN_MAX}], "
        f"strata = text_index mod n_families, seed={config.seed} "
        "(counter RNG: splitmix64 finalizer, Weyl 0x9E3779B97F4A7C15)"
    )


def synth_pool(config: SynthConfig) -> LossMatrix:
    """Deterministic synthetic pool per the documented generative equation."""
    tokens_rng = CounterRng(config.seed, stream=1)
    noise_rng = CounterRng(config.seed, stream=2)

    models = []
    for fi in range(config.n_families):
        family = f"fam{fi:02d}"
        for j in range(config.models_per_family):
            p = config.params_grid_billions[j % len(config.params_grid_billions)]
            models.append(ModelMeta(f"{family}_m{j:02d}", family, p))
    texts = [f"t{ti:04d}" for ti in range(config.n_texts)]

    n_models = len(models)
    token_counts = np.array(
        [
            [tokens_rng.randint(i * config.n_texts + j, _TOKEN_MIN, _TOKEN_MAX) for j in range(config.n_texts)]
            for i in range(n_models)
        ],
        dtype=np.int64,
    )
    n_bar = float(token_counts.mean())

    cells = {}
    for i, meta in enumerate(models):
        fi = i // config.models_per_family
        per_token_base = config.base_floor + config.scale_coeff * meta.params_billions ** (-config.alpha_true)
        for j, tid in enumerate(texts):
            off_stratum = 0.0 if j % config.n_families == fi else 1.0
            per_token = per_token_base + off_stratum * config.family_signature_strength
            if config.noise_sigma > 0:
                per_token += config.noise_sigma * noise_rng.normal(i * config.n_texts + j)
            cells[(meta.model_id, tid)] = LossCell(
                max(0.0, n_bar * per_token), int(token_counts[i, j])
            )
    return LossMatrix(models, texts, cells)


def synth_curve_points(
    A: float,
    alpha: float,
    L_inf: float,
    P_values,
    noise_sigma: float = 0.0,
    seed: int = 0,
) -> Frontier:
    """Points on loss = A * P^(-alpha) + L_inf (+ optional Gaussian noise), seed-deterministic."""
    if A <= 0 or alpha <= 0 or L_inf < 0 or noise_sigma < 0:
        raise ValueError("invalid curve parameters: need A > 0, alpha > 0, L_inf >= 0, noise >= 0")
    P_values = list(P_values)
    if not P_values or any(p <= 0 for p in P_values):
        raise ValueError("invalid curve parameters: budgets must be non-empty and positive")
    rng = CounterRng(seed, stream=3)
    points = []
    for i, p in enumerate(sorted(P_values)):
        loss = A * p ** (-alpha) + L_inf
        if noise_sigma > 0:
            loss += noise_sigma * rng.normal(i)
        points.append(FrontierPoint(float(p), float(loss), (f"synth{i:03d}",)))
    return Frontier(tuple(points))
