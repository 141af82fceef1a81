"""Nonlinear least-squares fit of the saturating power law L(P) = A * P^(-alpha) + L_inf.

The fit runs in the original loss domain (not log-transformed) with a damped
Gauss-Newton (Levenberg-Marquardt) loop over (log A, alpha, L_inf): log A
keeps A positive structurally, alpha is clamped to its bounds, and L_inf is
projected into [0, min observed loss - 1e-9] each step. The (alpha, L_inf)
trade-off creates shallow valleys, so the fit multistarts from a grid of
floor guesses and keeps the best-RSS converged result (ties broken by
smaller L_inf).

Budgets P are in billions of parameters throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from poolscale.pareto import Frontier

_LOG_A_MIN = math.log(1e-12)
_FLOOR_MARGIN = 1e-9
_STALL_DAMPING = 1e12


class InfeasibleStart(ValueError):
    """Raised when a floor guess leaves some loss - L_inf0 <= 0."""


@dataclass(frozen=True)
class FitConfig:
    max_iterations: int = 200
    rel_tolerance: float = 1e-10
    multistart_floor_grid: tuple[float, ...] = (0.0, 0.5, 0.8, 0.9, 0.95, 0.99)
    alpha_min: float = 1e-6
    alpha_max: float = 5.0
    damping_init: float = 1e-3
    damping_up: float = 10.0
    damping_down: float = 0.1

    def __post_init__(self):
        if self.max_iterations < 1 or self.rel_tolerance <= 0:
            raise ValueError("invalid fit config: non-positive iteration budget or tolerance")
        if not (0 < self.alpha_min < self.alpha_max):
            raise ValueError("invalid fit config: bad alpha bounds")
        if self.damping_init <= 0 or self.damping_up <= 1 or not (0 < self.damping_down < 1):
            raise ValueError("invalid fit config: bad damping schedule")


@dataclass(frozen=True)
class ScalingFit:
    A: float
    alpha: float
    L_inf: float
    rss: float
    n_points: int
    converged: bool
    iterations: int

    def to_dict(self) -> dict:
        return {
            "A": self.A,
            "alpha": self.alpha,
            "L_inf": self.L_inf,
            "rss": self.rss,
            "n_points": self.n_points,
            "converged": self.converged,
            "iterations": self.iterations,
        }


def predict(fit: ScalingFit, P: float) -> float:
    """Model value A * P^(-alpha) + L_inf at budget P (billions)."""
    if P <= 0:
        raise ValueError(f"invalid budget {P}: must be > 0")
    return fit.A * P ** (-fit.alpha) + fit.L_inf


def model_values(P: np.ndarray, A: float, alpha: float, L_inf: float) -> np.ndarray:
    return A * np.power(P, -alpha) + L_inf


def residuals(P: np.ndarray, L: np.ndarray, A: float, alpha: float, L_inf: float) -> np.ndarray:
    """loss_i - (A * P_i^(-alpha) + L_inf)."""
    return L - model_values(P, A, alpha, L_inf)


def residual_jacobian(P: np.ndarray, A: float, alpha: float, L_inf: float) -> np.ndarray:
    """Analytic (n, 3) Jacobian of the residual w.r.t. (A, alpha, L_inf).

    d r/d A = -P^(-alpha); d r/d alpha = A ln(P) P^(-alpha); d r/d L_inf = -1.
    """
    pa = np.power(P, -alpha)
    return np.column_stack([-pa, A * np.log(P) * pa, -np.full_like(pa, 1.0)])


def initialize_params(points: Frontier, floor_fraction: float, config: FitConfig | None = None):
    """Starting values from a log-log linearization at an assumed floor.

    L_inf0 = floor_fraction * min loss; then ordinary linear regression of
    log(loss - L_inf0) on log(P) gives slope = -alpha0, intercept = log A0.
    """
    config = config or FitConfig()
    if not (0 <= floor_fraction < 1):
        raise ValueError(f"invalid floor_fraction {floor_fraction}")
    P = np.array([p.total_params_billions for p in points])
    L = np.array([p.loss for p in points])
    L_inf0 = floor_fraction * L.min()
    shifted = L - L_inf0
    if np.any(shifted <= 0):
        raise InfeasibleStart(f"infeasible start: loss - L_inf0 <= 0 at floor_fraction {floor_fraction}")
    slope, intercept = np.polyfit(np.log(P), np.log(shifted), 1)
    alpha0 = float(np.clip(-slope, config.alpha_min, config.alpha_max))
    A0 = float(np.exp(intercept))
    return A0, alpha0, float(L_inf0)


def _lm_fit(P, L, A0, alpha0, L_inf0, config: FitConfig) -> ScalingFit:
    floor_cap = max(0.0, float(L.min()) - _FLOOR_MARGIN)
    log_a = max(math.log(A0), _LOG_A_MIN)
    alpha = float(np.clip(alpha0, config.alpha_min, config.alpha_max))
    l_inf = float(np.clip(L_inf0, 0.0, floor_cap))

    def project(theta):
        return np.array(
            [
                max(theta[0], _LOG_A_MIN),
                float(np.clip(theta[1], config.alpha_min, config.alpha_max)),
                float(np.clip(theta[2], 0.0, floor_cap)),
            ]
        )

    theta = np.array([log_a, alpha, l_inf])
    r = residuals(P, L, math.exp(theta[0]), theta[1], theta[2])
    rss = float(r @ r)
    lam = config.damping_init
    converged = False
    iterations = 0
    for iterations in range(1, config.max_iterations + 1):
        A = math.exp(theta[0])
        jac = residual_jacobian(P, A, theta[1], theta[2])
        jac = jac.copy()
        jac[:, 0] *= A  # chain rule: optimize log A
        jtj = jac.T @ jac
        jtr = jac.T @ r
        diag = np.diag(np.maximum(np.diag(jtj), 1e-14))
        try:
            step = np.linalg.solve(jtj + lam * diag, -jtr)
        except np.linalg.LinAlgError:
            lam *= config.damping_up
            continue
        trial = project(theta + step)
        r_trial = residuals(P, L, math.exp(trial[0]), trial[1], trial[2])
        rss_trial = float(r_trial @ r_trial)
        if rss_trial <= rss:
            delta = rss - rss_trial
            theta, r, rss = trial, r_trial, rss_trial
            lam = max(lam * config.damping_down, 1e-14)
            if delta <= config.rel_tolerance * (1.0 + rss):
                converged = True
                break
        else:
            lam *= config.damping_up
            if lam > _STALL_DAMPING:
                # step size has collapsed to zero: stalled at a (possibly boundary) minimum
                converged = True
                break
    return ScalingFit(
        A=math.exp(theta[0]),
        alpha=float(theta[1]),
        L_inf=float(theta[2]),
        rss=rss,
        n_points=len(P),
        converged=converged,
        iterations=iterations,
    )


def fit_scaling_law(points: Frontier, config: FitConfig | None = None) -> ScalingFit:
    """Best multistart Levenberg-Marquardt fit of the saturating power law.

    Requires at least 4 points (3 parameters + 1 dof) with at least two
    distinct budgets.
    """
    config = config or FitConfig()
    pts = list(points)
    if len(pts) < 4:
        raise ValueError(f"insufficient points: {len(pts)} < 4")
    P = np.array([p.total_params_billions for p in pts])
    L = np.array([p.loss for p in pts])
    if np.any(P <= 0):
        raise ValueError("invalid budget: all params must be > 0")
    if np.all(P == P[0]):
        raise ValueError("degenerate abscissae: all budgets identical")

    fits: list[ScalingFit] = []
    for frac in config.multistart_floor_grid:
        try:
            A0, alpha0, L_inf0 = initialize_params(Frontier(tuple(pts)), frac, config)
        except InfeasibleStart:
            continue
        fits.append(_lm_fit(P, L, A0, alpha0, L_inf0, config))
    if not fits:
        raise ValueError("insufficient points: no feasible multistart (non-positive shifted losses)")
    return min(fits, key=lambda f: (f.rss, f.L_inf))
