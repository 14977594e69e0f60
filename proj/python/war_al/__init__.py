"""Wasserstein active regression: critic, exact transport oracles and the query loop."""

from ._core import (
    Critic,
    WarError,
    dual_objective,
    exact_w1_1d,
    exact_w1_small,
    groupsort,
    kmeans_seed,
    rmse_at_fraction,
    run_active_learning,
    run_grid,
    strategies,
    train_critic,
    trapezoid_auc,
)

__all__ = [
    "Critic",
    "WarError",
    "dual_objective",
    "exact_w1_1d",
    "exact_w1_small",
    "groupsort",
    "kmeans_seed",
    "rmse_at_fraction",
    "run_active_learning",
    "run_grid",
    "strategies",
    "train_critic",
    "trapezoid_auc",
]
