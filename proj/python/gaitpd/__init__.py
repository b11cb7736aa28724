"""Kinematic ground-perturbation detector."""

from ._core import (
    GaitpdError,
    alpha,
    baseline,
    default_config,
    detect,
    evaluate,
    pca,
    phi,
    simulate,
    sweep,
)

__all__ = [
    "GaitpdError",
    "alpha",
    "baseline",
    "default_config",
    "detect",
    "evaluate",
    "pca",
    "phi",
    "simulate",
    "sweep",
]
