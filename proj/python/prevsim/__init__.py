"""Python access to the prevsim metric, ROC and sweep routines."""

from ._prevsim import (
    PrevsimError,
    all_metrics,
    auc,
    default_config,
    metric,
    rank_models,
    roc_curve,
    run_sweep,
    synth,
)

__all__ = [
    "PrevsimError",
    "all_metrics",
    "auc",
    "default_config",
    "metric",
    "rank_models",
    "roc_curve",
    "run_sweep",
    "synth",
]
