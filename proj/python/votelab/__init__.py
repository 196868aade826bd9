"""Majority-vote ensemble statistics, error bounds and large-ensemble extrapolation."""

from ._votelab import (
    IoError,
    PredictionDataset,
    ValidationError,
    bounds,
    clt_check,
    dirichlet_confusion,
    ensemble_stats,
    growth_curve,
    load_predictions,
    parse_predictions,
    pathological,
    polarization_upper_bound,
    predict_mv_error,
    split_vote,
)

__all__ = [
    "IoError",
    "PredictionDataset",
    "ValidationError",
    "bounds",
    "clt_check",
    "dirichlet_confusion",
    "ensemble_stats",
    "growth_curve",
    "load_predictions",
    "parse_predictions",
    "pathological",
    "polarization_upper_bound",
    "predict_mv_error",
    "split_vote",
]
