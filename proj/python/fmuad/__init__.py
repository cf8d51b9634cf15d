"""Forecast-based multi-aspect anomaly detection for multivariate time series.

The heavy lifting lives in the compiled extension; this package re-exports
its public surface.
"""

from ._fmuad import (
    Detector,
    anomaly_score,
    build_target,
    compactness_loss,
    evaluate,
    forecast_loss,
    frequency_matrix,
    generate_synthetic,
    point_adjust,
    signature_matrix,
    training_loss,
)

__all__ = [
    "Detector",
    "anomaly_score",
    "build_target",
    "compactness_loss",
    "evaluate",
    "forecast_loss",
    "frequency_matrix",
    "generate_synthetic",
    "point_adjust",
    "signature_matrix",
    "training_loss",
]
