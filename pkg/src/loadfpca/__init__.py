"""Daily electric load curve decomposition and long-term forecasting.

Daily curves are decomposed into an ordered orthonormal basis via the
eigenfunctions of their sample covariance; per-component score series
are regressed on calendar predictors selected by stepwise AIC, and the
truncated expansion of predicted scores yields the forecast curves.
"""

from .curves import CurveSet, DailyCurve, TimeGrid, denormalize, normalize_by_max
from .fpca import (
    FpcaModel,
    ScoreMatrix,
    covariance,
    explained_variability,
    fit,
    mean_curve,
    project,
    project_set,
    reconstruct,
    theta_table,
)
from .metrics import (
    PairedSeries,
    energy_percent_error,
    mae,
    mape,
    nmse,
    ppmcc,
    rep,
    total_energy_deviation,
)
from .regress import (
    DEFAULT_POOL,
    DayDescriptor,
    DesignSpec,
    ScoreRegressionModel,
    aic,
    encode_design,
    fit_score_model,
    forecast_curves,
    ols_fit,
    predict_scores,
    register_term,
    stepwise_select,
)

__version__ = "0.1.0"

__all__ = [
    "CurveSet",
    "DailyCurve",
    "TimeGrid",
    "normalize_by_max",
    "denormalize",
    "FpcaModel",
    "ScoreMatrix",
    "mean_curve",
    "covariance",
    "fit",
    "project",
    "project_set",
    "reconstruct",
    "explained_variability",
    "theta_table",
    "DayDescriptor",
    "DesignSpec",
    "ScoreRegressionModel",
    "DEFAULT_POOL",
    "encode_design",
    "ols_fit",
    "aic",
    "fit_score_model",
    "stepwise_select",
    "predict_scores",
    "forecast_curves",
    "register_term",
    "PairedSeries",
    "mape",
    "energy_percent_error",
    "total_energy_deviation",
    "mae",
    "nmse",
    "rep",
    "ppmcc",
    "__version__",
]
