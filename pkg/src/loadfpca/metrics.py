"""Forecast accuracy indices.

``mape`` and ``energy_percent_error`` are the primary reporting errors;
``mae``/``nmse``/``rep``/``ppmcc`` are the comparison indices used for
benchmark tables. All functions take the actual series first.

``energy_percent_error`` keeps the leading 1/m factor of its printed
definition; ``total_energy_deviation`` is the conventional variant
without it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DivisionByZeroActualError,
    ZeroActualNormError,
    ZeroTotalEnergyError,
    ZeroVarianceActualError,
    ZeroVarianceError,
)


@dataclass(frozen=True)
class PairedSeries:
    """Aligned actual/predicted samples over one evaluation window."""

    actual: np.ndarray
    predicted: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.actual, dtype=float)
        p = np.asarray(self.predicted, dtype=float)
        if a.ndim != 1 or p.ndim != 1 or a.shape != p.shape:
            raise ValueError("actual and predicted must be equal-length vectors")
        if a.shape[0] == 0:
            raise ValueError("empty series")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(p))):
            raise ValueError("series contain non-finite values")
        object.__setattr__(self, "actual", a)
        object.__setattr__(self, "predicted", p)

    @property
    def m(self) -> int:
        return self.actual.shape[0]


def _pair(actual, predicted) -> PairedSeries:
    if isinstance(actual, PairedSeries):
        return actual
    return PairedSeries(actual, predicted)


def mape(actual, predicted=None) -> float:
    """Mean absolute percentage error: mean of |x - y| / |x|, times 100."""
    s = _pair(actual, predicted)
    zeros = np.flatnonzero(s.actual == 0.0)
    if zeros.size:
        raise DivisionByZeroActualError(zeros.tolist())
    return float(np.mean(np.abs(s.actual - s.predicted) / np.abs(s.actual)) * 100.0)


def energy_percent_error(actual, predicted=None) -> float:
    """Relative error on summed energy, divided by the sample count.

    (1/m) * |sum(x) - sum(y)| / sum(x) * 100. The 1/m factor is part of
    the definition being reproduced; see ``total_energy_deviation`` for
    the conventional form.
    """
    s = _pair(actual, predicted)
    total = float(np.sum(s.actual))
    if total == 0.0:
        raise ZeroTotalEnergyError("actual series sums to zero")
    return float(abs(np.sum(s.actual) - np.sum(s.predicted)) / total * 100.0 / s.m)


def total_energy_deviation(actual, predicted=None) -> float:
    """|sum(x) - sum(y)| / sum(x) * 100, without the 1/m factor."""
    s = _pair(actual, predicted)
    total = float(np.sum(s.actual))
    if total == 0.0:
        raise ZeroTotalEnergyError("actual series sums to zero")
    return float(abs(np.sum(s.actual) - np.sum(s.predicted)) / total * 100.0)


def mae(actual, predicted=None) -> float:
    """Mean absolute error."""
    s = _pair(actual, predicted)
    return float(np.mean(np.abs(s.actual - s.predicted)))


def nmse(actual, predicted=None, *, normalization: str = "variance") -> float:
    """Mean squared error normalized by the spread of the actual series.

    The exact normalizer varies across the benchmark literature, so it is
    selectable: "variance" (default) divides by the variance of the
    actual series; "mean_product" divides by mean(x) * mean(y).
    """
    s = _pair(actual, predicted)
    if normalization == "variance":
        centered = s.actual - s.actual.mean()
        denom = float(np.sum(centered**2))
        if denom == 0.0:
            raise ZeroVarianceActualError("actual series is constant")
        return float(np.sum((s.actual - s.predicted) ** 2) / denom)
    if normalization == "mean_product":
        denom = float(s.actual.mean() * s.predicted.mean())
        if denom == 0.0:
            raise ZeroVarianceActualError("series means multiply to zero")
        return float(np.mean((s.actual - s.predicted) ** 2) / denom)
    raise ValueError(f"unknown normalization {normalization!r}")


def rep(actual, predicted=None) -> float:
    """Relative error percentage: 100 * sqrt(sum((x-y)^2) / sum(x^2))."""
    s = _pair(actual, predicted)
    denom = float(np.sum(s.actual**2))
    if denom == 0.0:
        raise ZeroActualNormError("actual series has zero norm")
    return float(100.0 * np.sqrt(np.sum((s.actual - s.predicted) ** 2) / denom))


def ppmcc(actual, predicted=None) -> float:
    """Pearson correlation between actual and predicted samples."""
    s = _pair(actual, predicted)
    xa = s.actual - s.actual.mean()
    xp = s.predicted - s.predicted.mean()
    na = float(np.sqrt(np.sum(xa**2)))
    np_ = float(np.sqrt(np.sum(xp**2)))
    if na == 0.0 or np_ == 0.0:
        raise ZeroVarianceError("correlation needs both series non-constant")
    return float(np.sum(xa * xp) / (na * np_))
