"""Principal-component decomposition of daily load curves.

The sample covariance of the curves (plain unweighted inner product on
the grid, matching the discrete hourly treatment of the data) is
eigendecomposed into an ordered orthonormal basis. Each day is then a
mean curve plus a signed score per component, and truncating the
expansion gives the best possible approximation of that length.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np

from .curves import CurveSet, DailyCurve, TimeGrid, _frozen_array
from .errors import (
    DegenerateVarianceError,
    EmptySetError,
    GridMismatchError,
    InsufficientDataError,
    TruncationTooLargeError,
)

# Eigenvalues below this fraction of the leading one are treated as zero.
RANK_TOLERANCE = 1e-12


@dataclass(frozen=True)
class FpcaModel:
    """Fitted basis: mean curve, orthonormal components, eigenvalues.

    ``components`` has one component per row. ``total_variance`` is the
    trace of the sample covariance, i.e. the full eigenvalue mass, kept
    so that explained variability is well defined even when only the
    leading ``p`` components are stored. ``rank_deficient`` is set when
    the requested component count exceeded the numerical rank; trailing
    eigenvalues are clamped to zero in that case.
    """

    grid: TimeGrid
    mean: np.ndarray
    components: np.ndarray
    eigenvalues: np.ndarray
    total_variance: float
    n_train: int
    rank_deficient: bool = False

    def __post_init__(self):
        object.__setattr__(self, "mean", _frozen_array(self.mean))
        object.__setattr__(self, "components", _frozen_array(self.components))
        object.__setattr__(self, "eigenvalues", _frozen_array(self.eigenvalues))
        if self.components.shape != (self.p, self.grid.m):
            raise ValueError("component matrix shape does not match grid")
        if self.mean.shape != (self.grid.m,):
            raise ValueError("mean length does not match grid")

    @property
    def p(self) -> int:
        return self.eigenvalues.shape[0]


@dataclass(frozen=True)
class ScoreMatrix:
    """Per-day, per-component coefficients of a fitted basis."""

    scores: np.ndarray
    dates: tuple[dt.date, ...]

    def __post_init__(self):
        object.__setattr__(self, "scores", _frozen_array(self.scores))
        object.__setattr__(self, "dates", tuple(self.dates))
        if self.scores.shape[0] != len(self.dates):
            raise ValueError("one row of scores per date expected")

    def column(self, k: int) -> np.ndarray:
        """Scores of component ``k`` (1-based)."""
        return self.scores[:, k - 1]


def mean_curve(cs: CurveSet) -> np.ndarray:
    """Pointwise arithmetic mean over all curves of the set."""
    if cs.n == 0:
        raise EmptySetError("mean of an empty curve set")
    return cs.matrix().mean(axis=0)


def covariance(cs: CurveSet) -> np.ndarray:
    """Sample covariance matrix of the curves (symmetric, PSD)."""
    if cs.n < 2:
        raise InsufficientDataError(f"covariance needs >= 2 curves, got {cs.n}")
    x = cs.matrix()
    xc = x - x.mean(axis=0)
    s = xc.T @ xc / (cs.n - 1)
    return (s + s.T) / 2.0


def eigenvalue_spectrum(cs: CurveSet) -> np.ndarray:
    """All covariance eigenvalues, descending, negatives clamped to zero."""
    evals = np.linalg.eigvalsh(covariance(cs))[::-1].copy()
    evals[evals < 0.0] = 0.0
    return evals


def fit(cs: CurveSet, p: int) -> tuple[FpcaModel, ScoreMatrix]:
    """Estimate the top-``p`` principal components and the training scores.

    Components are eigenvectors of the sample covariance ordered by
    eigenvalue; each is flipped so its entry of largest magnitude is
    positive (first such entry on ties), which pins the otherwise
    arbitrary eigenvector signs. Degenerate input (a single curve, or
    identical curves) succeeds with zero eigenvalues so that downstream
    forecasting falls back to the mean.
    """
    n, m = cs.n, cs.grid.m
    if n == 0:
        raise EmptySetError("cannot fit on an empty curve set")
    if not 1 <= p <= m:
        raise ValueError(f"component count must be in [1, {m}], got {p}")

    x = cs.matrix()
    mu = x.mean(axis=0)
    if n == 1:
        s = np.zeros((m, m))
    else:
        xc = x - mu
        s = xc.T @ xc / (n - 1)
        s = (s + s.T) / 2.0

    evals, evecs = np.linalg.eigh(s)
    evals = evals[::-1].copy()
    evecs = evecs[:, ::-1]
    evals[evals < 0.0] = 0.0
    cutoff = RANK_TOLERANCE * evals[0] if evals[0] > 0.0 else 0.0
    rank = int(np.sum(evals > cutoff))
    evals[rank:] = 0.0

    flip = np.where(evecs[np.abs(evecs).argmax(axis=0), np.arange(m)] < 0.0, -1.0, 1.0)
    evecs = evecs * flip

    components = evecs[:, :p].T
    scores = (x - mu) @ components.T
    model = FpcaModel(
        grid=cs.grid,
        mean=mu,
        components=components,
        eigenvalues=evals[:p],
        total_variance=float(np.trace(s)),
        n_train=n,
        rank_deficient=p > rank,
    )
    return model, ScoreMatrix(scores, cs.dates)


def project(model: FpcaModel, curve: DailyCurve) -> np.ndarray:
    """Scores of one curve: inner products of the centered curve with each component."""
    if curve.values.shape != (model.grid.m,):
        raise GridMismatchError(
            f"curve has {curve.values.shape[0]} samples, model grid has {model.grid.m}"
        )
    return (curve.values - model.mean) @ model.components.T


def project_set(model: FpcaModel, cs: CurveSet) -> ScoreMatrix:
    """Scores of every curve in a set sharing the model grid."""
    if cs.grid != model.grid:
        raise GridMismatchError("curve set grid differs from model grid")
    scores = (cs.matrix() - model.mean) @ model.components.T
    return ScoreMatrix(scores, cs.dates)


def reconstruct(model: FpcaModel, scores, k: int | None = None) -> np.ndarray:
    """Mean curve plus the first ``k`` score-weighted components.

    ``k`` defaults to the length of ``scores``; ``k = 0`` returns the
    mean curve.
    """
    scores = np.asarray(scores, dtype=float)
    if k is None:
        k = scores.shape[0]
    if k > model.p or k > scores.shape[0]:
        raise TruncationTooLargeError(
            f"truncation {k} exceeds available components ({min(model.p, scores.shape[0])})"
        )
    if k == 0:
        return model.mean.copy()
    return model.mean + scores[:k] @ model.components[:k]


def explained_variability(model: FpcaModel, p: int) -> float:
    """Cumulative share of total variance carried by the first ``p`` components."""
    if not 1 <= p <= model.p:
        raise ValueError(f"p must be in [1, {model.p}], got {p}")
    if model.total_variance <= 0.0:
        raise DegenerateVarianceError("all eigenvalues are zero")
    return float(np.sum(model.eigenvalues[:p]) / model.total_variance)


def theta_table(cs: CurveSet) -> np.ndarray:
    """Explained-variability curve over every component, ending at exactly 1.

    Returns an array of shape (m, 2): component count, cumulative share.
    """
    evals = eigenvalue_spectrum(cs)
    cum = np.cumsum(evals)
    if cum[-1] <= 0.0:
        raise DegenerateVarianceError("all eigenvalues are zero")
    cum = cum / cum[-1]  # normalizing by its own last entry pins the end to 1.0
    return np.column_stack([np.arange(1, evals.shape[0] + 1), cum])
