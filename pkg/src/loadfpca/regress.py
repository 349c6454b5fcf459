"""Calendar predictors, least-squares score models, and curve forecasting.

Each component's score series gets its own linear model on calendar
covariates. Predictors are grouped into terms (a categorical block moves
as one unit) and the working set is grown/shrunk greedily, one term per
step, toward the lowest AIC. Fitted score models then forecast future
scores, and the truncated expansion turns those into load curves.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .curves import CurveSet, DailyCurve, _frozen_array
from .errors import (
    InsufficientDataError,
    RankDeficientDesignError,
    TruncationTooLargeError,
)
from .fpca import FpcaModel

EVENT_NAMES = ("fashion_week", "expo", "design_festival")

# Baseline levels dropped from the indicator blocks: January and Monday.
_MONTH_LABELS = ("feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec")
_DOW_LABELS = ("tue", "wed", "thu", "fri", "sat", "sun")

# Floor applied to RSS/n inside the AIC so a perfect fit stays finite.
_RSS_FLOOR = 1e-300


@dataclass(frozen=True)
class DayDescriptor:
    """Calendar/event covariates of one day.

    ``calendar_time`` counts days since the first training observation;
    ``day_of_week`` is ISO (Monday = 1). ``events`` holds the flags for
    fashion week, expo, and design festival, in that order.
    """

    date: dt.date
    calendar_time: int
    month: int
    day_of_month: int
    day_of_week: int
    events: tuple[bool, bool, bool] = (False, False, False)

    def __post_init__(self):
        if self.calendar_time < 0:
            raise ValueError(f"{self.date}: calendar_time must be >= 0")
        if (self.month, self.day_of_month, self.day_of_week) != (
            self.date.month,
            self.date.day,
            self.date.isoweekday(),
        ):
            raise ValueError(f"{self.date}: calendar fields inconsistent with date")
        if len(self.events) != len(EVENT_NAMES):
            raise ValueError(f"expected {len(EVENT_NAMES)} event flags")

    @classmethod
    def from_date(cls, date: dt.date, origin: dt.date,
                  events: tuple[bool, bool, bool] = (False, False, False)) -> "DayDescriptor":
        return cls(
            date=date,
            calendar_time=(date - origin).days,
            month=date.month,
            day_of_month=date.day,
            day_of_week=date.isoweekday(),
            events=events,
        )


# -- term encoders -----------------------------------------------------
# Every term maps a descriptor list to a column block plus labels. The
# interaction term is only meaningful while both its parents are in the
# model, which the selector enforces.

def _enc_calendar_time(days):
    col = np.array([[float(d.calendar_time)] for d in days])
    return col, ("calendar_time",)


def _enc_month(days):
    cols = np.array([[1.0 if d.month == mo else 0.0 for mo in range(2, 13)] for d in days])
    return cols, tuple(f"month_{lab}" for lab in _MONTH_LABELS)


def _enc_day_of_month(days):
    col = np.array([[float(d.day_of_month)] for d in days])
    return col, ("day_of_month",)


def _enc_day_of_week(days):
    cols = np.array([[1.0 if d.day_of_week == dw else 0.0 for dw in range(2, 8)] for d in days])
    return cols, tuple(f"dow_{lab}" for lab in _DOW_LABELS)


def _enc_event(idx: int):
    def enc(days):
        col = np.array([[1.0 if d.events[idx] else 0.0] for d in days])
        return col, (EVENT_NAMES[idx],)

    return enc


def _enc_dom_month(days):
    cols = np.array(
        [[float(d.day_of_month) if d.month == mo else 0.0 for mo in range(2, 13)] for d in days]
    )
    return cols, tuple(f"day_of_month:month_{lab}" for lab in _MONTH_LABELS)


TERM_ENCODERS: dict[str, Callable] = {
    "calendar_time": _enc_calendar_time,
    "month": _enc_month,
    "day_of_month": _enc_day_of_month,
    "day_of_week": _enc_day_of_week,
    "fashion_week": _enc_event(0),
    "expo": _enc_event(1),
    "design_festival": _enc_event(2),
    "day_of_month:month": _enc_dom_month,
}

# Canonical term order; also the deterministic tie-break order of the selector.
TERM_ORDER: list[str] = list(TERM_ENCODERS)

# Hierarchy: a term listed here may only enter while its parents are present.
TERM_PARENTS: dict[str, tuple[str, ...]] = {
    "day_of_month:month": ("day_of_month", "month"),
}

DEFAULT_POOL = tuple(TERM_ORDER)


def register_term(name: str, encoder: Callable, parents: tuple[str, ...] = ()) -> None:
    """Add a custom predictor term (e.g. a weather covariate) to the registry.

    The encoder receives the descriptor list and returns (columns, labels).
    Registered terms take part in encoding and stepwise selection like the
    built-in ones; they are appended to the canonical order.
    """
    if name in TERM_ENCODERS:
        raise ValueError(f"term {name!r} already registered")
    unknown = [p for p in parents if p not in TERM_ENCODERS]
    if unknown:
        raise ValueError(f"unknown parent terms {unknown}")
    TERM_ENCODERS[name] = encoder
    TERM_ORDER.append(name)
    if parents:
        TERM_PARENTS[name] = tuple(parents)


@dataclass(frozen=True)
class DesignSpec:
    """Candidate predictor pool. The intercept is always in the model."""

    terms: tuple[str, ...] = DEFAULT_POOL

    def __post_init__(self):
        unknown = [t for t in self.terms if t not in TERM_ENCODERS]
        if unknown:
            raise ValueError(f"unknown terms {unknown}")
        ordered = tuple(t for t in TERM_ORDER if t in set(self.terms))
        object.__setattr__(self, "terms", ordered)


def encode_design(days: Sequence[DayDescriptor], terms: Sequence[str]) -> tuple[np.ndarray, tuple[str, ...]]:
    """Design matrix for the given terms, intercept first, canonical column order."""
    if not days:
        raise ValueError("no descriptors to encode")
    wanted = set(terms)
    unknown = wanted - set(TERM_ENCODERS)
    if unknown:
        raise ValueError(f"unknown terms {sorted(unknown)}")
    blocks = [np.ones((len(days), 1))]
    labels: list[str] = ["intercept"]
    for t in TERM_ORDER:
        if t in wanted:
            cols, labs = TERM_ENCODERS[t](days)
            blocks.append(cols)
            labels.extend(labs)
    return np.hstack(blocks), tuple(labels)


def ols_fit(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    """Least-squares coefficients and residual sum of squares.

    Rejects numerically singular designs: the smallest eigenvalue of X'X
    must exceed 1e-10 times its largest diagonal entry.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n, q = x.shape
    if n < q:
        raise RankDeficientDesignError(f"{q} parameters but only {n} observations")
    gram = x.T @ x
    diag_max = float(gram.diagonal().max(initial=0.0))
    if diag_max <= 0.0 or np.linalg.eigvalsh(gram)[0] < 1e-10 * diag_max:
        raise RankDeficientDesignError("design matrix is numerically singular")
    beta = np.linalg.lstsq(x, y, rcond=None)[0]
    rss = float(np.sum((y - x @ beta) ** 2))
    if rss <= 1e-24 * float(np.sum(y**2)):
        # residual norm below 1e-12 of ||y||: the fit is exact at double
        # precision, and solver fuzz this small would otherwise dominate
        # log-RSS comparisons between equally perfect models
        rss = 0.0
    return beta, rss


def aic(rss: float, n: int, q: int) -> float:
    """Akaike criterion under a Gaussian error model, additive constants dropped."""
    if rss < 0.0:
        raise ValueError("RSS must be non-negative")
    if n < 1:
        raise ValueError("need at least one observation")
    return n * math.log(max(rss / n, _RSS_FLOOR)) + 2 * q


@dataclass(frozen=True)
class ScoreRegressionModel:
    """Selected terms and coefficients for one component's score series.

    ``column_labels`` lists the design columns actually carrying a
    coefficient; columns of selected terms that were constant over the
    training days (e.g. an event that never occurred) are recorded in
    ``dropped_columns`` and predicted as zero-effect.
    """

    component: int
    terms: tuple[str, ...]
    column_labels: tuple[str, ...]
    beta: np.ndarray
    rss: float
    n_train: int
    aic: float
    dropped_columns: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "beta", _frozen_array(self.beta))
        if self.beta.shape != (len(self.column_labels),):
            raise ValueError("one coefficient per retained column expected")


def fit_score_model(days: Sequence[DayDescriptor], y: np.ndarray,
                    terms: Sequence[str], component: int = 0) -> ScoreRegressionModel:
    """OLS fit of a score series on the given terms (no selection).

    Non-intercept columns that are constant over ``days`` are dropped
    before fitting to keep the design full rank.
    """
    x, labels = encode_design(days, terms)
    keep = [0] + [
        j for j in range(1, x.shape[1]) if x[:, j].max() > x[:, j].min()
    ]
    dropped = tuple(labels[j] for j in range(1, x.shape[1]) if j not in keep)
    x = x[:, keep]
    beta, rss = ols_fit(x, np.asarray(y, dtype=float))
    q = x.shape[1]
    return ScoreRegressionModel(
        component=component,
        terms=tuple(t for t in TERM_ORDER if t in set(terms)),
        column_labels=tuple(labels[j] for j in keep),
        beta=beta,
        rss=rss,
        n_train=len(days),
        aic=aic(rss, len(days), q),
        dropped_columns=dropped,
    )


def _term_width(term: str) -> int:
    if term in ("month", "day_of_month:month"):
        return 11
    if term == "day_of_week":
        return 6
    return 1


def stepwise_select(days: Sequence[DayDescriptor], y: np.ndarray,
                    pool: DesignSpec | Sequence[str] = DEFAULT_POOL,
                    component: int = 0) -> ScoreRegressionModel:
    """Greedy bidirectional term selection minimizing the AIC.

    Starts from the intercept-only model. Each step tries every
    single-term addition and removal (whole blocks move together; the
    interaction enters only while both parents are present and blocks
    their removal), applies the best strictly-improving move, and stops
    when none exists. Ties fall to the earliest move in canonical term
    order. Moves whose design is singular are skipped.
    """
    terms = pool.terms if isinstance(pool, DesignSpec) else DesignSpec(tuple(pool)).terms
    y = np.asarray(y, dtype=float)
    n = len(days)
    if terms and n < 2 + max(_term_width(t) for t in terms):
        raise InsufficientDataError(
            f"{n} observations cannot support the widest candidate term"
        )

    current: list[str] = []
    best = fit_score_model(days, y, current, component)
    max_steps = (len(terms) + 1) ** 2
    for _ in range(max_steps):
        candidates: list[list[str]] = []
        in_model = set(current)
        for t in terms:  # additions, canonical order
            if t in in_model:
                continue
            if any(par not in in_model for par in TERM_PARENTS.get(t, ())):
                continue
            candidates.append(current + [t])
        for t in terms:  # removals, canonical order
            if t not in in_model:
                continue
            if any(t in TERM_PARENTS.get(other, ()) for other in in_model if other != t):
                continue
            candidates.append([u for u in current if u != t])

        step_best = None
        for cand in candidates:
            try:
                fitted = fit_score_model(days, y, cand, component)
            except RankDeficientDesignError:
                continue
            if step_best is None or fitted.aic < step_best.aic:
                step_best = fitted
        if step_best is None or step_best.aic >= best.aic:
            break
        best = step_best
        current = [t for t in TERM_ORDER if t in set(best.terms)]
    return best


def predict_scores(model: ScoreRegressionModel, future: Sequence[DayDescriptor]) -> np.ndarray:
    """Predicted scores for future days under the model's selected terms."""
    x, labels = encode_design(future, model.terms)
    index = {lab: j for j, lab in enumerate(labels)}
    cols = [index[lab] for lab in model.column_labels]
    return x[:, cols] @ model.beta


def forecast_curves(fpca: FpcaModel, score_models: Sequence[ScoreRegressionModel],
                    future: Sequence[DayDescriptor], k: int, *,
                    scale: float | None = None,
                    entity_id: str = "forecast") -> CurveSet:
    """Forecast daily curves from the first ``k`` predicted component scores.

    Output is in the model's (normalized) units; pass the training scale
    factor so the set can be denormalized to kW.
    """
    models = sorted(score_models, key=lambda mdl: mdl.component)
    if [mdl.component for mdl in models] != list(range(1, len(models) + 1)):
        raise ValueError("score models must cover components 1..K without gaps")
    if k > len(models) or k > fpca.p or k < 0:
        raise TruncationTooLargeError(
            f"truncation {k} exceeds available score models ({len(models)}) or components ({fpca.p})"
        )
    n = len(future)
    if k == 0:
        values = np.tile(fpca.mean, (n, 1))
    else:
        scores = np.column_stack([predict_scores(mdl, future) for mdl in models[:k]])
        values = fpca.mean + scores @ fpca.components[:k]
    curves = tuple(
        DailyCurve(d.date, values[i], entity_id) for i, d in enumerate(future)
    )
    return CurveSet(fpca.grid, curves, scale=scale)
