"""Daily load curves on a fixed intra-day sampling grid.

A curve is one day of load samples for one entity (substation or spatial
aggregate). Sets of curves share a grid and can be normalized by their
global maximum so that scores of different entities are comparable.
All types are immutable; operations return new objects.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, replace

import numpy as np

from .errors import EmptySetError, NotNormalizedError, ZeroScaleError


def _frozen_array(values) -> np.ndarray:
    out = np.array(values, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class TimeGrid:
    """Ordered intra-day sample times, as fractional hours in [0, 24)."""

    points: tuple[float, ...]

    def __post_init__(self):
        pts = tuple(float(p) for p in self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) < 2:
            raise ValueError("grid needs at least two points")
        if any(not (0.0 <= p < 24.0) for p in pts):
            raise ValueError("grid points must lie in [0, 24)")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValueError("grid points must be strictly increasing")

    @property
    def m(self) -> int:
        return len(self.points)

    @classmethod
    def hourly(cls) -> "TimeGrid":
        return cls(tuple(float(h) for h in range(24)))

    @classmethod
    def two_hourly(cls) -> "TimeGrid":
        return cls(tuple(float(h) for h in range(0, 24, 2)))

    @classmethod
    def half_hourly(cls) -> "TimeGrid":
        return cls(tuple(h / 2.0 for h in range(48)))


@dataclass(frozen=True)
class DailyCurve:
    """Load samples of one calendar day for one entity.

    Values are stored read-only. Negative samples are allowed (stations
    with embedded generation can export); finiteness is enforced.
    """

    date: dt.date
    values: np.ndarray
    entity_id: str

    def __post_init__(self):
        vals = _frozen_array(self.values)
        if vals.ndim != 1:
            raise ValueError("curve values must be a flat vector")
        if not np.all(np.isfinite(vals)):
            raise ValueError(f"{self.entity_id} {self.date}: non-finite sample")
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class CurveSet:
    """Date-ordered curves of one entity on a common grid.

    ``scale`` is the kW value of one stored unit: ``None`` for raw data,
    the training-period maximum after :func:`normalize_by_max`.
    """

    grid: TimeGrid
    curves: tuple[DailyCurve, ...]
    scale: float | None = None

    def __post_init__(self):
        curves = tuple(sorted(self.curves, key=lambda c: c.date))
        object.__setattr__(self, "curves", curves)
        m = self.grid.m
        seen: set[dt.date] = set()
        for c in curves:
            if c.values.shape != (m,):
                raise ValueError(
                    f"{c.entity_id} {c.date}: {c.values.shape[0]} samples, grid has {m}"
                )
            if c.date in seen:
                raise ValueError(f"duplicate date {c.date}")
            seen.add(c.date)
        if len({c.entity_id for c in curves}) > 1:
            raise ValueError("curves of a set must belong to one entity")
        if self.scale is not None and not self.scale > 0:
            raise ValueError("scale factor must be positive")

    @property
    def n(self) -> int:
        return len(self.curves)

    @property
    def entity_id(self) -> str | None:
        return self.curves[0].entity_id if self.curves else None

    @property
    def dates(self) -> tuple[dt.date, ...]:
        return tuple(c.date for c in self.curves)

    def matrix(self) -> np.ndarray:
        """All curves stacked as an n-by-m array (copy, writable)."""
        if not self.curves:
            return np.empty((0, self.grid.m))
        return np.array([c.values for c in self.curves])

    def restrict(self, first: dt.date, last: dt.date) -> "CurveSet":
        """Sub-set of curves with ``first <= date <= last``."""
        kept = tuple(c for c in self.curves if first <= c.date <= last)
        return replace(self, curves=kept)


def normalize_by_max(cs: CurveSet) -> CurveSet:
    """Divide every sample by the global maximum over the whole set.

    The maximum is recorded as the set's scale factor, so a later
    :func:`denormalize` restores the original units exactly. Already
    normalized sets compose their factors.
    """
    if cs.n == 0:
        raise EmptySetError("cannot normalize an empty curve set")
    peak = float(max(c.values.max() for c in cs.curves))
    if peak <= 0.0:
        raise ZeroScaleError(f"global maximum is {peak}, expected > 0")
    curves = tuple(
        replace(c, values=c.values / peak) for c in cs.curves
    )
    scale = (cs.scale if cs.scale is not None else 1.0) * peak
    return CurveSet(cs.grid, curves, scale=scale)


def denormalize(cs: CurveSet) -> CurveSet:
    """Restore kW units by multiplying with the recorded scale factor."""
    if cs.scale is None:
        raise NotNormalizedError("curve set carries no scale factor")
    curves = tuple(replace(c, values=c.values * cs.scale) for c in cs.curves)
    return CurveSet(cs.grid, curves, scale=None)
