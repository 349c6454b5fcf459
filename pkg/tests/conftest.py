import datetime as dt

import numpy as np
import pytest

from loadfpca import CurveSet, DailyCurve, TimeGrid


def make_set(rows, entity_id="E", start=dt.date(2020, 1, 1), scale=None) -> CurveSet:
    """Curve set from a list of per-day value lists on consecutive dates."""
    rows = [np.asarray(r, dtype=float) for r in rows]
    grid = TimeGrid(tuple(float(j) for j in range(len(rows[0]))))
    curves = tuple(
        DailyCurve(start + dt.timedelta(days=i), row, entity_id)
        for i, row in enumerate(rows)
    )
    return CurveSet(grid, curves, scale=scale)


def random_set(rng, n, m, lo=0.5, hi=10.0) -> CurveSet:
    return make_set(rng.uniform(lo, hi, size=(n, m)))


@pytest.fixture
def rng():
    return np.random.default_rng(42)
