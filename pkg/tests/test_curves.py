import datetime as dt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loadfpca import CurveSet, DailyCurve, TimeGrid, denormalize, normalize_by_max
from loadfpca.errors import EmptySetError, NotNormalizedError, ZeroScaleError

from conftest import make_set


class TestTimeGrid:
    def test_hourly_has_24_points(self):
        grid = TimeGrid.hourly()
        assert grid.m == 24
        assert grid.points[0] == 0.0 and grid.points[-1] == 23.0

    def test_rejects_out_of_range_points(self):
        with pytest.raises(ValueError):
            TimeGrid((0.0, 24.0))
        with pytest.raises(ValueError):
            TimeGrid((-1.0, 5.0))

    def test_rejects_non_increasing(self):
        with pytest.raises(ValueError):
            TimeGrid((0.0, 2.0, 2.0))

    def test_rejects_single_point(self):
        with pytest.raises(ValueError):
            TimeGrid((0.0,))

    def test_non_uniform_spacing_allowed(self):
        assert TimeGrid((0.0, 1.0, 5.5, 23.9)).m == 4


class TestDailyCurve:
    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            DailyCurve(dt.date(2020, 1, 1), [1.0, np.nan], "E")

    def test_values_are_read_only(self):
        c = DailyCurve(dt.date(2020, 1, 1), [1.0, 2.0], "E")
        with pytest.raises(ValueError):
            c.values[0] = 9.0

    def test_negative_samples_accepted(self):
        c = DailyCurve(dt.date(2020, 1, 1), [-3.0, 2.0], "E")
        assert c.values[0] == -3.0


class TestCurveSet:
    def test_sorted_by_date(self):
        a = DailyCurve(dt.date(2020, 1, 2), [1.0, 1.0], "E")
        b = DailyCurve(dt.date(2020, 1, 1), [2.0, 2.0], "E")
        cs = CurveSet(TimeGrid((0.0, 1.0)), (a, b))
        assert cs.dates == (dt.date(2020, 1, 1), dt.date(2020, 1, 2))

    def test_rejects_duplicate_dates(self):
        a = DailyCurve(dt.date(2020, 1, 1), [1.0, 1.0], "E")
        with pytest.raises(ValueError, match="duplicate"):
            CurveSet(TimeGrid((0.0, 1.0)), (a, a))

    def test_rejects_mixed_entities(self):
        a = DailyCurve(dt.date(2020, 1, 1), [1.0, 1.0], "E1")
        b = DailyCurve(dt.date(2020, 1, 2), [1.0, 1.0], "E2")
        with pytest.raises(ValueError, match="one entity"):
            CurveSet(TimeGrid((0.0, 1.0)), (a, b))

    def test_rejects_wrong_length(self):
        a = DailyCurve(dt.date(2020, 1, 1), [1.0, 1.0, 1.0], "E")
        with pytest.raises(ValueError):
            CurveSet(TimeGrid((0.0, 1.0)), (a,))

    def test_restrict(self):
        cs = make_set([[1, 1], [2, 2], [3, 3]])
        sub = cs.restrict(dt.date(2020, 1, 2), dt.date(2020, 1, 3))
        assert sub.n == 2 and sub.dates[0] == dt.date(2020, 1, 2)


class TestNormalize:
    def test_direct_ratio(self):
        cs = make_set([[400.0, 800.0]])
        out = normalize_by_max(cs)
        assert out.curves[0].values[0] == 0.5
        assert out.scale == 800.0

    def test_constant_set_becomes_all_ones(self):
        cs = make_set([[7.0, 7.0], [7.0, 7.0]])
        out = normalize_by_max(cs)
        assert np.all(out.matrix() == 1.0)

    def test_two_curve_example(self):
        cs = make_set([[1, 2, 3, 4], [2, 4, 6, 8]])
        out = normalize_by_max(cs)
        assert out.scale == 8.0
        np.testing.assert_array_equal(out.matrix()[0], [0.125, 0.25, 0.375, 0.5])
        np.testing.assert_array_equal(out.matrix()[1], [0.25, 0.5, 0.75, 1.0])

    def test_max_is_exactly_one(self, rng):
        cs = make_set(rng.uniform(0.1, 500.0, size=(6, 5)))
        out = normalize_by_max(cs)
        assert out.matrix().max() == 1.0

    def test_empty_set(self):
        with pytest.raises(EmptySetError):
            normalize_by_max(CurveSet(TimeGrid((0.0, 1.0)), ()))

    def test_zero_scale(self):
        with pytest.raises(ZeroScaleError):
            normalize_by_max(make_set([[0.0, 0.0]]))

    def test_ordering_preserved(self, rng):
        cs = make_set(rng.uniform(0.1, 9.0, size=(5, 3)))
        out = normalize_by_max(cs)
        assert out.dates == cs.dates


class TestDenormalize:
    def test_direct_ratio(self):
        cs = make_set([[0.5, 1.0]], scale=800.0)
        out = denormalize(cs)
        assert out.curves[0].values[0] == 400.0
        assert out.scale is None

    def test_derived_example(self):
        cs = make_set([[0.125, 0.25, 0.375, 0.5], [0.25, 0.5, 0.75, 1.0]], scale=8.0)
        out = denormalize(cs)
        np.testing.assert_allclose(out.matrix(), [[1, 2, 3, 4], [2, 4, 6, 8]], rtol=1e-12)

    def test_requires_scale(self):
        with pytest.raises(NotNormalizedError):
            denormalize(make_set([[1.0, 2.0]]))

    @given(
        values=st.lists(
            st.lists(st.floats(min_value=1e-3, max_value=1e6), min_size=3, max_size=3),
            min_size=1,
            max_size=6,
        )
    )
    @settings(max_examples=60, deadline=None)
    def test_round_trip_within_1e12_relative(self, values):
        cs = make_set(values)
        back = denormalize(normalize_by_max(cs))
        np.testing.assert_allclose(back.matrix(), cs.matrix(), rtol=1e-12)

    def test_normalize_after_denormalize_restores_normalized_set(self):
        cs = normalize_by_max(make_set([[2.0, 4.0], [1.0, 3.0]]))
        back = normalize_by_max(denormalize(cs))
        np.testing.assert_allclose(back.matrix(), cs.matrix(), rtol=1e-12)
        assert back.scale == pytest.approx(cs.scale, rel=1e-12)

    def test_double_normalization_composes_scale(self):
        cs = make_set([[2.0, 4.0]])
        once = normalize_by_max(cs)
        twice = normalize_by_max(once)
        assert twice.scale == 4.0
        np.testing.assert_allclose(denormalize(twice).matrix(), cs.matrix(), rtol=1e-12)
