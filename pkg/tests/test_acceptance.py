"""Acceptance suite.

One test (or test group) per criterion, each printing a PASS line:

 1. EUNITE benchmark: train 1997, forecast 1998 with K=4, indices within
    tolerance (MAPE <= 6.0, MAE <= 36, NMSE <= 0.2, REP <= 7.0,
    PPMCC >= 0.90) and strictly better than the SVP+SVB reference row
    (7.0 / 43.0 / 0.5 / 8.7 / 0.88) on at least four of five indices.
 2. EUNITE explained variability: theta(1) > 0.93 and theta(4) > 0.99.
 3. EUNITE component-1 model contains the month and day-of-week blocks.
 4. Component-analysis property suite on 200 randomized small instances.
 5. Regression oracle suite: OLS vs normal equations (100 instances),
    stepwise vs exhaustive subset search (50 series), planted weekday
    recovery.
 6. Metric fixtures evaluate exactly (1e-12), including the m=2 energy
    percentage error fixture with its leading 1/m factor.
 7. Pipeline fixtures (stability/filter/corruption/clock-change
    boundaries) plus a synthetic three-substation end-to-end run with
    yearly MAPE < 15% and byte-identical repeated forecasts.

Criteria 1-3 need the EUNITE competition load files, which cannot be
redistributed with this repository. Point EUNITE_DATA_DIR at a directory
holding load_1997.csv and load_1998.csv (wide layout: a `date` or
`year,month,day` prefix plus 48 half-hourly columns; see README), or
place them under data/eunite/. Without them those three tests skip.
"""

import datetime as dt
import os
from pathlib import Path

import numpy as np
import pytest

from loadfpca import (
    fit,
    energy_percent_error,
    explained_variability,
    mae,
    mape,
    nmse,
    normalize_by_max,
    ols_fit,
    ppmcc,
    rep,
    reconstruct,
    stepwise_select,
)
from loadfpca.cli import main
from loadfpca.dataio import read_curves, read_eunite_csv
from loadfpca.fpca import covariance
from loadfpca.modelio import load_model
from loadfpca.pipeline import build_day_descriptors
from loadfpca.synthetic import write_synthetic_dataset

from conftest import make_set
from oracles import exhaustive_min_aic, jacobi_eigh, normal_equations_ols

EUNITE_DIR = Path(
    os.environ.get("EUNITE_DATA_DIR",
                   Path(__file__).resolve().parents[1] / "data" / "eunite")
)
EUNITE_FILES = (EUNITE_DIR / "load_1997.csv", EUNITE_DIR / "load_1998.csv")

needs_eunite = pytest.mark.skipif(
    not all(p.exists() for p in EUNITE_FILES),
    reason=(
        "EUNITE competition files not found; set EUNITE_DATA_DIR or place "
        "load_1997.csv and load_1998.csv under data/eunite/ (see README)"
    ),
)

# Table row the forecast must beat on at least four of five indices.
SVP_SVB = {"mae": 43.0, "mape": 7.0, "nmse": 0.5, "rep": 8.7, "ppmcc": 0.88}


@pytest.fixture(scope="module")
def eunite_run(tmp_path_factory):
    """Full CLI run on the real competition data: ingest/fit/predict/evaluate."""
    outdir = tmp_path_factory.mktemp("eunite")
    config = outdir / "run.toml"
    config.write_text(f"""
[input]
kind = "eunite"
eunite_files = ["{EUNITE_FILES[0]}", "{EUNITE_FILES[1]}"]

[analysis]
grid = "two-hourly"
train_range = ["1997-01-01", "1997-12-31"]
test_range = ["1998-01-01", "1998-12-31"]
components_fit = 8
components_forecast = 4
output_dir = "{outdir / 'out'}"
""")
    assert main(["ingest", "--config", str(config)]) == 0
    assert main(["fit", "--config", str(config)]) == 0
    assert main(["predict", "--config", str(config),
                 "--model", str(outdir / "out" / "model.json")]) == 0
    assert main(["evaluate", "--config", str(config),
                 "--forecast", str(outdir / "out" / "forecast.csv"),
                 "--actual", str(outdir / "out" / "curves.csv")]) == 0
    return outdir / "out"


@needs_eunite
class TestCriterion1EuniteBenchmark:
    def test_table_indices_within_tolerance(self, eunite_run):
        summary = dict(
            line.split(",", 1)
            for line in (eunite_run / "summary.csv").read_text().splitlines()[1:]
        )
        got = {k: float(summary[k]) for k in ("mape", "mae", "nmse", "rep", "ppmcc")}

        assert got["mape"] <= 6.0, got
        assert got["mae"] <= 36.0, got
        assert got["nmse"] <= 0.2, got
        assert got["rep"] <= 7.0, got
        assert got["ppmcc"] >= 0.90, got

        beats = sum([
            got["mape"] < SVP_SVB["mape"],
            got["mae"] < SVP_SVB["mae"],
            got["nmse"] < SVP_SVB["nmse"],
            got["rep"] < SVP_SVB["rep"],
            got["ppmcc"] > SVP_SVB["ppmcc"],
        ])
        assert beats >= 4, (got, SVP_SVB)
        print(f"\n[acceptance] criterion 1 (EUNITE benchmark {got}): PASS")


@needs_eunite
class TestCriterion2ExplainedVariability:
    def test_theta_thresholds(self):
        cs, _ = read_eunite_csv(EUNITE_FILES[0], two_hourly=True)
        model, _ = fit(normalize_by_max(cs), 4)
        theta1 = explained_variability(model, 1)
        theta4 = explained_variability(model, 4)
        assert theta1 > 0.93, theta1
        assert theta4 > 0.99, theta4
        print(f"\n[acceptance] criterion 2 (theta(1)={theta1:.4f}, "
              f"theta(4)={theta4:.4f}): PASS")


@needs_eunite
class TestCriterion3SelectedModel:
    def test_component_one_contains_month_and_weekday(self, eunite_run):
        bundle = load_model(eunite_run / "model.json")
        terms = set(bundle.score_models[0].terms)
        assert {"month", "day_of_week"} <= terms, terms
        print(f"\n[acceptance] criterion 3 (component-1 terms {sorted(terms)}): PASS")


class TestCriterion4FpcaProperties:
    def test_two_hundred_randomized_instances(self):
        rng = np.random.default_rng(20260810)
        oracle_checked = 0
        for trial in range(200):
            m = int(rng.integers(2, 9))
            n = int(rng.integers(2, 21))
            cs = make_set(rng.uniform(0.5, 10.0, size=(n, m)))
            model, scores = fit(cs, m)

            gram = model.components @ model.components.T
            assert np.abs(gram - np.eye(m)).max() <= 1e-8

            s = covariance(cs)
            lead = max(float(model.eigenvalues[0]), 1e-30)
            for k in range(m):
                resid = s @ model.components[k] - model.eigenvalues[k] * model.components[k]
                assert np.linalg.norm(resid) <= 1e-6 * lead

            if n >= 2:
                var = scores.scores.var(axis=0, ddof=1)
                for k in range(m):
                    if model.eigenvalues[k] > 1e-12 * lead:
                        assert abs(var[k] - model.eigenvalues[k]) <= 1e-6 * model.eigenvalues[k]

            thetas = [explained_variability(model, p) for p in range(1, m + 1)]
            assert all(b >= a - 1e-12 for a, b in zip(thetas, thetas[1:]))
            assert abs(thetas[-1] - 1.0) <= 1e-10

            x = cs.matrix()
            for i in range(n):
                rec = reconstruct(model, scores.scores[i])
                assert np.abs(rec - x[i]).max() <= 1e-8

            if m <= 4:
                oracle_checked += 1
                evals, evecs = jacobi_eigh(s)
                evals = np.where(evals < 0.0, 0.0, evals)
                assert np.abs(model.eigenvalues - evals).max() <= 1e-8
                gaps_ok = np.all(np.abs(np.diff(evals)) > 1e-6)
                if gaps_ok:
                    for k in range(m):
                        assert np.abs(model.components[k] - evecs[:, k]).max() <= 1e-8
        assert oracle_checked >= 30
        print(f"\n[acceptance] criterion 4 (200 instances, {oracle_checked} "
              "oracle-checked): PASS")


class TestCriterion5RegressionOracles:
    def test_ols_matches_normal_equations(self):
        rng = np.random.default_rng(4242)
        for _ in range(100):
            q = int(rng.integers(1, 5))
            n = int(rng.integers(q + 1, 11))
            x = np.column_stack([np.ones(n), rng.normal(size=(n, q - 1))]) if q > 1 \
                else np.ones((n, 1))
            y = rng.normal(size=n)
            beta, rss = ols_fit(x, y)
            beta_o, rss_o = normal_equations_ols(x, y)
            assert np.abs(beta - beta_o).max() <= 1e-8
            assert abs(rss - rss_o) <= 1e-8
        print("\n[acceptance] criterion 5a (100 OLS instances vs normal equations): PASS")

    def test_stepwise_attains_exhaustive_minimum(self):
        rng = np.random.default_rng(777)
        pools = [
            ("calendar_time", "month", "day_of_week"),
            ("month", "day_of_month", "day_of_week"),
            ("calendar_time", "day_of_month", "day_of_week"),
            ("month", "day_of_month", "day_of_week", "day_of_month:month"),
            ("calendar_time", "month", "day_of_month", "day_of_month:month"),
        ]
        dates = [dt.date(2019, 1, 1) + dt.timedelta(days=i) for i in range(90)]
        days = build_day_descriptors(dates, {}, dates[0])
        for trial in range(50):
            pool = pools[trial % len(pools)]
            y = rng.standard_normal(len(days))
            if trial % 3 == 0:  # occasionally plant real structure
                y = y + 2.0 * np.array([d.day_of_week for d in days])
            chosen = stepwise_select(days, y, pool)
            assert chosen.aic <= exhaustive_min_aic(days, y, pool) + 1e-9
        print("\n[acceptance] criterion 5b (50 stepwise runs vs exhaustive search): PASS")

    def test_planted_weekday_effect_recovery(self):
        rng = np.random.default_rng(99)
        dates = [dt.date(2019, 1, 7) + dt.timedelta(days=i) for i in range(140)]
        days = build_day_descriptors(dates, {}, dates[0])
        effect = {1: 0.0, 2: 1.2, 3: -0.8, 4: 0.4, 5: 2.1, 6: -1.5, 7: 1.0}
        y = np.array([effect[d.day_of_week] for d in days])
        y = y + 1e-6 * rng.standard_normal(len(days))
        model = stepwise_select(days, y, ("calendar_time", "month", "day_of_week"))
        assert "day_of_week" in model.terms
        print("\n[acceptance] criterion 5c (planted weekday recovery): PASS")


class TestCriterion6MetricFixtures:
    def test_all_derived_examples_exact(self):
        assert abs(mape([100.0, 100.0], [90.0, 110.0]) - 10.0) <= 1e-12
        assert abs(mape([50.0], [75.0]) - 50.0) <= 1e-12
        assert abs(energy_percent_error([100.0, 100.0], [80.0, 100.0]) - 5.0) <= 1e-12
        assert abs(mae([1.0, 3.0], [2.0, 5.0]) - 1.5) <= 1e-12
        assert abs(rep([3.0, 4.0], [0.0, 0.0]) - 100.0) <= 1e-12
        x = np.array([1.0, 5.0, 3.0, 7.0])
        assert abs(nmse(x, np.full(4, x.mean())) - 1.0) <= 1e-12
        assert abs(ppmcc(x, 2.0 * x + 5.0) - 1.0) <= 1e-12
        print("\n[acceptance] criterion 6 (metric fixtures exact at 1e-12): PASS")


@pytest.fixture(scope="module")
def synthetic_run(tmp_path_factory):
    """Three synthetic substations through the whole CLI chain."""
    root = tmp_path_factory.mktemp("synthetic")
    data = write_synthetic_dataset(root / "data")
    outdir = root / "out"
    config = root / "run.toml"
    config.write_text(f"""
[input]
kind = "measurements"
measurements = "{data['measurements']}"
contracts = "{data['contracts']}"
weather = "{data['weather']}"
events = "{data['events']}"
regions = "{data['regions']}"

[analysis]
grid = "hourly"
train_range = ["2014-01-01", "2015-12-31"]
test_range = ["2016-01-01", "2016-12-31"]
components_fit = 6
components_forecast = 4
output_dir = "{outdir}"
""")
    assert main(["ingest", "--config", str(config)]) == 0
    return config, outdir


class TestCriterion7Pipeline:
    def test_boundary_fixtures(self):
        from loadfpca import DailyCurve, TimeGrid
        from loadfpca.pipeline import (
            MeasurementRecord,
            PopulationRule,
            filter_days,
            resample_to_grid,
            stability_check,
        )

        # stability criterion boundary
        assert stability_check([100.0, 109.0]) is True
        assert stability_check([100.0, 112.0]) is False
        assert stability_check([50.0, 50.0]) is True

        grid = TimeGrid.hourly()
        res = PopulationRule("RES", "any_zero_sample")
        plt = PopulationRule("PLT", "all_day_zero")

        def curves(n, rows=None):
            out = []
            for i in range(n):
                values = np.ones(24) if rows is None or i not in rows else rows[i]
                out.append(DailyCurve(dt.date(2015, 1, 1) + dt.timedelta(days=i),
                                      values, "E"))
            return out

        def complete(cs, incomplete=()):
            comp = {c.date: 24 for c in cs}
            for d in incomplete:
                comp[d] = 20
            return comp

        # 20% incomplete-day boundary over a 10-day span
        ten = curves(8)
        two = [dt.date(2015, 1, 9), dt.date(2015, 1, 10)]
        assert filter_days(ten, complete(ten, two), grid, res,
                           min_days=1).curveset is not None
        seven = curves(7)
        three = [dt.date(2015, 1, 8)] + two
        assert filter_days(seven, complete(seven, three), grid, res,
                           min_days=1).curveset is None

        # 10% corrupted-day boundary
        one_bad = curves(10, {4: np.r_[0.0, np.ones(23)]})
        assert filter_days(one_bad, complete(one_bad), grid, res,
                           min_days=1).curveset.n == 9
        two_bad = curves(10, {4: np.r_[0.0, np.ones(23)],
                              7: np.r_[np.ones(23), 0.0]})
        assert filter_days(two_bad, complete(two_bad), grid, res,
                           min_days=1).curveset is None

        # 1095-surviving-day boundary
        assert filter_days(curves(1095), complete(curves(1095)), grid,
                           res).curveset is not None
        assert filter_days(curves(1094), complete(curves(1094)), grid,
                           res).curveset is None

        # RES: one mid-day zero corrupts the day; PLT: only a whole-zero day does
        midday_zero = np.ones(24)
        midday_zero[12] = 0.0
        daytime_dark = np.ones(24)
        daytime_dark[8:18] = 0.0
        mixed = curves(10, {3: midday_zero})
        assert mixed[3].date not in filter_days(
            mixed, complete(mixed), grid, res, min_days=1).curveset.dates
        plt_curves = curves(10, {3: daytime_dark, 5: np.zeros(24)})
        surviving = filter_days(plt_curves, complete(plt_curves), grid, plt,
                                min_days=1).curveset.dates
        assert plt_curves[3].date in surviving
        assert plt_curves[5].date not in surviving

        # spring-forward day: 23 covered slots, flagged incomplete
        records = [
            MeasurementRecord("E", dt.datetime(2015, 3, 29, h, 0), 1.0)
            for h in range(24)
            if h != 2
        ]
        resampled = resample_to_grid(records, grid)
        assert resampled.completeness[dt.date(2015, 3, 29)] == 23
        assert not resampled.curves

        print("\n[acceptance] criterion 7a (stability/filter/corruption/"
              "clock-change fixtures): PASS")

    def test_synthetic_end_to_end_accuracy(self, synthetic_run):
        config, outdir = synthetic_run
        sets = read_curves(outdir / "curves.csv")
        assert {"S01", "S02", "S03", "N01", "N02"} <= set(sets)
        assert all(sets[e].n == 1096 for e in ("S01", "S02", "S03"))

        yearly = {}
        for entity in ("S01", "S02", "S03"):
            subdir = outdir / entity
            assert main(["fit", "--config", str(config), "--entity", entity,
                         "--curves", str(outdir / "curves.csv"),
                         "--output", str(subdir)]) == 0
            assert main(["predict", "--config", str(config),
                         "--model", str(subdir / "model.json"),
                         "--output", str(subdir)]) == 0
            assert main(["evaluate", "--config", str(config),
                         "--forecast", str(subdir / "forecast.csv"),
                         "--actual", str(outdir / "curves.csv"),
                         "--entity", entity,
                         "--output", str(subdir)]) == 0
            summary = dict(
                line.split(",", 1)
                for line in (subdir / "summary.csv").read_text().splitlines()[1:]
            )
            yearly[entity] = float(summary["mape"])
            assert yearly[entity] < 15.0, yearly
            assert float(summary["mape_daily_mean"]) < 15.0, summary

        print(f"\n[acceptance] criterion 7b (synthetic yearly MAPE {yearly}): PASS")

    def test_forecast_determinism_across_repeated_runs(self, synthetic_run):
        config, outdir = synthetic_run
        subdir = outdir / "S01"
        first = (subdir / "forecast.csv").read_bytes()
        assert main(["predict", "--config", str(config),
                     "--model", str(subdir / "model.json"),
                     "--output", str(subdir)]) == 0
        assert first == (subdir / "forecast.csv").read_bytes()
        print("\n[acceptance] criterion 7c (forecast determinism): PASS")
