"""Batch command-line front end.

Subcommands: ingest, fit, predict, evaluate, scores-report. Exit codes:
0 success, 1 usage/config error, 2 data error, 3 numerical failure.
Outputs are plain CSV/JSON files and are byte-identical across repeated
runs on identical inputs.
"""

from __future__ import annotations

import argparse
import datetime as dt
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import dataio
from .config import RunConfig, grid_from_name, load_config, parse_date_range
from .curves import CurveSet, denormalize, normalize_by_max
from .errors import (
    ConfigError,
    DataError,
    InsufficientDataError,
    LoadFpcaError,
    MisalignedSeriesError,
    NumericalError,
    ZeroVarianceError,
)
from .fpca import fit as fpca_fit
from .fpca import theta_table
from .metrics import (
    energy_percent_error,
    mae,
    mape,
    nmse,
    ppmcc,
    rep,
    total_energy_deviation,
)
from .modelio import ModelBundle, load_model, save_model
from .pipeline import (
    DropRecord,
    aggregate_spatial,
    average_weather,
    build_day_descriptors,
    classify_population,
    contract_characteristic_series,
    daily_weather,
    entity_is_stable,
    filter_days,
    resample_to_grid,
)
from .regress import forecast_curves, stepwise_select

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    """argparse variant that reports usage problems via ConfigError."""

    def error(self, message):
        raise ConfigError(message)


def _warn(message: str) -> None:
    print(f"warning: {message}", file=sys.stderr)


def _date_span(first: dt.date, last: dt.date) -> list[dt.date]:
    out = []
    day = first
    while day <= last:
        out.append(day)
        day += dt.timedelta(days=1)
    return out


def _load_events(cfg: RunConfig) -> dict:
    if cfg.events is None:
        return {}
    return dataio.read_events(cfg.events)


# -- ingest ---------------------------------------------------------------

def _ingest_eunite(cfg: RunConfig) -> tuple[dict[str, CurveSet], list[DropRecord]]:
    if cfg.grid == "hourly":
        raise ConfigError("eunite input is half-hourly; use grid 'half-hourly' or 'two-hourly'")
    if not cfg.eunite_files:
        raise ConfigError("input.eunite_files is required for kind 'eunite'")
    curves = []
    drops: list[DropRecord] = []
    grid = None
    for path in cfg.eunite_files:
        cs, issues = dataio.read_eunite_csv(path, two_hourly=cfg.grid == "two-hourly")
        grid = cs.grid
        curves.extend(cs.curves)
        for issue in issues:
            day = dt.date.fromisoformat(issue.split(":")[0])
            drops.append(DropRecord("eunite", "day", day, "incomplete_day", issue))
    try:
        sets = {"eunite": CurveSet(grid, tuple(curves))} if curves else {}
    except ValueError as exc:  # e.g. the same date appearing in two files
        raise DataError(f"eunite input files are inconsistent: {exc}") from None
    return sets, drops


def _ingest_measurements(cfg: RunConfig) -> tuple[dict[str, CurveSet], list[DropRecord]]:
    if cfg.measurements is None:
        raise ConfigError("input.measurements is required for kind 'measurements'")
    records = dataio.read_measurements(cfg.measurements)
    grid = cfg.grid_object()

    snapshots_by_entity: dict[str, list] = {}
    if cfg.contracts is not None:
        for snap in dataio.read_contracts(cfg.contracts):
            snapshots_by_entity.setdefault(snap.entity_id, []).append(snap)

    by_entity: dict[str, list] = {}
    for record in records:
        by_entity.setdefault(record.entity_id, []).append(record)

    sets: dict[str, CurveSet] = {}
    drops: list[DropRecord] = []
    for entity_id in sorted(by_entity):
        snaps = snapshots_by_entity.get(entity_id, [])
        if snaps and not cfg.skip_stability:
            series = contract_characteristic_series(snaps)
            if not entity_is_stable(series):
                drops.append(DropRecord(entity_id, "entity", None, "unstable_contract"))
                continue
        if snaps:
            population = classify_population(snaps[-1], cfg.population_rules)
            rule = next(
                (r for r in cfg.population_rules if r.name == population),
                cfg.population_rules[-1],
            )
        else:
            rule = cfg.population_rules[-1]

        result = resample_to_grid(by_entity[entity_id], grid)
        for ts in result.ambiguous:
            drops.append(DropRecord(
                entity_id, "record", ts.date(), "ambiguous_timestamp", ts.isoformat(sep=" ")
            ))
        for day, count in result.negative_samples.items():
            drops.append(DropRecord(
                entity_id, "record", day, "negative_samples", f"{count} readings below zero"
            ))
        outcome = filter_days(
            result.curves, result.completeness, grid, rule,
            incomplete_fraction=cfg.incomplete_fraction,
            corrupted_fraction=cfg.corrupted_fraction,
            min_days=cfg.min_days,
        )
        drops.extend(outcome.drops)
        if outcome.curveset is not None and outcome.curveset.n:
            sets[entity_id] = outcome.curveset

    if cfg.regions is not None and sets:
        region_of = dataio.read_regions(cfg.regions)
        for region, cs in aggregate_spatial(sets, region_of).items():
            sets[region] = cs
    return sets, drops


def cmd_ingest(cfg: RunConfig) -> int:
    outdir = cfg.output_dir
    outdir.mkdir(parents=True, exist_ok=True)
    if cfg.kind == "eunite":
        sets, drops = _ingest_eunite(cfg)
        grid = grid_from_name(cfg.grid)
    else:
        sets, drops = _ingest_measurements(cfg)
        grid = cfg.grid_object()

    if sets:
        grid = next(iter(sets.values())).grid
    dataio.write_curves(outdir / "curves.csv", sets, grid)
    dataio.write_drop_report(outdir / "drop_report.csv", drops)

    all_dates = sorted({d for cs in sets.values() for d in cs.dates})
    events = _load_events(cfg)
    if all_dates:
        origin = all_dates[0]
        if cfg.train_range is not None:
            origin = min(origin, cfg.train_range[0])
        descriptors = build_day_descriptors(all_dates, events, origin)
    else:
        descriptors = []
        _warn("no curves survived ingestion; outputs are empty")
    dataio.write_descriptors(outdir / "descriptors.csv", descriptors)

    if cfg.weather is not None:
        readings = dataio.read_weather(cfg.weather)
        city, _gaps = average_weather(readings)
        dataio.write_daily_weather(outdir / "weather_daily.csv", daily_weather(city))

    print(f"ingest: {len(sets)} entities, {sum(cs.n for cs in sets.values())} days, "
          f"{len(drops)} drop records -> {outdir}")
    return EXIT_OK


# -- fit --------------------------------------------------------------------

def _training_set(cfg: RunConfig) -> CurveSet:
    curves_path = cfg.curves or (cfg.output_dir / "curves.csv")
    sets = dataio.read_curves(curves_path)
    if not sets:
        raise DataError(f"{curves_path}: no curves")
    if cfg.entity is not None:
        if cfg.entity not in sets:
            raise DataError(f"entity {cfg.entity!r} not in {curves_path}; "
                            f"available: {sorted(sets)}")
        cs = sets[cfg.entity]
    elif len(sets) == 1:
        cs = next(iter(sets.values()))
    else:
        raise ConfigError(f"multiple entities in {curves_path}; pick one with "
                          f"--entity from {sorted(sets)}")
    if cfg.train_range is not None:
        cs = cs.restrict(*cfg.train_range)
    if cs.n < 2:
        raise InsufficientDataError(
            f"{cs.n} training curves in range; need at least 2"
        )
    return cs


def cmd_fit(cfg: RunConfig) -> int:
    cs = _training_set(cfg)
    outdir = cfg.output_dir
    outdir.mkdir(parents=True, exist_ok=True)

    p = cfg.components_fit
    if p > cs.grid.m:
        raise ConfigError(f"components_fit {p} exceeds grid size {cs.grid.m}")
    normalized = normalize_by_max(cs)
    model, scores = fpca_fit(normalized, p)

    events = _load_events(cfg)
    origin = cs.dates[0]
    descriptors = build_day_descriptors(cs.dates, events, origin)
    score_models = tuple(
        stepwise_select(descriptors, scores.column(k), component=k)
        for k in range(1, p + 1)
    )

    bundle = ModelBundle(
        fpca=model,
        score_models=score_models,
        entity_id=cs.entity_id,
        scale=normalized.scale,
        origin=origin,
        train_start=cs.dates[0],
        train_end=cs.dates[-1],
    )
    save_model(outdir / "model.json", bundle)

    table = theta_table(normalized)
    dataio.write_table(outdir / "theta.csv", ["components", "theta"],
                       [(int(row[0]), float(row[1])) for row in table])
    dataio.write_table(
        outdir / "scores.csv",
        ["date"] + [f"c{k}" for k in range(1, p + 1)],
        [[d.isoformat()] + [float(v) for v in row]
         for d, row in zip(scores.dates, scores.scores)],
    )

    theta1 = float(table[0, 1])
    thetap = float(table[min(p, table.shape[0]) - 1, 1])
    print(f"fit: entity {cs.entity_id}, {cs.n} days, {p} components; "
          f"theta(1)={theta1:.4f}, theta({p})={thetap:.4f} -> {outdir / 'model.json'}")
    for m in score_models:
        print(f"  component {m.component}: terms={','.join(m.terms) or 'intercept-only'} "
              f"aic={m.aic:.2f}")
    return EXIT_OK


# -- predict ------------------------------------------------------------------

def cmd_predict(cfg: RunConfig, model_path) -> int:
    bundle = load_model(model_path)
    if cfg.test_range is None:
        raise ConfigError("a test range is required to predict (set analysis.test_range "
                          "or pass --test-range)")
    outdir = cfg.output_dir
    outdir.mkdir(parents=True, exist_ok=True)

    events = _load_events(cfg)
    days = build_day_descriptors(_date_span(*cfg.test_range), events, bundle.origin)
    forecast = forecast_curves(
        bundle.fpca, bundle.score_models, days, cfg.components_forecast,
        scale=bundle.scale, entity_id=bundle.entity_id,
    )
    if forecast.scale is not None:
        forecast = denormalize(forecast)
    dataio.write_forecast(outdir / "forecast.csv", forecast)
    print(f"predict: {forecast.n} days x {forecast.grid.m} points with "
          f"K={cfg.components_forecast} -> {outdir / 'forecast.csv'}")
    return EXIT_OK


# -- evaluate ----------------------------------------------------------------

def _evaluation_frames(forecast_path, actual_path, entity: str | None):
    grid, predicted = dataio.read_forecast(forecast_path)
    sets = dataio.read_curves(actual_path, entity_id=entity)
    if not sets:
        raise DataError(f"{actual_path}: no actual curves"
                        + (f" for entity {entity!r}" if entity else ""))
    if len(sets) > 1:
        raise ConfigError(f"multiple entities in {actual_path}; pick one with --entity "
                          f"from {sorted(sets)}")
    actual = next(iter(sets.values()))
    if tuple(actual.grid.points) != tuple(grid.points):
        raise MisalignedSeriesError(
            f"forecast grid {grid.points} differs from actual grid {actual.grid.points}"
        )
    actual_by_date = {c.date: c.values for c in actual.curves}
    missing = sorted(d for d in predicted if d not in actual_by_date)
    if missing:
        raise MisalignedSeriesError(
            "no actual curve for forecast dates: "
            + ", ".join(d.isoformat() for d in missing)
        )
    dates = sorted(predicted)
    return grid, dates, predicted, actual_by_date


def cmd_evaluate(forecast_path, actual_path, outdir: Path, entity: str | None = None) -> int:
    _grid, dates, predicted, actual_by_date = _evaluation_frames(
        forecast_path, actual_path, entity
    )
    outdir.mkdir(parents=True, exist_ok=True)

    per_day = [(d, mape(actual_by_date[d], predicted[d])) for d in dates]
    dataio.write_table(outdir / "per_day_mape.csv", ["date", "mape"],
                       [(d.isoformat(), v) for d, v in per_day])

    x = np.concatenate([actual_by_date[d] for d in dates])
    y = np.concatenate([predicted[d] for d in dates])
    try:
        correlation = ppmcc(x, y)
    except ZeroVarianceError:
        correlation = None

    daily = np.array([v for _, v in per_day])
    best_idx = int(np.argmin(daily))
    summary = [
        ("mape", mape(x, y)),
        ("mape_daily_mean", float(daily.mean())),
        ("mae", mae(x, y)),
        ("nmse", nmse(x, y)),
        ("rep", rep(x, y)),
        ("ppmcc", correlation if correlation is not None else ""),
        ("n_days", len(dates)),
        ("best_day", dates[best_idx].isoformat()),
        ("best_day_mape", float(daily[best_idx])),
    ]
    dataio.write_table(outdir / "summary.csv", ["metric", "value"], summary)

    months = sorted({(d.year, d.month) for d in dates})
    rows = []
    for year, month in months:
        sel = [d for d in dates if (d.year, d.month) == (year, month)]
        xm = np.concatenate([actual_by_date[d] for d in sel])
        ym = np.concatenate([predicted[d] for d in sel])
        rows.append((year, month, xm.size,
                     energy_percent_error(xm, ym), total_energy_deviation(xm, ym)))
    dataio.write_table(
        outdir / "monthly_energy_error.csv",
        ["year", "month", "samples", "energy_percent_error", "total_energy_deviation"],
        rows,
    )

    printable = {k: v for k, v in summary}
    print("evaluate: mape={mape:.3f} mae={mae:.3f} nmse={nmse:.4f} rep={rep:.3f} "
          "ppmcc={pp} over {n} days (best day {best})".format(
              mape=printable["mape"], mae=printable["mae"], nmse=printable["nmse"],
              rep=printable["rep"],
              pp=f"{correlation:.4f}" if correlation is not None else "undefined",
              n=printable["n_days"], best=printable["best_day"]))
    return EXIT_OK


# -- scores-report -------------------------------------------------------------

def _quantiles(values: np.ndarray) -> tuple[float, float, float, float, float]:
    return (
        float(values.min()),
        float(np.quantile(values, 0.25)),
        float(np.quantile(values, 0.5)),
        float(np.quantile(values, 0.75)),
        float(values.max()),
    )


def cmd_scores_report(model_path, scores_path, descriptors_path,
                      weather_path, outdir: Path,
                      bin_temp: float = 2.5, bin_rh: float = 10.0) -> int:
    bundle = load_model(model_path)
    dates, scores = dataio.read_scores(scores_path)
    if scores.shape[1] != bundle.fpca.p:
        raise MisalignedSeriesError(
            f"scores file has {scores.shape[1]} components, model has {bundle.fpca.p}"
        )
    fields = dataio.read_descriptor_calendar(descriptors_path)
    missing = [d for d in dates if d not in fields]
    if missing:
        raise MisalignedSeriesError(
            "descriptors missing for dates: "
            + ", ".join(d.isoformat() for d in missing[:10])
        )
    outdir.mkdir(parents=True, exist_ok=True)
    p = scores.shape[1]

    rows = []
    for k in range(p):
        for dow in range(1, 8):
            sel = np.array([fields[d][0] == dow for d in dates])
            if sel.any():
                rows.append((k + 1, dow) + _quantiles(scores[sel, k]))
    dataio.write_table(outdir / "score_by_weekday.csv",
                       ["component", "day_of_week", "min", "q1", "median", "q3", "max"],
                       rows)

    rows = []
    for k in range(p):
        for month in range(1, 13):
            sel = np.array([fields[d][1] == month for d in dates])
            if sel.any():
                rows.append((k + 1, month) + _quantiles(scores[sel, k]))
    dataio.write_table(outdir / "score_by_month.csv",
                       ["component", "month", "min", "q1", "median", "q3", "max"],
                       rows)

    if weather_path is not None:
        weather = dataio.read_daily_weather(weather_path)
        usable = [i for i, d in enumerate(dates)
                  if d in weather
                  and weather[d].get("temp_c") is not None
                  and weather[d].get("rh_pct") is not None]
        rows = []
        if usable:
            temps = np.array([weather[dates[i]]["temp_c"] for i in usable])
            rhs = np.array([weather[dates[i]]["rh_pct"] for i in usable])
            t0, r0 = float(temps.min()), float(rhs.min())
            t_bins = max(1, int(np.ceil((float(temps.max()) - t0) / bin_temp)) or 1)
            r_bins = max(1, int(np.ceil((float(rhs.max()) - r0) / bin_rh)) or 1)
            ti = np.minimum(((temps - t0) // bin_temp).astype(int), t_bins - 1)
            ri = np.minimum(((rhs - r0) // bin_rh).astype(int), r_bins - 1)
            for k in range(p):
                col = scores[usable, k]
                for a in range(t_bins):
                    for b in range(r_bins):
                        sel = (ti == a) & (ri == b)
                        if sel.any():
                            rows.append((
                                k + 1,
                                t0 + a * bin_temp, t0 + (a + 1) * bin_temp,
                                r0 + b * bin_rh, r0 + (b + 1) * bin_rh,
                                float(col[sel].mean()), int(sel.sum()),
                            ))
        dataio.write_table(
            outdir / "score_weather_grid.csv",
            ["component", "temp_lo", "temp_hi", "rh_lo", "rh_hi", "mean_score", "count"],
            rows,
        )

    print(f"scores-report: {p} components over {len(dates)} days -> {outdir}")
    return EXIT_OK


# -- argument wiring -----------------------------------------------------------

def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", type=Path, help="TOML run configuration")
    sub.add_argument("--train-range", help="override: YYYY-MM-DD:YYYY-MM-DD")
    sub.add_argument("--test-range", help="override: YYYY-MM-DD:YYYY-MM-DD")
    sub.add_argument("--components", type=int, help="override component count")
    sub.add_argument("--grid", help="override grid: hourly|two-hourly|half-hourly")
    sub.add_argument("--output", type=Path, help="override output directory")
    sub.add_argument("--entity", help="entity to operate on")


def _resolve_config(args, components_field: str | None) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    overrides = {}
    if args.train_range:
        overrides["train_range"] = parse_date_range(args.train_range)
    if args.test_range:
        overrides["test_range"] = parse_date_range(args.test_range)
    if args.components is not None and components_field:
        overrides[components_field] = args.components
        if components_field == "components_fit":
            overrides["components_forecast"] = min(
                cfg.components_forecast, args.components
            )
    if args.grid:
        overrides["grid"] = args.grid
    if args.output:
        overrides["output_dir"] = args.output
    if args.entity:
        overrides["entity"] = args.entity
    return replace(cfg, **overrides).validate()


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="loadfpca",
                     description="Daily load curve decomposition and forecasting")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="clean raw inputs into curve files")
    _add_common(p_ingest)

    p_fit = sub.add_parser("fit", help="fit the component basis and score models")
    _add_common(p_fit)
    p_fit.add_argument("--curves", type=Path, help="cleaned curves file (default: <output>/curves.csv)")

    p_pred = sub.add_parser("predict", help="forecast daily curves for the test range")
    _add_common(p_pred)
    p_pred.add_argument("--model", type=Path, required=True, help="model file from fit")

    p_eval = sub.add_parser("evaluate", help="score a forecast against actual curves")
    _add_common(p_eval)
    p_eval.add_argument("--forecast", type=Path, required=True)
    p_eval.add_argument("--actual", type=Path, required=True)

    p_rep = sub.add_parser("scores-report",
                           help="score distribution tables by weekday/month/weather")
    _add_common(p_rep)
    p_rep.add_argument("--model", type=Path, required=True)
    p_rep.add_argument("--scores", type=Path, required=True)
    p_rep.add_argument("--descriptors", type=Path, required=True)
    p_rep.add_argument("--weather", type=Path)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "ingest":
        cfg = _resolve_config(args, None)
        return cmd_ingest(cfg)
    if args.command == "fit":
        cfg = _resolve_config(args, "components_fit")
        if args.curves:
            cfg = replace(cfg, curves=args.curves)
        return cmd_fit(cfg)
    if args.command == "predict":
        cfg = _resolve_config(args, "components_forecast")
        return cmd_predict(cfg, args.model)
    if args.command == "evaluate":
        cfg = _resolve_config(args, None)
        return cmd_evaluate(args.forecast, args.actual, cfg.output_dir, cfg.entity)
    if args.command == "scores-report":
        cfg = _resolve_config(args, None)
        return cmd_scores_report(args.model, args.scores, args.descriptors,
                                 args.weather, cfg.output_dir,
                                 bin_temp=cfg.weather_bin_temp,
                                 bin_rh=cfg.weather_bin_rh)
    raise ConfigError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    try:
        return run(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename or exc}", file=sys.stderr)
        return EXIT_DATA
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except LoadFpcaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
