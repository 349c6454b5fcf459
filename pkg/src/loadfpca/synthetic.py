"""Synthetic substation data with planted calendar structure.

Three entities with different daily shapes, seasonal and day-of-week
modulation, a small event effect, plus multiplicative noise. Used by the
end-to-end tests and by ``scripts/make_synthetic_data.py`` to exercise
the full ingest/fit/predict/evaluate chain without proprietary data.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataio import fmt

_HOURS = np.arange(24, dtype=float)


@dataclass(frozen=True)
class _Entity:
    entity_id: str
    scale_kw: float
    base: np.ndarray          # 24-point daily shape
    season_amp: float         # cosine amplitude over the year (winter high)
    dow_add: tuple[float, ...]  # Monday..Sunday additive factors
    weekend_bump: float       # extra evening shape on Sat/Sun
    expo_gain: float
    frac_res: float
    frac_plt: float


def _shape(*bumps: tuple[float, float, float], floor: float = 0.3) -> np.ndarray:
    out = np.full(24, floor)
    for center, width, height in bumps:
        out = out + height * np.exp(-((_HOURS - center) ** 2) / width)
    return out


_ENTITIES = (
    _Entity("S01", 450.0, _shape((12.5, 8.0, 0.35), (20.5, 5.0, 0.5), floor=0.45),
            0.18, (-0.03, -0.03, -0.03, -0.03, -0.02, 0.06, 0.08), 0.10, 0.0,
            frac_res=0.97, frac_plt=0.01),
    _Entity("S02", 900.0, _shape((14.0, 40.0, 0.6)),
            0.12, (0.08, 0.08, 0.08, 0.08, 0.06, -0.10, -0.15), -0.05, 0.0,
            frac_res=0.03, frac_plt=0.01),
    _Entity("S03", 700.0, _shape((11.0, 15.0, 0.4), (19.5, 8.0, 0.3), floor=0.4),
            0.15, (0.02, 0.02, 0.02, 0.02, 0.01, -0.02, -0.04), 0.04, 0.03,
            frac_res=0.50, frac_plt=0.02),
)

_EVENTS = (
    ("expo", dt.date(2015, 5, 1), dt.date(2015, 10, 31)),
    ("fashion_week", dt.date(2014, 2, 18), dt.date(2014, 2, 24)),
    ("fashion_week", dt.date(2015, 2, 24), dt.date(2015, 3, 2)),
    ("fashion_week", dt.date(2016, 2, 23), dt.date(2016, 2, 29)),
    ("design_festival", dt.date(2014, 4, 8), dt.date(2014, 4, 13)),
    ("design_festival", dt.date(2015, 4, 14), dt.date(2015, 4, 19)),
    ("design_festival", dt.date(2016, 4, 12), dt.date(2016, 4, 17)),
)

_REGIONS = {"S01": "N01", "S02": "N01", "S03": "N02"}


def daily_curve_kw(entity: _Entity, day: dt.date, rng: np.random.Generator,
                   noise: float = 0.02) -> np.ndarray:
    """One day of hourly load in kW for a synthetic entity."""
    season = entity.season_amp * np.cos(2.0 * np.pi * (day.timetuple().tm_yday - 15) / 365.25)
    dow = entity.dow_add[day.isoweekday() - 1]
    level = 1.0 + season + dow
    values = entity.base * level
    if day.isoweekday() >= 6:
        values = values + entity.weekend_bump * np.exp(-((_HOURS - 21.0) ** 2) / 6.0)
    if entity.expo_gain and _in_event("expo", day):
        values = values * (1.0 + entity.expo_gain)
    wobble = 1.0 + noise * rng.standard_normal(24)
    values = entity.scale_kw * values * np.clip(wobble, 0.7, 1.3)
    return np.maximum(values, 0.5)  # keep strictly positive: zero readings mean corruption


def _in_event(name: str, day: dt.date) -> bool:
    return any(n == name and start <= day <= end for n, start, end in _EVENTS)


def _dates(start: dt.date, end: dt.date):
    day = start
    while day <= end:
        yield day
        day += dt.timedelta(days=1)


def write_synthetic_dataset(outdir, *, start: dt.date = dt.date(2014, 1, 1),
                            end: dt.date = dt.date(2016, 12, 31),
                            seed: int = 20140101, noise: float = 0.02) -> dict[str, Path]:
    """Write measurements/contracts/weather/events/regions CSVs.

    Deterministic for a given seed. Returns the file paths by role.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    paths = {
        "measurements": outdir / "measurements.csv",
        "contracts": outdir / "contracts.csv",
        "weather": outdir / "weather.csv",
        "events": outdir / "events.csv",
        "regions": outdir / "regions.csv",
    }

    with paths["measurements"].open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["entity_id", "timestamp", "power_kw"])
        for entity in _ENTITIES:
            for day in _dates(start, end):
                values = daily_curve_kw(entity, day, rng, noise)
                for hour in range(24):
                    ts = dt.datetime.combine(day, dt.time(hour))
                    writer.writerow([entity.entity_id, ts.isoformat(sep=" "), fmt(values[hour])])

    with paths["contracts"].open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["entity_id", "start_date", "end_date", "contract_kw",
                         "frac_res", "frac_plt", "gen_kw", "frac_pv"])
        for entity in _ENTITIES:
            for year in range(start.year, end.year + 1):
                jitter = 1.0 + 0.01 * float(rng.uniform(-1.0, 1.0))
                writer.writerow([
                    entity.entity_id, f"{year}-01-01", f"{year}-12-31",
                    fmt(entity.scale_kw * 1.4 * jitter),
                    fmt(entity.frac_res), fmt(entity.frac_plt), fmt(0.0), fmt(0.0),
                ])

    with paths["weather"].open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["station_id", "timestamp", "temp_c", "rh_pct",
                         "radiation", "rainfall", "wind"])
        for station, offset in (("W1", -0.5), ("W2", 0.5)):
            for day in _dates(start, end):
                doy = day.timetuple().tm_yday
                for hour in range(0, 24, 3):
                    temp = (13.0 - 10.0 * np.cos(2.0 * np.pi * (doy - 15) / 365.25)
                            + 4.0 * np.sin(2.0 * np.pi * (hour - 9) / 24.0)
                            + offset + 1.5 * float(rng.standard_normal()))
                    rh = 70.0 - 0.8 * (temp - 13.0) + 5.0 * float(rng.standard_normal())
                    rh = min(max(rh, 5.0), 100.0)
                    ts = dt.datetime.combine(day, dt.time(hour))
                    writer.writerow([station, ts.isoformat(sep=" "),
                                     fmt(temp), fmt(rh), "", "", ""])

    with paths["events"].open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["event_name", "start_date", "end_date"])
        for name, first, last in _EVENTS:
            writer.writerow([name, first.isoformat(), last.isoformat()])

    with paths["regions"].open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["entity_id", "region"])
        for entity_id, region in sorted(_REGIONS.items()):
            writer.writerow([entity_id, region])

    return paths
