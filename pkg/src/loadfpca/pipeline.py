"""Raw-data cleaning: stability screening, resampling, day/entity filters,
spatial aggregation, weather averaging, and calendar descriptors.

Everything here works per entity so callers can parallelize; drop
decisions are returned as records rather than logged, and every dropped
record/day/entity appears exactly once with a machine-readable reason.
"""

from __future__ import annotations

import datetime as dt
from bisect import bisect_right
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .curves import CurveSet, DailyCurve, TimeGrid
from .errors import GridMismatchError, ZeroAverageError
from .regress import EVENT_NAMES, DayDescriptor

# The five contractual characteristics screened for stability.
STABILITY_CHARACTERISTICS = (
    "contract_kw",
    "frac_res",
    "frac_plt",
    "gen_kw",
    "frac_pv",
)

CORRUPTION_RULES = ("any_zero_sample", "all_day_zero", "none")


@dataclass(frozen=True)
class MeasurementRecord:
    """One average-power reading in local civil time."""

    entity_id: str
    timestamp: dt.datetime
    power_kw: float


@dataclass(frozen=True)
class ContractSnapshot:
    """Aggregated contract state of one entity over a validity window."""

    entity_id: str
    start: dt.date
    end: dt.date
    contract_kw: float
    frac_res: float
    frac_plt: float
    gen_kw: float
    frac_pv: float

    def __post_init__(self):
        if self.end < self.start:
            raise ValueError(f"{self.entity_id}: degenerate validity range")
        for name in ("frac_res", "frac_plt", "frac_pv"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{self.entity_id}: {name}={v} outside [0, 1]")


@dataclass(frozen=True)
class PopulationRule:
    """Named population with membership thresholds and a corruption rule.

    Conditions are (field, op, value) triples over ContractSnapshot
    aggregates, with op one of ge/le/gt/lt. An empty condition list
    matches everything (catch-all populations like MIX).
    """

    name: str
    corruption: str
    conditions: tuple[tuple[str, str, float], ...] = ()

    def __post_init__(self):
        if self.corruption not in CORRUPTION_RULES:
            raise ValueError(f"unknown corruption rule {self.corruption!r}")
        for fld, op, _ in self.conditions:
            if fld not in STABILITY_CHARACTERISTICS:
                raise ValueError(f"unknown contract field {fld!r}")
            if op not in ("ge", "le", "gt", "lt"):
                raise ValueError(f"unknown comparison {op!r}")

    def matches(self, snapshot: ContractSnapshot) -> bool:
        for fld, op, value in self.conditions:
            v = getattr(snapshot, fld)
            ok = {
                "ge": v >= value,
                "le": v <= value,
                "gt": v > value,
                "lt": v < value,
            }[op]
            if not ok:
                return False
        return True


def default_population_rules() -> tuple[PopulationRule, ...]:
    """Built-in population thresholds.

    These are documented defaults, not authoritative values; override
    them in the run configuration when the real selection windows are
    known.
    """
    return (
        PopulationRule("RES", "any_zero_sample", (("frac_res", "ge", 0.95),)),
        PopulationRule("PLT", "all_day_zero", (("frac_plt", "ge", 0.95),)),
        PopulationRule("PVG", "any_zero_sample",
                       (("frac_pv", "ge", 0.95), ("gen_kw", "gt", 0.0))),
        PopulationRule("NRS", "any_zero_sample",
                       (("frac_res", "le", 0.05), ("frac_plt", "le", 0.05))),
        PopulationRule("MIX", "any_zero_sample", ()),
    )


@dataclass(frozen=True)
class WeatherReading:
    """One station's observation; variables are individually optional."""

    station_id: str
    timestamp: dt.datetime
    temp_c: float | None = None
    rh_pct: float | None = None
    radiation: float | None = None
    rainfall: float | None = None
    wind: float | None = None

    def __post_init__(self):
        if self.rh_pct is not None and not 0.0 <= self.rh_pct <= 100.0:
            raise ValueError(f"relative humidity {self.rh_pct} outside [0, 100]")


WEATHER_VARIABLES = ("temp_c", "rh_pct", "radiation", "rainfall", "wind")


# -- stability ---------------------------------------------------------

def stability_check(series: Sequence[float]) -> bool:
    """True when the series range stays below 10% of its average."""
    x = np.asarray(series, dtype=float)
    if x.size == 0:
        raise ValueError("empty series")
    avg = float(x.mean())
    if avg == 0.0:
        raise ZeroAverageError("stability criterion undefined for zero-average series")
    return float(x.max() - x.min()) < 0.1 * avg


def entity_is_stable(characteristics: Mapping[str, Sequence[float]]) -> bool:
    """All characteristic series pass the stability criterion.

    A series that is identically zero (e.g. no generation ever
    registered) counts as stable; the range test is vacuous there.
    """
    for series in characteristics.values():
        x = np.asarray(series, dtype=float)
        if x.size and float(x.mean()) == 0.0:
            if float(x.max() - x.min()) == 0.0:
                continue
            return False
        if not stability_check(x):
            return False
    return True


def contract_characteristic_series(
    snapshots: Sequence[ContractSnapshot],
) -> dict[str, list[float]]:
    """Per-characteristic value series ordered by validity start."""
    ordered = sorted(snapshots, key=lambda s: (s.start, s.end))
    return {
        name: [getattr(s, name) for s in ordered] for name in STABILITY_CHARACTERISTICS
    }


# -- resampling --------------------------------------------------------

@dataclass
class ResampleResult:
    entity_id: str
    curves: list[DailyCurve]
    completeness: dict[dt.date, int]
    ambiguous: list[dt.datetime] = field(default_factory=list)
    negative_samples: dict[dt.date, int] = field(default_factory=dict)


def resample_to_grid(records: Iterable[MeasurementRecord], grid: TimeGrid) -> ResampleResult:
    """Average raw readings of one entity into grid slots, day by day.

    Each slot value is the mean of readings whose time of day falls in
    [point, next point); the last slot extends to midnight. Only days
    covering every slot become curves; all observed days appear in the
    completeness map. Clock-change duplicates (the same civil timestamp
    occurring twice) are averaged; more than two readings on one
    timestamp are unresolvable and dropped, with the timestamp reported.
    """
    records = list(records)
    entities = {r.entity_id for r in records}
    if len(entities) > 1:
        raise ValueError(f"records span multiple entities {sorted(entities)}")
    entity_id = records[0].entity_id if records else ""

    counts = Counter(r.timestamp for r in records)
    ambiguous = sorted(ts for ts, c in counts.items() if c > 2)
    ambiguous_set = set(ambiguous)

    points = grid.points
    by_day: dict[dt.date, list[list[float]]] = defaultdict(
        lambda: [[] for _ in range(grid.m)]
    )
    negatives: Counter = Counter()
    for r in records:
        if r.timestamp in ambiguous_set:
            continue
        t = r.timestamp
        hod = t.hour + t.minute / 60.0 + t.second / 3600.0 + t.microsecond / 3.6e9
        slot = bisect_right(points, hod) - 1
        if slot < 0:  # reading earlier than the first grid point wraps into the last slot
            slot = grid.m - 1
        by_day[t.date()][slot].append(r.power_kw)
        if r.power_kw < 0.0:
            negatives[t.date()] += 1

    curves: list[DailyCurve] = []
    completeness: dict[dt.date, int] = {}
    for day in sorted(by_day):
        slots = by_day[day]
        covered = sum(1 for s in slots if s)
        completeness[day] = covered
        if covered == grid.m:
            values = np.array([float(np.mean(s)) for s in slots])
            curves.append(DailyCurve(day, values, entity_id))
    return ResampleResult(
        entity_id=entity_id,
        curves=curves,
        completeness=completeness,
        ambiguous=list(ambiguous),
        negative_samples={d: negatives[d] for d in sorted(negatives)},
    )


# -- day/entity filtering ----------------------------------------------

@dataclass(frozen=True)
class DropRecord:
    """One dropped record/day/entity with its machine-readable reason."""

    entity_id: str
    scope: str  # "record" | "day" | "entity"
    date: dt.date | None
    reason: str
    detail: str = ""


@dataclass
class FilterResult:
    curveset: CurveSet | None
    drops: list[DropRecord]
    available_days: int
    incomplete_days: int
    corrupted_days: int
    surviving_days: int


def _is_corrupted(values: np.ndarray, corruption: str) -> bool:
    if corruption == "any_zero_sample":
        return bool(np.any(values == 0.0))
    if corruption == "all_day_zero":
        return bool(np.all(values == 0.0))
    return False


def filter_days(curves: Sequence[DailyCurve], completeness: Mapping[dt.date, int],
                grid: TimeGrid, rule: PopulationRule, *,
                incomplete_fraction: float = 0.20,
                corrupted_fraction: float = 0.10,
                min_days: int = 1095) -> FilterResult:
    """Three-step cleaning of one entity's resampled days.

    (i) days not covering every grid slot are removed; if they exceed
    ``incomplete_fraction`` of the available calendar days (first to last
    observation, inclusive) the entity is removed. (ii) days corrupted
    under the population's zero-reading rule are removed; above
    ``corrupted_fraction`` the entity is removed. (iii) an entity with
    fewer than ``min_days`` surviving days is removed. Rerunning the
    filter on its own output is a no-op.
    """
    curves = list(curves)
    entity_id = curves[0].entity_id if curves else ""
    observed = sorted(set(completeness) | {c.date for c in curves})
    drops: list[DropRecord] = []
    if not observed:
        drops.append(DropRecord(entity_id, "entity", None, "no_data"))
        return FilterResult(None, drops, 0, 0, 0, 0)
    available = (observed[-1] - observed[0]).days + 1

    incomplete = sorted(
        d for d, covered in completeness.items() if covered < grid.m
    )
    if len(incomplete) > incomplete_fraction * available:
        drops.append(DropRecord(
            entity_id, "entity", None, "too_many_incomplete_days",
            f"{len(incomplete)}/{available} days incomplete",
        ))
        return FilterResult(None, drops, available, len(incomplete), 0, 0)
    for d in incomplete:
        drops.append(DropRecord(
            entity_id, "day", d, "incomplete_day",
            f"{completeness[d]}/{grid.m} slots covered",
        ))

    corrupted = [c.date for c in curves if _is_corrupted(c.values, rule.corruption)]
    if len(corrupted) > corrupted_fraction * available:
        drops.append(DropRecord(
            entity_id, "entity", None, "too_many_corrupted_days",
            f"{len(corrupted)}/{available} days corrupted ({rule.corruption})",
        ))
        return FilterResult(None, drops, available, len(incomplete), len(corrupted), 0)
    corrupted_set = set(corrupted)
    for d in corrupted:
        drops.append(DropRecord(
            entity_id, "day", d, "corrupted_day", rule.corruption,
        ))

    surviving = [c for c in curves if c.date not in corrupted_set]
    if len(surviving) < min_days:
        drops.append(DropRecord(
            entity_id, "entity", None, "insufficient_days",
            f"{len(surviving)} surviving days < {min_days}",
        ))
        return FilterResult(
            None, drops, available, len(incomplete), len(corrupted), len(surviving)
        )
    return FilterResult(
        CurveSet(grid, tuple(surviving)),
        drops,
        available,
        len(incomplete),
        len(corrupted),
        len(surviving),
    )


# -- spatial aggregation -----------------------------------------------

def aggregate_spatial(sets: Mapping[str, CurveSet],
                      region_of: Mapping[str, str]) -> dict[str, CurveSet]:
    """Sum member curves per region, on the dates every member covers.

    Input sets must be in physical units (not normalized) and share one
    grid. Entities without a region assignment are ignored.
    """
    members: dict[str, list[CurveSet]] = defaultdict(list)
    for entity_id, cs in sorted(sets.items()):
        if cs.scale is not None:
            raise ValueError(f"{entity_id}: aggregate before normalizing")
        region = region_of.get(entity_id)
        if region is not None:
            members[region].append(cs)

    out: dict[str, CurveSet] = {}
    for region in sorted(members):
        group = members[region]
        grid = group[0].grid
        for cs in group[1:]:
            if cs.grid != grid:
                raise GridMismatchError(f"region {region}: member grids differ")
        lookups = [{c.date: c.values for c in cs.curves} for cs in group]
        common = set(lookups[0])
        for table in lookups[1:]:
            common &= set(table)
        curves = []
        for day in sorted(common):
            total = np.zeros(grid.m)
            for table in lookups:
                total = total + table[day]
            curves.append(DailyCurve(day, total, region))
        out[region] = CurveSet(grid, tuple(curves))
    return out


# -- weather -----------------------------------------------------------

def average_weather(readings: Iterable[WeatherReading],
                    expected_timestamps: Sequence[dt.datetime] | None = None,
                    ) -> tuple[list[WeatherReading], list[dt.datetime]]:
    """City-level series: unweighted per-variable mean over reporting stations.

    A station missing a variable at a timestamp is excluded from that
    variable's average only. Returns the averaged series plus the
    expected timestamps nobody reported at (the gaps).
    """
    by_ts: dict[dt.datetime, list[WeatherReading]] = defaultdict(list)
    for r in readings:
        by_ts[r.timestamp].append(r)

    averaged: list[WeatherReading] = []
    for ts in sorted(by_ts):
        group = by_ts[ts]
        values: dict[str, float | None] = {}
        for var in WEATHER_VARIABLES:
            reported = [getattr(r, var) for r in group if getattr(r, var) is not None]
            values[var] = float(np.mean(reported)) if reported else None
        averaged.append(WeatherReading("CITY", ts, **values))

    gaps: list[dt.datetime] = []
    if expected_timestamps is not None:
        gaps = sorted(set(expected_timestamps) - set(by_ts))
    return averaged, gaps


def daily_weather(readings: Iterable[WeatherReading]) -> dict[dt.date, dict[str, float | None]]:
    """Per-day means of each variable from a city-level series."""
    by_day: dict[dt.date, list[WeatherReading]] = defaultdict(list)
    for r in readings:
        by_day[r.timestamp.date()].append(r)
    out: dict[dt.date, dict[str, float | None]] = {}
    for day in sorted(by_day):
        group = by_day[day]
        row: dict[str, float | None] = {}
        for var in WEATHER_VARIABLES:
            reported = [getattr(r, var) for r in group if getattr(r, var) is not None]
            row[var] = float(np.mean(reported)) if reported else None
        out[day] = row
    return out


# -- population classification ------------------------------------------

def classify_population(snapshot: ContractSnapshot,
                        rules: Sequence[PopulationRule]) -> str:
    """Name of the first matching rule in declared order, else Unclassified."""
    for rule in rules:
        if rule.matches(snapshot):
            return rule.name
    return "Unclassified"


# -- calendar descriptors ------------------------------------------------

def build_day_descriptors(
    dates: Sequence[dt.date],
    events: Mapping[str, Sequence[tuple[dt.date, dt.date]]],
    origin: dt.date,
) -> list[DayDescriptor]:
    """Descriptors for the given dates, with event flags from date ranges.

    ``origin`` is the earliest training observation; calendar time counts
    days from it. Event ranges are inclusive on both ends.
    """
    unknown = set(events) - set(EVENT_NAMES)
    if unknown:
        raise ValueError(f"unknown event names {sorted(unknown)}; expected {EVENT_NAMES}")
    out = []
    for day in sorted(dates):
        flags = tuple(
            any(start <= day <= end for start, end in events.get(name, ()))
            for name in EVENT_NAMES
        )
        out.append(DayDescriptor.from_date(day, origin, flags))
    return out
