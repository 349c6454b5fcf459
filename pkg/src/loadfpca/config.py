"""Run configuration: TOML file, command-line overrides, built-in defaults.

Precedence is flags over file over defaults. Population rules live in
the same file as named-threshold sections, e.g.::

    [population.RES]
    corruption = "any_zero_sample"
    frac_res_min = 0.95
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field, replace
from pathlib import Path

import tomli

from .curves import TimeGrid
from .errors import ConfigError
from .pipeline import (
    CORRUPTION_RULES,
    STABILITY_CHARACTERISTICS,
    PopulationRule,
    default_population_rules,
)

GRID_NAMES = ("hourly", "two-hourly", "half-hourly")

_SUFFIX_OPS = {"_min": "ge", "_max": "le", "_gt": "gt", "_lt": "lt"}


def grid_from_name(name: str) -> TimeGrid:
    if name == "hourly":
        return TimeGrid.hourly()
    if name == "two-hourly":
        return TimeGrid.two_hourly()
    if name == "half-hourly":
        return TimeGrid.half_hourly()
    raise ConfigError(f"unknown grid {name!r}; expected one of {GRID_NAMES}")


def parse_date_range(raw) -> tuple[dt.date, dt.date]:
    """Accepts 'YYYY-MM-DD:YYYY-MM-DD' or a [start, end] pair."""
    if isinstance(raw, str):
        parts = raw.split(":")
        if len(parts) != 2:
            raise ConfigError(f"bad date range {raw!r}; expected start:end")
    else:
        parts = list(raw)
        if len(parts) != 2:
            raise ConfigError(f"bad date range {raw!r}; expected [start, end]")
    try:
        start, end = (
            p if isinstance(p, dt.date) else dt.date.fromisoformat(str(p).strip())
            for p in parts
        )
    except ValueError as exc:
        raise ConfigError(f"bad date range {raw!r}: {exc}") from None
    if end < start:
        raise ConfigError(f"date range {raw!r} ends before it starts")
    return start, end


@dataclass(frozen=True)
class RunConfig:
    """All knobs of a batch run."""

    kind: str = "measurements"  # or "eunite"
    measurements: Path | None = None
    eunite_files: tuple[Path, ...] = ()
    contracts: Path | None = None
    weather: Path | None = None
    events: Path | None = None
    regions: Path | None = None
    curves: Path | None = None  # cleaned curves consumed by fit/predict

    grid: str = "hourly"
    entity: str | None = None
    train_range: tuple[dt.date, dt.date] | None = None
    test_range: tuple[dt.date, dt.date] | None = None
    components_fit: int = 8
    components_forecast: int = 4
    output_dir: Path = Path("out")

    incomplete_fraction: float = 0.20
    corrupted_fraction: float = 0.10
    min_days: int = 1095
    skip_stability: bool = False

    weather_bin_temp: float = 2.5
    weather_bin_rh: float = 10.0

    population_rules: tuple[PopulationRule, ...] = field(
        default_factory=default_population_rules
    )

    def validate(self) -> "RunConfig":
        if self.kind not in ("measurements", "eunite"):
            raise ConfigError(f"unknown input kind {self.kind!r}")
        grid_from_name(self.grid)
        if self.components_forecast > self.components_fit:
            raise ConfigError(
                f"components to forecast ({self.components_forecast}) exceed "
                f"components to fit ({self.components_fit})"
            )
        if self.components_fit < 1:
            raise ConfigError("components_fit must be >= 1")
        if self.train_range and self.test_range:
            t0, t1 = self.train_range
            s0, s1 = self.test_range
            if t0 <= s1 and s0 <= t1:
                raise ConfigError("training and test ranges overlap")
        if not self.population_rules:
            raise ConfigError("at least one population rule is required")
        return self

    def grid_object(self) -> TimeGrid:
        return grid_from_name(self.grid)


def _parse_population_rules(section: dict) -> tuple[PopulationRule, ...]:
    rules = []
    for name, body in section.items():
        if not isinstance(body, dict):
            raise ConfigError(f"population.{name} must be a table")
        corruption = body.get("corruption", "none")
        if corruption not in CORRUPTION_RULES:
            raise ConfigError(
                f"population.{name}: corruption must be one of {CORRUPTION_RULES}"
            )
        conditions = []
        for key, value in body.items():
            if key == "corruption":
                continue
            for suffix, op in _SUFFIX_OPS.items():
                if key.endswith(suffix):
                    fld = key[: -len(suffix)]
                    if fld not in STABILITY_CHARACTERISTICS:
                        raise ConfigError(
                            f"population.{name}: unknown field {fld!r}; "
                            f"expected one of {STABILITY_CHARACTERISTICS}"
                        )
                    conditions.append((fld, op, float(value)))
                    break
            else:
                raise ConfigError(
                    f"population.{name}: key {key!r} must end in one of "
                    f"{tuple(_SUFFIX_OPS)}"
                )
        rules.append(PopulationRule(name, corruption, tuple(conditions)))
    return tuple(rules)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        doc = tomli.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None

    cfg = RunConfig()
    inp = doc.get("input", {})
    updates: dict = {}
    if "kind" in inp:
        updates["kind"] = inp["kind"]
    for key in ("measurements", "contracts", "weather", "events", "regions", "curves"):
        if key in inp:
            updates[key] = Path(inp[key])
    if "eunite_files" in inp:
        updates["eunite_files"] = tuple(Path(p) for p in inp["eunite_files"])

    ana = doc.get("analysis", {})
    for key in ("grid", "entity"):
        if key in ana:
            updates[key] = ana[key]
    for key in ("components_fit", "components_forecast"):
        if key in ana:
            updates[key] = int(ana[key])
    if "train_range" in ana:
        updates["train_range"] = parse_date_range(ana["train_range"])
    if "test_range" in ana:
        updates["test_range"] = parse_date_range(ana["test_range"])
    if "output_dir" in ana:
        updates["output_dir"] = Path(ana["output_dir"])

    flt = doc.get("filter", {})
    for key in ("incomplete_fraction", "corrupted_fraction"):
        if key in flt:
            updates[key] = float(flt[key])
    if "min_days" in flt:
        updates["min_days"] = int(flt["min_days"])
    if "skip_stability" in flt:
        updates["skip_stability"] = bool(flt["skip_stability"])

    rep = doc.get("report", {})
    if "weather_bin_temp" in rep:
        updates["weather_bin_temp"] = float(rep["weather_bin_temp"])
    if "weather_bin_rh" in rep:
        updates["weather_bin_rh"] = float(rep["weather_bin_rh"])

    if "population" in doc:
        updates["population_rules"] = _parse_population_rules(doc["population"])

    return replace(cfg, **updates).validate()
