#!/usr/bin/env python3
"""Run the 1997 -> 1998 competition benchmark end to end.

Expects a directory containing load_1997.csv and load_1998.csv in the
wide daily layout (a `date` column or `year,month,day` columns followed
by the 48 half-hourly samples); see the README for how to convert the
original competition spreadsheets. Trains on 1997, forecasts every day
of 1998 with the first K components, and prints the index table.
"""

import argparse
import sys
from pathlib import Path

from loadfpca.cli import main as cli

CONFIG_TEMPLATE = """\
[input]
kind = "eunite"
eunite_files = ["{y1997}", "{y1998}"]

[analysis]
grid = "{grid}"
train_range = ["1997-01-01", "1997-12-31"]
test_range = ["1998-01-01", "1998-12-31"]
components_fit = {fit}
components_forecast = {forecast}
output_dir = "{outdir}"
"""


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("data_dir", type=Path,
                        help="directory with load_1997.csv and load_1998.csv")
    parser.add_argument("--output", type=Path, default=Path("out/eunite"))
    parser.add_argument("--grid", default="two-hourly",
                        choices=["two-hourly", "half-hourly"])
    parser.add_argument("--components", type=int, default=4,
                        help="components to forecast with (default 4)")
    parser.add_argument("--components-fit", type=int, default=8)
    args = parser.parse_args()

    files = [args.data_dir / "load_1997.csv", args.data_dir / "load_1998.csv"]
    missing = [str(p) for p in files if not p.exists()]
    if missing:
        print(f"error: missing input files: {missing}", file=sys.stderr)
        return 1

    args.output.mkdir(parents=True, exist_ok=True)
    config = args.output / "run.toml"
    config.write_text(CONFIG_TEMPLATE.format(
        y1997=files[0], y1998=files[1], grid=args.grid,
        fit=max(args.components_fit, args.components),
        forecast=args.components, outdir=args.output,
    ))

    for step in (
        ["ingest", "--config", str(config)],
        ["fit", "--config", str(config)],
        ["predict", "--config", str(config), "--model", str(args.output / "model.json")],
        ["evaluate", "--config", str(config),
         "--forecast", str(args.output / "forecast.csv"),
         "--actual", str(args.output / "curves.csv")],
    ):
        code = cli(step)
        if code != 0:
            print(f"error: step {step[0]!r} exited with {code}", file=sys.stderr)
            return code

    print()
    print((args.output / "summary.csv").read_text())
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
