#!/usr/bin/env python3
"""Generate the synthetic three-substation dataset and a ready-to-run config.

Example:
    python scripts/make_synthetic_data.py demo/
    loadfpca ingest  --config demo/run.toml
    loadfpca fit     --config demo/run.toml --entity S01 --curves demo/out/curves.csv --output demo/out/S01
    loadfpca predict --config demo/run.toml --model demo/out/S01/model.json --output demo/out/S01
    loadfpca evaluate --forecast demo/out/S01/forecast.csv --actual demo/out/curves.csv \
        --entity S01 --output demo/out/S01
"""

import argparse
from pathlib import Path

from loadfpca.synthetic import write_synthetic_dataset

CONFIG_TEMPLATE = """\
[input]
kind = "measurements"
measurements = "{measurements}"
contracts = "{contracts}"
weather = "{weather}"
events = "{events}"
regions = "{regions}"

[analysis]
grid = "hourly"
train_range = ["2014-01-01", "2015-12-31"]
test_range = ["2016-01-01", "2016-12-31"]
components_fit = 6
components_forecast = 4
output_dir = "{outdir}"
"""


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("directory", type=Path, help="where to put the dataset")
    parser.add_argument("--seed", type=int, default=20140101)
    parser.add_argument("--noise", type=float, default=0.02,
                        help="multiplicative noise level (default 0.02)")
    args = parser.parse_args()

    paths = write_synthetic_dataset(args.directory, seed=args.seed, noise=args.noise)
    config = args.directory / "run.toml"
    config.write_text(CONFIG_TEMPLATE.format(
        outdir=args.directory / "out", **{k: str(v) for k, v in paths.items()}
    ))
    for role, path in sorted(paths.items()):
        print(f"{role:13s} {path}")
    print(f"{'config':13s} {config}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
