#!/usr/bin/env python3
"""Run the default verification suite and write a canonical JSON report.

Usage: python scripts/run_suite.py [--degree D] [--seed S] [--out report.json]
"""

import argparse
import json
import sys
import tempfile
from pathlib import Path

from blaschke_lab.cli import main as cli_main


def build_config(degree: int, seed: int) -> dict:
    return {
        "B": {
            "theta": 0.0,
            "zeros": [
                {"re": 0.5, "im": 0.0, "mult": 1},
                {"re": -0.3, "im": 0.0, "mult": 1},
            ],
        },
        "alpha": -1.0,
        "degree": degree,
        "seed": seed,
        "inputs": {},
    }


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--degree", type=int, default=64)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="suite_report.json")
    args = ap.parse_args()

    cfg = build_config(args.degree, args.seed)
    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
        json.dump(cfg, fh)
        cfg_path = fh.name
    code = cli_main(["suite", "--config", cfg_path, "--out", args.out])
    Path(cfg_path).unlink(missing_ok=True)
    print(f"report written to {args.out} (exit {code})")
    return code


if __name__ == "__main__":
    sys.exit(main())
