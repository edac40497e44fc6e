#!/usr/bin/env python3
"""Sweep the change-of-mind and commit-threshold parameters on sweep_base.

Writes alpha_sweep.csv and beta_sweep.csv next to this script (or into the
directory given as the first argument) and prints the summary table.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from reachintent.cli import main as cli_main


def main() -> None:
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent
    out_dir.mkdir(parents=True, exist_ok=True)
    runs = [
        ("alpha", "0.05,0.3,0.8", out_dir / "alpha_sweep.csv"),
        ("beta", "0.01,0.05,0.2", out_dir / "beta_sweep.csv"),
    ]
    for parameter, values, path in runs:
        code = cli_main([
            "sweep", "sweep_base",
            "--parameter", parameter,
            "--values", values,
            "-o", str(path),
            "--deterministic",
        ])
        if code != 0:
            raise SystemExit(code)
        print(f"== {parameter} sweep -> {path}")
        print(path.read_text())


if __name__ == "__main__":
    main()
