#!/usr/bin/env python3
"""Regenerate the committed demo artifacts under demo/data.

Runs the three table-producing experiments at small scale and collects the
files the plotting frontend consumes.  Deterministic given the configs.
"""

import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent

JOBS = [
    ("compare-cov", "demo_compare_cov.json", "covariance.csv"),
    ("moments-verify", "demo_moments.json", "moments.csv"),
    ("longtime", "demo_longtime.json", "reports.jsonl"),
]


def main() -> int:
    target = REPO / "demo" / "data"
    target.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        for command, config, artifact in JOBS:
            out = Path(tmp) / command
            subprocess.run(
                [
                    sys.executable,
                    "-m",
                    "hoplab.cli",
                    command,
                    "--config",
                    str(REPO / "configs" / config),
                    "--out",
                    str(out),
                ],
                check=True,
            )
            shutil.copy(out / artifact, target / artifact)
            print(f"wrote demo/data/{artifact}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
