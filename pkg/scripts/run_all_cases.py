#!/usr/bin/env python3
"""Reproduce the four reference experiments (and optionally the figures).

Usage:
    python scripts/run_all_cases.py [--outdir runs] [--nx 128] [--figures]

Case 4 runs to t = 10 and takes a few minutes at the default resolution.
"""

import argparse
import os
import shutil
import subprocess
import sys


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--outdir", default="runs")
    parser.add_argument("--nx", type=int, default=128)
    parser.add_argument("--figures", action="store_true",
                        help="also render figures (needs svmplot installed)")
    args = parser.parse_args()

    for case in ("1", "2", "3", "4"):
        out = os.path.join(args.outdir, f"case{case}")
        cmd = [sys.executable, "-m", "svmflow.cli", "run", "--case", case,
               "--nx", str(args.nx), "--ny", str(args.nx), "--outdir", out,
               "--snap-every", "0.1" if case != "4" else "2.0"]
        print("+", " ".join(cmd), flush=True)
        subprocess.run(cmd, check=True)
        subprocess.run([sys.executable, "-m", "svmflow.cli", "slice",
                        _last_snapshot(out), "--axis", "y", "--at", "4.0",
                        "--out", os.path.join(out, "mid_profile.csv")],
                       check=True)
        if args.figures:
            if shutil.which("plot") is None:
                print("svmplot not installed; skipping figures")
                continue
            subprocess.run(["plot", "field", "--in",
                            os.path.join(out, "snapshot_*.csv"),
                            "--out", os.path.join(out, "velocity.png")],
                           check=True)
            subprocess.run(["plot", "energy", "--in",
                            os.path.join(out, "energy.csv"),
                            "--out", os.path.join(out, "energy.png")],
                           check=True)
    return 0


def _last_snapshot(out: str) -> str:
    snaps = sorted(p for p in os.listdir(out) if p.startswith("snapshot_")
                   and p.endswith(".csv"))
    return os.path.join(out, snaps[-1])


if __name__ == "__main__":
    sys.exit(main())
