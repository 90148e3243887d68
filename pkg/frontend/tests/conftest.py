"""Frontend tests consume the solver only through its CLI and files."""

import subprocess
import sys

import pytest


def run_solver(*args):
    res = subprocess.run([sys.executable, "-m", "svmflow.cli", *args],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    return res


@pytest.fixture(scope="session")
def case1_outputs(tmp_path_factory):
    out = tmp_path_factory.mktemp("case1")
    run_solver("run", "--case", "1", "--nx", "48", "--ny", "8",
               "--tend", "0.1", "--snap-every", "0.05", "--outdir", str(out))
    # slices at two times from the two snapshots
    snaps = sorted(out.glob("snapshot_*.csv"))
    for k, snap in enumerate(snaps):
        run_solver("slice", str(snap), "--axis", "y", "--at", "4.0",
                   "--out", str(out / f"profile_{k}.csv"))
    return out


@pytest.fixture(scope="session")
def case4_outputs(tmp_path_factory):
    out = tmp_path_factory.mktemp("case4")
    run_solver("run", "--case", "4", "--nx", "32", "--ny", "32",
               "--tend", "0.8", "--outdir", str(out))
    return out
