"""Shared fixtures: real solver outputs generated through the solver CLI.

The plotting package talks to the solver only through files, so the test
fixtures are produced the same way a user would produce them — by running
``python -m vlasov_riesz.cli``.  Everything is tiny (32x64 grid, a handful
of steps) to keep the suite fast.
"""

import subprocess
import sys

import pytest

RUN_CFG = """\
[grid]
format_version = 1
d = 1
nx = 32
nv = 64
v_max = 8.0

[kernel]
terms = [[1.0, 1.0]]
sign = repulsive

[run]
mode = limit
dt = 0.01
t_final = 0.2
diagnostic_cadence = 5
snapshot_cadence = 10

[initial]
family = perturbed_maxwellian
thermal_v = 1.0
amplitude = 0.05
mode = 1

[diagnostics]
f_norms = [[2, 2.0]]
rho_norms = [3.0]
"""

EPS_CFG = RUN_CFG + """
[study]
type = eps_convergence
eps_list = [0.4, 0.2, 0.0]
"""


def solver(*args):
    """Run one solver CLI command, failing loudly on nonzero exit."""
    proc = subprocess.run([sys.executable, "-m", "vlasov_riesz.cli", *args],
                          capture_output=True, text=True)
    if proc.returncode != 0:
        raise AssertionError(
            f"solver CLI failed ({proc.returncode}):\n{proc.stdout}\n{proc.stderr}")
    return proc


@pytest.fixture(scope="session")
def run_dir(tmp_path_factory):
    """A completed small interacting run: diagnostics, snapshots, manifest."""
    base = tmp_path_factory.mktemp("run_fixture")
    cfg = base / "run.cfg"
    cfg.write_text(RUN_CFG)
    out = base / "out"
    solver("run", "--config", str(cfg), "--output", str(out))
    return out


@pytest.fixture(scope="session")
def kg_dir(tmp_path_factory):
    """A five-horizon averaging-operator sweep."""
    out = tmp_path_factory.mktemp("kg_fixture")
    solver("kg-sweep", "--alpha", "0.5", "--Ts", "0.05,0.1,0.2,0.4,0.8",
           "--trials", "16", "--seed", "0", "--output", str(out))
    return out


@pytest.fixture(scope="session")
def eps_dir(tmp_path_factory):
    """A three-member screening-convergence study."""
    base = tmp_path_factory.mktemp("eps_fixture")
    cfg = base / "study.cfg"
    cfg.write_text(EPS_CFG)
    out = base / "out"
    solver("study-eps", "--config", str(cfg), "--output", str(out))
    return out


@pytest.fixture(scope="session")
def grid_csv(tmp_path_factory):
    """A coarse stability-function grid dump."""
    out = tmp_path_factory.mktemp("penrose_fixture") / "grid.csv"
    solver("penrose", "--profile", "maxwellian", "--Nv", "64", "--v-max", "8.0",
           "--n-coarse", "5", "--n-refine", "3", "--rounds", "1",
           "--dump-grid", str(out))
    return out
