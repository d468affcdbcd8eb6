import json

import numpy as np
import pytest

from fraclab.cli import main
from fraclab.scenarios import SCENARIOS, run_scenario


def test_every_scenario_passes_with_defaults(tmp_path):
    for name in SCENARIOS:
        manifest = run_scenario(name, {}, tmp_path / name, seed=7)
        assert manifest["passed"], f"{name}: {[a for a in manifest['assertions'] if not a['passed']]}"
        assert (tmp_path / name / "manifest.json").exists()
        for artifact in manifest["artifacts"]:
            assert (tmp_path / name / artifact).exists()


def test_manifest_schema(tmp_path):
    manifest = run_scenario("cylinder_limit", {}, tmp_path, seed=1)
    assert manifest["schema"] == "fraclab-manifest-v1"
    assert manifest["scenario"] == "cylinder_limit"
    on_disk = json.loads((tmp_path / "manifest.json").read_text())
    assert on_disk == manifest


def test_poincare_sweep_csv_schema(tmp_path):
    run_scenario("poincare_sweep", {}, tmp_path, seed=1)
    header = (tmp_path / "poincare_sweep.csv").read_text().splitlines()[0]
    assert header == "dim,domain_id,s,t,N,L,constant,residual"


def test_assertion_failure_exits_one(tmp_path):
    cfg = tmp_path / "strict.toml"
    cfg.write_text(f"""
schema = "fraclab-config-v1"
[scenario]
name = "cylinder_limit"
output = "{tmp_path}/out"
[cylinder]
gap_tol = 1e-9
""")
    assert main(["run", str(cfg)]) == 1


def test_grid_and_domain_overrides(tmp_path):
    params = {
        "grid": {"extent": 12.0, "points": 128},
        "domain": {"interior": {"kind": "interval", "lo": -1.5, "hi": 1.5}},
        "runge": {"counts": [1, 2, 4]},
    }
    manifest = run_scenario("runge_decay", params, tmp_path, seed=2)
    assert manifest["passed"]


def test_nonuniqueness_csv_columns(tmp_path):
    manifest = run_scenario("nonuniqueness_demo", {}, tmp_path, seed=5)
    assert manifest["passed"]
    lines = (tmp_path / "nonuniqueness.csv").read_text().splitlines()
    assert lines[0] == "x,gamma1,gamma2,m1,m2,q1,q2"
    data = np.loadtxt(tmp_path / "nonuniqueness.csv", delimiter=",", skiprows=1)
    assert data.shape[1] == 7
    # DN matrices exported alongside
    dn = np.loadtxt(tmp_path / "dn_gamma1.csv", delimiter=",", skiprows=1)
    assert dn.shape[0] == dn.shape[1]


def test_reconstruction_records_noise_sweep(tmp_path):
    manifest = run_scenario("reconstruction_demo", {}, tmp_path, seed=5)
    assert manifest["passed"]
    assert "noisy_status" in manifest["metrics"]
    assert manifest["metrics"]["noise_level"] == 1e-6


def test_seeded_metrics_are_reproducible(tmp_path):
    m1 = run_scenario("liouville_suite", {}, tmp_path / "a", seed=9)
    m2 = run_scenario("liouville_suite", {}, tmp_path / "b", seed=9)
    assert m1["metrics"] == m2["metrics"]
