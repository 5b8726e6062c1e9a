import json
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from poincare_shape.cli import _Run, main
from poincare_shape.errors import ConfigError
from poincare_shape.io import RunConfig, load_circle_coeffs, load_deformations, load_surface, save_surface, schema_path
from poincare_shape.surface import perturbed_torus
from poincare_shape.validation import check

DEMOS = Path(__file__).resolve().parents[1] / "demos" / "inputs"


def _summary(out, command):
    doc = json.loads((Path(out) / f"{command}_summary.json").read_text())
    jsonschema.validate(doc, json.loads(schema_path().read_text()))
    return doc


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_surface_round_trip(tmp_path):
    s = perturbed_torus(grid_size=16)
    save_surface(s, tmp_path / "s.yaml")
    t = load_surface(tmp_path / "s.yaml")
    assert t.grid_size == (16, 16)
    assert np.abs(t.points - s.points).max() < 1e-14


@pytest.mark.parametrize(
    "text",
    [
        "modes: [{m: 1, n: 0, cos: [2, 0]}]",
        "modes: []",
        "grid: 64\n",
        "modes: [{m: 1, cos: [2, 0, 0]}]",
        "modes: [{m: 1, n: 0, bogus: 1}]",
        "modes: [ {m: 1",
    ],
)
def test_malformed_surfaces(tmp_path, text):
    with pytest.raises(ConfigError):
        load_surface(_write(tmp_path, "bad.yaml", text))


def test_circle_and_deformation_files():
    mu, omega = load_circle_coeffs(DEMOS / "mu.yaml")
    assert omega == pytest.approx((np.sqrt(5) - 1) / 2)
    assert mu.size == 33 and mu[16] == 0 and np.allclose(mu, np.conj(mu[::-1]))
    specs = load_deformations(DEMOS / "deformations.yaml")
    assert [d["type"] for d in specs][:2] == ["constant", "radial_bump"]


def test_run_config_validation(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig(solver_tol=0).validate()
    with pytest.raises(ConfigError):
        RunConfig(grid=17).validate()
    with pytest.raises(ConfigError):
        RunConfig.from_file(_write(tmp_path, "c.yaml", "unknown_key: 1\n"))
    cfg = RunConfig.from_file(_write(tmp_path, "c.yaml", "grid: 32\nt_list: [0.01, 0.005, 0.0025]\n"))
    assert cfg.grid == 32 and cfg.t_list == (0.01, 0.005, 0.0025)


def test_malformed_surface_exit_code(tmp_path, capsys):
    bad = _write(tmp_path, "bad.yaml", "modes: [{m: 1, n: 0, cos: [2, 0]}]")
    assert main(["harmonic", "--surface", bad, "--output-dir", str(tmp_path)]) == 2
    assert "expected three numbers" in capsys.readouterr().err


def test_missing_surface_exit_code(tmp_path):
    assert main(["harmonic", "--output-dir", str(tmp_path)]) == 2
    assert main(["harmonic", "--surface", str(tmp_path / "nope.yaml"), "--output-dir", str(tmp_path)]) == 2


def test_numerical_failure_exit_code(tmp_path):
    mu = _write(tmp_path, "mu.yaml", "modes: [{n: 1, cos: 1.0}]")
    assert main(["cohomology", "--mu", mu, "--omega", "0.5", "--output-dir", str(tmp_path)]) == 3
    near_axis = _write(tmp_path, "s.yaml", "modes:\n  - {m: 1, n: 0, cos: [1.04, 0, 0], sin: [0, 1.04, 0]}\n"
                       "  - {m: 1, n: 1, cos: [0.5, 0, 0], sin: [0, 0.5, 0]}\n"
                       "  - {m: 1, n: -1, cos: [0.5, 0, 0], sin: [0, 0.5, 0]}\n"
                       "  - {m: 0, n: 1, sin: [0, 0, 1.0]}\n")
    assert main(["harmonic", "--surface", near_axis, "--grid", "16", "--output-dir", str(tmp_path)]) == 3


def test_failed_check_exit_code(tmp_path):
    run = _Run("rotation", RunConfig(output_dir=str(tmp_path)), quiet=True)
    run.checks.append(check("always fails", 1.0, 0.5))
    assert run.finish() == 4
    assert _summary(tmp_path, "rotation")["status"] == "fail"


def test_cohomology_command_is_deterministic(tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        assert main(["cohomology", "--mu", str(DEMOS / "mu.yaml"), "--output-dir", str(out), "--quiet"]) == 0
        outs.append(out)
    for name in ("cohomology.csv", "cohomology_modes.csv", "cohomology_pi_prime.csv"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()
    doc = _summary(outs[0], "cohomology")
    assert doc["status"] == "pass" and len(doc["checks"]) == 3
    header = (outs[0] / "cohomology.csv").read_text().splitlines()[0]
    assert "[turns]" in header


def test_rotation_command_and_env_output(tmp_path, monkeypatch):
    monkeypatch.setenv("POINCARE_SHAPE_OUTPUT", str(tmp_path / "env"))
    assert main(["rotation", "--omega", "0.3", "--eps", "0.1", "--quiet"]) == 0
    doc = _summary(tmp_path / "env", "rotation")
    assert doc["scalars"]["rotation_number"] == pytest.approx(0.3, abs=0.05)


def test_surface_commands(tmp_path):
    surf = str(DEMOS / "perturbed.yaml")
    common = ["--surface", surf, "--grid", "16", "--output-dir", str(tmp_path), "--quiet"]
    assert main(["harmonic", *common]) == 0
    assert _summary(tmp_path, "harmonic")["scalars"]["admissible"] is True
    assert main(["poincare", *common]) == 0
    assert _summary(tmp_path, "poincare")["scalars"]["monotone"] is True
    assert main(["rotation", *common]) == 0
    assert main(["shape-derivative", *common, "--deformation", str(DEMOS / "deformations.yaml")]) == 0
    doc = _summary(tmp_path, "shape-derivative")
    assert any(f.endswith("pi_prime_bump.csv") for f in doc["files"])
    lines = (tmp_path / "harmonic_field.csv").read_text().splitlines()
    assert lines[0].startswith("phi [turns],theta [turns]") and len(lines) == 1 + 16 * 16


def test_validate_axisym_command(tmp_path):
    assert main(["validate-axisym", "--grid", "32", "--n-random", "1", "--output-dir", str(tmp_path), "--quiet"]) == 0
    doc = _summary(tmp_path, "validate-axisym")
    assert doc["status"] == "pass" and all(c["passed"] for c in doc["checks"])


def test_validate_fd_command(tmp_path):
    dfile = _write(tmp_path, "d.yaml", "- {name: bump, type: radial_bump}\n")
    args = ["validate-fd", "--grid", "16", "--deformation", dfile, "--t-list", "0.008", "0.004", "0.002",
            "--output-dir", str(tmp_path), "--quiet", "--workers", "2"]
    assert main(args) == 0
    doc = _summary(tmp_path, "validate-fd")
    assert doc["scalars"]["bump observed_order"] >= 1.9
