import subprocess
import sys
from pathlib import Path

import pytest

from hopftori.cli import build_config, main, read_config_file
from hopftori.energy import EnergyKind
from hopftori.errors import ConfigError

BLASCHKE = ["--energy", "extended_blaschke", "--lambda", "0", "--rho", "4", "--d", "2", "--n_samples", "256"]


def test_config_file_is_parsed(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("# sample\nenergy = total_curvature\nlambda = 3  # shift\nrho = 4\nd = 3.5\n")
    values = read_config_file(cfg_file)
    assert values == {"energy": "total_curvature", "lambda": "3", "rho": "4", "d": "3.5"}
    cfg = build_config(values)
    assert cfg.energy.kind is EnergyKind.TOTAL_CURVATURE
    assert cfg.energy.epsilon == 1


def test_malformed_config_line(tmp_path):
    cfg_file = tmp_path / "bad.cfg"
    cfg_file.write_text("energy extended_blaschke\n")
    with pytest.raises(ConfigError):
        read_config_file(cfg_file)


@pytest.mark.parametrize(
    "values",
    [
        {"energy": "extended_blaschke", "d": "2", "n_samples": "1000"},
        {"energy": "extended_blaschke", "d": "2", "m": "3", "n": "2"},
        {"energy": "extended_blaschke"},
        {"energy": "extended_blaschke", "m": "3"},
        {"energy": "extended_blaschke", "d": "2", "tol.H": "0"},
        {"energy": "unknown_energy", "d": "2"},
        {"energy": "extended_blaschke", "d": "2", "colour": "red"},
        {"energy": "extended_blaschke", "d": "two"},
    ],
)
def test_invalid_configurations(values):
    with pytest.raises(ConfigError):
        build_config(values)


def test_flags_override_file_and_environment(tmp_path, monkeypatch):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text(f"energy = extended_blaschke\nrho = 4\nd = 5\nn_samples = 256\nout = {tmp_path / 'from_file'}\n")
    monkeypatch.setenv("HOPFTORI_OUT", str(tmp_path / "from_env"))
    assert main(["profile", "--config", str(cfg_file), "--d", "2"]) == 0
    text = (tmp_path / "from_env" / "profile.txt").read_text()
    assert "# d=2\n" in text
    assert not (tmp_path / "from_file").exists()
    assert main(["profile", "--config", str(cfg_file), "--out", str(tmp_path / "flag")]) == 0
    assert "# d=5\n" in (tmp_path / "flag" / "profile.txt").read_text()


def test_profile_command_writes_files(tmp_path, capsys):
    assert main(["profile", *BLASCHKE, "--out", str(tmp_path)]) == 0
    assert (tmp_path / "profile.txt").exists()
    assert "status=pass" in (tmp_path / "profile_report.txt").read_text()
    assert "el_residual" in capsys.readouterr().out


def test_failed_gate_exits_one(tmp_path):
    assert main(["profile", *BLASCHKE, "--out", str(tmp_path), "--tol", "el=1e-30"]) == 1


def test_config_errors_exit_two(tmp_path):
    assert main(["profile", *BLASCHKE, "--n_t", "100", "--out", str(tmp_path)]) == 2
    assert main(["profile", "--energy", "extended_blaschke", "--rho", "4", "--d", "0.1"]) == 2
    assert main(["nonsense"]) == 2
    assert main(["profile", *BLASCHKE, "--tol", "H"]) == 2


def test_close_and_evolve_are_deterministic(tmp_path):
    args = ["--energy", "extended_blaschke", "--lambda", "0", "--rho", "4", "--m", "3", "--n", "2",
            "--n_samples", "512", "--n_t", "64", "--export_rows", "256", "--export_cols", "16"]
    for sub in ("a", "b"):
        assert main(["evolve", *args, "--out", str(tmp_path / sub)]) == 0
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert any(n.endswith(".obj") for n in names)
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes(), name


def test_module_entry_point(tmp_path):
    res = subprocess.run(
        [sys.executable, "-m", "hopftori", "profile", *BLASCHKE, "--out", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert res.returncode == 0, res.stderr
    assert Path(tmp_path, "profile_report.txt").exists()
