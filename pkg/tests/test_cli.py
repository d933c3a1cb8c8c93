"""Exit codes and file outputs of the command line front end."""

import json

import pytest

from wignersim.cli import main


def test_unknown_subcommand_exits_2(capsys):
    assert main(["frobnicate"]) == 2
    capsys.readouterr()


def test_missing_config_exits_2(capsys):
    assert main(["rate", "--config", "missing.json"]) == 2
    assert "configuration error" in capsys.readouterr().err


def test_bad_config_content_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["rate", "--config", str(bad)]) == 2
    bad2 = tmp_path / "bad2.json"
    bad2.write_text(json.dumps({"n_grid": [32, 16]}))
    assert main(["rate", "--config", str(bad2)]) == 2
    capsys.readouterr()


def test_lawcheck_passes(tmp_path, capsys):
    assert main(["lawcheck", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "integral-bound" in out and "8.6789" in out
    assert (tmp_path / "semicircle_curve.csv").exists()


def test_simulate_writes_spectra(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n_grid": [8], "replicas": 2, "seed": 4}))
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    files = sorted(tmp_path.glob("spectrum_n8_r*.csv"))
    assert len(files) == 2
    head = files[0].read_text().splitlines()
    assert head[0] == "# n: 8"
    capsys.readouterr()


def test_rate_small_run(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n_grid": [16, 32, 64], "replicas": 10,
                               "seed": 20260809}))
    code = main(["rate", "--config", str(cfg), "--out", str(tmp_path),
                 "--format", "csv"])
    out = capsys.readouterr().out
    assert code == 0, out
    assert "rate-slope" in out
    assert (tmp_path / "ratefit.csv").exists()


def test_variance_bulk_grid(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "n_grid": [48, 96], "replicas": 60, "seed": 20260809,
        "z_grid": [[-1.5, 0.5], [0.0, 0.5], [1.5, 0.5]],
        "checks": ["moment_l1"],
    }))
    code = main(["variance", "--config", str(cfg), "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == 0, out
    assert (tmp_path / "moment_l1_n48.json").exists()


def test_variance_needs_z_grid(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n_grid": [16], "replicas": 60,
                               "z_grid": []}))
    assert main(["variance", "--config", str(cfg),
                 "--out", str(tmp_path)]) == 2
    capsys.readouterr()


def test_bai_small(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n_grid": [64], "replicas": 3, "seed": 6}))
    code = main(["bai", "--config", str(cfg), "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == 0, out
    assert "bai-inequality" in out
    assert (tmp_path / "bai.json").exists()


def test_diag_small(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "n_grid": [24], "replicas": 30, "seed": 8,
        "z_grid": [[0.0, 0.5], [0.0, 1.0]],
    }))
    code = main(["diag", "--config", str(cfg), "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == 0, out
    assert "diag-identities" in out
    assert (tmp_path / "leave_one_out_n24.csv").exists()


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    capsys.readouterr()
