"""CLI: subcommands, config handling, determinism, exit codes."""

import json

import pytest

from anisospec.cli import main


def run(args):
    return main([str(a) for a in args])


def test_toy_subcommand(tmp_path):
    out = tmp_path / "toy"
    code = run(["toy", "--w0", "0.5", "--w1", "0.5", "--r", "1",
                "--output-dir", out])
    assert code == 0
    data = json.loads((out / "toy.json").read_text())
    assert data["memberships"] == {"U": "member", "V": "not_member"}
    assert data["eigencheck_residuals"]["U"] <= 1e-12
    assert len(data["section_eigs"]) == 400
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "toy"
    assert manifest["config"]["r"] == 1.0
    assert "version" in manifest


def test_suspension_subcommand(tmp_path):
    out = tmp_path / "susp"
    code = run(["suspension", "--k-max", "5", "--nu-max", "6", "--R", "8",
                "--output-dir", out])
    assert code == 0
    spectrum = json.loads((out / "spectrum.json").read_text())
    assert len(spectrum) == 11
    assert all(set(rec) == {"re", "im", "sector"} for rec in spectrum)
    lines = (out / "certificates.csv").read_text().splitlines()
    assert lines[0] == "nu1,nu2,norm_bound,pass"
    assert all(line.endswith("true") for line in lines[1:])


def test_weyl_boxes_subcommand(tmp_path):
    out = tmp_path / "weyl"
    code = run(["weyl-boxes", "--beta0", "0.5", "--omega-min", "64",
                "--omega-max", "4096", "--output-dir", out])
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert abs(summary["alpha_star"] - 2.0 / 3.0) <= 0.08
    header = (out / "counts.csv").read_text().splitlines()[0]
    assert header == "omega,alpha,count"


def test_escape_sweep_subcommand(tmp_path):
    out = tmp_path / "esc"
    assert run(["escape-sweep", "--output-dir", out]) == 0
    assert (out / "weight_field.csv").read_text().startswith("xi_u,xi_s,omega,W")
    summary = json.loads((out / "summary.json").read_text())
    assert summary["decay_rate_fit"] == pytest.approx(
        summary["decay_rate_theory"], rel=0.1)


def test_quantize_probes_subcommand(tmp_path):
    out = tmp_path / "quant"
    code = run(["quantize-probes", "--points", "96", "--window", "12",
                "--band", "3", "--output-dir", out])
    assert code == 0
    records = json.loads((out / "probes.json").read_text())["records"]
    assert {r["probe"] for r in records} >= {"composition_b_constant",
                                             "composition_bumps"}
    assert all(r["pass"] for r in records)


def test_determinism(tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    run(["toy", "--w0", "0.7", "--r", "0.5", "--output-dir", out_a])
    run(["toy", "--w0", "0.7", "--r", "0.5", "--output-dir", out_b])
    assert (out_a / "toy.json").read_bytes() == (out_b / "toy.json").read_bytes()


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("w0=0.9\nr=1.0\n")
    out = tmp_path / "toy"
    code = run(["toy", "--config", cfg, "--r", "2.0", "--output-dir", out])
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["w0"] == {"im": 0.0, "re": 0.9}
    assert manifest["config"]["r"] == 2.0  # CLI flag overrides the file


def test_unknown_config_key_rejected(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("bogus_key=1\n")
    assert run(["toy", "--config", cfg, "--output-dir", tmp_path / "x"]) == 2


def test_malformed_config_rejected(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("just some words\n")
    assert run(["toy", "--config", cfg, "--output-dir", tmp_path / "x"]) == 2


def test_resolution_error_exit_code(tmp_path):
    code = run(["resolution-check", "--points", "32", "--windows", "14",
                "--output-dir", tmp_path / "r"])
    assert code == 3


def test_resolution_check_passes(tmp_path):
    out = tmp_path / "res"
    code = run(["resolution-check", "--points", "64", "--length",
                str(3.14159265358979), "--band", "1", "--windows", "5,8",
                "--output-dir", out])
    assert code == 0
    data = json.loads((out / "resolution.json").read_text())
    assert data["decreasing"] and data["pass"]


def test_thread_cap(monkeypatch):
    from anisospec.cli import thread_cap
    monkeypatch.setenv("RUELLE_THREADS", "3")
    assert thread_cap() == 3
    monkeypatch.setenv("RUELLE_THREADS", "not-a-number")
    assert thread_cap() >= 1
