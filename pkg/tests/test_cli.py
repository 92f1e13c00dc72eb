import json

import pytest

import cli

ZERO_CFG = "grid.N=256\ngrid.R=16\ndata.a=0\nevolution.t_end=0.5\nevolution.record_every=8\n" \
           "output.snapshot_times=0,0.25\noutput.plots=true\n"


def _write(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_simulate_zero_data(tmp_path):
    out = tmp_path / "out"
    code = cli.main(["simulate", "--config", _write(tmp_path, ZERO_CFG), "--out", str(out)])
    assert code == 0
    lines = (out / "timeseries.csv").read_text().splitlines()
    assert lines[0] == "t,E,G,l2_phi,l2_dtphi,h1_phi,coercivity,g1_margin,dt"
    assert all(float(v) == 0.0 for line in lines[1:] for v in line.split(",")[1:6])
    summary = json.loads((out / "summary.json").read_text())
    assert summary["outcome"]["status"] == "completed"
    assert len(summary["snapshots"]) == 2
    assert (out / "snapshot_000.csv").read_text().startswith("r,g,gt,f,Phi,Phi2\n")
    assert (out / "monitors.csv").exists() and (out / "energy.svg").exists()


def test_simulate_is_deterministic(tmp_path):
    cfg = _write(tmp_path, "grid.N=256\ngrid.R=16\ndata.a=0.3\nevolution.t_end=0.25\n")
    for name in ("a", "b"):
        assert cli.main(["simulate", "--config", cfg, "--out", str(tmp_path / name)]) == 0
    for f in ("timeseries.csv", "monitors.csv", "summary.json"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_simulate_bad_config_writes_nothing(tmp_path, capsys):
    out = tmp_path / "out"
    code = cli.main(["simulate", "--config", _write(tmp_path, "grid.N=lots\n"), "--out", str(out)])
    assert code == 2
    assert not out.exists()
    assert "[error]" in capsys.readouterr().err


def test_simulate_blowup_threshold(tmp_path):
    cfg = _write(tmp_path, "grid.N=256\ngrid.R=16\ndata.a=1\nevolution.t_end=0.5\n"
                           "evolution.blowup_threshold=1e-3\n")
    assert cli.main(["simulate", "--config", cfg, "--out", str(tmp_path / "o")]) == 3


def test_verify_unknown_suite(capsys):
    assert cli.main(["verify", "--suite", "everything"]) == 2
    assert "Unknown suite" in capsys.readouterr().err


def test_verify_rejects_zero_workers(capsys):
    assert cli.main(["verify", "--suite", "identities", "--workers", "0"]) == 2
    assert "Bad settings" in capsys.readouterr().err


def test_scan_resolution_floor():
    assert cli.main(["scan", "lemma1", "--resolution", "100"]) == 2


def test_scan_corollary_needs_r0():
    assert cli.main(["scan", "corollary1"]) == 2


def test_scan_corollary_from_r0_file(tmp_path):
    r0_file = _write(tmp_path, json.dumps({"r0": 0.25}), "lemma1.json")
    out = tmp_path / "cor.json"
    code = cli.main(["scan", "corollary1", "--r0-file", r0_file, "--resolution", "4",
                     "--z-max", "3", "--workers", "1", "--out", str(out)])
    assert code == 0
    assert json.loads(out.read_text())["pass"] is True


def test_argparse_rejects_unknown_target():
    with pytest.raises(SystemExit):
        cli.main(["scan", "lemma9"])
