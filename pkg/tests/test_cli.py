import io

import numpy as np
import pytest

import shocklab as sl
from shocklab.cli import main

CONE_CFG = """\
flux.burgers_d = 2
pair.u_minus = 1.0
pair.u_plus = -1.0
cone.resolution = 1e-6
output.dir = {out}
"""

SIM_CFG = """\
flux.burgers_d = 2
pair.u_minus = 1.0
pair.u_plus = -1.0
profile.front = planar
profile.nu = 1,0
grid.counts = 48,48
grid.box = -1.5,1.5,-1.5,1.5
experiment.horizon = 0.4
experiment.snapshot_interval = 0.2
output.dir = {out}
"""


def run_cli(args):
    out, err = io.StringIO(), io.StringIO()
    code = main(args, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_cone_command(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text(CONE_CFG.format(out=tmp_path / "out"))
    code, out, err = run_cli(["cone", "--config", str(cfg)])
    assert code == 0
    rays = [line.split(",") for line in out.splitlines() if line.startswith("primal_ray")]
    angles = sorted(np.arctan2(float(r[2]), float(r[1])) for r in rays)
    assert angles[0] == pytest.approx(-np.pi / 4, abs=1e-5)
    assert angles[1] == pytest.approx(np.pi / 4, abs=1e-5)
    assert (tmp_path / "out" / "verdict.txt").read_text().splitlines()[-1] == "overall: pass"


def test_unknown_subcommand():
    code, _, _ = run_cli(["explode", "--config", "x.cfg"])
    assert code == 2


def test_missing_config(tmp_path):
    code, _, err = run_cli(["cone", "--config", str(tmp_path / "absent.cfg")])
    assert code == 2


def test_config_error_exit(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("flux.burgers_d = 2\npair.u_minus = -1\npair.u_plus = 1\n")
    code, _, err = run_cli(["cone", "--config", str(cfg)])
    assert code == 2
    assert "config error" in err


def test_unknown_key_exit(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("flux.burgers_d = 2\nnope.key = 1\n")
    code, _, err = run_cli(["cone", "--config", str(cfg)])
    assert code == 2
    assert "unknown key" in err


def test_set_override(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text(CONE_CFG.format(out=tmp_path / "out"))
    code, out, _ = run_cli(["cone", "--config", str(cfg),
                            "--set", "pair.u_minus=1.5", "--set", "pair.u_plus=0.5"])
    assert code == 0
    # the sector is no longer symmetric about the first axis
    rays = [line.split(",") for line in out.splitlines() if line.startswith("primal_ray")]
    angles = sorted(np.arctan2(float(r[2]), float(r[1])) for r in rays)
    assert abs(angles[0] + angles[1]) > 1e-3


def test_simulate_writes_outputs_and_is_deterministic(tmp_path):
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    cfg = tmp_path / "s.cfg"
    cfg.write_text(SIM_CFG.format(out=out1))
    code, _, _ = run_cli(["simulate", "--config", str(cfg)])
    assert code == 0
    assert (out1 / "probes.csv").exists()
    assert (out1 / "final.shkw").exists()
    snaps = sorted(out1.glob("snap_*.shkw"))
    assert len(snaps) == 2
    field, t = sl.read_snapshot(snaps[-1])
    assert t == pytest.approx(0.4)
    code, _, _ = run_cli(["simulate", "--config", str(cfg), "--set", f"output.dir={out2}"])
    assert code == 0
    assert (out1 / "probes.csv").read_bytes() == (out2 / "probes.csv").read_bytes()
    assert (out1 / "final.shkw").read_bytes() == (out2 / "final.shkw").read_bytes()


def test_profile_command(tmp_path):
    cfg = tmp_path / "p.cfg"
    cfg.write_text(SIM_CFG.format(out=tmp_path / "out"))
    code, out, _ = run_cli(["profile", "--config", str(cfg),
                            "--set", "profile.front=abs_scaled", "--set", "profile.slope=0.5"])
    assert code == 0
    rho = float([l for l in out.splitlines() if l.startswith("rho")][0].split(",")[1])
    assert rho == pytest.approx(0.5, abs=1e-6)
    front = (tmp_path / "out" / "front.csv").read_text().splitlines()
    assert front[0] == "y,psi"


def test_support_command(tmp_path):
    cfg = tmp_path / "sup.cfg"
    cfg.write_text(
        "flux.burgers_d = 2\n"
        "pair.u_minus = 1.0\n"
        "pair.u_plus = -1.0\n"
        "grid.counts = 96,96\n"
        "grid.box = -3,9,-3,9\n"
        "perturbation.shape = bump\n"
        "perturbation.center = 0,0\n"
        "perturbation.radius = 0.8\n"
        "perturbation.amplitude = 0.1\n"
        "experiment.horizon = 1.0\n"
        f"output.dir = {tmp_path / 'out'}\n"
    )
    code, _, err = run_cli(["support", "--config", str(cfg)])
    assert code == 0
    assert "containment: pass" in (tmp_path / "out" / "verdict.txt").read_text()


def test_normalize_check_command(tmp_path):
    cfg = tmp_path / "n.cfg"
    cfg.write_text(f"flux.burgers_d = 2\nexperiment.u_ref = 0.8\noutput.dir = {tmp_path / 'out'}\n")
    code, out, _ = run_cli(["normalize-check", "--config", str(cfg)])
    assert code == 0
    levels = [float(l.split(",")[1]) for l in out.splitlines() if l.startswith("residual_level")]
    assert len(levels) == 4
    assert levels[0] > levels[-1]


def test_overhead_command(tmp_path):
    cfg = tmp_path / "ov.cfg"
    cfg.write_text(
        "flux.burgers_d = 2\n"
        "pair.u_minus = 1.0\n"
        "pair.u_plus = -1.0\n"
        "profile.front = planar\n"
        "profile.nu = 1,0\n"
        "grid.counts = 64,96\n"
        "grid.box = -2.5,1.5,-3,3\n"
        "perturbation.shape = bump\n"
        "perturbation.center = -1.2,-0.8\n"
        "perturbation.radius = 0.7\n"
        "perturbation.amplitude = 0.5\n"
        "experiment.horizon = 5.0\n"
        "experiment.settle_steps = 600\n"
        f"output.dir = {tmp_path / 'out'}\n"
    )
    code, _, _ = run_cli(["overhead", "--config", str(cfg)])
    assert code == 0
    verdict = (tmp_path / "out" / "verdict.txt").read_text()
    assert "extinction: pass" in verdict
    assert "domination: pass" in verdict


def test_threads_env_validation(tmp_path, monkeypatch):
    cfg = tmp_path / "c.cfg"
    cfg.write_text(CONE_CFG.format(out=tmp_path / "out"))
    monkeypatch.setenv("SHOCKLAB_THREADS", "zero")
    code, _, err = run_cli(["cone", "--config", str(cfg)])
    assert code == 2
    assert "SHOCKLAB_THREADS" in err
    monkeypatch.setenv("SHOCKLAB_THREADS", "2")
    code, _, _ = run_cli(["cone", "--config", str(cfg)])
    assert code == 0
