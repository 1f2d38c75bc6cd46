import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import shocklab as sl
from shocklab.config import emit_config, parse_config
from shocklab.errors import BadMagic, ConfigError, TruncatedFile

MINIMAL = """\
# Burgers pair with a planar front
flux.burgers_d = 2
pair.u_minus = 1.0
pair.u_plus = -1.0
profile.front = planar
profile.nu = 1,0
grid.counts = 32,32
grid.box = -2,2,-2,2
experiment.horizon = 1.0
output.dir = out
"""


def test_parse_minimal_and_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.get("scheme.numerical_flux") == "rusanov"
    assert cfg.get("cone.resolution") == 1e-4
    assert cfg.get("scheme.frame") == "reduced"
    pair = cfg.build_pair()
    assert pair.u_minus == 1.0
    grid = cfg.build_grid()
    assert grid.counts == (32, 32)
    prof = cfg.build_profile()
    assert prof.rho == 0.0


def test_parse_poly_flux():
    cfg = parse_config("flux.poly = [[0,0,1],[0,0,0,1]]\n")
    assert cfg.build_flux().coeffs == sl.burgers_flux(2).coeffs


def test_wrong_order_reports_line():
    text = "flux.burgers_d = 2\npair.u_minus = -1\npair.u_plus = 1\n"
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    (line, msg), = err.value.diagnostics
    assert line == 3
    assert "u_plus" in msg


def test_unknown_key_is_an_error():
    with pytest.raises(ConfigError) as err:
        parse_config("flux.burgers_d = 2\nscheme.nmerical_flux = rusanov\n")
    (line, msg), = err.value.diagnostics
    assert line == 2 and "unknown key" in msg


def test_malformed_line():
    with pytest.raises(ConfigError):
        parse_config("this is not an assignment\n")
    with pytest.raises(ConfigError):
        parse_config("nokey = 3\n")


def test_bad_value_reports_line():
    with pytest.raises(ConfigError) as err:
        parse_config("pair.u_minus = not_a_number\n")
    (line, _), = err.value.diagnostics
    assert line == 1


def test_bad_enum():
    with pytest.raises(ConfigError):
        parse_config("scheme.numerical_flux = weno\n")


def test_roundtrip_emit_parse():
    cfg = parse_config(MINIMAL)
    text = emit_config(cfg)
    cfg2 = parse_config(text)
    assert cfg.raw == cfg2.raw
    assert emit_config(cfg2) == text


def test_roundtrip_with_poly_and_perturbation():
    text = (
        "flux.poly = [[0.0,0.5,1.5],[0.0,0.0,2.0]]\n"
        "perturbation.shape = bump\n"
        "perturbation.center = 1.5,-0.25\n"
        "perturbation.radius = 0.75\n"
        "perturbation.amplitude = 1.25\n"
    )
    cfg = parse_config(text)
    assert parse_config(emit_config(cfg)).raw == cfg.raw
    phi = cfg.build_perturbation()
    assert phi.center == (1.5, -0.25)


def test_sum_perturbation():
    text = (
        "perturbation.shape = sum\n"
        "perturbation.terms = bump:0,0,1,0.5; indicator:2,2,0.5,1.0\n"
    )
    phi = parse_config(text).build_perturbation()
    assert phi.shape == "sum"
    assert len(phi.terms) == 2
    assert phi.terms[1].shape == "indicator"
    assert phi.terms[0](np.array([[0.0, 0.0]]))[0] == pytest.approx(0.5)


def test_overrides_last_wins():
    cfg = parse_config(MINIMAL + "pair.u_minus = 2.0\n")
    assert cfg.get("pair.u_minus") == 2.0


@settings(deadline=None, max_examples=30)
@given(
    st.floats(min_value=-5, max_value=5, allow_nan=False),
    st.integers(min_value=4, max_value=64),
    st.sampled_from(["rusanov", "engquist-osher"]),
)
def test_roundtrip_property(u_minus, n, kind):
    text = (
        f"pair.u_minus = {u_minus!r}\n"
        f"pair.u_plus = {u_minus - 1.0!r}\n"
        f"grid.counts = {n},{n}\n"
        f"grid.box = 0,1,0,1\n"
        f"scheme.numerical_flux = {kind}\n"
        "flux.burgers_d = 2\n"
    )
    cfg = parse_config(text)
    assert parse_config(emit_config(cfg)).raw == cfg.raw


def test_snapshot_roundtrip_bit_exact(tmp_path, rng):
    g = sl.Grid.from_box((0, 1, -1, 1), (16, 32))
    f = sl.Field(g, rng.normal(size=g.counts))
    path = tmp_path / "f.shkw"
    sl.write_snapshot(f, path, time=1.25)
    f2, t = sl.read_snapshot(path)
    assert t == 1.25
    assert f2.grid == g
    assert np.array_equal(f.values, f2.values)
    # byte-identical on rewrite
    data1 = path.read_bytes()
    sl.write_snapshot(f, path, time=1.25)
    assert path.read_bytes() == data1


def test_snapshot_bad_magic(tmp_path):
    path = tmp_path / "bad.shkw"
    path.write_bytes(b"NOPE!" + b"\x00" * 64)
    with pytest.raises(BadMagic):
        sl.read_snapshot(path)


def test_snapshot_truncated(tmp_path, rng):
    g = sl.Grid.from_box((0, 1, 0, 1), (8, 8))
    f = sl.Field(g, rng.normal(size=g.counts))
    path = tmp_path / "f.shkw"
    sl.write_snapshot(f, path)
    raw = path.read_bytes()
    path.write_bytes(raw[: len(raw) - 17])
    with pytest.raises(TruncatedFile):
        sl.read_snapshot(path)
    path.write_bytes(raw[:9])
    with pytest.raises(TruncatedFile):
        sl.read_snapshot(path)


def test_probes_csv_deterministic(tmp_path):
    from shocklab.snapshots import write_probes_csv

    header = ["t", "sup"]
    rows = np.array([[0.0, 1.0], [0.1, 0.9999999999999997]])
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    write_probes_csv(header, rows, p1)
    write_probes_csv(header, rows, p2)
    assert p1.read_bytes() == p2.read_bytes()
    text = p1.read_text()
    assert text.splitlines()[0] == "t,sup"
    back = float(text.splitlines()[2].split(",")[1])
    assert back == 0.9999999999999997


def test_verdict_format():
    from shocklab.experiments import Check, ExperimentReport
    from shocklab.snapshots import format_verdict

    rep = ExperimentReport("demo", [
        Check("alpha", True, 1.0, 2.0),
        Check("beta", False, 3.0, 2.0, "too big"),
    ])
    text = format_verdict(rep)
    lines = text.splitlines()
    assert lines[0] == "experiment: demo"
    assert lines[1].startswith("alpha: pass")
    assert lines[2].startswith("beta: fail")
    assert lines[-1] == "overall: fail"
