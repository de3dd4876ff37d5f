import json
import math

import pytest

import icflow


def test_warp_and_circle_geometry():
    hyp = icflow.SpaceForm(-1)
    phi, dphi, Phi = hyp.warp(1.0)
    assert phi == pytest.approx(math.sinh(1.0), rel=1e-15)
    assert dphi == pytest.approx(math.cosh(1.0), rel=1e-15)
    c = icflow.RadialCurve(hyp, [1.0] * 256)
    assert icflow.length(c) == pytest.approx(2 * math.pi * math.sinh(1.0), rel=1e-12)
    assert icflow.area(c) == pytest.approx(2 * math.pi * (math.cosh(1.0) - 1.0), rel=1e-12)
    assert max(abs(v) for v in icflow.rhs(c)) <= 1e-12


def test_invalid_curves_raise():
    with pytest.raises(ValueError):
        icflow.RadialCurve(icflow.SpaceForm(1), [1.6] * 32)
    with pytest.raises(ValueError):
        icflow.SpaceForm(2)


def test_report_and_csv_round_trip():
    c = icflow.random_curve(0, 128, 7)
    r = icflow.report(c)
    assert r["hk_gap"] >= -1e-8
    assert r["weighted_margin"] >= -1e-8
    back = icflow.from_csv(c.to_csv())
    assert back.rho == c.rho


def test_flow_converges_and_preserves_length():
    c = icflow.fourier_curve(0, 64, 1.0, "2:0.05,3:0:0.015")
    s = icflow.run_flow(c)
    assert s["status"] == "Converged"
    assert s["length_drift"] <= 1e-5


def test_counterexample_command(tmp_path):
    code, log, err = icflow.run_command("counterexample", tmp_path, N=512)
    assert code == 0, err
    cert = json.loads((tmp_path / "certificate.json").read_text())
    assert cert["gap"] > 0
    assert cert["refinement_check"]["pass"]


def test_config_error_exit_code(tmp_path):
    code, _, err = icflow.run_command("simulate", tmp_path, K=1, r0=1.6)
    assert code == 1
    assert "r_max" in err
