import json
import math
import os
import subprocess

import numpy as np
import pytest

import arpp


def test_frozen_knots():
    r1, r2 = arpp.solve_knots(1.5, 10.0, 0.2, 3.0)
    assert r1 == pytest.approx(11.714968795367226, rel=1e-12)
    assert r2 == pytest.approx(3.9059547769037935, rel=1e-12)
    with pytest.raises(arpp.NumericalError):
        arpp.solve_knots(0.9, 10.0, 0.2, 3.0)


def test_phi_shape():
    r = np.array([1.0, 3.0, 10.0, 50.0, 150.0])
    v = arpp.phi(r, 1.5, 10.0, 0.2, hardcore_radius=3.0)
    assert v[0] == 0.0 and v[1] == 0.0
    assert v[2] == pytest.approx(1.5)
    assert 1.0 < v[3] < 1.5
    assert v[4] == 1.0


def test_simulate_is_deterministic_and_inside():
    w = arpp.Window.disc(0.0, 0.0, 200.0)
    kw = dict(lam=3e-4, theta1=1.5, theta2=10.0, theta3=0.2, k=1.4, hardcore_radius=3.0,
              n_samples=2, burn_in=20000, thin=2000, seed=3)
    a = arpp.simulate(w, **kw)
    b = arpp.simulate(w, **kw)
    assert len(a) == 2
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x, y)
        assert x.shape[1] == 2
        assert np.all(np.hypot(x[:, 0], x[:, 1]) <= 200.0)
    d = np.hypot(*(a[0][:, None, :] - a[0][None, :, :]).transpose(2, 0, 1))
    np.fill_diagonal(d, np.inf)
    assert d.min() > 3.0
    assert math.isfinite(arpp.log_h(a[0], w, 3e-4, 1.5, 10.0, 0.2, 1.4, 3.0))


def test_k_hat_and_pcf():
    rng = np.random.default_rng(1)
    w = arpp.Window.rect(0.0, 0.0, 500.0, 500.0)
    pts = rng.uniform(0.0, 500.0, size=(250, 2))
    r = np.linspace(5.0, 60.0, 12)
    k = arpp.k_hat(pts, w, r)
    assert np.all(np.diff(k) >= 0)
    est = arpp.pcf([pts], w, r, bootstrap=199, seed=2)
    assert set(est) >= {"r", "g_hat", "lo95", "hi95", "delta"}
    assert np.all(est["lo95"] <= est["hi95"])
    assert abs(np.mean(est["g_hat"]) - 1.0) < 0.2
    with pytest.raises(arpp.DataError):
        arpp.pcf([np.array([[1.0, 1.0]])], w, r)
    with pytest.raises(arpp.DataError):
        arpp.k_hat(np.array([[1.0, 1.0], [900.0, 1.0]]), w, r)


def test_hpd_and_mcse():
    rng = np.random.default_rng(4)
    s = rng.standard_normal(100000)
    lo, hi = arpp.hpd(s)
    assert abs(lo + 1.96) < 0.03 and abs(hi - 1.96) < 0.03
    assert arpp.batch_means_mcse(s) == pytest.approx(1 / math.sqrt(s.size), rel=0.15)
    with pytest.raises(arpp.DataError):
        arpp.batch_means_mcse(s[:50])


def test_fit_small_chain():
    w = arpp.Window.disc(0.0, 0.0, 200.0)
    data = arpp.simulate(w, 3e-4, 1.5, 10.0, 0.2, 1.4, hardcore_radius=3.0, burn_in=50000, seed=5)
    chain = arpp.fit(data, w, hardcore_radius=3.0, n_outer=30, m_inner=300, seed=6)
    assert chain["names"] == ["lambda", "theta1", "theta2", "theta3", "k"]
    assert chain["samples"].shape == (30, 5)
    assert 0.0 <= chain["acceptance_rate"] <= 1.0


def test_cli_round_trip(tmp_path):
    cli = os.environ.get("ARPP_CLI")
    if not cli:
        pytest.skip("ARPP_CLI not set")
    cfg = {
        "window": {"type": "disc", "center": [0, 0], "radius": 200},
        "seed": 7,
        "simulate": {"params": {"lambda": 3e-4, "theta1": 1.5, "theta2": 10, "theta3": 0.2,
                                "k": 1.4, "hardcore_radius": 3},
                     "n_samples": 1, "burn_in": 5000},
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    out = subprocess.run([cli, "simulate", "--config", str(path)], capture_output=True, text=True)
    assert out.returncode == 0, out.stderr
    written = arpp.run("simulate", str(path))
    assert [os.path.basename(p) for p in written] == ["pattern_1.csv", "simulate_manifest.json"]
    cfg["bogus"] = 1
    path.write_text(json.dumps(cfg))
    bad = subprocess.run([cli, "simulate", "--config", str(path)], capture_output=True, text=True)
    assert bad.returncode == 2
    with pytest.raises(arpp.ConfigError):
        arpp.run("simulate", str(path))
