import math

import pytest

import skelcalc as sc


def test_tau_law():
    assert sc.tau_survival(0.0) == 1.0
    assert sc.tau_cdf(1.0) == pytest.approx(1.0 - sc.tau_survival(1.0))
    assert sc.tau_density(1.0) > 0.0
    p = sc.tau_cdf(0.8)
    assert sc.tau_quantile(p) == pytest.approx(0.8, abs=1e-10)
    xs = sc.sample_tau(200000, seed=3)
    mean = sum(xs) / len(xs)
    assert abs(mean - 1.0) < 0.01


def test_skeleton_lattice():
    sk = sc.skeleton(5, seed=2, start=0.25)
    assert sk["level"] == 5
    assert len(sk["times"]) == len(sk["values"])
    assert sk["values"][0] == 0.25
    for a, b in zip(sk["values"], sk["values"][1:]):
        assert abs(b - a) == 2.0**-5
    assert all(t1 > t0 for t0, t1 in zip(sk["times"], sk["times"][1:]))


def test_decompose_square():
    d = sc.decompose("square", 4, seed=5)
    assert all(u == 1.0 for u in d["drift_kernel"])
    for x, m, n in zip(d["delta_x"], d["martingale"], d["drift"]):
        assert x == pytest.approx(d["x0"] + m + n, abs=1e-12)
    assert d["drift"][-1] <= sc.angle_bracket(4, 1.0)


def test_intensity():
    assert sc.angle_bracket(6, 1.0) == pytest.approx(1.0, abs=1e-4)
    assert sc.intensity_h(6, 0.5) == pytest.approx(1.0, abs=1e-6)


def test_energy_and_covariation():
    rows = sc.energy("square", 3, 4, paths=200, seed=1)
    assert [r["k"] for r in rows] == [3, 4]
    for r in rows:
        assert r["e2_conditional"].mean == pytest.approx(r["e2_raw"].mean)
    cov = sc.covariation("identity-terminal", "identity-terminal", [1.0], 5, 5, paths=300)
    assert cov[0]["estimate"].mean == pytest.approx(1.0, abs=0.05)


def test_local_time_and_brackets():
    c = sc.local_time_curve(3, band=1, paths=200)
    assert len(c["x"]) == len(c["mean"]) == 32
    b = sc.crossing_brackets(lambda x: math.sin(x), 5, path=4)
    assert b["bracket_fa"] == pytest.approx(b["direct_fa"], rel=1e-12, abs=1e-15)
    assert b["bracket_ff"] == pytest.approx(b["direct_ff"], rel=1e-12, abs=1e-15)


def test_residual_and_fbm():
    r = sc.representation_residual("identity-terminal", 4, paths=100, grid_dt=1e-3)
    assert r["variance_ratio"].mean < 0.1
    rows = sc.fbm_scan(math.sin, 0.75, 2, 3, paths=20, grid_dt=1.0 / 512)
    assert rows[0]["e2_raw"].mean > rows[1]["e2_raw"].mean


def test_errors():
    with pytest.raises(ValueError):
        sc.decompose("no-such-functional", 3)
    with pytest.raises(ValueError):
        sc.energy("square", 3, 3, engine="bogus")
    with pytest.raises(ValueError):
        sc.fbm_scan(math.sin, 0.4, 2, 3, paths=2)
