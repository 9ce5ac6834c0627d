import math

import numpy as np
import pytest

import vasclab


def test_canonical_constants():
    c = vasclab.Config()
    s = vasclab.stability(c)
    assert s["stable"]
    assert s["margin"] == pytest.approx(1.0)
    assert s["sigma"] == pytest.approx(1.0)


def test_roots_follow_the_heat_branch():
    c = vasclab.Config()
    lam = vasclab.roots(c, 0.05)
    assert lam[0].real == pytest.approx(-0.05**2, rel=1e-2)


def test_propagator_against_scipy_expm():
    scipy_linalg = pytest.importorskip("scipy.linalg")
    c = vasclab.Config()
    A = vasclab.generator(c, 0.7)
    E = vasclab.propagator(c, 0.7, 1.3)
    np.testing.assert_allclose(E, scipy_linalg.expm(A * 1.3), rtol=1e-10, atol=1e-12)


def test_config_round_trip():
    c = vasclab.Config()
    c.mu = 0.3
    c.q = [2.0, math.inf]
    text = c.serialize()
    assert vasclab.Config.parse(text) == c
    with pytest.raises(vasclab.ConfigError):
        vasclab.Config.parse("[model]\nmu = x\n")


def test_fit_decay_and_theory():
    t = np.geomspace(10, 1000, 20)
    fit = vasclab.fit_decay(t, 2.0 * (1 + t) ** -0.75)
    assert fit["exponent"] == pytest.approx(-0.75, abs=1e-12)
    assert vasclab.theory_exponent("u", 2.0, 3) == pytest.approx(-1.25)


def test_linear_curve_decays():
    c = vasclab.Config()
    v = vasclab.linear_decay_curve(c, [10.0, 100.0], "rho", 2.0)
    assert v[1] < v[0]


def test_small_simulation_conserves_mass():
    c = vasclab.Config()
    c.n = 128
    c.length = 100.0
    c.t_end = 2.0
    c.sample_stride = 1
    out = vasclab.simulate(c)
    assert out["completed"]
    assert np.max(np.abs(out["mass"] / out["mass"][0] - 1)) < 1e-12


def test_verify_suite_passes():
    results = vasclab.verify(vasclab.Config(), 1)
    assert all(r["status"] != "fail" for r in results), results
