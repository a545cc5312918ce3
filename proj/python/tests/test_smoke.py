import math

import numpy as np
import pytest

import gnormal


def test_generator_parameters():
    g = gnormal.GFunction(1.0, 2.0)
    assert g.beta == 2.0
    assert g.sigma == 1.5
    assert g(1.0) == 2.0
    assert g(-1.0) == -0.5
    assert gnormal.GFunction.from_beta_sigma(2.0, 1.5) == g
    with pytest.raises(ValueError):
        gnormal.GFunction(2.0, 1.0)
    with pytest.raises(ValueError):
        gnormal.GFunction(0.0, 1.0).beta


def test_phi_vectorized():
    x = np.linspace(-5.0, 5.0, 101)
    np.testing.assert_allclose(gnormal.phi(1.0, x), np.cos(x), atol=1e-14)
    assert gnormal.phi(2.0, math.pi) == pytest.approx(-4.0 / 3.0, abs=1e-14)
    assert gnormal.phi_d2(2.0, 0.0) == pytest.approx(-1.5, abs=1e-15)
    assert gnormal.separation_gap(1.0, 2.0) == pytest.approx(1.0 / 3.0, abs=1e-15)
    assert gnormal.eigen_residual((1.0, 2.0), 2.0) <= 1e-12


def test_solve_eigenfunction_decay():
    n = 512
    x = np.arange(n) * 2.0 * math.pi / n
    out = gnormal.solve("1:2:1", gnormal.phi(2.0, x), 0.0, 2.0 * math.pi, error_estimate=True)
    exact = math.exp(-1.125) * gnormal.phi(2.0, out["x"])
    assert np.max(np.abs(out["u"] - exact)) <= 1e-3
    assert out["error_estimate"] is not None
    same = gnormal.solve([(1.0, 2.0, 1.0)], gnormal.phi(2.0, x), 0.0, 2.0 * math.pi)
    np.testing.assert_array_equal(out["u"], same["u"])


def test_expectations():
    r = gnormal.expect((1.0, 1.0), "cos", n=1024)
    assert r["value"] == pytest.approx(math.exp(-0.5), abs=5e-4)
    assert gnormal.classical_expect(1.0, "cos") == pytest.approx(math.exp(-0.5), abs=1e-7)
    v = gnormal.convolve([(1.0, 1.0), (1.0, 1.0)], "cos", n=1024)["value"]
    assert v == pytest.approx(math.exp(-1.0), abs=5e-4)
    cand = gnormal.candidate_normal((1.0, 2.0), (2.0, 4.0))
    assert cand.beta == pytest.approx(2.0)


def test_custom_test_function():
    f = gnormal.TestFunction.custom(lambda x: max(-3.0, min(3.0, x * x)), bound=3.0, lipschitz=2.0 * math.sqrt(3.0))
    r = gnormal.expect((0.5, 0.5), f, n=256)
    assert r["value"] == pytest.approx(gnormal.classical_expect(0.5, f), abs=2e-3)
    with pytest.raises(ValueError):
        gnormal.TestFunction("cos:amp=2")


def test_reports():
    sep = gnormal.check_separation(1.5, 3.0)
    assert sep.verdict == "confirmed"
    assert sep.exit_code == 0
    assert sep.to_csv().startswith("t,x,quantity,measured,reference,error_estimate,bound\n")
    eig = gnormal.check_eigen_decay((1.0, 2.0), t=[1.0], n=256)
    assert eig.verdict == "confirmed"
    th2 = gnormal.verify_theorem2((1.0, 1.5), (1.0, 3.0), t=[8.0], n=256)
    assert th2.verdict == "confirmed"
    gaps = [row["measured"] for row in th2.sweep if row["quantity"] == "gap"]
    assert gaps and gaps[0] >= 0.25
