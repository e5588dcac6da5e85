import math

import pytest

import gibbsgeo as g

P0 = [[0.2, 0.8], [0.8, 0.2]]
P1 = [[0.15, 0.85], [0.08, 0.92]]
P2 = [[0.9, 0.1], [0.88, 0.12]]


def jac(rows):
    return g.jacobian_potential(g.StochasticMatrix(rows))


def test_normalize_and_pressure():
    b = g.Potential.raw(g.CylinderFunction(2, 2, [0.3, -0.1, 0.7, 0.2]))
    a = g.normalize(b)
    assert a.is_normalized
    assert g.normalization_residual(a.function) < 1e-10
    assert abs(g.pressure(a)) < 1e-10
    assert sum(g.gibbs_weights(a, 3)) == pytest.approx(1.0, abs=1e-12)


def test_mama_defect():
    rep = g.defects(jac(P0), jac(P1), jac(P2))
    assert rep["pythagorean_type1"] == pytest.approx(-0.3578, abs=5e-4)
    assert set(rep["derivatives"]) >= {"first_j_at_0", "second_j_at_0", "second_logj_at_0"}
    assert g.kl(jac(P0), jac(P1)) == pytest.approx(g.markov_kl(g.StochasticMatrix(P0), g.StochasticMatrix(P1)))


def test_exact_derivative_and_unsupported_endpoint():
    j0, j1, j2 = jac(P0), jac(P1), jac(P2)
    cf = g.derivative_at("j", j0, j2, "first", 0, j1)
    assert cf == pytest.approx(g.derivative_oracle("j", j0, j2, "first", 0, j1), rel=1e-6)
    with pytest.raises(g.UnsupportedDerivative):
        g.derivative_at("log-j", j0, j2, "first", 1, j1)
    with pytest.raises(ValueError):
        g.derivative_at("mixture", j0, j2, "first", 0, j1)


def test_bases():
    assert g.maxent_beta(2).values == [1.0, -1.0, -1.0, 1.0]
    lj = jac([[0.3, 0.7], [0.4, 0.6]])
    gamma = g.markov_gamma(g.StochasticMatrix([[0.3, 0.7], [0.4, 0.6]]), 2)
    assert g.apply_ruelle(lj, gamma).sup_norm() < 1e-12


def test_geodesics():
    assert g.christoffel(0.5, 0.3)[0] == 0.0
    grr, grs, gss = g.markov_metric(0.3, 0.6)
    assert grs == 0.0 and grr > 0 and gss > 0
    path = g.markov_geodesic(0.5, 0.3, math.pi / 2, 0.5)
    assert path["reason"] == "completed"
    assert all(r == 0.5 for r in path["r"])
    lc = g.markov_geodesic(0.35, 0.15, 1.0, 0.3, model="levi-civita")
    assert max(abs(e - 1.0) for e in lc["energy"]) < 1e-7
    with pytest.raises(ValueError):
        g.markov_metric(0.0, 0.5)
