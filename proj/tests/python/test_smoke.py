import json
import math

import numpy as np
import pytest

import beckner_lab as bl


def test_theta_and_big_theta():
    assert bl.theta(2.0, 3.0, 5.0) == pytest.approx(0.5)
    assert bl.theta(1.0, 1.0, 1.0) == pytest.approx(1.0)
    assert bl.big_theta(2.0, 1.5, 2.5) == pytest.approx(4.0, abs=1e-9)
    v = bl.big_theta(1.5, 1.0, 0.0)
    assert 0.5 - 1e-9 <= v <= 1.0 + 1e-9


def test_theta_surface_csv():
    lines = bl.theta_surface_csv(1.5, [0.0, 1.0, 2.0]).strip().splitlines()
    assert lines[0] == "A,B,theta,lower_bound,upper_bound"
    assert len(lines) == 10


def test_scalar_functions():
    assert bl.erf(1.0) == pytest.approx(math.erf(1.0), abs=1e-14)
    assert bl.lambda_h(1.0 / 64, 4.0) < 4.0
    # Phi(u) ~ 4u, so lambda_h -> lambda as h -> 0.
    assert bl.fv_phi(1e-6) / 1e-6 == pytest.approx(4.0, rel=1e-5)


def test_random_transposition():
    m = bl.model(type="random_transposition", n=3)
    assert m.size == 6
    Q = m.generator()
    assert np.allclose(Q.sum(axis=1), 0.0)
    assert np.allclose(m.pi, 1.0 / 6)
    assert m.spectral_gap() == pytest.approx(1.0)
    assert m.paper_lambda(1.5) == pytest.approx(4.0 / 3.0)


def test_dirichlet_and_entropy():
    m = bl.model({"type": "zero_range", "L": 3, "N": 2})
    rng = np.random.default_rng(1)
    f = rng.normal(size=m.size)
    Q = m.generator()
    assert np.allclose(m.apply(f), Q @ f)
    direct = -float(np.sum(m.pi * f * (Q @ f)))
    assert m.dirichlet_form(f, f) == pytest.approx(direct, rel=1e-12)
    rho = m.random_density(seed=3)
    assert float(np.dot(m.pi, rho)) == pytest.approx(1.0)
    assert m.entropy(1.5, rho) > 0.0


def test_curvature_and_decay():
    m = bl.model(type="birth_death", K=6)
    rho = m.random_density(seed=5, amplitude=1.0)
    lhs, rhs = m.proposition_sides(1.5, rho)
    assert lhs - rhs >= -1e-9 * abs(lhs)
    lam = m.paper_lambda(1.5)
    assert m.ineq_ratio(1.5, rho) >= lam - 1e-6
    traj = m.evolve(1.5, rho, [0.0, 0.5, 1.0, 2.0])
    ent = traj["entropy"]
    assert all(b <= a for a, b in zip(ent, ent[1:]))
    assert min(traj["inst_rate"]) >= lam - 1e-6


def test_constants():
    m = bl.model(type="random_transposition", n=3)
    est = m.beckner_constant(2.0, starts=4, seed=1)
    assert est["value"] == pytest.approx(2.0, rel=1e-6)
    mlsi = m.mlsi_constant(starts=4, seed=1)["value"]
    assert mlsi <= 2.0 + 1e-6


def test_errors():
    with pytest.raises(bl.DomainError):
        bl.theta(2.5, 1.0, 2.0)
    with pytest.raises(ValueError):
        bl.model(type="zero_range", L=0, N=2)
    m = bl.model(type="random_transposition", n=3)
    with pytest.raises(bl.DegenerateInputError):
        m.ineq_ratio(1.5, np.ones(m.size))


def test_chain_json_round_trip():
    m = bl.model(type="bernoulli_laplace", L=4, N=2)
    data = json.loads(m.to_json())
    assert len(data["pi"]) == m.size
