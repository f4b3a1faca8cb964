import math

import numpy as np
import pytest
from scipy import integrate, stats

from memtools import expfam as ef
from memtools.errors import DomainError
from memtools.expfam import Region, log_normalizer, log_normalizer_grad, mean, natural_domain_contains
from memtools.oracle import fd_gradient


# ---------------------------------------------------------------- worked examples

def test_log_normalizer_examples():
    assert log_normalizer(ef.Normal(0.0, 1.0), 2.0) == pytest.approx(2.0, abs=1e-15)
    assert log_normalizer(ef.Poisson(1.0), 0.0) == 0.0
    assert log_normalizer(ef.ContinuousUniform(-1.0, 1.0), 0.0) == 0.0
    assert log_normalizer(ef.Gamma(2.0, 1.0), 0.5) == pytest.approx(2 * math.log(2), abs=1e-15)


def test_gradient_examples():
    assert log_normalizer_grad(ef.Normal(0.0, 1.0), 3.0) == pytest.approx(3.0)
    assert log_normalizer_grad(ef.Poisson(2.0), math.log(2)) == pytest.approx(
        fd_gradient(ef.Poisson(2.0).log_normalizer, math.log(2)), rel=1e-8)


def test_mean_examples():
    assert mean(ef.Gamma(3.0, 2.0)) == 1.5
    assert mean(ef.DiscreteUniform(1, 5)) == 3
    assert mean(ef.Bernoulli(0.25)) == 0.25


def test_domain_examples():
    assert natural_domain_contains(ef.Gamma(1.0, 1.0), 0.999) == Region.INTERIOR
    assert natural_domain_contains(ef.Laplace(0.0, 1.0), 1.0) == Region.BOUNDARY
    assert natural_domain_contains(ef.Logistic(0.0, 2.0), 0.6) == Region.OUTSIDE


SEPARABLE = [
    ef.Normal(0.5, 2.0), ef.NIG(0.2, 2.0, 0.5, 1.0, 1.5), ef.Gamma(2.0, 1.5), ef.Laplace(0.3, 0.7),
    ef.Poisson(3.0), ef.Bernoulli(0.3), ef.DiscreteUniform(-2, 5), ef.ContinuousUniform(-1.0, 2.0),
    ef.Logistic(0.5, 0.8),
]


@pytest.mark.parametrize("dist", SEPARABLE, ids=lambda d: type(d).__name__)
def test_gradient_at_zero_is_mean(dist):
    assert log_normalizer_grad(dist, 0.0) == pytest.approx(float(dist.mean()), abs=1e-12)


def _interior_thetas(dist, rng, n=20):
    lo, hi = dist.natural_interval()
    lo, hi = max(float(lo), -3.0), min(float(hi), 3.0)
    return rng.uniform(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo), n)


@pytest.mark.parametrize("dist", SEPARABLE, ids=lambda d: type(d).__name__)
def test_gradient_matches_finite_differences(dist, rng):
    for th in _interior_thetas(dist, rng):
        fd = fd_gradient(dist.log_normalizer, th, 1e-6)
        assert dist.log_normalizer_grad(th) == pytest.approx(fd, rel=1e-5, abs=1e-7)


@pytest.mark.parametrize("dist", SEPARABLE, ids=lambda d: type(d).__name__)
def test_hessian_matches_finite_differences(dist, rng):
    for th in _interior_thetas(dist, rng, 10):
        fd = fd_gradient(dist.log_normalizer_grad, th, 1e-6)
        assert dist.log_normalizer_hess(th) == pytest.approx(fd, rel=1e-5, abs=1e-7)


def _mgf_oracle(dist, th):
    """log E[exp(theta X)] by quadrature or summation of scipy.stats densities."""
    if isinstance(dist, ef.Poisson):
        k = np.arange(0, 400)
        return math.log(np.sum(stats.poisson(dist.lam).pmf(k) * np.exp(th * k)))
    if isinstance(dist, ef.Bernoulli):
        return math.log(1 - dist.p + dist.p * math.exp(th))
    if isinstance(dist, ef.DiscreteUniform):
        k = np.arange(dist.a, dist.b + 1)
        return math.log(np.mean(np.exp(th * k)))
    frozen = {
        ef.Normal: lambda d: stats.norm(d.mu, math.sqrt(d.cov)),
        ef.Gamma: lambda d: stats.gamma(d.alpha, scale=1 / d.beta),
        ef.Laplace: lambda d: stats.laplace(d.mu, d.b),
        ef.ContinuousUniform: lambda d: stats.uniform(d.a, d.b - d.a),
        ef.Logistic: lambda d: stats.logistic(d.mu, d.s),
        ef.NIG: lambda d: stats.norminvgauss(d.alpha * d.delta,
                                             d.beta * d.delta * math.sqrt(d.cov),
                                             loc=d.mu, scale=d.delta * math.sqrt(d.cov)),
    }[type(dist)](dist)
    lo, hi = frozen.support()
    val, _ = integrate.quad(lambda x: np.exp(frozen.logpdf(x) + th * x), lo, hi, limit=400, epsabs=0, epsrel=1e-12)
    return math.log(val)


@pytest.mark.parametrize("dist", SEPARABLE, ids=lambda d: type(d).__name__)
def test_log_normalizer_matches_moment_generating_function(dist, rng):
    for th in _interior_thetas(dist, rng, 5) * 0.6:
        assert dist.log_normalizer(th) == pytest.approx(_mgf_oracle(dist, th), rel=1e-7, abs=1e-9)


def test_outside_natural_domain_is_infinite():
    assert log_normalizer(ef.Gamma(1.0, 1.0), 1.5) == np.inf
    assert log_normalizer(ef.Logistic(0.0, 1.0), 1.0) == np.inf
    with pytest.raises(DomainError):
        log_normalizer_grad(ef.Laplace(0.0, 1.0), 1.0)


def test_implicit_families_small_theta_series():
    d = ef.ContinuousUniform(-1.0, 3.0)
    for th in (1e-12, 1e-6, 1e-3, 0.04, 0.06):
        fd = fd_gradient(d.log_normalizer, th, 1e-6)
        assert d.log_normalizer_grad(th) == pytest.approx(fd, rel=1e-8)
    assert d.log_normalizer_grad(1e-14) == pytest.approx(1.0, abs=1e-12)


def test_series_helpers_continuous_across_cutoff():
    x = np.array([0.05 - 1e-12, 0.05 + 1e-12])
    for f in (ef.log_sinhc, ef.langevin, ef.langevin_prime, ef.log_xcsc, ef.inv_x_minus_cot, ef.csc2_minus_inv2):
        v = f(x)
        assert abs(v[1] - v[0]) < 1e-10


def test_joint_normal():
    cov = np.array([[2.0, 0.5], [0.5, 1.0]])
    d = ef.Normal(np.array([1.0, -1.0]), cov)
    th = np.array([0.3, -0.2])
    assert d.log_normalizer(th) == pytest.approx(th @ d.mu + 0.5 * th @ cov @ th)
    np.testing.assert_allclose(d.log_normalizer_grad(th), d.mu + cov @ th)
    np.testing.assert_allclose(d.log_normalizer_grad(th), fd_gradient(d.log_normalizer, th), rtol=1e-7)


def test_joint_nig_gradient():
    d = ef.NIG(np.zeros(2), 2.0, np.array([0.3, -0.4]), 0.5, np.eye(2))
    th = np.array([0.4, 0.9])
    np.testing.assert_allclose(d.log_normalizer_grad(th), fd_gradient(d.log_normalizer, th), rtol=1e-6)
    assert np.allclose(d.log_normalizer_grad(np.zeros(2)), d.mean())


def test_multinomial_and_negative_multinomial():
    m = ef.Multinomial(5, np.array([0.3, 0.3]))
    th = np.array([0.2, -0.1])
    direct = 5 * math.log(0.4 + 0.3 * math.exp(0.2) + 0.3 * math.exp(-0.1))
    assert m.log_normalizer(th) == pytest.approx(direct)
    np.testing.assert_allclose(m.mean(), [1.5, 1.5])
    nm = ef.NegativeMultinomial(np.array([0.2, 0.3]), 2.0)
    np.testing.assert_allclose(nm.log_normalizer_grad(np.zeros(2)), nm.mean())
    np.testing.assert_allclose(nm.log_normalizer_grad(th), fd_gradient(nm.log_normalizer, th), rtol=1e-6)


@pytest.mark.parametrize("build", [
    lambda: ef.Gamma(-1.0, 1.0), lambda: ef.Poisson(0.0), lambda: ef.Bernoulli(1.0),
    lambda: ef.Laplace(0.0, 0.0), lambda: ef.Normal(0.0, -1.0), lambda: ef.NIG(0.0, 1.0, 2.0, 1.0, 1.0),
    lambda: ef.ContinuousUniform(1.0, 1.0), lambda: ef.DiscreteUniform(0.5, 2),
    lambda: ef.Multinomial(3, np.array([0.6, 0.5])), lambda: ef.Logistic(0.0, -1.0),
    lambda: ef.Normal(np.zeros(2), np.array([[1.0, 2.0], [2.0, 1.0]])),
])
def test_invalid_parameters_rejected(build):
    with pytest.raises(DomainError):
        build()


def test_nan_theta_rejected():
    with pytest.raises(DomainError):
        log_normalizer(ef.Normal(0.0, 1.0), np.nan)


def test_strategy_labels():
    assert ef.Logistic(0.0, 1.0).strategy == "implicit_scalar_root"
    assert ef.Gamma(1.0, 1.0).strategy == "closed_form"
