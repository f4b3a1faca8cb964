import csv
import math

import numpy as np
import pytest

from memtools import expfam as ef
from memtools.cramer import cramer_value
from memtools.errors import BracketFailure, DomainError
from memtools.models import NormalFidelity
from memtools.oracle import (OracleReport, dense_prox_1d, derived_reports, descent_lemma_check,
                             dual_point_bisection, fd_gradient, numeric_conjugate, write_reports)


@pytest.mark.parametrize("dist,y,expected", [
    (ef.Normal(0.0, 1.0), 2.0, 2.0),
    (ef.Gamma(1.0, 1.0), 2.0, 1.0 - math.log(2.0)),
    (ef.Logistic(0.0, 1.0), 0.0, 0.0),
    (ef.Poisson(1.0), math.e, math.e * 1.0 - math.e + 1.0),
])
def test_numeric_conjugate_closed_values(dist, y, expected):
    assert numeric_conjugate(dist, y) == pytest.approx(expected, abs=1e-10)


def test_numeric_conjugate_vectorized():
    d = ef.Normal(0.0, 1.0)
    ys = np.array([-1.0, 0.0, 3.0])
    np.testing.assert_allclose(numeric_conjugate(d, ys), ys**2 / 2, atol=1e-10)


@pytest.mark.parametrize("dist,y", [(ef.Poisson(1.0), -0.5), (ef.Gamma(2.0, 1.0), 0.0),
                                    (ef.Gamma(2.0, 1.0), -1.0)])
def test_numeric_conjugate_boundary_raises(dist, y):
    with pytest.raises(BracketFailure):
        numeric_conjugate(dist, y)


def test_numeric_conjugate_poisson_at_zero_is_rate():
    # the supremum is approached as theta -> -inf, where exp underflows
    assert numeric_conjugate(ef.Poisson(3.0), 0.0) == pytest.approx(3.0, abs=1e-12)


def test_dual_point_bisection_matches_log():
    assert dual_point_bisection(ef.Poisson(1.0), 5.0) == pytest.approx(math.log(5.0), abs=1e-13)


def test_fd_gradient_examples():
    np.testing.assert_allclose(fd_gradient(lambda v: 0.5 * v @ v, np.array([1.0, 2.0])), [1, 2], atol=1e-8)
    g = fd_gradient(lambda y: cramer_value(ef.Poisson(1.0), y), math.e)
    assert isinstance(g, float) and g == pytest.approx(1.0, abs=1e-8)
    assert fd_gradient(lambda u: -math.log(u), 2.0) == pytest.approx(-0.5, abs=1e-8)


def test_fd_gradient_one_sided_and_failure():
    def f(u):
        return u * u if u >= 0 else math.inf
    assert fd_gradient(f, 0.0, step=1e-7) == pytest.approx(0.0, abs=1e-6)
    with pytest.raises(DomainError):
        fd_gradient(lambda u: math.inf, 1.0)


def test_dense_prox_golden_ratio():
    # energy kernel, Normal(0,1), t=1: u minimizes u^2/2 + (u - xbar)^2/2
    assert dense_prox_1d("energy", ef.Normal(0.0, 1.0), 1.0, 2.0) == pytest.approx(1.0, abs=1e-9)
    # energy kernel, Poisson(1): log u + u = xbar, solved by u = phi for this xbar
    phi = (1 + math.sqrt(5)) / 2
    u = dense_prox_1d("energy", ef.Poisson(1.0), 1.0, phi + math.log(phi))
    assert u == pytest.approx(phi, abs=1e-9)


def test_dense_prox_bernoulli_and_poisson_entropy():
    assert dense_prox_1d("energy", ef.Bernoulli(0.5), 1.0, 0.5) == 0.5
    # log(u/4) + log(u/16) = 0 gives u = 8
    assert dense_prox_1d("entropy", ef.Poisson(4.0), 1.0, 16.0) == pytest.approx(8.0, rel=1e-9)


def test_dense_prox_array_t():
    t = np.array([[0.5], [2.0]])
    u = dense_prox_1d("energy", ef.Normal(0.0, 1.0), t, np.array([1.0, 3.0]))
    np.testing.assert_allclose(u, np.array([1.0, 3.0]) / (1 + t), atol=1e-9)


def test_descent_lemma_normal_constant():
    A = np.array([[2.0, 1.0], [0.0, 1.5]])
    fid = NormalFidelity(A, np.zeros(2))
    n2 = np.linalg.norm(A, 2)
    assert n2 > 1
    assert descent_lemma_check(fid, "energy", n2**2).passed
    assert not descent_lemma_check(fid, "energy", n2).passed


def test_derived_reports_all_pass():
    reports = derived_reports()
    assert len(reports) == 14
    bad = [r.quantity for r in reports if not r.passed]
    assert not bad


def test_write_reports(tmp_path):
    p = tmp_path / "r.csv"
    write_reports([OracleReport.compare("q", 1.0, 1.0 + 1e-12, 1e-9)], p)
    rows = list(csv.reader(open(p)))
    assert rows[0] == ["quantity", "analytic", "oracle", "abs_err", "rel_err", "pass"]
    assert rows[1][0] == "q" and rows[1][-1] == "pass"


def test_report_relative_error_floor():
    r = OracleReport.compare("small", 1e-12, 2e-12, 1e-11)
    assert r.rel_err == pytest.approx(1e-12) and r.passed
