"""End-to-end acceptance checks, one test per criterion.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""
import os
import time

import numpy as np
import pytest

from catalog import CELLS, sample_request
from memtools import expfam as ef
from memtools.cli import gen_barcode, main
from memtools.cramer import cramer_grad, cramer_value, cramer_value_elementwise, cramer_value_rows
from memtools.errors import StepSizeError
from memtools.kernels import get_kernel
from memtools.linops import finite_difference_2d, gaussian_blur, identity
from memtools.models import (GammaFidelity, NormalFidelity, PoissonFidelity, Problem, Regularizer,
                             fidelity_grad)
from memtools.oracle import dense_prox_1d, descent_lemma_check, fd_gradient, numeric_conjugate
from memtools.prox import bregman_prox, dual_prox_theta, prox_residual
from memtools.solvers import SolverOptions, bpg, chambolle_pock_nig_tv, fista

CONFIGS = os.path.join(os.path.dirname(__file__), os.pardir, "configs")

UNIVARIATE = [
    ef.Normal(0.5, 2.0), ef.NIG(0.2, 2.0, 0.5, 1.0, 1.5), ef.Gamma(2.0, 1.5), ef.Laplace(0.3, 0.7),
    ef.Poisson(3.0), ef.Bernoulli(0.3), ef.DiscreteUniform(-2, 5), ef.ContinuousUniform(-1.0, 2.0),
    ef.Logistic(0.5, 0.8),
]

JOINT = [
    ef.Normal(np.array([0.5, -1.0]), np.array([[2.0, 0.4], [0.4, 1.0]])),
    ef.NIG(np.array([0.1, -0.2]), 1.5, np.array([0.2, 0.1]), 0.7, np.array([[1.0, 0.2], [0.2, 0.5]])),
    ef.Multinomial(4, np.array([0.2, 0.3, 0.1])),
    ef.NegativeMultinomial(np.array([0.2, 0.3]), 2.0),
]


def interior_y(dist, rng, n):
    lo, hi = dist.support_interval()
    lo = float(lo) if np.isfinite(lo) else float(dist.mean()) - 6.0
    hi = float(hi) if np.isfinite(hi) else float(dist.mean()) + 6.0
    pad = 1e-3 * (hi - lo)
    return rng.uniform(lo + pad, hi - pad, n)


def joint_domain_points(dist, rng, n):
    d = dist.dim
    if isinstance(dist, ef.Multinomial):
        w = rng.dirichlet(np.ones(d + 1), n)
        return dist.n * w[:, :d]
    if isinstance(dist, ef.NegativeMultinomial):
        return rng.exponential(3.0, (n, d))
    return dist.mean() + 3.0 * rng.standard_normal((n, d))


def interior_theta(dist, rng, n):
    lo, hi = dist.natural_interval()
    lo, hi = max(float(lo), -3.0), min(float(hi), 3.0)
    return rng.uniform(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo), n)


def rel_close(a, b, rtol):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return bool(np.all(np.abs(a - b) <= rtol * np.maximum(1.0, np.abs(b))))


def monotone(values, slack):
    v = np.asarray(values)
    return float(np.max(np.diff(v), initial=-np.inf)) <= slack


@pytest.mark.criterion(1, "rate functions agree with the numeric conjugate (1e-6, under 10 s)")
def test_conjugate_oracle_suite():
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    worst = 0.0
    for dist in UNIVARIATE:
        ys = interior_y(dist, rng, 20)
        err = np.abs(cramer_value_elementwise(dist, ys) - numeric_conjugate(dist, ys))
        worst = max(worst, float(err.max()))
    elapsed = time.perf_counter() - start
    print(f"worst |value - oracle| = {worst:.2e}, {elapsed:.2f} s")
    assert worst <= 1e-6
    assert elapsed < 10.0


@pytest.mark.criterion(2, "rate function vanishes at the mean and is nonnegative on its domain")
def test_rate_function_invariants():
    rng = np.random.default_rng(102)
    for dist in UNIVARIATE:
        assert abs(cramer_value(dist, dist.mean())) <= 1e-12
        assert np.all(cramer_value_elementwise(dist, interior_y(dist, rng, 1000)) >= -1e-12)
    for dist in JOINT:
        assert abs(cramer_value(dist, np.asarray(dist.mean(), dtype=float))) <= 1e-12
        assert np.all(cramer_value_rows(dist, joint_domain_points(dist, rng, 1000)) >= -1e-12)


@pytest.mark.criterion(3, "analytic gradients match central differences (relative 1e-5)")
def test_gradient_suite():
    rng = np.random.default_rng(103)
    step = 1e-6
    for dist in UNIVARIATE:
        for y in interior_y(dist, rng, 20):
            assert rel_close(cramer_grad(dist, y), fd_gradient(lambda v: cramer_value(dist, v), y, step), 1e-5)
        for th in interior_theta(dist, rng, 20):
            assert rel_close(dist.log_normalizer_grad(th), fd_gradient(dist.log_normalizer, th, step), 1e-5)
    for dist in JOINT:
        for y in joint_domain_points(dist, rng, 20):
            assert rel_close(cramer_grad(dist, y), fd_gradient(lambda v: cramer_value(dist, v), y, step), 1e-5)
    A = rng.uniform(0.1, 1.0, (6, 4))
    for cls in (NormalFidelity, PoissonFidelity, GammaFidelity):
        fid = cls(A, A @ rng.uniform(0.5, 2.0, 4))
        for x in rng.uniform(0.3, 3.0, (20, 4)):
            assert rel_close(fidelity_grad(fid, x), fd_gradient(fid.value, x, step), 1e-5)


@pytest.mark.criterion(4, "prox catalog: residuals, Moreau identity, scalar oracle, mean fixed point")
def test_prox_catalog():
    rng = np.random.default_rng(104)
    worst = dict(residual=0.0, moreau=0.0, oracle=0.0)
    for kernel, prior in CELLS:
        h = get_kernel(kernel)
        requests = [sample_request(kernel, prior, rng) for _ in range(20)]
        outputs = []
        for t, xbar in requests:
            r = bregman_prox(kernel, prior, t, xbar)
            outputs.append(r.x)
            worst["residual"] = max(worst["residual"], prox_residual(kernel, prior, t, xbar, r.x))
            eta = dual_prox_theta(kernel, prior, t, xbar) if prior.separable else cramer_grad(prior, r.x)
            moreau = np.max(np.abs(h.grad(r.x) + t * np.asarray(eta) - h.grad(xbar)))
            worst["moreau"] = max(worst["moreau"], float(moreau))
        if prior.separable:
            ts = np.array([[t] for t, _ in requests])
            ref = dense_prox_1d(kernel, prior, ts, np.array([xb for _, xb in requests]))
            worst["oracle"] = max(worst["oracle"], float(np.max(np.abs(np.array(outputs) - ref))))
        m = np.asarray(prior.mean(), dtype=float)
        xbar = m if not prior.separable else np.full(3, float(m))
        if h.in_interior(xbar):
            assert np.max(np.abs(bregman_prox(kernel, prior, 0.8, xbar).x - xbar)) <= 1e-12
    print(", ".join(f"{k} {v:.2e}" for k, v in worst.items()))
    assert worst["residual"] <= 1e-8
    assert worst["moreau"] <= 1e-10
    assert worst["oracle"] <= 1e-7


@pytest.mark.criterion(5, "descent lemma holds for every fidelity and kernel pairing")
def test_smooth_adaptability():
    rng = np.random.default_rng(105)
    A = rng.uniform(0.5, 1.5, (5, 4))
    rows = [(NormalFidelity(A, rng.standard_normal(5)), "energy"),
            (PoissonFidelity(A, rng.uniform(0.5, 2.0, 5)), "entropy"),
            (GammaFidelity(A, rng.uniform(0.5, 2.0, 5)), "burg")]
    for fid, kernel in rows:
        report = descent_lemma_check(fid, kernel, fid.smoothness_constant(), samples=200, seed=5)
        print(report.quantity, f"{report.oracle:.2e}")
        assert report.oracle <= 1e-9


def _barcode_problem(seed=3):
    x_true, p = gen_barcode(64, np.ones(64, bool), seed)
    B = gaussian_blur(1, 64, 1.0, half_width=2)
    return Problem(NormalFidelity(B, B @ x_true), Regularizer(ef.Bernoulli(p), 0.05)), x_true


def _nig_tv_problem():
    rng = np.random.default_rng(6)
    h = w = 16
    B = gaussian_blur(2, (h, w), 1.0)
    X = np.zeros((h, w))
    X[4:12, 5:11] = 1.0
    y = B @ X.ravel() + 0.01 * rng.standard_normal(h * w)
    nig = ef.NIG(np.zeros(2), 1.0, np.zeros(2), 0.1, np.eye(2))
    return Problem(NormalFidelity(B, y), Regularizer(nig, 1.0, finite_difference_2d(h, w)), smooth_regularizer=True)


def _poisson_problem():
    rng = np.random.default_rng(7)
    A = rng.uniform(0.05, 1.0, (32, 64))
    y = rng.poisson(A @ rng.uniform(5, 15, 64)).astype(float)
    return Problem(PoissonFidelity(A, y), Regularizer(ef.Laplace(0.0, 1.0), 0.1))


@pytest.mark.criterion(6, "BPG objective is monotone on the three demo problems (500 iterations, under 30 s)")
@pytest.mark.parametrize("name", ["barcode", "nig_tv", "poisson"])
def test_bpg_descent(name):
    if name == "barcode":
        problem, x0 = _barcode_problem()[0], np.full(64, 0.5)
    elif name == "nig_tv":
        problem, x0 = _nig_tv_problem(), np.zeros(256)
    else:
        problem = _poisson_problem()
        A = problem.fidelity.A
        x0 = np.full(64, problem.fidelity.y.sum() / A.apply(np.ones(64)).sum())
    start = time.perf_counter()
    tr = bpg(problem, x0, SolverOptions(max_iters=500, tol=0.0))
    elapsed = time.perf_counter() - start
    rise = float(np.max(np.diff(tr.objective)))
    print(f"{name}: {tr.iterations} iterations, largest rise {rise:.2e}, {elapsed:.2f} s")
    assert tr.iterations == 500
    assert monotone(tr.objective, 1e-10)
    assert elapsed < 30.0


@pytest.mark.criterion(7, "noise-free barcode with full symbology is recovered exactly")
def test_barcode_exact_recovery():
    problem, x_true = _barcode_problem()
    tr = bpg(problem, np.full(64, 0.5), SolverOptions(max_iters=300))
    assert tr.iterations <= 300
    np.testing.assert_array_equal((tr.x > 0.5).astype(float), x_true)


@pytest.mark.criterion(8, "consistent least squares to 1e-6, FISTA no slower than BPG")
def test_unregularized_least_squares():
    rng = np.random.default_rng(0)
    A = np.eye(32) + 0.5 * rng.standard_normal((32, 32)) / np.sqrt(32)
    y = A @ rng.standard_normal(32)
    problem = Problem(NormalFidelity(A, y))

    def reached(k, x):
        return np.linalg.norm(A @ x - y) <= 1e-6

    counts = {}
    for solver in (bpg, fista):
        tr = solver(problem, np.zeros(32), SolverOptions(max_iters=20000), callback=reached)
        assert tr.reason == "callback"
        assert np.linalg.norm(A @ tr.x - y) <= 1e-6
        counts[solver.__name__] = tr.iterations
    print(counts)
    assert counts["fista"] <= counts["bpg"]


@pytest.mark.criterion(9, "primal-dual NIG-TV: multiplier residual, step check, constant image")
def test_chambolle_pock():
    rng = np.random.default_rng(9)
    h = w = 12
    B = gaussian_blur(2, (h, w), 1.0)
    y = B @ rng.uniform(0, 1, h * w)
    tr = chambolle_pock_nig_tv(B, y, 0.2, 0.3, 0.3, np.zeros(h * w), SolverOptions(max_iters=200), shape=(h, w))
    assert tr.max_residual <= 1e-10
    with pytest.raises(StepSizeError):
        # s * tau * ||L||^2 = 0.25 * 8 > 1
        chambolle_pock_nig_tv(B, y, 0.2, 0.5, 0.5, np.zeros(h * w), shape=(h, w))
    x0 = np.full(h * w, 0.7)
    flat = chambolle_pock_nig_tv(identity(h * w), x0.copy(), 0.5, 0.3, 0.3, x0,
                                 SolverOptions(max_iters=100), shape=(h, w))
    assert np.max(np.abs(flat.x - x0)) <= 1e-10


@pytest.mark.criterion(10, "CLI runs with the same seed give byte-identical files")
def test_cli_determinism(tmp_path):
    cfg = os.path.join(CONFIGS, "poisson_laplace.cfg")
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", cfg, "--output", str(a)]) == 0
    assert main(["run", cfg, "--output", str(b)]) == 0
    for name in ("solution.txt", "trace.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
