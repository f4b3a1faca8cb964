"""Brute-force reference computations used to validate the analytic code.

Everything here is built from log-normalizers and kernel primitives with
bracketing plus bisection or golden-section search only; no closed-form rate
function or prox formula is consulted.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import BracketFailure, DomainError
from .kernels import get_kernel

_GOLD = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OracleReport:
    quantity: str
    analytic: float
    oracle: float
    abs_err: float
    rel_err: float
    passed: bool

    @classmethod
    def compare(cls, quantity, analytic, oracle, tol):
        analytic, oracle = float(analytic), float(oracle)
        abs_err = abs(analytic - oracle)
        rel_err = abs_err / max(1.0, abs(analytic))
        return cls(quantity, analytic, oracle, abs_err, rel_err, bool(rel_err <= tol))


def write_reports(reports, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["quantity", "analytic", "oracle", "abs_err", "rel_err", "pass"])
        for r in reports:
            w.writerow([r.quantity, f"{r.analytic:.17g}", f"{r.oracle:.17g}",
                        f"{r.abs_err:.3e}", f"{r.rel_err:.3e}", "pass" if r.passed else "FAIL"])


# ---------------------------------------------------------------- conjugates

def _elementwise(dist, y):
    if not dist.separable:
        raise DomainError("the numeric oracles handle univariate (separable) families only")
    return dist._broadcast(y)


def _slope_bracket(dist, y):
    """Bracket ``[a, b]`` inside the natural domain where ``y - psi'`` changes sign."""
    mean = np.broadcast_to(np.asarray(dist.mean(), dtype=float), y.shape)
    lo_e, hi_e = dist.natural_interval()
    lo_e = np.broadcast_to(lo_e, y.shape).astype(float)
    hi_e = np.broadcast_to(hi_e, y.shape).astype(float)
    up = y >= mean
    edge = np.where(up, hi_e, lo_e)
    direction = np.where(up, 1.0, -1.0)
    prev = np.zeros(y.shape)
    cur = np.zeros(y.shape)
    done = y == mean
    for k in range(1, 80):
        with np.errstate(over="ignore"):
            probe = np.where(np.isfinite(edge), edge * (1.0 - 0.25**k), direction * 4.0 ** (k - 1))
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            slope = y - dist._dpsi(probe)
        flipped = ~done & (slope * direction <= 0)
        prev = np.where(done | flipped, prev, probe)
        cur = np.where(done, cur, probe)
        done |= flipped
        if done.all():
            return np.minimum(prev, cur), np.maximum(prev, cur)
    raise BracketFailure("no sign change of y - psi' inside the natural domain (y on or outside the boundary)")


def numeric_conjugate(dist, y, tol=1e-13):
    """``sup_theta y theta - psi(theta)`` by golden-section search."""
    y = _elementwise(dist, y)
    a, b = _slope_bracket(dist, y)

    def g(th):
        with np.errstate(over="ignore", invalid="ignore"):
            return y * th - dist._psi(th)

    c = b - _GOLD * (b - a)
    d = a + _GOLD * (b - a)
    gc, gd = g(c), g(d)
    for _ in range(200):
        if np.all(b - a <= tol * np.maximum(1.0, np.abs(a))):
            break
        left = gc > gd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        c_new = b - _GOLD * (b - a)
        d_new = a + _GOLD * (b - a)
        c, d = c_new, d_new
        gc, gd = g(c), g(d)
    th = 0.5 * (a + b)
    best = np.maximum(np.maximum(g(th), gc), gd)
    best = np.where(y == np.broadcast_to(dist.mean(), y.shape), 0.0, best)
    return float(best) if best.ndim == 0 else best


def dual_point_bisection(dist, y, iters=200):
    """Root of ``psi'(theta) = y`` by plain bisection (gradient of the conjugate)."""
    y = _elementwise(dist, y)
    a, b = _slope_bracket(dist, y)
    for _ in range(iters):
        m = 0.5 * (a + b)
        with np.errstate(over="ignore", invalid="ignore"):
            below = dist._dpsi(m) < y
        a = np.where(below, m, a)
        b = np.where(below, b, m)
        if np.all(b - a <= 1e-16 * np.maximum(1.0, np.abs(a))):
            break
    out = 0.5 * (a + b)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------- finite differences

def fd_gradient(f, x, step=1e-6):
    """Central differences; one-sided (with doubled error) where ``f`` is infinite."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    g = np.empty_like(x)
    f0 = None
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = step
        fp = f(x + e if not scalar else (x + e)[0])
        fm = f(x - e if not scalar else (x - e)[0])
        if np.isfinite(fp) and np.isfinite(fm):
            g[i] = (fp - fm) / (2 * step)
            continue
        if f0 is None:
            f0 = f(x if not scalar else x[0])
        if np.isfinite(fp) and np.isfinite(f0):
            g[i] = (fp - f0) / step
        elif np.isfinite(fm) and np.isfinite(f0):
            g[i] = (f0 - fm) / step
        else:
            raise DomainError("function is not finite on either side of the point")
    return float(g[0]) if scalar else g


# ---------------------------------------------------------------- scalar prox

def dense_prox_1d(kernel, prior, t, xbar, tol=1e-10):
    """Minimize ``t psi^*(u) + D_h(u, xbar)`` over a scalar ``u`` (elementwise).

    Golden-section search on the objective, followed by bisection on the sign
    of its derivative ``t theta(u) + h'(u) - h'(xbar)`` where ``theta(u)``
    comes from :func:`dual_point_bisection`.
    """
    k = get_kernel(kernel)
    xb = _elementwise(prior, xbar)
    mean = np.broadcast_to(np.asarray(prior.mean(), dtype=float), xb.shape)
    s_lo, s_hi = prior.support_interval()
    h_lo, h_hi = k.interior
    lo = np.maximum(np.broadcast_to(s_lo, xb.shape), h_lo).astype(float)
    hi = np.minimum(np.broadcast_to(s_hi, xb.shape), h_hi).astype(float)
    a = np.minimum(mean, xb)
    b = np.maximum(mean, xb)
    with np.errstate(invalid="ignore"):
        a = np.maximum(a, np.where(np.isfinite(lo), lo + 1e-12 * np.maximum(1.0, np.abs(lo)), a))
        b = np.minimum(b, np.where(np.isfinite(hi), hi - 1e-12 * np.maximum(1.0, np.abs(hi)), b))
    if np.any(a > b):
        raise DomainError("empty search interval for the scalar prox")
    a0, b0 = a.copy(), b.copy()

    def phi(u):
        return t * numeric_conjugate(prior, u) + _breg(k, u, xb)

    def slope(u):
        return t * dual_point_bisection(prior, u) + k._grad(u) - k._grad(xb)

    c = b - _GOLD * (b - a)
    d = a + _GOLD * (b - a)
    pc, pd = phi(c), phi(d)
    for _ in range(200):
        if np.all(b - a <= 1e-9 * np.maximum(1.0, np.abs(a))):
            break
        left = pc < pd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        c, d = b - _GOLD * (b - a), a + _GOLD * (b - a)
        pc, pd = phi(c), phi(d)
    # polish: widen a window around the golden estimate until the derivative
    # changes sign, then bisect on that sign
    u = 0.5 * (a + b)
    w = np.maximum(b - a, 1e-12 * np.maximum(1.0, np.abs(u)))
    for _ in range(60):
        a, b = np.maximum(a0, u - w), np.minimum(b0, u + w)
        ok = (slope(a) <= 0) & (slope(b) >= 0)
        if ok.all():
            break
        w = np.where(ok, w, 4 * w)
    for _ in range(200):
        if np.all(b - a <= tol * 1e-3 * np.maximum(1.0, np.abs(a))):
            break
        m = 0.5 * (a + b)
        neg = slope(m) < 0
        a = np.where(neg, m, a)
        b = np.where(neg, b, m)
    u = 0.5 * (a + b)
    u = np.where(xb == mean, xb, u)
    return float(u) if u.ndim == 0 else u


def _breg(k, u, x):
    # elementwise D_h(u, x) from the kernel's value and gradient
    return _h(k, u) - _h(k, x) - k._grad(x) * (u - x)


def _h(k, u):
    if k.name == "energy":
        return 0.5 * u * u
    if k.name == "burg":
        return -np.log(u)
    return u * np.log(u)


# ---------------------------------------------------------------- smooth adaptability

def descent_lemma_check(fid, kernel, L, samples=200, seed=0, slack=1e-9):
    """Largest violation of ``f(y) <= f(x) + <grad f(x), y-x> + L D_h(y, x)``."""
    k = get_kernel(kernel)
    rng = np.random.default_rng(seed)
    d = fid.dim
    worst = -np.inf
    for _ in range(samples):
        if k.name == "energy":
            x, y = rng.standard_normal(d) * 2, rng.standard_normal(d) * 2
        else:
            x, y = np.exp(rng.uniform(-2, 1.5, d)), np.exp(rng.uniform(-2, 1.5, d))
        gap = fid.value(y) - fid.value(x) - fid.grad(x) @ (y - x) - L * k.distance(y, x)
        worst = max(worst, gap)
    name = f"descent_lemma[{fid.family},{k.name},L={L:.6g}]"
    violation = max(0.0, worst)
    return OracleReport(name, 0.0, violation, violation, violation, bool(violation <= slack))


# ---------------------------------------------------------------- derived examples

def _bisect(f, a, b, tol=1e-15):
    fa = f(a)
    for _ in range(200):
        m = 0.5 * (a + b)
        fm = f(m)
        if (fm < 0) == (fa < 0):
            a, fa = m, fm
        else:
            b = m
        if b - a <= tol:
            break
    return 0.5 * (a + b)


def derived_reports():
    """Oracle comparisons for every derived quantity the library promises."""
    from . import expfam as ef
    from .cramer import cramer_grad, cramer_value
    from .kernels import BURG, bregman_distance
    from .linops import convolution_1d, finite_difference_2d, norm_1_columns, op_norm_2
    from .models import NormalFidelity, PoissonFidelity, GammaFidelity
    from .prox import bregman_prox, dual_prox_theta
    from .rootfind import lambert_w0, solve_monotone

    out = []
    add = out.append
    pois = ef.Poisson(2.0)
    add(OracleReport.compare("log_normalizer_grad Poisson(2) at log 2",
                             pois.log_normalizer_grad(math.log(2)),
                             fd_gradient(pois.log_normalizer, math.log(2)), 1e-8))
    lg = ef.Logistic(0.0, 1.0)
    add(OracleReport.compare("cramer_value Logistic(0,1) at 1", cramer_value(lg, 1.0),
                             numeric_conjugate(lg, 1.0), 1e-10))
    cu = ef.ContinuousUniform(-1.0, 1.0)
    add(OracleReport.compare("cramer_grad ContinuousUniform(-1,1) at 0.5", cramer_grad(cu, 0.5),
                             fd_gradient(lambda y: cramer_value(cu, y), 0.5), 1e-5))
    add(OracleReport.compare("bregman_distance Burg (2,1)", bregman_distance(BURG, [2.0], [1.0]),
                             BURG.value([2.0]) - BURG.value([1.0]) - BURG.grad([1.0])[0] * 1.0, 1e-12))
    omega = _bisect(lambda x: x * math.exp(x) - 1.0, 0.0, 1.0)
    add(OracleReport.compare("solve_monotone x e^x = 1",
                             solve_monotone(lambda x: x * np.exp(x) - 1.0, (0.0, 1.0)), omega, 1e-12))
    add(OracleReport.compare("lambert_w0(1)", lambert_w0(1.0), omega, 1e-12))
    add(OracleReport.compare("prox energy Poisson(1) t=1 xbar=0",
                             bregman_prox("energy", ef.Poisson(1.0), 1.0, 0.0).x,
                             dense_prox_1d("energy", ef.Poisson(1.0), 1.0, 0.0), 1e-7))
    x_or = dense_prox_1d("energy", cu, 1.0, 0.3)
    add(OracleReport.compare("dual_prox_theta energy ContinuousUniform(-1,1) xbar=0.3",
                             dual_prox_theta("energy", cu, 1.0, 0.3), (0.3 - x_or) / 1.0, 1e-7))
    M = np.array([[1.0, 2.0], [3.0, 4.0]])
    G = M.T @ M
    tr, det = np.trace(G), np.linalg.det(G)
    add(OracleReport.compare("op_norm_2 [[1,2],[3,4]]", op_norm_2(M),
                             math.sqrt((tr + math.sqrt(tr * tr - 4 * det)) / 2), 1e-9))
    conv = convolution_1d([0.25, 0.5, 0.25], 7, "zero_pad")
    explicit = np.zeros((7, 7))
    for i in range(7):
        for j, w in zip((i - 1, i, i + 1), (0.25, 0.5, 0.25)):
            if 0 <= j < 7:
                explicit[i, j] = w
    add(OracleReport.compare("norm_1_columns conv1d (0.25,0.5,0.25) interior column",
                             conv.column_abs_sums()[3], explicit[:, 3].sum(), 1e-15))
    Lfd = finite_difference_2d(8, 8)
    dense = Lfd.to_dense()
    add(OracleReport.compare("||L||_2^2 finite differences 8x8", op_norm_2(Lfd) ** 2,
                             float(np.linalg.eigvalsh(dense.T @ dense)[-1]), 1e-8))
    rng = np.random.default_rng(7)
    A = rng.uniform(0.5, 1.5, (3, 3))
    for fid, kern in ((NormalFidelity(A, rng.standard_normal(3)), "energy"),
                      (PoissonFidelity(A, rng.uniform(0.5, 2, 3)), "entropy"),
                      (GammaFidelity(A, rng.uniform(0.5, 2, 3)), "burg")):
        add(descent_lemma_check(fid, kern, fid.smoothness_constant()))
    return out
