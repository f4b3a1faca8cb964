"""Cramér rate functions: convex conjugates of the log-normalizers.

Closed forms are used where they exist.  For the two uniform families and the
logistic family the gradient is the root of ``psi'(theta) = y`` and the value
follows from the Fenchel-Young equality.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, solve_triangular
from scipy.special import xlogy

from . import expfam as ef
from .errors import DomainError
from .expfam import Region, _ret, _worst
from .rootfind import solve_monotone

CLOSED_FORM = "closed_form"
IMPLICIT = "implicit_scalar_root"


# ---------------------------------------------------------------- per-family pieces
# Each separable family maps to (region_codes, value, grad) acting elementwise on
# an array already broadcast against the parameters.  ``value`` and ``grad`` are
# only called on entries the region marks as admissible.

def _normal_sep():
    def region(d, y):
        return np.zeros(y.shape, dtype=int)

    def value(d, y):
        return (y - d.mu) ** 2 / (2 * d.cov)

    def grad(d, y):
        return (y - d.mu) / d.cov

    return region, value, grad


def _nig_sep():
    def region(d, y):
        return np.zeros(y.shape, dtype=int)

    def value(d, y):
        r = y - d.mu
        return d.alpha * np.sqrt(d.delta**2 + r * r / d.cov) - d.beta * r - d.delta * d.gamma

    def grad(d, y):
        r = y - d.mu
        return d.alpha * r / (d.cov * np.sqrt(d.delta**2 + r * r / d.cov)) - d.beta

    return region, value, grad


def _gamma():
    def region(d, y):
        return np.where(y > 0, 0, 2)

    def value(d, y):
        return d.beta * y - d.alpha + d.alpha * np.log(d.alpha / (d.beta * y))

    def grad(d, y):
        return d.beta - d.alpha / y

    return region, value, grad


def _laplace():
    def region(d, y):
        return np.zeros(y.shape, dtype=int)

    def value(d, y):
        rho = (y - d.mu) / d.b
        s = np.sqrt(1 + rho * rho)
        return rho * rho / (s + 1) + np.log(2 / (s + 1))

    def grad(d, y):
        rho = (y - d.mu) / d.b
        return rho / ((np.sqrt(1 + rho * rho) + 1) * d.b)

    return region, value, grad


def _poisson():
    def region(d, y):
        return np.where(y > 0, 0, np.where(y == 0, 1, 2))

    def value(d, y):
        return xlogy(y, y / d.lam) - y + d.lam

    def grad(d, y):
        return np.log(y / d.lam)

    return region, value, grad


def _bernoulli():
    def region(d, y):
        return np.where((y > 0) & (y < 1), 0, np.where((y == 0) | (y == 1), 1, 2))

    def value(d, y):
        return xlogy(y, y / d.p) + xlogy(1 - y, (1 - y) / (1 - d.p))

    def grad(d, y):
        return (np.log(y) - np.log1p(-y)) - (np.log(d.p) - np.log1p(-d.p))

    return region, value, grad


def _implicit_bracket(d, y):
    mu = 0.5 * (d.a + d.b) if not isinstance(d, ef.Logistic) else d.mu
    up = y > mu
    if isinstance(d, ef.DiscreteUniform):
        # factor 2 leaves a margin of about half the gap to the edge
        edge_hi = np.log1p(2.0 / np.maximum(d.b - y, 1e-300))
        edge_lo = -np.log1p(2.0 / np.maximum(y - d.a, 1e-300))
    elif isinstance(d, ef.ContinuousUniform):
        edge_hi = 2.0 / np.maximum(d.b - y, 1e-300)
        edge_lo = -2.0 / np.maximum(y - d.a, 1e-300)
    else:
        gap = np.abs(y - d.mu)
        edge_hi = (1.0 / d.s) * (1 - 0.25 * d.s / (gap + d.s))
        edge_lo = -edge_hi
    lo = np.where(up, 0.0, np.where(y < mu, edge_lo, 0.0))
    hi = np.where(up, edge_hi, 0.0)
    return lo, hi


def implicit_theta(d, y):
    """Root of ``psi'(theta) = y`` for the implicit families (``y`` interior)."""
    y = np.asarray(y, dtype=float)
    lo, hi = _implicit_bracket(d, y)
    with np.errstate(over="ignore", invalid="ignore"):
        return solve_monotone(lambda th: d._dpsi(th) - y, (lo, hi), df=d._d2psi, xtol=1e-15)


def _log_sinhc_minus_abs(x):
    ax = np.abs(x)
    big = ax > 1.0
    safe = np.where(big, ax, 1.0)
    with np.errstate(over="ignore"):
        far = np.log1p(-np.exp(-2.0 * safe)) - np.log(2.0 * safe)
    return np.where(big, far, ef.log_sinhc(np.where(big, 0.0, x)) - ax)


def _psi_minus_edge(d, th):
    if isinstance(d, ef.DiscreteUniform):
        n = d.count
        return _log_sinhc_minus_abs(n * th / 2) - _log_sinhc_minus_abs(th / 2)
    return _log_sinhc_minus_abs(d.width * th / 2)


def _uniform_like(endpoint_value):
    def region(d, y):
        if isinstance(d, ef.Logistic):
            return np.zeros(y.shape, dtype=int)
        inside = (y > d.a) & (y < d.b)
        on_end = (y == d.a) | (y == d.b)
        if endpoint_value:
            return np.where(inside, 0, np.where(on_end, 1, 2))
        return np.where(inside, 0, 2)

    def value(d, y):
        out = np.empty(y.shape)
        if isinstance(d, ef.Logistic):
            interior = np.ones(y.shape, dtype=bool)
        else:
            interior = (y > d.a) & (y < d.b)
            if isinstance(d, ef.DiscreteUniform):
                # endpoint mass of the discrete uniform is 1/n
                out[~interior] = np.broadcast_to(np.log(d.count), y.shape)[~interior]
        safe = np.where(interior, y, d.mean())
        th = np.atleast_1d(implicit_theta(d, safe)).reshape(y.shape)
        if isinstance(d, ef.Logistic):
            val = (safe - d.mu) * th - d._psi_centered(th)
        else:
            # (y - mu) theta - psi_c(theta) rewritten as -gap |theta| - (psi_c - half_range |theta|)
            # so that nothing of size |theta| cancels near the edges
            gap = np.where(th >= 0, d.b - safe, safe - d.a)
            val = -gap * np.abs(th) - _psi_minus_edge(d, th)
        out[interior] = np.asarray(val)[interior]
        return out

    def grad(d, y):
        return implicit_theta(d, y)

    return region, value, grad


_SEPARABLE = {
    ef.Normal: _normal_sep(),
    ef.NIG: _nig_sep(),
    ef.Gamma: _gamma(),
    ef.Laplace: _laplace(),
    ef.Poisson: _poisson(),
    ef.Bernoulli: _bernoulli(),
    ef.DiscreteUniform: _uniform_like(True),
    ef.ContinuousUniform: _uniform_like(False),
    ef.Logistic: _uniform_like(False),
}


# ---------------------------------------------------------------- joint families

def _joint_region(d, y):
    if isinstance(d, (ef.Normal, ef.NIG)):
        return Region.INTERIOR
    if isinstance(d, ef.Multinomial):
        s = y.sum()
        if np.any(y < 0) or s > d.n:
            return Region.OUTSIDE
        if np.any(y == 0) or s == d.n:
            return Region.BOUNDARY
        return Region.INTERIOR
    # negative multinomial
    if np.any(y < 0) or np.any((d.p == 0) & (y > 0)):
        return Region.OUTSIDE
    if np.any(y == 0):
        return Region.BOUNDARY
    return Region.INTERIOR


def _mahalanobis(d, r):
    z = solve_triangular(d.chol, r, lower=True)
    return float(z @ z)


def _joint_value(d, y):
    if isinstance(d, ef.Normal):
        return 0.5 * _mahalanobis(d, y - d.mu)
    if isinstance(d, ef.NIG):
        r = y - d.mu
        return float(d.alpha * np.sqrt(d.delta**2 + _mahalanobis(d, r)) - d.beta @ r - d.delta * d.gamma)
    if isinstance(d, ef.Multinomial):
        rest = d.n - y.sum()
        return float(np.sum(xlogy(y, y / (d.n * d.p))) + xlogy(rest, rest / (d.n * d.p0)))
    ybar = d.x0 + y.sum()
    active = y > 0
    terms = xlogy(y[active], y[active] / (d.p[active] * ybar))
    return float(np.sum(terms) + d.x0 * np.log(d.x0 / (d.p0 * ybar)))


def _joint_grad(d, y):
    if isinstance(d, ef.Normal):
        return cho_solve((d.chol, True), y - d.mu)
    if isinstance(d, ef.NIG):
        r = y - d.mu
        w = cho_solve((d.chol, True), r)
        return d.alpha * w / np.sqrt(d.delta**2 + r @ w) - d.beta
    if isinstance(d, ef.Multinomial):
        return np.log(y * d.p0 / (d.p * (d.n - y.sum())))
    return np.log(y / (d.p * (d.x0 + y.sum())))


# ---------------------------------------------------------------- public API

def cramer_value_rows(dist, Y):
    """Rate function of a joint family evaluated on every row of ``Y``."""
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if isinstance(dist, (ef.Normal, ef.NIG)) and not dist.separable:
        R = Y - dist.mu
        Z = solve_triangular(dist.chol, R.T, lower=True)
        m = np.sum(Z * Z, axis=0)
        if isinstance(dist, ef.Normal):
            return 0.5 * m
        return dist.alpha * np.sqrt(dist.delta**2 + m) - R @ dist.beta - dist.delta * dist.gamma
    return np.array([cramer_value(dist, row) for row in Y])


def cramer_grad_rows(dist, Y):
    """Row-wise gradients of a joint rate function."""
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if isinstance(dist, (ef.Normal, ef.NIG)) and not dist.separable:
        R = Y - dist.mu
        W = cho_solve((dist.chol, True), R.T).T
        if isinstance(dist, ef.Normal):
            return W
        S = np.sqrt(dist.delta**2 + np.sum(R * W, axis=1))
        return dist.alpha * W / S[:, None] - dist.beta
    return np.array([cramer_grad(dist, row) for row in Y])


def strategy(dist) -> str:
    return dist.strategy


def cramer_domain_classify(dist, y) -> Region:
    """Position of ``y`` relative to the effective domain of the rate function."""
    y = dist._broadcast(y)
    if dist.separable:
        region, _, _ = _SEPARABLE[type(dist)]
        return _worst(region(dist, y))
    return _joint_region(dist, y)


def cramer_value(dist, y) -> float:
    """Rate function value, ``+inf`` outside its domain (``0 log 0 = 0``)."""
    y = dist._broadcast(y)
    if dist.separable:
        region, value, _ = _SEPARABLE[type(dist)]
        codes = region(dist, y)
        if np.any(codes == 2):
            return np.inf
        with np.errstate(divide="ignore", invalid="ignore"):
            v = value(dist, y)
        return float(np.sum(v))
    if _joint_region(dist, y) == Region.OUTSIDE:
        return np.inf
    return _joint_value(dist, y)


def cramer_value_elementwise(dist, y):
    """Per-coordinate values for separable families."""
    if not dist.separable:
        raise DomainError("elementwise values need a separable distribution")
    y = dist._broadcast(y)
    region, value, _ = _SEPARABLE[type(dist)]
    codes = region(dist, y)
    safe = np.where(codes == 2, np.broadcast_to(dist.mean(), y.shape), y)
    with np.errstate(divide="ignore", invalid="ignore"):
        v = np.asarray(value(dist, safe), dtype=float)
    return _ret(np.where(codes == 2, np.inf, v))


def cramer_grad(dist, y):
    """Gradient of the rate function; the dual point ``theta`` with ``psi'(theta) = y``."""
    y = dist._broadcast(y)
    if dist.separable:
        region, _, grad = _SEPARABLE[type(dist)]
        if np.any(region(dist, y) != 0):
            raise DomainError("y must lie in the interior of the rate function domain")
        return _ret(grad(dist, y))
    if _joint_region(dist, y) != Region.INTERIOR:
        raise DomainError("y must lie in the interior of the rate function domain")
    return _joint_grad(dist, y)


def cramer_hess(dist, y):
    """Elementwise second derivative for separable families (``1/psi''(theta))``."""
    if not dist.separable:
        raise DomainError("elementwise curvature needs a separable distribution")
    th = dist._broadcast(cramer_grad(dist, y))
    return _ret(1.0 / dist._d2psi(th))


@dataclass(frozen=True, eq=False)
class CramerFunction:
    """Rate function bound to a reference distribution."""

    dist: object

    @property
    def strategy(self) -> str:
        return self.dist.strategy

    def __call__(self, y):
        return cramer_value(self.dist, y)

    def grad(self, y):
        return cramer_grad(self.dist, y)

    def classify(self, y) -> Region:
        return cramer_domain_classify(self.dist, y)
