"""Bregman proximal operators of scaled rate functions.

``bregman_prox`` returns the minimizer of ``t * psi_R^*(u) + D_h(u, xbar)``.
Closed forms cover the Normal, Gamma and Poisson priors under every kernel.
The remaining priors reduce to monotone scalar equations:

* Laplace, Bernoulli and univariate NIG: the primal stationarity equation
  ``grad h(u) - grad h(xbar) + t grad psi^*(u) = 0`` coordinate by coordinate;
* the uniform and logistic families: the dual equation in
  ``eta = grad psi^*(x+)``, with ``x+ = grad h^*(grad h(xbar) - t eta)``;
* multinomial and negative multinomial: per-coordinate closed forms for a
  fixed total, closed by an outer equation in the total;
* multivariate NIG: a single equation in a scalar multiplier.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import expfam as ef
from .cramer import cramer_grad, cramer_hess, cramer_value
from .errors import DomainError, Unsupported
from .kernels import BURG, ENERGY, ENTROPY, Kernel, get_kernel
from .rootfind import bracket_toward, lambert_w0_exp, solve_monotone

_TINY = 1e-300


def _ret(a):
    a = np.asarray(a, dtype=float)
    return float(a) if a.ndim == 0 else a


@dataclass(frozen=True, eq=False)
class ProxRequest:
    """Validated input of a Bregman proximal step."""

    kernel: Kernel
    prior: ef.Distribution
    t: float
    xbar: object

    def __post_init__(self):
        kernel = get_kernel(self.kernel)
        object.__setattr__(self, "kernel", kernel)
        t = float(self.t)
        if not (t > 0 and np.isfinite(t)):
            raise DomainError("prox step t must be a positive finite number")
        object.__setattr__(self, "t", t)
        xbar = np.asarray(self.xbar, dtype=float)
        if np.any(~np.isfinite(xbar)):
            raise DomainError("xbar must be finite")
        prior = self.prior
        if not prior.separable:
            xbar = np.atleast_1d(xbar)
            if xbar.shape != (prior.dim,):
                raise DomainError(f"xbar must have shape ({prior.dim},) for {type(prior).__name__}")
        else:
            xbar = prior._broadcast(xbar)
        if not kernel.in_interior(xbar):
            raise DomainError(f"xbar must lie in the interior of dom h ({kernel.name} kernel)")
        object.__setattr__(self, "xbar", xbar)
        if kernel is not ENERGY:
            if prior.separable:
                _, hi = prior.support_interval()
                if np.any(np.asarray(hi) <= 0):
                    raise DomainError(
                        "dom psi_R^* must meet the positive orthant for entropy-type kernels")
            if isinstance(prior, ef.NegativeMultinomial) and np.any(prior.p <= 0):
                raise DomainError("negative multinomial prox under this kernel needs p_i > 0")


@dataclass(frozen=True, eq=False)
class ProxResult:
    """Prox output.  ``theta = grad h(xbar) - grad h(x)`` and ``residual`` is
    the sup-norm of the first-order optimality condition."""

    x: object
    theta: object
    residual: float


def _as_request(args, kwargs):
    if len(args) == 1 and not kwargs and isinstance(args[0], ProxRequest):
        return args[0]
    return ProxRequest(*args, **kwargs)


def prox_objective(req: ProxRequest, u) -> float:
    """``t * psi_R^*(u) + D_h(u, xbar)``."""
    return req.t * cramer_value(req.prior, u) + req.kernel.distance(u, req.xbar)


def prox_residual(*args) -> float:
    """``|| grad h(x) - grad h(xbar) + t grad psi_R^*(x) ||_inf``.

    Called as ``prox_residual(req, x)`` or ``prox_residual(kernel, prior, t, xbar, x)``.
    """
    if isinstance(args[0], ProxRequest):
        req, x = args
    else:
        req, x = ProxRequest(*args[:4]), args[4]
    k = req.kernel
    x = np.asarray(x, dtype=float)
    r = k.grad(x) - k.grad(req.xbar) + req.t * np.asarray(cramer_grad(req.prior, x))
    return float(np.max(np.abs(r)))


# ---------------------------------------------------------------- closed forms

def _normal(k, d, t, xb):
    mu, var = d.mu, d.cov
    if k is ENERGY:
        return (var * xb + t * mu) / (t + var)
    if k is ENTROPY:
        return (var / t) * lambert_w0_exp(np.log(t * xb / var) + t * mu / var)
    a = t / var
    c = a * mu - 1.0 / xb
    disc = np.sqrt(c * c + 4 * a)
    return np.where(c >= 0, (c + disc) / (2 * a), 2.0 / np.maximum(disc - c, _TINY))


def _normal_joint(k, d, t, xb):
    if k is not ENERGY:
        raise Unsupported("a full-covariance Normal prior is only supported with the energy kernel")
    n = d.cov.shape[0]
    return np.linalg.solve(t * np.eye(n) + d.cov, d.cov @ xb + t * d.mu)


def _gamma(k, d, t, xb):
    a, b = d.alpha, d.beta
    if k is ENERGY:
        s = xb - t * b
        disc = np.sqrt(s * s + 4 * t * a)
        return np.where(s >= 0, 0.5 * (s + disc), 2 * t * a / (disc - s))
    if k is ENTROPY:
        return t * a / lambert_w0_exp(np.log(t * a) + t * b - np.log(xb))
    return xb * (t * a + 1) / (xb * t * b + 1)


def _poisson_like(k, t, xb, log_rate):
    """Solve ``grad h(x) - grad h(xbar) + t (log x - log_rate) = 0``."""
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        if k is ENERGY:
            return t * lambert_w0_exp(log_rate + xb / t - np.log(t))
        if k is ENTROPY:
            return np.exp((np.log(xb) + t * log_rate) / (1 + t))
        return 1.0 / (t * lambert_w0_exp(1.0 / (t * xb) - log_rate - np.log(t)))


def _poisson(k, d, t, xb):
    return _poisson_like(k, t, xb, np.log(d.lam))


# ---------------------------------------------------------------- primal scalar route

def _feasible_interval(k, d):
    lo_h, hi_h = k.interior
    lo_c, hi_c = d.support_interval()
    return np.maximum(lo_h, lo_c), np.minimum(hi_h, hi_c)


def _primal_root(k, d, t, xb):
    m = np.broadcast_to(np.asarray(d.mean(), dtype=float), xb.shape)
    lo, hi = _feasible_interval(k, d)
    lo = np.broadcast_to(lo, xb.shape).astype(float)
    hi = np.broadcast_to(hi, xb.shape).astype(float)
    gxb = k._grad(xb)

    def f_raw(u):
        return k._grad(u) - gxb + t * np.asarray(cramer_grad(d, u))

    def df_raw(u):
        return k._hess(u) + t * np.asarray(cramer_hess(d, u))

    m_ok = (m > lo) & (m < hi)
    x_ok = (xb > lo) & (xb < hi)
    if np.any(~m_ok & ~x_ok):
        raise DomainError("cannot bracket the prox: mean and xbar both outside the feasible set")
    # pick one interior anchor per coordinate and walk toward the opposite end
    anchor = np.where(m_ok, m, xb)
    other = np.where(m_ok, xb, m)
    edge = np.where(other > anchor, hi, lo)
    other_ok = np.where(m_ok, x_ok, m_ok)
    need_walk = ~other_ok
    # a root closer to a finite edge than one ulp is pinned to the last representable point
    last = np.where(np.isfinite(edge), np.nextafter(edge, anchor), anchor)
    probe = np.where(need_walk & np.isfinite(edge), last, anchor)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        pinned = need_walk & np.isfinite(edge) & (np.sign(f_raw(probe)) == np.sign(f_raw(anchor)))
    # coordinates already at the mean, and pinned ones, solve the trivial u - target = 0
    fixed = pinned | (other_ok & (other == anchor))
    target = np.where(pinned, last, anchor)

    def f(u):
        return np.where(fixed, u - target, f_raw(np.where(fixed, anchor, u)))

    def df(u):
        return np.where(fixed, 1.0, df_raw(np.where(fixed, anchor, u)))

    far = np.where(other_ok, other, np.where(pinned, last, anchor))
    walk = need_walk & ~pinned
    if np.any(walk):
        walked = bracket_toward(lambda u: f(np.where(walk, u, anchor)), anchor, np.where(walk, edge, anchor))
        far = np.where(walk, walked, far)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        return solve_monotone(f, (np.minimum(anchor, far), np.maximum(anchor, far)), df=df,
                              xscale=1e-30)


# ---------------------------------------------------------------- dual scalar route

def dual_prox_theta(*args, **kwargs):
    """Dual point ``theta = grad psi_R^*(x+)`` of the prox.

    It solves ``psi_R'(theta) = grad h^*(grad h(xbar) - t theta)``, so that
    ``x+ = grad h^*(grad h(xbar) - t theta)``.  Zero exactly when ``xbar`` is
    the prior mean; its sign is the sign of ``xbar - mean``.
    """
    req = _as_request(args, kwargs)
    if not req.prior.separable:
        raise Unsupported("dual_prox_theta handles separable priors")
    return _ret(_dual_theta(req.kernel, req.prior, req.t, req.xbar))


def _dual_theta(k, d, t, xb):
    m = np.broadcast_to(np.asarray(d.mean(), dtype=float), xb.shape)
    gxb = k._grad(xb)

    at_mean = xb == m

    def f(eta):
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            z = gxb - t * eta
            inner = np.where(z < k.dual_interior[1], z, -_TINY)
            return np.where(at_mean, eta, d._dpsi(eta) - k._grad_conj(inner))

    lo_n, hi_n = d.natural_interval()
    lo_n = np.broadcast_to(lo_n, xb.shape).astype(float)
    hi_n = np.broadcast_to(hi_n, xb.shape).astype(float)
    if k is BURG:
        # keep grad h(xbar) - t eta inside dom h^* = (-inf, 0)
        lo_n = np.maximum(lo_n, -1.0 / (t * xb))
    up = xb > m
    edge = np.where(up, hi_n, lo_n)
    edge = np.where(xb == m, 0.0, edge)
    far = bracket_toward(f, np.zeros(xb.shape), edge)
    return solve_monotone(f, (np.minimum(0.0, far), np.maximum(0.0, far)), xscale=1e-30)


def _dual_route(k, d, t, xb):
    eta = _dual_theta(k, d, t, xb)
    return k._grad_conj(k._grad(xb) - t * eta)


# ---------------------------------------------------------------- joint priors

def _multinomial(k, d, t, xb):
    logp = np.log(d.p)
    if isinstance(d, ef.Multinomial):
        # unknown is u = log(n - total), which keeps a tiny slack n - total accurate
        base = np.log(d.p0)

        def coords(u):
            return _poisson_like(k, t, xb, logp + u - base)

        def g(u):
            u = np.atleast_1d(u)
            return np.array([d.n - np.exp(ui) - coords(ui).sum() for ui in u])

        top = float(np.log(d.n))
        bottom = bracket_toward(g, top, -np.inf)
        return coords(solve_monotone(g, (bottom, top)))

    def coords(s):
        return _poisson_like(k, t, xb, logp + np.log(d.x0 + s))

    def g(s):
        s = np.atleast_1d(s)
        return np.array([si - coords(si).sum() for si in s])

    upper = max(1.0, float(np.sum(coords(0.0))))
    while g(upper)[0] <= 0:
        upper *= 4.0
    return coords(solve_monotone(g, (0.0, upper), xscale=1e-30))


def _nig_joint(k, d, t, xb):
    if k is ENERGY:
        lam, Q = np.linalg.eigh(d.cov)
        w = Q.T @ (t * d.beta + xb - d.mu)
        ta = t * d.alpha

        def phi(rho):
            rho = np.atleast_1d(rho)
            frac = (lam[None, :] * w[None, :] / (lam[None, :] + rho[:, None])) ** 2 / lam[None, :]
            return rho**2 * (d.delta**2 + frac.sum(axis=1)) - ta**2

        rho = solve_monotone(phi, (0.0, ta / d.delta), xscale=1e-30)
        return d.mu + Q @ (lam / (lam + rho) * w)
    if k is BURG:
        n = d.cov.shape[0]
        var = float(d.cov[0, 0])
        if not np.allclose(d.cov, var * np.eye(n), rtol=1e-12, atol=0):
            raise Unsupported("the Burg-kernel NIG prox needs an isotropic covariance sigma*I")
        w = t * d.beta - 1.0 / xb
        rhs = (t * d.alpha / var) ** 2

        def rho_u(rho):
            c = w + rho * d.mu
            disc = np.sqrt(c * c + 4 * rho)
            return np.where(c >= 0, 0.5 * (c + disc), 2 * rho / np.maximum(disc - c, _TINY))

        def phi(rho):
            rho = np.atleast_1d(rho)
            vals = [r * r * d.delta**2 + np.sum((rho_u(r) - r * d.mu) ** 2) / var - rhs for r in rho]
            return np.array(vals)

        rho = solve_monotone(phi, (0.0, t * d.alpha / (var * d.delta)), xscale=1e-30)
        return rho_u(rho) / rho
    raise Unsupported("a multivariate NIG prior is not supported with the Boltzmann-Shannon kernel")


# ---------------------------------------------------------------- dispatch

_SEPARABLE_ROUTES = {
    ef.Normal: _normal,
    ef.Gamma: _gamma,
    ef.Poisson: _poisson,
    ef.Laplace: _primal_root,
    ef.Bernoulli: _primal_root,
    ef.NIG: _primal_root,
    ef.DiscreteUniform: _dual_route,
    ef.ContinuousUniform: _dual_route,
    ef.Logistic: _dual_route,
}


def bregman_prox(*args, **kwargs) -> ProxResult:
    """Bregman proximal step of ``t * psi_R^*`` at ``xbar``.

    Accepts a :class:`ProxRequest` or the arguments ``(kernel, prior, t, xbar)``.
    """
    req = _as_request(args, kwargs)
    k, d, t, xb = req.kernel, req.prior, req.t, req.xbar
    if d.separable:
        m = np.broadcast_to(np.asarray(d.mean(), dtype=float), xb.shape)
        x = np.asarray(_SEPARABLE_ROUTES[type(d)](k, d, t, xb), dtype=float)
        x = np.where(xb == m, xb, x)
    elif np.array_equal(xb, d.mean()):
        x = xb.copy()
    elif isinstance(d, ef.Normal):
        x = _normal_joint(k, d, t, xb)
    elif isinstance(d, ef.NIG):
        x = _nig_joint(k, d, t, xb)
    else:
        x = _multinomial(k, d, t, xb)
    if not k.in_interior(x):
        raise DomainError("prox output left the interior of dom h")
    theta = k._grad(xb) - k._grad(x)
    try:
        res = prox_residual(req, x)
    except DomainError:
        res = float("nan")
    return ProxResult(_ret(x), _ret(theta), res)
