"""Reference distributions described by their log-normalizers and natural domains.

Univariate families are *separable*: their parameters broadcast against the
argument elementwise and scalar outputs sum over coordinates.  Normal and NIG
become jointly multivariate when given a 2-D covariance; Multinomial and
NegativeMultinomial are always joint.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np
from scipy.special import expit, logsumexp

from .errors import DomainError

_SERIES_CUTOFF = 0.05


class Region(IntEnum):
    """Position of a point relative to a convex set."""

    INTERIOR = 0
    BOUNDARY = 1
    OUTSIDE = 2

    def __str__(self):
        return self.name.lower()


def _arr(v):
    return np.asarray(v, dtype=float)


def _ret(a):
    a = np.asarray(a, dtype=float)
    return float(a) if a.ndim == 0 else a


def _check_finite(x, what="argument"):
    x = _arr(x)
    if np.any(np.isnan(x)):
        raise DomainError(f"{what} contains NaN")
    return x


def _worst(codes):
    codes = np.asarray(codes)
    return Region(int(codes.max())) if codes.size else Region.INTERIOR


# ---------------------------------------------------------------- special functions

def log_sinhc(x):
    """``log(sinh(x)/x)``, accurate both near 0 and for large ``|x|``."""
    x = np.abs(_arr(x))
    small = x < _SERIES_CUTOFF
    big = x > 20.0
    mid = ~small & ~big
    out = np.empty_like(x)
    xs = x[small] ** 2
    out[small] = xs * (1 / 6 - xs * (1 / 180 - xs * (1 / 2835 - xs / 37800)))
    xm = x[mid]
    out[mid] = np.log(np.sinh(xm) / xm)
    xb = x[big]
    out[big] = xb + np.log1p(-np.exp(-2 * xb)) - np.log(2.0) - np.log(xb)
    return _ret(out)


def langevin(x):
    """``coth(x) - 1/x``, the derivative of :func:`log_sinhc`."""
    x = _arr(x)
    small = np.abs(x) < _SERIES_CUTOFF
    out = np.empty_like(x)
    xs = x[small]
    x2 = xs * xs
    out[small] = xs * (1 / 3 - x2 * (1 / 45 - x2 * (2 / 945 - x2 / 4725)))
    xl = x[~small]
    out[~small] = 1.0 / np.tanh(xl) - 1.0 / xl
    return _ret(out)


def langevin_prime(x):
    """``1/x**2 - 1/sinh(x)**2``."""
    x = _arr(x)
    small = np.abs(x) < _SERIES_CUTOFF
    out = np.empty_like(x)
    x2 = x[small] ** 2
    out[small] = 1 / 3 - x2 * (1 / 15 - x2 * (2 / 189 - x2 / 675))
    xl = x[~small]
    with np.errstate(over="ignore"):
        out[~small] = 1.0 / xl**2 - 1.0 / np.sinh(xl) ** 2
    return _ret(out)


def log_xcsc(x):
    """``log(x/sin(x))`` for ``|x| < pi``."""
    x = _arr(x)
    small = np.abs(x) < _SERIES_CUTOFF
    out = np.empty_like(x)
    x2 = x[small] ** 2
    out[small] = x2 * (1 / 6 + x2 * (1 / 180 + x2 * (1 / 2835 + x2 / 37800)))
    xl = x[~small]
    out[~small] = np.log(xl / np.sin(xl))
    return _ret(out)


def inv_x_minus_cot(x):
    """``1/x - cot(x)``, derivative of :func:`log_xcsc`."""
    x = _arr(x)
    small = np.abs(x) < _SERIES_CUTOFF
    out = np.empty_like(x)
    xs = x[small]
    x2 = xs * xs
    out[small] = xs * (1 / 3 + x2 * (1 / 45 + x2 * (2 / 945 + x2 / 4725)))
    xl = x[~small]
    out[~small] = 1.0 / xl - 1.0 / np.tan(xl)
    return _ret(out)


def csc2_minus_inv2(x):
    """``1/sin(x)**2 - 1/x**2``."""
    x = _arr(x)
    small = np.abs(x) < _SERIES_CUTOFF
    out = np.empty_like(x)
    x2 = x[small] ** 2
    out[small] = 1 / 3 + x2 * (1 / 15 + x2 * (2 / 189 + x2 / 675))
    xl = x[~small]
    out[~small] = 1.0 / np.sin(xl) ** 2 - 1.0 / xl**2
    return _ret(out)


# ---------------------------------------------------------------- base class

@dataclass(frozen=True, eq=False)
class Distribution:
    """Common interface.  Subclasses supply elementwise or joint formulas."""

    strategy = "closed_form"

    @property
    def separable(self) -> bool:
        return True

    @property
    def dim(self):
        """Fixed dimension, or ``None`` for scalar-parameter separable families."""
        shapes = [np.shape(v) for v in self._params()]
        shape = np.broadcast_shapes(*shapes) if shapes else ()
        return int(np.prod(shape)) if shape else None

    def _params(self):
        return ()

    def _set(self, name, value):
        object.__setattr__(self, name, value)

    # separable elementwise hooks
    def _psi(self, th):
        raise NotImplementedError

    def _dpsi(self, th):
        raise NotImplementedError

    def _d2psi(self, th):
        raise NotImplementedError

    def _theta_region(self, th):
        lo, hi = self.natural_interval()
        out = np.where((th > lo) & (th < hi), 0, 2)
        return np.where((th == lo) | (th == hi), 1, out)

    def natural_interval(self):
        """Per-coordinate open interval ``(lo, hi)`` whose closure is the natural domain."""
        return -np.inf, np.inf

    def support_interval(self):
        """Per-coordinate closed hull ``[lo, hi]`` of the support."""
        return -np.inf, np.inf

    def _broadcast(self, th):
        th = _check_finite(th, "theta")
        shape = np.broadcast_shapes(th.shape, *[np.shape(p) for p in self._params()])
        return np.broadcast_to(th, shape).astype(float)

    def log_normalizer(self, theta):
        th = self._broadcast(theta)
        if np.any(self._theta_region(th) == 2):
            return np.inf
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            v = self._psi(th)
        v = np.where(np.isnan(v), np.inf, v)
        return float(np.sum(v))

    def log_normalizer_grad(self, theta):
        th = self._broadcast(theta)
        if np.any(self._theta_region(th) != 0):
            raise DomainError(f"theta outside the interior of the natural domain of {self!r}")
        return _ret(self._dpsi(th))

    def log_normalizer_hess(self, theta):
        """Elementwise second derivative (separable) or Hessian matrix (joint)."""
        th = self._broadcast(theta)
        if np.any(self._theta_region(th) != 0):
            raise DomainError(f"theta outside the interior of the natural domain of {self!r}")
        return _ret(self._d2psi(th))

    def natural_domain_contains(self, theta) -> Region:
        th = self._broadcast(theta)
        return _worst(self._theta_region(th))

    def mean(self):
        raise NotImplementedError


def _positive(name, v):
    if np.any(~(v > 0)) or np.any(~np.isfinite(v)):
        raise DomainError(f"{name} must be finite and positive")


def _finite(name, v):
    if np.any(~np.isfinite(v)):
        raise DomainError(f"{name} must be finite")


def _spd_cholesky(cov):
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise DomainError("covariance must be a square matrix")
    if not np.allclose(cov, cov.T, rtol=1e-12, atol=1e-14):
        raise DomainError("covariance must be symmetric")
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise DomainError("covariance must be positive definite") from exc


# ---------------------------------------------------------------- Normal

@dataclass(frozen=True, eq=False)
class Normal(Distribution):
    """Gaussian with mean ``mu`` and covariance ``cov``.

    A scalar or 1-D ``cov`` holds per-coordinate variances (separable); a 2-D
    ``cov`` is a full covariance matrix.
    """

    mu: object = 0.0
    cov: object = 1.0
    chol: object = field(default=None, init=False, repr=False)

    def __post_init__(self):
        mu, cov = _arr(self.mu), _arr(self.cov)
        _finite("mu", mu)
        if cov.ndim == 2:
            self._set("chol", _spd_cholesky(cov))
            mu = np.broadcast_to(mu, (cov.shape[0],)).copy()
        else:
            _positive("variance", cov)
        self._set("mu", mu)
        self._set("cov", cov)

    @property
    def separable(self):
        return self.cov.ndim < 2

    def _params(self):
        return (self.mu, self.cov) if self.separable else (self.mu,)

    def _psi(self, th):
        return self.mu * th + 0.5 * self.cov * th * th

    def _dpsi(self, th):
        return self.mu + self.cov * th

    def _d2psi(self, th):
        return np.broadcast_to(self.cov, th.shape).astype(float)

    def log_normalizer(self, theta):
        if self.separable:
            return super().log_normalizer(theta)
        th = self._broadcast(theta)
        return float(self.mu @ th + 0.5 * th @ self.cov @ th)

    def log_normalizer_grad(self, theta):
        if self.separable:
            return super().log_normalizer_grad(theta)
        th = self._broadcast(theta)
        return self.mu + self.cov @ th

    def log_normalizer_hess(self, theta):
        if self.separable:
            return super().log_normalizer_hess(theta)
        return self.cov.copy()

    def mean(self):
        return _ret(self.mu)


# ---------------------------------------------------------------- Normal inverse Gaussian

@dataclass(frozen=True, eq=False)
class NIG(Distribution):
    """Normal inverse Gaussian with location ``mu``, tail ``alpha``,
    asymmetry ``beta``, scale ``delta`` and shape matrix ``cov``."""

    mu: object = 0.0
    alpha: float = 1.0
    beta: object = 0.0
    delta: float = 1.0
    cov: object = 1.0
    chol: object = field(default=None, init=False, repr=False)

    def __post_init__(self):
        mu, beta, cov = _arr(self.mu), _arr(self.beta), _arr(self.cov)
        alpha, delta = _arr(self.alpha), _arr(self.delta)
        _finite("mu", mu)
        _finite("beta", beta)
        _positive("alpha", alpha)
        _positive("delta", delta)
        if cov.ndim == 2:
            if alpha.ndim or delta.ndim:
                raise DomainError("alpha and delta must be scalars for a joint NIG")
            self._set("chol", _spd_cholesky(cov))
            d = cov.shape[0]
            mu = np.broadcast_to(mu, (d,)).copy()
            beta = np.broadcast_to(beta, (d,)).copy()
            gamma2 = alpha**2 - beta @ cov @ beta
        else:
            _positive("variance", cov)
            gamma2 = alpha**2 - cov * beta**2
        if np.any(gamma2 <= 0):
            raise DomainError("NIG requires alpha**2 > beta' cov beta (gamma > 0)")
        for name, v in (("mu", mu), ("alpha", alpha), ("beta", beta), ("delta", delta), ("cov", cov)):
            self._set(name, v)

    @property
    def separable(self):
        return self.cov.ndim < 2

    def _params(self):
        if self.separable:
            return (self.mu, self.alpha, self.beta, self.delta, self.cov)
        return (self.mu,)

    @property
    def gamma(self):
        if self.separable:
            return _ret(np.sqrt(self.alpha**2 - self.cov * self.beta**2))
        return float(np.sqrt(self.alpha**2 - self.beta @ self.cov @ self.beta))

    def _q(self, th):
        b = self.beta + th
        if self.separable:
            return self.alpha**2 - self.cov * b * b
        return self.alpha**2 - b @ self.cov @ b

    def _theta_region(self, th):
        q = self._q(th)
        return np.where(q > 0, 0, np.where(q == 0, 1, 2))

    def natural_interval(self):
        r = self.alpha / np.sqrt(self.cov)
        return -r - self.beta, r - self.beta

    def _psi(self, th):
        return self.mu * th + self.delta * (self.gamma - np.sqrt(np.maximum(self._q(th), 0.0)))

    def _dpsi(self, th):
        return self.mu + self.delta * self.cov * (self.beta + th) / np.sqrt(self._q(th))

    def _d2psi(self, th):
        return self.delta * self.cov * self.alpha**2 / self._q(th) ** 1.5

    def log_normalizer(self, theta):
        if self.separable:
            return super().log_normalizer(theta)
        th = self._broadcast(theta)
        q = self._q(th)
        if q < 0:
            return np.inf
        return float(self.mu @ th + self.delta * (self.gamma - np.sqrt(q)))

    def log_normalizer_grad(self, theta):
        if self.separable:
            return super().log_normalizer_grad(theta)
        th = self._broadcast(theta)
        q = self._q(th)
        if not q > 0:
            raise DomainError("theta outside the interior of the NIG natural domain")
        return self.mu + self.delta * (self.cov @ (self.beta + th)) / np.sqrt(q)

    def log_normalizer_hess(self, theta):
        if self.separable:
            return super().log_normalizer_hess(theta)
        th = self._broadcast(theta)
        q = self._q(th)
        if not q > 0:
            raise DomainError("theta outside the interior of the NIG natural domain")
        v = self.cov @ (self.beta + th)
        return self.delta * (self.cov / np.sqrt(q) + np.outer(v, v) / q**1.5)

    def natural_domain_contains(self, theta):
        if self.separable:
            return super().natural_domain_contains(theta)
        q = self._q(self._broadcast(theta))
        return Region.INTERIOR if q > 0 else Region.BOUNDARY if q == 0 else Region.OUTSIDE

    def mean(self):
        if self.separable:
            return _ret(self.mu + self.delta * self.cov * self.beta / self.gamma)
        return self.mu + self.delta * (self.cov @ self.beta) / self.gamma


# ---------------------------------------------------------------- Gamma

@dataclass(frozen=True, eq=False)
class Gamma(Distribution):
    """Gamma with shape ``alpha`` and rate ``beta``."""

    alpha: object = 1.0
    beta: object = 1.0

    def __post_init__(self):
        a, b = _arr(self.alpha), _arr(self.beta)
        _positive("alpha", a)
        _positive("beta", b)
        self._set("alpha", a)
        self._set("beta", b)

    def _params(self):
        return (self.alpha, self.beta)

    def natural_interval(self):
        return -np.inf, self.beta

    def support_interval(self):
        return 0.0, np.inf

    def _psi(self, th):
        return -self.alpha * np.log1p(-th / self.beta)

    def _dpsi(self, th):
        return self.alpha / (self.beta - th)

    def _d2psi(self, th):
        return self.alpha / (self.beta - th) ** 2

    def mean(self):
        return _ret(self.alpha / self.beta)


# ---------------------------------------------------------------- Laplace

@dataclass(frozen=True, eq=False)
class Laplace(Distribution):
    """Laplace with location ``mu`` and scale ``b``."""

    mu: object = 0.0
    b: object = 1.0

    def __post_init__(self):
        mu, b = _arr(self.mu), _arr(self.b)
        _finite("mu", mu)
        _positive("b", b)
        self._set("mu", mu)
        self._set("b", b)

    def _params(self):
        return (self.mu, self.b)

    def natural_interval(self):
        return -1.0 / self.b, 1.0 / self.b

    def _psi(self, th):
        u = self.b * th
        return self.mu * th - np.log1p(-u * u)

    def _dpsi(self, th):
        u = self.b * th
        return self.mu + 2 * self.b * u / (1 - u * u)

    def _d2psi(self, th):
        u2 = (self.b * th) ** 2
        return 2 * self.b**2 * (1 + u2) / (1 - u2) ** 2

    def mean(self):
        return _ret(self.mu)


# ---------------------------------------------------------------- Poisson

@dataclass(frozen=True, eq=False)
class Poisson(Distribution):
    """Poisson with rate ``lam``."""

    lam: object = 1.0

    def __post_init__(self):
        lam = _arr(self.lam)
        _positive("lambda", lam)
        self._set("lam", lam)

    def _params(self):
        return (self.lam,)

    def support_interval(self):
        return 0.0, np.inf

    def _psi(self, th):
        return self.lam * np.expm1(th)

    def _dpsi(self, th):
        return self.lam * np.exp(th)

    _d2psi = _dpsi

    def mean(self):
        return _ret(self.lam)


# ---------------------------------------------------------------- Bernoulli

@dataclass(frozen=True, eq=False)
class Bernoulli(Distribution):
    """Bernoulli with success probability ``p`` (one-trial multinomial)."""

    p: object = 0.5

    def __post_init__(self):
        p = _arr(self.p)
        if np.any(~((p > 0) & (p < 1))):
            raise DomainError("Bernoulli p must lie in (0, 1)")
        self._set("p", p)

    def _params(self):
        return (self.p,)

    def support_interval(self):
        return 0.0, 1.0

    def _logit_p(self):
        return np.log(self.p) - np.log1p(-self.p)

    def _psi(self, th):
        return np.logaddexp(np.log1p(-self.p), np.log(self.p) + th)

    def _dpsi(self, th):
        return expit(th + self._logit_p())

    def _d2psi(self, th):
        s = expit(th + self._logit_p())
        return s * (1 - s)

    def mean(self):
        return _ret(self.p)


# ---------------------------------------------------------------- Multinomial

@dataclass(frozen=True, eq=False)
class Multinomial(Distribution):
    """Multinomial with ``n`` trials, in minimal form: ``p`` holds ``d``
    cell probabilities and the remaining mass ``1 - sum(p)`` is implicit."""

    n: int = 1
    p: object = (0.5,)

    def __post_init__(self):
        p = np.atleast_1d(_arr(self.p))
        if p.ndim != 1:
            raise DomainError("Multinomial p must be a vector")
        if int(self.n) != self.n or self.n < 1:
            raise DomainError("Multinomial n must be a positive integer")
        if np.any(~(p > 0)) or not p.sum() < 1:
            raise DomainError("Multinomial p must satisfy p_i > 0 and sum(p) < 1")
        self._set("n", int(self.n))
        self._set("p", p)

    @property
    def separable(self):
        return False

    @property
    def dim(self):
        return self.p.size

    @property
    def p0(self):
        return float(1.0 - self.p.sum())

    def _params(self):
        return (self.p,)

    def log_normalizer(self, theta):
        th = self._broadcast(theta)
        terms = np.concatenate(([np.log(self.p0)], np.log(self.p) + th))
        return float(self.n * logsumexp(terms))

    def log_normalizer_grad(self, theta):
        th = self._broadcast(theta)
        terms = np.concatenate(([np.log(self.p0)], np.log(self.p) + th))
        return self.n * np.exp(terms[1:] - logsumexp(terms))

    def log_normalizer_hess(self, theta):
        g = self.log_normalizer_grad(theta)
        return np.diag(g) - np.outer(g, g) / self.n

    def natural_domain_contains(self, theta):
        self._broadcast(theta)
        return Region.INTERIOR

    def mean(self):
        return self.n * self.p


# ---------------------------------------------------------------- Negative multinomial

@dataclass(frozen=True, eq=False)
class NegativeMultinomial(Distribution):
    """Negative multinomial with success probabilities ``p`` and stopping
    parameter ``x0`` (failure probability ``1 - sum(p)``)."""

    p: object = (0.5,)
    x0: float = 1.0

    def __post_init__(self):
        p = np.atleast_1d(_arr(self.p))
        if p.ndim != 1:
            raise DomainError("NegativeMultinomial p must be a vector")
        if np.any(~(p >= 0)) or not p.sum() < 1:
            raise DomainError("NegativeMultinomial p must satisfy p_i >= 0 and sum(p) < 1")
        x0 = float(self.x0)
        if not (x0 > 0 and np.isfinite(x0)):
            raise DomainError("NegativeMultinomial x0 must be positive")
        self._set("p", p)
        self._set("x0", x0)

    @property
    def separable(self):
        return False

    @property
    def dim(self):
        return self.p.size

    @property
    def p0(self):
        return float(1.0 - self.p.sum())

    def _params(self):
        return (self.p,)

    def _mass(self, th):
        with np.errstate(over="ignore"):
            return float(np.sum(self.p * np.exp(th)))

    def log_normalizer(self, theta):
        s = self._mass(self._broadcast(theta))
        if s >= 1:
            return np.inf
        return float(self.x0 * (np.log(self.p0) - np.log1p(-s)))

    def log_normalizer_grad(self, theta):
        th = self._broadcast(theta)
        s = self._mass(th)
        if not s < 1:
            raise DomainError("theta outside the negative multinomial natural domain")
        return self.x0 * self.p * np.exp(th) / (1 - s)

    def log_normalizer_hess(self, theta):
        g = self.log_normalizer_grad(theta)
        return np.diag(g) + np.outer(g, g) / self.x0

    def natural_domain_contains(self, theta):
        s = self._mass(self._broadcast(theta))
        return Region.INTERIOR if s < 1 else Region.BOUNDARY if s == 1 else Region.OUTSIDE

    def mean(self):
        return self.x0 * self.p / self.p0


# ---------------------------------------------------------------- uniforms and logistic

@dataclass(frozen=True, eq=False)
class DiscreteUniform(Distribution):
    """Uniform on the integers ``a, a+1, ..., b``."""

    strategy = "implicit_scalar_root"

    a: object = 0
    b: object = 1

    def __post_init__(self):
        a, b = _arr(self.a), _arr(self.b)
        if np.any(a != np.round(a)) or np.any(b != np.round(b)):
            raise DomainError("DiscreteUniform endpoints must be integers")
        if np.any(~(a <= b)):
            raise DomainError("DiscreteUniform requires a <= b")
        self._set("a", a)
        self._set("b", b)

    def _params(self):
        return (self.a, self.b)

    @property
    def count(self):
        return self.b - self.a + 1

    def support_interval(self):
        return self.a, self.b

    def _psi_centered(self, th):
        n = self.count
        return log_sinhc(n * th / 2) - log_sinhc(th / 2)

    def _psi(self, th):
        return 0.5 * (self.a + self.b) * th + self._psi_centered(th)

    def _dpsi(self, th):
        n = self.count
        return 0.5 * (self.a + self.b) + 0.5 * n * langevin(n * th / 2) - 0.5 * langevin(th / 2)

    def _d2psi(self, th):
        n = self.count
        return 0.25 * n * n * langevin_prime(n * th / 2) - 0.25 * langevin_prime(th / 2)

    def mean(self):
        return _ret(0.5 * (self.a + self.b))


@dataclass(frozen=True, eq=False)
class ContinuousUniform(Distribution):
    """Uniform on the interval ``[a, b]`` with ``a < b``."""

    strategy = "implicit_scalar_root"

    a: object = 0.0
    b: object = 1.0

    def __post_init__(self):
        a, b = _arr(self.a), _arr(self.b)
        _finite("a", a)
        _finite("b", b)
        if np.any(~(a < b)):
            raise DomainError("ContinuousUniform requires a < b")
        self._set("a", a)
        self._set("b", b)

    def _params(self):
        return (self.a, self.b)

    @property
    def width(self):
        return self.b - self.a

    def support_interval(self):
        return self.a, self.b

    def _psi_centered(self, th):
        return log_sinhc(self.width * th / 2)

    def _psi(self, th):
        return 0.5 * (self.a + self.b) * th + self._psi_centered(th)

    def _dpsi(self, th):
        w = self.width
        return 0.5 * (self.a + self.b) + 0.5 * w * langevin(w * th / 2)

    def _d2psi(self, th):
        w = self.width
        return 0.25 * w * w * langevin_prime(w * th / 2)

    def mean(self):
        return _ret(0.5 * (self.a + self.b))


@dataclass(frozen=True, eq=False)
class Logistic(Distribution):
    """Logistic with location ``mu`` and scale ``s``."""

    strategy = "implicit_scalar_root"

    mu: object = 0.0
    s: object = 1.0

    def __post_init__(self):
        mu, s = _arr(self.mu), _arr(self.s)
        _finite("mu", mu)
        _positive("s", s)
        self._set("mu", mu)
        self._set("s", s)

    def _params(self):
        return (self.mu, self.s)

    def natural_interval(self):
        return -1.0 / self.s, 1.0 / self.s

    def _psi_centered(self, th):
        # the formula does not blow up numerically at |s theta| = 1
        return np.where(np.abs(self.s * th) >= 1, np.inf, log_xcsc(np.pi * self.s * th))

    def _psi(self, th):
        return self.mu * th + self._psi_centered(th)

    def _dpsi(self, th):
        return self.mu + np.pi * self.s * inv_x_minus_cot(np.pi * self.s * th)

    def _d2psi(self, th):
        return (np.pi * self.s) ** 2 * csc2_minus_inv2(np.pi * self.s * th)

    def mean(self):
        return _ret(self.mu)


FAMILIES = {
    "normal": Normal,
    "nig": NIG,
    "gamma": Gamma,
    "laplace": Laplace,
    "poisson": Poisson,
    "bernoulli": Bernoulli,
    "multinomial": Multinomial,
    "negative_multinomial": NegativeMultinomial,
    "discrete_uniform": DiscreteUniform,
    "continuous_uniform": ContinuousUniform,
    "logistic": Logistic,
}


def log_normalizer(dist, theta):
    """Cumulant generating function; ``+inf`` outside the natural domain."""
    return dist.log_normalizer(theta)


def log_normalizer_grad(dist, theta):
    return dist.log_normalizer_grad(theta)


def mean(dist):
    return dist.mean()


def natural_domain_contains(dist, theta) -> Region:
    return dist.natural_domain_contains(theta)
