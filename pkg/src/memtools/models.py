"""Regularized linear models built from a data fidelity and a prior."""
from __future__ import annotations

import numpy as np
from scipy.special import xlogy

from . import expfam as ef
from .cramer import cramer_grad, cramer_grad_rows, cramer_value, cramer_value_rows
from .errors import ConfigError, DomainError, Unsupported
from .kernels import BURG, ENERGY, ENTROPY, get_kernel
from .linops import as_operator, norm_1_columns, op_norm_2
from .prox import bregman_prox


def _check_c0(A, name):
    """Nonnegative operator with no zero rows or columns."""
    if not A.nonnegative:
        raise DomainError(f"{name} fidelity needs an entrywise nonnegative operator")
    try:
        cols, rows = A.column_abs_sums(), A.row_abs_sums()
    except Unsupported:
        return
    if np.any(cols == 0) or np.any(rows == 0):
        raise DomainError(f"{name} fidelity needs an operator without zero rows or columns")


class Fidelity:
    """``psi^*_{P_y}(A x)`` for an observation ``y``."""

    family = ""
    paired_kernel = ENERGY

    def __init__(self, A, y):
        self.A = as_operator(A)
        self.y = np.asarray(y, dtype=float).ravel()
        if self.y.shape != (self.A.shape[0],):
            raise DomainError(f"observation length {self.y.size} does not match operator rows {self.A.shape[0]}")
        if np.any(~np.isfinite(self.y)):
            raise DomainError("observation must be finite")

    @property
    def dim(self):
        return self.A.shape[1]

    def __repr__(self):
        return f"{type(self).__name__}(A={self.A!r}, m={self.y.size})"


class NormalFidelity(Fidelity):
    """``0.5 * ||A x - y||^2``."""

    family = "normal"
    paired_kernel = ENERGY

    def value(self, x):
        r = self.A.apply(x) - self.y
        return float(0.5 * r @ r)

    def grad(self, x):
        return self.A.adjoint(self.A.apply(x) - self.y)

    def smoothness_constant(self):
        # Lipschitz constant of the gradient: lambda_max(A^T A), slightly inflated
        # because power iteration approaches it from below.
        return op_norm_2(self.A) ** 2 * (1 + 1e-9)


class PoissonFidelity(Fidelity):
    """Kullback-Leibler fit ``sum z log(z/y) - z + y`` with ``z = A x``."""

    family = "poisson"
    paired_kernel = ENTROPY

    def __init__(self, A, y):
        super().__init__(A, y)
        _check_c0(self.A, "Poisson")
        if np.any(self.y <= 0):
            raise DomainError("Poisson fidelity needs a strictly positive observation")

    def value(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            return np.inf
        z = self.A.apply(x)
        return float(np.sum(xlogy(z, z / self.y) - z + self.y))

    def grad(self, x):
        x = np.asarray(x, dtype=float)
        z = self.A.apply(x)
        if np.any(x < 0) or np.any(z <= 0):
            raise DomainError("Poisson fidelity gradient needs A x > 0 with x >= 0")
        return self.A.adjoint(np.log(z / self.y))

    def smoothness_constant(self):
        return norm_1_columns(self.A)


class GammaFidelity(Fidelity):
    """Unit-rate Gamma fit ``sum z - y log z - (y - y log y)`` with ``z = A x``."""

    family = "gamma"
    paired_kernel = BURG

    def __init__(self, A, y):
        super().__init__(A, y)
        _check_c0(self.A, "Gamma")
        if np.any(self.y < 0):
            raise DomainError("Gamma fidelity needs a nonnegative observation")

    def value(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x <= 0):
            return np.inf
        z = self.A.apply(x)
        return float(np.sum(z - self.y - xlogy(self.y, z / np.where(self.y > 0, self.y, 1.0))))

    def grad(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x <= 0):
            raise DomainError("Gamma fidelity gradient needs x > 0")
        z = self.A.apply(x)
        return self.A.adjoint(1.0 - self.y / z)

    def smoothness_constant(self):
        return float(np.sum(np.abs(self.y)))


FIDELITIES = {"normal": NormalFidelity, "poisson": PoissonFidelity, "gamma": GammaFidelity}


def fidelity_value(fid, x):
    return fid.value(x)


def fidelity_grad(fid, x):
    return fid.grad(x)


def smoothness_constant(fid):
    return fid.smoothness_constant()


def curvature_bound(prior) -> float:
    """Upper bound on the second derivative of the rate function of ``prior``."""
    if isinstance(prior, ef.Normal):
        if prior.separable:
            return float(np.max(1.0 / prior.cov))
        return float(1.0 / np.linalg.eigvalsh(prior.cov)[0])
    if isinstance(prior, ef.NIG):
        if prior.separable:
            return float(np.max(prior.alpha / (prior.cov * prior.delta)))
        return float(prior.alpha / (np.linalg.eigvalsh(prior.cov)[0] * prior.delta))
    if isinstance(prior, ef.Laplace):
        return float(np.max(1.0 / (2 * prior.b**2)))
    if isinstance(prior, ef.Logistic):
        return float(np.max(3.0 / (np.pi * prior.s) ** 2))
    raise Unsupported(f"no curvature bound available for {type(prior).__name__}")


class Regularizer:
    """``weight * psi_R^*(x)``, or ``weight * sum_i psi_R^*(L_i x)`` when an
    operator is given (blocks of the prior's dimension).  ``prior=None``
    switches the regularizer off."""

    def __init__(self, prior=None, weight=1.0, operator=None):
        weight = float(weight)
        if prior is not None and not (weight > 0 and np.isfinite(weight)):
            raise DomainError("regularizer weight must be positive")
        self.prior = prior
        self.weight = weight
        self.operator = None if operator is None else as_operator(operator)
        if self.operator is not None and prior is not None:
            b = self.block
            if self.operator.shape[0] % b:
                raise DomainError("operator output length must be a multiple of the prior dimension")

    @property
    def active(self):
        return self.prior is not None

    @property
    def composite(self):
        return self.operator is not None

    @property
    def block(self):
        if self.prior is None or self.prior.separable:
            return 1
        return self.prior.dim

    def _blocks(self, v):
        return v.reshape(-1, self.block) if self.block > 1 else v

    def value(self, x):
        if not self.active:
            return 0.0
        x = np.asarray(x, dtype=float)
        if not self.composite:
            return self.weight * cramer_value(self.prior, x)
        v = self._blocks(self.operator.apply(x))
        if self.block == 1:
            return self.weight * cramer_value(self.prior, v)
        return self.weight * float(np.sum(cramer_value_rows(self.prior, v)))

    def grad(self, x):
        """Gradient of the (smooth) regularizer."""
        if not self.active:
            return np.zeros_like(np.asarray(x, dtype=float))
        if not self.composite:
            return self.weight * np.asarray(cramer_grad(self.prior, x))
        v = self._blocks(self.operator.apply(np.asarray(x, dtype=float)))
        if self.block == 1:
            g = np.asarray(cramer_grad(self.prior, v))
        else:
            g = cramer_grad_rows(self.prior, v)
        return self.weight * self.operator.adjoint(g.ravel())

    def lipschitz_bound(self):
        if not self.active:
            return 0.0
        c = curvature_bound(self.prior)
        n = 1.0 if not self.composite else op_norm_2(self.operator) ** 2 * (1 + 1e-9)
        return self.weight * c * n

    def __repr__(self):
        name = "none" if self.prior is None else repr(self.prior)
        return f"Regularizer({name}, weight={self.weight}, composite={self.composite})"


class Problem:
    """``min_x f(x) + g(x)`` with ``f`` the fidelity and ``g`` the regularizer.

    Parameters
    ----------
    fidelity : Fidelity
    regularizer : Regularizer, optional
    kernel : str or Kernel
        ``"auto"`` selects the kernel paired with the fidelity.  Any other
        kernel requires an explicit ``smoothness`` constant.
    smoothness : float, optional
        Override for the smooth-adaptability constant.
    smooth_regularizer : bool
        Treat a composite regularizer as part of the smooth term (energy kernel
        only).  Proximal solvers otherwise reject composite regularizers.
    """

    def __init__(self, fidelity, regularizer=None, kernel="auto", smoothness=None,
                 smooth_regularizer=False):
        self.fidelity = fidelity
        self.regularizer = regularizer if regularizer is not None else Regularizer()
        if kernel == "auto" or kernel is None:
            self.kernel = fidelity.paired_kernel
        else:
            self.kernel = get_kernel(kernel)
            if self.kernel is not fidelity.paired_kernel and smoothness is None:
                raise ConfigError(
                    f"kernel {self.kernel.name} is not paired with the {fidelity.family} fidelity; "
                    "supply a smoothness constant")
        self.smooth_regularizer = bool(smooth_regularizer)
        if self.smooth_regularizer and self.kernel is not ENERGY:
            raise ConfigError("a smooth regularizer is only supported with the energy kernel")
        self._smoothness = None if smoothness is None else float(smoothness)
        if self._smoothness is not None and not self._smoothness > 0:
            raise ConfigError("smoothness constant must be positive")

    @property
    def dim(self):
        return self.fidelity.dim

    @property
    def prox_compatible(self):
        return not self.regularizer.composite or self.smooth_regularizer

    def smoothness(self):
        if self._smoothness is not None:
            return self._smoothness
        L = self.fidelity.smoothness_constant()
        if self.smooth_regularizer:
            L += self.regularizer.lipschitz_bound()
        return L

    def f_value(self, x):
        v = self.fidelity.value(x)
        if self.smooth_regularizer:
            v += self.regularizer.value(x)
        return v

    def f_grad(self, x):
        g = self.fidelity.grad(x)
        if self.smooth_regularizer:
            g = g + self.regularizer.grad(x)
        return g

    def g_value(self, x):
        if self.smooth_regularizer:
            return 0.0
        return self.regularizer.value(x)

    def prox_g(self, t, xbar):
        """Bregman prox of ``t * g`` at ``xbar``."""
        reg = self.regularizer
        if not reg.active or self.smooth_regularizer:
            return np.asarray(xbar, dtype=float).copy()
        if reg.composite:
            raise Unsupported("a composite regularizer has no simple prox; use a primal-dual solver")
        return np.asarray(bregman_prox(self.kernel, reg.prior, t * reg.weight, xbar).x, dtype=float)

    def objective(self, x):
        return self.fidelity.value(x) + self.regularizer.value(x)


def objective(problem, x):
    return problem.objective(x)
