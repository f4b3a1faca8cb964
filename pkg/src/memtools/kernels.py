"""Separable Legendre kernels and their Bregman distances."""
from __future__ import annotations

import numpy as np
from scipy.special import xlogy

from .errors import DomainError


def _arr(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)):
        raise DomainError("NaN argument")
    return x


def _ret(a):
    a = np.asarray(a, dtype=float)
    return float(a) if a.ndim == 0 else a


class Kernel:
    """A separable kernel ``h(x) = sum_j h_j(x_j)``.

    Subclasses provide the scalar pieces; the public methods validate domains.
    """

    name = ""
    # open interval forming the interior of dom h, and of dom h*
    interior = (-np.inf, np.inf)
    dual_interior = (-np.inf, np.inf)

    def __repr__(self):
        return f"{type(self).__name__}()"

    def in_interior(self, x) -> bool:
        x = _arr(x)
        lo, hi = self.interior
        return bool(np.all((x > lo) & (x < hi)))

    def in_dual_interior(self, z) -> bool:
        z = _arr(z)
        lo, hi = self.dual_interior
        return bool(np.all((z > lo) & (z < hi)))

    def require_interior(self, x, what="x"):
        if not self.in_interior(x):
            raise DomainError(f"{what} must lie in the interior of dom h for the {self.name} kernel")

    def value(self, x):
        return float(np.sum(self._value(_arr(x))))

    def grad(self, x):
        self.require_interior(x)
        return _ret(self._grad(_arr(x)))

    def hess(self, x):
        """Diagonal of the Hessian."""
        self.require_interior(x)
        return _ret(self._hess(_arr(x)))

    def grad_conj(self, z):
        if not self.in_dual_interior(z):
            raise DomainError(f"z must lie in the interior of dom h* for the {self.name} kernel")
        return _ret(self._grad_conj(_arr(z)))

    def conj_value(self, z):
        z = _arr(z)
        if not self.in_dual_interior(z):
            return np.inf
        return float(np.sum(self._conj_value(z)))

    def distance(self, y, x):
        """``D_h(y, x) = h(y) - h(x) - <grad h(x), y - x>``."""
        self.require_interior(x)
        y, x = np.broadcast_arrays(_arr(y), _arr(x))
        if not np.isfinite(self.value(y)):
            return np.inf
        return float(np.sum(self._distance(y, x)))

    def conj_distance(self, a, b):
        """Bregman distance of the conjugate kernel."""
        if not self.in_dual_interior(b):
            raise DomainError("b must lie in the interior of dom h*")
        a, b = np.broadcast_arrays(_arr(a), _arr(b))
        if not self.in_dual_interior(a):
            return np.inf
        return float(np.sum(self._conj_value(a) - self._conj_value(b) - self._grad_conj(b) * (a - b)))


class Energy(Kernel):
    name = "energy"

    def _value(self, x):
        return 0.5 * x * x

    def _grad(self, x):
        return x

    def _hess(self, x):
        return np.ones_like(x)

    def _grad_conj(self, z):
        return z

    def _conj_value(self, z):
        return 0.5 * z * z

    def _distance(self, y, x):
        return 0.5 * (y - x) ** 2


class BoltzmannShannon(Kernel):
    name = "boltzmann_shannon"
    interior = (0.0, np.inf)

    def value(self, x):
        x = _arr(x)
        if np.any(x < 0):
            return np.inf
        return float(np.sum(xlogy(x, x)))

    def _grad(self, x):
        return np.log(x) + 1.0

    def _hess(self, x):
        return 1.0 / x

    def _grad_conj(self, z):
        return np.exp(z - 1.0)

    def _conj_value(self, z):
        return np.exp(z - 1.0)

    def _distance(self, y, x):
        return xlogy(y, y / x) - y + x


class Burg(Kernel):
    name = "burg"
    interior = (0.0, np.inf)
    dual_interior = (-np.inf, 0.0)

    def value(self, x):
        x = _arr(x)
        if np.any(x <= 0):
            return np.inf
        return float(-np.sum(np.log(x)))

    def _grad(self, x):
        return -1.0 / x

    def _hess(self, x):
        return 1.0 / (x * x)

    def _grad_conj(self, z):
        return -1.0 / z

    def _conj_value(self, z):
        return -1.0 - np.log(-z)

    def _distance(self, y, x):
        r = y / x
        return r - np.log(r) - 1.0


ENERGY = Energy()
ENTROPY = BoltzmannShannon()
BURG = Burg()

_ALIASES = {
    "energy": ENERGY,
    "boltzmann_shannon": ENTROPY,
    "boltzmann-shannon": ENTROPY,
    "entropy": ENTROPY,
    "burg": BURG,
}


def get_kernel(kind) -> Kernel:
    """Resolve a kernel instance or name."""
    if isinstance(kind, Kernel):
        return kind
    try:
        return _ALIASES[str(kind).lower()]
    except KeyError:
        raise DomainError(f"unknown kernel {kind!r}; expected one of {sorted(set(_ALIASES))}") from None


def kernel_value(k, x):
    return get_kernel(k).value(x)


def kernel_grad(k, x):
    return get_kernel(k).grad(x)


def kernel_grad_conj(k, z):
    return get_kernel(k).grad_conj(z)


def bregman_distance(k, y, x):
    return get_kernel(k).distance(y, x)
