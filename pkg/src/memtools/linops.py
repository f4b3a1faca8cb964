"""Linear operators with adjoints and norm estimates, plus blur and finite-difference builders."""
from __future__ import annotations

import math

import numpy as np
from scipy.ndimage import correlate1d

from .errors import DomainError, NonConvergence, Unsupported


class LinearOperator:
    """Matrix-free map ``R^d -> R^m`` with an adjoint.

    Subclasses implement ``_apply`` and ``_adjoint`` on 1-D arrays.
    """

    structure = "abstract"
    nonnegative = False

    def __init__(self, shape):
        self.shape = (int(shape[0]), int(shape[1]))

    def __repr__(self):
        return f"{type(self).__name__}(shape={self.shape})"

    def apply(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.shape[1],):
            raise DomainError(f"expected a vector of length {self.shape[1]}, got shape {x.shape}")
        return self._apply(x)

    def adjoint(self, y):
        y = np.asarray(y, dtype=float)
        if y.shape != (self.shape[0],):
            raise DomainError(f"expected a vector of length {self.shape[0]}, got shape {y.shape}")
        return self._adjoint(y)

    def __matmul__(self, x):
        return self.apply(x)

    @property
    def T(self):
        return _Adjoint(self)

    def to_dense(self):
        d = self.shape[1]
        cols = [self._apply(e) for e in np.eye(d)]
        return np.array(cols).T.reshape(self.shape)

    def column_abs_sums(self):
        return np.abs(self.to_dense()).sum(axis=0)

    def row_abs_sums(self):
        return np.abs(self.to_dense()).sum(axis=1)


class _Adjoint(LinearOperator):
    structure = "adjoint"

    def __init__(self, op):
        super().__init__((op.shape[1], op.shape[0]))
        self.op = op
        self.nonnegative = op.nonnegative

    def _apply(self, x):
        return self.op._adjoint(x)

    def _adjoint(self, y):
        return self.op._apply(y)


class DenseOperator(LinearOperator):
    structure = "dense"

    def __init__(self, matrix):
        m = np.array(matrix, dtype=float, ndmin=2)
        if m.ndim != 2:
            raise DomainError("a dense operator needs a 2-D matrix")
        if not np.all(np.isfinite(m)):
            raise DomainError("matrix entries must be finite")
        super().__init__(m.shape)
        self.matrix = m
        self.nonnegative = bool(np.all(m >= 0))

    def _apply(self, x):
        return self.matrix @ x

    def _adjoint(self, y):
        return self.matrix.T @ y

    def to_dense(self):
        return self.matrix.copy()


class IdentityOperator(LinearOperator):
    structure = "identity"
    nonnegative = True

    def __init__(self, n):
        super().__init__((n, n))

    def _apply(self, x):
        return x.copy()

    _adjoint = _apply

    def to_dense(self):
        return np.eye(self.shape[0])


class FunctionOperator(LinearOperator):
    """Operator given only by ``apply``/``adjoint`` callables (no column access)."""

    structure = "function"

    def __init__(self, apply, adjoint, shape, nonnegative=False):
        super().__init__(shape)
        self._f, self._g = apply, adjoint
        self.nonnegative = nonnegative

    def _apply(self, x):
        return np.asarray(self._f(x), dtype=float)

    def _adjoint(self, y):
        return np.asarray(self._g(y), dtype=float)

    def column_abs_sums(self):
        raise Unsupported("column sums need column access; this operator is matrix-free")

    row_abs_sums = column_abs_sums


_MODES = {"reflect": "reflect", "zero_pad": "constant"}


def _check_boundary(boundary):
    if boundary not in _MODES:
        raise DomainError(f"boundary must be one of {sorted(_MODES)}, got {boundary!r}")
    return _MODES[boundary]


class Conv1D(LinearOperator):
    """Centered 1-D correlation with an odd-length kernel."""

    structure = "conv1d"

    def __init__(self, kernel, size, boundary="reflect"):
        k = np.asarray(kernel, dtype=float).ravel()
        if k.size % 2 != 1:
            raise DomainError("convolution kernels must have odd length")
        super().__init__((size, size))
        self.kernel = k
        self.boundary = boundary
        self._mode = _check_boundary(boundary)
        self.nonnegative = bool(np.all(k >= 0))
        self._matrix = None

    def _dense(self):
        if self._matrix is None:
            n = self.shape[0]
            cols = [correlate1d(e, self.kernel, mode=self._mode, cval=0.0) for e in np.eye(n)]
            self._matrix = np.array(cols).T
        return self._matrix

    def _apply(self, x):
        return correlate1d(x, self.kernel, mode=self._mode, cval=0.0)

    def _adjoint(self, y):
        if self._mode == "constant":
            return correlate1d(y, self.kernel[::-1], mode="constant", cval=0.0)
        return self._dense().T @ y

    def to_dense(self):
        return self._dense().copy()


class Conv2D(LinearOperator):
    """Separable 2-D blur ``X -> B_r X B_c^T`` on row-major flattened images."""

    structure = "conv2d"

    def __init__(self, kernel, height, width, boundary="reflect"):
        self.rows = Conv1D(kernel, height, boundary)
        self.cols = Conv1D(kernel, width, boundary)
        super().__init__((height * width, height * width))
        self.height, self.width = height, width
        self.nonnegative = self.rows.nonnegative

    def _apply(self, x):
        X = x.reshape(self.height, self.width)
        out = correlate1d(X, self.rows.kernel, axis=0, mode=self.rows._mode, cval=0.0)
        out = correlate1d(out, self.cols.kernel, axis=1, mode=self.cols._mode, cval=0.0)
        return out.ravel()

    def _adjoint(self, y):
        Y = y.reshape(self.height, self.width)
        Br, Bc = self.rows._dense(), self.cols._dense()
        return (Br.T @ Y @ Bc).ravel()

    def column_abs_sums(self):
        r = np.abs(self.rows._dense()).sum(axis=0)
        c = np.abs(self.cols._dense()).sum(axis=0)
        return np.outer(r, c).ravel()

    def row_abs_sums(self):
        r = np.abs(self.rows._dense()).sum(axis=1)
        c = np.abs(self.cols._dense()).sum(axis=1)
        return np.outer(r, c).ravel()


class FiniteDiff2D(LinearOperator):
    """Forward differences of an image; output holds ``(dy, dx)`` per pixel.

    The difference is zero across the last row and column (Neumann boundary).
    Block ``i`` of the output, ``out[2i:2i+2]``, is the 2-vector ``L_i x``.
    """

    structure = "finite_diff_2d"

    def __init__(self, height, width):
        if height < 1 or width < 1:
            raise DomainError("image dimensions must be positive")
        super().__init__((2 * height * width, height * width))
        self.height, self.width = height, width

    def _apply(self, x):
        X = x.reshape(self.height, self.width)
        out = np.zeros((self.height, self.width, 2))
        out[:-1, :, 0] = X[1:, :] - X[:-1, :]
        out[:, :-1, 1] = X[:, 1:] - X[:, :-1]
        return out.ravel()

    def _adjoint(self, y):
        G = y.reshape(self.height, self.width, 2)
        gy, gx = G[..., 0], G[..., 1]
        out = np.zeros((self.height, self.width))
        out[1:, :] += gy[:-1, :]
        out[:-1, :] -= gy[:-1, :]
        out[:, 1:] += gx[:, :-1]
        out[:, :-1] -= gx[:, :-1]
        return out.ravel()


class StackedOperator(LinearOperator):
    """Vertical stack ``[A_1; A_2; ...]`` of operators sharing a domain."""

    structure = "stacked"

    def __init__(self, ops):
        ops = list(ops)
        d = ops[0].shape[1]
        if any(o.shape[1] != d for o in ops):
            raise DomainError("stacked operators must share their input dimension")
        super().__init__((sum(o.shape[0] for o in ops), d))
        self.ops = ops
        self.nonnegative = all(o.nonnegative for o in ops)
        self._splits = np.cumsum([o.shape[0] for o in ops])[:-1]

    def _apply(self, x):
        return np.concatenate([o._apply(x) for o in self.ops])

    def _adjoint(self, y):
        parts = np.split(y, self._splits)
        return sum(o._adjoint(p) for o, p in zip(self.ops, parts))

    def column_abs_sums(self):
        return sum(o.column_abs_sums() for o in self.ops)


def as_operator(A) -> LinearOperator:
    if isinstance(A, LinearOperator):
        return A
    return DenseOperator(A)


def identity(n):
    return IdentityOperator(n)


def finite_difference_2d(height, width):
    return FiniteDiff2D(height, width)


def gaussian_kernel(sigma, half_width=None):
    """Normalized samples of a Gaussian on ``-r..r`` with ``r = ceil(3 sigma)``."""
    if not sigma >= 0:
        raise DomainError("blur width sigma must be nonnegative")
    r = int(math.ceil(3 * sigma)) if half_width is None else int(half_width)
    if r == 0 or sigma == 0:
        return np.ones(1)
    k = np.exp(-0.5 * (np.arange(-r, r + 1) / sigma) ** 2)
    return k / k.sum()


def convolution_1d(kernel, size, boundary="reflect"):
    return Conv1D(kernel, size, boundary)


def gaussian_blur(dimension, size, sigma, boundary="reflect", half_width=None):
    """Gaussian blur operator.

    ``dimension`` is ``1`` (``size`` = length) or ``2`` (``size`` = (height, width)).
    ``boundary`` is ``"reflect"`` (mirror the edge samples) or ``"zero_pad"``.
    """
    k = gaussian_kernel(sigma, half_width)
    if int(dimension) == 1:
        return Conv1D(k, int(size), boundary)
    if int(dimension) == 2:
        h, w = size
        return Conv2D(k, int(h), int(w), boundary)
    raise DomainError("dimension must be 1 or 2")


def op_norm_2(A, tol=1e-10, max_iter=10_000, seed=0):
    """Spectral norm by power iteration on ``A^T A`` from a seeded start."""
    A = as_operator(A)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(A.shape[1])
    nv = np.linalg.norm(v)
    if nv == 0:
        return 0.0
    v /= nv
    lam = 0.0
    for _ in range(max_iter):
        w = A._adjoint(A._apply(v))
        new = float(np.linalg.norm(w))
        if new == 0.0:
            return 0.0
        v = w / new
        if abs(new - lam) <= tol * new:
            return math.sqrt(new)
        lam = new
    raise NonConvergence(f"power iteration did not reach tol={tol} in {max_iter} iterations")


def norm_1_columns(A) -> float:
    """Largest absolute column sum ``max_j sum_i |A_ij|``."""
    return float(np.max(as_operator(A).column_abs_sums()))


def read_matrix(path):
    m = np.loadtxt(path, dtype=float, ndmin=2)
    return m


def read_vector(path):
    return np.loadtxt(path, dtype=float, ndmin=1)


def write_vector(path, v):
    with open(path, "w") as fh:
        for x in np.asarray(v, dtype=float).ravel():
            fh.write(f"{x:.17g}\n")


def write_matrix(path, m):
    m = np.asarray(m, dtype=float)
    with open(path, "w") as fh:
        for row in np.atleast_2d(m):
            fh.write(" ".join(f"{x:.17g}" for x in row) + "\n")
