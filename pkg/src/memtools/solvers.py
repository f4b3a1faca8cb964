"""First-order solvers: Bregman proximal gradient with its accelerated
energy-kernel variant, plus a primal-dual scheme for NIG total-variation deblurring."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import LinearOperator as _ScipyOperator
from scipy.sparse.linalg import cg

from .errors import DomainError, StepSizeError, Unsupported
from .kernels import ENERGY
from .linops import as_operator, finite_difference_2d, op_norm_2
from .rootfind import solve_monotone


@dataclass
class SolverOptions:
    """Iteration budget and step size (``None`` means ``1/L``).

    ``tol`` stops on small relative iterate and objective change; ``trace_stride``
    thins the recorded trace.
    """

    max_iters: int = 500
    step: float | None = None
    tol: float = 1e-12
    trace_stride: int = 1
    keep_iterates: bool = False

    def __post_init__(self):
        if int(self.max_iters) < 1:
            raise DomainError("max_iters must be a positive integer")
        self.max_iters = int(self.max_iters)
        if self.step is not None and not (self.step > 0 and math.isfinite(self.step)):
            raise StepSizeError("step must be a positive finite number")
        if not self.tol >= 0:
            raise DomainError("tol must be nonnegative")
        if int(self.trace_stride) < 1:
            raise DomainError("trace_stride must be a positive integer")
        self.trace_stride = int(self.trace_stride)


@dataclass
class SolverTrace:
    k: list = field(default_factory=list)
    objective: list = field(default_factory=list)
    residual: list = field(default_factory=list)
    change: list = field(default_factory=list)
    iterates: list = field(default_factory=list)
    x: np.ndarray | None = None
    reason: str = ""
    step: float = float("nan")
    iterations: int = 0
    dual: np.ndarray | None = None
    max_residual: float = 0.0

    def record(self, k, obj, res, chg, x=None):
        self.k.append(int(k))
        self.objective.append(float(obj))
        self.residual.append(float(res))
        self.change.append(float(chg))
        if x is not None:
            self.iterates.append(np.array(x, copy=True))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["k", "objective", "residual", "change"])
            for row in zip(self.k, self.objective, self.residual, self.change):
                w.writerow([row[0]] + [f"{v:.17g}" for v in row[1:]])


def _rel_change(x_new, x_old):
    return float(np.linalg.norm(x_new - x_old) / max(1.0, np.linalg.norm(x_old)))


def _resolve_step(problem, opts):
    L = problem.smoothness()
    if opts.step is None:
        return 1.0 / L
    # L carries a 1e-9 safety inflation; accept steps within that margin of 1/L
    if opts.step > (1.0 / L) * (1 + 1e-8):
        raise StepSizeError(f"step {opts.step} exceeds 1/L = {1.0 / L}")
    return float(opts.step)


def _start(problem, x0):
    x = np.array(x0, dtype=float, copy=True).ravel()
    if x.shape != (problem.dim,):
        raise DomainError(f"x0 must have length {problem.dim}")
    if not problem.kernel.in_interior(x):
        raise DomainError(f"x0 must lie in the interior of dom h ({problem.kernel.name} kernel)")
    F = problem.objective(x)
    if not np.isfinite(F):
        raise DomainError("objective is infinite at x0")
    return x, F


def bpg_step(problem, x, t):
    """One Bregman proximal gradient step from ``x`` with step ``t``."""
    h = problem.kernel
    z = h.grad_conj(h.grad(x) - t * problem.f_grad(x))
    return problem.prox_g(t, np.atleast_1d(z))


def bpg(problem, x0, opts=None, callback=None) -> SolverTrace:
    """Bregman proximal gradient method.

    ``callback(k, x)`` is invoked after every iteration; a truthy return value
    stops the run.
    """
    opts = opts or SolverOptions()
    if not problem.prox_compatible:
        raise Unsupported("composite regularizers need smooth_regularizer=True or a primal-dual solver")
    t = _resolve_step(problem, opts)
    x, F = _start(problem, x0)
    h = problem.kernel
    trace = SolverTrace(step=t)
    trace.record(0, F, float("nan"), float("nan"), x if opts.keep_iterates else None)
    trace.reason = "max_iters"
    for k in range(1, opts.max_iters + 1):
        x_new = bpg_step(problem, x, t)
        if not h.in_interior(x_new):
            raise DomainError("iterate left the interior of dom h")
        F_new = problem.objective(x_new)
        res = float(np.max(np.abs(h.grad(x) - h.grad(x_new)))) / t
        chg = _rel_change(x_new, x)
        obj_chg = abs(F_new - F) / max(1.0, abs(F))
        x, F = x_new, F_new
        if k % opts.trace_stride == 0 or k == opts.max_iters:
            trace.record(k, F, res, chg, x if opts.keep_iterates else None)
        trace.iterations = k
        if callback is not None and callback(k, x):
            trace.reason = "callback"
            break
        if chg < opts.tol and obj_chg < opts.tol:
            trace.reason = "converged"
            break
    if trace.k[-1] != trace.iterations:
        trace.record(trace.iterations, F, res, chg, x if opts.keep_iterates else None)
    trace.x = x
    return trace


def fista_momentum(t):
    """Next momentum parameter ``(1 + sqrt(1 + 4 t^2)) / 2``."""
    return 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))


def fista(problem, x0, opts=None, callback=None) -> SolverTrace:
    """FISTA with restart whenever the objective increases (energy kernel only)."""
    opts = opts or SolverOptions()
    if problem.kernel is not ENERGY:
        raise Unsupported("FISTA needs the energy kernel")
    if not problem.prox_compatible:
        raise Unsupported("composite regularizers need smooth_regularizer=True or a primal-dual solver")
    t = _resolve_step(problem, opts)
    x, F = _start(problem, x0)
    trace = SolverTrace(step=t)
    trace.record(0, F, float("nan"), float("nan"), x if opts.keep_iterates else None)
    trace.reason = "max_iters"
    y, x_prev, mom = x.copy(), x.copy(), 1.0
    for k in range(1, opts.max_iters + 1):
        x_new = bpg_step(problem, y, t)
        F_new = problem.objective(x_new)
        if F_new > F:
            # restart from the last iterate without momentum
            mom = 1.0
            x_new = bpg_step(problem, x, t)
            F_new = problem.objective(x_new)
            base = x
        else:
            base = y
        res = float(np.max(np.abs(base - x_new))) / t
        mom_next = fista_momentum(mom)
        y = x_new + ((mom - 1.0) / mom_next) * (x_new - x)
        mom = mom_next
        chg = _rel_change(x_new, x)
        obj_chg = abs(F_new - F) / max(1.0, abs(F))
        x_prev, x, F = x, x_new, F_new
        if k % opts.trace_stride == 0 or k == opts.max_iters:
            trace.record(k, F, res, chg, x if opts.keep_iterates else None)
        trace.iterations = k
        if callback is not None and callback(k, x):
            trace.reason = "callback"
            break
        if chg < opts.tol and obj_chg < opts.tol:
            trace.reason = "converged"
            break
    if trace.k[-1] != trace.iterations:
        trace.record(trace.iterations, F, res, chg, x if opts.keep_iterates else None)
    trace.x = x
    return trace


# ---------------------------------------------------------------- primal-dual NIG-TV

def nig_tv_objective(A, y, delta, x, L=None):
    """``0.5||Ax - y||^2 + sum_i (sqrt(delta^2 + ||L_i x||^2) - delta)``."""
    A = as_operator(A)
    L = L or finite_difference_2d(*_image_shape(A, x))
    r = A.apply(x) - y
    g = L.apply(x).reshape(-1, 2)
    return float(0.5 * r @ r + np.sum(np.sqrt(delta**2 + np.sum(g * g, axis=1)) - delta))


def _image_shape(A, x):
    h = getattr(A, "height", None)
    if h is not None:
        return A.height, A.width
    n = int(round(math.sqrt(np.size(x))))
    if n * n != np.size(x):
        raise DomainError("cannot infer the image shape; pass a square image or a 2-D blur operator")
    return n, n


def dual_multiplier(vnorm2, s, delta):
    """Per-block root ``rho >= 0`` of ``rho^2 (s delta)^2 + (rho/(1+rho))^2 ||v||^2 = 1``.

    Returns ``(rho, residual)``.
    """
    vnorm2 = np.asarray(vnorm2, dtype=float)
    sd2 = (s * delta) ** 2

    def phi(r):
        return r * r * sd2 + (r / (1 + r)) ** 2 * vnorm2 - 1.0

    def dphi(r):
        return 2 * r * sd2 + 2 * r / (1 + r) ** 3 * vnorm2

    hi = np.full(vnorm2.shape, 1.0 / (s * delta))
    rho = solve_monotone(phi, (np.zeros(vnorm2.shape), hi), df=dphi, xtol=1e-15)
    rho = np.asarray(rho, dtype=float)
    return rho, np.abs(phi(rho))


def chambolle_pock_nig_tv(A, y, delta, s, tau, x0, opts=None, L=None, shape=None) -> SolverTrace:
    """Primal-dual iterations for ``0.5||Ax - y||^2 + sum_i psi^*(L_i x)`` with an
    isotropic NIG prior (``mu = beta = 0``, ``alpha = 1``, identity shape).

    ``A`` acts on row-major images; ``L`` defaults to forward differences.
    The trace residual is the largest residual of the per-block multiplier
    equation in that iteration.
    """
    opts = opts or SolverOptions()
    A = as_operator(A)
    y = np.asarray(y, dtype=float).ravel()
    x = np.array(x0, dtype=float, copy=True).ravel()
    if not (delta > 0 and s > 0 and tau > 0):
        raise DomainError("delta, s and tau must be positive")
    if L is None:
        L = finite_difference_2d(*(shape or _image_shape(A, x)))
    L = as_operator(L)
    normL2 = op_norm_2(L) ** 2 * (1 + 1e-9)
    if s * tau * normL2 >= 1:
        raise StepSizeError(f"s * tau * ||L||^2 = {s * tau * normL2:.6g} must be < 1")
    d = x.size
    Aty = A.adjoint(y)
    system = _ScipyOperator((d, d), matvec=lambda v: v + tau * A.adjoint(A.apply(v)), dtype=float)

    p = np.zeros(L.shape[0])
    z = x.copy()
    F = nig_tv_objective(A, y, delta, x, L)
    trace = SolverTrace(step=tau)
    trace.record(0, F, 0.0, float("nan"), x if opts.keep_iterates else None)
    trace.reason = "max_iters"
    for k in range(1, opts.max_iters + 1):
        v = (p + s * L.apply(z)).reshape(-1, 2)
        rho, res = dual_multiplier(np.sum(v * v, axis=1), s, delta)
        p = ((rho / (1 + rho))[:, None] * v).ravel()
        rhs = x - tau * (L.adjoint(p) - Aty)
        x_new, info = cg(system, rhs, x0=x, rtol=1e-10, atol=0.0, maxiter=5 * d)
        if info < 0:
            raise DomainError("conjugate gradient failed on the primal update")
        z = 2 * x_new - x
        chg = _rel_change(x_new, x)
        F_new = nig_tv_objective(A, y, delta, x_new, L)
        obj_chg = abs(F_new - F) / max(1.0, abs(F))
        x, F = x_new, F_new
        rmax = float(np.max(res)) if res.size else 0.0
        trace.max_residual = max(trace.max_residual, rmax)
        if k % opts.trace_stride == 0 or k == opts.max_iters:
            trace.record(k, F, rmax, chg, x if opts.keep_iterates else None)
        trace.iterations = k
        if chg < opts.tol and obj_chg < opts.tol:
            trace.reason = "converged"
            break
    if trace.k[-1] != trace.iterations:
        trace.record(trace.iterations, F, rmax, chg, x if opts.keep_iterates else None)
    trace.x = x
    trace.dual = p
    return trace
