"""Scalar root finding: safeguarded Newton with bisection fallback, and Lambert W.

All routines are vectorized: brackets may be arrays, in which case every
element is solved independently and ``f`` is evaluated on whole arrays.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, MaxIterations, NoSignChange

_INV_E = float(np.exp(-1.0))


@dataclass(frozen=True)
class Bracket:
    """Closed search interval ``[lo, hi]`` (scalars or arrays)."""

    lo: object
    hi: object

    def __iter__(self):
        yield self.lo
        yield self.hi


def _midpoint(a, b):
    # geometric midpoint when both ends share a sign and span decades
    a_abs, b_abs = np.abs(a), np.abs(b)
    same = (a * b > 0) & (np.maximum(a_abs, b_abs) > 4.0 * np.minimum(a_abs, b_abs))
    with np.errstate(invalid="ignore"):
        geo = np.sign(a) * np.sqrt(a_abs * b_abs)
    return np.where(same, geo, 0.5 * (a + b))


def solve_monotone(f, bracket, df=None, tol=0.0, xtol=1e-14, max_iter=200, xscale=1.0):
    """Find a root of ``f`` inside a sign-changing bracket.

    Newton steps (or false-position steps when ``df`` is None) are accepted
    only while they stay strictly inside the current bracket and at least
    halve ``|f|``; otherwise the next step is a bisection.  The iterate never
    leaves the bracket.

    Parameters
    ----------
    f : callable
        Elementwise function of an array.
    bracket : Bracket or (lo, hi)
        Endpoints with ``f(lo)`` and ``f(hi)`` of opposite sign (or zero).
    df : callable, optional
        Elementwise derivative of ``f``.
    tol : float
        Stop when ``|f(x)| <= tol``.
    xtol : float
        Stop when the bracket width or Newton step is below
        ``xtol * max(xscale, |x|)``.
    max_iter : int
    xscale : float
        Magnitude below which ``xtol`` acts as an absolute tolerance.  Pass a
        tiny value when roots may be small and relative accuracy matters.

    Returns
    -------
    float or ndarray
        Roots with the broadcast shape of the bracket.
    """
    lo, hi = bracket
    lo, hi = np.broadcast_arrays(np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))
    scalar = lo.ndim == 0
    lo = np.array(lo, dtype=float, ndmin=1)
    hi = np.array(hi, dtype=float, ndmin=1)
    if np.any(np.isnan(lo)) or np.any(np.isnan(hi)):
        raise DomainError("bracket endpoints must not be NaN")
    lo, hi = np.minimum(lo, hi), np.maximum(lo, hi)

    flo = np.asarray(f(lo), dtype=float)
    fhi = np.asarray(f(hi), dtype=float)
    if np.any(np.sign(flo) * np.sign(fhi) > 0) or np.any(np.isnan(flo) | np.isnan(fhi)):
        raise NoSignChange("f has no sign change on the bracket")

    lo_is_neg = flo < 0
    neg = np.where(lo_is_neg, lo, hi)
    pos = np.where(lo_is_neg, hi, lo)
    fneg = np.where(lo_is_neg, flo, fhi)
    fpos = np.where(lo_is_neg, fhi, flo)

    done = (flo == 0) | (fhi == 0)
    x = np.where(flo == 0, lo, np.where(fhi == 0, hi, _midpoint(lo, hi)))
    fx = np.asarray(f(x), dtype=float)
    force_bisect = np.zeros(x.shape, dtype=bool)

    for _ in range(max_iter):
        active = ~done
        went_neg = active & (fx < 0)
        went_pos = active & (fx > 0)
        neg = np.where(went_neg, x, neg)
        fneg = np.where(went_neg, fx, fneg)
        pos = np.where(went_pos, x, pos)
        fpos = np.where(went_pos, fx, fpos)

        scale = np.maximum(xscale, np.abs(x))
        done |= active & ((fx == 0) | (np.abs(fx) <= tol) | (np.abs(pos - neg) <= xtol * scale))
        if done.all():
            break

        a = np.minimum(neg, pos)
        b = np.maximum(neg, pos)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if df is not None:
                cand = x - fx / np.asarray(df(x), dtype=float)
            else:
                cand = neg - fneg * (pos - neg) / (fpos - fneg)
        bisect = force_bisect | ~np.isfinite(cand) | (cand <= a) | (cand >= b)
        cand = np.where(bisect, _midpoint(a, b), cand)
        cand = np.where(done, x, cand)

        f_cand = np.asarray(f(cand), dtype=float)
        step_small = ~bisect & (np.abs(cand - x) <= xtol * np.maximum(xscale, np.abs(cand)))
        force_bisect = ~bisect & (np.abs(f_cand) > 0.5 * np.abs(fx))
        x, fx = cand, f_cand
        done |= step_small
    else:
        if not done.all():
            raise MaxIterations(f"{int((~done).sum())} roots unresolved after {max_iter} steps")

    return float(x[0]) if scalar else x


def bracket_toward(f, anchor, edge, max_steps=60, factor=0.25):
    """Walk from ``anchor`` toward ``edge`` until ``f`` changes sign.

    Finite edges are approached geometrically (``edge + (anchor-edge)*factor**k``);
    infinite edges are reached by geometric growth of the offset.

    Returns the first probe whose sign differs from ``f(anchor)``.  Entries
    with ``f(anchor) == 0`` or ``edge == anchor`` return the anchor.
    """
    anchor, edge = np.broadcast_arrays(np.asarray(anchor, dtype=float), np.asarray(edge, dtype=float))
    scalar = anchor.ndim == 0
    anchor = np.array(anchor, dtype=float, ndmin=1)
    edge = np.array(edge, dtype=float, ndmin=1)
    f0 = np.sign(np.asarray(f(anchor), dtype=float))
    found = (f0 == 0) | (anchor == edge)
    out = anchor.copy()
    direction = np.sign(edge - anchor)
    base = np.maximum(1.0, np.abs(anchor))
    finite = np.isfinite(edge)
    for k in range(1, max_steps + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            probe = np.where(finite, edge + (anchor - edge) * factor**k,
                             anchor + direction * base * (1.0 / factor) ** k)
        # never evaluate on a finite edge itself
        probe = np.where(finite & (probe == edge), np.nextafter(edge, anchor), probe)
        probe = np.where(found, out, probe)
        fp = np.sign(np.asarray(f(probe), dtype=float))
        hit = ~found & (fp != f0) & ~np.isnan(fp) & (probe != edge)
        out = np.where(hit, probe, out)
        found |= hit
        if found.all():
            return float(out[0]) if scalar else out
    raise NoSignChange(f"no sign change within {max_steps} steps toward the edge")


def lambert_w0(x):
    """Principal branch of the Lambert W function for real ``x >= -1/e``.

    Halley iteration from a branch-point series (near ``-1/e``), ``log1p``
    (moderate ``x``) or the asymptotic ``log x - log log x`` (large ``x``).
    """
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    if np.any(np.isnan(x)):
        raise DomainError("lambert_w0: NaN input")
    if np.any(x < -_INV_E * (1.0 + 4e-16)):
        raise DomainError("lambert_w0 requires x >= -1/e")
    x = np.maximum(x, -_INV_E)

    with np.errstate(invalid="ignore", divide="ignore"):
        p = np.sqrt(np.maximum(2.0 * (np.e * x + 1.0), 0.0))
        near_branch = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p**3
        l1 = np.log(np.maximum(x, 3.0))
        l2 = np.log(l1)
        asym = l1 - l2 + l2 / l1
    w = np.where(x < -0.25, near_branch,
                 np.where(x < 0.0, x - x * x,
                          np.where(x <= 3.0, np.log1p(np.maximum(x, 0.0)), asym)))
    w = np.where(np.isinf(x), np.inf, w)

    active = np.isfinite(x) & (x != 0.0) & (x != -_INV_E)
    w = np.where(x == -_INV_E, -1.0, w)
    for _ in range(50):
        if not active.any():
            break
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            ew = np.exp(w)
            fw = w * ew - x
            wp1 = w + 1.0
            step = fw / (ew * wp1 - (w + 2.0) * fw / (2.0 * wp1))
        step = np.where(active & np.isfinite(step), step, 0.0)
        w = w - step
        active &= np.abs(step) > 4e-16 * (1.0 + np.abs(w))
    return float(w[0]) if scalar else w


def lambert_w0_exp(z):
    """``W(exp(z))`` without forming ``exp(z)``; safe for large ``z``."""
    z = np.asarray(z, dtype=float)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    big = z > 500.0
    out = np.empty_like(z)
    if (~big).any():
        out[~big] = lambert_w0(np.exp(z[~big]))
    if big.any():
        zb = z[big]
        with np.errstate(invalid="ignore"):
            w = np.where(np.isinf(zb), np.inf, zb - np.log(zb))
        for _ in range(20):
            with np.errstate(invalid="ignore"):
                step = (w + np.log(w) - zb) / (1.0 + 1.0 / w)
            step = np.where(np.isfinite(step), step, 0.0)
            w = w - step
            if np.all(np.abs(step) <= 4e-16 * w):
                break
        out[big] = w
    return float(out[0]) if scalar else out
