"""Chebyshev extremal-grid tools and piecewise Chebyshev expansions.

All node sets are ordered ascending, so node 0 is the left endpoint of the
interval and node k-1 the right endpoint.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, InvalidArgumentError

EPS0 = np.finfo(float).eps


def _check_k(k):
    if int(k) != k or k < 2:
        raise InvalidArgumentError(f"need an integer k >= 2, got {k!r}")
    return int(k)


def _check_interval(interval):
    c, d = (float(v) for v in interval)
    if not (np.isfinite(c) and np.isfinite(d)) or not d > c:
        raise InvalidArgumentError(f"degenerate interval ({c}, {d})")
    return c, d


def _readonly(a):
    a.setflags(write=False)
    return a


@lru_cache(maxsize=None)
def _std_nodes(k):
    n = k - 1
    j = np.arange(k)
    # sin form is exactly antisymmetric about 0
    return _readonly(np.sin(np.pi * (2 * j - n) / (2 * n)))


@lru_cache(maxsize=None)
def _std_diff(k):
    x = _std_nodes(k)
    c = np.ones(k)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** np.arange(k)
    dx = x[:, None] - x[None, :]
    D = np.outer(c, 1.0 / c) / (dx + np.eye(k))
    D -= np.diag(D.sum(axis=1))
    return _readonly(D)


@lru_cache(maxsize=None)
def _synthesis(k):
    # T_m(x_j) with x_j = -cos(pi j / n): (-1)^m cos(pi j m / n)
    n = k - 1
    jm = np.outer(np.arange(k), np.arange(k))
    return _readonly(np.cos(np.pi * jm / n) * (-1.0) ** np.arange(k))


@lru_cache(maxsize=None)
def _analysis(k):
    n = k - 1
    w = np.ones(k)
    w[0] = w[-1] = 0.5
    A = (2.0 / n) * _synthesis(k).T * w[None, :]
    A[0] *= 0.5
    A[-1] *= 0.5
    return _readonly(A)


def cheb_nodes(k, interval=(-1.0, 1.0)):
    """The k-point extremal Chebyshev grid on ``interval``, ascending."""
    k = _check_k(k)
    c, d = _check_interval(interval)
    t = 0.5 * (d - c) * _std_nodes(k) + 0.5 * (d + c)
    t[0], t[-1] = c, d
    return t


def diff_matrix(k, interval=(-1.0, 1.0)):
    """Spectral differentiation matrix on the extremal grid of ``interval``."""
    k = _check_k(k)
    c, d = _check_interval(interval)
    return _std_diff(k) * (2.0 / (d - c))


def vals_to_coeffs(values):
    """Chebyshev coefficients of the interpolant of values at extremal nodes.

    Works along the last axis, so a stack of value vectors may be passed.
    """
    values = np.asarray(values)
    k = _check_k(values.shape[-1])
    return values @ _analysis(k).T


def coeffs_to_vals(coeffs):
    coeffs = np.asarray(coeffs)
    k = _check_k(coeffs.shape[-1])
    return coeffs @ _synthesis(k).T


def clenshaw(coeffs, x):
    """Evaluate sum_j a_j T_j(x) for x in [-1, 1].

    ``coeffs`` is either one coefficient vector or an array of shape
    ``x.shape + (k,)`` giving a separate vector for every point.
    """
    coeffs = np.asarray(coeffs)
    x = np.asarray(x, dtype=float)
    k = coeffs.shape[-1]
    per_point = coeffs.ndim > 1
    b1 = np.zeros(np.broadcast_shapes(x.shape, coeffs.shape[:-1]), dtype=np.result_type(coeffs, 1.0))
    b2 = np.zeros_like(b1)
    for j in range(k - 1, 0, -1):
        a = coeffs[..., j] if per_point else coeffs[j]
        b1, b2 = a + 2.0 * x * b1 - b2, b1
    a0 = coeffs[..., 0] if per_point else coeffs[0]
    return a0 + x * b1 - b2


def cheb_derivative_coeffs(coeffs):
    """Coefficients (same length, on [-1, 1]) of the derivative of a series."""
    coeffs = np.asarray(coeffs)
    k = coeffs.shape[-1]
    out = np.zeros_like(coeffs, dtype=np.result_type(coeffs, 1.0))
    if k < 2:
        return out
    out[..., k - 2] = 2 * (k - 1) * coeffs[..., k - 1]
    for j in range(k - 3, -1, -1):
        out[..., j] = out[..., j + 2] + 2 * (j + 1) * coeffs[..., j + 1]
    out[..., 0] *= 0.5
    return out


def _antiderivative_coeffs(a):
    # length k -> k + 1, constant term left at zero
    k = a.shape[-1]
    ext = np.zeros(a.shape[:-1] + (k + 2,), dtype=np.result_type(a, 1.0))
    ext[..., :k] = a
    ext[..., 0] *= 2.0
    b = np.zeros(a.shape[:-1] + (k + 1,), dtype=ext.dtype)
    n = np.arange(1, k + 1)
    b[..., 1:] = (ext[..., :k] - ext[..., 2:k + 2]) / (2.0 * n)
    return b


@dataclass(frozen=True)
class ChebExpansion:
    """A Chebyshev series on one interval.

    ``coeffs[j]`` multiplies ``T_j`` of the affine map of ``interval`` onto
    [-1, 1].
    """

    interval: tuple
    coeffs: np.ndarray

    def __post_init__(self):
        c, d = _check_interval(self.interval)
        coeffs = np.array(self.coeffs, dtype=complex)
        if coeffs.ndim != 1 or coeffs.size < 2:
            raise InvalidArgumentError("a ChebExpansion needs at least 2 coefficients")
        coeffs.setflags(write=False)
        object.__setattr__(self, "interval", (c, d))
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_values(cls, values, interval):
        return cls(interval, vals_to_coeffs(np.asarray(values, dtype=complex)))

    @property
    def k(self):
        return self.coeffs.size

    def local(self, t):
        c, d = self.interval
        return (2.0 * np.asarray(t, dtype=float) - (c + d)) / (d - c)

    def nodes(self):
        return cheb_nodes(self.k, self.interval)

    def values(self):
        return coeffs_to_vals(self.coeffs)

    def derivative(self, order=1):
        c, d = self.interval
        a = self.coeffs
        for _ in range(order):
            a = cheb_derivative_coeffs(a) * (2.0 / (d - c))
        return ChebExpansion(self.interval, a)

    def __call__(self, t, order=0):
        t = np.asarray(t, dtype=float)
        c, d = self.interval
        if np.any((t < c) | (t > d)):
            raise DomainError(f"point outside [{c}, {d}]")
        a = self.derivative(order).coeffs if order else self.coeffs
        return clenshaw(a, self.local(t))


def spectral_integrate(f, anchor, anchor_value=0.0):
    """Antiderivative F of ``f`` (one degree higher) with F(anchor) = value."""
    c, d = f.interval
    if not c <= anchor <= d:
        raise InvalidArgumentError(f"anchor {anchor} outside [{c}, {d}]")
    b = _antiderivative_coeffs(f.coeffs) * (0.5 * (d - c))
    b[0] = anchor_value - clenshaw(b, f.local(anchor))
    return ChebExpansion(f.interval, b)


class PiecewiseCheb:
    """Piecewise Chebyshev expansion with a common order k on every panel.

    Panel i lives on [x_i, x_{i+1}); the last panel is closed on the right,
    so every point of [x_0, x_m] belongs to exactly one panel.
    """

    def __init__(self, breakpoints, coeffs):
        x = np.array(breakpoints, dtype=float)
        a = np.array(coeffs, dtype=complex)
        if x.ndim != 1 or x.size < 2 or np.any(np.diff(x) <= 0):
            raise InvalidArgumentError("breakpoints must be strictly increasing")
        if a.ndim != 2 or a.shape[0] != x.size - 1 or a.shape[1] < 2:
            raise InvalidArgumentError(
                f"coefficient array shape {a.shape} does not fit {x.size - 1} panels"
            )
        x.setflags(write=False)
        a.setflags(write=False)
        self.breakpoints = x
        self.coeffs = a
        self._dcache = {0: a}

    @classmethod
    def from_panels(cls, panels):
        panels = list(panels)
        x = [panels[0].interval[0]] + [p.interval[1] for p in panels]
        for p, q in zip(panels, panels[1:]):
            if p.interval[1] != q.interval[0]:
                raise InvalidArgumentError("panels do not tile an interval")
        return cls(x, np.stack([p.coeffs for p in panels]))

    @property
    def npanels(self):
        return self.coeffs.shape[0]

    @property
    def k(self):
        return self.coeffs.shape[1]

    @property
    def domain(self):
        return float(self.breakpoints[0]), float(self.breakpoints[-1])

    @property
    def panels(self):
        x = self.breakpoints
        return [ChebExpansion((x[i], x[i + 1]), self.coeffs[i]) for i in range(self.npanels)]

    def owner(self, t):
        """Index of the panel owning each point of ``t``."""
        t = np.asarray(t, dtype=float)
        a, b = self.domain
        if np.any((t < a) | (t > b)) or np.any(np.isnan(t)):
            raise DomainError(f"point outside [{a}, {b}]")
        idx = np.searchsorted(self.breakpoints, t, side="right") - 1
        return np.minimum(idx, self.npanels - 1)

    def _deriv_coeffs(self, order):
        if order not in self._dcache:
            prev = self._deriv_coeffs(order - 1)
            h = np.diff(self.breakpoints)
            self._dcache[order] = cheb_derivative_coeffs(prev) * (2.0 / h)[:, None]
        return self._dcache[order]

    def __call__(self, t, order=0):
        if order < 0:
            raise InvalidArgumentError("derivative order must be >= 0")
        t = np.asarray(t, dtype=float)
        idx = self.owner(t)
        x = self.breakpoints
        u = (2.0 * t - (x[idx] + x[idx + 1])) / (x[idx + 1] - x[idx])
        return clenshaw(self._deriv_coeffs(order)[idx], u)

    def derivative(self, order=1):
        return PiecewiseCheb(self.breakpoints, self._deriv_coeffs(order))

    def endpoint_values(self):
        """Values at the left and right end of every panel, shape (m, 2)."""
        a = self.coeffs
        left = (a * (-1.0) ** np.arange(self.k)).sum(axis=1)
        return np.stack([left, a.sum(axis=1)], axis=1)

    def jumps(self):
        """|f(x_i^-) - f(x_i^+)| at the interior breakpoints."""
        ev = self.endpoint_values()
        return np.abs(ev[:-1, 1] - ev[1:, 0])


def piecewise_eval(p, t, order=0):
    return p(t, order)


def piecewise_integrate(f, eta, value_at_eta=0.0):
    """Continuous antiderivative F of ``f`` with F(eta) = value_at_eta.

    Each panel's antiderivative has degree k and is truncated back to the
    container order before the panel constants are chained outward from
    the panel owning ``eta``.
    """
    a, b = f.domain
    if not a <= eta <= b:
        raise InvalidArgumentError(f"eta = {eta} outside [{a}, {b}]")
    x = f.breakpoints
    h = np.diff(x)
    F = _antiderivative_coeffs(f.coeffs)[:, : f.k] * (0.5 * h)[:, None]
    sgn = (-1.0) ** np.arange(f.k)
    left = F @ sgn
    right = F.sum(axis=1)
    p = int(f.owner(eta))
    u = (2.0 * eta - (x[p] + x[p + 1])) / h[p]
    F[p, 0] += value_at_eta - clenshaw(F[p], u)
    for i in range(p + 1, f.npanels):
        F[i, 0] += (F[i - 1] @ np.ones(f.k)) - left[i]
    for i in range(p - 1, -1, -1):
        F[i, 0] += (F[i + 1] @ sgn) - right[i]
    return PiecewiseCheb(x, F)
