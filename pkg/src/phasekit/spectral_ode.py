"""Adaptive piecewise-Chebyshev solver for y' = F(t, y) with y(eta) = v.

Panels are processed leftmost first, marching away from the anchor; the
part of the interval left of the anchor is handled by the reflection
t -> -t.  A panel is accepted when, for every component, the root energy
of the coefficients past index floor(k/2) relative to the total is at most
eps.  Components at roundoff level relative to the whole solution vector
are exempt (their tail is pure noise); ``IvpSpec.scales`` sets the
relative size of the components for that comparison.

Right-hand sides are vectorized: ``rhs(t, y)`` takes t of shape (m,) and
y of shape (d, m) and returns (d, m); ``jac(t, y)`` returns (d, d, m).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import chebkit
from .chebkit import PiecewiseCheb
from .errors import InvalidArgumentError, RefinementError, SingularSystemError, StiffnessError

EPS0 = np.finfo(float).eps
_SUBNORMAL_LIMIT = np.finfo(float).tiny / EPS0


@dataclass
class IvpSpec:
    interval: tuple
    eta: float
    v: np.ndarray
    rhs: object
    jac: object
    linear: bool = False
    k: int = 16
    eps: float = 1e-12
    max_depth: int = 40
    newton_maxiter: int = 12
    scales: np.ndarray | None = None

    def __post_init__(self):
        a, b = (float(x) for x in self.interval)
        if not b > a:
            raise InvalidArgumentError(f"bad interval {self.interval}")
        if not a <= self.eta <= b:
            raise InvalidArgumentError(f"anchor {self.eta} outside [{a}, {b}]")
        self.interval = (a, b)
        self.v = np.atleast_1d(np.asarray(self.v, dtype=complex))
        if self.k < 4:
            raise InvalidArgumentError("need k >= 4")
        if self.scales is None:
            self.scales = np.ones(self.v.size)
        self.scales = np.asarray(self.scales, dtype=float)
        if self.scales.shape != self.v.shape or not np.all(self.scales > 0):
            raise InvalidArgumentError("scales must be positive, one per component")

    @property
    def dim(self):
        return self.v.size


@dataclass
class IvpSolution:
    components: list
    panel_ratios: np.ndarray = field(repr=False)

    @property
    def breakpoints(self):
        return self.components[0].breakpoints

    @property
    def npanels(self):
        return self.components[0].npanels

    def __call__(self, t, order=0):
        return np.array([c(t, order) for c in self.components])


class _PanelFailure(Exception):
    pass


def _cheb_vander(x, k):
    return np.cos(np.outer(np.arccos(np.clip(x, -1, 1)), np.arange(k)))


@lru_cache(maxsize=None)
def _radau_points(k):
    """Legendre-Gauss-Radau points on [-1, 1] containing the right endpoint."""
    c = np.zeros(k + 1)
    c[k - 1] = c[k] = 1.0
    x = np.sort(-np.polynomial.legendre.legroots(c).real)
    x[-1] = 1.0
    return x


@lru_cache(maxsize=None)
def _std_integration(k):
    """Values at the extremal nodes of int_{-1}^x p, p the interpolant of nodal data."""
    return _integration_at(k, chebkit._std_nodes(k))


def _integration_at(k, x):
    A = chebkit._analysis(k)
    B = chebkit._antiderivative_coeffs(np.eye(k))  # row m: antiderivative of T_m
    V = _cheb_vander(np.concatenate([[-1.0], x]), k + 1) @ B.T
    S = (V[1:] - V[0]) @ A
    S.setflags(write=False)
    return S


@lru_cache(maxsize=None)
def _std_collocation(k):
    """(points, interpolation, integration) for Radau collocation with k points.

    Interpolation and integration act on values at the extremal nodes and
    return values at the collocation points.
    """
    x = _radau_points(k)
    E = _cheb_vander(x, k) @ chebkit._analysis(k)
    E.setflags(write=False)
    x.setflags(write=False)
    return x, E, _integration_at(k, x)


def integration_matrix(k, interval):
    c, d = interval
    return _std_integration(k) * (0.5 * (d - c))


@dataclass(frozen=True)
class _Panel:
    """Extremal nodes t, collocation points tc and the maps between them."""

    t: np.ndarray
    tc: np.ndarray
    E: np.ndarray
    Sc: np.ndarray
    S: np.ndarray

    @classmethod
    def build(cls, k, interval):
        c, d = interval
        x, E, Sc = _std_collocation(k)
        h = 0.5 * (d - c)
        return cls(chebkit.cheb_nodes(k, interval), h * x + 0.5 * (c + d), E, h * Sc,
                   integration_matrix(k, interval))


def _solve_linear_panel(A, f, w, pan):
    """Collocate sigma - A (w + S sigma) = f at the Radau points.

    ``A`` (d, d, k) and ``f`` (d, k) are sampled at the collocation points;
    sigma = u' is represented by its values at the extremal nodes and the
    function returns u = w + S sigma there.  Because the last collocation
    point is the right endpoint, modes far too fast for the panel are
    damped rather than carried along with unit amplification.
    """
    dim, _, k = A.shape
    M = np.zeros((dim * k, dim * k), dtype=complex)
    rhs = f.astype(complex).copy()
    for i in range(dim):
        for l in range(dim):
            blk = -A[i, l][:, None] * pan.Sc
            if i == l:
                blk = blk + pan.E
            M[i * k:(i + 1) * k, l * k:(l + 1) * k] = blk
            rhs[i] += A[i, l] * w[l]
    try:
        sigma = np.linalg.solve(M, rhs.ravel()).reshape(dim, k)
    except np.linalg.LinAlgError as exc:
        raise _PanelFailure(str(exc)) from exc
    if not np.all(np.isfinite(sigma)):
        raise _PanelFailure("non-finite panel solution")
    return sigma


def integral_eq_panel(A, f, u_c, interval, k=None):
    """Solve u' = A(t) u + f(t), u(c) = u_c on one panel.

    ``A`` is either an array (d, d, k) of samples at the extremal nodes of
    ``interval`` or a callable t -> (d, d, m); likewise ``f`` with shape
    (d, k) or a callable t -> (d, m).  Callables are sampled exactly at the
    collocation points, arrays are interpolated there.  Returns one
    ChebExpansion per component.
    """
    u_c = np.atleast_1d(np.asarray(u_c, dtype=complex))
    dim = u_c.size
    for g in (A, f):
        if k is None and not callable(g):
            k = np.asarray(g).shape[-1]
    if k is None:
        raise InvalidArgumentError("pass k when both A and f are callables")
    pan = _Panel.build(k, interval)

    def at_colloc(g, shape):
        if callable(g):
            return np.asarray(g(pan.tc), dtype=complex).reshape(shape)
        return np.asarray(g, dtype=complex).reshape(shape) @ pan.E.T

    Ac = at_colloc(A, (dim, dim, k))
    fc = at_colloc(f, (dim, k))
    try:
        sigma = _solve_linear_panel(Ac, fc, u_c, pan)
    except _PanelFailure as exc:
        raise SingularSystemError(f"collocation system failed on {interval}: {exc}") from exc
    u = u_c[:, None] + sigma @ pan.S.T
    return [chebkit.ChebExpansion.from_values(ui, interval) for ui in u]


def _trapezoid(rhs, jac, t, w, tol=1e-10, maxiter=8):
    """Trapezoidal rule over the nodes ``t``; each implicit step is solved
    by a chord iteration with the Jacobian frozen at the previous node.
    Only a warm start, so ``tol`` is loose."""
    dim, k = w.size, t.size
    y = np.empty((dim, k), dtype=complex)
    y[:, 0] = w
    eye = np.eye(dim)
    fj = rhs(t[:1], y[:, :1])
    for j in range(k - 1):
        h = t[j + 1] - t[j]
        yj = y[:, j:j + 1]
        tn = t[j + 1:j + 2]
        J = eye - 0.5 * h * jac(t[j:j + 1], yj)[:, :, 0]
        z = yj + h * fj
        for _ in range(maxiter):
            fz = rhs(tn, z)
            g = z - yj - 0.5 * h * (fj + fz)
            try:
                dz = np.linalg.solve(J, -g)
            except np.linalg.LinAlgError as exc:
                raise _PanelFailure(str(exc)) from exc
            z = z + dz
            if not np.all(np.isfinite(z)):
                raise _PanelFailure("trapezoidal warm start diverged")
            if np.linalg.norm(dz) <= tol * max(np.linalg.norm(z), 1e-300):
                break
        y[:, j + 1] = z[:, 0]
        fj = rhs(tn, z)
    return y


def _solve_nonlinear_panel(rhs, jac, pan, w, eps, maxiter):
    y = _trapezoid(rhs, jac, pan.t, w)
    sigma = rhs(pan.t, y)
    tol = max(eps, 10 * EPS0)
    for _ in range(maxiter):
        yc = w[:, None] + sigma @ pan.Sc.T
        G = sigma @ pan.E.T - rhs(pan.tc, yc)
        J = jac(pan.tc, yc)
        if not (np.all(np.isfinite(G)) and np.all(np.isfinite(J))):
            raise _PanelFailure("non-finite Newton iterate")
        # the linearized step is the same integral equation with A = J
        dsigma = _solve_linear_panel(J, -G, np.zeros_like(w), pan)
        sigma = sigma + dsigma
        du = dsigma @ pan.S.T
        u = w[:, None] + sigma @ pan.S.T
        if np.linalg.norm(du) <= tol * max(np.linalg.norm(u), EPS0):
            return u
    raise _PanelFailure("Newton did not converge on panel")


def _accept_ratios(coeffs, eps, scales=None):
    """Per-component tail ratios after the roundoff exemption, shape (d,).

    The exemption compares each component with the largest one after
    multiplying component i by ``scales[i]``; with scales s^-m for the
    m-th derivative of a function varying on the scale 1/s, noise of
    relative size eps0 * s^m in that derivative is not chased.
    """
    k = coeffs.shape[-1]
    mag = np.abs(coeffs)
    top = mag.max(axis=-1)
    if not np.all(np.isfinite(top)):
        return np.full(coeffs.shape[0], np.inf)
    safe = np.where(top > 0, top, 1.0)
    e = (mag / safe[:, None]) ** 2
    norm = safe * np.sqrt(e.sum(axis=-1))
    tail = safe * np.sqrt(e[:, k // 2 + 1:].sum(axis=-1))
    w = np.ones(len(norm)) if scales is None else np.asarray(scales, dtype=float)
    floor = (norm * w).max() / w * (100 * EPS0 / eps)
    ratio = tail / np.maximum(np.maximum(norm, floor), np.finfo(float).tiny)
    # no relative precision left near the subnormal range
    return np.where(top < _SUBNORMAL_LIMIT, 0.0, ratio)


def _panel_solution(spec, rhs, jac, pan, w):
    if spec.linear:
        zero = np.zeros((w.size, spec.k), dtype=complex)
        sigma = _solve_linear_panel(jac(pan.tc, zero), rhs(pan.tc, zero), w, pan)
        return w[:, None] + sigma @ pan.S.T
    return _solve_nonlinear_panel(rhs, jac, pan, w, spec.eps, spec.newton_maxiter)


def _march(spec, rhs, jac, c0, d0, w, min_width):
    k, eps = spec.k, spec.eps
    stack = [(c0, d0, 0)]
    panels, ratios = [], []
    while stack:
        c, d, depth = stack.pop()
        pan = _Panel.build(k, (c, d))
        failure = None
        try:
            # a diverging trial overflows; the failure is caught and the panel split
            with np.errstate(over="ignore", invalid="ignore"):
                u = _panel_solution(spec, rhs, jac, pan, w)
        except _PanelFailure as exc:
            failure = str(exc)
        if failure is None:
            coeffs = chebkit.vals_to_coeffs(u)
            rat = _accept_ratios(coeffs, eps, spec.scales)
            if np.all(rat <= eps):
                panels.append((c, d, coeffs))
                ratios.append(float(rat.max()))
                w = u[:, -1]
                continue
        half = 0.5 * (d - c)
        if depth >= spec.max_depth or half < min_width:
            if failure is not None:
                raise StiffnessError(f"panel solve failed on minimal panel [{c:.16g}, {d:.16g}]: {failure}", location=c)
            raise RefinementError(f"max depth reached on [{c:.16g}, {d:.16g}]", intervals=[(c, d)])
        m = c + half
        stack.append((m, d, depth + 1))
        stack.append((c, m, depth + 1))
    return panels, ratios


def _reflected(f):
    def g(s, y):
        return -f(-s, y)

    return g


def solve_ivp(spec):
    """Adaptive solution of the IVP described by ``spec``."""
    a, b = spec.interval
    min_width = 1e-13 * (b - a)
    panels, ratios = [], []
    if spec.eta < b:
        panels, ratios = _march(spec, spec.rhs, spec.jac, spec.eta, b, spec.v, min_width)
    if spec.eta > a:
        left, lrat = _march(spec, _reflected(spec.rhs), _reflected(spec.jac), -spec.eta, -a, spec.v, min_width)
        sgn = (-1.0) ** np.arange(spec.k)
        left = [(-d, -c, coeffs * sgn) for c, d, coeffs in reversed(left)]
        panels = left + panels
        ratios = list(reversed(lrat)) + ratios
    x = [panels[0][0]] + [p[1] for p in panels]
    allc = np.stack([p[2] for p in panels], axis=1)  # (d, m, k)
    comps = [PiecewiseCheb(x, allc[i]) for i in range(spec.dim)]
    return IvpSolution(comps, np.array(ratios))


def linear_system(A, f=None):
    """rhs/jac pair for y' = A(t) y + f(t), with A(t) -> (d, d, m)."""

    def rhs(t, y):
        out = np.einsum("ilm,lm->im", A(t), y)
        return out if f is None else out + f(t)

    def jac(t, y):
        return A(t)

    return rhs, jac
