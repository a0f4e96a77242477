"""Roots of monic polynomials, i.e. eigenvalues of the companion-type
coefficient matrix of a scalar ODE.

Polynomials are given by their non-leading coefficients in ascending order,
``q[0] + q[1] x + ... + q[n-1] x^(n-1) + x^n``.  The solver is a batched
Aberth-Ehrlich iteration on a rescaled polynomial, followed by Newton
polishing against the original coefficients.
"""
from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ConvergenceError, InvalidArgumentError

EPS0 = np.finfo(float).eps

COALESCE_RTOL = 1e-6


def _horner(c, z):
    """p(z) and p'(z) for full ascending coefficient rows c (batch, n+1)."""
    n = c.shape[1] - 1
    p = np.broadcast_to(c[:, n:n + 1], z.shape).astype(complex)
    dp = np.zeros_like(p)
    for j in range(n - 1, -1, -1):
        dp = dp * z + p
        p = p * z + c[:, j:j + 1]
    return p, dp


def _initial_guesses(c):
    """Starting points on circles whose radii come from the Newton polygon."""
    batch, n1 = c.shape
    n = n1 - 1
    z0 = np.empty((batch, n), dtype=complex)
    logs = np.log(np.maximum(np.abs(c), np.finfo(float).tiny))
    for b in range(batch):
        # upper convex hull of (j, log|c_j|)
        pts = [j for j in range(n1) if abs(c[b, j]) > 0]
        hull = []
        for j in pts:
            while len(hull) >= 2:
                i0, i1 = hull[-2], hull[-1]
                cross = (i1 - i0) * (logs[b, j] - logs[b, i0]) - (j - i0) * (logs[b, i1] - logs[b, i0])
                if cross >= 0:
                    hull.pop()
                else:
                    break
            hull.append(j)
        pos = 0
        if hull[0] > 0:
            # zero roots from vanishing trailing coefficients
            z0[b, : hull[0]] = 0.0
            pos = hull[0]
        for i0, i1 in zip(hull, hull[1:]):
            m = i1 - i0
            radius = np.exp((logs[b, i0] - logs[b, i1]) / m)
            ang = 2 * np.pi * np.arange(m) / m + 2 * np.pi * i0 / n + 0.4
            z0[b, pos:pos + m] = radius * np.exp(1j * ang)
            pos += m
    return z0


def _aberth(c, maxiter=200):
    z = _initial_guesses(c)
    batch, n = z.shape
    done = np.zeros(batch, dtype=bool)
    eye = np.eye(n, dtype=bool)
    for _ in range(maxiter):
        p, dp = _horner(c, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(dp != 0, p / dp, p)
            diff = z[:, :, None] - z[:, None, :]
            inv = np.where(eye, 0.0, 1.0 / np.where(eye, 1.0, diff))
            s = inv.sum(axis=2)
            step = ratio / (1.0 - ratio * s)
        step = np.where(np.isfinite(step), step, 0.0)
        step[done] = 0.0
        z = z - step
        small = np.abs(step) <= 4 * EPS0 * np.maximum(np.abs(z), EPS0)
        done |= small.all(axis=1)
        if done.all():
            break
    return z, done


def _polish(q, z, steps=2):
    n = q.shape[1]
    c = np.concatenate([q, np.ones((q.shape[0], 1), dtype=complex)], axis=1)
    for _ in range(steps):
        p, dp = _horner(c, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = p / dp
        ok = np.isfinite(step) & (np.abs(step) < 1e-6 * np.maximum(np.abs(z), 1e-300))
        z = np.where(ok, z - step, z)
    return z


def roots_batch(q):
    """Roots of a batch of monic polynomials, ``q`` shaped (batch, n)."""
    q = np.atleast_2d(np.asarray(q, dtype=complex))
    if q.shape[1] < 1:
        raise InvalidArgumentError("need degree >= 1")
    if not np.all(np.isfinite(q)):
        raise InvalidArgumentError("non-finite polynomial coefficient")
    n = q.shape[1]
    if n == 1:
        return -q.copy()
    # s = max_j |q_j|^(1/(n-j)) brings all roots to modulus <= 2
    powers = n - np.arange(n)
    s = np.max(np.abs(q) ** (1.0 / powers), axis=1)
    s = np.where(s > 0, s, 1.0)
    scaled = q / s[:, None] ** powers
    c = np.concatenate([scaled, np.ones((q.shape[0], 1), dtype=complex)], axis=1)
    z, done = _aberth(c)
    if not done.all():
        bad = np.flatnonzero(~done)
        # Aberth stalls only on exact multiple roots, where the iterates are
        # still correct to about sqrt(eps); accept when the residual is tiny
        p, _ = _horner(c[bad], z[bad])
        scale = np.abs(c[bad]).sum(axis=1)[:, None] * np.maximum(1, np.abs(z[bad])) ** n
        if np.any(np.abs(p) > 1e3 * EPS0 * scale):
            raise ConvergenceError(
                f"Aberth iteration did not converge for coefficients {q[bad[0]]}"
            )
    z = z * s[:, None]
    return _polish(q, z)


def roots(q):
    """Roots of x^n + q[n-1] x^(n-1) + ... + q[0], returned unordered."""
    q = np.asarray(q, dtype=complex)
    if q.ndim != 1:
        raise InvalidArgumentError("roots() takes one coefficient vector")
    return roots_batch(q[None, :])[0]


def min_relative_gap(values):
    """min |l_i - l_j| / max |l| over a root set (inf for a single root)."""
    values = np.asarray(values)
    n = values.shape[-1]
    if n < 2:
        return np.inf
    d = np.abs(values[..., :, None] - values[..., None, :])
    d = d + np.where(np.eye(n, dtype=bool), np.inf, 0.0)
    scale = np.max(np.abs(values), axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(scale > 0, d.min(axis=(-2, -1)) / scale, 0.0)


def pairwise_relative_gap(values):
    """min over pairs of |l_i - l_j| / max(|l_i|, |l_j|); unlike
    min_relative_gap this does not flag small but well separated roots
    that sit next to a huge one."""
    values = np.asarray(values)
    n = values.shape[-1]
    if n < 2:
        return np.inf
    d = np.abs(values[..., :, None] - values[..., None, :])
    m = np.maximum(np.abs(values[..., :, None]), np.abs(values[..., None, :]))
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(m > 0, d / np.where(m > 0, m, 1.0), 0.0)
    rel = rel + np.where(np.eye(n, dtype=bool), np.inf, 0.0)
    return rel.min(axis=(-2, -1))


def near_multiple(values, rtol=COALESCE_RTOL):
    """True when two roots are within ``rtol * max|root|`` of each other."""
    return bool(np.any(min_relative_gap(values) < rtol))


def match_branches(prev, new):
    """Reorder ``new`` so that entry j continues branch ``prev[j]``.

    The assignment minimizes the total distance sum_j |new_perm[j] - prev[j]|;
    ties resolve towards the lowest indices.
    """
    prev = np.asarray(prev)
    new = np.asarray(new)
    if prev.shape != new.shape or prev.ndim != 1:
        raise InvalidArgumentError("branch lists must have equal length")
    cost = np.abs(prev[:, None] - new[None, :])
    _, cols = linear_sum_assignment(cost)
    return new[cols]


def match_permutation(prev, new):
    """Index array ``perm`` with ``new[perm]`` aligned to ``prev``."""
    cost = np.abs(np.asarray(prev)[:, None] - np.asarray(new)[None, :])
    _, cols = linear_sum_assignment(cost)
    return cols


def coefficients_from_roots(values):
    """Ascending non-leading coefficients of prod_j (x - values[j])."""
    c = np.array([1.0 + 0j])
    for v in values:
        c = np.concatenate([[0.0], c]) - v * np.concatenate([c, [0.0]])
    return c[:-1]
