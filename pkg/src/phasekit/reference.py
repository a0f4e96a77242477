"""Reference solutions of scalar ODEs from the adaptive spectral solver.

The scalar equation is rewritten in the scaled variables
z_m = y^(m) / s^m, m = 0..n-1, so that every component has comparable size
when s matches the size of the coefficient matrix eigenvalues.
"""
from __future__ import annotations

import numpy as np

from .phase_basis import ConditionSet
from .spectral_ode import IvpSpec, linear_system, solve_ivp


def scaled_system_matrix(coeffs, s):
    n = coeffs.n

    def A(t):
        q = coeffs(t)
        out = np.zeros((n, n, t.size), dtype=complex)
        for m in range(n - 1):
            out[m, m + 1] = s
        for j in range(n):
            out[n - 1, j] = -q[j] * s ** (j - n + 1)
        return out

    return A


class ReferenceSolution:
    """Callable y(t) built from one or more IVP solves."""

    def __init__(self, sols, weights, s):
        self.sols = sols
        self.weights = weights
        self.s = s

    def __call__(self, t, order=0):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        for sol, w in zip(self.sols, self.weights):
            out += w * sol.components[order](t)
        return out * self.s**order

    @property
    def npanels(self):
        return max(sol.npanels for sol in self.sols)


def reference_solution(coeffs, conds, interval=(-1.0, 1.0), s=1.0, k=30, eps=1e-12):
    """Solve the scalar ODE subject to ``conds`` with order-k panels."""
    conds = ConditionSet(conds)
    n = coeffs.n
    s = float(s)
    rhs, jac = linear_system(scaled_system_matrix(coeffs, s))
    pts = conds.points
    if np.all(pts == pts[0]) and sorted(conds.orders) == list(range(n)):
        v = np.zeros(n, dtype=complex)
        for c in conds:
            v[c.order] = c.value / s**c.order
        sol = solve_ivp(IvpSpec(interval, pts[0], v, rhs, jac, linear=True, k=k, eps=eps))
        return ReferenceSolution([sol], [1.0], s)
    # general conditions: fundamental solutions anchored at the first point
    sols = [solve_ivp(IvpSpec(interval, pts[0], np.eye(n)[l], rhs, jac, linear=True, k=k, eps=eps))
            for l in range(n)]
    M = np.array([[sol.components[c.order](c.t) * s**c.order for sol in sols] for c in conds])
    w = np.linalg.solve(M, conds.values)
    return ReferenceSolution(sols, w, s)
