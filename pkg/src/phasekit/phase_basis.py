"""Solutions of the scalar ODE as combinations of the basis exp(psi_j).

Derivatives use y_j^(m) = P_m(r_j, r_j', ...) exp(psi_j) with the same
polynomials that define the Riccati equation.  Large real parts of psi_j
are handled by shifting each basis column by its largest Re psi_j over the
condition points, so the linear system stays finite; evaluating a
combination where a shifted exponential would still overflow raises
ConditioningError instead of returning infinities.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConditioningError, InvalidArgumentError
from .riccati import riccati_form

EPS0 = np.finfo(float).eps
EXP_LIMIT = 700.0
ILL_POSED_COND = 1.0 / (100 * EPS0)


def _check_order(ps, m):
    if int(m) != m or not 0 <= m <= ps.n - 1:
        raise InvalidArgumentError(f"derivative order must be in [0, {ps.n - 1}], got {m}")
    return int(m)


def _poly_factor(ps, j, t, m):
    t = np.asarray(t, dtype=float)
    if m == 0:
        ps.r[j].owner(t)  # domain check
        return np.ones(t.shape, dtype=complex)
    jet = np.array([ps.r[j](t, i) for i in range(m)])
    return riccati_form(ps.n).exp_poly(m, jet)


def basis_log_parts(ps, j, t, m=0):
    """(P_m factor, psi_j) so that y_j^(m)(t) = factor * exp(psi_j(t))."""
    m = _check_order(ps, m)
    return _poly_factor(ps, j, t, m), ps.psi[j](t)


def basis_eval(ps, j, t, m=0):
    """m-th derivative of the j-th basis function exp(psi_j) at ``t``."""
    fac, psi = basis_log_parts(ps, j, t, m)
    if np.any(psi.real > EXP_LIMIT):
        raise ConditioningError(f"exp(psi_{j}) overflows (Re psi up to {psi.real.max():.4g})")
    return fac * np.exp(psi)


@dataclass(frozen=True)
class Condition:
    t: float
    order: int
    value: complex


class ConditionSet(tuple):
    """Exactly n conditions y^(m_i)(t_i) = v_i."""

    def __new__(cls, conditions):
        conds = tuple(c if isinstance(c, Condition) else Condition(float(c[0]), int(c[1]), complex(c[2]))
                      for c in conditions)
        return super().__new__(cls, conds)

    def validate(self, ps):
        if len(self) != ps.n:
            raise InvalidArgumentError(f"need exactly {ps.n} conditions, got {len(self)}")
        a, b = ps.domain
        for c in self:
            if not a <= c.t <= b:
                raise InvalidArgumentError(f"condition point {c.t} outside [{a}, {b}]")
            _check_order(ps, c.order)

    @property
    def points(self):
        return np.array([c.t for c in self])

    @property
    def orders(self):
        return np.array([c.order for c in self])

    @property
    def values(self):
        return np.array([c.value for c in self])


@dataclass
class PhaseSolution:
    """sum_j c_j exp(psi_j), stored as scaled coefficients and column shifts:
    c_j = scaled[j] * exp(-shift[j])."""

    ps: object
    scaled: np.ndarray
    shift: np.ndarray
    cond: float

    @property
    def coeffs(self):
        with np.errstate(under="ignore", over="ignore"):
            return self.scaled * np.exp(-self.shift)

    def __call__(self, t, order=0):
        t = np.asarray(t, dtype=float)
        m = _check_order(self.ps, order)
        out = np.zeros(t.shape, dtype=complex)
        for j in range(self.ps.n):
            if self.scaled[j] == 0:
                continue
            fac, psi = basis_log_parts(self.ps, j, t, m)
            expo = psi - self.shift[j]
            if np.any(expo.real > EXP_LIMIT):
                raise ConditioningError(
                    f"solution overflows: basis {j} grows by exp({expo.real.max():.4g}) "
                    "relative to its size at the condition points",
                    cond=self.cond,
                )
            out += self.scaled[j] * fac * np.exp(expo)
        return out


def solve_with_conditions(ps, conds):
    """Coefficients of the combination satisfying ``conds``.

    Rows of the collocation matrix are equilibrated before solving; the
    reported condition number is that of the equilibrated, column-shifted
    matrix.
    """
    conds = ConditionSet(conds)
    conds.validate(ps)
    n = ps.n
    fac = np.empty((n, n), dtype=complex)
    psi = np.empty((n, n), dtype=complex)
    for j in range(n):
        for i, c in enumerate(conds):
            f, p = basis_log_parts(ps, j, np.array([c.t]), c.order)
            fac[i, j], psi[i, j] = f[0], p[0]
    shift = psi.real.max(axis=0)
    M = fac * np.exp(psi - shift[None, :])
    rows = np.abs(M).max(axis=1)
    if np.any(rows == 0) or not np.all(np.isfinite(M)):
        raise ConditioningError("collocation matrix has a zero or non-finite row", cond=np.inf)
    M = M / rows[:, None]
    v = conds.values / rows
    sv = np.linalg.svd(M, compute_uv=False)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else np.inf
    if not cond < ILL_POSED_COND:
        raise ConditioningError(f"conditions are numerically ill-posed (cond ~ {cond:.3g})", cond=cond)
    scaled = np.linalg.solve(M, v)
    return PhaseSolution(ps, scaled, shift, cond)


def eval_solution(c, ps, points, order=0):
    """sum_j c_j y_j^(order) at ``points``; ``c`` may be a PhaseSolution."""
    if isinstance(c, PhaseSolution):
        return c(points, order)
    c = np.asarray(c, dtype=complex)
    if c.shape != (ps.n,):
        raise InvalidArgumentError(f"need {ps.n} coefficients")
    points = np.asarray(points, dtype=float)
    out = np.zeros(points.shape, dtype=complex)
    for j in range(ps.n):
        if c[j] != 0:
            out += c[j] * basis_eval(ps, j, points, order)
        else:
            ps.r[j].owner(points)
    return out
