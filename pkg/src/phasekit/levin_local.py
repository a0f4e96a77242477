"""Local Levin method: one Levin solve on a seed subinterval, then each
branch is propagated over the whole interval as a stiff Riccati IVP."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (InvalidArgumentError, PhasekitError, PropagationError, RefinementError,
                     SeedError, StiffnessError, TurningPointError)
from .levin_core import initial_guesses, levin_interval
from .levin_global import GlobalConfig
from .phaseset import PhaseSet
from .polroots import COALESCE_RTOL, match_permutation, pairwise_relative_gap
from .riccati import riccati_form
from .spectral_ode import IvpSpec, solve_ivp


@dataclass
class LocalConfig(GlobalConfig):
    seed: tuple | None = None
    sigma: float | None = None

    def seed_interval(self):
        a, b = (float(v) for v in self.interval)
        if self.seed is None:
            a0, b0 = a, a + 0.05 * (b - a)
        else:
            a0, b0 = (float(v) for v in self.seed)
        if not (a <= a0 < b0 <= b):
            raise InvalidArgumentError(f"seed interval [{a0}, {b0}] not inside [{a}, {b}]")
        sigma = 0.5 * (a0 + b0) if self.sigma is None else float(self.sigma)
        if not a0 <= sigma <= b0:
            raise InvalidArgumentError(f"sigma = {sigma} outside the seed interval")
        return (a0, b0), sigma


def riccati_system(coeffs):
    """rhs/jac for the Riccati equation as a first-order system in
    (r, r', ..., r^(n-2))."""
    n = coeffs.n
    form = riccati_form(n)

    def rhs(t, y):
        q = coeffs(t)
        out = np.empty_like(y, dtype=complex)
        out[:-1] = y[1:]
        out[-1] = form.top_derivative(q, y)
        return out

    def jac(t, y):
        q = coeffs(t)
        jet = np.empty((n,) + y.shape[1:], dtype=complex)
        jet[:-1] = y
        jet[-1] = form.top_derivative(q, y)
        p = form.linearize(q, jet)
        J = np.zeros((n - 1, n - 1) + y.shape[1:], dtype=complex)
        for m in range(n - 2):
            J[m, m + 1] = 1.0
        J[-1] = -p
        return J

    return rhs, jac


# a perturbation growing by more than 1/eps0 swamps the slow solution
GROWTH_LIMIT = float(-np.log(np.finfo(float).eps))


def propagation_growth(coeffs, sigma, end, r0, npts=513):
    """log of the worst amplification of perturbations of each branch when
    the Riccati equation is integrated from sigma to ``end``.

    Perturbations of branch j behave like exp(int (lambda_i - lambda_j)),
    so the growth rate is the largest Re(lambda_i - lambda_j) in the
    marching direction; ``r0`` identifies the branches at sigma.
    """
    if end == sigma:
        return np.zeros(len(r0))
    t = np.linspace(sigma, end, npts)
    lam = initial_guesses(t, coeffs(t))
    lam = lam[:, match_permutation(r0, lam[0])].real
    if end < sigma:
        lam = -lam
    rate = lam.max(axis=1, keepdims=True) - lam
    return np.trapezoid(rate, dx=abs(t[1] - t[0]), axis=0)


def stiffness_scale(coeffs, interval, npts=257):
    """max over a sample grid of max_j |q_j|^(1/(n-j)), the size of the
    eigenvalues and hence of the fastest Riccati modes."""
    t = np.linspace(*interval, npts)
    q = np.abs(coeffs(t))
    n = coeffs.n
    s = max(float(np.max(q[j] ** (1.0 / (n - j)))) for j in range(n))
    return max(s, 1.0)


def local_levin(cfg, coeffs):
    """Phase functions via a seed Levin solve plus Riccati propagation."""
    n = coeffs.n
    a, b, eta, psi_eta = cfg.resolved(n)
    seed, sigma = cfg.seed_interval()
    try:
        # small eigenvalues next to a huge one are fine here; only a true
        # coalescence on the seed interval is an error
        res = levin_interval(seed, coeffs, cfg.k, n, raise_on_turning_point=False)
        t = np.linspace(*seed, 65)
        gap = pairwise_relative_gap(initial_guesses(t, coeffs(t))).min()
        if gap < COALESCE_RTOL:
            raise TurningPointError(f"eigenvalues coalesce on the seed interval (relative gap {gap:.2e})")
    except PhasekitError as exc:
        raise SeedError(f"Levin solve on seed interval {seed} failed: {exc}; try another seed") from exc
    if not res.all_settled:
        bad = np.flatnonzero(~(res.converged | res.settled)).tolist()
        raise SeedError(f"Newton did not converge on seed interval {seed} for branches {bad}; try another seed")

    r0 = res.values_at(sigma)
    growth = np.maximum(propagation_growth(coeffs, sigma, b, r0), propagation_growth(coeffs, sigma, a, r0))
    bad = np.flatnonzero(growth > GROWTH_LIMIT)
    if bad.size:
        raise PropagationError(
            f"branches {bad.tolist()} cannot be propagated from sigma = {sigma}: perturbations grow "
            f"by up to exp({growth.max():.3g}), beyond double precision", location=sigma)

    rhs, jac = riccati_system(coeffs)
    # r^(m) carries roundoff of relative size eps0 * s^m; see spectral_ode
    s = stiffness_scale(coeffs, (a, b))
    scales = s ** -np.arange(n - 1, dtype=float)
    r, panels = [], []
    for j, e in enumerate(res.expansions):
        y0 = np.array([e(sigma, m) for m in range(n - 1)])
        spec = IvpSpec((a, b), sigma, y0, rhs, jac, linear=False, k=cfg.k, eps=cfg.eps,
                      scales=scales)
        try:
            sol = solve_ivp(spec)
        except (StiffnessError, RefinementError) as exc:
            loc = getattr(exc, "location", None)
            if loc is None and getattr(exc, "intervals", None):
                loc = exc.intervals[0][0]
            raise PropagationError(f"propagation of branch {j} failed: {exc}", location=loc) from exc
        r.append(sol.components[0])
        panels.append(sol.npanels)
    info = {"seed": seed, "sigma": sigma, "stiffness_scale": s, "seed_values": r0, "growth": growth, "branch_panels": panels}
    return PhaseSet.from_derivatives(r, eta, psi_eta, method="local", info=info)
