"""Global Levin method: adaptive bisection with a Levin solve on every panel."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chebkit import PiecewiseCheb
from .errors import InvalidArgumentError, RefinementError, TurningPointError
from .levin_core import levin_interval
from .phaseset import PhaseSet, coefficient_count  # noqa: F401  (re-export)
from .polroots import COALESCE_RTOL, match_permutation


@dataclass
class GlobalConfig:
    interval: tuple = (-1.0, 1.0)
    k: int = 16
    eps: float = 1e-12
    eta: float | None = None
    psi_eta: tuple | None = None
    max_depth: int = 30
    n: int | None = None

    def resolved(self, n):
        a, b = (float(v) for v in self.interval)
        if not b > a:
            raise InvalidArgumentError(f"bad interval {self.interval}")
        if not self.eps > 0:
            raise InvalidArgumentError("eps must be positive")
        eta = a if self.eta is None else float(self.eta)
        if not a <= eta <= b:
            raise InvalidArgumentError(f"eta = {eta} outside [{a}, {b}]")
        if self.n is not None and self.n != n:
            raise InvalidArgumentError(f"config says n = {self.n} but coefficients have n = {n}")
        psi_eta = np.zeros(n, dtype=complex) if self.psi_eta is None else np.asarray(self.psi_eta, dtype=complex)
        if psi_eta.shape != (n,):
            raise InvalidArgumentError(f"need {n} values psi_j(eta)")
        return a, b, eta, psi_eta


def tail_start(k):
    return math.ceil((k + 1) / 2)


def tail_ratio(coeffs):
    """Energy of the upper coefficients over the total energy.

    The upper block starts at index ceil((k+1)/2); works along the last axis.
    """
    mag = np.abs(np.asarray(coeffs))
    top = mag.max(axis=-1, keepdims=True)
    e = (mag / np.where(top > 0, top, 1.0)) ** 2
    total = e.sum(axis=-1)
    tail = e[..., tail_start(mag.shape[-1]):].sum(axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(total > 0, tail / np.where(total > 0, total, 1.0), 0.0)


def _panel_xi(res):
    if not res.all_settled:
        return np.inf
    ratios = [tail_ratio(e.coeffs) for e in res.expansions]
    xi = float(max(ratios))
    return xi if np.isfinite(xi) else np.inf


def align_panels(results):
    """Reorder branches panel by panel so that each r_j continues from the
    previous panel's right endpoint to the next panel's left endpoint.
    """
    ordered = [list(results[0].expansions)]
    for res in results[1:]:
        prev = np.array([e.coeffs.sum() for e in ordered[-1]])
        cur = np.array([(e.coeffs * (-1.0) ** np.arange(e.k)).sum() for e in res.expansions])
        perm = match_permutation(prev, cur)
        ordered.append([res.expansions[i] for i in perm])
    return ordered


def global_levin(cfg, coeffs):
    """Phase functions for the equation given by ``coeffs`` on cfg.interval.

    Panels are processed depth-first; a panel is accepted when the largest
    tail ratio over its n branch expansions is below cfg.eps, and bisected
    otherwise (including when Newton did not converge on it).
    """
    n = coeffs.n
    a, b, eta, psi_eta = cfg.resolved(n)
    stack = [(a, b, 0)]
    accepted, failed = [], []
    xis = []
    while stack:
        c, d, depth = stack.pop()
        res = levin_interval((c, d), coeffs, cfg.k, n, raise_on_turning_point=False)
        xi = _panel_xi(res)
        if xi < cfg.eps:
            accepted.append(res)
            xis.append(xi)
            continue
        if depth >= cfg.max_depth:
            failed.append(res)
            continue
        m = 0.5 * (c + d)
        stack.append((m, d, depth + 1))
        stack.append((c, m, depth + 1))

    if failed:
        worst = min(failed, key=lambda r: r.min_gap)
        if worst.min_gap < COALESCE_RTOL:
            raise TurningPointError(
                f"refinement failed next to an eigenvalue coalescence near t = {worst.gap_location:.6g}",
                location=worst.gap_location,
            )
        raise RefinementError(
            f"max depth {cfg.max_depth} exceeded on {len(failed)} subinterval(s)",
            intervals=[r.interval for r in failed],
        )

    order = np.argsort([r.interval[0] for r in accepted])
    accepted = [accepted[i] for i in order]
    xis = [xis[i] for i in order]
    panels = align_panels(accepted)
    x = [accepted[0].interval[0]] + [r.interval[1] for r in accepted]
    r = [PiecewiseCheb(x, np.stack([p[j].coeffs for p in panels])) for j in range(n)]
    info = {
        "panel_xi": np.array(xis),
        "min_gap": min(res.min_gap for res in accepted),
        "newton_iterations": np.array([res.iterations for res in accepted]),
    }
    return PhaseSet.from_derivatives(r, eta, psi_eta, method="global", info=info)
