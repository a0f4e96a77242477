from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chebkit import PiecewiseCheb, piecewise_integrate


@dataclass
class PhaseSet:
    """Phase functions psi_j and their derivatives r_j = psi_j'.

    ``r[j]`` and ``psi[j]`` are piecewise Chebyshev expansions; the global
    method gives every branch the same partition, the local method may not.
    """

    r: list
    psi: list
    eta: float
    psi_eta: np.ndarray
    method: str = ""
    info: dict = field(default_factory=dict)

    @property
    def n(self):
        return len(self.r)

    @property
    def k(self):
        return self.r[0].k

    @property
    def domain(self):
        return self.r[0].domain

    @property
    def panel_count(self):
        return max(p.npanels for p in self.r)

    @classmethod
    def from_derivatives(cls, r, eta, psi_eta=None, **kw):
        psi_eta = np.zeros(len(r), dtype=complex) if psi_eta is None else np.asarray(psi_eta, dtype=complex)
        psi = [piecewise_integrate(rj, eta, v) for rj, v in zip(r, psi_eta)]
        return cls(list(r), psi, float(eta), psi_eta, **kw)


def coefficient_count(ps):
    """Total number of Chebyshev coefficients used by the r_j."""
    return int(sum(p.npanels * p.k for p in ps.r))


def max_jump(ps):
    """Largest interior-breakpoint jump of each r_j relative to max |r_j|.

    Breakpoint values come from the panel expansions on either side.
    """
    out = []
    for p in ps.r:
        if p.npanels < 2:
            out.append(0.0)
            continue
        scale = np.max(np.abs(p.endpoint_values()))
        out.append(float(np.max(p.jumps()) / scale) if scale > 0 else 0.0)
    return np.array(out)


def is_partition(breakpoints, a, b):
    x = np.asarray(breakpoints)
    return x[0] == a and x[-1] == b and bool(np.all(np.diff(x) > 0))


def riccati_residual(ps, coeffs, t, scale=1.0):
    """|Riccati residual| / scale of every branch at the points ``t``.

    Returns shape (n, len(t)); the derivatives of r_j come from the
    piecewise expansions directly.
    """
    from .riccati import riccati_form

    t = np.asarray(t, dtype=float)
    n = ps.n
    form = riccati_form(n)
    q = coeffs(t)
    out = []
    for rj in ps.r:
        jet = np.array([rj(t, m) for m in range(n)])
        out.append(np.abs(form.residual(q, jet)) / scale)
    return np.array(out)
