"""Levin-type Newton solve of the Riccati equation on a single subinterval."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from . import chebkit
from .errors import InvalidArgumentError, SingularSystemError, TurningPointError
from .polroots import COALESCE_RTOL, match_branches, min_relative_gap, roots_batch
from .riccati import riccati_form

EPS0 = np.finfo(float).eps
TRUNCATION_TOL = 100 * EPS0
# relative update size below which a branch that missed the strict rule is
# taken to have stalled at roundoff (applying D^(n-1) on a narrow panel
# costs about eps0 * |D|^(n-1) |r|, far above 100 eps0 |r| when n = 4)
SETTLE_TOL = 1e-9
MAX_NEWTON = 8


def solve_truncated(B, rhs, tol=TRUNCATION_TOL):
    """Solve B x = rhs with a column-pivoted QR, dropping directions whose
    R-diagonal falls below ``tol`` times the largest one.
    """
    B = np.asarray(B)
    rhs = np.asarray(rhs)
    if B.ndim != 2 or B.shape[0] != B.shape[1] or rhs.shape[0] != B.shape[0]:
        raise InvalidArgumentError("solve_truncated needs a square system")
    Q, R, perm = sla.qr(B, pivoting=True)
    diag = np.abs(np.diag(R))
    if not diag.size or diag[0] == 0 or not np.isfinite(diag[0]):
        raise SingularSystemError("matrix is zero or non-finite")
    rank = int(np.count_nonzero(diag > tol * diag[0]))
    y = Q[:, :rank].conj().T @ rhs
    z = sla.solve_triangular(R[:rank, :rank], y)
    x = np.zeros(B.shape[1:2] + rhs.shape[1:], dtype=np.result_type(B, rhs, 1.0))
    x[perm[:rank]] = z
    return x


@dataclass
class LevinIntervalResult:
    interval: tuple
    expansions: list
    converged: np.ndarray
    update_norms: np.ndarray
    iterations: np.ndarray
    history: list = field(default_factory=list, repr=False)
    min_gap: float = np.inf
    gap_location: float | None = None
    settled: np.ndarray | None = None

    @property
    def all_converged(self):
        return bool(np.all(self.converged))

    @property
    def all_settled(self):
        """Every branch converged or stalled at roundoff level."""
        ok = self.converged if self.settled is None else self.converged | self.settled
        return bool(np.all(ok))

    def values_at(self, t):
        return np.array([e(t) for e in self.expansions])


def _roundoff_floor(form, q, jet, p, absD, r):
    """Pointwise size of the residual that roundoff alone produces: the
    usual eps0 |D^m| |r| bound on each computed derivative, carried through
    the linearization, plus eps0 times the absolute sum of the terms (all
    coefficients of the P_k are positive)."""
    n = len(absD)
    ar = np.abs(r)
    err = EPS0 * np.array([M @ ar for M in absD])
    floor = err[n - 1] + sum(np.abs(p[m]) * err[m] for m in range(n - 1))
    return floor + EPS0 * form.residual(np.abs(q), np.abs(jet)).real


def initial_guesses(t, q, single_node=False):
    """Eigenvalue branches at the nodes, shape (k, n), matched node to node.

    Branches are ordered at the leftmost node by imaginary, then real part.
    """
    k, n = q.shape[1], q.shape[0]
    if single_node:
        lam = roots_batch(q[:, k // 2][None, :])[0]
        lam = lam[np.lexsort((lam.real, lam.imag))]
        return np.tile(lam, (k, 1))
    eig = roots_batch(q.T)
    out = np.empty_like(eig)
    first = eig[0]
    out[0] = first[np.lexsort((first.real, first.imag))]
    for j in range(1, k):
        out[j] = match_branches(out[j - 1], eig[j])
    return out


def levin_interval(interval, coeffs, k=16, n=None, *, single_node_guess=False,
                   maxiter=MAX_NEWTON, turning_point_tol=COALESCE_RTOL,
                   raise_on_turning_point=True):
    """Slowly-varying solutions r_1..r_n of the Riccati equation on ``interval``.

    Each branch starts from the eigenvalues of the coefficient matrix at the
    extremal nodes and is refined by at most ``maxiter`` Newton steps; a
    branch counts as converged once
    sum |delta|^2 < (100 eps0)^2 sum |r|^2 or once its residual is within
    the roundoff floor of the collocation, and as settled if it converged
    or one of its last updates was below SETTLE_TOL relative to r.
    """
    if k < 4:
        raise InvalidArgumentError("need k >= 4")
    n = coeffs.n if n is None else n
    c, d = interval
    t = chebkit.cheb_nodes(k, interval)
    D = chebkit.diff_matrix(k, interval)
    q = coeffs(t)
    form = riccati_form(n)

    guesses = initial_guesses(t, q, single_node=single_node_guess)
    gaps = min_relative_gap(guesses)
    imin = int(np.argmin(gaps))
    min_gap, gap_loc = float(gaps[imin]), float(t[imin])
    if raise_on_turning_point and min_gap < turning_point_tol:
        raise TurningPointError(
            f"eigenvalues nearly coalesce at t = {gap_loc:.6g} (relative gap {min_gap:.2e})",
            location=gap_loc,
        )

    Dpow = [np.eye(k)]
    for _ in range(n - 1):
        Dpow.append(D @ Dpow[-1])
    absD = [np.abs(M) for M in Dpow]

    expansions, conv, settled, norms, iters, history = [], [], [], [], [], []
    for j in range(n):
        r = guesses[:, j].astype(complex)
        ok, hist, it = False, [], 0
        for it in range(1, maxiter + 1):
            jet = np.array([M @ r for M in Dpow])
            xi = form.residual(q, jet)
            p = form.linearize(q, jet)
            if np.all(np.abs(xi) <= _roundoff_floor(form, q, jet, p, absD, r)):
                ok = True
                break
            B = Dpow[n - 1] + sum(p[m][:, None] * Dpow[m] for m in range(n - 1))
            try:
                delta = solve_truncated(B, -xi)
            except SingularSystemError:
                break
            r = r + delta
            dn2 = float(np.sum(np.abs(delta) ** 2))
            hist.append(np.sqrt(dn2))
            if not np.all(np.isfinite(r)):
                break
            if dn2 < TRUNCATION_TOL**2 * float(np.sum(np.abs(r) ** 2)):
                ok = True
                break
        expansions.append(chebkit.ChebExpansion.from_values(r, (c, d)))
        conv.append(ok)
        rnorm = float(np.sqrt(np.sum(np.abs(r) ** 2)))
        settled.append(ok or (bool(hist) and np.all(np.isfinite(r)) and min(hist[-3:]) < SETTLE_TOL * rnorm))
        norms.append(hist[-1] if hist else np.nan)
        iters.append(len(hist))
        history.append(hist)
    return LevinIntervalResult(
        interval=(float(c), float(d)),
        expansions=expansions,
        converged=np.array(conv),
        update_norms=np.array(norms),
        iterations=np.array(iters),
        history=history,
        min_gap=min_gap,
        gap_location=gap_loc,
        settled=np.array(settled),
    )
