"""The nonlinear equation satisfied by r = y'/y for an n-th order scalar ODE.

Writing y = exp(int r), one has y^(k) = P_k(r, r', ..., r^(k-1)) y with

    P_0 = 1,    P_{k+1} = d/dt P_k + r P_k,

so the ODE y^(n) + q_{n-1} y^(n-1) + ... + q_0 y = 0 becomes

    P_n + q_{n-1} P_{n-1} + ... + q_1 P_1 + q_0 = 0.

Polynomials are dicts mapping exponent tuples (e_0, ..., e_{n-1}), one
exponent per derivative r^(m), to exact integer coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import InvalidArgumentError

MAX_ORDER = 12


def _add(poly, mono, coef):
    v = poly.get(mono, 0) + coef
    if v:
        poly[mono] = v
    else:
        poly.pop(mono, None)


def formal_derivative(poly, nvars):
    out = {}
    for mono, coef in poly.items():
        for m, e in enumerate(mono):
            if e == 0:
                continue
            if m + 1 >= nvars:
                raise InvalidArgumentError("formal derivative exceeds tracked orders")
            nm = list(mono)
            nm[m] -= 1
            nm[m + 1] += 1
            _add(out, tuple(nm), coef * e)
    return out


def multiply_by_r(poly):
    out = {}
    for mono, coef in poly.items():
        nm = list(mono)
        nm[0] += 1
        _add(out, tuple(nm), coef)
    return out


def partial(poly, m):
    """Formal partial derivative with respect to the symbol r^(m)."""
    out = {}
    for mono, coef in poly.items():
        if mono[m]:
            nm = list(mono)
            nm[m] -= 1
            _add(out, tuple(nm), coef * mono[m])
    return out


def weight(mono):
    return sum((m + 1) * e for m, e in enumerate(mono))


@lru_cache(maxsize=None)
def build_exp_polynomials(n):
    """P_0..P_n as term dicts over the symbols r, r', ..., r^(n-1)."""
    if int(n) != n or not 2 <= n <= MAX_ORDER:
        raise InvalidArgumentError(f"order n must be in [2, {MAX_ORDER}], got {n!r}")
    n = int(n)
    polys = [{(0,) * n: 1}]
    for _ in range(n):
        p = polys[-1]
        polys.append(_sum(formal_derivative(p, n), multiply_by_r(p)))
    return tuple(polys)


def _sum(a, b):
    out = dict(a)
    for mono, coef in b.items():
        _add(out, mono, coef)
    return out


def riccati_terms(n):
    """The residual P_n + sum_k q_k P_k as a dict keyed by (k, monomial).

    ``k`` is the index of the multiplying coefficient q_k, or None for the
    P_n part.
    """
    P = build_exp_polynomials(n)
    terms = {(None, mono): c for mono, c in P[n].items()}
    for k in range(n):
        for mono, c in P[k].items():
            terms[(k, mono)] = c
    return terms


class _Plan:
    """A polynomial compiled for repeated vectorized evaluation."""

    def __init__(self, poly, nvars):
        self.nvars = nvars
        self.terms = [(float(poly[mono]), tuple((m, e) for m, e in enumerate(mono) if e))
                      for mono in sorted(poly)]

    def __call__(self, jet):
        # jet: (nvars, npts)
        out = np.zeros(jet.shape[1:], dtype=np.result_type(jet, 1.0))
        powers = {}
        for c, factors in self.terms:
            term = c
            for m, e in factors:
                if (m, e) not in powers:
                    powers[m, e] = jet[m] if e == 1 else jet[m] ** e
                term = term * powers[m, e]
            out = out + term
        return out


@dataclass(frozen=True)
class RiccatiForm:
    """Compiled residual and linearization for an order-n Riccati equation."""

    n: int
    P: tuple
    _P_plans: tuple = field(repr=False)
    _lin_plans: tuple = field(repr=False)

    def exp_poly(self, m, jet):
        """P_m evaluated on a jet of shape (>= m, npts)."""
        jet = np.asarray(jet)
        full = np.zeros((self.n,) + jet.shape[1:], dtype=np.result_type(jet, 1.0))
        full[: jet.shape[0]] = jet[: self.n]
        return self._P_plans[m](full)

    def residual(self, q, jet):
        """sum_k q_k P_k + P_n at each point.

        ``q`` has shape (n, npts); ``jet`` holds r, r', ..., r^(n-1) with
        shape (n, npts).
        """
        q, jet = _check(self.n, q, jet)
        res = self._P_plans[self.n](jet)
        for k in range(self.n):
            res = res + q[k] * self._P_plans[k](jet)
        return res

    def linearize(self, q, jet):
        """Coefficients p_0..p_{n-2} of L[d] = d^(n-1) + sum_m p_m d^(m).

        Returned with shape (n-1, npts).  The coefficient of d^(n-1) is
        identically one.
        """
        q, jet = _check(self.n, q, jet)
        out = []
        for m in range(self.n - 1):
            plans = self._lin_plans[m]
            p = plans[self.n](jet)
            for k in range(self.n):
                p = p + q[k] * plans[k](jet)
            out.append(p)
        return np.array(out)

    def top_derivative(self, q, lower_jet):
        """r^(n-1) that makes the residual vanish, given r..r^(n-2)."""
        lower_jet = np.asarray(lower_jet)
        jet = np.zeros((self.n,) + lower_jet.shape[1:], dtype=np.result_type(lower_jet, q, 1.0))
        jet[: self.n - 1] = lower_jet
        return -self.residual(q, jet)


def _check(n, q, jet):
    q = np.asarray(q)
    jet = np.asarray(jet)
    if q.shape[0] != n or jet.shape[0] != n or q.shape[1:] != jet.shape[1:]:
        raise InvalidArgumentError(
            f"expected q and jet of shape ({n}, npts), got {q.shape} and {jet.shape}"
        )
    return q, jet


@lru_cache(maxsize=None)
def riccati_form(n):
    P = build_exp_polynomials(n)
    P_plans = tuple(_Plan(p, n) for p in P)
    lin = tuple(tuple(_Plan(partial(p, m), n) for p in P) for m in range(n - 1))
    return RiccatiForm(n, P, P_plans, lin)


def residual(n, q, jet):
    return riccati_form(n).residual(q, jet)


def linearize(n, q, jet):
    return riccati_form(n).linearize(q, jet)
