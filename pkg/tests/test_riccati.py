import numpy as np
import pytest
import sympy as sp

from oracles import RICCATI_TERMS, random_jet
from phasekit.errors import InvalidArgumentError
from phasekit.riccati import build_exp_polynomials, linearize, residual, riccati_form, riccati_terms, weight


@pytest.mark.parametrize("n", [2, 3, 4])
def test_terms_match_hand_written(n):
    assert riccati_terms(n) == RICCATI_TERMS[n]


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_exp_polynomials_match_sympy(n):
    t = sp.symbols("t")
    r = sp.Function("r")(t)
    syms = sp.symbols(f"r0:{n}")
    y = sp.exp(sp.Integral(r, t))
    P = build_exp_polynomials(n)
    for k in range(n + 1):
        expr = sp.simplify(sp.diff(y, t, k) / y)
        expr = expr.subs({sp.Derivative(r, (t, m)): syms[m] for m in range(n - 1, 0, -1)}).subs(r, syms[0])
        poly = sp.Poly(sp.expand(expr), *syms)
        got = {mono: c for mono, c in P[k].items()}
        assert {m: int(c) for m, c in poly.terms()} == got


@pytest.mark.parametrize("n", [2, 5, 8])
def test_weights(n):
    for k, p in enumerate(build_exp_polynomials(n)):
        assert all(weight(m) == k for m in p)


def test_order_out_of_range():
    for n in (1, 13):
        with pytest.raises(InvalidArgumentError):
            build_exp_polynomials(n)


def test_residual_examples():
    t = np.linspace(-1, 1, 7)
    one, zero = np.ones_like(t), np.zeros_like(t)
    assert np.allclose(residual(2, [one, zero], [1j * one, zero]), 0)
    assert np.allclose(residual(2, [zero, zero], [t, one]), 1 + t**2)
    c, q = 0.3 - 0.7j, (1.5, -2.0, 0.25j)
    jet = np.array([[c], [0], [0]])
    expect = c**3 + q[2] * c**2 + q[1] * c + q[0]
    assert np.allclose(residual(3, np.array(q)[:, None], jet), expect)


def test_residual_shape_mismatch():
    with pytest.raises(InvalidArgumentError):
        residual(3, np.zeros((3, 4)), np.zeros((2, 4)))


def test_linearize_examples():
    t = np.linspace(0, 1, 5)
    p = linearize(2, np.zeros((2, 5)), np.array([1j * np.ones(5), np.zeros(5)]))
    assert np.allclose(p, 2j)
    assert np.allclose(linearize(3, np.zeros((3, 5)), np.zeros((3, 5))), 0)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_exact_on_exponential_solutions(n, rng):
    lam = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    q = np.poly(lam)[::-1][:-1]  # ascending non-leading coefficients
    a = rng.standard_normal(n)
    t = np.linspace(-0.5, 0.5, 9)
    # r = y'/y for y = sum a_j exp(lam_j t); derivatives of r by sympy
    ts = sp.symbols("t")
    ysym = sum(float(aj) * sp.exp(complex(lj) * ts) for aj, lj in zip(a, lam))
    rs = sp.diff(ysym, ts) / ysym
    jet = np.array([[complex(sp.diff(rs, ts, m).subs(ts, tv).evalf(30)) for tv in t] for m in range(n)])
    res = residual(n, np.repeat(q[:, None], t.size, axis=1), jet)
    assert np.max(np.abs(res)) < 1e-10 * max(1.0, np.max(np.abs(q)))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_linearization_quadratic_remainder(n, rng):
    q = random_jet(rng, n, 4)
    r = random_jet(rng, n, 4)
    d = random_jet(rng, n, 4)
    lin = linearize(n, q, r)
    L = d[n - 1] + np.einsum("mp,mp->p", lin, d[: n - 1])
    errs = []
    for e in [1e-3, 5e-4, 2.5e-4, 1.25e-4]:
        errs.append(np.max(np.abs(residual(n, q, r + e * d) - residual(n, q, r) - e * L)))
    for a, b in zip(errs, errs[1:]):
        assert abs(a / b - 4) < 1.0


def test_top_derivative_zeroes_residual(rng):
    form = riccati_form(4)
    q = random_jet(rng, 4, 3)
    lower = random_jet(rng, 3, 3)
    top = form.top_derivative(q, lower)
    assert np.allclose(form.residual(q, np.vstack([lower, top])), 0, atol=1e-12)

