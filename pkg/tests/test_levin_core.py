import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from phasekit import CoefficientField, get_equation
from phasekit.errors import InvalidArgumentError, SingularSystemError, TurningPointError
from phasekit.levin_core import initial_guesses, levin_interval, solve_truncated
from phasekit.polroots import coefficients_from_roots, min_relative_gap
from phasekit.riccati import riccati_form


def test_truncated_solve_examples(rng):
    b = rng.standard_normal(5)
    assert np.allclose(solve_truncated(np.eye(5), b), b)
    assert np.allclose(solve_truncated(np.diag([1.0, 1e-20]), np.array([1.0, 1.0])), [1.0, 0.0])
    with pytest.raises(SingularSystemError):
        solve_truncated(np.zeros((3, 3)), np.ones(3))
    with pytest.raises(InvalidArgumentError):
        solve_truncated(np.zeros((3, 2)), np.ones(3))


@given(st.integers(0, 10**6))
def test_truncated_solve_matches_dense(seed):
    g = np.random.default_rng(seed)
    B = g.standard_normal((16, 16)) + 1j * g.standard_normal((16, 16)) + 8 * np.eye(16)
    rhs = g.standard_normal(16) + 1j * g.standard_normal(16)
    ref = np.linalg.solve(B, rhs)
    assert np.linalg.norm(solve_truncated(B, rhs) - ref) <= 1e-12 * np.linalg.norm(ref)


def test_constant_second_order():
    k = 50.0
    res = levin_interval((0.0, 1.0), CoefficientField.constant([k**2, 0]), k=16)
    vals = sorted(e.coeffs[0] for e in res.expansions)
    assert res.all_converged and max(res.iterations) <= 1
    assert np.allclose(sorted(vals, key=np.imag), [-1j * k, 1j * k], rtol=1e-14)
    for e in res.expansions:
        assert np.max(np.abs(e.coeffs[1:])) < 1e-12 * k


@pytest.mark.parametrize("lam", [[1.0, 2.0, 3.0], [2j, -1 + 1j, 0.5, -4.0]])
def test_constant_coefficients_give_roots(lam):
    q = coefficients_from_roots(lam)
    res = levin_interval((-1.0, 0.5), CoefficientField.constant(q), k=16)
    got = np.array([e(0.0) for e in res.expansions])
    for l in lam:
        assert np.min(np.abs(got - l)) <= 1e-12 * np.max(np.abs(lam))
    for e in res.expansions:
        assert np.max(np.abs(e.coeffs[1:])) <= 1e-12 * np.max(np.abs(lam))


@pytest.fixture(scope="module")
def exp1_panel():
    coeffs = get_equation("exp1").coeffs(2**8)
    return coeffs, levin_interval((-1.0, -0.9), coeffs, k=16)


def test_exp1_panel_residual(exp1_panel):
    coeffs, res = exp1_panel
    t = np.linspace(-1.0, -0.9, 1000)
    form = riccati_form(2)
    q = coeffs(t)
    assert res.all_converged
    for e in res.expansions:
        jet = np.array([e(t), e(t, 1)])
        assert np.max(np.abs(form.residual(q, jet))) / 2.0**16 <= 1e-10


def test_quadratic_convergence(exp1_panel):
    _, res = exp1_panel
    for hist, e in zip(res.history, res.expansions):
        rel = np.array(hist) / np.linalg.norm(e.values())
        for a, b in zip(rel, rel[1:]):
            if a < 1e-3:
                assert b <= 10 * a**2 or b < 1e-14


def test_branches_do_not_collapse(exp1_panel):
    coeffs, res = exp1_panel
    lam = initial_guesses(np.array([-1.0]), coeffs(np.array([-1.0])))[0]
    gap = np.min(np.abs(lam[0] - lam[1]))
    vals = res.values_at(-1.0)
    assert abs(vals[0] - vals[1]) >= 0.5 * gap


def test_initial_guesses_are_continuous():
    coeffs = get_equation("exp2").coeffs(2**8)
    t = np.linspace(-1, 1, 200)
    g = initial_guesses(t, coeffs(t))
    step = np.abs(np.diff(g, axis=0)).max(axis=0)
    assert np.all(step < 0.05 * np.abs(g).max(axis=0))
    single = initial_guesses(t, coeffs(t), single_node=True)
    assert np.all(single == single[0])


def test_turning_point_detected():
    # y'' + t^2 y = 0 has coalescing eigenvalues +-i t at t = 0
    coeffs = CoefficientField(2, lambda t: [t**2, 0 * t])
    with pytest.raises(TurningPointError) as info:
        levin_interval((-0.5, 0.5), coeffs, k=17)
    assert abs(info.value.location) < 1e-12
    res = levin_interval((-0.5, 0.5), coeffs, k=17, raise_on_turning_point=False)
    assert res.min_gap < 1e-6 and min_relative_gap(res.values_at(0.3)) > 0


def test_small_order_rejected():
    with pytest.raises(InvalidArgumentError):
        levin_interval((0, 1), CoefficientField.constant([1.0, 0.0]), k=3)
