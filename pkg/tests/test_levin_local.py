import numpy as np
import pytest

from phasekit import CoefficientField, get_equation, solve_with_conditions
from phasekit.errors import InvalidArgumentError, PropagationError, SeedError
from phasekit.levin_global import GlobalConfig, global_levin
from phasekit.levin_local import LocalConfig, local_levin, riccati_system, stiffness_scale
from phasekit.phaseset import max_jump, riccati_residual
from phasekit.polroots import match_permutation
from phasekit.riccati import riccati_form

T = np.linspace(-1, 1, 10000)


@pytest.fixture(scope="module")
def pairs():
    """Global and local phase sets for the nondegenerate equations at k = 2^10."""
    out = {}
    for name in ("exp1", "exp2", "exp3"):
        eq = get_equation(name)
        c = eq.coeffs(2.0**10)
        out[name] = (eq, global_levin(GlobalConfig(), c), local_levin(LocalConfig(), c))
    return out


def test_constant_oscillator():
    ps = local_levin(LocalConfig(), CoefficientField.constant([4.0, 0.0]))
    assert ps.info["seed"] == (-1.0, -0.9) and ps.info["sigma"] == pytest.approx(-0.95)
    t = np.linspace(-1, 1, 101)
    vals = sorted((r(t) for r in ps.r), key=lambda v: v[0].imag)
    assert np.max(np.abs(vals[0] + 2j)) < 1e-12 and np.max(np.abs(vals[1] - 2j)) < 1e-12
    rises = sorted((p(1.0) - p(-1.0) for p in ps.psi), key=np.imag)
    assert np.allclose(rises, [-4j, 4j], atol=1e-12)


def test_exp6_continuous():
    ps = local_levin(LocalConfig(), get_equation("exp6").coeffs(2.0**10))
    assert np.all(max_jump(ps) <= 1e-8)


def test_agrees_with_global_branches(pairs):
    _, g, l = pairs["exp1"]
    t = np.linspace(-1, 1, 1000)
    perm = match_permutation(np.array([r(0.0) for r in g.r]), np.array([r(0.0) for r in l.r]))
    for rg, j in zip(g.r, perm):
        a, b = rg(t), l.r[j](t)
        assert np.max(np.abs(a - b)) <= 1e-9 * np.max(np.abs(a))


def test_seed_consistency(pairs):
    for _, _, ps in pairs.values():
        sigma = ps.info["sigma"]
        seed = ps.info["seed_values"]
        prop = np.array([r(sigma) for r in ps.r])
        assert np.max(np.abs(seed - prop) / np.abs(seed)) <= 1e-12


def test_assembled_solutions_agree(pairs):
    for eq, g, l in pairs.values():
        conds = eq.conditions(2.0**10)
        a = solve_with_conditions(g, conds)(T)
        b = solve_with_conditions(l, conds)(T)
        assert np.max(np.abs(a - b)) <= 1e-8, eq.name


def test_residual_bound(pairs):
    for eq, _, ps in pairs.values():
        k = 2.0**10
        assert np.max(riccati_residual(ps, eq.coeffs(k), T, eq.residual_scale(k))) <= 1e-10


def test_riccati_system_matches_residual(rng):
    q = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    rhs, jac = riccati_system(CoefficientField.constant(q))
    y = rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))
    t = np.zeros(4)
    f = rhs(t, y)
    assert np.allclose(f[0], y[1])
    jet = np.vstack([y, f[1:]])
    assert np.allclose(riccati_form(3).residual(np.repeat(q[:, None], 4, axis=1), jet), 0, atol=1e-12)
    # Jacobian against central differences
    h = 1e-6
    J = jac(t, y)
    for m in range(2):
        d = np.zeros_like(y)
        d[m] = 1.0
        fd = (rhs(t, y + h * d) - rhs(t, y - h * d)) / (2 * h)
        assert np.allclose(J[:, m], fd, rtol=1e-6, atol=1e-6)


def test_stiffness_scale():
    assert stiffness_scale(CoefficientField.constant([16.0, 0.0]), (-1, 1)) == pytest.approx(4.0)
    assert stiffness_scale(CoefficientField.constant([1e-3, 0.0]), (-1, 1)) == 1.0


def test_exponential_growth_refused():
    with pytest.raises(PropagationError):
        local_levin(LocalConfig(), get_equation("exp5").coeffs(2.0**8))


def test_seed_turning_point():
    coeffs = CoefficientField(2, lambda t: [1e4 * (t + 0.95) ** 2, 0 * t])
    with pytest.raises(SeedError):
        local_levin(LocalConfig(), coeffs)


def test_config_validation():
    c = CoefficientField.constant([1.0, 0.0])
    for cfg in (LocalConfig(seed=(-2.0, 0.0)), LocalConfig(seed=(0.0, 0.1), sigma=0.5)):
        with pytest.raises(InvalidArgumentError):
            local_levin(cfg, c)
