import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ckn2d.errors import DomainError, GridTooCoarseError, QuadratureError
from ckn2d.numerics import (
    QuadratureRule,
    beta_integral,
    gauss_legendre,
    integrate_1d,
    log_gamma,
    sech,
    solve_schrodinger_ground,
    tanh_sinh,
)


# --- quadrature rules -------------------------------------------------------

@pytest.mark.parametrize("rule", [gauss_legendre(2, 0, 1), gauss_legendre(15, 0, 1),
                                  tanh_sinh(3, 0, 1), tanh_sinh(6, 0, 1)])
def test_rule_invariants(rule):
    assert len(rule.nodes) >= 2
    assert np.all(rule.weights > 0)
    assert abs(rule.integrate(np.ones_like) - 1.0) <= 1e-14


def test_rule_rejects_single_node():
    with pytest.raises(DomainError):
        QuadratureRule("gauss-legendre", np.array([0.5]), np.array([1.0]), (0.0, 1.0))


def test_rule_rejects_nonpositive_weight():
    with pytest.raises(DomainError):
        QuadratureRule("x", np.array([0.2, 0.8]), np.array([0.5, 0.0]), (0.0, 1.0))


# --- integrate_1d -----------------------------------------------------------

def test_constant_unit_interval():
    assert integrate_1d(np.ones_like, 0.0, 1.0) == pytest.approx(1.0, abs=1e-15)


def test_inverse_sqrt_power_against_antiderivative_and_riemann_sum():
    f = lambda s: (1.0 + np.sqrt(s)) ** -4
    val = integrate_1d(f, 0.0, 1.0, rel_tol=1e-13)
    assert abs(val - 1.0 / 6.0) <= 1e-13
    # midpoint sum with 10^6 cells, error O(h^2) plus the sqrt kink at 0
    n = 10**6
    mid = (np.arange(n) + 0.5) / n
    assert abs(f(mid).mean() - val) < 1e-6


def test_sech_squared_on_line():
    val = integrate_1d(lambda t: sech(2.0 * t) ** 2, -np.inf, np.inf, rel_tol=1e-12)
    assert abs(val - 1.0) <= 1e-12


@pytest.mark.parametrize("method", ["gauss-legendre", "tanh-sinh"])
def test_semi_infinite_exponential(method):
    val = integrate_1d(lambda x: np.exp(-x), 0.0, np.inf, rel_tol=1e-12, method=method)
    assert abs(val - 1.0) <= 1e-11


def test_reversed_limits_flip_sign():
    f = lambda x: x**2
    assert integrate_1d(f, 1.0, 0.0) == pytest.approx(-1.0 / 3.0, rel=1e-13)


def test_breakpoints_handle_kinks():
    val = integrate_1d(lambda x: np.abs(x - 0.3), 0.0, 1.0, points=(0.3,), rel_tol=1e-13)
    assert abs(val - (0.3**2 + 0.7**2) / 2) <= 1e-14


def test_full_output_reports_error():
    val, err = integrate_1d(np.sin, 0.0, math.pi, full_output=True)
    assert abs(val - 2.0) < 1e-12
    assert 0 <= err < 1e-9


def test_rel_tol_domain():
    with pytest.raises(DomainError):
        integrate_1d(np.sin, 0, 1, rel_tol=1e-2)


def test_nonconvergence_carries_estimate():
    # divergent: the best estimate grows but never settles
    with pytest.raises(QuadratureError) as info, np.errstate(divide="ignore", over="ignore"):
        integrate_1d(lambda x: 1.0 / x, 0.0, 1.0, max_panels=200)
    exc = info.value
    assert math.isfinite(exc.estimate) and exc.estimate > 1.0
    assert exc.error > 0


def test_nonfinite_integrand_fails_fast():
    with pytest.raises(QuadratureError):
        integrate_1d(lambda x: np.where(x > 0.5, np.nan, 1.0), 0.0, 1.0)


def test_quadrature_is_deterministic():
    f = lambda x: np.exp(-x * x) * np.cos(3 * x)
    a = integrate_1d(f, -np.inf, np.inf, full_output=True)
    b = integrate_1d(f, -np.inf, np.inf, full_output=True)
    assert a == b


# --- log_gamma / beta -------------------------------------------------------

@pytest.mark.parametrize("x, expected", [(1.0, 0.0), (0.5, 0.5723649429247001),
                                         (5.0, math.log(24.0))])
def test_log_gamma_examples(x, expected):
    assert log_gamma(x) == pytest.approx(expected, rel=1e-14, abs=1e-15)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=1e-3, max_value=1e3))
def test_log_gamma_against_mpmath(x):
    ref = float(mpmath.loggamma(mpmath.mpf(x)))
    assert abs(log_gamma(x) - ref) <= 1e-12 * max(abs(ref), 1e-300) + 1e-15


def test_log_gamma_vectorized():
    xs = np.array([0.5, 1.0, 5.0])
    np.testing.assert_allclose(log_gamma(xs), [math.lgamma(x) for x in xs], rtol=1e-15)


@pytest.mark.parametrize("x", [0.0, -1.0, float("nan")])
def test_log_gamma_domain(x):
    with pytest.raises(DomainError):
        log_gamma(x)


@pytest.mark.parametrize("a, b, expected", [(1, 2, 1.0), (1, 3, 0.5), (0.5, 1, math.pi)])
def test_beta_examples(a, b, expected):
    assert beta_integral(a, b) == pytest.approx(expected, rel=1e-14)


def test_beta_pi_case_matches_defining_integral():
    q = 2 * integrate_1d(lambda s: 1.0 / (1 + s * s), 0, np.inf, rel_tol=1e-13)
    assert abs(q - beta_integral(0.5, 1.0)) <= 1e-12 * math.pi


def _beta_defining(a, b):
    # s = e^x removes the endpoint singularity at 0 and maps the algebraic
    # tail to an exponential one
    f = lambda x: 2.0 * np.exp(2 * a * x - b * np.logaddexp(0.0, 2 * x))
    return integrate_1d(f, -np.inf, np.inf, rel_tol=1e-12)


def test_beta_against_quadrature_random_pairs():
    rng = np.random.default_rng(20240611)
    for _ in range(20):
        a = rng.uniform(0.1, 3.0)
        b = rng.uniform(a + 0.1, a + 5.0)
        ref = _beta_defining(a, b)
        assert abs(beta_integral(a, b) - ref) <= 1e-9 * ref, (a, b)


def test_beta_against_raw_integrand():
    # the untransformed integrand on [0, inf) as printed
    for a, b in [(0.7, 1.5), (2.0, 2.6), (1.3, 5.0)]:
        ref = integrate_1d(lambda s: 2 * s ** (2 * a - 1) * (1 + s * s) ** (-b), 0, np.inf,
                           rel_tol=1e-11, points=(1.0,))
        assert abs(beta_integral(a, b) - ref) <= 1e-9 * ref


@pytest.mark.parametrize("a, b", [(0.0, 1.0), (1.0, 1.0), (2.0, 1.0), (-1.0, 0.5)])
def test_beta_domain(a, b):
    with pytest.raises(DomainError):
        beta_integral(a, b)


# --- Schrodinger ground state ----------------------------------------------

def test_poschl_teller_s1():
    res = solve_schrodinger_ground(1.0, 2.0)
    assert abs(res.eigenvalue + 1.0) <= 1e-8
    # eigenfunction proportional to sech t with unit discrete norm
    ref = sech(res.t)
    dt = res.t[1] - res.t[0]
    ref /= math.sqrt(np.sum(ref**2) * dt)
    assert np.max(np.abs(res.eigenfunction - ref)) < 1e-4
    assert abs(np.sum(res.eigenfunction**2) * dt - 1.0) < 1e-12


def test_a1_p4_example():
    res = solve_schrodinger_ground(1.0, 6.0)
    assert abs(res.eigenvalue + 4.0) <= 4e-6


@pytest.mark.parametrize("beta", [1e-2, 1e-1, 0.5])
def test_shallow_well_exact(beta):
    # s(s+1) = beta / k^2, lambda = -k^2 s^2
    s = 0.5 * (-1 + math.sqrt(1 + 4 * beta))
    res = solve_schrodinger_ground(1.0, beta)
    assert res.eigenvalue < 0
    assert abs(res.eigenvalue + s * s) <= 1e-6 * s * s


def test_vanishing_well_limit():
    vals = [solve_schrodinger_ground(1.0, b).eigenvalue for b in (0.5, 0.1, 0.02)]
    assert all(v < 0 for v in vals)
    assert vals[0] < vals[1] < vals[2]
    assert abs(vals[2]) < 1e-3


def test_ground_state_grid():
    for a in (0.05, 0.1, 0.5, 1.0, 2.0):
        for p in (2.5, 3.0, 4.0, 6.0, 10.0):
            target = (a * p / 2) ** 2
            res = solve_schrodinger_ground((p - 2) * a / 2, a * a * p * (p - 1) / 2)
            assert abs(res.eigenvalue + target) <= 1e-6 * target, (a, p)
            assert res.residual_norm <= 1e-6 * target


def test_ground_state_deterministic():
    a = solve_schrodinger_ground(0.5, 3.0)
    b = solve_schrodinger_ground(0.5, 3.0)
    assert a.eigenvalue == b.eigenvalue
    assert np.array_equal(a.eigenfunction, b.eigenfunction)


def test_ground_state_too_coarse():
    with pytest.raises(GridTooCoarseError):
        solve_schrodinger_ground(1.0, 6.0, n_points=11, tol=1e-10)


@pytest.mark.parametrize("k, beta", [(0.0, 1.0), (1.0, 0.0), (-1.0, 1.0)])
def test_ground_state_domain(k, beta):
    with pytest.raises(DomainError):
        solve_schrodinger_ground(k, beta)


def test_ground_state_rejects_short_box():
    with pytest.raises(DomainError):
        solve_schrodinger_ground(1.0, 2.0, T=5.0)
