import json
import math

import numpy as np
import pytest

from ckn2d.closed_forms import mu1, w_star, w_star_lp_norm
from ckn2d.cylinder_solver import (
    Classification,
    CylinderField,
    InitStrategy,
    SolverOptions,
    el_residual,
    evaluate_F,
    initial_field,
    minimize_F,
    pohozaev_residual,
    radial_field,
    symmetrize_theta,
    theta_energy_fraction,
)
from ckn2d.errors import ConvergenceError, DomainError
from ckn2d.numerics import integrate_1d

SMALL = SolverOptions(n_t=801, n_theta=32)


def line_quotient(a, p):
    """(int f'^2 + a^2 f^2) / (int f^p)^{2/p} for f = w* on the line."""
    q = p - 2
    f = lambda t: w_star(a, p, t)
    fp = lambda t: -a * np.tanh(0.5 * q * a * t) * f(t)
    num = integrate_1d(lambda t: fp(t) ** 2 + a * a * f(t) ** 2, -np.inf, np.inf, rel_tol=1e-13)
    den = integrate_1d(lambda t: f(t) ** p, -np.inf, np.inf, rel_tol=1e-13)
    return num / den ** (2 / p)


# --- evaluate_F -------------------------------------------------------------

def test_F_of_w_star_matches_closed_form():
    a, p = 1.0, 4.0
    w = radial_field(a, p, 30.0, 2001, 16)
    F = evaluate_F(w)
    exact = w_star_lp_norm(a, p) ** ((p - 2) / p)
    assert abs(F - exact) <= 1e-10 * exact
    # theta-independent fields: F = (2 pi)^{1-2/p} times the line quotient
    assert F == pytest.approx((2 * math.pi) ** (1 - 2 / p) * line_quotient(a, p), rel=1e-10)


@pytest.mark.parametrize("a, p", [(0.5, 3.0), (2.0, 6.0), (0.1, 10.0)])
def test_F_of_w_star_other_pairs(a, p):
    w = radial_field(a, p, 30.0 / a, 2001, 8)
    exact = w_star_lp_norm(a, p) ** ((p - 2) / p)
    assert evaluate_F(w) == pytest.approx(exact, rel=1e-9)


def test_F_scale_invariance():
    rng = np.random.default_rng(0)
    w = CylinderField.sample(lambda t, th: np.exp(-t * t) * (1 + 0.3 * np.cos(th + 0.2)), 1.0, 3.0,
                             10.0, 201, 16)
    w = w.with_values(w.values + 0.01 * rng.standard_normal(w.values.shape) * np.exp(-w.t[:, None] ** 2))
    w = w.with_values(np.where(np.arange(w.n_t)[:, None] % (w.n_t - 1) == 0, 0.0, w.values))
    F = evaluate_F(w)
    for c in (3.0, -2.0, 1e-3):
        assert abs(evaluate_F(w.with_values(c * w.values)) - F) <= 1e-12 * F


def test_F_refinement_decreasing_error():
    a, p = 1.0, 4.0
    exact = w_star_lp_norm(a, p) ** ((p - 2) / p)
    errs = [abs(evaluate_F(radial_field(a, p, 30.0, n, 4)) - exact) for n in (33, 65, 129, 257)]
    assert all(x > y for x, y in zip(errs, errs[1:]))
    assert errs[-1] < 1e-8 * exact


def test_F_zero_field():
    with pytest.raises(DomainError):
        evaluate_F(CylinderField(np.zeros((11, 4)), 1.0, 3.0, 5.0))


# --- symmetrize / theta fraction --------------------------------------------

def test_symmetrize_keeps_theta_independent():
    w = radial_field(1.0, 3.0, 20.0, 101, 8)
    s = symmetrize_theta(w)
    np.testing.assert_allclose(s.values, w.values, rtol=1e-15, atol=0)


def test_symmetrize_kills_cos_mode():
    w = CylinderField.sample(lambda t, th: np.exp(-t * t) * np.cos(th), 1.0, 3.0, 10.0, 101, 16)
    assert np.max(np.abs(symmetrize_theta(w).values)) < 1e-16


def test_symmetrize_idempotent():
    w = initial_field(1.0, 3.0, SMALL, InitStrategy.RANDOM)
    once = symmetrize_theta(w)
    np.testing.assert_array_equal(symmetrize_theta(once).values, once.values)


def test_theta_fraction_bounds():
    assert theta_energy_fraction(radial_field(1.0, 3.0, 20.0, 101, 8)) < 1e-28
    pure = CylinderField.sample(lambda t, th: np.exp(-t * t) * np.cos(2 * th), 1.0, 3.0, 10.0, 101, 16)
    assert theta_energy_fraction(pure) == pytest.approx(1.0, abs=1e-15)
    mix = initial_field(1.0, 3.0, SMALL, InitStrategy.MODE1)
    assert 0.0 < theta_energy_fraction(mix) < 1.0


# --- Pohozaev / EL residual -------------------------------------------------

@pytest.mark.parametrize("a, p", [(1.0, 4.0), (0.5, 3.0), (2.0, 2.5)])
def test_pohozaev_on_w_star(a, p):
    w = radial_field(a, p, 30.0 / a, 2001, 8)
    assert pohozaev_residual(w) <= 1e-8


def test_pohozaev_discriminates_non_solutions():
    rng = np.random.default_rng(1)
    for _ in range(5):
        c = rng.uniform(0.5, 2.0, 3)
        w = CylinderField.sample(
            lambda t, th: c[0] * np.exp(-(t / c[1]) ** 2) * (1 + 0.4 * np.cos(th + c[2])),
            1.0, 3.0, 15.0, 401, 16)
        assert pohozaev_residual(w) > 0.05


def test_el_residual_of_w_star():
    # the only defect is the e^{-30} tail cut at the Dirichlet ends
    w = radial_field(1.0, 4.0, 30.0, 2001, 8)
    assert el_residual(w) < 1e-9


# --- minimize_F -------------------------------------------------------------

@pytest.fixture(scope="module")
def broken_13():
    return minimize_F(1.0, 3.0, opts=SMALL)


@pytest.fixture(scope="module")
def radial_01_10():
    return minimize_F(0.1, 10.0, opts=SolverOptions(n_t=1201, n_theta=16))


def test_radial_regime(radial_01_10):
    rep = radial_01_10
    assert rep.classification is Classification.RADIAL
    assert rep.theta_energy_fraction <= 1e-8
    assert abs(rep.F_value - rep.F_radial) <= 1e-8 * rep.F_radial
    assert rep.pohozaev_residual <= 1e-6


def test_broken_regime(broken_13):
    rep = broken_13
    assert rep.classification is Classification.BROKEN
    assert rep.F_value < rep.F_radial * (1 - 1e-6)
    assert rep.el_residual <= 1e-8
    assert rep.pohozaev_residual <= 1e-6
    assert rep.theta_energy_fraction > 1e-3


def test_report_invariants(broken_13):
    rep = broken_13
    v = rep.field.values
    assert rep.F_value <= rep.F_radial + 1e-12
    assert rep.F_value <= rep.F_init
    assert np.all(v[1:-1] > 0)
    # decay next to the Dirichlet ends
    assert np.max(np.abs(v[[1, -2]])) <= 1e-8 * np.max(v)
    # evenness in t
    assert np.max(np.abs(v - v[::-1])) <= 1e-6 * np.max(v)


def test_broken_field_monotone_in_t(broken_13):
    # diagnostic: the theta-average decreases for t > 0
    v = broken_13.field.values
    mid = v.shape[0] // 2
    prof = v.mean(axis=1)[mid:]
    assert np.all(np.diff(prof) <= 1e-12)


def test_radial_init_in_broken_region_stays_at_saddle():
    rep = minimize_F(1.0, 3.0, init=InitStrategy.RADIAL, opts=SMALL)
    # exact w* is a critical point; without a perturbation it stays radial
    assert rep.classification is Classification.RADIAL
    assert rep.theta_energy_fraction < 1e-20


def test_mode1_init_escapes_saddle(broken_13):
    assert broken_13.F_value < broken_13.F_init < broken_13.F_radial


def test_random_init_also_breaks():
    rep = minimize_F(1.0, 4.0, init=InitStrategy.RANDOM, opts=SMALL)
    assert rep.classification is Classification.BROKEN


def test_deterministic():
    a = minimize_F(1.0, 4.0, opts=SMALL)
    b = minimize_F(1.0, 4.0, opts=SMALL)
    assert a.F_value == b.F_value
    assert np.array_equal(a.field.values, b.field.values)


@pytest.mark.parametrize("a, p", [(1.0, 2.5), (2.0, 2.4), (0.5, 3.5), (0.5, 5.5), (0.25, 6.0), (2.0, 3.0)])
def test_classification_matches_mu1_away_from_neutral(a, p):
    neutral_p = 2 * math.sqrt(1 + a * a) / a
    assert abs(a * p - a * neutral_p) >= 0.1
    rep = minimize_F(a, p, opts=SMALL)
    assert (rep.classification is Classification.BROKEN) == (mu1(a, p) < 0)


@pytest.mark.parametrize("a, p", [(1.0, 3.0), (0.5, 3.0)])
def test_grid_independence(a, p):
    c1 = minimize_F(a, p, opts=SolverOptions(n_t=801, n_theta=16)).classification
    c2 = minimize_F(a, p, opts=SolverOptions(n_t=1601, n_theta=32)).classification
    assert c1 is c2


def test_non_convergence_raises_with_payload():
    with pytest.raises(ConvergenceError) as info:
        minimize_F(1.0, 3.0, opts=SolverOptions(n_t=401, n_theta=16, max_iter=2))
    assert math.isfinite(info.value.estimate)


def test_newton_stall_carries_best_iterate():
    with pytest.raises(ConvergenceError) as info:
        minimize_F(1.0, 3.0, opts=SolverOptions(n_t=401, n_theta=16, el_tol=1e-30, max_newton=2))
    assert isinstance(info.value.payload, CylinderField)


def test_domain_errors():
    with pytest.raises(DomainError):
        minimize_F(0.0, 3.0)
    with pytest.raises(DomainError):
        minimize_F(1.0, 2.0)
    with pytest.raises(DomainError):
        SolverOptions(n_theta=7)


def test_report_json_shape(broken_13):
    d = json.loads(broken_13.to_json())
    for key in ("a", "p", "F_value", "F_radial", "el_residual", "pohozaev_residual",
                "theta_energy_fraction", "classification", "iterations"):
        assert key in d
    assert d["classification"] == "Broken"
    assert "field" not in d
    full = json.loads(broken_13.to_json(include_field=True))
    assert np.array(full["field"]).shape == broken_13.field.values.shape


def test_field_indexing_periodic():
    w = CylinderField.sample(lambda t, th: np.cos(th) + 0 * t, 1.0, 3.0, 1.0, 11, 8)
    assert w.at(5, 8) == w.at(5, 0)
    assert w.at(5, -1) == w.at(5, 7)
