import math

import numpy as np
import pytest

from ckn2d.closed_forms import u_rad, w_star
from ckn2d.errors import DomainError
from ckn2d.geometry import (
    Frame,
    MeasureSpec,
    PlaneFunction,
    PolarPoint,
    SphereFunction,
    SpherePoint,
    emden_fowler,
    emden_fowler_inverse,
    gradient_identity_check,
    integrate_measure,
    plane_to_sphere,
    sigma_alpha,
    sigma_alpha_inv,
    sphere_to_plane,
)

ALPHAS = [-0.9, -0.5, 0.0, 1.0, 5.0]


def one_plane(x, y):
    return np.ones_like(np.asarray(x * y, dtype=float))


def one2(s, th):
    return np.ones(np.broadcast(s, th).shape)


# --- Sigma_alpha -------------------------------------------------------------

def test_sigma_equator():
    s = sigma_alpha(0.0, PolarPoint(1.0, 0.3))
    assert abs(s.phi) < 1e-15 and s.theta == 0.3


@pytest.mark.parametrize("alpha", ALPHAS)
def test_sigma_origin_is_south_pole(alpha):
    s = sigma_alpha(alpha, PolarPoint(0.0, 0.0))
    assert math.sin(s.phi) == -1.0


def test_sigma_alpha1_sqrt2():
    s = sigma_alpha(1.0, PolarPoint(math.sqrt(2.0), 0.0))
    assert s.rho == pytest.approx(0.8, abs=1e-15)
    assert s.z == pytest.approx(0.6, abs=1e-15)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_sigma_matches_formula_and_dilation(alpha):
    r = np.logspace(-2, 2, 41)
    c = alpha + 1
    s = sigma_alpha(alpha, PolarPoint(r, 0.0))
    rc = r**c
    # latitude storage: cos(phi) is resolved to absolute, not relative, precision
    np.testing.assert_allclose(np.cos(s.phi), 2 * rc / (1 + rc**2), rtol=1e-12, atol=1e-15)
    np.testing.assert_allclose(np.sin(s.phi), (rc**2 - 1) / (1 + rc**2), rtol=1e-12, atol=1e-15)
    s0 = sigma_alpha(0.0, PolarPoint(rc, 0.0))
    np.testing.assert_allclose(s.phi, s0.phi, rtol=1e-13, atol=1e-15)


def test_sigma_inverse_examples():
    assert sigma_alpha_inv(0.0, SpherePoint(0.0, 0.0)).r == pytest.approx(1.0, rel=1e-15)
    pt = SpherePoint.from_cylindrical(0.8, 0.6)
    assert sigma_alpha_inv(1.0, pt).r == pytest.approx(math.sqrt(2.0), rel=1e-14)
    assert sigma_alpha_inv(0.7, SpherePoint(-0.5 * math.pi, 0.0)).r == 0.0


def test_sigma_inverse_north_pole():
    with pytest.raises(DomainError):
        sigma_alpha_inv(0.0, SpherePoint(0.5 * math.pi, 0.0))


@pytest.mark.parametrize("alpha", ALPHAS)
def test_sigma_round_trip(alpha):
    # keep r^c inside a range where the latitude is resolvable in double
    span = 3.0 / (alpha + 1.0)
    r = np.logspace(-span, span, 101)
    back = sigma_alpha_inv(alpha, sigma_alpha(alpha, PolarPoint(r, 1.0))).r
    np.testing.assert_allclose(back, r, rtol=1e-12)


def test_alpha_domain():
    with pytest.raises(DomainError):
        sigma_alpha(-1.0, PolarPoint(1.0, 0.0))
    with pytest.raises(DomainError):
        MeasureSpec(Frame.PLANE, -1.5)


# --- Emden-Fowler -----------------------------------------------------------

def test_ef_constant_a0():
    w = emden_fowler(0.0, PlaneFunction(one_plane))
    t = np.linspace(-5, 5, 11)
    np.testing.assert_array_equal(w(t, 0.2 * t), np.ones_like(t))


@pytest.mark.parametrize("a", [-1.3, 0.4, 2.0])
def test_ef_power_is_constant(a):
    v = PlaneFunction(lambda x, y: np.hypot(x, y) ** a)
    w = emden_fowler(a, v)
    t = np.linspace(-4, 4, 17)
    np.testing.assert_allclose(w(t, 0.1 + t), 1.0, rtol=1e-13)


@pytest.mark.parametrize("a, b", [(1.0, 1.5), (0.3, 0.9), (-1.0, -0.5), (2.0, 2.25)])
def test_ef_of_radial_extremal_has_w_star_shape(a, b):
    p = 2.0 / (b - a)
    v = PlaneFunction(lambda x, y: u_rad(a, b, np.hypot(x, y)))
    w = emden_fowler(a, v)
    t = np.linspace(-6, 6, 100) / abs(a)
    lhs = w(t, 0.0)
    rhs = w_star(a, p, t)
    lhs = lhs / w(0.0, 0.0)
    rhs = rhs / w_star(a, p, 0.0)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-15)


def _smooth_plane_function(rng):
    cx, cy = rng.uniform(-1, 1, 2)
    s = rng.uniform(0.3, 1.5)
    amp = rng.uniform(-2, 2)
    k = rng.uniform(0.5, 2.0)

    def value(x, y):
        return amp * np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / s**2) + np.sin(k * x) / (1 + x * x + y * y)

    def grad(x, y):
        g = amp * np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / s**2)
        q = 1 + x * x + y * y
        gx = -2 * (x - cx) / s**2 * g + k * np.cos(k * x) / q - 2 * x * np.sin(k * x) / q**2
        gy = -2 * (y - cy) / s**2 * g - 2 * y * np.sin(k * x) / q**2
        return gx, gy

    return PlaneFunction(value, grad)


def test_ef_round_trip():
    rng = np.random.default_rng(3)
    x = rng.uniform(-3, 3, 200)
    y = rng.uniform(-3, 3, 200)
    for a in (-0.7, 0.0, 1.2):
        v = _smooth_plane_function(rng)
        back = emden_fowler_inverse(a, emden_fowler(a, v))
        np.testing.assert_allclose(back(x, y), v(x, y), rtol=1e-12, atol=1e-13)
        gb = back.grad(x, y)
        g = v.grad(x, y)
        np.testing.assert_allclose(gb[0], g[0], rtol=1e-11, atol=1e-12)
        np.testing.assert_allclose(gb[1], g[1], rtol=1e-11, atol=1e-12)


def test_ef_gradient_matches_finite_differences():
    rng = np.random.default_rng(5)
    v = _smooth_plane_function(rng)
    w = emden_fowler(0.6, v)
    t, th, h = 0.3, 1.1, 1e-5
    wt, wth = w.grad(t, th)
    assert wt == pytest.approx((w(t + h, th) - w(t - h, th)) / (2 * h), rel=1e-8)
    assert wth == pytest.approx((w(t, th + h) - w(t, th - h)) / (2 * h), rel=1e-8)


# --- measures ---------------------------------------------------------------

@pytest.mark.parametrize("alpha", ALPHAS)
@pytest.mark.parametrize("frame", list(Frame))
def test_mass_one(alpha, frame):
    m = MeasureSpec(frame, alpha)
    f = one_plane if frame is Frame.PLANE else one2
    assert abs(integrate_measure(m, f) - 1.0) <= 1e-10


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 2.0])
def test_plane_density_formula(alpha):
    m = MeasureSpec(Frame.PLANE, alpha)
    r = np.array([0.3, 1.0, 2.5])
    c = alpha + 1
    np.testing.assert_allclose(m.density(r), c / math.pi * r ** (2 * alpha) / (1 + r ** (2 * c)) ** 2,
                               rtol=1e-15)


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 2.0])
def test_plane_density_integrates_to_one_in_r(alpha):
    from ckn2d.numerics import integrate_1d

    m = MeasureSpec(Frame.PLANE, alpha)
    val = integrate_1d(lambda r: 2 * math.pi * r * m.density(r), 0, np.inf, rel_tol=1e-12,
                       points=(1.0,))
    assert abs(val - 1.0) < 1e-10


def test_plane_example_half():
    m = MeasureSpec(Frame.PLANE, 0.0)
    val = integrate_measure(m, lambda x, y: 1.0 / (1 + x * x + y * y), rel_tol=1e-12)
    assert abs(val - 0.5) <= 1e-12


def test_cylinder_example_third():
    m = MeasureSpec(Frame.CYLINDER, 1.0)
    val = integrate_measure(m, lambda t, th: np.tanh(2 * t) ** 2 + 0 * th, rel_tol=1e-12)
    assert abs(val - 1.0 / 3.0) <= 1e-12


def _random_bounded(rng):
    A = rng.normal(size=3)
    k = rng.uniform(0.2, 2.0, 2)
    cx, cy = rng.uniform(-1.5, 1.5, 2)

    def f(x, y):
        return (A[0] * np.exp(-((x - cx) ** 2 + (y - cy) ** 2))
                + A[1] * np.cos(k[0] * x) * np.sin(k[1] * y) / (1 + 0.1 * (x * x + y * y))
                + A[2] * np.tanh(x + y))

    return f


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.0])
def test_pushforward_sphere_and_cylinder(alpha):
    rng = np.random.default_rng(11)
    plane = MeasureSpec(Frame.PLANE, alpha)
    sphere = MeasureSpec(Frame.SPHERE, alpha)
    cyl = MeasureSpec(Frame.CYLINDER, alpha)
    for _ in range(10):
        f = _random_bounded(rng)
        ref = integrate_measure(plane, f, rel_tol=1e-11)
        u = plane_to_sphere(alpha, PlaneFunction(f))
        on_sphere = integrate_measure(sphere, u, rel_tol=1e-11)
        w = emden_fowler(0.0, PlaneFunction(f))
        on_cyl = integrate_measure(cyl, w, rel_tol=1e-11)
        scale = max(1.0, abs(ref))
        assert abs(on_sphere - ref) <= 1e-8 * scale
        assert abs(on_cyl - ref) <= 1e-8 * scale


def test_sphere_plane_functions_round_trip():
    alpha = 0.5
    u = SphereFunction(lambda phi, th: np.sin(phi) + np.cos(phi) * np.cos(th))
    back = plane_to_sphere(alpha, sphere_to_plane(alpha, u))
    phi = np.linspace(-1.4, 1.4, 21)
    np.testing.assert_allclose(back(phi, 0.7), u(phi, 0.7), rtol=1e-12, atol=1e-14)


# --- gradient identity ------------------------------------------------------

def _sphere_fn(kind):
    if kind == "sin":
        return SphereFunction(lambda p, t: np.sin(p) + 0 * t,
                              lambda p, t: (np.cos(p) + 0 * t, 0 * p * t))
    if kind == "coscos":
        return SphereFunction(lambda p, t: np.cos(p) * np.cos(t),
                              lambda p, t: (-np.sin(p) * np.cos(t), -np.cos(p) * np.sin(t)))
    raise ValueError(kind)


def test_gradient_identity_radial_alpha0():
    lhs, rhs = gradient_identity_check(0.0, _sphere_fn("sin"))
    assert abs(lhs - rhs) <= 1e-10 * abs(lhs)
    # independent oracle: 4 pi int cos^2(phi) dsigma = 4 pi * 2/3 * (1/2)... = 8 pi / 3 * ...
    # int cos^2 phi * cos phi /(4 pi) dphi dtheta = (1/2) * 4/3 = 2/3
    assert lhs == pytest.approx(4 * math.pi * 2.0 / 3.0, rel=1e-12)


@pytest.mark.parametrize("alpha", [0.5, -0.5, 2.0])
def test_gradient_identity_nonradial(alpha):
    lhs, rhs = gradient_identity_check(alpha, _sphere_fn("coscos"))
    assert abs(lhs - rhs) <= 1e-8 * abs(lhs)


def test_gradient_identity_needs_gradient():
    with pytest.raises(DomainError):
        gradient_identity_check(0.0, SphereFunction(lambda p, t: p))
