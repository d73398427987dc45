"""Plane, sphere and cylinder frames, their weighted probability measures and
the maps between them.

Coordinates
-----------
plane     (x, y), or polar (r, theta)
sphere    (phi, theta), phi in [-pi/2, pi/2] the latitude
cylinder  (t, theta), t = log r

With c = alpha + 1 the dilated stereographic map sends radius r to the
latitude phi = gd(c log r) (gd the Gudermannian), so that sin(phi) =
tanh(c t) and cos(phi) = sech(c t).  Under these maps

    d mu_alpha = (c/pi) r^(2 alpha) / (1 + r^(2c))^2 dx
    d sigma    = cos(phi) / (4 pi) dphi dtheta
    d nu_alpha = c / (4 pi) sech(c t)^2 dt dtheta

are push-forwards of one another.  The cylinder measure carries the
1/(2 pi) theta-average so that it has total mass one.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import expit, logit

from .errors import DomainError
from .numerics import integrate_1d, sech

TWO_PI = 2.0 * math.pi


class Frame(str, enum.Enum):
    PLANE = "plane"
    SPHERE = "sphere"
    CYLINDER = "cylinder"


# ---------------------------------------------------------------------------
# Points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PolarPoint:
    r: float
    theta: float


@dataclass(frozen=True)
class SpherePoint:
    phi: float
    theta: float

    @classmethod
    def from_cylindrical(cls, rho, z, theta=0.0):
        """Build from the R^3 cylindrical coordinates (rho, theta, z)."""
        return cls(np.arctan2(z, rho), theta)

    @property
    def rho(self):
        return np.cos(self.phi)

    @property
    def z(self):
        return np.sin(self.phi)


@dataclass(frozen=True)
class CylinderPoint:
    t: float
    theta: float


def _check_alpha(alpha):
    if not alpha > -1:
        raise DomainError(f"alpha must exceed -1, got {alpha}")


def sigma_alpha(alpha: float, p: PolarPoint) -> SpherePoint:
    """Inverse dilated stereographic projection R^2 -> S^2.

    r = 0 goes to the south pole; r -> inf tends to the north pole.
    Works elementwise on array-valued points.
    """
    _check_alpha(alpha)
    r = np.asarray(p.r, dtype=float)
    with np.errstate(divide="ignore"):
        phi = np.arctan(np.sinh((alpha + 1.0) * np.log(r)))
    return SpherePoint(phi if phi.ndim else float(phi), p.theta)


def sigma_alpha_inv(alpha: float, s: SpherePoint) -> PolarPoint:
    """r = (rho / (1 - z))^(1/(alpha+1)); the north pole is excluded."""
    _check_alpha(alpha)
    phi = np.asarray(s.phi, dtype=float)
    if np.any(phi >= 0.5 * math.pi):
        raise DomainError("the north pole has no preimage")
    with np.errstate(divide="ignore"):
        # rho/(1-z) = tan(pi/4 + phi/2); log of it is asinh(tan(phi))
        r = np.exp(np.arcsinh(np.tan(phi)) / (alpha + 1.0))
    # float(-pi/2) sits just inside the sphere, where tan is finite
    r = np.where(phi <= -0.5 * math.pi, 0.0, r)
    return PolarPoint(r if r.ndim else float(r), s.theta)


# ---------------------------------------------------------------------------
# Functions on frames
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlaneFunction:
    """v(x, y) with optional Cartesian gradient (v_x, v_y)."""

    value: Callable
    grad: Callable | None = None

    def __call__(self, x, y):
        return self.value(x, y)

    def polar(self, r, theta):
        """Return v, v_r and (1/r) v_theta at polar points."""
        c, s = np.cos(theta), np.sin(theta)
        x, y = r * c, r * s
        vx, vy = self.grad(x, y)
        return self.value(x, y), vx * c + vy * s, -vx * s + vy * c


@dataclass(frozen=True)
class CylinderFunction:
    """w(t, theta) with optional gradient (w_t, w_theta)."""

    value: Callable
    grad: Callable | None = None

    def __call__(self, t, theta):
        return self.value(t, theta)


@dataclass(frozen=True)
class SphereFunction:
    """u(phi, theta) with optional gradient (u_phi, u_theta)."""

    value: Callable
    grad: Callable | None = None

    def __call__(self, phi, theta):
        return self.value(phi, theta)


def emden_fowler(a: float, v: PlaneFunction) -> CylinderFunction:
    """w(t, theta) = e^(-a t) v(e^t e^(i theta))."""

    def value(t, theta):
        # clipping keeps e^t finite at the far ends of infinite-range rules
        t = np.clip(t, -700.0, 700.0)
        r = np.exp(t)
        return np.exp(-a * t) * v(r * np.cos(theta), r * np.sin(theta))

    grad = None
    if v.grad is not None:
        def grad(t, theta):
            t = np.clip(t, -700.0, 700.0)
            r = np.exp(t)
            val, vr, vth_over_r = v.polar(r, theta)
            scale = np.exp(-a * t)
            return scale * (r * vr - a * val), scale * r * vth_over_r

    return CylinderFunction(value, grad)


def emden_fowler_inverse(a: float, w: CylinderFunction) -> PlaneFunction:
    """v(x) = |x|^a w(log|x|, arg x)."""

    def value(x, y):
        r = np.hypot(x, y)
        return r**a * w(np.log(r), np.arctan2(y, x))

    grad = None
    if w.grad is not None:
        def grad(x, y):
            r = np.hypot(x, y)
            t, th = np.log(r), np.arctan2(y, x)
            wt, wth = w.grad(t, th)
            val = w(t, th)
            vr = r ** (a - 1.0) * (a * val + wt)
            vth_over_r = r ** (a - 1.0) * wth
            c, s = x / r, y / r
            return vr * c - vth_over_r * s, vr * s + vth_over_r * c

    return PlaneFunction(value, grad)


_PHI_MAX = np.nextafter(0.5 * math.pi, 0.0)


def _below_pole(phi):
    # quadrature nodes next to the pole can round onto it
    return np.minimum(phi, _PHI_MAX)


def plane_to_sphere(alpha: float, v: PlaneFunction) -> SphereFunction:
    """u = v o Sigma_alpha^{-1}, with the chain-rule gradient."""
    _check_alpha(alpha)
    c_ = alpha + 1.0

    def value(phi, theta):
        r = sigma_alpha_inv(alpha, SpherePoint(_below_pole(phi), theta)).r
        return v(r * np.cos(theta), r * np.sin(theta))

    grad = None
    if v.grad is not None:
        def grad(phi, theta):
            phi = _below_pole(phi)
            r = sigma_alpha_inv(alpha, SpherePoint(phi, theta)).r
            _, vr, vth_over_r = v.polar(r, theta)
            # dphi/dr = c cos(phi) / r
            return vr * r / (c_ * np.cos(phi)), vth_over_r * r

    return SphereFunction(value, grad)


def sphere_to_plane(alpha: float, u: SphereFunction) -> PlaneFunction:
    """v = u o Sigma_alpha."""
    _check_alpha(alpha)
    c_ = alpha + 1.0

    def value(x, y):
        r = np.hypot(x, y)
        phi = sigma_alpha(alpha, PolarPoint(r, 0.0)).phi
        return u(phi, np.arctan2(y, x))

    grad = None
    if u.grad is not None:
        def grad(x, y):
            r = np.hypot(x, y)
            th = np.arctan2(y, x)
            phi = sigma_alpha(alpha, PolarPoint(r, 0.0)).phi
            uphi, uth = u.grad(phi, th)
            vr = uphi * c_ * np.cos(phi) / r
            vth_over_r = uth / r
            cs, sn = x / r, y / r
            return vr * cs - vth_over_r * sn, vr * sn + vth_over_r * cs

    return PlaneFunction(value, grad)


# ---------------------------------------------------------------------------
# Measures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MeasureSpec:
    frame: Frame
    alpha: float

    def __post_init__(self):
        _check_alpha(self.alpha)
        object.__setattr__(self, "frame", Frame(self.frame))

    def density(self, *coords):
        """Density with respect to dx dy (plane), dphi dtheta (sphere) or
        dt dtheta (cylinder).  Plane densities take the radius only."""
        c = self.alpha + 1.0
        if self.frame is Frame.PLANE:
            r = np.asarray(coords[0], dtype=float)
            return c / math.pi * r ** (2 * self.alpha) / (1.0 + r ** (2 * c)) ** 2
        if self.frame is Frame.SPHERE:
            return np.cos(coords[0]) / (2.0 * TWO_PI)
        return c / (2.0 * TWO_PI) * sech(c * np.asarray(coords[0])) ** 2


def theta_grid(n: int) -> np.ndarray:
    return TWO_PI * np.arange(n) / n


def tensor_integral(radial, a, b, rel_tol=1e-10, n_theta=128, points=(),
                    max_theta=4096, abs_tol=0.0):
    """int_a^b mean_theta radial(s, theta) ds.

    ``radial(s[:, None], theta[None, :])`` returns a 2-D array.  The radial
    direction is adaptive; the periodic direction uses the trapezoidal rule,
    doubled until two successive counts agree to ``rel_tol``.
    """

    def run(n):
        th = theta_grid(n)[None, :]
        return integrate_1d(lambda s: np.mean(radial(s[:, None], th), axis=1),
                            a, b, rel_tol=rel_tol, abs_tol=abs_tol, points=points)

    prev = run(n_theta)
    n = n_theta
    while n < max_theta:
        n *= 2
        cur = run(n)
        if abs(cur - prev) <= max(rel_tol * abs(cur), abs_tol, 1e-300) or cur == prev:
            return cur
        prev = cur
    return prev


def _plane_radius_from_u(alpha, u):
    # s = r^(2c) = u/(1-u)
    return np.exp(np.clip(logit(u) / (2.0 * (alpha + 1.0)), -700.0, 700.0))


def integrate_measure(m: MeasureSpec, f: Callable, rel_tol: float = 1e-10,
                      n_theta: int = 128) -> float:
    """int f dm for a function given in the coordinates of ``m.frame``.

    Plane integrands are called as f(x, y); on the plane the substitution
    u = s/(1+s), s = r^(2(alpha+1)) turns mu_alpha into du dtheta / (2 pi)
    on the unit square, which removes the r^(2 alpha) singularity.
    """
    alpha = m.alpha
    c = alpha + 1.0
    if m.frame is Frame.PLANE:
        def radial(u, th):
            r = _plane_radius_from_u(alpha, u)
            return f(r * np.cos(th), r * np.sin(th))
        return tensor_integral(radial, 0.0, 1.0, rel_tol, n_theta, points=(0.5,))
    if m.frame is Frame.SPHERE:
        def radial(phi, th):
            return 0.5 * np.cos(phi) * f(phi, th)
        return tensor_integral(radial, -0.5 * math.pi, 0.5 * math.pi, rel_tol, n_theta,
                               points=(0.0,))

    def radial(t, th):
        wt = 0.5 * c * sech(c * t) ** 2
        with np.errstate(all="ignore"):
            val = wt * f(t, th)
        # sech^2 underflows to 0 long before f loses meaning
        return np.where(wt > 0, val, 0.0)
    return tensor_integral(radial, -np.inf, np.inf, rel_tol, n_theta, points=(0.0,))


def gradient_identity_check(alpha: float, u: SphereFunction, rel_tol: float = 1e-11,
                            n_theta: int = 128):
    """Both sides of

        4 pi int_S2 |grad u|^2 dsigma
            = 1/(alpha+1) int_R2 |grad v|^2 + alpha(alpha+2) |r^-1 d_theta v|^2 dx

    for v = u o Sigma_alpha.  The left side is integrated in latitude, the
    right side in the plane radius, so the two share no quadrature nodes.
    """
    _check_alpha(alpha)
    if u.grad is None:
        raise DomainError("gradient_identity_check needs u.grad")
    c = alpha + 1.0

    def sphere_side(phi, th):
        uphi, uth = u.grad(phi, th)
        cphi = np.cos(phi)
        return TWO_PI * (uphi**2 * cphi + uth**2 / cphi)

    lhs = tensor_integral(sphere_side, -0.5 * math.pi, 0.5 * math.pi, rel_tol, n_theta,
                          points=(0.0,))

    v = sphere_to_plane(alpha, u)

    def plane_side(r, th):
        _, vr, vth_over_r = v.polar(r, th)
        return TWO_PI * r * (vr**2 + c * c * vth_over_r**2) / c

    rhs = tensor_integral(plane_side, 0.0, np.inf, rel_tol, n_theta, points=(1.0,))
    return lhs, rhs


def logit_u(alpha, r):
    """Plane radius -> the uniform coordinate u = s/(1+s), s = r^(2(alpha+1))."""
    return expit(2.0 * (alpha + 1.0) * np.log(r))
