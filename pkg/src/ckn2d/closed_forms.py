"""Explicit formulas for the two-dimensional Caffarelli-Kohn-Nirenberg family
and its weighted Moser-Trudinger limit.

Parameters follow the usual conventions: the weights are |x|^-a on the
gradient and |x|^-b on the L^p term, p = 2/(b-a) with a < b <= a+1.  On the
cylinder the same problem is indexed by (a, p).  For a < 0 the cylinder
formulas only depend on |a|: the Kelvin map (a, b) -> (-a, b-2a) identifies
the two signs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .numerics import integrate_1d, log_gamma, beta_integral, sech

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class CknParams:
    """A consistent (a, b, p) triple, optionally with the (alpha, eps) of the
    limit coupling a = -eps (alpha+1)/(1-eps), b = a + eps, p = 2/eps.

    Build through one of the ``from_*`` constructors; derived fields are
    always computed, never supplied independently.
    """

    a: float
    b: float
    p: float
    alpha: float | None = None
    eps: float | None = None

    @classmethod
    def from_ab(cls, a: float, b: float) -> "CknParams":
        if a == 0:
            raise DomainError("a must be nonzero")
        if not (a < b <= a + 1):
            raise DomainError(f"need a < b <= a+1, got a={a}, b={b}")
        return cls(a, b, 2.0 / (b - a))

    @classmethod
    def from_ap(cls, a: float, p: float) -> "CknParams":
        if a == 0:
            raise DomainError("a must be nonzero")
        if not p > 2:
            raise DomainError(f"p must exceed 2, got {p}")
        return cls(a, a + 2.0 / p, p)

    @classmethod
    def from_limit(cls, alpha: float, eps: float) -> "CknParams":
        if not alpha > -1:
            raise DomainError(f"alpha must exceed -1, got {alpha}")
        if not 0 < eps < 1:
            raise DomainError(f"eps must lie in (0, 1), got {eps}")
        a = -eps * (alpha + 1.0) / (1.0 - eps)
        return cls(a, a + eps, 2.0 / eps, alpha, eps)

    @property
    def cylinder_alpha(self) -> float:
        """alpha with 1 + alpha = (p-2)|a|/2, the decay index of w*."""
        return 0.5 * (self.p - 2.0) * abs(self.a) - 1.0


def h_curve(a):
    """Boundary of the proven symmetry-breaking region, a + |a|/sqrt(1+a^2)."""
    a_arr = np.asarray(a, dtype=float)
    if np.any(a_arr == 0):
        raise DomainError("h(a) is only used for a != 0")
    return a + np.abs(a) / np.sqrt(1.0 + a_arr * a_arr)


def u_rad(a: float, b: float, r):
    """Radial CKN extremal (1 + r^(-2a(1+a-b)/(b-a)))^(-(b-a)/(1+a-b)).

    Values lie in (0, 1): for a > 0 the supremum 1 is approached as r -> inf
    (and u -> 0 at the origin); for a < 0 it is the value at r = 0.
    """
    if a == 0:
        raise DomainError("a must be nonzero")
    if not (a < b < a + 1):
        raise DomainError(f"u_rad needs a < b < a+1, got a={a}, b={b}")
    inner = -2.0 * a * (1.0 + a - b) / (b - a)
    outer = (b - a) / (1.0 + a - b)
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("u_rad needs r > 0")
    return np.exp(-outer * np.logaddexp(0.0, inner * np.log(r)))


def w_star(a: float, p: float, t):
    """theta-independent cylinder solution
    (a^2 p/2)^(1/(p-2)) cosh((p-2) a t / 2)^(-2/(p-2))."""
    if a == 0 or not p > 2:
        raise DomainError("w_star needs a != 0 and p > 2")
    q = p - 2.0
    return (a * a * p / 2.0) ** (1.0 / q) * sech(0.5 * q * a * np.asarray(t)) ** (2.0 / q)


def w_star_peak(a: float, p: float) -> float:
    return (a * a * p / 2.0) ** (1.0 / (p - 2.0))


def c_p(p: float) -> float:
    """int_0^1 (1 + s^((p-2)/p))^(-2p/(p-2)) ds, increasing from 0 to 1/2."""
    if not p > 2:
        raise DomainError(f"c_p needs p > 2, got {p}")
    e = (p - 2.0) / p
    q = 2.0 * p / (p - 2.0)
    # fractional power at s = 0; the double-exponential rule is exact enough
    return integrate_1d(lambda s: np.exp(-q * np.log1p(s**e)), 0.0, 1.0,
                        rel_tol=1e-14, method="tanh-sinh")


def w_star_lp_norm(a: float, p: float) -> float:
    """||w*||_p^p on the cylinder: 4 pi (2a)^(p/(p-2)) (ap)^(2/(p-2)) c_p."""
    if a == 0 or not p > 2:
        raise DomainError("need a != 0 and p > 2")
    a = abs(a)
    q = p - 2.0
    return 4.0 * math.pi * (2.0 * a) ** (p / q) * (a * p) ** (2.0 / q) * c_p(p)


def w_star_lp_norm_quad(a: float, p: float, rel_tol: float = 1e-12) -> float:
    """2 pi int_R w*(t)^p dt by direct quadrature."""
    a = abs(a)
    scale = 2.0 / ((p - 2.0) * a)
    val = integrate_1d(lambda t: w_star(a, p, t) ** p, 0.0, np.inf, rel_tol=rel_tol,
                       points=(scale, 10 * scale))
    return 2.0 * TWO_PI * val


def w_star_lp_limit(alpha: float) -> dict:
    """Limits of p ||w*_{a(p),p}||_p^p as p -> inf with a p = 2(alpha+1).

    Returns the line value (integral over R only) and the cylinder value
    (with the 2 pi from theta); the latter is 8 pi (alpha+1).
    """
    return {"line": 4.0 * (alpha + 1.0), "cylinder": 8.0 * math.pi * (alpha + 1.0)}


def scaled_lp_mass(alpha: float, p: float) -> float:
    """p ||w*||_p^p at a = 2(alpha+1)/p; tends to 8 pi (alpha+1)."""
    return p * w_star_lp_norm(2.0 * (alpha + 1.0) / p, p)


def kappa_lambda(alpha: float, eps: float):
    """(kappa_eps, lambda_eps) for the limit coupling.

    kappa = pi/(alpha+1) int_0^inf s^(eps/(1-eps)) (1+s)^(-2/(1-eps)) ds
          = pi/(alpha+1) B(1/(1-eps), 1/(1-eps))
    lambda = 4 pi |a| Gamma((2-eps)/(1-eps)) Gamma(1/(1-eps)) / Gamma(2/(1-eps))
    """
    prm = CknParams.from_limit(alpha, eps)
    x = 1.0 / (1.0 - eps)
    kappa = math.pi / (alpha + 1.0) * beta_integral(x, 2.0 * x)
    lam = 4.0 * math.pi * abs(prm.a) * math.exp(
        log_gamma((2.0 - eps) * x) + log_gamma(x) - log_gamma(2.0 * x))
    return kappa, lam


def mu1(a: float, p: float) -> float:
    """Lowest Rayleigh quotient of the linearisation on mean-zero angular
    modes: a^2 + 1 - (a p / 2)^2."""
    if a == 0 or not p > 2:
        raise DomainError("need a != 0 and p > 2")
    return a * a + 1.0 - (0.5 * a * p) ** 2


def breaks_symmetry(a: float, p: float) -> bool:
    """|a| p > 2 sqrt(1 + a^2)."""
    if a == 0 or not p > 2:
        raise DomainError("need a != 0 and p > 2")
    return abs(a) * p > 2.0 * math.sqrt(1.0 + a * a)


def kelvin_map(a: float, b: float):
    """(a, b) -> (-a, b - 2a) for a > 0; the optimal constant is unchanged."""
    if not a > 0:
        raise DomainError("kelvin_map is defined for a > 0")
    if not (a < b <= a + 1):
        raise DomainError(f"need a < b <= a+1, got a={a}, b={b}")
    return -a, b - 2.0 * a


def kelvin_inverse(a: float, b: float):
    """Inverse of :func:`kelvin_map`: (a, b) with a < 0 -> (-a, b - 2a)."""
    if not a < 0:
        raise DomainError("kelvin_inverse is defined for a < 0")
    return -a, b - 2.0 * a


def liouville_profile(alpha: float, t):
    """V(t) = -2 log cosh((alpha+1) t), solving -V'' = 2 (alpha+1)^2 e^V."""
    if not -1 < alpha < 0:
        raise DomainError(f"liouville_profile needs alpha in (-1, 0), got {alpha}")
    x = np.abs((alpha + 1.0) * np.asarray(t, dtype=float))
    return -2.0 * (x + np.log1p(np.exp(-2.0 * x)) - math.log(2.0))


def liouville_mass(alpha: float) -> float:
    """mu with -V'' = mu e^V, namely 2 (alpha+1)^2."""
    return 2.0 * (alpha + 1.0) ** 2
