"""Second variation of F at w* restricted to theta-dependent directions.

For psi = f(t) cos(k theta) the quadratic form

    Q(psi) = ||grad psi||^2 + a^2 ||psi||^2 - (p-1) int w*^{p-2} psi^2

has Rayleigh quotient k^2 + a^2 + <-f'' - beta sech^2(kappa t) f, f>/||f||^2
with kappa = (p-2)|a|/2 and beta = a^2 p (p-1)/2.  The lowest value in mode
k is therefore k^2 + a^2 + lambda_1 where lambda_1 = -(ap/2)^2 is the ground
energy of that Poeschl-Teller well.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import jsonio
from .closed_forms import w_star
from .cylinder_solver import CylinderField, _grid_for
from .errors import DomainError
from .numerics import EigenResult, solve_schrodinger_ground


def _check(a, p):
    if a == 0 or not p > 2:
        raise DomainError("need a != 0 and p > 2")


def well_parameters(a: float, p: float):
    """(kappa, beta) of the sech^2 well for the pair (a, p)."""
    _check(a, p)
    return 0.5 * (p - 2.0) * abs(a), 0.5 * a * a * p * (p - 1.0)


def q_form(a: float, p: float, psi: CylinderField, mean_tol: float = 1e-10) -> float:
    """Discrete Q(psi) on psi's grid; psi must have zero theta-mean per slice."""
    _check(a, p)
    v = psi.values
    scale = np.max(np.abs(v))
    if scale == 0:
        return 0.0
    if np.max(np.abs(v.mean(axis=1))) > mean_tol * scale:
        raise DomainError("psi must have zero theta-mean on every t-slice")
    g = _grid_for(CylinderField(v, a, p, psi.T))
    u = v[1:-1]
    pot = (p - 1.0) * w_star(a, p, psi.t[1:-1])[:, None] ** (p - 2.0)
    return g.inner(u, g.apply_L(u)) - g.inner(pot * u, u)


def l2_norm_sq(psi: CylinderField) -> float:
    g = _grid_for(psi)
    return g.inner(psi.values, psi.values)


@lru_cache(maxsize=256)
def _ground(a: float, p: float) -> EigenResult:
    kappa, beta = well_parameters(a, p)
    return solve_schrodinger_ground(kappa, beta)


def mode1_exact(a: float, p: float) -> float:
    """1 + a^2 - (ap/2)^2."""
    _check(a, p)
    return 1.0 + a * a - (0.5 * a * p) ** 2


@dataclass(frozen=True)
class SpectrumReport:
    a: float
    p: float
    mode_k: int
    numeric_lowest: float
    exact_lowest_mode1: float | None
    agreement: float | None
    lambda1: float
    eigenfunction: np.ndarray
    t: np.ndarray

    def to_dict(self, include_eigenfunction: bool = False) -> dict:
        out = {
            "a": self.a,
            "p": self.p,
            "mode_k": self.mode_k,
            "numeric_lowest": self.numeric_lowest,
            "exact_lowest_mode1": self.exact_lowest_mode1,
            "agreement": self.agreement,
            "lambda1": self.lambda1,
            "lambda1_exact": -(0.5 * self.a * self.p) ** 2,
        }
        if include_eigenfunction:
            out["t"] = self.t
            out["eigenfunction"] = self.eigenfunction
        return out

    def to_json(self, include_eigenfunction: bool = False) -> str:
        return jsonio.dumps(self.to_dict(include_eigenfunction))


def mode_spectrum(a: float, p: float, k: int = 1) -> SpectrumReport:
    """Lowest Rayleigh quotient of Q on the angular mode k.

    ``agreement`` (mode 1 only) is |numeric - exact| / |exact|, or the
    absolute gap on the neutral curve where the exact value is zero.
    """
    _check(a, p)
    if int(k) != k or k < 1:
        raise DomainError("k must be a positive integer")
    k = int(k)
    res = _ground(float(a), float(p))
    value = k * k + a * a + res.eigenvalue
    exact = gap = None
    if k == 1:
        exact = mode1_exact(a, p)
        gap = abs(value - exact) / (abs(exact) if exact != 0 else 1.0)
    return SpectrumReport(a, p, k, value, exact, gap, res.eigenvalue,
                          res.eigenfunction, res.t)


def stability_verdict(a: float, p: float):
    """(stable, margin): stable iff the mode-1 value is positive."""
    m = mode1_exact(a, p)
    return m > 0, abs(m)


def f1_profile(a: float, p: float, t):
    """cosh(kappa t)^{-p/(p-2)}, the mode-1 ground state."""
    kappa, _ = well_parameters(a, p)
    x = np.abs(kappa * np.asarray(t, dtype=float))
    return np.exp(-p / (p - 2.0) * (x + np.log1p(np.exp(-2.0 * x)) - math.log(2.0)))
