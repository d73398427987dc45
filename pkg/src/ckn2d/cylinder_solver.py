"""Minimization of the cylinder Sobolev quotient

    F(w) = (||grad w||^2 + a^2 ||w||^2) / ||w||_p^2

on the truncated cylinder [-T, T] x S^1 and comparison with the
theta-independent solution w*.

Discretization
--------------
A field is sampled on a uniform t-grid with w = 0 at t = +-T and on a
uniform periodic theta-grid.  In t the interior values are expanded in the
sine basis sin(j pi (t+T) / 2T) (a DST-I), in theta in Fourier modes, so the
operator L = -d_tt - d_thth + a^2 is diagonal and is inverted exactly.
Integrals use the trapezoidal rule, which for this basis is the discrete
Parseval identity; the discrete quotient is therefore a Rayleigh-type ratio
of a symmetric positive matrix.

Algorithm
---------
1. Preconditioned normalized descent: w <- L^{-1}(|w|^{p-2} w), rescaled.
   Each step is a gradient step on the L^p sphere in the L-metric, and
   Hoelder's inequality shows F never increases along it.
2. Newton polish on L u = |u|^{p-2} u, with GMRES preconditioned by L^{-1}.

When the initial field is even in t and in theta, iterates are projected on
that symmetry class, which removes the translation and rotation zero modes.
"""
from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import fft as sfft
from scipy.sparse.linalg import LinearOperator, gmres

from . import jsonio
from .closed_forms import w_star, w_star_lp_norm
from .errors import ConvergenceError, DomainError

TWO_PI = 2.0 * math.pi


class Classification(str, enum.Enum):
    RADIAL = "Radial"
    BROKEN = "Broken"


class InitStrategy(str, enum.Enum):
    MODE1 = "mode1"      # w* + 0.05 w*(0) sech(t) cos(theta)
    RADIAL = "radial"    # exact w*, no perturbation
    RANDOM = "random"    # w* plus seeded low-mode noise


@dataclass(frozen=True)
class SolverOptions:
    T: float | None = None            # default 30/|a|
    n_t: int = 2001
    n_theta: int = 64
    tol_break: float = 1e-6
    el_tol: float = 1e-8
    max_iter: int = 100_000
    max_newton: int = 30
    perturbation: float = 0.05
    seed: int = 0
    time_limit: float = 600.0

    def __post_init__(self):
        if self.n_t < 9 or self.n_theta < 4 or self.n_theta % 2:
            raise DomainError("need n_t >= 9 and an even n_theta >= 4")
        if self.T is not None and not self.T > 0:
            raise DomainError("T must be positive")


@dataclass(frozen=True)
class CylinderField:
    """Samples of w(t, theta); rows are t-nodes, columns theta-nodes.

    The first and last rows are the Dirichlet ends t = -T, T.
    """

    values: np.ndarray
    a: float
    p: float
    T: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2:
            raise DomainError("values must be a 2-D array")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n_t(self) -> int:
        return self.values.shape[0]

    @property
    def n_theta(self) -> int:
        return self.values.shape[1]

    @property
    def t(self) -> np.ndarray:
        return np.linspace(-self.T, self.T, self.n_t)

    @property
    def theta(self) -> np.ndarray:
        return TWO_PI * np.arange(self.n_theta) / self.n_theta

    def at(self, i: int, j: int) -> float:
        """Value at t-index i and theta-index j (taken mod n_theta)."""
        return float(self.values[i, j % self.n_theta])

    def with_values(self, values) -> "CylinderField":
        return replace(self, values=values)

    @classmethod
    def sample(cls, fn, a, p, T, n_t, n_theta) -> "CylinderField":
        """Sample fn(t, theta) on the grid; the end rows are set to zero."""
        t = np.linspace(-T, T, n_t)[:, None]
        th = (TWO_PI * np.arange(n_theta) / n_theta)[None, :]
        v = np.broadcast_to(fn(t, th), (n_t, n_theta)).astype(float)
        v[0] = 0.0
        v[-1] = 0.0
        return cls(v, a, p, T)


class _Grid:
    """Spectral operators on the interior nodes of a CylinderField grid."""

    def __init__(self, a, T, n_t, n_theta):
        self.a, self.T, self.n_t, self.n_theta = a, T, n_t, n_theta
        self.n = n_t - 2
        self.h = 2.0 * T / (n_t - 1)
        self.dth = TWO_PI / n_theta
        self.w = self.h * self.dth
        j = np.arange(1, self.n + 1)
        self.kappa = math.pi * j / (2.0 * T)
        m = np.arange(n_theta // 2 + 1, dtype=float)
        self.m = m
        self.symbol = self.kappa[:, None] ** 2 + m[None, :] ** 2 + a * a

    def _fwd(self, u):
        return sfft.rfft(sfft.dst(u, type=1, axis=0), axis=1)

    def _bwd(self, c):
        return sfft.idst(sfft.irfft(c, n=self.n_theta, axis=1), type=1, axis=0)

    def apply_L(self, u):
        return self._bwd(self._fwd(u) * self.symbol)

    def solve_L(self, g):
        return self._bwd(self._fwd(g) / self.symbol)

    def inner(self, u, v):
        return self.w * float(np.sum(u * v))

    def lp(self, u, p):
        return self.w * float(np.sum(np.abs(u) ** p))

    def d_t(self, full):
        """t-derivative at every node (ends included) of a full-grid field."""
        b = sfft.dst(full[1:-1], type=1, axis=0) / (self.n + 1)
        c = np.zeros_like(full)
        c[1:-1] = b * self.kappa[:, None]
        return 0.5 * sfft.dct(c, type=1, axis=0)

    def d_theta(self, full):
        c = sfft.rfft(full, axis=1) * (1j * self.m)[None, :]
        c[:, -1] = 0.0  # Nyquist mode has no odd part
        return sfft.irfft(c, n=self.n_theta, axis=1)

    def h1_split(self, u):
        """Per-mode energy ||grad u||^2 + ||u||^2, as (mode 0, rest)."""
        c = self._fwd(u)
        sym = self.kappa[:, None] ** 2 + self.m[None, :] ** 2 + 1.0
        wts = np.full(self.m.size, 2.0)
        wts[0] = 1.0
        wts[-1] = 1.0
        e = np.abs(c) ** 2 * sym * wts[None, :]
        return float(np.sum(e[:, 0])), float(np.sum(e[:, 1:]))


def _grid_for(w: CylinderField) -> _Grid:
    return _Grid(w.a, w.T, w.n_t, w.n_theta)


def _symmetrize(u):
    """Average over t -> -t and theta -> -theta."""
    u = 0.5 * (u + u[::-1])
    return 0.5 * (u + np.roll(u[:, ::-1], 1, axis=1))


def _is_even(u, tol=1e-14):
    s = max(np.max(np.abs(u)), 1e-300)
    return np.max(np.abs(u - _symmetrize(u))) <= tol * s


def evaluate_F(w: CylinderField) -> float:
    """Discrete (||grad w||^2 + a^2 ||w||^2) / ||w||_p^2."""
    g = _grid_for(w)
    u = w.values[1:-1]
    lp = g.lp(u, w.p)
    if not lp > 0:
        raise DomainError("F is undefined for the zero field")
    return g.inner(u, g.apply_L(u)) / lp ** (2.0 / w.p)


def symmetrize_theta(w: CylinderField) -> CylinderField:
    """theta-average of w, broadcast back to the grid."""
    return w.with_values(np.repeat(w.values.mean(axis=1, keepdims=True), w.n_theta, axis=1))


def theta_energy_fraction(w: CylinderField) -> float:
    """||w - <w>_theta||^2_H1 / ||w||^2_H1 with ||u||^2_H1 = ||grad u||^2 + ||u||^2."""
    e0, rest = _grid_for(w).h1_split(w.values[1:-1])
    tot = e0 + rest
    if not tot > 0:
        raise DomainError("zero field")
    return rest / tot


def el_residual(w: CylinderField) -> float:
    """Discrete L2 norm of -Lap w + a^2 w - |w|^{p-2} w on the interior."""
    g = _grid_for(w)
    u = w.values[1:-1]
    r = g.apply_L(u) - np.abs(u) ** (w.p - 2.0) * u
    return math.sqrt(g.inner(r, r))


def pohozaev_slices(w: CylinderField):
    """Per-slice defect int w_th^2 - int w_t^2 + a^2 int w^2 - (2/p) int w^p
    (theta-integrals) and the per-slice magnitude used for normalization."""
    g = _grid_for(w)
    v = w.values
    wt = g.d_t(v)
    wth = g.d_theta(v)
    A = np.sum(wth**2, axis=1) * g.dth
    B = np.sum(wt**2, axis=1) * g.dth
    C = w.a**2 * np.sum(v**2, axis=1) * g.dth
    D = 2.0 / w.p * np.sum(np.abs(v) ** w.p, axis=1) * g.dth
    return A - B + C - D, A + B + C + D


def pohozaev_residual(w: CylinderField) -> float:
    """max_t |defect(t)| / max_t magnitude(t); meaningful for EL solutions."""
    d, mag = pohozaev_slices(w)
    return float(np.max(np.abs(d)) / np.max(mag))


def radial_field(a, p, T, n_t, n_theta) -> CylinderField:
    return CylinderField.sample(lambda t, th: w_star(a, p, t) + 0.0 * th, a, p, T, n_t, n_theta)


def initial_field(a, p, opts: SolverOptions, init=InitStrategy.MODE1) -> CylinderField:
    T = opts.T if opts.T is not None else 30.0 / abs(a)
    if isinstance(init, CylinderField):
        return init
    init = InitStrategy(init)
    peak = w_star(a, p, 0.0)
    if init is InitStrategy.RADIAL:
        return radial_field(a, p, T, opts.n_t, opts.n_theta)
    if init is InitStrategy.MODE1:
        eps = opts.perturbation * peak

        def fn(t, th):
            s = 2.0 / (np.exp(t) + np.exp(-t))
            return w_star(a, p, t) + eps * s * np.cos(th)
        return CylinderField.sample(fn, a, p, T, opts.n_t, opts.n_theta)
    rng = np.random.default_rng(opts.seed)
    coef = rng.standard_normal((4, 4))

    def fn(t, th):
        base = w_star(a, p, t)
        extra = sum(coef[k, m] * np.cos(m * th + k) * np.exp(-0.5 * (t - k) ** 2)
                    for k in range(4) for m in range(4))
        return base * (1.0 + 0.1 * opts.perturbation * extra / np.max(np.abs(coef)))
    return CylinderField.sample(fn, a, p, T, opts.n_t, opts.n_theta)


@dataclass(frozen=True)
class SolveReport:
    field: CylinderField
    F_value: float
    F_radial: float
    el_residual: float
    pohozaev_residual: float
    theta_energy_fraction: float
    classification: Classification
    iterations: int
    newton_steps: int = 0
    neutral: bool = False
    F_init: float = float("nan")
    F_radial_exact: float = float("nan")
    elapsed: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def a(self):
        return self.field.a

    @property
    def p(self):
        return self.field.p

    def to_dict(self, include_field: bool = False) -> dict:
        out = {
            "a": self.a,
            "p": self.p,
            "T": self.field.T,
            "n_t": self.field.n_t,
            "n_theta": self.field.n_theta,
            "F_value": self.F_value,
            "F_radial": self.F_radial,
            "F_radial_exact": self.F_radial_exact,
            "F_init": self.F_init,
            "relative_gain": (self.F_radial - self.F_value) / self.F_radial,
            "el_residual": self.el_residual,
            "pohozaev_residual": self.pohozaev_residual,
            "theta_energy_fraction": self.theta_energy_fraction,
            "classification": self.classification.value,
            "neutral": self.neutral,
            "iterations": self.iterations,
            "newton_steps": self.newton_steps,
        }
        out.update(self.meta)
        if include_field:
            out["field"] = self.field.values
        return out

    def to_json(self, include_field: bool = False) -> str:
        return jsonio.dumps(self.to_dict(include_field))


def _el_scale(g: _Grid, u, p):
    """Factor c with c*u solving L(cu) = (cu)^{p-1} in the weak sense."""
    return (g.inner(u, g.apply_L(u)) / g.lp(u, p)) ** (1.0 / (p - 2.0))


def _newton(g: _Grid, u, p, tol, max_steps, sym):
    """Newton on L u - |u|^{p-2} u = 0. Returns (u, residual, steps)."""
    shape = u.shape
    nsz = u.size

    def resid(v):
        return g.apply_L(v) - np.abs(v) ** (p - 2.0) * v

    def norm(r):
        return math.sqrt(g.inner(r, r))

    r = resid(u)
    res = norm(r)
    steps = 0
    while res > tol and steps < max_steps:
        pot = (p - 1.0) * np.abs(u) ** (p - 2.0)

        def mv(x):
            x = x.reshape(shape)
            return (x - g.solve_L(pot * x)).ravel()

        op = LinearOperator((nsz, nsz), matvec=mv, dtype=float)
        rhs = -g.solve_L(r).ravel()
        dx, _ = gmres(op, rhs, rtol=1e-12, atol=0.0, restart=60, maxiter=20)
        dx = dx.reshape(shape)
        if sym:
            dx = _symmetrize(dx)
        lam = 1.0
        while True:
            cand = u + lam * dx
            rc = resid(cand)
            rn = norm(rc)
            if rn < res or lam < 1e-4:
                break
            lam *= 0.5
        steps += 1
        if rn >= res:
            break
        u, r, res = cand, rc, rn
    return u, res, steps


def minimize_F(a: float, p: float, init=InitStrategy.MODE1,
               opts: SolverOptions | None = None) -> SolveReport:
    """Find a minimizer (critical point) of F, starting from ``init``.

    The returned field solves -Lap u + a^2 u = u^{p-1} (up to el_tol).
    """
    if a == 0 or not p > 2:
        raise DomainError("need a != 0 and p > 2")
    opts = opts or SolverOptions()
    start = time.perf_counter()
    w0 = initial_field(a, p, opts, init)
    if w0.a != a or w0.p != p:
        raise DomainError("init field parameters do not match (a, p)")
    g = _grid_for(w0)
    u = np.array(w0.values[1:-1])
    sym = _is_even(u)
    F_init = evaluate_F(w0)
    rad = radial_field(a, p, w0.T, w0.n_t, w0.n_theta)
    F_rad = evaluate_F(rad)

    # stage 1: monotone preconditioned descent
    u /= g.lp(u, p) ** (1.0 / p)
    F_prev = math.inf
    it = 0
    switch = 1e-4
    while it < opts.max_iter:
        it += 1
        rhs = np.abs(u) ** (p - 2.0) * u
        v = g.solve_L(rhs)
        if sym:
            v = _symmetrize(v)
        num = g.inner(v, rhs) if not sym else g.inner(v, g.apply_L(v))
        nv = g.lp(v, p) ** (1.0 / p)
        F = num / nv**2
        u = v / nv
        if it % 10 == 0 or F_prev - F < 1e-13 * F:
            c = _el_scale(g, u, p)
            uc = c * u
            r = g.apply_L(uc) - np.abs(uc) ** (p - 2.0) * uc
            rel = math.sqrt(g.inner(r, r) / g.inner(uc, g.apply_L(uc)))
            if rel < switch:
                break
        if time.perf_counter() - start > opts.time_limit:
            raise ConvergenceError("descent exceeded the time limit", estimate=F)
        F_prev = F
    else:
        raise ConvergenceError("descent did not settle within max_iter", estimate=F)

    # stage 2: Newton polish on the Euler-Lagrange equation
    uc = _el_scale(g, u, p) * u
    uc, res, nsteps = _newton(g, uc, p, opts.el_tol, opts.max_newton, sym)
    full = np.zeros((w0.n_t, w0.n_theta))
    full[1:-1] = uc
    out = w0.with_values(full)
    F_val = evaluate_F(out)
    if res > opts.el_tol:
        raise ConvergenceError(f"Newton polish stalled at residual {res:.3e}",
                               estimate=F_val, error=res, payload=out)
    frac = theta_energy_fraction(out)
    broken = F_val < F_rad * (1.0 - opts.tol_break)
    neutral = (not broken) and abs(F_val - F_rad) < opts.tol_break * F_rad and frac > 1e-8
    return SolveReport(
        field=out,
        F_value=F_val,
        F_radial=F_rad,
        el_residual=res,
        pohozaev_residual=pohozaev_residual(out),
        theta_energy_fraction=frac,
        classification=Classification.BROKEN if broken else Classification.RADIAL,
        iterations=it,
        newton_steps=nsteps,
        neutral=neutral,
        F_init=F_init,
        F_radial_exact=w_star_lp_norm(a, p) ** ((p - 2.0) / p),
        elapsed=time.perf_counter() - start,
    )
