"""Numerical tests of the weighted Moser-Trudinger inequality

    log int e^{v - int v dmu} dmu <= 1/(16 pi (alpha+1)) int |grad v|^2 dx

(the plain form) and of its strengthened form, where the Dirichlet term
gains alpha (alpha+2) int |r^-1 d_theta v|^2 dx.  The strengthened form is
Onofri's inequality transported by the dilated stereographic map, so it holds
for every alpha > -1; the plain form can fail for alpha > 0.

Also here: the piecewise-logarithmic family that breaks the plain form, the
unit-circle test and the small-eps expansion linking the CKN family to the
Moser-Trudinger functional.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import jsonio
from .closed_forms import CknParams, kappa_lambda, liouville_profile
from .errors import DomainError
from .geometry import (CylinderFunction, Frame, MeasureSpec, PlaneFunction, emden_fowler,
                       integrate_measure, plane_to_sphere, tensor_integral, theta_grid)
from .numerics import integrate_1d

TWO_PI = 2.0 * math.pi


class Form(str, enum.Enum):
    PLAIN = "plain"
    STRENGTHENED = "strengthened"


def violation_threshold(rhs_log: float) -> float:
    return 1e-8 * max(1.0, abs(rhs_log))


@dataclass(frozen=True)
class MtPieces:
    """Frame-independent ingredients of both forms.

    ``dirichlet`` is int |grad v|^2 dx, ``angular`` is int |r^-1 d_theta v|^2 dx
    and ``log_exp_mean`` is log int e^{v - mean} dmu_alpha.
    """

    alpha: float
    frame: Frame
    mean: float
    log_exp_mean: float
    dirichlet: float
    angular: float


@dataclass(frozen=True)
class MtReport:
    alpha: float
    frame: Frame
    form: Form
    lhs_log: float
    rhs_log: float
    deficit: float
    violated: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "alpha": self.alpha,
            "frame": self.frame.value,
            "form": self.form.value,
            "lhs_log": self.lhs_log,
            "rhs_log": self.rhs_log,
            "deficit": self.deficit,
            "violated": self.violated,
        }
        out.update(self.details)
        return out

    def to_json(self) -> str:
        return jsonio.dumps(self.to_dict())


def report_from_pieces(pc: MtPieces, form=Form.PLAIN) -> MtReport:
    form = Form(form)
    c = pc.alpha + 1.0
    energy = pc.dirichlet
    if form is Form.STRENGTHENED:
        energy += pc.alpha * (pc.alpha + 2.0) * pc.angular
    rhs = energy / (16.0 * math.pi * c)
    lhs = pc.log_exp_mean
    deficit = rhs - lhs
    return MtReport(pc.alpha, pc.frame, form, lhs, rhs, deficit,
                    bool(deficit < -violation_threshold(rhs)),
                    {"mean": pc.mean, "dirichlet": pc.dirichlet, "angular": pc.angular})


# ---------------------------------------------------------------------------
# Frame evaluators
# ---------------------------------------------------------------------------

def _log_exp_mean(m: MeasureSpec, f, rel_tol, n_theta):
    mean = integrate_measure(m, f, rel_tol, n_theta)
    val = integrate_measure(m, lambda *x: np.exp(f(*x) - mean), rel_tol, n_theta)
    return mean, math.log(val)


def plane_pieces(alpha: float, v: PlaneFunction, rel_tol: float = 1e-11,
                 n_theta: int = 64, scale: float = 1.0) -> MtPieces:
    """Evaluate the ingredients on R^2; ``scale`` hints the size of v's support."""
    if v.grad is None:
        raise DomainError("v needs an analytic gradient")
    m = MeasureSpec(Frame.PLANE, alpha)
    mean, lem = _log_exp_mean(m, v, rel_tol, n_theta)
    pts = (0.25 * scale, scale, 4.0 * scale)

    def dens(which):
        def f(r, th):
            _, vr, vt = v.polar(r, th)
            return TWO_PI * r * (vt**2 if which else vr**2 + vt**2)
        return f

    D = tensor_integral(dens(False), 0.0, np.inf, rel_tol, n_theta, points=pts)
    # the angular part only matters relative to the full energy
    A = tensor_integral(dens(True), 0.0, np.inf, rel_tol, n_theta, points=pts,
                        abs_tol=rel_tol * D)
    return MtPieces(alpha, Frame.PLANE, mean, lem, D, A)


def sphere_pieces(alpha: float, v: PlaneFunction, rel_tol: float = 1e-11,
                  n_theta: int = 64) -> MtPieces:
    """Same ingredients computed on S^2 after transport u = v o Sigma_alpha^-1."""
    u = plane_to_sphere(alpha, v)
    c = alpha + 1.0
    m = MeasureSpec(Frame.SPHERE, alpha)
    mean, lem = _log_exp_mean(m, u, rel_tol, n_theta)
    half = 0.5 * math.pi
    lo = -half

    def radial(phi, th):
        uphi, _ = u.grad(phi, th)
        return TWO_PI * c * uphi**2 * np.cos(phi)

    def angular(phi, th):
        _, uth = u.grad(phi, th)
        return TWO_PI * uth**2 / (c * np.cos(phi))

    # the integrands are evaluated strictly inside the open interval
    D_r = tensor_integral(radial, lo, half, rel_tol, n_theta, points=(0.0,))
    A = tensor_integral(angular, lo, half, rel_tol, n_theta, points=(0.0,),
                        abs_tol=rel_tol * D_r)
    return MtPieces(alpha, Frame.SPHERE, mean, lem, D_r + A, A)


def cylinder_pieces(alpha: float, w: CylinderFunction, rel_tol: float = 1e-11,
                    n_theta: int = 64) -> MtPieces:
    """Ingredients for w(t, theta) on R x S^1 with the measure nu_alpha."""
    if w.grad is None:
        raise DomainError("w needs an analytic gradient")
    m = MeasureSpec(Frame.CYLINDER, alpha)
    mean, lem = _log_exp_mean(m, w, rel_tol, n_theta)

    def both(t, th):
        wt, wth = w.grad(t, th)
        return TWO_PI * (wt**2 + wth**2)

    def ang(t, th):
        _, wth = w.grad(t, th)
        return TWO_PI * wth**2

    D = tensor_integral(both, -np.inf, np.inf, rel_tol, n_theta, points=(0.0,))
    A = tensor_integral(ang, -np.inf, np.inf, rel_tol, n_theta, points=(0.0,),
                        abs_tol=rel_tol * D)
    return MtPieces(alpha, Frame.CYLINDER, mean, lem, D, A)


def mt_check(alpha: float, v: PlaneFunction, form=Form.PLAIN, frame=Frame.PLANE,
             rel_tol: float = 1e-11, n_theta: int = 64) -> MtReport:
    """Both sides of the chosen form for a plane function v.

    ``frame`` selects where the integrals are computed; v is transported to
    the sphere or cylinder first when needed.
    """
    if not alpha > -1:
        raise DomainError("alpha must exceed -1")
    frame = Frame(frame)
    if frame is Frame.PLANE:
        pc = plane_pieces(alpha, v, rel_tol, n_theta)
    elif frame is Frame.SPHERE:
        pc = sphere_pieces(alpha, v, rel_tol, n_theta)
    else:
        pc = cylinder_pieces(alpha, emden_fowler(0.0, v), rel_tol, n_theta)
    return report_from_pieces(pc, form)


def mt_cylinder_check(alpha: float, w: CylinderFunction, form=Form.PLAIN,
                      rel_tol: float = 1e-11, n_theta: int = 64) -> MtReport:
    """The inequality stated on the cylinder against nu_alpha."""
    if not alpha > -1:
        raise DomainError("alpha must exceed -1")
    return report_from_pieces(cylinder_pieces(alpha, w, rel_tol, n_theta), form)


def liouville_extremal(alpha: float, t0: float = 1.0, const: float = 0.0) -> CylinderFunction:
    """w = V(t - t0) - V(t) + const, the finite-energy member of the extremal
    family generated by the Liouville profile V (a dilation of the plane)."""
    c = alpha + 1.0

    def value(t, th):
        return liouville_profile(alpha, t - t0) - liouville_profile(alpha, t) + const + 0.0 * th

    def grad(t, th):
        wt = -2.0 * c * (np.tanh(c * (t - t0)) - np.tanh(c * t))
        return wt + 0.0 * th, 0.0 * t * th

    return CylinderFunction(value, grad)


# ---------------------------------------------------------------------------
# Test-function corpus
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Bump:
    """A (1 + bx X + by Y + cxy X Y + crr (X^2+Y^2)) exp(-(X^2+Y^2)/2),
    X = (x - x0)/s, Y = (y - y0)/s."""

    A: float
    x0: float = 0.0
    y0: float = 0.0
    s: float = 1.0
    bx: float = 0.0
    by: float = 0.0
    cxy: float = 0.0
    crr: float = 0.0

    def parts(self, x, y):
        # far-field points from infinite-range maps; the bump is zero there
        X = np.clip((x - self.x0) / self.s, -1e100, 1e100)
        Y = np.clip((y - self.y0) / self.s, -1e100, 1e100)
        R2 = X * X + Y * Y
        g = np.exp(-0.5 * R2)
        P = 1.0 + self.bx * X + self.by * Y + self.cxy * X * Y + self.crr * R2
        PX = self.bx + self.cxy * Y + 2.0 * self.crr * X
        PY = self.by + self.cxy * X + 2.0 * self.crr * Y
        k = self.A / self.s
        return self.A * P * g, k * (PX - X * P) * g, k * (PY - Y * P) * g


@dataclass(frozen=True)
class CorpusFunction:
    name: str
    bumps: tuple
    radial: bool

    @property
    def scale(self) -> float:
        return max(max(b.s, math.hypot(b.x0, b.y0)) for b in self.bumps)

    def value(self, x, y):
        return sum(b.parts(x, y)[0] for b in self.bumps)

    def grad(self, x, y):
        gx = gy = 0.0
        for b in self.bumps:
            _, bx, by = b.parts(x, y)
            gx = gx + bx
            gy = gy + by
        return gx, gy

    def plane(self) -> PlaneFunction:
        return PlaneFunction(self.value, self.grad)


def corpus(seed: int = 0, n: int = 50, radial: bool = False) -> list[CorpusFunction]:
    """Seeded Gaussian and low-order Hermite combinations.

    With ``radial=True`` every member is centred at the origin and depends on
    |x| only.
    """
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        nb = int(rng.integers(1, 4))
        bumps = []
        for _ in range(nb):
            A = float(rng.uniform(-1.5, 1.5))
            s = float(rng.uniform(0.4, 1.5))
            crr = float(rng.uniform(-0.3, 0.3))
            if radial:
                bumps.append(Bump(A, s=s, crr=crr))
            else:
                rad = float(rng.uniform(0.0, 1.5))
                ang = float(rng.uniform(0.0, TWO_PI))
                bumps.append(Bump(A, rad * math.cos(ang), rad * math.sin(ang), s,
                                  *map(float, rng.uniform(-0.8, 0.8, 3)), crr))
        kind = "radial" if radial else "general"
        out.append(CorpusFunction(f"{kind}-{seed}-{i}", tuple(bumps), radial))
    return out


# ---------------------------------------------------------------------------
# The piecewise-logarithmic counterexample
# ---------------------------------------------------------------------------

X_BAR = (1.0, 0.0)


@dataclass(frozen=True)
class ClosedFormPieces:
    eps: float
    dirichlet: float       # ||grad v_eps||^2
    outer_value: float     # v_eps for |x - xbar| >= 1


def counterexample_v_eps(eps: float):
    """v_eps = 1/2 log(eps / (eps + pi rho^2)^2), rho = |x - (1, 0)|, frozen
    at its rho = 1 value outside the unit disc around (1, 0)."""
    if not 0 < eps < 1:
        raise DomainError("eps must lie in (0, 1)")
    inner = 0.5 * math.log(eps) - math.log(eps + math.pi)

    def value(x, y):
        q = math.pi * ((x - X_BAR[0]) ** 2 + (y - X_BAR[1]) ** 2)
        return np.where(q < math.pi, 0.5 * math.log(eps) - np.log(eps + np.minimum(q, math.pi)),
                        inner)

    def grad(x, y):
        dx, dy = x - X_BAR[0], y - X_BAR[1]
        q = math.pi * (dx * dx + dy * dy)
        k = np.where(q < math.pi, -TWO_PI / (eps + q), 0.0)
        return k * dx, k * dy

    pieces = ClosedFormPieces(eps, counterexample_dirichlet(eps), inner)
    return PlaneFunction(value, grad), pieces


def counterexample_dirichlet(eps: float) -> float:
    """Closed-form ||grad v_eps||^2; the formula itself holds for every eps > 0."""
    if not eps > 0:
        raise DomainError("eps must be positive")
    return 4.0 * math.pi * math.log((eps + math.pi) / eps) - 4.0 * math.pi**2 / (eps + math.pi)


def counterexample_dirichlet_quad(eps: float, rel_tol: float = 1e-12) -> float:
    """||grad v_eps||^2 by quadrature in rho over the unit disc."""
    se = math.sqrt(eps)
    pts = tuple(x for x in (se, 10 * se, 100 * se) if x < 1)
    return integrate_1d(lambda r: TWO_PI * r * (TWO_PI * r / (eps + math.pi * r * r)) ** 2,
                        0.0, 1.0, rel_tol=rel_tol, points=pts)


def _ring_mass(alpha, u, rel_tol):
    """int_0^{2pi} density_alpha(|xbar + rho e^{i psi}|) rho dpsi with rho = 1 - u.

    The ring passes at distance u from the origin, where the weight is
    singular for alpha < 0, so u is passed instead of rho.
    """
    c = alpha + 1.0
    rho = 1.0 - u

    def dens(r2):
        return rho * (c / math.pi) * r2**alpha / (1.0 + r2**c) ** 2

    if alpha >= 0 or u >= 0.5:
        # s = pi - psi; r^2 = u^2 + 4 rho sin^2(s/2)
        return 2.0 * integrate_1d(
            lambda s: dens(u * u + 4.0 * rho * np.sin(0.5 * s) ** 2), 0.0, math.pi,
            rel_tol=rel_tol)

    # 2 sqrt(rho) sin(s/2) = u sinh(tau) gives r^2 = u^2 cosh^2(tau) exactly
    k = 2.0 * math.sqrt(rho)

    def g(tau):
        # u sinh(tau) / k, formed in logs so tiny u and large tau stay finite
        sh = np.exp(math.log(u / (2.0 * k)) + tau + np.log(-np.expm1(-2.0 * tau)))
        # log r avoids underflow of u^2 for tiny u
        lch = np.logaddexp(tau, -tau) - math.log(2.0)
        lr = math.log(u) + lch
        # density(r) * ds/dtau, with ds/dtau = 2 u cosh / (k sqrt(1 - sh^2))
        return rho * (c / math.pi) * np.exp((2.0 * alpha + 1.0) * lr) \
            / (1.0 + np.exp(2.0 * c * lr)) ** 2 * 2.0 / (k * np.sqrt(1.0 - sh * sh))

    # s = pi would give a singular Jacobian; stop at s = pi/2 and finish in s
    z = math.log(k * math.sin(0.25 * math.pi)) - math.log(u)
    tau_mid = math.asinh(math.exp(z)) if z < 300 else z + math.log(2.0)
    inner = integrate_1d(g, 0.0, tau_mid, rel_tol=rel_tol,
                         points=tuple(x for x in (1.0, 4.0, 16.0) if x < tau_mid))
    outer = integrate_1d(lambda s: dens(u * u + 4.0 * rho * np.sin(0.5 * s) ** 2),
                         0.5 * math.pi, math.pi, rel_tol=rel_tol)
    return 2.0 * (inner + outer)


@dataclass(frozen=True)
class CounterexampleRow:
    eps: float
    mean: float            # mu_alpha(v_eps)
    exp_mass: float        # mu_alpha(e^{2 v_eps})
    dirichlet: float
    bracket: float         # ||grad v||^2/(4 pi (alpha+1)) + 2 mu_alpha(v)
    report: MtReport


def counterexample_report(alpha: float, eps: float, rel_tol: float = 1e-11) -> CounterexampleRow:
    """The plain form applied to 2 v_eps, integrated in polar coordinates
    around (1, 0) with the disc boundary rho = 1 as a breakpoint."""
    if not alpha > -1:
        raise DomainError("alpha must exceed -1")
    _, pcs = counterexample_v_eps(eps)
    cache: dict[float, float] = {}

    def ring_u(u):
        out = np.empty_like(u)
        for i, x in enumerate(u):
            key = float(x)
            if key not in cache:
                cache[key] = _ring_mass(alpha, key, 0.1 * rel_tol)
            out[i] = cache[key]
        return out

    def vin(rho):
        return 0.5 * math.log(eps) - np.log(eps + math.pi * rho * rho)

    def ein(rho):
        return eps / (eps + math.pi * rho * rho) ** 2

    # rho in [0, 1/2]: the kink scale sqrt(eps) matters; u = 1 - rho in (0, 1/2]:
    # for alpha < 0 the ring mass blows up like u^(2 alpha + 1) as u -> 0
    se = math.sqrt(eps)
    pts = tuple(x for x in (se, 10 * se, 100 * se, 1000 * se) if x < 0.5)
    # u = v^q with q (2 alpha + 2) = 1 turns the blow-up into a bounded integrand
    q = max(1.0, 1.0 / (2.0 * alpha + 2.0))
    vmax = 0.5 ** (1.0 / q)

    def near(weight):
        def f(v):
            u = v**q
            return ring_u(u) * weight(1.0 - u) * q * v ** (q - 1.0)
        return f

    def both(weight):
        a = integrate_1d(lambda r: ring_u(1.0 - r) * weight(r), 0.0, 0.5,
                         rel_tol=rel_tol, points=pts)
        b = integrate_1d(near(weight), 0.0, vmax, rel_tol=rel_tol)
        return a + b

    disc = both(lambda r: 1.0)
    mv = both(vin)
    me = both(ein)
    outside = 1.0 - disc
    mean = mv + outside * pcs.outer_value
    exp_mass = me + outside * math.exp(2.0 * pcs.outer_value)
    c = alpha + 1.0
    D2 = 4.0 * pcs.dirichlet        # energy of 2 v_eps
    rhs = D2 / (16.0 * math.pi * c)
    lhs = math.log(exp_mass) - 2.0 * mean
    deficit = rhs - lhs
    rep = MtReport(alpha, Frame.PLANE, Form.PLAIN, lhs, rhs, deficit,
                   bool(deficit < -violation_threshold(rhs)),
                   {"eps": eps, "function": "2 v_eps"})
    bracket = pcs.dirichlet / (4.0 * math.pi * c) + 2.0 * mean
    return CounterexampleRow(eps, mean, exp_mass, pcs.dirichlet, bracket, rep)


@dataclass(frozen=True)
class CounterexampleScan:
    alpha: float
    rows: list
    first_violating_eps: float | None
    log_slope: float
    expected_slope: float

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "first_violating_eps": self.first_violating_eps,
            "log_slope": self.log_slope,
            "expected_slope": self.expected_slope,
            "rows": [{"eps": r.eps, "mean": r.mean, "exp_mass": r.exp_mass,
                      "dirichlet": r.dirichlet, "bracket": r.bracket,
                      "lhs_log": r.report.lhs_log, "rhs_log": r.report.rhs_log,
                      "deficit": r.report.deficit, "violated": r.report.violated}
                     for r in self.rows],
        }

    def to_json(self) -> str:
        return jsonio.dumps(self.to_dict())


def counterexample_scan(alpha: float, eps_values, fit_range=(1e-6, 1e-3)) -> CounterexampleScan:
    """Evaluate the family over ``eps_values`` (scanned in the given order) and
    fit the slope of the bracket against log eps over ``fit_range``."""
    rows = [counterexample_report(alpha, float(e)) for e in eps_values]
    first = next((r.eps for r in rows if r.report.violated), None)
    lo, hi = fit_range
    fit = [(math.log(r.eps), r.bracket) for r in rows if lo * (1 - 1e-12) <= r.eps <= hi * (1 + 1e-12)]
    if len(fit) < 2:
        fit = [(math.log(r.eps), r.bracket) for r in rows]
    slope = float(np.polyfit(*np.array(fit).T, 1)[0]) if len(fit) >= 2 else float("nan")
    return CounterexampleScan(alpha, rows, first, slope, alpha / (1.0 + alpha))


# ---------------------------------------------------------------------------
# Unit-circle test
# ---------------------------------------------------------------------------

def circle_inequality_check(v, rel_tol: float = 1e-14, n0: int = 16, n_max: int = 1 << 16):
    """lhs = (1/2pi) int e^{2v} dtheta and rhs = exp((1/pi) int v dtheta) on
    the unit circle, by the periodic trapezoidal rule refined until stable."""
    def means(n):
        th = theta_grid(n)
        vals = np.asarray(v(np.cos(th), np.sin(th)), dtype=float) * np.ones(n)
        return np.mean(np.exp(2.0 * vals)), np.exp(2.0 * np.mean(vals))

    prev = means(n0)
    n = n0
    while n < n_max:
        n *= 2
        cur = means(n)
        if all(abs(c - p) <= rel_tol * abs(c) for c, p in zip(cur, prev)):
            return float(cur[0]), float(cur[1])
        prev = cur
    return float(prev[0]), float(prev[1])


# ---------------------------------------------------------------------------
# Small-eps expansion of the CKN quotient
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExpansionFit:
    alpha: float
    eps: list
    gradient_ratio: list       # (1/lambda_eps) int |grad w_eps|^2 |x|^{-2a}
    lp_ratio: list             # (1/kappa_eps) int |w_eps|^p |x|^{-bp}
    coefficients: list         # (gradient_ratio - 1)/eps
    fitted_coefficient: float  # polynomial extrapolation to eps = 0
    target_coefficient: float  # 2 mu(v) + ||grad v||^2/(4 pi (1+alpha))
    lp_limit: float            # int e^{2v} dmu_alpha
    observed_order: float | None

    @property
    def relative_error(self) -> float:
        return abs(self.fitted_coefficient - self.target_coefficient) / abs(self.target_coefficient)

    def to_dict(self) -> dict:
        d = jsonio.to_plain(self)
        d["relative_error"] = self.relative_error
        return d

    def to_json(self) -> str:
        return jsonio.dumps(self.to_dict())


def _u_eps_parts(alpha, eps, r):
    """u_eps and its radial derivative."""
    c = alpha + 1.0
    e = eps / (1.0 - eps)
    lr = np.log(r)
    ls = np.logaddexp(0.0, 2.0 * c * lr)  # log(1 + r^2c)
    u = np.exp(-e * ls)
    ur = -2.0 * c * e * np.exp((2.0 * c - 1.0) * lr - (e + 1.0) * ls)
    return u, ur


def ckn_gradient_ratio(alpha, eps, v: PlaneFunction, rel_tol=1e-11, n_theta=64, scale=1.0):
    """(1/lambda_eps) int |grad((1+eps v) u_eps)|^2 |x|^{-2a} dx.

    Only the change relative to u_eps is integrated; the remainder is
    lambda_eps exactly, since u_eps saturates its own normalization.
    """
    prm = CknParams.from_limit(alpha, eps)
    _, lam = kappa_lambda(alpha, eps)

    def f(r, th):
        u, ur = _u_eps_parts(alpha, eps, r)
        val, vr, vt = v.polar(r, th)
        wr = (1.0 + eps * val) * ur + eps * u * vr
        wt = eps * u * vt
        return TWO_PI * r ** (1.0 - 2.0 * prm.a) * (wr * wr + wt * wt - ur * ur)

    pts = (0.25 * scale, scale, 4.0 * scale)
    return 1.0 + tensor_integral(f, 0.0, np.inf, rel_tol, n_theta, points=pts) / lam


def ckn_lp_ratio(alpha, eps, v: PlaneFunction, rel_tol=1e-11, n_theta=64, scale=1.0):
    """(1/kappa_eps) int |(1+eps v) u_eps|^{2/eps} |x|^{-bp} dx."""
    kappa, _ = kappa_lambda(alpha, eps)
    c = alpha + 1.0
    ex = 2.0 * (alpha + eps) / (1.0 - eps)

    def f(r, th):
        val = v(r * np.cos(th), r * np.sin(th))
        base = np.abs(1.0 + eps * val)
        lr = np.log(r)
        dens = np.exp((ex + 1.0) * lr - 2.0 / (1.0 - eps) * np.logaddexp(0.0, 2.0 * c * lr))
        return TWO_PI * (base ** (2.0 / eps) - 1.0) * dens

    pts = (0.25 * scale, scale, 4.0 * scale)
    return 1.0 + tensor_integral(f, 0.0, np.inf, rel_tol, n_theta, points=pts) / kappa


def _neville_at_zero(xs, ys):
    """Value at 0 of the interpolating polynomial through (xs, ys)."""
    p = list(map(float, ys))
    x = list(map(float, xs))
    n = len(x)
    for k in range(1, n):
        for i in range(n - k):
            p[i] = (x[i + k] * p[i] - x[i] * p[i + 1]) / (x[i + k] - x[i])
    return p[0]


def ckn_to_mt_limit(alpha: float, v: PlaneFunction, eps_list=(0.1, 0.05, 0.025),
                    rel_tol: float = 1e-11, n_theta: int = 64, scale: float = 1.0) -> ExpansionFit:
    """Expansion of the CKN quotient along w_eps = (1 + eps v) u_eps.

    The first-order coefficient is extrapolated from (ratio - 1)/eps by
    polynomial (Richardson) extrapolation through all points of ``eps_list``.
    """
    if not alpha > -1:
        raise DomainError("alpha must exceed -1")
    eps_list = [float(e) for e in eps_list]
    if any(not 0 < e < 0.2 for e in eps_list) or sorted(eps_list, reverse=True) != eps_list:
        raise DomainError("eps_list must be decreasing inside (0, 0.2)")
    G = [ckn_gradient_ratio(alpha, e, v, rel_tol, n_theta, scale) for e in eps_list]
    L = [ckn_lp_ratio(alpha, e, v, rel_tol, n_theta, scale) for e in eps_list]
    coef = [(g - 1.0) / e for g, e in zip(G, eps_list)]
    fitted = _neville_at_zero(eps_list, coef) if len(eps_list) > 1 else coef[0]
    pc = plane_pieces(alpha, v, rel_tol, n_theta, scale)
    target = 2.0 * pc.mean + pc.dirichlet / (4.0 * math.pi * (1.0 + alpha))
    m = MeasureSpec(Frame.PLANE, alpha)
    lp_lim = integrate_measure(m, lambda x, y: np.exp(2.0 * v(x, y)), rel_tol, n_theta)
    order = None
    if len(eps_list) >= 3:
        d1, d2 = coef[0] - coef[1], coef[1] - coef[2]
        if d1 != 0 and d2 != 0 and d1 / d2 > 0:
            order = math.log(d1 / d2) / math.log(eps_list[0] / eps_list[1])
    return ExpansionFit(alpha, eps_list, G, L, coef, fitted, target, lp_lim, order)
