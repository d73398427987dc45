"""Phase diagram of the two-dimensional CKN family in the (a, b) plane.

Each admissible pair a < b < a+1 is labelled from the closed-form criterion
(b below the curve h) and, on request, by a full cylinder solve.  Pairs with
a < 0 are first sent to a > 0 by the Kelvin map, which preserves the optimal
constant and p.
"""
from __future__ import annotations

import csv
import enum
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import jsonio
from .closed_forms import h_curve, kelvin_inverse, w_star_lp_norm
from .cylinder_solver import SolverOptions, minimize_F
from .errors import ConvergenceError, DomainError

CSV_HEADER = ["a", "b", "p", "predicted", "solver_class", "F_radial", "F_min", "margin"]
BAND_EPS = 0.02


class Predicted(str, enum.Enum):
    BROKEN = "Broken"
    RADIAL_CANDIDATE = "RadialCandidate"
    NEUTRAL_BAND = "NeutralBand"


class Mode(str, enum.Enum):
    FORMULA = "formula"
    SOLVE = "solve"


@dataclass(frozen=True)
class RegionPoint:
    """Classification of one pair.

    ``margin`` is h(a) - b: positive in the proven symmetry-breaking region.
    """

    a: float
    b: float
    p: float
    predicted: Predicted
    F_radial: float
    margin: float
    solver_class: str | None = None
    F_min: float | None = None
    note: str | None = None

    def csv_row(self) -> list[str]:
        def f(x):
            return "" if x is None else format(x, ".17g")
        return [f(self.a), f(self.b), f(self.p), self.predicted.value, self.solver_class or "",
                f(self.F_radial), f(self.F_min), f(self.margin)]


def _positive_pair(a, b):
    if a == 0:
        raise DomainError("a must be nonzero")
    if not (a < b < a + 1):
        raise DomainError(f"need a < b < a+1, got a={a}, b={b}")
    return (a, b) if a > 0 else kelvin_inverse(a, b)


def predict(a: float, b: float, band_eps: float = BAND_EPS) -> Predicted:
    """Broken iff b < h(a); the band h(a) <= b < h(a) + band_eps is left open."""
    ap, bp = _positive_pair(a, b)
    h = float(h_curve(ap))
    if bp < h:
        return Predicted.BROKEN
    if bp < h + band_eps:
        return Predicted.NEUTRAL_BAND
    return Predicted.RADIAL_CANDIDATE


def classify_point(a: float, b: float, mode=Mode.FORMULA, band_eps: float = BAND_EPS,
                   solver_opts: SolverOptions | None = None) -> RegionPoint:
    mode = Mode(mode)
    ap, bp = _positive_pair(a, b)
    p = 2.0 / (bp - ap)
    label = predict(a, b, band_eps)
    F_rad = w_star_lp_norm(ap, p) ** ((p - 2.0) / p)
    margin = float(h_curve(ap)) - bp
    if mode is Mode.FORMULA:
        return RegionPoint(a, b, p, label, F_rad, margin)
    try:
        rep = minimize_F(ap, p, opts=solver_opts)
    except ConvergenceError as exc:
        return RegionPoint(a, b, p, label, F_rad, margin, note=f"solver: {exc}")
    return RegionPoint(a, b, p, label, F_rad, margin, rep.classification.value, rep.F_value)


@dataclass(frozen=True)
class GridSpec:
    """n_a values of a in [amin, amax] times n_b values b = a + s,
    s in [gap, 1 - gap].  ``side`` picks a > 0, a < 0 (mirrored) or both."""

    amin: float
    amax: float
    n_a: int
    n_b: int | None = None
    gap: float = 0.02
    side: str = "positive"

    def __post_init__(self):
        if not 0 < self.amin <= self.amax:
            raise DomainError("need 0 < amin <= amax")
        if self.n_a < 1 or (self.n_b is not None and self.n_b < 1):
            raise DomainError("grid sizes must be positive")
        if not 0 < self.gap < 0.5:
            raise DomainError("gap must lie in (0, 0.5)")
        if self.side not in ("positive", "negative", "both"):
            raise DomainError("side must be positive, negative or both")

    def pairs(self) -> list[tuple[float, float]]:
        a_pos = np.linspace(self.amin, self.amax, self.n_a)
        avals = {"positive": list(a_pos), "negative": list(-a_pos[::-1]),
                 "both": list(-a_pos[::-1]) + list(a_pos)}[self.side]
        s = np.linspace(self.gap, 1.0 - self.gap, self.n_b or self.n_a)
        return [(float(a), float(a + si)) for a in avals for si in s]


@dataclass(frozen=True)
class SweepResult:
    points: list
    summary: dict
    errors: list = field(default_factory=list)
    slopes: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for pt in self.points:
            w.writerow(pt.csv_row())
        return buf.getvalue()

    def summary_json(self) -> str:
        return jsonio.dumps({"summary": self.summary, "slopes": self.slopes,
                             "errors": self.errors})


def boundary_b(a: float, band_eps: float = BAND_EPS, iters: int = 200) -> float:
    """Locate the edge of the Broken label at fixed a by bisection in b."""
    lo, hi = a + 1e-15 * max(1.0, abs(a)), a + 1.0
    if predict(a, lo, band_eps) is not Predicted.BROKEN:
        return lo
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if predict(a, mid, band_eps) is Predicted.BROKEN:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def boundary_slopes(deltas=(1e-1, 1e-2, 1e-3)) -> dict:
    """Observed b/a of the classification edge at a = +delta and a = -delta."""
    return {
        "positive": {format(d, "g"): boundary_b(d) / d for d in deltas},
        "negative": {format(d, "g"): boundary_b(-d) / (-d) for d in deltas},
    }


def sweep(grid: GridSpec, mode=Mode.FORMULA, workers: int = 1, band_eps: float = BAND_EPS,
          solver_opts: SolverOptions | None = None) -> SweepResult:
    """Classify every grid pair; output order is the row-major grid order."""
    pairs = grid.pairs()

    def job(ab):
        try:
            return classify_point(ab[0], ab[1], mode, band_eps, solver_opts)
        except DomainError as exc:
            return exc

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(job, pairs))
    else:
        results = [job(ab) for ab in pairs]
    points, errors = [], []
    for ab, res in zip(pairs, results):
        if isinstance(res, Exception):
            errors.append({"a": ab[0], "b": ab[1], "error": str(res)})
        else:
            points.append(res)
            if res.note:
                errors.append({"a": ab[0], "b": ab[1], "error": res.note})
    summary = {c.value: sum(pt.predicted is c for pt in points) for c in Predicted}
    summary["total"] = len(points)
    if Mode(mode) is Mode.SOLVE:
        summary["solver_agrees_broken"] = sum(
            pt.predicted is Predicted.BROKEN and pt.solver_class == "Broken" for pt in points)
    return SweepResult(points, summary, errors, boundary_slopes())


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------

_COLORS = {
    Predicted.BROKEN: "#c0392b",
    Predicted.RADIAL_CANDIDATE: "#2471a3",
    Predicted.NEUTRAL_BAND: "#b7950b",
}


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def to_svg(points, amin: float | None = None, amax: float | None = None,
           width: int = 640, height: int = 640) -> str:
    """Scatter of the labelled pairs with the lines b = a, b = a+1 and the
    curve b = h(a) (400 samples per side of a = 0)."""
    a_vals = [pt.a for pt in points] or [1.0]
    lo = min(a_vals) if amin is None else amin
    hi = max(a_vals) if amax is None else amax
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    blo, bhi = lo, hi + 1.0
    pad = 50

    def X(a):
        return pad + (a - lo) / (hi - lo) * (width - 2 * pad)

    def Y(b):
        return height - pad - (b - blo) / (bhi - blo) * (height - 2 * pad)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           '<rect width="100%" height="100%" fill="white"/>',
           f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
           f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
           f'<text x="{width // 2}" y="{height - 12}" font-size="14" text-anchor="middle">a</text>',
           f'<text x="14" y="{height // 2}" font-size="14">b</text>',
           f'<text x="{pad}" y="{height - pad + 16}" font-size="10">{lo:.3g}</text>',
           f'<text x="{width - pad}" y="{height - pad + 16}" font-size="10" '
           f'text-anchor="end">{hi:.3g}</text>']

    def poly(xs, ys, color, dash=""):
        pts = " ".join(f"{_fmt(X(x))},{_fmt(Y(y))}" for x, y in zip(xs, ys))
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        return f'<polyline points="{pts}" fill="none" stroke="{color}"{extra}/>'

    line = np.linspace(lo, hi, 2)
    out.append(poly(line, line, "gray", "4 3"))
    out.append(poly(line, line + 1.0, "gray", "4 3"))
    segments = []
    if hi > 0:
        segments.append(np.linspace(max(lo, 1e-9), hi, 400))
    if lo < 0:
        segments.append(np.linspace(lo, min(hi, -1e-9), 400))
    for seg in segments:
        out.append(poly(seg, h_curve(seg), "black"))
    for pt in points:
        out.append(f'<circle cx="{_fmt(X(pt.a))}" cy="{_fmt(Y(pt.b))}" r="2.5" '
                   f'fill="{_COLORS[pt.predicted]}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
