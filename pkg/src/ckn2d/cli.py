"""Command-line interface.

Usage: ckn2d [--config FILE] [--output-dir DIR] [--seed N] [--rel-tol X] COMMAND ...

Every command prints its main result as JSON (region-scan prints its CSV when
no output directory is given).  With ``--output-dir`` the result files and a
``manifest.json`` listing inputs, tolerances and the library version are
written there.  Exit codes: 0 success, 1 domain error, 2 non-convergence or a
failed identity, 64 usage error.
"""
from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import __version__, jsonio
from .errors import ConvergenceError, DomainError

EXIT_OK, EXIT_DOMAIN, EXIT_CONVERGENCE, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise UsageError(message)


def _float_list(text):
    return [float(x) for x in text.split(",") if x.strip()]


def _eps_range(text):
    """'hi:lo' (one value per decade) or 'hi:lo:n' (n log-spaced values)."""
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise argparse.ArgumentTypeError("expected HI:LO or HI:LO:N")
    hi, lo = float(parts[0]), float(parts[1])
    if not (0 < lo < hi < 1):
        raise argparse.ArgumentTypeError("need 0 < LO < HI < 1")
    n = int(parts[2]) if len(parts) == 3 else int(round(math.log10(hi / lo))) + 1
    return [float(x) for x in np.logspace(math.log10(hi), math.log10(lo), max(n, 2))]


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ckn2d", description="Weighted Moser-Trudinger / CKN numerics.")
    ap.add_argument("--version", action="version", version=f"ckn2d {__version__}")
    ap.add_argument("--config", help="key = value file providing defaults")
    ap.add_argument("--output-dir", dest="output_dir", default=None)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--rel-tol", dest="rel_tol", type=float, default=1e-11)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("closed-forms", help="evaluate the explicit formulas")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--b", type=float, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--eps", type=float, default=None)

    p = sub.add_parser("solve", help="minimize F on the cylinder")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--init", choices=["mode1", "radial", "random"], default="mode1")
    p.add_argument("--n-t", dest="n_t", type=int, default=2001)
    p.add_argument("--n-theta", dest="n_theta", type=int, default=64)
    p.add_argument("--T", dest="T", type=float, default=None)
    p.add_argument("--tol-break", dest="tol_break", type=float, default=1e-6)
    p.add_argument("--el-tol", dest="el_tol", type=float, default=1e-8)
    p.add_argument("--max-iter", dest="max_iter", type=int, default=100_000)
    p.add_argument("--include-field", dest="include_field", action="store_true")

    p = sub.add_parser("spectrum", help="mode-k stability of the radial extremal")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--include-eigenfunction", dest="include_eigenfunction",
                   action="store_true")

    p = sub.add_parser("mt-check", help="run the inequality on the seeded corpus")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--form", choices=["plain", "strengthened"], default="plain")
    p.add_argument("--frame", choices=["plane", "sphere", "cylinder"], default="plane")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--radial", action="store_true")

    p = sub.add_parser("counterexample", help="scan the piecewise-log family")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--eps-scan", dest="eps_scan", type=_eps_range, default="1e-2:1e-6")

    p = sub.add_parser("limit", help="small-eps expansion of the CKN quotient")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--eps-list", dest="eps_list", type=_float_list, default="0.1,0.05,0.025")
    p.add_argument("--index", type=int, default=0, help="corpus member used as v")

    p = sub.add_parser("region-scan", help="classify an (a, b) grid")
    p.add_argument("--amin", type=float, required=True)
    p.add_argument("--amax", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode", choices=["formula", "solve"], default="formula")
    p.add_argument("--side", choices=["positive", "negative", "both"], default="positive")
    p.add_argument("--band-eps", dest="band_eps", type=float, default=0.02)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--n-t", dest="n_t", type=int, default=2001)
    p.add_argument("--n-theta", dest="n_theta", type=int, default=64)

    sub.add_parser("verify-appendix", help="run the change-of-variable identity suite")
    return ap


# ---------------------------------------------------------------------------
# Config files
# ---------------------------------------------------------------------------

def read_config(path: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            if not key:
                raise UsageError(f"{path}:{lineno}: empty key")
            out[key.replace("-", "_")] = value
    return out


def _subparser(parser, name):
    for act in parser._actions:
        if isinstance(act, argparse._SubParsersAction):
            return act.choices[name]
    raise KeyError(name)


def _apply_config(parser, argv, cfg):
    """Re-parse argv with config values as defaults (command line wins)."""
    cmd = next((x for x in argv if x in COMMANDS), None)
    if cmd is None:
        return parser.parse_args(argv)
    sp = _subparser(parser, cmd)
    known = {}
    for prs in (parser, sp):
        for act in prs._actions:
            if act.dest not in ("help", "version", "command", "config"):
                known[act.dest] = (prs, act)
    defaults = {}
    for key, text in cfg.items():
        if key not in known:
            raise UsageError(f"unknown config key '{key}'")
        prs, act = known[key]
        if isinstance(act, argparse._StoreTrueAction):
            val = text.lower() in ("1", "true", "yes", "on")
        elif act.type is not None:
            try:
                val = act.type(text)
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise UsageError(f"bad value for '{key}': {exc}")
        else:
            val = text
        if act.choices is not None and val not in act.choices:
            raise UsageError(f"bad value for '{key}': {text}")
        act.required = False
        defaults.setdefault(prs, {})[key] = val
    for prs, vals in defaults.items():
        prs.set_defaults(**vals)
    return parser.parse_args(argv)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _cmd_closed_forms(args):
    from . import closed_forms as cf
    a = args.a
    if args.p is not None and args.b is not None:
        raise DomainError("give either --p or --b, not both")
    prm = None
    if args.p is not None:
        prm = cf.CknParams.from_ap(a, args.p)
    elif args.b is not None:
        prm = cf.CknParams.from_ab(a, args.b)
    out = {"a": a, "h": float(cf.h_curve(a)), "gap": a + 1.0 - float(cf.h_curve(a))}
    if prm is not None:
        p = prm.p
        out.update({
            "b": prm.b, "p": p,
            "mu1": cf.mu1(a, p),
            "breaks_symmetry": cf.breaks_symmetry(a, p),
            "w_star_peak": cf.w_star_peak(a, p),
            "c_p": cf.c_p(p),
            "w_star_lp_norm": cf.w_star_lp_norm(a, p),
            "w_star_lp_norm_quadrature": cf.w_star_lp_norm_quad(a, p),
            "F_radial": cf.w_star_lp_norm(a, p) ** ((p - 2.0) / p),
        })
        if a > 0 and prm.b <= a + 1:
            out["kelvin_image"] = list(cf.kelvin_map(a, prm.b))
    if args.alpha is not None:
        out["lp_limit"] = cf.w_star_lp_limit(args.alpha)
        if args.eps is not None:
            lim = cf.CknParams.from_limit(args.alpha, args.eps)
            kappa, lam = cf.kappa_lambda(args.alpha, args.eps)
            out.update({"limit_params": {"a": lim.a, "b": lim.b, "p": lim.p},
                        "kappa": kappa, "lambda": lam})
    return {"closed_forms.json": jsonio.dumps(out)}, jsonio.dumps(out)


def _cmd_solve(args):
    from .cylinder_solver import SolverOptions, minimize_F
    opts = SolverOptions(T=args.T, n_t=args.n_t, n_theta=args.n_theta, tol_break=args.tol_break,
                         el_tol=args.el_tol, max_iter=args.max_iter, seed=args.seed)
    rep = minimize_F(args.a, args.p, init=args.init, opts=opts)
    txt = jsonio.dumps({k: v for k, v in rep.to_dict(args.include_field).items()})
    return {"solve.json": txt}, txt


def _cmd_spectrum(args):
    from .spectrum import mode_spectrum, stability_verdict
    rep = mode_spectrum(args.a, args.p, args.k)
    d = rep.to_dict(args.include_eigenfunction)
    stable, margin = stability_verdict(args.a, args.p)
    d.update({"stable": stable, "margin": margin})
    txt = jsonio.dumps(d)
    return {"spectrum.json": txt}, txt


def _cmd_mt_check(args):
    from .mt_lab import corpus, mt_check
    fns = corpus(args.seed, args.n, radial=args.radial)
    rows = []
    for f in fns:
        rep = mt_check(args.alpha, f.plane(), args.form, args.frame, rel_tol=args.rel_tol)
        d = rep.to_dict()
        d["function"] = f.name
        rows.append(d)
    out = {"alpha": args.alpha, "form": args.form, "frame": args.frame, "seed": args.seed,
           "violations": sum(r["violated"] for r in rows),
           "min_deficit": min(r["deficit"] for r in rows), "reports": rows}
    txt = jsonio.dumps(out)
    return {"mt_check.json": txt}, txt


def _cmd_counterexample(args):
    from .mt_lab import counterexample_scan
    eps = args.eps_scan if isinstance(args.eps_scan, list) else _eps_range(args.eps_scan)
    scan = counterexample_scan(args.alpha, eps)
    txt = scan.to_json()
    return {"counterexample.json": txt}, txt


def _cmd_limit(args):
    from .mt_lab import ckn_to_mt_limit, corpus
    eps = args.eps_list if isinstance(args.eps_list, list) else _float_list(args.eps_list)
    fn = corpus(args.seed, args.index + 1)[args.index]
    fit = ckn_to_mt_limit(args.alpha, fn.plane(), eps, scale=fn.scale)
    d = fit.to_dict()
    d["function"] = fn.name
    txt = jsonio.dumps(d)
    return {"limit.json": txt}, txt


def _cmd_region_scan(args):
    from .cylinder_solver import SolverOptions
    from .region_mapper import GridSpec, sweep, to_svg
    grid = GridSpec(args.amin, args.amax, args.n, side=args.side)
    opts = SolverOptions(n_t=args.n_t, n_theta=args.n_theta, seed=args.seed)
    res = sweep(grid, args.mode, workers=args.workers, band_eps=args.band_eps, solver_opts=opts)
    csv_txt = res.to_csv()
    lo = -args.amax if args.side != "positive" else args.amin
    hi = -args.amin if args.side == "negative" else args.amax
    files = {"region.csv": csv_txt, "region.svg": to_svg(res.points, lo, hi),
             "region_summary.json": res.summary_json()}
    return files, csv_txt


def verify_appendix_suite(rel_tol: float = 1e-11):
    """List of (name, passed, detail) for the change-of-variable identities."""
    from . import geometry as g
    results = []

    def record(name, err, tol):
        results.append((name, bool(err <= tol), f"err={err:.3e} tol={tol:.0e}"))

    for frame in g.Frame:
        for alpha in (-0.9, -0.5, 0.0, 1.0, 5.0):
            m = g.MeasureSpec(frame, alpha)
            val = g.integrate_measure(m, lambda *x: np.ones(np.broadcast(*x).shape), rel_tol)
            record(f"mass[{frame.value},alpha={alpha:g}]", abs(val - 1.0), 1e-10)
    pt = g.sigma_alpha(1.0, g.PolarPoint(math.sqrt(2.0), 0.0))
    record("sigma_alpha example (alpha=1, r=sqrt2)",
           max(abs(math.cos(pt.phi) - 0.8), abs(math.sin(pt.phi) - 0.6)), 1e-14)
    worst = 0.0
    for alpha in (-0.9, -0.5, 0.0, 1.0, 5.0):
        # latitude carries no precision once r^(alpha+1) passes ~1e8
        span = 3.0 / (alpha + 1.0)
        r = np.geomspace(10.0 ** -span, 10.0 ** span, 25)
        back = g.sigma_alpha_inv(alpha, g.sigma_alpha(alpha, g.PolarPoint(r, 0.0))).r
        worst = max(worst, float(np.max(np.abs(back - r) / r)))
    record("sigma_alpha round trip", worst, 1e-12)
    cases = [
        ("u = sin(phi), alpha=0", 0.0, g.SphereFunction(lambda ph, th: np.sin(ph) + 0 * th,
                                                        lambda ph, th: (np.cos(ph) + 0 * th, 0 * ph * th))),
        ("u = cos(phi) cos(theta), alpha=0.5", 0.5,
         g.SphereFunction(lambda ph, th: np.cos(ph) * np.cos(th),
                          lambda ph, th: (-np.sin(ph) * np.cos(th), -np.cos(ph) * np.sin(th)))),
    ]
    for name, alpha, u in cases:
        lhs, rhs = g.gradient_identity_check(alpha, u, rel_tol)
        record(f"gradient identity [{name}]", abs(lhs - rhs) / abs(lhs), 1e-8)

    def f(x, y):
        x = np.clip(x, -1e100, 1e100)
        y = np.clip(y, -1e100, 1e100)
        return np.exp(-0.5 * ((x - 0.3) ** 2 + (y + 0.2) ** 2)) * (1 + 0.5 * x * y)

    for alpha in (-0.5, 0.0, 1.5):
        plane = g.integrate_measure(g.MeasureSpec(g.Frame.PLANE, alpha), f, rel_tol)

        def on_sphere(ph, th, alpha=alpha):
            rr = g.sigma_alpha_inv(alpha, g.SpherePoint(g._below_pole(ph), th)).r
            return f(rr * np.cos(th), rr * np.sin(th))

        def on_cyl(t, th):
            rr = np.exp(np.clip(t, -700, 700))
            return f(rr * np.cos(th), rr * np.sin(th))

        sph = g.integrate_measure(g.MeasureSpec(g.Frame.SPHERE, alpha), on_sphere, rel_tol)
        cyl = g.integrate_measure(g.MeasureSpec(g.Frame.CYLINDER, alpha), on_cyl, rel_tol)
        record(f"pushforward plane->sphere alpha={alpha:g}", abs(plane - sph) / abs(plane), 1e-8)
        record(f"pushforward plane->cylinder alpha={alpha:g}", abs(plane - cyl) / abs(plane), 1e-8)
    v = g.PlaneFunction(f)
    back = g.emden_fowler_inverse(0.7, g.emden_fowler(0.7, v))
    xs = np.linspace(-2, 2, 11) + 0.05
    X, Y = np.meshgrid(xs, xs + 0.01)
    record("Emden-Fowler round trip", float(np.max(np.abs(back(X, Y) - f(X, Y)))), 1e-12)
    return results


def _cmd_verify_appendix(args):
    res = verify_appendix_suite(args.rel_tol)
    lines = [f"{'PASS' if ok else 'FAIL'} {name} ({detail})" for name, ok, detail in res]
    txt = "\n".join(lines) + "\n"
    out = {"identities": [{"name": n, "passed": ok, "detail": d} for n, ok, d in res]}
    return {"verify_appendix.json": jsonio.dumps(out)}, txt, all(ok for _, ok, _ in res)


COMMANDS = {
    "closed-forms": _cmd_closed_forms,
    "solve": _cmd_solve,
    "spectrum": _cmd_spectrum,
    "mt-check": _cmd_mt_check,
    "counterexample": _cmd_counterexample,
    "limit": _cmd_limit,
    "region-scan": _cmd_region_scan,
    "verify-appendix": _cmd_verify_appendix,
}


def _manifest(args, files):
    inputs = {k: v for k, v in sorted(vars(args).items()) if k not in ("output_dir", "config")}
    return jsonio.dumps({
        "library": "ckn2d",
        "library_version": __version__,
        "command": args.command,
        "inputs": inputs,
        "tolerances": {"rel_tol": args.rel_tol},
        "outputs": sorted(files),
    })


def run(argv=None, stdout=None) -> int:
    """Execute one command; returns the process exit code."""
    stdout = stdout or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        pre = _Parser(add_help=False)
        pre.add_argument("--config")
        known, _ = pre.parse_known_args(argv)
        if known.config:
            args = _apply_config(parser, argv, read_config(known.config))
        else:
            args = parser.parse_args(argv)
    except UsageError as exc:
        if str(exc) and not str(exc).startswith(("argument", "the following", "unrecognized",
                                                  "invalid choice")):
            sys.stderr.write(f"ckn2d: error: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"ckn2d: error: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)

    try:
        out = COMMANDS[args.command](args)
    except DomainError as exc:
        sys.stderr.write(f"ckn2d: domain error: {exc}\n")
        return EXIT_DOMAIN
    except ConvergenceError as exc:
        sys.stderr.write(f"ckn2d: no convergence: {exc}\n")
        return EXIT_CONVERGENCE
    ok = True
    if len(out) == 3:
        files, text, ok = out
    else:
        files, text = out
    if args.output_dir:
        os.makedirs(args.output_dir, exist_ok=True)
        for name, content in files.items():
            with open(os.path.join(args.output_dir, name), "w", encoding="utf-8",
                      newline="\n") as fh:
                fh.write(content)
        with open(os.path.join(args.output_dir, "manifest.json"), "w", encoding="utf-8",
                  newline="\n") as fh:
            fh.write(_manifest(args, files))
    stdout.write(text)
    return EXIT_OK if ok else EXIT_CONVERGENCE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
