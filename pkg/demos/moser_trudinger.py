"""
Weighted Moser-Trudinger checks
===============================

The plain inequality survives on a random corpus for alpha <= 0, fails on
the concentrating family v_eps once alpha > 0, and the extra angular term
repairs it.
"""
from scipy.special import i0

from ckn2d.mt_lab import (
    Form,
    circle_inequality_check,
    corpus,
    counterexample_scan,
    plane_pieces,
    report_from_pieces,
)

fns = corpus(seed=0, n=12)
for alpha in (-0.5, 0.0, 1.0):
    rows = [plane_pieces(alpha, f.plane(), scale=f.scale) for f in fns]
    plain = min(report_from_pieces(pc, Form.PLAIN).deficit for pc in rows)
    strong = min(report_from_pieces(pc, Form.STRENGTHENED).deficit for pc in rows)
    print(f"alpha={alpha:+.1f}  min deficit plain {plain:.4f}  strengthened {strong:.4f}")

scan = counterexample_scan(1.0, [10.0 ** -k for k in range(1, 9)])
print("\nalpha = 1, MT applied to 2 v_eps")
for row in scan.rows:
    print(f"  eps={row.eps:.0e}  lhs={row.report.lhs_log:8.4f}  rhs={row.report.rhs_log:8.4f}"
          f"  {'violated' if row.report.violated else 'holds'}")
print(f"  log-slope of the bracket {scan.log_slope:.5f} (alpha/(1+alpha) = 0.5)")

lhs, rhs = circle_inequality_check(lambda x, y: x * x)
print(f"\nunit circle, v = x^2: lhs/rhs = {lhs / rhs:.8f}, I0(1) = {i0(1.0):.8f}")
