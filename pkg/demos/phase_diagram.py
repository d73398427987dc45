"""
Phase diagram in the (a, b) plane
=================================

Formula-only sweep of both quarter-planes, written as CSV and SVG into a
directory given on the command line (default: ./phase_diagram_out).
"""
import os
import sys

from ckn2d.region_mapper import GridSpec, boundary_slopes, sweep, to_svg

out = sys.argv[1] if len(sys.argv) > 1 else "phase_diagram_out"
os.makedirs(out, exist_ok=True)

res = sweep(GridSpec(0.02, 3.0, 60, side="both"), workers=4)
print(res.summary)
with open(os.path.join(out, "region.csv"), "w") as fh:
    fh.write(res.to_csv())
with open(os.path.join(out, "region.svg"), "w") as fh:
    fh.write(to_svg(res.points, -3.0, 3.0))

# b/a along the boundary as a -> 0 from either side
for side, vals in boundary_slopes((1e-1, 1e-2, 1e-3, 1e-4)).items():
    print(side, {k: round(v, 6) for k, v in vals.items()})
print("wrote", out)
