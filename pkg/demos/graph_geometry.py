"""Spacelike graphs in the steady-state space: frames, curvatures and the height function."""
from __future__ import annotations

import numpy as np

from grwcurv.geometry import (OPPOSITE, SAME, GraphHypersurface, build_frames, curvature_report,
                              elliptic_point_scan, height_gradient, steady_state)

# The steady-state space is -dt^2 + e^{2t} |dx|^2.  A graph t = u(x) over a
# grid is spacelike while |grad u| < e^u; its unit normal is timelike and is
# oriented either with the time direction or against it.

amb = steady_state(2)
slice_ = GraphHypersurface.from_function(amb, lambda x, y: 0.3 + 0 * x, [(-1, 1), (-1, 1)], (24, 24))
fr = build_frames(slice_, SAME)
print("slice, normal along d_t: <N, d_t> =", fr.normal_dot_dt[0])
print("shape operator at a node:\n", fr.shape_on[0])
print("H_1, H_2 =", fr.H[0, 1], fr.H[0, 2])

# Slices are flat: the Gauss equation with ambient curvature 1 gives R = 0.

print("scalar curvature range:", np.ptp(curvature_report(fr).scalar_curvature))

# A small bowl.  The height h = t|_Sigma satisfies |grad h|^2 = <N, d_t>^2 - 1;
# its gradient is computed two independent ways.

bowl = GraphHypersurface.from_function(amb, lambda x, y: 0.1 + 0.05 * (x * x + y * y),
                                       [(-1, 1), (-1, 1)], (33, 33))
for orient in (SAME, OPPOSITE):
    fr = build_frames(bowl, orient)
    hg = height_gradient(fr)
    scan = elliptic_point_scan(fr)
    print(f"\nbowl, {orient} orientation")
    print("  principal curvature range:", fr.principal.min(), fr.principal.max())
    print("  height-gradient residuals:", hg.residual, hg.norm_identity_residual)
    print("  elliptic nodes:", int(scan.elliptic.sum()), "of", fr.m)
    print("  at the minimum of h:", scan.minima[0]["expected"])
