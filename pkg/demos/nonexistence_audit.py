"""Node-by-node audit of the inequality behind the nonexistence results."""
from __future__ import annotations

import numpy as np

from grwcurv import runner
from grwcurv.geometry import OPPOSITE, GraphHypersurface, build_frames, steady_state
from grwcurv.square import box_exponential_audit, phi_from_curvature

# With Phi = H_{r-1} P_{r-1}, the argument needs
#   box(e^{-h+t0}) >= C1^2 b_{r-1} e^{beta(-h+t0)}
# wherever the hypotheses hold.  On a low dome under the opposite orientation
# H_2 > 0, an elliptic point exists and <N, d_t> >= 1, so the check has teeth.

g = GraphHypersurface.from_function(steady_state(2), lambda x, y: -1.0 + 0.12 * np.exp(-(x * x + y * y)),
                                    [(-0.25, 0.25)] * 2, (24, 24))
fr = build_frames(g, OPPOSITE)
phi = phi_from_curvature(fr, 2)
H1 = fr.H[:, 1]
rep = box_exponential_audit(fr, phi, -1.0, 0.9 * H1.min(), 2.0, 1.1 * H1.max())
print("status:", rep.status, "| audited nodes:", rep.n_audited, "| violations:", rep.n_violations)
print("smallest margin:", float(np.min(rep.oracle - rep.bound)))
print("closed form vs discrete Hessian, by coefficient:", rep.closed_form_residual())

# The sweep over all preset families.  Most rows are vacuous: a hypothesis
# fails somewhere on the patch.  Completeness is never checkable.

status, payload = runner.run_audit(runner.AuditConfig(count=100))
print("\nsweep summary:")
for k, v in payload["summary"].items():
    print(f"  {k}: {v}")
