"""A maximising sequence for the square operator on flat space."""
from __future__ import annotations

import numpy as np

from grwcurv.maxprin import (ModelManifold, sequence_limits, inverse_quadratic,
                             maximizing_sequence, radial_samples, square_distance_check)

# The distance bound compares box(rho) with a radial bound.  On the plane
# with Phi = I, box(rho) = 1/rho.  The printed bound 2 rho fails near the base
# point; the standard comparison bound 2/rho always holds.

flat = ModelManifold.flat(2)
rep = square_distance_check(flat, np.eye(2), radial_samples(flat, [0.1, 0.5, 1.0, 2.0]))
for r, b, pb, sb in zip(rep.rho, rep.box_rho, rep.printed_bound, rep.standard_bound):
    print(f"rho={r:4.1f}  box rho={b:6.2f}  printed bound={pb:5.2f}  standard bound={sb:6.2f}")

# f = -1/(1+|x|^2) is bounded above by 0 and never reaches it.  Maximising
# (f - f(p) + 1) / log(rho^2 + 2)^(1/k) gives points p_k drifting to infinity.

recs = maximizing_sequence(flat, inverse_quadratic(2), np.eye(2), k_max=12)
print("\n k   rho      f(p_k)    |grad f|   box f")
for r in recs:
    print(f"{r.k:2d} {r.rho:6.3f} {r.f:10.4f} {r.grad_norm:9.4f} {r.box:8.4f}")

# k = 1 misses box f < 1; the bounds hold from k = 2 on, so a re-indexed
# subsequence satisfies all three 1/j inequalities.

v = sequence_limits(recs, 0.0)
print("\nsubsequence (j, k_j):", v.subsequence)
print("density:", round(v.density, 2), "| verdict:", v.ok)
