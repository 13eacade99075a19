"""Symmetric functions, mean curvatures and Newton transformations of a shape operator."""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from grwcurv.symfunc import (Spectrum, invariants, newton_maclaurin_check, newton_sequence,
                             trace_identities)

# A shape operator is a symmetric matrix.  Its eigenvalues are the principal
# curvatures; S_r is the r-th elementary symmetric function of them, and
# H_r = (-1)^r S_r / C(n, r) is the normalised (signed) r-th mean curvature.

A = np.diag([2.0, 3.0])
inv = invariants(np.linalg.eigvalsh(A))
print("S_r:", inv.S)
print("H_r:", inv.H)
print("b_r = (n - r) C(n, r):", inv.b)

# The Newton transformations P_r = (-1)^r S_r I + A P_{r-1} start at the
# identity and end at zero (Cayley-Hamilton).

rng = np.random.default_rng(0)
B = rng.normal(size=(4, 4))
A = 0.5 * (B + B.T)
P = newton_sequence(A)
print("\n|P_4| for a random 4x4 shape operator:", np.abs(P[4]).max())

# Their traces follow closed forms in b_r and H_r.

rep = trace_identities(A)
for row in rep.rows:
    print(f"r={row.r}: tr P_r = {row.tr_P: .6f} (closed {row.closed_P: .6f}), "
          f"tr A P_r = {row.tr_AP: .6f} (closed {row.closed_AP: .6f})")

# The Newton-Maclaurin inequalities H_r^2 >= H_{r-1} H_{r+1} hold for every
# spectrum, with equality only for umbilic points.  Rational arithmetic makes
# the equality cases exact.

v = newton_maclaurin_check(Spectrum.exact([Fraction(3, 2)] * 4))
print("\nconstant spectrum, equality cases:", v.equality_cases)
v = newton_maclaurin_check(Spectrum((1.0, 2.0, 3.0, -0.5)))
print("mixed spectrum: ok =", v.ok, "| chain:", v.chain_note or "applicable")
