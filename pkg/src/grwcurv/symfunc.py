"""Elementary symmetric functions, higher-order mean curvatures and Newton transformations.

Two arithmetic modes are supported.  Float spectra and matrices are handled in
double precision; spectra whose entries are ``int`` or ``fractions.Fraction``
are handled exactly, which is what settles near-equality cases of the
Newton-Maclaurin inequalities.

Two normalisations of the mean curvatures coexist and are kept apart on purpose:

* :func:`mean_curvature` is the *signed* curvature ``H_r = (-1)^r S_r / C(n, r)``
  used for immersed hypersurfaces;
* :func:`normalized_sym` is the *unsigned* mean ``S_r / C(n, r)`` used by the
  Newton-Maclaurin inequalities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np

from .errors import NumericError, RangeError

MAX_DIM = 16

IDENTITY_RTOL = 1e-9
SPECTRAL_RTOL = 1e-12
EQUALITY_RTOL = 1e-10


def _is_exact(x) -> bool:
    return isinstance(x, Rational) and not isinstance(x, bool)


@dataclass(frozen=True)
class Spectrum:
    """Principal curvatures ``lambda_1..lambda_n`` at one point."""

    values: tuple

    def __post_init__(self):
        vals = tuple(self.values)
        if len(vals) < 1:
            raise RangeError("a spectrum needs at least one value")
        if len(vals) > MAX_DIM:
            raise RangeError(f"dimension {len(vals)} exceeds the cap {MAX_DIM}")
        if all(_is_exact(v) for v in vals):
            vals = tuple(Fraction(v) for v in vals)
        else:
            vals = tuple(float(v) for v in vals)
            if not all(math.isfinite(v) for v in vals):
                raise ValueError("spectrum entries must be finite")
        object.__setattr__(self, "values", vals)

    @classmethod
    def exact(cls, values) -> "Spectrum":
        """Build a rational spectrum; floats are converted exactly via ``Fraction``."""
        return cls(tuple(Fraction(v) for v in values))

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def is_exact(self) -> bool:
        return isinstance(self.values[0], Fraction)

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


@dataclass(frozen=True)
class CurvatureInvariants:
    """``S_0..S_n``, signed ``H_0..H_n`` and ``b_0..b_{n-1}`` for one spectrum."""

    S: tuple
    H: tuple
    b: tuple


def _as_spectrum(spec) -> Spectrum:
    return spec if isinstance(spec, Spectrum) else Spectrum(tuple(spec))


def elem_sym_all(values) -> list:
    """All elementary symmetric functions ``[S_0, ..., S_n]`` of ``values``.

    Prefix recurrence: after absorbing ``lambda_k`` the table holds the
    symmetric functions of ``lambda_1..lambda_k``.
    """
    vals = list(values)
    zero = Fraction(0) if vals and isinstance(vals[0], Fraction) else 0.0
    e = [zero + 1] + [zero] * len(vals)
    for k, lam in enumerate(vals, start=1):
        for j in range(k, 0, -1):
            e[j] = e[j] + lam * e[j - 1]
    return e


def elem_sym_array(lams: np.ndarray) -> np.ndarray:
    """Vectorised prefix recurrence: ``(..., n)`` eigenvalues to ``(..., n+1)`` values of ``S_r``."""
    lams = np.asarray(lams, dtype=float)
    n = lams.shape[-1]
    e = np.zeros(lams.shape[:-1] + (n + 1,))
    e[..., 0] = 1.0
    for k in range(n):
        lam = lams[..., k]
        for j in range(k + 1, 0, -1):
            e[..., j] = e[..., j] + lam * e[..., j - 1]
    return e


def elem_sym(spec, r: int):
    """``S_r`` of the spectrum (``S_0 = 1``)."""
    spec = _as_spectrum(spec)
    if not 0 <= r <= spec.n:
        raise RangeError(f"order r={r} outside [0, {spec.n}]")
    # recurrence truncated at order r: O(n r)
    zero = Fraction(0) if spec.is_exact else 0.0
    e = [zero + 1] + [zero] * r
    for k, lam in enumerate(spec.values, start=1):
        for j in range(min(k, r), 0, -1):
            e[j] = e[j] + lam * e[j - 1]
    return e[r]


def b_coefficient(n: int, r: int) -> int:
    """``b_r = (n - r) C(n, r)``, the trace of the r-th Newton transformation of the identity."""
    if not 0 <= r <= n:
        raise RangeError(f"order r={r} outside [0, {n}]")
    return (n - r) * math.comb(n, r)


def mean_curvature(spec, r: int):
    """Signed r-th mean curvature ``H_r = (-1)^r S_r / C(n, r)``."""
    spec = _as_spectrum(spec)
    s = elem_sym(spec, r)
    c = math.comb(spec.n, r)
    sign = -1 if r % 2 else 1
    if spec.is_exact:
        return sign * s / c
    return sign * s / float(c)


def normalized_sym(spec, r: int):
    """Unsigned normalised symmetric function ``S_r / C(n, r)`` (Newton-Maclaurin convention)."""
    spec = _as_spectrum(spec)
    s = elem_sym(spec, r)
    c = math.comb(spec.n, r)
    return s / c if spec.is_exact else s / float(c)


def invariants(spec) -> CurvatureInvariants:
    spec = _as_spectrum(spec)
    n = spec.n
    S = elem_sym_all(spec.values)
    H = []
    for r in range(n + 1):
        c = math.comb(n, r)
        h = S[r] / c if spec.is_exact else S[r] / float(c)
        H.append(-h if r % 2 else h)
    b = tuple(b_coefficient(n, r) for r in range(n))
    return CurvatureInvariants(tuple(S), tuple(H), b)


def restricted_sym(spec, i: int, r: int):
    """``S_r(A_i)``: symmetric function of the spectrum with ``lambda_i`` removed (``i`` is 1-based)."""
    spec = _as_spectrum(spec)
    n = spec.n
    if not 1 <= i <= n:
        raise RangeError(f"index i={i} outside [1, {n}]")
    if not 0 <= r <= n - 1:
        raise RangeError(f"order r={r} outside [0, {n - 1}]")
    rest = spec.values[: i - 1] + spec.values[i:]
    if not rest:
        return Fraction(1) if spec.is_exact else 1.0
    return elem_sym(Spectrum(rest), r)


# ---------------------------------------------------------------------------
# Newton transformations


def _check_symmetric(A) -> np.ndarray:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    n = A.shape[0]
    if n < 1 or n > MAX_DIM:
        raise RangeError(f"dimension {n} outside [1, {MAX_DIM}]")
    if A.dtype != object and not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    if not np.array_equal(A, A.T):
        raise ValueError("matrix is not symmetric")
    return A


def _is_exact_matrix(A: np.ndarray) -> bool:
    return A.dtype == object and all(_is_exact(x) for x in A.flat)


def exact_matrix(rows) -> np.ndarray:
    """Object array of ``Fraction`` entries, for exact-mode Newton transformations."""
    return np.array([[Fraction(x) for x in row] for row in rows], dtype=object)


def matrix_sym_functions(A) -> list:
    """``[S_0..S_n]`` of a symmetric matrix.

    Float matrices go through the symmetric eigen-solver.  Exact matrices use
    the Faddeev-LeVerrier recursion ``S_r = (-1)^(r-1) tr(A P_{r-1}) / r``,
    which never leaves the rationals.
    """
    A = _check_symmetric(A)
    n = A.shape[0]
    if _is_exact_matrix(A):
        S = [Fraction(1)]
        P = _exact_identity(n)
        for r in range(1, n + 1):
            AP = A.dot(P)
            s = Fraction((-1) ** (r - 1)) * _trace(AP) / r
            S.append(s)
            P = _exact_identity(n) * ((-1) ** r * s) + AP
        return S
    try:
        lam = np.linalg.eigvalsh(np.asarray(A, dtype=float))
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigenvalue solver failed: {exc}") from exc
    return list(elem_sym_all(lam.tolist()))


def _exact_identity(n):
    I = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            I[i, j] = Fraction(int(i == j))
    return I


def _trace(M):
    return sum(M[i, i] for i in range(M.shape[0]))


def newton_sequence(A, S=None) -> list:
    """``[P_0, ..., P_n]`` via ``P_r = (-1)^r S_r I + A P_{r-1}``."""
    A = _check_symmetric(A)
    n = A.shape[0]
    exact = _is_exact_matrix(A)
    if S is None:
        S = matrix_sym_functions(A)
    I = _exact_identity(n) if exact else np.eye(n)
    if not exact:
        A = np.asarray(A, dtype=float)
    P = [I]
    for r in range(1, n + 1):
        sign = -1 if r % 2 else 1
        P.append(I * (sign * S[r]) + A.dot(P[-1]))
    return P


def newton_transform(A, r: int) -> np.ndarray:
    """The r-th Newton transformation of the symmetric matrix ``A``."""
    A = _check_symmetric(A)
    n = A.shape[0]
    if not 0 <= r <= n:
        raise RangeError(f"order r={r} outside [0, {n}]")
    return newton_sequence(A)[r]


def newton_expanded(A, r: int, S=None) -> np.ndarray:
    """``(-1)^r sum_k (-1)^k S_{r-k} A^k``; the closed polynomial form of ``P_r``."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if S is None:
        S = matrix_sym_functions(A)
    out = np.zeros((n, n))
    Ak = np.eye(n)
    for k in range(r + 1):
        out += (-1) ** k * S[r - k] * Ak
        Ak = Ak @ A
    return (-1) ** r * out


def newton_transform_array(A: np.ndarray, S: np.ndarray) -> np.ndarray:
    """Batched recurrence: ``A`` of shape ``(m, n, n)``, ``S`` of shape ``(m, n+1)``.

    Returns ``P`` of shape ``(n+1, m, n, n)``.
    """
    m, n, _ = A.shape
    P = np.empty((n + 1, m, n, n))
    eye = np.eye(n)
    P[0] = eye
    for r in range(1, n + 1):
        sign = -1.0 if r % 2 else 1.0
        P[r] = sign * S[:, r, None, None] * eye + A @ P[r - 1]
    return P


# ---------------------------------------------------------------------------
# trace identities


@dataclass
class TraceRow:
    r: int
    tr_P: float
    tr_AP: float
    tr_A2P: float
    closed_P: float
    closed_AP: float
    closed_A2P: float
    rel_P: float
    rel_AP: float
    rel_A2P: float


@dataclass
class TraceReport:
    n: int
    rows: list
    pn_norm: float
    pn_bound: float
    expanded_rel: float

    @property
    def worst(self) -> float:
        return max([0.0] + [max(x.rel_P, x.rel_AP, x.rel_A2P) for x in self.rows])

    def passed(self, rtol: float = IDENTITY_RTOL) -> bool:
        return self.worst <= rtol and self.pn_norm <= self.pn_bound and self.expanded_rel <= rtol


def _rel(a, b, mag) -> float:
    d = abs(a - b)
    den = max(abs(a), abs(b), mag)
    if d == 0:
        return 0.0
    return float(d / den)


def trace_identities(A, *, fault: bool = False) -> TraceReport:
    """Compare ``tr(P_r)``, ``tr(A P_r)`` and ``tr(A^2 P_r)`` with their closed forms.

    ``fault=True`` flips the sign of the ``tr(A P_r)`` closed form; it exists
    so the identity harness can prove it detects a broken formula.
    """
    A = np.asarray(_check_symmetric(A), dtype=float)
    n = A.shape[0]
    try:
        lam = np.linalg.eigvalsh(A)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigenvalue solver failed: {exc}") from exc
    S = elem_sym_all(lam.tolist()) + [0.0, 0.0]
    Sabs = elem_sym_all(np.abs(lam).tolist()) + [0.0, 0.0]
    inv = invariants(Spectrum(tuple(lam)))
    H = list(inv.H) + [0.0]
    P = newton_sequence(A, S[: n + 1])
    A2 = A @ A
    rho = float(np.max(np.abs(lam)))
    # size of the terms summed in the polynomial form of P_r
    mag = [sum(Sabs[r - k] * rho ** k for k in range(r + 1)) for r in range(n + 1)]
    rows = []
    for r in range(n):
        b = b_coefficient(n, r)
        sign = -1 if r % 2 else 1
        tP = float(np.trace(P[r]))
        tAP = float(np.trace(A @ P[r]))
        tA2P = float(np.trace(A2 @ P[r]))
        cP = b * H[r]
        cAP = (1 if fault else -1) * b * H[r + 1]
        cA2P = sign * (S[1] * S[r + 1] - (r + 2) * S[r + 2])
        rows.append(TraceRow(
            r, tP, tAP, tA2P, cP, cAP, cA2P,
            _rel(tP, cP, n * mag[r]),
            _rel(tAP, cAP, n * rho * mag[r]),
            _rel(tA2P, cA2P, n * rho * rho * mag[r]),
        ))
    norm_inf = float(np.max(np.sum(np.abs(A), axis=1)))
    pn_norm = float(np.max(np.abs(P[n])))
    pn_bound = 1e-8 * max(norm_inf, 1e-300) ** n
    expanded = 0.0
    for r in range(n + 1):
        E = newton_expanded(A, r, S[: n + 1])
        scale = max(float(np.max(np.abs(E))), float(np.max(np.abs(P[r]))), mag[r])
        if scale > 0:
            expanded = max(expanded, float(np.max(np.abs(E - P[r]))) / scale)
    return TraceReport(n, rows, pn_norm, pn_bound, expanded)


# ---------------------------------------------------------------------------
# Newton-Maclaurin inequalities


@dataclass
class MaclaurinVerdict:
    n: int
    exact: bool
    ok: bool = True
    worst_gap: float = 0.0
    violations: list = field(default_factory=list)
    equality_cases: list = field(default_factory=list)
    unresolved: list = field(default_factory=list)
    chain_applicable: bool = False
    chain_note: str = ""
    vanishing: list = field(default_factory=list)


def _all_equal(vals, exact: bool) -> bool:
    if exact:
        return all(v == vals[0] for v in vals)
    spread = max(vals) - min(vals)
    return spread <= 1e-4 * max(1.0, max(abs(v) for v in vals))


def newton_maclaurin_check(spec, r_max: int | None = None) -> MaclaurinVerdict:
    """Check the Newton-Maclaurin inequalities and their equality/vanishing clauses.

    Works with the unsigned means ``S_r / C(n, r)``.  In exact mode equality is
    decided by ``==``; in float mode by ``|gap| <= 1e-10`` times the same
    products formed from ``|lambda|``, and a
    float equality whose spectrum is not visibly constant is logged under
    ``unresolved`` rather than counted as a violation.
    """
    spec = _as_spectrum(spec)
    n = spec.n
    exact = spec.is_exact
    if r_max is None:
        r_max = n
    r_max = min(r_max, n)
    v = MaclaurinVerdict(n=n, exact=exact)
    lam = spec.values
    lam_max = max(abs(x) for x in lam)
    if not exact and lam_max > 0:
        # every clause is homogeneous; rescaling keeps tiny or huge spectra out of under/overflow
        lam = tuple(x / lam_max for x in lam)
        lam_max = max(abs(x) for x in lam)
    S = elem_sym_all(lam)
    H = [S[r] / (math.comb(n, r) if exact else float(math.comb(n, r))) for r in range(n + 1)]

    def is_zero(x, r):
        if exact:
            return x == 0
        return abs(x) <= SPECTRAL_RTOL * max(lam_max, 1e-300) ** r

    if not exact:
        Sa = elem_sym_all([abs(x) for x in lam])
        Ha = [Sa[r] / math.comb(n, r) for r in range(n + 1)]

    # (a)
    for r in range(1, min(r_max, n - 1) + 1):
        gap = H[r] * H[r] - H[r - 1] * H[r + 1]
        # the same means of |lambda| bound both products in the gap
        scale = 0 if exact else Ha[r] * Ha[r] + Ha[r - 1] * Ha[r + 1]
        if exact:
            neg = gap < 0
            equal = gap == 0
        else:
            neg = gap < -SPECTRAL_RTOL * scale
            equal = abs(gap) <= EQUALITY_RTOL * scale
            v.worst_gap = min(v.worst_gap, float(gap) / scale if scale > 0 else 0.0)
        if neg:
            v.violations.append(("a", r, float(gap)))
        if equal and (r == 1 or not is_zero(H[r + 1], r + 1)):
            v.equality_cases.append(("a", r))
            if not _all_equal(lam, exact):
                (v.violations if exact else v.unresolved).append(("a-equality", r, float(gap)))

    # (b): chain H_1 >= H_2^(1/2) >= ... >= H_r^(1/r)
    pos = 0
    for r in range(1, r_max + 1):
        if (H[r] > 0) if exact else (H[r] > 0 and not is_zero(H[r], r)):
            pos = r
        else:
            break
    if pos >= 2:
        v.chain_applicable = True
        for j in range(1, pos):
            # H_j^(1/j) >= H_{j+1}^(1/(j+1))  <=>  H_j^(j+1) >= H_{j+1}^j
            if exact:
                lhs, rhs = H[j] ** (j + 1), H[j + 1] ** j
                neg, equal = lhs < rhs, lhs == rhs
            else:
                d = math.log(H[j]) / j - math.log(H[j + 1]) / (j + 1)
                neg = d < -SPECTRAL_RTOL * 10
                equal = abs(d) <= EQUALITY_RTOL
            if neg:
                v.violations.append(("b", j, None))
            if equal:
                v.equality_cases.append(("b", j))
                if not _all_equal(lam, exact):
                    (v.violations if exact else v.unresolved).append(("b-equality", j, None))
    else:
        v.chain_note = "chain not applicable"

    # (c)
    for r in range(1, n):
        if is_zero(H[r], r) and is_zero(H[r + 1], r + 1):
            tail_zero = all(is_zero(H[j], j) for j in range(r, n + 1))
            nonzero = sum(1 for x in lam if (x != 0 if exact else abs(x) > 1e-8 * max(lam_max, 1e-300)))
            v.vanishing.append((r, tail_zero, nonzero))
            if not tail_zero or nonzero > r - 1:
                # in floating point "zero" is a threshold, so only exact mode can refute
                (v.violations if exact else v.unresolved).append(("c", r, nonzero))
            break

    v.ok = not v.violations
    return v


# ---------------------------------------------------------------------------
# Gauss equation data


@dataclass
class GaussReport:
    n: int
    c: object
    scalar_curvature: object
    sectional: dict
    sectional_sum: object
    identity_residual: object

    @property
    def min_sectional(self):
        return min(self.sectional.values())


def gauss_curvature_data(spec, c) -> GaussReport:
    """Scalar curvature ``n(n-1)(c - H_2)``, pairwise ``c - lambda_i lambda_j`` and ``2S_2 + |A|^2 - S_1^2``."""
    spec = _as_spectrum(spec)
    n = spec.n
    if n < 2:
        raise RangeError("Gauss-equation data need n >= 2")
    lam = spec.values
    if spec.is_exact and _is_exact(c):
        c = Fraction(c)
    else:
        c = float(c)
    H2 = mean_curvature(spec, 2)
    R = n * (n - 1) * (c - H2)
    K = {(i + 1, j + 1): c - lam[i] * lam[j] for i in range(n) for j in range(i + 1, n)}
    ksum = 2 * sum(K.values())
    S1 = elem_sym(spec, 1)
    S2 = elem_sym(spec, 2)
    resid = 2 * S2 + sum(x * x for x in lam) - S1 * S1
    return GaussReport(n, c, R, K, ksum, resid)
