"""The square operator ``f -> tr(Phi Hess f)`` with ``Phi = H_{r-1} P_{r-1}``.

Covers the operator itself, the product rule for ``L_r``, definiteness of the
Newton transformations, and the pointwise inequality
``box(e^{-h+t0}) >= C1^2 b_{r-1} e^{beta(-h+t0)}`` behind the nonexistence
results in the steady-state model.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError, RangeError
from .geometry import (
    FrameData,
    ResidualReport,
    elliptic_point_scan,
    gradient_coord,
    height_gradient,
    intrinsic_hessian,
    newton_operator,
)
from .symfunc import elem_sym_array, newton_transform_array

# chain-rule value of the <Phi grad h, grad h> coefficient in box(e^{-h+t0}),
# confirmed against finite differences by geometry.adjudicate_gradient_coefficient
ADJUDICATED_GRADIENT_COEFFICIENT = 2.0
PRINTED_GRADIENT_COEFFICIENTS = {"L_{r-1} display": 1.0, "box display": 2.0}

PSD_TOL = 1e-10
ZERO_TOL = 1e-8
AUDIT_SLACK = 1e-8
AUDIT_CASES = ("r_maximal", "positive")


@dataclass
class PhiField:
    """Per-node ON-frame matrices of a self-adjoint field, with trace bookkeeping."""

    matrices: np.ndarray        # (m, n, n)
    r: int | None = None        # order when Phi = H_{r-1} P_{r-1}
    trace: np.ndarray = None
    trace_sup: float = 0.0
    min_eig: np.ndarray = None
    eligible: bool = False
    eligibility: dict = field(default_factory=dict)

    def __post_init__(self):
        M = np.asarray(self.matrices, dtype=float)
        self.matrices = 0.5 * (M + np.swapaxes(M, -1, -2))
        self.trace = np.trace(self.matrices, axis1=-2, axis2=-1)
        self.trace_sup = float(np.max(self.trace)) if self.trace.size else 0.0
        self.min_eig = np.linalg.eigvalsh(self.matrices)[:, 0] if self.trace.size else np.zeros(0)

    @property
    def norm(self) -> np.ndarray:
        return np.max(np.abs(self.matrices), axis=(-1, -2))

    @property
    def psd(self) -> np.ndarray:
        return self.min_eig >= -PSD_TOL * np.maximum(self.norm, 1e-300)

    @classmethod
    def constant(cls, frames: FrameData, M) -> "PhiField":
        M = np.asarray(M, dtype=float)
        return cls(np.broadcast_to(M, (frames.m,) + M.shape).copy())

    @classmethod
    def diagonal(cls, frames: FrameData, diag) -> "PhiField":
        """User-supplied diagonal test field; ``diag`` is ``(n,)`` or ``(m, n)``."""
        d = np.broadcast_to(np.asarray(diag, dtype=float), (frames.m, frames.n))
        return cls(d[:, :, None] * np.eye(frames.n))


def phi_from_curvature(frames: FrameData, r: int, zero_tol: float = ZERO_TOL) -> PhiField:
    """``Phi = H_{r-1} P_{r-1}`` per node, with the semi-definiteness eligibility predicate.

    Eligible means ``H_r == 0`` on the whole patch, or ``H_r > 0`` on the
    whole patch together with a grid node where every principal curvature is
    negative.  A grid patch cannot certify the global hypothesis; the flag only
    records what the sample shows.
    """
    n = frames.n
    if not 1 <= r <= n:
        raise RangeError(f"order r={r} outside [1, {n}]")
    M = frames.H[:, r - 1, None, None] * frames.newton_on[r - 1]
    phi = PhiField(M, r=r)
    Hr = frames.H[:, r]
    vanishing = bool(np.all(np.abs(Hr) <= zero_tol))
    positive = bool(np.all(Hr > zero_tol))
    scan = elliptic_point_scan(frames)
    phi.eligibility = {
        "H_r_vanishes": vanishing,
        "H_r_positive": positive,
        "elliptic_point": scan.any_elliptic,
        "scope": "grid patch only",
    }
    phi.eligible = vanishing or (positive and scan.any_elliptic)
    return phi


@dataclass
class SquareReport:
    values: np.ndarray       # (m,)
    oracle: np.ndarray       # (m,) coordinate-frame evaluation
    residual: np.ndarray     # (m,) relative
    flags: dict

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residual)) if self.residual.size else 0.0


def square(frames: FrameData, phi: PhiField, f: np.ndarray) -> SquareReport:
    """``box f = tr(Phi Hess f)``, assembled in the ON frame.

    The oracle evaluates the same trace in the coordinate frame: as
    ``H_{r-1} tr(P_{r-1} g^{-1} Hess f)`` with ``P`` rebuilt from the
    coordinate shape operator when ``Phi`` comes from the curvature, otherwise
    by pushing ``Phi`` to coordinates.
    """
    Hc = intrinsic_hessian(frames.graph, f)
    Ht = frames.to_on(Hc)
    values = np.einsum("mij,mji->m", phi.matrices, Ht)
    ginv_hess = frames.metric.inv @ Hc  # (1,1) form of the Hessian
    if phi.r is not None:
        P = frames.newton_coord(phi.r - 1)
        oracle = frames.H[:, phi.r - 1] * np.einsum("mij,mji->m", P, ginv_hess)
    else:
        L = frames.metric.chol
        Li = frames.metric.chol_inv
        Phi_coord = np.swapaxes(Li, -1, -2) @ phi.matrices @ np.swapaxes(L, -1, -2)
        oracle = np.einsum("mij,mji->m", Phi_coord, ginv_hess)
    scale = np.einsum("mij,mij->m", np.abs(phi.matrices), np.abs(Ht))
    residual = np.abs(values - oracle) / np.maximum(scale, 1e-300)
    residual[scale == 0] = np.abs(values - oracle)[scale == 0]
    flags = {
        "phi_psd": bool(np.all(phi.psd)),
        "elliptic_point": elliptic_point_scan(frames).any_elliptic,
        "eligible": phi.eligible,
    }
    return SquareReport(values, oracle, residual, flags)


def product_rule_verify(frames: FrameData, r: int, f: np.ndarray, g: np.ndarray) -> ResidualReport:
    """``L_r(fg) - f L_r g - g L_r f - 2 <P_r grad f, grad g>`` on the grid."""
    graph = frames.graph
    lhs = newton_operator(frames, r, f * g)
    Xf = frames.vector_to_on(gradient_coord(graph, f))
    Xg = frames.vector_to_on(gradient_coord(graph, g))
    cross = np.einsum("mi,mij,mj->m", Xf, frames.newton_on[r], Xg)
    rhs = (graph.crop(f) * newton_operator(frames, r, g)
           + graph.crop(g) * newton_operator(frames, r, f) + 2.0 * cross)
    return ResidualReport(lhs, rhs, lhs - rhs, frames.points)


# ---------------------------------------------------------------------------
# definiteness


@dataclass
class DefinitenessVerdict:
    r: int
    checked: dict            # pattern -> number of nodes where its hypothesis held
    failures: list           # counterexample candidates
    ok: bool


def _sign_pattern(eigs: np.ndarray, tol: np.ndarray):
    pos = np.all(eigs > tol[:, None], axis=1)
    neg = np.all(eigs < -tol[:, None], axis=1)
    semi = np.all(eigs >= -tol[:, None], axis=1) | np.all(eigs <= tol[:, None], axis=1)
    return pos, neg, semi


def _definiteness(lam: np.ndarray, P: np.ndarray, H: np.ndarray, r: int, elliptic_exists: bool,
                  points=None, zero_tol: float = ZERO_TOL) -> DefinitenessVerdict:
    n = lam.shape[1]
    eigs = np.linalg.eigvalsh(P)
    tol = PSD_TOL * np.maximum(np.max(np.abs(P), axis=(-1, -2)), 1e-300)
    pos, neg, semi = _sign_pattern(eigs, tol)
    Hr = H[:, r]
    zero = np.abs(Hr) <= zero_tol
    nxt = np.abs(H[:, r + 1]) > zero_tol if r + 1 <= n else np.zeros_like(zero)
    checked = {"semidefinite": 0, "definite": 0, "positive_definite": 0}
    failures = []

    def fail(pattern, k):
        failures.append({
            "pattern": pattern,
            "node": None if points is None else np.asarray(points[k]).tolist(),
            "principal": lam[k].tolist(),
            "newton_eigenvalues": eigs[k].tolist(),
        })

    for k in np.flatnonzero(zero):
        checked["semidefinite"] += 1
        if not semi[k]:
            fail("semidefinite", k)
        if nxt[k]:
            checked["definite"] += 1
            if not (pos[k] or neg[k]):
                fail("definite", k)
    if np.all(Hr > zero_tol) and elliptic_exists:
        for k in range(len(Hr)):
            checked["positive_definite"] += 1
            if not pos[k]:
                fail("positive_definite", k)
    return DefinitenessVerdict(r, checked, failures, not failures)


def definiteness_audit(frames: FrameData, r: int, zero_tol: float = ZERO_TOL) -> DefinitenessVerdict:
    """Sign pattern of ``P_{r-1}`` under each curvature hypothesis, node by node."""
    if not 1 <= r <= frames.n:
        raise RangeError(f"order r={r} outside [1, {frames.n}]")
    scan = elliptic_point_scan(frames)
    return _definiteness(frames.principal, frames.newton_on[r - 1], frames.H, r,
                         scan.any_elliptic, frames.points, zero_tol)


def definiteness_from_spectra(lams, r: int, zero_tol: float = ZERO_TOL) -> DefinitenessVerdict:
    """Same audit on synthetic spectra ``(m, n)``; each spectrum is a diagonal shape operator.

    The ellipticity hypothesis is taken over the whole batch, as if the rows
    were points of one connected hypersurface.
    """
    lam = np.atleast_2d(np.asarray(lams, dtype=float))
    m, n = lam.shape
    if not 1 <= r <= n:
        raise RangeError(f"order r={r} outside [1, {n}]")
    A = lam[:, :, None] * np.eye(n)
    S = elem_sym_array(lam)
    H = np.stack([(-1.0) ** k * S[:, k] / math.comb(n, k) for k in range(n + 1)], axis=1)
    P = newton_transform_array(A, S)[r - 1]
    elliptic = bool(np.any(np.all(lam < 0, axis=1)))
    return _definiteness(lam, P, H, r, elliptic, None, zero_tol)


# ---------------------------------------------------------------------------
# the exponential inequality


@dataclass
class InequalityReport:
    case: str
    r: int
    t0: float
    C1: float
    C2: float
    beta: float
    oracle: np.ndarray            # box(e^{-h+t0}) from the discrete Hessian
    closed: np.ndarray            # box(e^{-h+t0}) from the curvature closed form
    closed_by_coefficient: dict   # printed coefficient -> closed-form values
    bound: np.ndarray             # C1^2 b_{r-1} e^{beta(-h+t0)}
    node_flags: dict              # name -> (m,) bool
    sample_flags: dict            # name -> bool
    audited: np.ndarray           # (m,) bool: every node-checkable hypothesis holds
    violations: np.ndarray        # (m,) bool
    exp_monotone: bool
    points: np.ndarray

    @property
    def vacuous(self) -> bool:
        return not bool(np.any(self.audited))

    @property
    def n_audited(self) -> int:
        return int(np.sum(self.audited))

    @property
    def n_violations(self) -> int:
        return int(np.sum(self.violations))

    @property
    def status(self) -> str:
        if self.vacuous:
            return "audit vacuous"
        return "violated" if self.n_violations else "holds"

    def closed_form_residual(self) -> dict:
        return {str(c): float(np.max(np.abs(v - self.oracle))) if v.size else 0.0
                for c, v in self.closed_by_coefficient.items()}


def box_exponential_closed_form(frames: FrameData, r: int, t0: float,
                                gradient_coefficient: float = ADJUDICATED_GRADIENT_COEFFICIENT) -> np.ndarray:
    """``e^{-h+t0}{c <Phi grad h, grad h> + b_{r-1}[H_{r-1}^2 + H_{r-1} H_r <N, d_t>]}``.

    Valid in the steady-state model, where ``(log g)' = 1``.
    """
    q = r - 1
    xi = height_gradient(frames).on
    Phi = frames.H[:, q, None, None] * frames.newton_on[q]
    quad = np.einsum("mi,mij,mj->m", xi, Phi, xi)
    Hq, Hr = frames.H[:, q], frames.H[:, r]
    E = np.exp(-frames.height + t0)
    return E * (gradient_coefficient * quad + frames.b[q] * (Hq * Hq + Hq * Hr * frames.normal_dot_dt))


def box_exponential_audit(frames: FrameData, phi: PhiField, t0: float, C1: float, beta: float,
                          C2: float = math.inf, case: str = "positive",
                          gradient_coefficient: float = ADJUDICATED_GRADIENT_COEFFICIENT,
                          slack: float = AUDIT_SLACK, zero_tol: float = ZERO_TOL) -> InequalityReport:
    """Check ``box(e^{-h+t0}) >= C1^2 b_{r-1} e^{beta(-h+t0)}`` where the hypotheses hold.

    ``case='r_maximal'``: the r-maximal case (``H_r == 0``, ``C1 <= |H_{r-1}| <= C2``,
    either orientation).  ``case='positive'``: ``H_r > 0`` with an elliptic point,
    ``C1 <= H_{r-1} <= C2`` and ``<N, d_t> >= 1``.  Both also need ``h >= t0``,
    nonnegative sectional curvature on the patch and a positive semi-definite
    ``Phi``.  Completeness is never checkable and is left to the caller's report.
    """
    if beta <= 1:
        raise PreconditionError("beta must exceed 1")
    if not C1 > 0:
        raise PreconditionError("C1 must be positive")
    if C2 < C1:
        raise PreconditionError("C2 must be at least C1")
    if phi.r is None:
        raise PreconditionError("the audit needs Phi = H_{r-1} P_{r-1}")
    if case not in AUDIT_CASES:
        raise PreconditionError(f"unknown case {case!r}; choose from {AUDIT_CASES}")
    amb = frames.graph.ambient
    if amb.name != "steady_state":
        raise PreconditionError("the exponential inequality is stated for the steady-state model")
    r = phi.r
    q = r - 1
    n = frames.n
    h = frames.height
    bq = frames.b[q]
    f = np.exp(-frames.graph.u + t0)
    oracle = square(frames, phi, f).values
    closed = box_exponential_closed_form(frames, r, t0, gradient_coefficient)
    by_coef = {c: box_exponential_closed_form(frames, r, t0, c)
               for c in sorted(set(PRINTED_GRADIENT_COEFFICIENTS.values()))}
    bound = C1 * C1 * bq * np.exp(beta * (-h + t0))

    Hq, Hr = frames.H[:, q], frames.H[:, r]
    lam = frames.principal
    prods = lam[:, :, None] * lam[:, None, :]
    iu = np.triu_indices(n, 1)
    sectional_min = np.min(1.0 - prods[:, iu[0], iu[1]], axis=1)
    scan = elliptic_point_scan(frames)
    sample = {
        "sectional_nonneg": bool(np.all(sectional_min >= -zero_tol)),
        "elliptic_point": scan.any_elliptic,
    }
    if case == "r_maximal":
        sample["r_maximal"] = bool(np.all(np.abs(Hr) <= zero_tol))
        Hbound = (np.abs(Hq) >= C1) & (np.abs(Hq) <= C2)
        orient = np.ones(frames.m, dtype=bool)
    else:
        sample["H_r_positive"] = bool(np.all(Hr > zero_tol))
        Hbound = (Hq >= C1) & (Hq <= C2)
        orient = frames.normal_dot_dt >= 1.0 - 1e-12
    node = {
        "over_slice": h >= t0 - 1e-12,
        "H_bound": Hbound,
        "orientation": orient,
        "phi_psd": phi.psd,
    }
    if case == "r_maximal":
        sample_ok = sample["r_maximal"] and sample["sectional_nonneg"]
    else:
        sample_ok = sample["H_r_positive"] and sample["elliptic_point"] and sample["sectional_nonneg"]
    audited = np.logical_and.reduce(list(node.values())) & sample_ok
    floor = -slack * bq
    violations = audited & ((oracle - bound < floor) | (closed - bound < floor))
    d = h[node["over_slice"]] - t0
    exp_monotone = bool(np.all(np.exp(-d) >= np.exp(-beta * d)))
    return InequalityReport(
        case=case, r=r, t0=float(t0), C1=float(C1), C2=float(C2), beta=float(beta),
        oracle=oracle, closed=closed, closed_by_coefficient=by_coef, bound=bound,
        node_flags=node, sample_flags=sample, audited=audited, violations=violations,
        exp_monotone=exp_monotone, points=frames.points,
    )


def report_records(report: InequalityReport, limit: int | None = None) -> list:
    """JSON-ready ``{node, values, residuals, flags}`` rows."""
    rows = []
    idx = range(len(report.oracle)) if limit is None else range(min(limit, len(report.oracle)))
    for k in idx:
        rows.append({
            "node": report.points[k].tolist(),
            "values": {
                "box_oracle": float(report.oracle[k]),
                "box_closed": float(report.closed[k]),
                "bound": float(report.bound[k]),
            },
            "residuals": {"closed_minus_oracle": float(report.closed[k] - report.oracle[k])},
            "flags": {name: bool(v[k]) for name, v in report.node_flags.items()}
            | {"audited": bool(report.audited[k]), "violated": bool(report.violations[k])},
        })
    return rows
