"""Maximum principle for the square operator, exercised on model spaces.

Points of a model are written in geodesic normal coordinates ``z`` centred at
the base point ``p``: ``rho(z) = |z|``.  In those coordinates the metric is
``dr^2 + sn(r)^2 dtheta^2``; the orthonormal frame used throughout consists of
the radial unit vector and the angular directions rescaled by ``r / sn(r)``.
Hessians and ``Phi`` are given by their components in that frame.

Two radial comparison quantities are carried side by side.  The one that
multiplies ``s_c(t)`` (printed with a ``1/t`` factor) by its derivative is
kept verbatim as ``printed_bound``; ``standard_bound`` is the logarithmic
derivative ``sn_c'/sn_c`` of the usual comparison function, which is what the
Hessian comparison theorem actually gives.  On flat space the first is ``t``
and the second ``1/t``; they disagree for every ``t < 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from scipy.optimize import minimize

from .errors import PreconditionError, RangeError

SERIES_CUTOFF = 1e-3


class ComparisonValues(NamedTuple):
    s: float
    ds: float
    printed_bound: float
    standard_bound: float


def comparison_functions(t: float, c: float) -> ComparisonValues:
    """``s_c(t)`` as printed, its derivative, ``s_c' s_c`` and ``sn_c'(t)/sn_c(t)``."""
    t = float(t)
    if not t > 0:
        raise RangeError("comparison functions need t > 0")
    if c > 0 and t > math.pi / math.sqrt(c) * (1 + 1e-15):
        raise RangeError("t beyond the first conjugate point pi/sqrt(c)")
    if c == 0:
        s, ds, std = t, 1.0, 1.0 / t
    else:
        a = math.sqrt(abs(c))
        x = a * t
        if c < 0:
            if x < SERIES_CUTOFF:
                s = 1 + x * x / 6 + x ** 4 / 120
                ds = a * (x / 3 + x ** 3 / 30 + x ** 5 / 840)
            else:
                s = math.sinh(x) / x
                ds = a * (x * math.cosh(x) - math.sinh(x)) / (x * x)
            std = a / math.tanh(x)
        else:
            if x < SERIES_CUTOFF:
                s = 1 - x * x / 6 + x ** 4 / 120
                ds = a * (-x / 3 + x ** 3 / 30 - x ** 5 / 840)
            else:
                s = math.sin(x) / x
                ds = a * (x * math.cos(x) - math.sin(x)) / (x * x)
            std = a * math.cos(x) / math.sin(x)
    return ComparisonValues(s, ds, ds * s, std)


@dataclass(frozen=True)
class ModelManifold:
    """Flat space (``c = 0``), round sphere (``c > 0``) or hyperbolic space (``c < 0``)."""

    kind: str
    n: int
    c: float = 0.0

    def __post_init__(self):
        if self.kind not in ("flat", "sphere", "hyperbolic"):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.n < 1:
            raise RangeError("dimension must be positive")
        sign = {"flat": 0, "sphere": 1, "hyperbolic": -1}[self.kind]
        if (self.c > 0) - (self.c < 0) != sign:
            raise ValueError(f"curvature {self.c} inconsistent with a {self.kind} model")

    @classmethod
    def flat(cls, n: int) -> "ModelManifold":
        return cls("flat", n, 0.0)

    @classmethod
    def sphere(cls, n: int, c: float = 1.0) -> "ModelManifold":
        return cls("sphere", n, c)

    @classmethod
    def hyperbolic(cls, n: int, c: float = -1.0) -> "ModelManifold":
        return cls("hyperbolic", n, c)

    @property
    def max_radius(self) -> float:
        """Injectivity radius at the base point (the cut locus is empty when infinite)."""
        return math.pi / math.sqrt(self.c) if self.c > 0 else math.inf

    def sn(self, t):
        t = np.asarray(t, dtype=float)
        if self.c == 0:
            return t
        a = math.sqrt(abs(self.c))
        return np.sin(a * t) / a if self.c > 0 else np.sinh(a * t) / a

    def dsn(self, t):
        t = np.asarray(t, dtype=float)
        if self.c == 0:
            return np.ones_like(t)
        a = math.sqrt(abs(self.c))
        return np.cos(a * t) if self.c > 0 else np.cosh(a * t)

    def log_dsn(self, t):
        """``sn'/sn``: the nonzero eigenvalue of ``Hess rho`` at distance ``t``."""
        return self.dsn(t) / self.sn(t)

    def rho(self, z) -> float:
        return float(np.linalg.norm(z))

    def frame(self, z) -> np.ndarray:
        """Columns: the orthonormal frame at ``z`` in normal-coordinate components."""
        z = np.asarray(z, dtype=float)
        r = np.linalg.norm(z)
        if self.c == 0 or r == 0:
            return np.eye(self.n)
        e = z / r
        radial = np.outer(e, e)
        return radial + (r / float(self.sn(r))) * (np.eye(self.n) - radial)

    def hess_rho(self, z) -> np.ndarray:
        """ON-frame ``Hess rho`` at ``z != 0``: ``(sn'/sn)(I - e e^T)``."""
        z = np.asarray(z, dtype=float)
        r = np.linalg.norm(z)
        if r == 0:
            raise RangeError("rho is not differentiable at the base point")
        e = z / r
        return float(self.log_dsn(r)) * (np.eye(self.n) - np.outer(e, e))

    def hess_rho_embedded(self, z, w) -> float:
        """``Hess rho(w, w)`` from the model's standard embedding, independent of ``sn``.

        ``w`` is given in ON-frame components at ``z``.  The sphere sits in
        ``R^{n+1}`` with radius ``1/sqrt(c)``, hyperbolic space on the
        hyperboloid of Minkowski space; along a geodesic ``gamma`` with
        ``gamma' = w`` one has ``(rho o gamma)'' = D^2 rho(w, w) + D rho . gamma''``.
        """
        z = np.asarray(z, dtype=float)
        w = np.asarray(w, dtype=float)
        n = self.n
        r = np.linalg.norm(z)
        e = z / r
        if self.c == 0:
            # rho(x) = |x|; D^2 rho = (I - e e^T)/|x|
            return float((w @ w - (e @ w) ** 2) / r)
        R = 1.0 / math.sqrt(abs(self.c))
        # ON frame -> ambient vectors: radial e gets the radial tangent,
        # angular directions are the unit vectors themselves
        wr = e @ w
        wa = w - wr * e
        p = np.zeros(n + 1)
        p[0] = R
        ez = np.concatenate([[0.0], e])
        wa_amb = np.concatenate([[0.0], wa])
        if self.c > 0:
            x = math.cos(r / R) * p + R * math.sin(r / R) * ez
            radial = -math.sin(r / R) * p / R + math.cos(r / R) * ez
            v = wr * radial + wa_amb
            s = (x @ p) / R ** 2
            Drho = -R / math.sqrt(1 - s * s) * p / R ** 2
            D2 = -R * s / (1 - s * s) ** 1.5 * np.outer(p, p) / R ** 4
            # gamma'' = -|v|^2 x / R^2 on the sphere
            return float(v @ D2 @ v - (v @ v) / R ** 2 * (Drho @ x))
        J = np.diag([-1.0] + [1.0] * n)
        x = math.cosh(r / R) * p + R * math.sinh(r / R) * ez
        radial = math.sinh(r / R) * p / R + math.cosh(r / R) * ez
        v = wr * radial + wa_amb
        s = -(x @ J @ p) / R ** 2
        # rho = R arccosh(s), s = -<x, p>_L / R^2; Euclidean derivatives in x
        ds_dx = -(J @ p) / R ** 2
        Drho = R / math.sqrt(s * s - 1) * ds_dx
        D2 = -R * s / (s * s - 1) ** 1.5 * np.outer(ds_dx, ds_dx)
        vv = v @ J @ v
        # gamma'' = <v, v>_L x / R^2 on the hyperboloid
        return float(v @ D2 @ v + vv / R ** 2 * (Drho @ x))


def _check_psd(Phi: np.ndarray):
    Phi = np.asarray(Phi, dtype=float)
    if not np.allclose(Phi, Phi.T, atol=0, rtol=1e-12):
        raise PreconditionError("Phi must be symmetric")
    ev = np.linalg.eigvalsh(Phi)
    if ev.size and ev[0] < -1e-12 * max(1.0, float(np.max(np.abs(ev)))):
        raise PreconditionError("Phi must be positive semi-definite")
    return Phi


# ---------------------------------------------------------------------------
# the distance-function bound


@dataclass
class DistanceBoundReport:
    rho: np.ndarray
    box_rho: np.ndarray
    printed_bound: np.ndarray      # s_c' s_c tr(Phi)
    standard_bound: np.ndarray   # (sn'/sn) tr(Phi)
    printed_holds: np.ndarray
    standard_holds: np.ndarray

    @property
    def printed_violations(self) -> np.ndarray:
        return self.rho[~self.printed_holds]


def radial_samples(model: ModelManifold, radii, direction=None) -> np.ndarray:
    d = np.zeros(model.n)
    d[0] = 1.0
    if direction is not None:
        d = np.asarray(direction, dtype=float)
        d = d / np.linalg.norm(d)
    return np.asarray(radii, dtype=float)[:, None] * d


def square_distance_check(model: ModelManifold, Phi, samples, tol: float = 1e-12) -> DistanceBoundReport:
    """``box rho`` at each sample against the printed and the standard bound.

    ``Phi`` is a constant ON-frame matrix; samples are normal-coordinate points
    with ``0 < rho``, and ``rho < pi/sqrt(c)`` on the sphere.
    """
    Phi = _check_psd(Phi)
    pts = np.atleast_2d(np.asarray(samples, dtype=float))
    tr = float(np.trace(Phi))
    rho, box, pb, sb = [], [], [], []
    for z in pts:
        r = model.rho(z)
        if r <= 0 or r >= model.max_radius:
            raise PreconditionError(f"sample at distance {r} outside (0, {model.max_radius})")
        cv = comparison_functions(r, model.c)
        rho.append(r)
        box.append(float(np.trace(Phi @ model.hess_rho(z))))
        pb.append(cv.printed_bound * tr)
        sb.append(cv.standard_bound * tr)
    rho, box, pb, sb = map(np.asarray, (rho, box, pb, sb))
    slack = tol * np.maximum(1.0, np.abs(box))
    return DistanceBoundReport(rho, box, pb, sb, box <= pb + slack, box <= sb + slack)


@dataclass
class ComparisonCheck:
    radii: np.ndarray
    hess_ww: np.ndarray          # embedded Hess rho(w, w), unit w normal to grad rho
    standard: np.ndarray         # sn'/sn
    radial: np.ndarray           # embedded Hess rho(grad rho, grad rho)
    max_excess: float            # max(hess_ww - standard), <= 0 up to rounding

    def holds(self, rtol: float = 1e-9) -> bool:
        scale = np.maximum(1.0, np.abs(self.standard))
        return bool(np.all(self.hess_ww - self.standard <= rtol * scale)
                    and np.all(np.abs(self.radial) <= rtol * scale))


def hessian_comparison_check(model: ModelManifold, radii, seed: int = 0) -> ComparisonCheck:
    """Embedded ``Hess rho(w, w)`` for random unit ``w`` orthogonal to ``grad rho`` versus ``sn'/sn``."""
    if model.n < 2:
        raise RangeError("need n >= 2 for directions orthogonal to grad rho")
    rng = np.random.default_rng(seed)
    radii = np.asarray(radii, dtype=float)
    hw, st, rad = [], [], []
    for r in radii:
        e = rng.normal(size=model.n)
        e /= np.linalg.norm(e)
        w = rng.normal(size=model.n)
        w -= (w @ e) * e
        w /= np.linalg.norm(w)
        z = r * e
        hw.append(model.hess_rho_embedded(z, w))
        rad.append(model.hess_rho_embedded(z, e))
        st.append(float(model.log_dsn(r)))
    hw, st, rad = map(np.asarray, (hw, st, rad))
    return ComparisonCheck(radii, hw, st, rad, float(np.max(hw - st)))


# ---------------------------------------------------------------------------
# test functions and the maximising sequence


@dataclass
class TestFunction:
    """Smooth function in normal coordinates with analytic derivatives.

    ``grad`` returns the coordinate differential, ``hess`` the ON-frame
    Hessian.  Construction cross-checks ``grad`` against central differences.
    """

    __test__ = False  # not a pytest class

    value: Callable
    grad: Callable
    hess: Callable
    sup: float | None = None
    inf: float | None = None
    name: str = "f"
    check_points: np.ndarray | None = None

    def __post_init__(self):
        pts = self.check_points
        if pts is None:
            return
        for z in np.atleast_2d(pts):
            z = np.asarray(z, dtype=float)
            g = np.asarray(self.grad(z), dtype=float)
            h = 1e-5
            fdg = np.array([(self.value(z + h * e) - self.value(z - h * e)) / (2 * h)
                            for e in np.eye(len(z))])
            if not np.allclose(g, fdg, rtol=1e-6, atol=1e-6):
                raise ValueError(f"{self.name}: gradient callback disagrees with finite differences at {z}")

    @property
    def bounded_above(self) -> bool:
        return self.sup is not None

    def negated(self) -> "TestFunction":
        return TestFunction(
            lambda z: -self.value(z),
            lambda z: -np.asarray(self.grad(z)),
            lambda z: -np.asarray(self.hess(z)),
            sup=None if self.inf is None else -self.inf,
            inf=None if self.sup is None else -self.sup,
            name=f"-{self.name}",
        )


def flat_function(value, grad, hess, sup=None, inf=None, name="f", n=2, seed=0) -> TestFunction:
    """Test function on flat space (Cartesian = normal coordinates); Hessian also FD-checked."""
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(4, n))
    for z in pts:
        H = np.asarray(hess(z), dtype=float)
        h = 1e-5
        fdH = np.array([(np.asarray(grad(z + h * e)) - np.asarray(grad(z - h * e))) / (2 * h)
                        for e in np.eye(n)])
        if not np.allclose(H, fdH, rtol=1e-6, atol=1e-6):
            raise ValueError(f"{name}: Hessian callback disagrees with finite differences at {z}")
    return TestFunction(value, grad, hess, sup, inf, name, pts)


def inverse_quadratic(n: int = 2, center=None, scale: float = 1.0) -> TestFunction:
    """``-1/(1 + |x - q|^2)`` on flat space: supremum 0, never attained when ``scale=1``... at infinity."""
    q = np.zeros(n) if center is None else np.asarray(center, dtype=float)

    def value(z):
        d = np.asarray(z) - q
        return -scale / (1.0 + d @ d)

    def grad(z):
        d = np.asarray(z) - q
        return scale * 2.0 * d / (1.0 + d @ d) ** 2

    def hess(z):
        d = np.asarray(z) - q
        s = 1.0 + d @ d
        return scale * (2.0 * np.eye(n) / s ** 2 - 8.0 * np.outer(d, d) / s ** 3)

    return flat_function(value, grad, hess, sup=0.0, inf=-scale, name="inverse_quadratic", n=n)


def gaussian_peak(n: int = 2, center=None, height: float = 1.0, width: float = 1.0) -> TestFunction:
    """``height * exp(-|x - q|^2 / width^2)``; maximum attained at ``q``."""
    q = np.zeros(n) if center is None else np.asarray(center, dtype=float)
    w2 = width * width

    def value(z):
        d = np.asarray(z) - q
        return height * math.exp(-(d @ d) / w2)

    def grad(z):
        d = np.asarray(z) - q
        return value(z) * (-2.0 * d / w2)

    def hess(z):
        d = np.asarray(z) - q
        return value(z) * (4.0 * np.outer(d, d) / w2 ** 2 - 2.0 * np.eye(n) / w2)

    return flat_function(value, grad, hess, sup=height, inf=0.0, name="gaussian_peak", n=n)


def constant_function(n: int = 2, value: float = 0.0) -> TestFunction:
    return TestFunction(lambda z: value, lambda z: np.zeros(n), lambda z: np.zeros((n, n)),
                        sup=value, inf=value, name="constant", check_points=np.zeros((1, n)))


def radial_function(model: ModelManifold, F, dF, d2F, sup=None, inf=None, name="radial") -> TestFunction:
    """``F(rho)`` on any model; Hessian ``F'' e e^T + F' Hess rho`` in the ON frame."""
    n = model.n

    def value(z):
        return F(np.linalg.norm(z))

    def grad(z):
        z = np.asarray(z, dtype=float)
        r = np.linalg.norm(z)
        return np.zeros(n) if r == 0 else dF(r) * z / r

    def hess(z):
        z = np.asarray(z, dtype=float)
        r = np.linalg.norm(z)
        if r == 0:
            return d2F(0.0) * np.eye(n)
        e = z / r
        return d2F(r) * np.outer(e, e) + dF(r) * model.hess_rho(z)

    rng = np.random.default_rng(1)
    pts = rng.normal(size=(3, n)) * 0.5
    return TestFunction(value, grad, hess, sup, inf, name, pts)


@dataclass
class SequenceRecord:
    k: int
    point: list
    rho: float
    f: float
    grad_norm: float
    box: float
    rhs_gradient: float
    rhs_square: float            # printed bound, K = s_c' s_c tr(Phi)
    rhs_square_standard: float   # same bound with K = (sn'/sn) tr(Phi)
    gradient_rel_error: float
    square_bound_holds: bool
    square_bound_printed_holds: bool
    resolved: bool = True
    search_radius: float = 0.0
    note: str = ""


def _phi_at(phi, z):
    return np.asarray(phi(z) if callable(phi) else phi, dtype=float)


def _aux(model, f: TestFunction, f_p, k, z):
    """``g_k(z) = (f(z) - f(p) + 1) / log(rho^2 + 2)^(1/k)`` and its coordinate gradient."""
    z = np.asarray(z, dtype=float)
    r2 = z @ z
    L = math.log(r2 + 2.0)
    F = f.value(z) - f_p + 1.0
    D = L ** (1.0 / k)
    val = F / D
    grad = np.asarray(f.grad(z), dtype=float) / D - F * (2.0 * z) / (k * (r2 + 2.0) * L * D)
    return val, grad


def _polish(fun_grad, z, iters=30, tol=1e-15):
    """Newton on the gradient, Jacobian by central differences of the analytic gradient."""
    z = np.array(z, dtype=float)
    n = len(z)
    for _ in range(iters):
        g = fun_grad(z)[1]
        gn = np.linalg.norm(g)
        if gn <= tol:
            break
        h = 1e-6 * max(1.0, np.linalg.norm(z))
        J = np.empty((n, n))
        for i in range(n):
            e = np.zeros(n)
            e[i] = h
            J[:, i] = (fun_grad(z + e)[1] - fun_grad(z - e)[1]) / (2 * h)
        J = 0.5 * (J + J.T)
        try:
            step = np.linalg.solve(J, -g)
        except np.linalg.LinAlgError:
            break
        znew = z + step
        if np.linalg.norm(fun_grad(znew)[1]) >= gn:
            break
        z = znew
    return z


def _maximize(model, f, f_p, k, rng, n_starts, radius0, cap, margin=0.5):
    n = model.n
    R = radius0
    fg = lambda z: _aux(model, f, f_p, k, z)
    neg = lambda z: tuple(-v for v in fg(z))
    best = None
    while True:
        Rs = min(R, model.max_radius * 0.999)
        starts = rng.normal(size=(n_starts, n))
        starts *= (Rs * rng.random(n_starts) ** (1.0 / n) / np.linalg.norm(starts, axis=1))[:, None]
        starts[0] = 0.0
        if best is not None:
            starts[1] = best[1]
        for z0 in starts:
            res = minimize(neg, z0, jac=True, method="L-BFGS-B", bounds=[(-Rs, Rs)] * n,
                           options={"maxiter": 500, "gtol": 1e-12, "ftol": 1e-15})
            if best is None or -res.fun > best[0]:
                best = (-res.fun, res.x)
        interior = np.linalg.norm(best[1]) < margin * Rs
        if interior or Rs >= cap or Rs >= model.max_radius * 0.999:
            break
        R *= 2.0
    z = _polish(fg, best[1])
    resolved = bool(np.linalg.norm(z) < margin * Rs)
    return z, Rs, resolved


def maximizing_sequence(model: ModelManifold, f: TestFunction, phi, k_max: int = 20,
                       n_starts: int = 32, seed: int = 0, radius0: float = 1.0,
                       cap: float = 1e6, base=None) -> list:
    """Maximisers ``p_k`` of ``(f - f(p) + 1) / log(rho^2 + 2)^(1/k)`` with the bounds at each.

    ``phi`` is a constant ON-frame matrix or a callable of the point.  The base
    point is the origin of the normal coordinates; on flat space ``base`` moves
    it, and recorded points are then in the original coordinates.
    """
    if not f.bounded_above:
        raise PreconditionError("f must be bounded above (give TestFunction.sup)")
    shift = np.zeros(model.n)
    if base is not None:
        if model.c != 0:
            raise PreconditionError("a moved base point is only supported on flat space")
        shift = np.asarray(base, dtype=float)
        f0 = f
        f = TestFunction(lambda z: f0.value(z + shift), lambda z: f0.grad(z + shift),
                         lambda z: f0.hess(z + shift), f0.sup, f0.inf, f0.name)
    rng = np.random.default_rng(seed)
    p = np.zeros(model.n)
    f_p = f.value(p)
    out = []
    for k in range(1, k_max + 1):
        z, R, resolved = _maximize(model, f, f_p, k, rng, n_starts, radius0, cap)
        Phi = _check_psd(_phi_at(phi, z))
        tr = float(np.trace(Phi))
        r = model.rho(z)
        E = model.frame(z)
        grad_on = E.T @ np.asarray(f.grad(z), dtype=float)
        gnorm = float(np.linalg.norm(grad_on))
        box = float(np.trace(Phi @ np.asarray(f.hess(z), dtype=float)))
        F = f.value(z) - f_p + 1.0
        L = math.log(r * r + 2.0)
        rhs_g = 2.0 * F * r / (k * (r * r + 2.0) * L)
        if r > 0:
            cv = comparison_functions(r, model.c)
            K_printed, K_std = cv.printed_bound * tr, cv.standard_bound * tr
        else:
            K_printed = K_std = 0.0
        first = 4.0 * tr * r * r * F / (k * k * (r * r + 2.0) ** 2 * L * L)
        second = 2.0 * F / (k * (r * r + 2.0) * L)
        rhs_sq = first + second * (tr + r * K_printed)
        rhs_std = first + second * (tr + r * K_std)
        denom = max(gnorm, rhs_g, 1e-12)
        rel = abs(gnorm - rhs_g) / denom
        slack = 1e-9 * max(1.0, abs(box))
        note = "" if resolved else f"unresolved at k={k}: maximiser not interior up to radius {R:g}"
        out.append(SequenceRecord(
            k=k, point=(z + shift).tolist(), rho=r, f=float(f.value(z)), grad_norm=gnorm, box=box,
            rhs_gradient=rhs_g, rhs_square=rhs_sq, rhs_square_standard=rhs_std,
            gradient_rel_error=rel,
            square_bound_holds=box <= rhs_std + slack,
            square_bound_printed_holds=box <= rhs_sq + slack,
            resolved=resolved, search_radius=R, note=note,
        ))
    return out


def bounded_below_sequence(model, f: TestFunction, phi, k_max: int = 20, **kw) -> list:
    """Run the maximising construction on ``-f``; records are returned in terms of ``f``."""
    if f.inf is None:
        raise PreconditionError("f must be bounded below (give TestFunction.inf)")
    recs = maximizing_sequence(model, f.negated(), phi, k_max, **kw)
    for rec in recs:
        rec.f = -rec.f
        rec.box = -rec.box
    return recs


@dataclass
class LimitVerdict:
    side: str
    holds: dict           # k -> (value ok, gradient ok, box ok) at tolerance 1/k
    all_hold: bool
    subsequence: list     # (j, k_j): record k_j meets the three inequalities at tolerance 1/j
    density: float        # len(subsequence) / number of resolved records
    ok: bool


def _tests(rec, bound, side, eps):
    if side == "above":
        return rec.f > bound - eps, rec.grad_norm < eps, rec.box < eps
    return rec.f < bound + eps, rec.grad_norm < eps, rec.box > -eps


def sequence_limits(records, bound: float, side: str = "above") -> LimitVerdict:
    """The three ``1/k`` inequalities along the sequence.

    ``side='above'``: ``f(p_k) > sup f - 1/k``, ``|grad f| < 1/k``, ``box f < 1/k``.
    ``side='below'``: ``f(p_k) < inf f + 1/k``, ``|grad f| < 1/k``, ``box f > -1/k``.
    ``holds`` tests each record at its own index.  Passing to a subsequence
    re-indexes: the greedy chain ``k_1 < k_2 < ...`` takes the first record
    meeting the inequalities at ``1/j``, which gives the longest such chain.
    The verdict needs the chain to cover at least half of the resolved records.
    """
    if side not in ("above", "below"):
        raise ValueError("side must be 'above' or 'below'")
    resolved = sorted((rec for rec in records if rec.resolved), key=lambda rec: rec.k)
    holds = {rec.k: _tests(rec, bound, side, 1.0 / rec.k) for rec in resolved}
    sub = []
    for rec in resolved:
        j = len(sub) + 1
        if all(_tests(rec, bound, side, 1.0 / j)):
            sub.append((j, rec.k))
    density = len(sub) / len(resolved) if resolved else 0.0
    all_hold = bool(holds) and all(all(t) for t in holds.values())
    return LimitVerdict(side, holds, all_hold, sub, density, bool(holds) and density >= 0.5)


# ---------------------------------------------------------------------------
# phi-transform identities


@dataclass
class TransformSamples:
    f: np.ndarray      # (m,) nonnegative values
    grad: np.ndarray   # (m, n) ON components
    hess: np.ndarray   # (m, n, n) ON components
    phi: np.ndarray    # (m, n, n) positive semi-definite


def synthetic_transform_samples(m: int, n: int, a: float, beta: float, seed: int = 0,
                                zero_fraction: float = 0.05) -> TransformSamples:
    """Random jets with ``box f >= a f^beta`` imposed by shifting the Hessian along the identity."""
    rng = np.random.default_rng(seed)
    f = rng.exponential(1.0, size=m)
    f[rng.random(m) < zero_fraction] = 0.0
    grad = rng.normal(size=(m, n))
    B = rng.normal(size=(m, n, n))
    phi = B @ np.swapaxes(B, -1, -2) + 1e-3 * np.eye(n)
    H0 = rng.normal(size=(m, n, n))
    H0 = 0.5 * (H0 + np.swapaxes(H0, -1, -2))
    target = a * f ** beta + rng.exponential(0.5, size=m)
    cur = np.einsum("mij,mji->m", phi, H0)
    shift = (target - cur) / np.trace(phi, axis1=1, axis2=2)
    hess = H0 + shift[:, None, None] * np.eye(n)
    return TransformSamples(f, grad, hess, phi)


@dataclass
class TransformReport:
    alpha: float
    beta: float
    a: float
    derivative_residual: float     # phi' = -alpha phi^((alpha+1)/alpha)
    ratio_residual: float          # phi''/phi'^2 = ((alpha+1)/alpha)/phi
    identity_residual: float       # ((a+1)/a)<Phi grad g, grad g> - g box g = alpha phi^((2a+1)/a) box f
    hypothesis: np.ndarray         # box f >= a f^beta
    step_slack: np.ndarray         # lhs - a alpha (f/(1+f))^beta where the hypothesis holds
    beta_form: bool                # alpha == (beta - 1)/2, so the right side is a alpha (f/(1+f))^beta

    @property
    def min_slack(self) -> float:
        s = self.step_slack[self.hypothesis]
        return float(np.min(s)) if s.size else math.inf


def phi_transform_check(samples: TransformSamples, alpha: float, a: float, beta: float) -> TransformReport:
    """Pointwise algebra of ``g = (1 + f)^(-alpha)`` under the square operator."""
    if not alpha > 0:
        raise PreconditionError("alpha must be positive")
    if not a > 0 or not beta > 1:
        raise PreconditionError("need a > 0 and beta > 1")
    f = np.asarray(samples.f, dtype=float)
    if np.any(f < 0):
        raise PreconditionError("f must be nonnegative")
    al = float(alpha)
    phi = (1.0 + f) ** (-al)
    dphi = -al * (1.0 + f) ** (-al - 1.0)
    d2phi = al * (al + 1.0) * (1.0 + f) ** (-al - 2.0)

    def rel(x, y):
        return float(np.max(np.abs(x - y) / np.maximum(np.maximum(np.abs(x), np.abs(y)), 1e-300)))

    der = rel(dphi, -al * phi ** ((al + 1.0) / al))
    ratio = rel(d2phi / dphi ** 2, ((al + 1.0) / al) / phi)

    Phi = samples.phi
    gradg = dphi[:, None] * samples.grad
    hessg = d2phi[:, None, None] * np.einsum("mi,mj->mij", samples.grad, samples.grad) \
        + dphi[:, None, None] * samples.hess
    box_f = np.einsum("mij,mji->m", Phi, samples.hess)
    box_g = np.einsum("mij,mji->m", Phi, hessg)
    quad = np.einsum("mi,mij,mj->m", gradg, Phi, gradg)
    lhs = ((al + 1.0) / al) * quad - phi * box_g
    rhs = al * phi ** ((2.0 * al + 1.0) / al) * box_f
    scale = np.maximum.reduce([np.abs(((al + 1.0) / al) * quad), np.abs(phi * box_g), np.abs(rhs)])
    diff = np.abs(lhs - rhs)
    ident = float(np.max(np.where(scale > 0, diff / np.where(scale > 0, scale, 1.0), diff)))

    hyp = box_f >= a * f ** beta
    beta_form = abs(al - (beta - 1.0) / 2.0) <= 1e-15 * max(1.0, al)
    if beta_form:
        target = a * al * (f / (1.0 + f)) ** beta
    else:
        target = a * al * f ** beta / (1.0 + f) ** (2.0 * al + 1.0)
    slack = lhs - target
    return TransformReport(al, float(beta), float(a), der, ratio, ident, hyp, slack, beta_form)
