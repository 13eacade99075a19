from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from grwcurv.errors import PreconditionError, RangeError
from grwcurv.maxprin import (TransformSamples, ModelManifold, phi_transform_check,
                             bounded_below_sequence, comparison_functions, constant_function,
                             sequence_limits, flat_function, gaussian_peak,
                             hessian_comparison_check, inverse_quadratic, maximizing_sequence,
                             radial_function, radial_samples, square_distance_check,
                             synthetic_transform_samples)

from oracles import radial_maximiser

FLAT = ModelManifold.flat(2)


# -- comparison functions -------------------------------------------------------------

def test_flat_comparison_values():
    cv = comparison_functions(2.0, 0.0)
    assert cv.s == 2.0 and cv.ds == 1.0 and cv.printed_bound == 2.0 and cv.standard_bound == 0.5


def test_sphere_comparison_vanishes_at_conjugate_point():
    cv = comparison_functions(math.pi, 1.0)
    assert abs(cv.s) <= 1e-15


@pytest.mark.parametrize("c", [1.0, -1.0, 0.25, -4.0])
def test_series_branch_is_continuous(c):
    cut = 1e-3 / math.sqrt(abs(c))
    lo = comparison_functions(cut * (1 - 1e-9), c)
    hi = comparison_functions(cut * (1 + 1e-9), c)
    assert lo.s == pytest.approx(hi.s, rel=1e-12)
    assert lo.ds == pytest.approx(hi.ds, rel=1e-6, abs=1e-12)


@given(st.floats(0.01, 3.0), st.sampled_from([1.0, -1.0, 0.5, -2.0]))
def test_derivative_matches_finite_difference(t, c):
    h = 1e-6
    fd = (comparison_functions(t + h, c).s - comparison_functions(t - h, c).s) / (2 * h)
    assert comparison_functions(t, c).ds == pytest.approx(fd, rel=1e-6, abs=1e-8)


def test_comparison_range_errors():
    for t in (0.0, -1.0):
        with pytest.raises(RangeError):
            comparison_functions(t, 0.0)
    with pytest.raises(RangeError):
        comparison_functions(3.2, 1.0)


# -- the distance bound --------------------------------------------------------------------

def test_distance_bound_flat_examples():
    rep = square_distance_check(FLAT, np.eye(2), radial_samples(FLAT, [2.0, 0.1]))
    assert rep.box_rho[0] == pytest.approx(0.5) and rep.printed_bound[0] == pytest.approx(4.0)
    assert rep.printed_holds[0] and rep.standard_holds[0]
    assert rep.box_rho[1] == pytest.approx(10.0) and rep.printed_bound[1] == pytest.approx(0.2)
    assert not rep.printed_holds[1]
    assert rep.standard_bound[1] == pytest.approx(20.0) and rep.standard_holds[1]
    assert rep.printed_violations.tolist() == [0.1]


def test_distance_bound_zero_phi():
    rep = square_distance_check(FLAT, np.zeros((2, 2)), radial_samples(FLAT, [0.3, 5.0]))
    assert np.all(rep.box_rho == 0.0) and np.all(rep.printed_bound == 0.0)
    assert np.all(rep.printed_holds)


def test_distance_bound_printed_bound_threshold_on_flat_space():
    radii = np.linspace(0.01, 5.0, 100)
    rep = square_distance_check(FLAT, np.eye(2), radial_samples(FLAT, radii, [1.0, 2.0]))
    assert np.all(rep.printed_holds[radii >= 1.0])
    assert np.any(~rep.printed_holds[radii < 1.0])
    # with n = 2 the crossover is rho = 1/sqrt(2)
    assert np.all(rep.printed_holds == (radii >= 1 / math.sqrt(2)))
    assert np.all(rep.standard_holds)


def test_distance_bound_rejects_indefinite_phi_and_bad_radius():
    with pytest.raises(PreconditionError):
        square_distance_check(FLAT, np.diag([1.0, -1.0]), radial_samples(FLAT, [1.0]))
    with pytest.raises(PreconditionError):
        square_distance_check(FLAT, np.eye(2), np.zeros((1, 2)))
    sph = ModelManifold.sphere(2)
    with pytest.raises(PreconditionError):
        square_distance_check(sph, np.eye(2), radial_samples(sph, [3.5]))


@pytest.mark.parametrize("model", [ModelManifold.flat(3), ModelManifold.sphere(3, 1.0),
                                   ModelManifold.sphere(2, 4.0), ModelManifold.hyperbolic(3),
                                   ModelManifold.hyperbolic(2, -0.25)])
def test_embedding_hessian_equals_standard_bound(model):
    hi = min(model.max_radius * 0.98, 6.0)
    chk = hessian_comparison_check(model, np.linspace(0.05, hi, 100), seed=3)
    assert chk.holds()
    assert np.allclose(chk.hess_ww, chk.standard, rtol=1e-7, atol=1e-9)


def test_closed_form_hessian_agrees_with_embedding():
    rng = np.random.default_rng(0)
    for model in (ModelManifold.sphere(3), ModelManifold.hyperbolic(3)):
        for _ in range(20):
            z = rng.normal(size=3)
            z *= rng.uniform(0.1, 2.5) / np.linalg.norm(z)
            w = rng.normal(size=3)
            assert w @ model.hess_rho(z) @ w == pytest.approx(model.hess_rho_embedded(z, w), rel=1e-7, abs=1e-9)


def test_model_validation():
    with pytest.raises(ValueError):
        ModelManifold("sphere", 2, -1.0)
    with pytest.raises(ValueError):
        ModelManifold("torus", 2, 0.0)


# -- test functions --------------------------------------------------------------------------

def test_inconsistent_callbacks_rejected():
    with pytest.raises(ValueError):
        flat_function(lambda z: z @ z, lambda z: z, lambda z: 2 * np.eye(2))
    with pytest.raises(ValueError):
        flat_function(lambda z: z @ z, lambda z: 2 * z, lambda z: np.eye(2))


# -- maximising sequences ------------------------------------------------------------------------

def test_constant_function_sequence_stays_at_base():
    recs = maximizing_sequence(FLAT, constant_function(2, 3.0), np.eye(2), k_max=5, n_starts=8)
    for rec in recs:
        assert rec.rho == 0.0 and rec.grad_norm == 0.0 and rec.box == 0.0 and rec.resolved
    v = sequence_limits(recs, 3.0)
    assert v.all_hold and v.ok


def test_unbounded_function_rejected():
    f = flat_function(lambda z: z[0], lambda z: np.array([1.0, 0.0]), lambda z: np.zeros((2, 2)))
    with pytest.raises(PreconditionError):
        maximizing_sequence(FLAT, f, np.eye(2), k_max=1)


@pytest.fixture(scope="module")
def inverse_quadratic_records():
    return maximizing_sequence(FLAT, inverse_quadratic(2), np.eye(2), k_max=20)


def test_radial_maximiser_oracle(inverse_quadratic_records):
    F = lambda r: -1.0 / (1.0 + r * r)
    for rec in inverse_quadratic_records:
        assert rec.resolved
        assert rec.rho == pytest.approx(radial_maximiser(F, rec.k), rel=1e-6)


def test_gradient_identity_at_interior_maximisers(inverse_quadratic_records):
    for rec in inverse_quadratic_records:
        assert rec.gradient_rel_error <= 1e-6


def test_square_bounds_along_sequence(inverse_quadratic_records):
    assert all(rec.square_bound_holds for rec in inverse_quadratic_records)
    assert all(rec.square_bound_printed_holds for rec in inverse_quadratic_records)


def test_sequence_limits_trend(inverse_quadratic_records):
    recs = inverse_quadratic_records
    f = np.array([r.f for r in recs])
    g = np.array([r.grad_norm for r in recs])
    rhs = np.array([r.rhs_square for r in recs])
    assert np.all(np.diff(f) > 0) and f[-1] > -1.0 / len(recs)
    assert np.all(np.diff(g[3:]) < 0)
    assert np.all(np.diff(rhs) < 0)


def test_limits_subsequence(inverse_quadratic_records):
    v = sequence_limits(inverse_quadratic_records, 0.0)
    # k = 1 misses the box bound (box f = 1.68 > 1); every later index satisfies all three
    assert not all(v.holds[1]) and all(all(v.holds[k]) for k in range(2, 21))
    assert v.subsequence == [(j, j + 1) for j in range(1, 20)]
    assert v.ok and v.density == pytest.approx(0.95)


def test_peak_is_reached_for_large_k():
    q = np.array([0.7, -0.4])
    f = gaussian_peak(2, center=q, height=2.0, width=1.0)
    recs = maximizing_sequence(FLAT, f, np.eye(2), k_max=30, n_starts=16)
    dist = [np.linalg.norm(np.array(r.point) - q) for r in recs]
    assert np.all(np.diff(dist) <= 1e-12)
    assert dist[-1] < 0.05
    v = sequence_limits(recs, 2.0)
    # |grad f(p_k)| decays like 1.2/k, so the bounds only hold after re-indexing
    assert not any(v.holds[k][1] for k in v.holds)
    assert v.ok and v.density == pytest.approx(0.8)


def test_moved_base_point():
    f = inverse_quadratic(2)
    recs = maximizing_sequence(FLAT, f, np.eye(2), k_max=4, n_starts=8, base=[0.5, 0.0])
    assert all(r.resolved and r.gradient_rel_error <= 1e-6 for r in recs)
    with pytest.raises(PreconditionError):
        maximizing_sequence(ModelManifold.sphere(2), f, np.eye(2), k_max=1, base=[0.1, 0.0])


def test_radial_function_on_hyperbolic_space():
    model = ModelManifold.hyperbolic(2)
    F = lambda r: -1.0 / (1.0 + r * r)
    dF = lambda r: 2 * r / (1 + r * r) ** 2
    d2F = lambda r: (2 - 6 * r * r) / (1 + r * r) ** 3
    f = radial_function(model, F, dF, d2F, sup=0.0, inf=-1.0)
    recs = maximizing_sequence(model, f, np.eye(2), k_max=6, n_starts=8)
    for rec in recs:
        assert rec.resolved and rec.gradient_rel_error <= 1e-6
        assert rec.rho == pytest.approx(radial_maximiser(F, rec.k), rel=1e-6)


def test_bounded_below_path_mirrors_bounded_above():
    f = inverse_quadratic(2)
    above = maximizing_sequence(FLAT, f, np.eye(2), k_max=6)
    below = bounded_below_sequence(FLAT, f.negated(), np.eye(2), k_max=6)
    for a, b in zip(above, below):
        assert b.f == pytest.approx(-a.f) and b.box == pytest.approx(-a.box)
        assert b.grad_norm == pytest.approx(a.grad_norm)
    va = sequence_limits(above, 0.0, "above")
    vb = sequence_limits(below, 0.0, "below")
    assert va.holds == vb.holds and va.ok == vb.ok


def test_limits_side_validation():
    with pytest.raises(ValueError):
        sequence_limits([], 0.0, "sideways")


# -- phi-transform ----------------------------------------------------------------------------

def test_transform_at_zero():
    s = TransformSamples(np.zeros(3), np.zeros((3, 2)), np.zeros((3, 2, 2)),
                         np.broadcast_to(np.eye(2), (3, 2, 2)).copy())
    rep = phi_transform_check(s, 0.5, 1.0, 2.0)
    assert rep.derivative_residual == 0.0 and rep.identity_residual == 0.0
    assert rep.beta_form and np.all(rep.step_slack == 0.0)


def test_transform_on_synthetic_samples():
    for beta in (1.5, 2.0, 3.0):
        alpha = (beta - 1) / 2
        s = synthetic_transform_samples(2000, 2, 0.7, beta, seed=int(10 * beta))
        rep = phi_transform_check(s, alpha, 0.7, beta)
        assert rep.derivative_residual <= 1e-12 and rep.ratio_residual <= 1e-12
        assert rep.identity_residual <= 1e-10
        assert np.all(rep.hypothesis)
        assert rep.min_slack >= -1e-9


def test_transform_rejects_bad_parameters():
    s = synthetic_transform_samples(10, 2, 1.0, 2.0)
    for alpha in (0.0, -0.5):
        with pytest.raises(PreconditionError):
            phi_transform_check(s, alpha, 1.0, 2.0)
    neg = TransformSamples(-np.ones(1), np.zeros((1, 2)), np.zeros((1, 2, 2)), np.eye(2)[None])
    with pytest.raises(PreconditionError):
        phi_transform_check(neg, 0.5, 1.0, 2.0)
