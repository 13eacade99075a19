from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grwcurv.errors import RangeError
from grwcurv.symfunc import (Spectrum, b_coefficient, elem_sym, elem_sym_all, elem_sym_array,
                             exact_matrix, gauss_curvature_data, invariants, matrix_sym_functions,
                             mean_curvature, newton_expanded, newton_maclaurin_check,
                             newton_sequence, newton_transform, normalized_sym, restricted_sym,
                             trace_identities)

from oracles import esf_subsets, newton_from_eigen

finite = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)
spectra = st.lists(finite, min_size=1, max_size=8)


def sym(rng, n, scale=1.0):
    B = rng.normal(size=(n, n)) * scale
    return 0.5 * (B + B.T)


# -- elementary symmetric functions -------------------------------------------

def test_elem_sym_small_cases():
    assert elem_sym((1, 1, 1, 1), 2) == 6
    assert elem_sym((2, 3), 1) == 5
    assert elem_sym((2, 3), 2) == 6
    assert elem_sym((2.5, -1.0), 0) == 1.0


def test_elem_sym_range_errors():
    with pytest.raises(RangeError):
        elem_sym((1, 2), 3)
    with pytest.raises(RangeError):
        elem_sym((1, 2), -1)


@given(spectra)
def test_elem_sym_matches_subset_sum(vals):
    n = len(vals)
    scale = max(1.0, max(abs(v) for v in vals)) ** n * math.comb(n, n // 2)
    for r in range(n + 1):
        assert abs(elem_sym(vals, r) - esf_subsets(vals, r)) <= 1e-12 * scale


def test_elem_sym_ten_values_against_subsets():
    rng = np.random.default_rng(3)
    vals = rng.normal(size=10).tolist()
    for r in range(11):
        assert elem_sym(vals, r) == pytest.approx(esf_subsets(vals, r), rel=1e-12, abs=1e-12)


def test_exact_mode_is_exact():
    vals = [Fraction(1, 3), Fraction(-2, 7), Fraction(5)]
    for r in range(4):
        assert elem_sym(vals, r) == esf_subsets(vals, r)
    assert isinstance(elem_sym(vals, 2), Fraction)


def test_elem_sym_array_matches_scalar():
    rng = np.random.default_rng(0)
    L = rng.normal(size=(20, 5))
    E = elem_sym_array(L)
    for k in range(20):
        assert np.allclose(E[k], elem_sym_all(L[k].tolist()), rtol=1e-13, atol=1e-13)


# -- mean curvatures ------------------------------------------------------------

def test_mean_curvature_examples():
    for r in (1, 2, 3):
        assert mean_curvature((-1, -1, -1), r) == 1
    assert mean_curvature((0.3, 7.0), 0) == 1
    assert mean_curvature((2, 3), 1) == Fraction(-5, 2)


def test_signed_and_unsigned_means_differ_only_by_sign():
    vals = (1.5, -0.5, 2.0, 0.25)
    for r in range(5):
        assert mean_curvature(vals, r) == pytest.approx((-1) ** r * normalized_sym(vals, r))


def test_invariants_fields():
    inv = invariants((2, 3))
    assert inv.S == (1, 5, 6)
    assert inv.H == (1, Fraction(-5, 2), 6)
    assert inv.b == (2, 2)
    assert all(b_coefficient(6, r) > 0 for r in range(6))
    assert b_coefficient(3, 1) == 6


def test_restricted_sym_examples():
    assert restricted_sym((2, 3), 1, 1) == 3
    assert restricted_sym((1, 2, 3), 2, 2) == 3
    for i in (1, 2, 3):
        assert restricted_sym((1, 2, 3), i, 0) == 1
    with pytest.raises(RangeError):
        restricted_sym((1, 2), 3, 0)


@given(st.lists(st.integers(-9, 9), min_size=2, max_size=7))
def test_restricted_sym_recurrence_exact(vals):
    n = len(vals)
    for i in range(1, n + 1):
        for r in range(1, n):
            lhs = restricted_sym(vals, i, r)
            assert lhs == elem_sym(vals, r) - vals[i - 1] * restricted_sym(vals, i, r - 1)


# -- Newton transformations -----------------------------------------------------

def test_newton_examples():
    A = np.diag([2.0, 3.0])
    assert np.array_equal(newton_transform(A, 0), np.eye(2))
    assert np.allclose(newton_transform(A, 1), np.diag([-3.0, -2.0]))
    rng = np.random.default_rng(1)
    for n in range(2, 9):
        M = sym(rng, n)
        norm = np.max(np.sum(np.abs(M), axis=1))
        assert np.max(np.abs(newton_transform(M, n))) <= 1e-8 * norm ** n


def test_newton_against_eigen_oracle_and_commutation():
    rng = np.random.default_rng(2)
    for n in range(2, 8):
        A = sym(rng, n)
        for r in range(n + 1):
            P = newton_transform(A, r)
            ref = newton_from_eigen(A, r)
            scale = max(1.0, np.max(np.abs(ref)))
            assert np.max(np.abs(P - ref)) <= 1e-10 * scale
            assert np.allclose(P, P.T, atol=1e-12 * scale)
            assert np.max(np.abs(P @ A - A @ P)) <= 1e-10 * scale * max(1.0, np.max(np.abs(A)))


def test_newton_expanded_form_matches_recurrence():
    rng = np.random.default_rng(4)
    for n in (3, 6, 10, 16):
        A = sym(rng, n)
        seq = newton_sequence(A)
        S = elem_sym_all(np.linalg.eigvalsh(A).tolist())
        rho = np.max(np.abs(np.linalg.eigvalsh(A)))
        for r in range(n + 1):
            E = newton_expanded(A, r)
            # relative to the size of the summands, which cancel heavily for large r
            scale = sum(abs(S[r - k]) * rho ** k for k in range(r + 1))
            assert np.max(np.abs(E - seq[r])) <= 1e-9 * scale


def test_exact_matrix_newton_vanishes():
    A = exact_matrix([[1, Fraction(1, 2), 0], [Fraction(1, 2), -2, 3], [0, 3, Fraction(1, 3)]])
    S = matrix_sym_functions(A)
    assert all(isinstance(s, Fraction) for s in S)
    P = newton_transform(A, 3)
    assert all(x == 0 for x in P.flat)
    # Faddeev-LeVerrier coefficients agree with the characteristic polynomial
    ref = np.poly(np.array(A, dtype=float))
    for r in range(4):
        assert float(S[r]) == pytest.approx((-1) ** r * ref[r], abs=1e-12)


def test_range_checks_on_matrices():
    with pytest.raises(RangeError):
        newton_transform(np.eye(2), 3)
    with pytest.raises(ValueError):
        newton_transform(np.array([[1.0, 2.0], [0.0, 1.0]]), 1)
    with pytest.raises(RangeError):
        newton_transform(np.eye(17), 1)


# -- trace identities -------------------------------------------------------------

def test_trace_identities_hand_values():
    rep = trace_identities(np.diag([2.0, 3.0]))
    row = rep.rows[1]
    assert row.tr_P == pytest.approx(-5.0)
    assert row.closed_P == pytest.approx(-5.0)
    assert row.tr_AP == pytest.approx(-12.0)
    assert row.closed_AP == pytest.approx(-12.0)
    assert rep.passed()


def test_trace_identities_zero_matrix():
    rep = trace_identities(np.zeros((4, 4)))
    assert rep.rows[0].tr_P == 4
    for row in rep.rows:
        assert row.tr_AP == 0 and row.tr_A2P == 0
        if row.r:
            assert row.tr_P == 0
    assert rep.passed()


def test_trace_identities_random_and_fault_detection():
    rng = np.random.default_rng(5)
    for i in range(200):
        n = 2 + i % 7
        A = sym(rng, n, 10.0 ** rng.uniform(-2, 2))
        assert trace_identities(A).passed()
    A = sym(rng, 4)
    assert not trace_identities(A, fault=True).passed()


# -- Newton-Maclaurin -------------------------------------------------------------

def test_maclaurin_hand_example():
    v = newton_maclaurin_check(Spectrum.exact([1, 2, 3]))
    H = [normalized_sym(Spectrum.exact([1, 2, 3]), r) for r in range(4)]
    assert H[1] ** 2 == 4 and H[2] == Fraction(11, 3)
    assert v.ok and not v.equality_cases


def test_maclaurin_equal_spectrum_full_chain():
    v = newton_maclaurin_check(Spectrum.exact([Fraction(3, 2)] * 4))
    assert v.ok and v.chain_applicable
    assert {("a", r) for r in (1, 2, 3)} <= set(v.equality_cases)
    assert {("b", j) for j in (1, 2, 3)} <= set(v.equality_cases)


def test_maclaurin_vanishing_degenerate_case():
    v = newton_maclaurin_check(Spectrum.exact([1, 0, 0]))
    assert v.ok
    r, tail_zero, nonzero = v.vanishing[0]
    assert (r, tail_zero) == (2, True) and nonzero <= r - 1


def test_maclaurin_chain_not_applicable():
    v = newton_maclaurin_check(Spectrum.exact([1, -1, 2]))
    assert not v.chain_applicable and v.chain_note == "chain not applicable"


def test_maclaurin_exact_mode_catches_a_broken_equality():
    # unequal spectrum: strict inequality, never an equality case
    v = newton_maclaurin_check(Spectrum.exact([1, 1, 1, Fraction(1000001, 1000000)]))
    assert v.ok and not [c for c in v.equality_cases if c[0] == "a"]


@settings(max_examples=300)
@given(spectra)
def test_maclaurin_never_violated(vals):
    v = newton_maclaurin_check(Spectrum(vals))
    assert not v.violations


# -- Gauss data --------------------------------------------------------------------

def test_gauss_slice_is_flat():
    rep = gauss_curvature_data(Spectrum.exact([-1] * 4), 1)
    assert rep.scalar_curvature == 0
    assert all(k == 0 for k in rep.sectional.values())


def test_gauss_h2_equal_c_gives_zero_scalar():
    # H_2 = 1 with lambda = (2, 1/2)
    rep = gauss_curvature_data(Spectrum.exact([2, Fraction(1, 2)]), 1)
    assert rep.scalar_curvature == 0


def test_gauss_sum_identity_exact_and_float():
    rep = gauss_curvature_data(Spectrum.exact([3, Fraction(-1, 2), 7, 0]), Fraction(2, 3))
    assert rep.sectional_sum == rep.scalar_curvature
    assert rep.identity_residual == 0
    rng = np.random.default_rng(6)
    for _ in range(100):
        lam = rng.normal(size=5)
        rep = gauss_curvature_data(Spectrum(tuple(lam)), -0.5)
        assert rep.sectional_sum == pytest.approx(rep.scalar_curvature, rel=1e-12, abs=1e-12)
        assert abs(rep.identity_residual) <= 1e-12 * (1 + np.sum(lam) ** 2)


def test_gauss_needs_two_dimensions():
    with pytest.raises(RangeError):
        gauss_curvature_data(Spectrum((1.0,)), 1.0)
