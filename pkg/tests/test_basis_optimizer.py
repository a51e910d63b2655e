"""Optimal diagonal scaling and its effect on the bounds."""

import gmpy2
import pytest
from gmpy2 import mpfr

from lyapbound import (compute_constants, compute_traces, det_coefficients,
                       error_bound, lyapunov_estimate, optimal_scaling,
                       scaling_ratio_bound, validate_ensemble, working_context)

PREC = 512


def tol(shift):
    with working_context(PREC):
        return mpfr(2) ** -(PREC - shift)


def test_example51_closed_form(ex51, consts51):
    result = optimal_scaling(ex51)
    with working_context(PREC):
        root2 = gmpy2.sqrt(mpfr(2))
        expected_lambda0 = 1 / gmpy2.sqrt(root2)  # 2^(-1/4)
        assert abs(result.lambda0 - expected_lambda0) <= tol(8)
        expected_r = (root2 - 1) / (root2 + 1)
        assert abs(result.new_constants.r - expected_r) <= tol(8)
        expected_c1 = 3 + 2 * root2
        assert abs(result.new_constants.c1 - expected_c1) <= tol(8)
        assert result.new_constants.r <= consts51.r
    assert not result.is_stochastic_after


def test_example52_already_balanced(ex52):
    result = optimal_scaling(ex52)
    assert result.lambda0 == 1
    for original, scaled in zip(ex52.matrices, result.scaled.matrices):
        assert original.entries() == scaled.entries()


def test_single_matrix_closed_form():
    e = validate_ensemble([[[1, 4], [1, 2]]], ["1"])
    result = optimal_scaling(e)
    with working_context(PREC):
        expected = 1 / gmpy2.sqrt(gmpy2.sqrt(mpfr(2)))  # P = 2, Q = 1
        assert abs(result.lambda0 - expected) <= tol(8)


@pytest.mark.parametrize("matrices,probs", [
    ([[[2, 1], [1, 1]], [[3, 1], [2, 1]]], ["1/2", "1/2"]),
    ([[[1, 4], [1, 2]]], ["1"]),
    ([[["7", "2"], ["1", "4"]], [["1", "9"], ["2", "3"]]], ["0.3", "0.7"]),
])
def test_grid_local_minimum(matrices, probs):
    e = validate_ensemble(matrices, probs)
    result = optimal_scaling(e)
    with working_context(PREC):
        u_best = result.lambda0 ** 2
        at_best = scaling_ratio_bound(e, u_best)
        bump = mpfr(1) + mpfr(2) / 1000  # lambda perturbed by about 1e-3
        assert at_best <= scaling_ratio_bound(e, u_best * bump)
        assert at_best <= scaling_ratio_bound(e, u_best / bump)
        assert abs(max(result.new_constants.ratio_bounds) - at_best) <= tol(8) * at_best


def test_bound_improvement_example51(ex51, consts51):
    result = optimal_scaling(ex51)
    for n in range(3, 11):
        original = error_bound(n, consts51)
        improved = error_bound(n, result.new_constants)
        assert original.valid and improved.valid
        assert improved.bound <= original.bound


def test_estimates_unchanged_by_scaling(ex51, consts51):
    result = optimal_scaling(ex51)
    base = det_coefficients(compute_traces(ex51, consts51, 5))
    scaled = det_coefficients(
        compute_traces(result.scaled, result.new_constants, 5))
    with working_context(PREC):
        for n in range(1, 6):
            a = lyapunov_estimate(base, n)
            b = lyapunov_estimate(scaled, n)
            assert abs(a - b) <= tol(32) * abs(a)


def test_scaling_detects_hidden_stochastic():
    # a column-stochastic matrix conjugated away from stochastic form; the
    # optimal scaling undoes the conjugation exactly and flags it
    e = validate_ensemble([[["2/3", "4/3"], ["1/12", "2/3"]]], ["1"])
    assert not compute_constants(e).is_all_column_stochastic
    result = optimal_scaling(e)
    assert result.is_stochastic_after
    with working_context(PREC):
        assert abs(result.lambda0 - gmpy2.sqrt(mpfr("0.25"))) <= tol(8)
        m = result.scaled.matrices[0]
        assert abs(m.a + m.c - 1) <= tol(16)
        assert abs(m.b + m.d - 1) <= tol(16)
