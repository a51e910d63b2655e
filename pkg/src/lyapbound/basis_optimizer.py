"""Diagonal change of basis that minimises the contraction proxy r.

Conjugating every matrix by diag(lambda, 1/lambda) maps entries
(a, b, c, d) -> (a, lambda^2 b, c / lambda^2, d) and leaves the eigenvalues
of every finite product unchanged, hence also every growth-rate approximant.
Writing u = lambda^2, the scaled ratio bound is

    R_u = max_i max(u a_i/c_i, c_i/(u a_i), u b_i/d_i, d_i/(u b_i))
        = max(u P, Q / u),   P = max_i max(a_i/c_i, b_i/d_i),
                             Q = max_i max(c_i/a_i, d_i/b_i).

The first branch increases and the second decreases in u, so the exact
minimiser is the crossing u* = sqrt(Q/P), giving R = sqrt(PQ) and
lambda0 = u*^(1/2).  All constants are recomputed on the scaled ensemble;
smaller R means smaller r and therefore a smaller error bound, while the
approximants themselves are untouched.

If the scaled ensemble turns out to be column stochastic the growth rate is
exactly zero; the result flags that so callers can short-circuit.
"""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr

from .matrix_core import (Ensemble, EnsembleConstants, PositiveMatrix2,
                          compute_constants, probability_sum_tolerance,
                          working_context)


@dataclass(frozen=True)
class ScalingResult:
    """Outcome of the optimal diagonal scaling."""

    lambda0: mpfr
    scaled: Ensemble
    new_constants: EnsembleConstants
    is_stochastic_after: bool


def scaling_ratio_bound(ensemble: Ensemble, u: mpfr) -> mpfr:
    """R_u of the ensemble scaled with u = lambda^2 (used by the grid check)."""
    with working_context(ensemble.precision):
        worst = mpfr(0)
        for m in ensemble.matrices:
            ua, ub = u * m.a / m.c, u * m.b / m.d
            worst = max(worst, ua, 1 / ua, ub, 1 / ub)
        return worst


def optimal_scaling(ensemble: Ensemble) -> ScalingResult:
    """Scale by the closed-form minimiser of R_u and recompute all constants."""
    prec = ensemble.precision
    with working_context(prec):
        p_branch = mpfr(0)
        q_branch = mpfr(0)
        for m in ensemble.matrices:
            p_branch = max(p_branch, m.a / m.c, m.b / m.d)
            q_branch = max(q_branch, m.c / m.a, m.d / m.b)
        u_best = gmpy2.sqrt(q_branch / p_branch)
        lambda0 = gmpy2.sqrt(u_best)
        scaled_mats = tuple(
            PositiveMatrix2(m.a, u_best * m.b, m.c / u_best, m.d)
            for m in ensemble.matrices)
        scaled = Ensemble(scaled_mats, ensemble.probabilities, prec)
        new_constants = compute_constants(scaled)
        tol = probability_sum_tolerance(prec)
        stochastic = all(
            abs(m.a + m.c - 1) <= tol and abs(m.b + m.d - 1) <= tol
            for m in scaled_mats)
        return ScalingResult(lambda0=lambda0, scaled=scaled,
                             new_constants=new_constants,
                             is_stochastic_after=stochastic)
