"""Rigorous truncation-error bounds for the level-N approximant.

The error |Lambda - Lambda_N| is controlled by four series built from the
ensemble constants (c0, r, c2 of ``EnsembleConstants``), with generic term

    c_n = n * c0^n * r^(n(n+1)/2) / prod_{i=1..n} (1 - r^i),

namely alpha_plus = sum_{n>=1} c_n, alpha_N_plus = sum_{n>N} c_n, and the
weighted variants beta_plus / beta_N_plus whose terms carry an extra factor
e * c2.  Together with the lower bound

    alpha_minus = (1 - s)^(M-2) * prod_{n>=M} (1 - c0 * r^((n+1)/2)),

where s is the weighted projective-contraction coefficient and M the
``product_start`` constant, the final bound is

    |Lambda - Lambda_N| <= beta_N_plus / (alpha_minus - alpha_N_plus)
                         + alpha_N_plus * beta_plus
                           / (alpha_minus * (alpha_minus - alpha_N_plus)),

valid precisely when alpha_N_plus < alpha_minus (the truncation level is
large enough); otherwise the report carries ``bound = None``.

All infinite expressions are truncated rigorously and one-sidedly:

* series tails are majorised geometrically, sum_{n>=s} c_n <= c_s / (1 - q)
  with q the term ratio at s (the ratio decreases in n, so q dominates all
  later ratios);
* the infinite product is cut at an index n* and the remainder is bounded
  below by 1 - sum of the remaining c0 * r^((n+1)/2), a closed-form
  geometric sum kept below a configurable epsilon.

Instead of interval arithmetic, every upper quantity is inflated by
(1 + 2^-(precision-16)) and every lower quantity deflated likewise, and the
whole bound is recomputed at doubled precision with the more conservative
value reported.  At 512-bit working precision these guards are far below
the bound magnitudes of interest.
"""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr

from .exceptions import RatioNotContracting
from .matrix_core import EnsembleConstants, working_context
from .trace_series import DetCoefficients

DEFAULT_ALPHA_MINUS_EPSILON_EXP = -64  # remainder slack 2^-64


@dataclass(frozen=True)
class BoundReport:
    """One-sided estimates and the final bound at truncation level n.

    ``bound`` is None when alpha_n_plus >= alpha_minus, i.e. the level is not
    yet large enough for the bound to apply.  ``used_weighted_birkhoff``
    records whether the weighted contraction coefficient actually entered
    alpha_minus (it only appears through the factor (1-s)^(M-2), absent when
    M = 2).
    """

    n: int
    alpha_minus: mpfr
    alpha_plus: mpfr
    alpha_n_plus: mpfr
    beta_plus: mpfr
    beta_n_plus: mpfr
    bound: mpfr | None
    used_weighted_birkhoff: bool
    precision: int

    @property
    def valid(self) -> bool:
        return self.bound is not None


def series_term(n: int, constants: EnsembleConstants, weighted: bool = False,
                precision_bits: int | None = None) -> mpfr:
    """The term c_n, or e * c2 * c_n for the weighted series."""
    if n < 1:
        raise ValueError("series terms start at n = 1")
    with working_context(precision_bits or constants.precision):
        r = constants.r
        value = n * constants.c0 ** n * r ** (n * (n + 1) // 2)
        power = mpfr(1)
        for _ in range(n):
            power *= r
            value /= 1 - power
        if weighted:
            value *= gmpy2.exp(mpfr(1)) * constants.c2
        return value


def _term_ratio(start: int, constants: EnsembleConstants) -> mpfr:
    # c_{n+1}/c_n = ((n+1)/n) * c0 * r^(n+1) / (1 - r^(n+1)); decreasing in n,
    # so its value at `start` dominates every later ratio.
    r_power = constants.r ** (start + 1)
    return (mpfr(start + 1) / start) * constants.c0 * r_power / (1 - r_power)


def tail_bound_series(start: int, constants: EnsembleConstants,
                      weighted: bool = False,
                      precision_bits: int | None = None) -> mpfr:
    """Over-estimate of sum_{n>=start} c_n by the geometric majorant c_start/(1-q).

    Raises RatioNotContracting when the dominating ratio q at `start` is >= 1;
    the caller must then move the tail further out.
    """
    if start < 1:
        raise ValueError("tail starts at n >= 1")
    prec = precision_bits or constants.precision
    with working_context(prec):
        q = _term_ratio(start, constants)
        if q >= 1:
            raise RatioNotContracting(f"term ratio {q} >= 1 at start {start}")
        return series_term(start, constants, weighted, prec) / (1 - q)


def _series_sum_upper(start: int, constants: EnsembleConstants, weighted: bool,
                      precision_bits: int) -> mpfr:
    """Rigorous upper estimate of sum_{n>=start}: explicit terms + geometric tail."""
    with working_context(precision_bits):
        negligible = mpfr(2) ** -(precision_bits - 8)
        total = mpfr(0)
        n = start
        while True:
            total += series_term(n, constants, weighted, precision_bits)
            q = _term_ratio(n + 1, constants)
            if q < 1:
                tail = series_term(n + 1, constants, weighted, precision_bits) / (1 - q)
                if tail <= total * negligible:
                    return total + tail
            n += 1
            if n > start + 100000:  # unreachable: ratio tends to 0
                raise RuntimeError("series tail failed to contract")


def alpha_minus(constants: EnsembleConstants, epsilon=None,
                precision_bits: int | None = None) -> mpfr:
    """Certified lower bound on the absolute coefficient-sum denominator.

    Multiplies the explicit factors (1 - c0 * r^((n+1)/2)) from n = M up to an
    index n* chosen so that the dropped factors, bounded below by
    1 - sum_{n>n*} c0 * r^((n+1)/2) (a geometric sum in sqrt(r)), exceed
    1 - epsilon; then applies the (1-s)^(M-2) head factor.
    """
    with working_context(precision_bits or constants.precision):
        if epsilon is None:
            epsilon = mpfr(2) ** DEFAULT_ALPHA_MINUS_EPSILON_EXP
        else:
            epsilon = mpfr(epsilon)
        c0 = constants.c0
        sqrt_r = gmpy2.sqrt(constants.r)
        m_start = constants.product_start
        # remainder sum past n*: c0 * sqrt_r^(n*+2) / (1 - sqrt_r)
        n_star = m_start
        while c0 * sqrt_r ** (n_star + 2) / (1 - sqrt_r) >= epsilon:
            n_star += 1
        result = mpfr(1)
        factor_power = sqrt_r ** (m_start + 1)
        for _ in range(m_start, n_star + 1):
            result *= 1 - c0 * factor_power
            factor_power *= sqrt_r
        result *= 1 - c0 * sqrt_r ** (n_star + 2) / (1 - sqrt_r)
        head = (1 - constants.birkhoff_weighted) ** (m_start - 2)
        return head * result


def _assemble(n_trunc: int, constants: EnsembleConstants, precision_bits: int):
    """One evaluation pass of the five estimates and the bound."""
    with working_context(precision_bits):
        inflate = 1 + mpfr(2) ** -(precision_bits - 16)
        deflate = 1 - mpfr(2) ** -(precision_bits - 16)
        a_plus = _series_sum_upper(1, constants, False, precision_bits) * inflate
        a_n_plus = _series_sum_upper(n_trunc + 1, constants, False, precision_bits) * inflate
        b_plus = _series_sum_upper(1, constants, True, precision_bits) * inflate
        b_n_plus = _series_sum_upper(n_trunc + 1, constants, True, precision_bits) * inflate
        a_minus = alpha_minus(constants, precision_bits=precision_bits) * deflate
        if a_n_plus >= a_minus:
            bound = None
        else:
            gap = a_minus - a_n_plus
            bound = (b_n_plus / gap + a_n_plus * b_plus / (a_minus * gap)) * inflate
        return a_minus, a_plus, a_n_plus, b_plus, b_n_plus, bound


def error_bound(n_trunc: int, constants: EnsembleConstants) -> BoundReport:
    """Full bound report at truncation level ``n_trunc``.

    The bound is evaluated at working precision and again at doubled
    precision; the larger (more conservative) value is reported.
    """
    if n_trunc < 1:
        raise ValueError("truncation level must be at least 1")
    prec = constants.precision
    a_minus_v, a_plus_v, a_n_plus_v, b_plus_v, b_n_plus_v, bound = \
        _assemble(n_trunc, constants, prec)
    if bound is not None:
        _, _, _, _, _, bound_double = _assemble(n_trunc, constants, 2 * prec)
        if bound_double is not None:
            bound = max(bound, bound_double)
    return BoundReport(
        n=n_trunc,
        alpha_minus=a_minus_v,
        alpha_plus=a_plus_v,
        alpha_n_plus=a_n_plus_v,
        beta_plus=b_plus_v,
        beta_n_plus=b_n_plus_v,
        bound=bound,
        used_weighted_birkhoff=constants.product_start > 2,
        precision=prec,
    )


def coefficient_bounds_report(coeffs: DetCoefficients,
                              constants: EnsembleConstants) -> list[tuple]:
    """Check |a_n| and |alpha_n| against their decay majorants.

    The majorant for |a_n| is c_n / n and for |alpha_n| is e * c2 * c_n.
    Returns a list of (n, name, value, majorant) violations; empty means all
    coefficients conform.
    """
    violations = []
    with working_context(constants.precision):
        slack = 1 + mpfr(2) ** -(constants.precision - 24)
        for n in range(1, coeffs.n + 1):
            a_major = series_term(n, constants) / n
            alpha_major = series_term(n, constants, weighted=True)
            if abs(coeffs.a[n]) > a_major * slack:
                violations.append((n, "a", coeffs.a[n], a_major))
            if abs(coeffs.alpha[n]) > alpha_major * slack:
                violations.append((n, "alpha", coeffs.alpha[n], alpha_major))
    return violations
