"""Trace sequences over length-n matrix words and the coefficient recursions.

For each word length m up to N the enumeration visits all k^m products
A = A_{i1} ... A_{im} and accumulates

    t_m   = sum p_A * (1 - lambda2(A)/lambda1(A))^-1
    tau_m = sum p_A * log(lambda1(A)) * (1 - lambda2(A)/lambda1(A))^-1

where p_A is the product of the selection probabilities along the word.
Since lambda1 - lambda2 equals the square root of the discriminant, each
summand is computed as p_A * lambda1 / sqrt(disc), which is positive and
cancellation-free; the word determinant is carried as a product of the
per-factor determinants for the same reason.

The coefficient arrays follow the Newton-style recursions

    a_0 = 1,      a_n     = -(1/n) * sum_{m=1..n} t_m a_{n-m}
    alpha_0 = 0,  alpha_n = -(1/n) * sum_{m=1..n} (tau_m a_{n-m} + t_m alpha_{n-m})

which are the O(N^2) equivalent of the literal sums over ordered integer
compositions; the literal form is kept as a test oracle
(``composition_sum_oracle``).  The level-N growth-rate approximant is

    Lambda_N = (sum_{n<=N} alpha_n) / (sum_{n<=N} n a_n).

Enumeration is a depth-first walk that reuses each length-(m-1) prefix
product, visiting the k^m words of every level in lexicographic order, so
two runs with the same configuration produce bit-identical sums.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr

from .exceptions import BudgetExceeded, DegenerateDenominator, OracleTooLarge
from .matrix_core import Ensemble, EnsembleConstants, working_context

DEFAULT_WORD_CAP = 1 << 26


@dataclass(frozen=True)
class TraceData:
    """Accumulated t_m and tau_m for m = 1..n (index 0 is an unused placeholder)."""

    n: int
    t: tuple[mpfr, ...]
    tau: tuple[mpfr, ...]
    precision: int


@dataclass(frozen=True)
class DetCoefficients:
    """Coefficient arrays a_0..a_n and alpha_0..alpha_n (a_0 = 1, alpha_0 = 0)."""

    n: int
    a: tuple[mpfr, ...]
    alpha: tuple[mpfr, ...]
    precision: int


def compute_traces(ensemble: Ensemble, constants: EnsembleConstants, n_max: int,
                   *, max_words: int = DEFAULT_WORD_CAP) -> TraceData:
    """Enumerate all words of length 1..n_max and accumulate the trace sums.

    Cost is O(k^n_max) matrix multiplies via prefix reuse.  Raises
    BudgetExceeded when k^n_max exceeds ``max_words`` (default 2^26).
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    if constants.is_all_column_stochastic:
        raise ValueError("all matrices are column stochastic; the growth rate "
                         "is exactly 0 and no series is needed")
    k = ensemble.k
    if k ** n_max > max_words:
        raise BudgetExceeded(
            f"k^N = {k}^{n_max} exceeds the word cap {max_words}")
    prec = ensemble.precision
    if n_max + 100 > sys.getrecursionlimit():
        sys.setrecursionlimit(n_max + 200)
    with working_context(prec):
        items = [(m.a, m.b, m.c, m.d, m.det(), p)
                 for m, p in zip(ensemble.matrices, ensemble.probabilities)]
        # Majorant check: t_m must not exceed sum p_A (1 - |l2/l1|)^-1 termwise.
        # With every factor determinant positive all second eigenvalues are
        # positive and the majorant coincides with the term itself, so the
        # check is only informative (and only accumulated) when some
        # determinant is negative.
        track_majorant = any(item[4] < 0 for item in items)
        zero = mpfr(0)
        t_acc = [zero] * (n_max + 1)
        tau_acc = [zero] * (n_max + 1)
        chk_acc = [zero] * (n_max + 1)
        sqrt = gmpy2.sqrt
        log = gmpy2.log

        def walk(depth, pa, pb, pc, pd, det_acc, prob_acc):
            level = depth + 1
            for (a, b, c, d, det_i, p_i) in items:
                na = pa * a + pb * c
                nb = pa * b + pb * d
                nc = pc * a + pd * c
                nd = pc * b + pd * d
                det_w = det_acc * det_i
                prob_w = prob_acc * p_i
                diff = na - nd
                disc = diff * diff + 4 * (nb * nc)
                root = sqrt(disc)
                lam1 = (na + nd + root) / 2
                term = prob_w * lam1 / root
                t_acc[level] += term
                tau_acc[level] += term * log(lam1)
                if track_majorant:
                    lam1_sq = lam1 * lam1
                    chk_acc[level] += prob_w * lam1_sq / (lam1_sq - abs(det_w))
                if level < n_max:
                    walk(level, na, nb, nc, nd, det_w, prob_w)

        one = mpfr(1)
        walk(0, one, zero, zero, one, one, one)
        if track_majorant:
            slack = 1 + mpfr(2) ** -(prec - 8)
            for m in range(1, n_max + 1):
                if t_acc[m] > chk_acc[m] * slack:
                    raise RuntimeError(
                        f"termwise majorant violated at level {m}: "
                        f"{t_acc[m]} > {chk_acc[m]}")
        return TraceData(n=n_max, t=tuple(t_acc), tau=tuple(tau_acc), precision=prec)


def det_coefficients(traces: TraceData) -> DetCoefficients:
    """Coefficient arrays from the trace data via the Newton-style recursions."""
    n_max = traces.n
    with working_context(traces.precision):
        a = [mpfr(0)] * (n_max + 1)
        alpha = [mpfr(0)] * (n_max + 1)
        a[0] = mpfr(1)
        t, tau = traces.t, traces.tau
        for n in range(1, n_max + 1):
            acc_a = mpfr(0)
            acc_alpha = mpfr(0)
            for m in range(1, n + 1):
                acc_a += t[m] * a[n - m]
                acc_alpha += tau[m] * a[n - m] + t[m] * alpha[n - m]
            a[n] = -acc_a / n
            alpha[n] = -acc_alpha / n
        return DetCoefficients(n=n_max, a=tuple(a), alpha=tuple(alpha),
                               precision=traces.precision)


def _compositions(n):
    """Ordered tuples of positive integers summing to n (2^(n-1) of them)."""
    if n == 0:
        yield ()
        return
    for head in range(1, n + 1):
        for rest in _compositions(n - head):
            yield (head,) + rest


ORACLE_MAX_ORDER = 8


def composition_sum_oracle(traces: TraceData, n: int):
    """Literal composition-sum evaluation of (a_n, alpha_n), for testing.

    Enumerates all 2^(n-1) ordered compositions of n, so it is restricted to
    n <= 8; the production path is the recursion in ``det_coefficients``.
    """
    if n > ORACLE_MAX_ORDER:
        raise OracleTooLarge(f"oracle supports n <= {ORACLE_MAX_ORDER}, got {n}")
    if n < 1 or n > traces.n:
        raise ValueError(f"need 1 <= n <= {traces.n}, got {n}")
    with working_context(traces.precision):
        t, tau = traces.t, traces.tau
        a_n = mpfr(0)
        alpha_n = mpfr(0)
        for parts in _compositions(n):
            length = len(parts)
            sign_weight = mpfr(-1) ** length / math.factorial(length)
            prod_t = mpfr(1)
            for part in parts:
                prod_t *= t[part] / part
            a_n += sign_weight * prod_t
            for j in range(length):
                term = tau[parts[j]] / parts[j]
                for i, part in enumerate(parts):
                    if i != j:
                        term *= t[part] / part
                alpha_n += sign_weight * term
        return a_n, alpha_n


def lyapunov_estimate(coeffs: DetCoefficients, n_trunc: int) -> mpfr:
    """Level-N approximant (sum alpha_n) / (sum n a_n), sums in increasing n.

    Raises DegenerateDenominator when the denominator is below 2^-(precision/2)
    in absolute value, which signals that the truncation level is too small or
    the ensemble is pathological.
    """
    if n_trunc < 1 or n_trunc > coeffs.n:
        raise ValueError(f"need 1 <= N <= {coeffs.n}, got {n_trunc}")
    with working_context(coeffs.precision):
        numerator = mpfr(0)
        denominator = mpfr(0)
        for n in range(1, n_trunc + 1):
            numerator += coeffs.alpha[n]
            denominator += n * coeffs.a[n]
        if abs(denominator) < mpfr(2) ** -(coeffs.precision // 2):
            raise DegenerateDenominator(
                f"|sum n a_n| = {abs(denominator)} at N = {n_trunc}")
        return numerator / denominator
