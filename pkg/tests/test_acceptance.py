"""Acceptance suite: the eight delivery criteria, one pass/fail line each.

Run with ``pytest -v -s tests/test_acceptance.py`` to see the lines as they
print.  Criterion 4 enumerates words to depth 22 for both demo ensembles and
takes a couple of minutes; everything else is fast.
"""

import random
import time
from fractions import Fraction

import gmpy2
import pytest
from gmpy2 import mpfr, mpq

from lyapbound import (BadProbabilityVector, NonPositiveEntry, SingularMatrix,
                       coefficient_bounds_report, composition_sum_oracle,
                       compute_constants, compute_traces, det_coefficients,
                       error_bound, exact_single_matrix, job_from_dict,
                       lyapunov_estimate, monte_carlo_lyapunov, optimal_scaling,
                       run_job, validate_ensemble, working_context)

from _refs import (BOUNDS_51, BOUNDS_51_OPT, BOUNDS_52, EX51_MATRICES,
                   EX51_PROBS, EX52_MATRICES, EX52_PROBS, LAMBDA_51, LAMBDA_52,
                   STOCHASTIC_MATRICES, STOCHASTIC_PROBS, VALID_FROM_51,
                   VALID_FROM_51_OPT, leading_digits_match, rel_close)

PREC = 512


def check(criterion, ok, detail):
    print(f"[criterion {criterion}] {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, f"criterion {criterion}: {detail}"


def job_51(**overrides):
    base = {"matrices": [[list(r) for r in m] for m in EX51_MATRICES],
            "probabilities": list(EX51_PROBS), "max_n": 10,
            "precision_bits": 512, "digits": 40}
    base.update(overrides)
    return job_from_dict(base)


def job_52(**overrides):
    base = {"matrices": [[list(r) for r in m] for m in EX52_MATRICES],
            "probabilities": list(EX52_PROBS), "max_n": 15,
            "precision_bits": 512, "digits": 40}
    base.update(overrides)
    return job_from_dict(base)


def test_criterion_1_reference_reproduction_first_ensemble():
    start = time.perf_counter()
    report = run_job(job_51())
    elapsed = time.perf_counter() - start
    mismatches = [row.n for row in report.rows
                  if not leading_digits_match(row.lyapunov, LAMBDA_51[row.n])]
    check(1, not mismatches and elapsed < 10.0,
          f"Lambda_1..10 match 38+ digits (mismatches={mismatches}), "
          f"runtime {elapsed:.2f}s < 10s")


def test_criterion_2_bounds_first_ensemble(ex51, consts51):
    failures = []
    for n in range(1, 11):
        report = error_bound(n, consts51)
        if n < VALID_FROM_51:
            if report.valid:
                failures.append(f"unexpected valid at N={n}")
        elif not (report.valid and rel_close(report.bound, BOUNDS_51[n], 0.05)):
            failures.append(f"plain bound off at N={n}")
    scaling = optimal_scaling(ex51)
    for n in range(1, 11):
        report = error_bound(n, scaling.new_constants)
        if n < VALID_FROM_51_OPT:
            if report.valid:
                failures.append(f"unexpected valid (optimized) at N={n}")
        elif not (report.valid and rel_close(report.bound, BOUNDS_51_OPT[n], 0.05)):
            failures.append(f"optimized bound off at N={n}")
    with working_context(PREC):
        tol = mpfr(2) ** -(PREC - 8)
        root2 = gmpy2.sqrt(mpfr(2))
        if abs(scaling.lambda0 - 1 / gmpy2.sqrt(root2)) > tol:
            failures.append("lambda0 != 2^(-1/4)")
        if abs(scaling.new_constants.c1 - (3 + 2 * root2)) > tol * 8:
            failures.append("scaled c1 != 3 + 2*sqrt(2)")
    check(2, not failures,
          f"bounds within 5% of the reference tables where valid, "
          f"lambda0 and scaled c1 exact ({failures or 'no failures'})")


def test_criterion_3_reference_reproduction_second_ensemble(consts52):
    start = time.perf_counter()
    report = run_job(job_52())
    elapsed = time.perf_counter() - start
    failures = [row.n for row in report.rows
                if not leading_digits_match(row.lyapunov, LAMBDA_52[row.n])]
    bound_15 = error_bound(15, consts52).bound
    if not rel_close(bound_15, BOUNDS_52[15], 0.05):
        failures.append("bound(15)")
    with working_context(PREC):
        if consts52.r != mpfr("0.5"):
            failures.append("r != 1/2")
        if abs(consts52.birkhoff_weighted - mpq(13, 28)) > mpfr(2) ** -(PREC - 16):
            failures.append("weighted coefficient != 13/28")
    check(3, not failures and elapsed < 60.0,
          f"Lambda_15 to 38+ digits, bound(15) within 5%, r = 1/2, "
          f"weighted coefficient = 13/28, runtime {elapsed:.1f}s < 60s "
          f"({failures or 'no failures'})")


def test_criterion_4_soundness_self_check():
    # reference values Lambda_{N+10} need traces to depth 22; 256 bits gives
    # ~77 decimal digits, far beyond the smallest bound compared here
    deep_prec = 256
    failures = []
    for name, mats, probs, extra_constants in (
            ("first", EX51_MATRICES, EX51_PROBS, True),
            ("second", EX52_MATRICES, EX52_PROBS, False)):
        ensemble = validate_ensemble(mats, probs, deep_prec)
        constants = compute_constants(ensemble)
        traces = compute_traces(ensemble, constants, 22)
        coeffs = det_coefficients(traces)
        with working_context(deep_prec):
            estimates = {n: lyapunov_estimate(coeffs, n) for n in range(1, 23)}
            constant_sets = [("plain", constants)]
            if extra_constants:
                constant_sets.append(("optimized",
                                      optimal_scaling(ensemble).new_constants))
            for label, consts in constant_sets:
                for n in range(1, 13):
                    report = error_bound(n, consts)
                    if not report.valid:
                        continue
                    gap = abs(estimates[n + 10] - estimates[n])
                    if gap > report.bound:
                        failures.append(f"{name}/{label} N={n}: {gap} > {report.bound}")
    check(4, not failures,
          f"|Lambda_(N+10) - Lambda_N| <= bound(N) for every valid N <= 12 "
          f"in both ensembles ({failures or 'no violations'})")


def _draw_ensemble(rng, k):
    while True:
        mats = [[[Fraction(rng.randint(100, 1000), 100) for _ in range(2)]
                 for _ in range(2)] for _ in range(k)]
        weights = [rng.randint(1, 9) for _ in range(k)]
        total = sum(weights)
        probs = [Fraction(w, total) for w in weights]
        try:
            ensemble = validate_ensemble(mats, probs)
        except SingularMatrix:
            continue
        return ensemble, mats, probs


def _estimates(mats, probs, n_max):
    e = validate_ensemble(mats, probs)
    c = compute_constants(e)
    dc = det_coefficients(compute_traces(e, c, n_max))
    return dc, [lyapunov_estimate(dc, n) for n in range(1, n_max + 1)]


def test_criterion_5_algebraic_invariants():
    rng = random.Random(20260809)
    n_max = 6
    failures = []
    tested = 0
    with working_context(PREC):
        tol = mpfr(2) ** -(PREC - 32)
        while tested < 100:
            k = tested % 3 + 1
            ensemble, mats, probs = _draw_ensemble(rng, k)
            constants = compute_constants(ensemble)
            traces = compute_traces(ensemble, constants, n_max)
            coeffs = det_coefficients(traces)
            denominator = sum(n * coeffs.a[n] for n in range(1, n_max + 1))
            if abs(denominator) < mpfr("1e-6"):
                continue  # redraw: near-degenerate denominators amplify rounding
            tested += 1
            base = [lyapunov_estimate(coeffs, n) for n in range(1, n_max + 1)]
            # (a) recursion agrees with the literal composition sums
            for n in range(1, n_max + 1):
                a_n, alpha_n = composition_sum_oracle(traces, n)
                if (abs(coeffs.a[n] - a_n) > tol * max(1, abs(a_n))
                        or abs(coeffs.alpha[n] - alpha_n) > tol * max(1, abs(alpha_n))):
                    failures.append(f"#{tested} oracle n={n}")
            # (b) exact scale shift by c in {2, 1/3}
            for scale in (Fraction(2), Fraction(1, 3)):
                scaled = [[[scale * x for x in row] for row in m] for m in mats]
                _, shifted = _estimates(scaled, probs, n_max)
                log_c = gmpy2.log(mpfr(mpq(scale.numerator, scale.denominator)))
                if any(abs(s - b - log_c) > tol for s, b in zip(shifted, base)):
                    failures.append(f"#{tested} scale {scale}")
            # (c) conjugation invariance for a random diagonal scaling
            u = Fraction(rng.randint(1, 16), rng.randint(1, 16))
            conj = [[[m[0][0], u * m[0][1]], [m[1][0] / u, m[1][1]]] for m in mats]
            _, conjugated = _estimates(conj, probs, n_max)
            if any(abs(cv - b) > tol * max(1, abs(b))
                   for cv, b in zip(conjugated, base)):
                failures.append(f"#{tested} conjugation u={u}")
            # (d) single-matrix exactness
            if k == 1:
                exact = exact_single_matrix(ensemble.matrices[0])
                if any(abs(b - exact) > tol * max(1, abs(exact)) for b in base):
                    failures.append(f"#{tested} single-matrix log")
    check(5, tested == 100 and not failures,
          f"100 random ensembles: oracle match, scale shift, conjugation "
          f"invariance, single-matrix exactness ({failures or 'no failures'})")


def test_criterion_6_monte_carlo_cross_check():
    failures = []
    for name, mats, probs, reference in (
            ("first", EX51_MATRICES, EX51_PROBS, LAMBDA_51[10]),
            ("second", EX52_MATRICES, EX52_PROBS, LAMBDA_52[10])):
        ensemble = validate_ensemble(mats, probs)
        estimate = monte_carlo_lyapunov(ensemble, steps=10000, trials=100, seed=1)
        again = monte_carlo_lyapunov(ensemble, steps=10000, trials=100, seed=1)
        if estimate != again:
            failures.append(f"{name}: not deterministic")
        gap = abs(estimate.mean - float(Fraction(_dec(reference))))
        if gap > 4 * estimate.stderr:
            failures.append(f"{name}: |{estimate.mean} - {reference[:12]}...| "
                            f"= {gap} > 4 * {estimate.stderr}")
    check(6, not failures,
          f"MC within 4 standard errors of Lambda_10 and bit-deterministic "
          f"({failures or 'no failures'})")


def _dec(text):
    from decimal import Decimal
    return Decimal(text)


def test_criterion_7_coefficient_bound_conformance(coeffs51, consts51,
                                                   coeffs52, consts52):
    bad_51 = coefficient_bounds_report(coeffs51, consts51)
    bad_52 = coefficient_bounds_report(coeffs52, consts52)
    check(7, not bad_51 and not bad_52,
          f"|a_n| and |alpha_n| under their decay majorants for all n "
          f"(violations: {bad_51 + bad_52 or 'none'})")


def test_criterion_8_degenerate_handling():
    failures = []
    report = run_job(job_from_dict({
        "matrices": [[list(r) for r in m] for m in STOCHASTIC_MATRICES],
        "probabilities": list(STOCHASTIC_PROBS)}))
    if not (report.stochastic_shortcut and len(report.rows) == 1
            and report.rows[0].lyapunov == "0." + "0" * 40):
        failures.append("stochastic shortcut did not produce an exact zero row")
    try:
        validate_ensemble([[["1", "1"], ["1", "1"]]], ["1"])
        failures.append("singular matrix accepted")
    except SingularMatrix:
        pass
    try:
        validate_ensemble([[["0", "1"], ["1", "1"]]], ["1"])
        failures.append("nonpositive entry accepted")
    except NonPositiveEntry:
        pass
    try:
        validate_ensemble([[list(r) for r in m] for m in EX51_MATRICES],
                          ["0.6", "0.6"])
        failures.append("bad probability vector accepted")
    except BadProbabilityVector:
        pass
    check(8, not failures,
          f"stochastic shortcut returns exactly 0, malformed inputs rejected "
          f"with the specific errors ({failures or 'no failures'})")
