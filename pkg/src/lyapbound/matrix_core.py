"""Arbitrary-precision arithmetic for ensembles of positive 2x2 matrices.

All real numbers are MPFR floats (via gmpy2) carried at a configurable
working precision, 512 mantissa bits by default.  Input entries are accepted
as exact decimal strings, ``"p/q"`` ratio strings, ints, Fractions, or
floats; every value is converted to an exact rational first and rounded
exactly once into working precision, so all derived constants are
reproducible and independent of platform float parsing.

The module provides:

* ``PositiveMatrix2``      validated positive invertible 2x2 matrix
* ``spectral_pair``        dominant/subdominant eigenvalues
* ``product``              left-to-right matrix products
* ``validate_ensemble``    (matrices, probability vector) validation
* ``compute_constants``    the effective constants controlling convergence
  and error bounds of the determinant-coefficient algorithm:

  - ``c1``   worst column-sum distortion, max over matrices of
             ``{a+c, b+d, 1/(a+c), 1/(b+d)}``; equals 1 exactly when every
             matrix is column stochastic (then the top Lyapunov exponent
             is 0 and the pipeline may short-circuit)
  - ``ratio_bounds``  per-matrix ``R = max(a/c, c/a, b/d, d/b)``
  - ``r``    worst-case projective contraction proxy ``max (R-1)/(R+1)``
  - ``theta``  max over matrices of ``arcsin(|a+c-b-d| / (a+b+c+d))``
  - ``c2``   ``sqrt((log c1)^2 + theta^2)``
  - ``c0``   ``1 / (r sqrt(1 - r^2))``
  - ``birkhoff_coeffs``    per-matrix projective contraction coefficient
             ``(1 - sqrt(psi)) / (1 + sqrt(psi))``, ``psi = min(ad/bc, bc/ad)``
  - ``birkhoff_weighted``  probability-weighted average of the above
  - ``product_start``      minimal ``M >= 2`` with ``c0 * r^((M+1)/2) < 1``
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Sequence

import gmpy2
from gmpy2 import mpfr, mpq

from .exceptions import BadProbabilityVector, NonPositiveEntry, SingularMatrix

DEFAULT_PRECISION = 512

_MPQ_TYPE = type(mpq(1))
_MPFR_TYPE = type(mpfr(1))
_MPZ_TYPE = type(gmpy2.mpz(1))


def working_context(precision_bits: int):
    """Fresh round-to-nearest MPFR context at the given mantissa precision."""
    return gmpy2.context(precision=precision_bits)


def to_exact_rational(value) -> mpq:
    """Convert an input scalar to an exact rational.

    Accepted forms: int, Fraction, gmpy2 mpq/mpz/mpfr, float (taken at its
    exact binary value), decimal strings ("2", "0.35", "1e-3"), and ratio
    strings ("13/28").
    """
    if isinstance(value, bool):
        raise ValueError("boolean is not a number")
    if isinstance(value, (int, _MPZ_TYPE)):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, _MPQ_TYPE):
        return value
    if isinstance(value, (float, _MPFR_TYPE)):
        return mpq(value)  # dyadic, exact
    if isinstance(value, str):
        text = value.strip()
        try:
            if "/" in text:
                num, den = text.split("/")
                return mpq(Fraction(Decimal(num.strip())) / Fraction(Decimal(den.strip())))
            return mpq(Fraction(Decimal(text)))
        except (InvalidOperation, ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse {value!r} as a real number") from exc
    raise ValueError(f"unsupported numeric type {type(value).__name__}")


def parse_real(value, precision_bits: int = DEFAULT_PRECISION) -> mpfr:
    """Parse to an exact rational, then round once into working precision."""
    rational = to_exact_rational(value)
    with working_context(precision_bits):
        return mpfr(rational)


@dataclass(frozen=True)
class PositiveMatrix2:
    """2x2 matrix [[a, b], [c, d]] with strictly positive entries and det != 0."""

    a: mpfr
    b: mpfr
    c: mpfr
    d: mpfr

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            entry = getattr(self, name)
            if not entry > 0:
                raise NonPositiveEntry(f"entry {name}={entry} must be strictly positive")
        if self.det() == 0:
            raise SingularMatrix("determinant is zero at working precision")

    @classmethod
    def from_rows(cls, rows, precision_bits: int = DEFAULT_PRECISION) -> "PositiveMatrix2":
        """Build from nested [[a, b], [c, d]] raw values."""
        try:
            (a, b), (c, d) = rows
        except (TypeError, ValueError) as exc:
            raise ValueError("matrix must be a 2x2 nested sequence") from exc
        return cls(*(parse_real(x, precision_bits) for x in (a, b, c, d)))

    @property
    def precision(self) -> int:
        return max(self.a.precision, self.b.precision, self.c.precision, self.d.precision)

    def det(self) -> mpfr:
        with working_context(self.precision):
            return self.a * self.d - self.b * self.c

    def trace(self) -> mpfr:
        with working_context(self.precision):
            return self.a + self.d

    def entries(self):
        return ((self.a, self.b), (self.c, self.d))

    def scale(self, factor: mpfr) -> "PositiveMatrix2":
        with working_context(self.precision):
            return PositiveMatrix2(self.a * factor, self.b * factor,
                                   self.c * factor, self.d * factor)


@dataclass(frozen=True)
class SpectralPair:
    """Eigenvalues of a positive 2x2 matrix: lambda1 dominant, |lambda2| < lambda1."""

    lambda1: mpfr
    lambda2: mpfr


def spectral_pair(m: PositiveMatrix2, precision_bits: int | None = None) -> SpectralPair:
    """Eigenvalues of a positive matrix.

    Positivity makes the discriminant (a-d)^2 + 4bc strictly positive, so both
    eigenvalues are real and distinct and the dominant one is positive.  The
    dominant root takes the + branch of the quadratic formula; the second is
    recovered as det/lambda1 to avoid subtractive cancellation when the
    eigenvalues are far apart.
    """
    prec = precision_bits if precision_bits is not None else m.precision
    with working_context(prec):
        diff = m.a - m.d
        disc = diff * diff + 4 * (m.b * m.c)
        root = gmpy2.sqrt(disc)
        lambda1 = (m.a + m.d + root) / 2
        lambda2 = m.det() / lambda1
        return SpectralPair(lambda1, lambda2)


def product(ms: Sequence[PositiveMatrix2]) -> PositiveMatrix2:
    """Left-to-right product of a nonempty list of matrices."""
    if not ms:
        raise ValueError("product of an empty list is undefined")
    prec = max(m.precision for m in ms)
    with working_context(prec):
        a, b, c, d = ms[0].a, ms[0].b, ms[0].c, ms[0].d
        for m in ms[1:]:
            a, b, c, d = (a * m.a + b * m.c, a * m.b + b * m.d,
                          c * m.a + d * m.c, c * m.b + d * m.d)
        return PositiveMatrix2(a, b, c, d)


@dataclass(frozen=True)
class Ensemble:
    """A finite family of positive invertible matrices with selection probabilities."""

    matrices: tuple[PositiveMatrix2, ...]
    probabilities: tuple[mpfr, ...]
    precision: int = DEFAULT_PRECISION

    @property
    def k(self) -> int:
        return len(self.matrices)


def probability_sum_tolerance(precision_bits: int) -> mpfr:
    """Slack allowed on |sum p_i - 1|; inputs given as decimal strings cannot sum exactly."""
    with working_context(precision_bits):
        return mpfr(2) ** -(precision_bits - 16)


def validate_ensemble(matrices, probabilities,
                      precision_bits: int = DEFAULT_PRECISION) -> Ensemble:
    """Parse and validate raw matrices and a probability vector.

    Raises NonPositiveEntry, SingularMatrix, or BadProbabilityVector.
    """
    if not matrices:
        raise ValueError("ensemble needs at least one matrix")
    parsed = []
    for m in matrices:
        if isinstance(m, PositiveMatrix2):
            parsed.append(PositiveMatrix2.from_rows(m.entries(), precision_bits))
        else:
            parsed.append(PositiveMatrix2.from_rows(m, precision_bits))
    if len(probabilities) != len(parsed):
        raise BadProbabilityVector(
            f"{len(parsed)} matrices but {len(probabilities)} probabilities")
    probs = tuple(parse_real(p, precision_bits) for p in probabilities)
    with working_context(precision_bits):
        for p in probs:
            if not p > 0:
                raise BadProbabilityVector(f"probability {p} must be strictly positive")
        total = mpfr(0)
        for p in probs:
            total += p
        if abs(total - 1) > probability_sum_tolerance(precision_bits):
            raise BadProbabilityVector(f"probabilities sum to {total}, not 1")
    return Ensemble(tuple(parsed), probs, precision_bits)


@dataclass(frozen=True)
class EnsembleConstants:
    """Effective constants of an ensemble (see module docstring for formulas)."""

    c1: mpfr
    ratio_bounds: tuple[mpfr, ...]
    r: mpfr
    theta: mpfr
    c2: mpfr
    c0: mpfr
    birkhoff_coeffs: tuple[mpfr, ...]
    birkhoff_weighted: mpfr
    product_start: int
    is_all_column_stochastic: bool
    precision: int


def compute_constants(ensemble: Ensemble) -> EnsembleConstants:
    """All effective constants of the ensemble, at its working precision.

    When ``c1 == 1`` every matrix is column stochastic; the flag is set and the
    caller may short-circuit with a zero Lyapunov exponent.  That situation is
    a legitimate result, not an error.
    """
    prec = ensemble.precision
    with working_context(prec):
        c1 = mpfr(0)
        r = mpfr(0)
        theta = mpfr(0)
        ratio_bounds = []
        birkhoff = []
        for m in ensemble.matrices:
            a, b, c, d = m.a, m.b, m.c, m.d
            col1 = a + c
            col2 = b + d
            c1 = max(c1, col1, col2, 1 / col1, 1 / col2)
            ratio = max(a / c, c / a, b / d, d / b)
            ratio_bounds.append(ratio)
            r = max(r, (ratio - 1) / (ratio + 1))
            theta = max(theta, gmpy2.asin(abs(a + c - b - d) / (a + b + c + d)))
            ad, bc = a * d, b * c
            psi_root = gmpy2.sqrt(min(ad / bc, bc / ad))
            birkhoff.append((1 - psi_root) / (1 + psi_root))
        c2 = gmpy2.sqrt(gmpy2.log(c1) ** 2 + theta ** 2)
        c0 = 1 / (r * gmpy2.sqrt(1 - r * r))
        weighted = mpfr(0)
        for p, tau in zip(ensemble.probabilities, birkhoff):
            weighted += p * tau
        # minimal M >= 2 with c0 * r^((M+1)/2) < 1; the factor shrinks by
        # sqrt(r) per step so a linear scan terminates
        sqrt_r = gmpy2.sqrt(r)
        m_start = 2
        factor = c0 * sqrt_r ** (m_start + 1)
        while factor >= 1:
            m_start += 1
            factor *= sqrt_r
        stochastic = abs(c1 - 1) <= probability_sum_tolerance(prec)
        return EnsembleConstants(
            c1=c1,
            ratio_bounds=tuple(ratio_bounds),
            r=r,
            theta=theta,
            c2=c2,
            c0=c0,
            birkhoff_coeffs=tuple(birkhoff),
            birkhoff_weighted=weighted,
            product_start=m_start,
            is_all_column_stochastic=stochastic,
            precision=prec,
        )
