"""Independent desk-scale validators for the growth rate.

``monte_carlo_lyapunov`` estimates the almost-sure exponential growth rate
(1/n) log ||A_{i1} ... A_{in}|| by direct simulation at hardware double
precision: the oracle only needs a handful of digits, and the point is
independence from the high-precision series pipeline.

Randomness comes from a fixed 64-bit generator so that identical seeds give
bit-identical estimates on any platform.  The generator is splitmix64; all
state arithmetic is modulo 2^64:

    state <- state + 0x9E3779B97F4A7C15
    z <- state
    z <- (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9
    z <- (z XOR (z >> 27)) * 0x94D049BB133111EB
    output <- z XOR (z >> 31)

Uniform floats in [0, 1) take the top 53 bits of an output word.  Trial
number j (0-based) runs its own stream whose initial state is the output
scrambler applied to seed + j * 0x9E3779B97F4A7C15, so trials are
independent of scheduling and may be evaluated in any order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import gmpy2

from .matrix_core import Ensemble, PositiveMatrix2, working_context

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    """splitmix64 output scrambler (a bijection on 64-bit words)."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Minimal splitmix64 stream; see the module docstring for the transition."""

    __slots__ = ("state",)

    def __init__(self, state: int):
        self.state = state & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK64
        return _mix64(self.state)

    def next_unit(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * 2.0 ** -53


def trial_stream(seed: int, trial_index: int) -> SplitMix64:
    """Per-trial stream: scrambled offset keeps streams unrelated."""
    return SplitMix64(_mix64((seed + _GOLDEN * trial_index) & _MASK64))


def _operator_norm(a: float, b: float, c: float, d: float) -> float:
    # Largest singular value of [[a,b],[c,d]]: sqrt of the dominant eigenvalue
    # of the Gram matrix, in closed form.
    g11 = a * a + c * c
    g22 = b * b + d * d
    g12 = a * b + c * d
    diff = g11 - g22
    return math.sqrt((g11 + g22 + math.sqrt(diff * diff + 4 * g12 * g12)) / 2)


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo estimate of the growth rate with its standard error."""

    mean: float
    stderr: float
    steps: int
    trials: int
    seed: int


def monte_carlo_lyapunov(ensemble: Ensemble, steps: int, trials: int, seed: int,
                         renorm_interval: int = 32) -> McEstimate:
    """Simulate random products and average (1/steps) * log of the norm.

    The running product is divided by its norm every ``renorm_interval``
    steps, with the logs accumulated, so no overflow occurs for any realistic
    step count.  Deterministic given (seed, steps, trials, ensemble).
    """
    if steps < 1:
        raise ValueError("steps must be at least 1")
    if trials < 2:
        raise ValueError("need at least 2 trials for a standard error")
    mats = [(float(m.a), float(m.b), float(m.c), float(m.d))
            for m in ensemble.matrices]
    cumulative = []
    running = 0.0
    for p in ensemble.probabilities:
        running += float(p)
        cumulative.append(running)
    last = len(mats) - 1

    estimates = []
    for trial in range(trials):
        rng = trial_stream(seed, trial)
        pa, pb, pc, pd = 1.0, 0.0, 0.0, 1.0
        log_norm = 0.0
        for step in range(1, steps + 1):
            u = rng.next_unit()
            idx = last
            for j, threshold in enumerate(cumulative):
                if u < threshold:
                    idx = j
                    break
            ma, mb, mc, md = mats[idx]
            pa, pb, pc, pd = (pa * ma + pb * mc, pa * mb + pb * md,
                              pc * ma + pd * mc, pc * mb + pd * md)
            if step % renorm_interval == 0:
                norm = _operator_norm(pa, pb, pc, pd)
                pa, pb, pc, pd = pa / norm, pb / norm, pc / norm, pd / norm
                log_norm += math.log(norm)
        log_norm += math.log(_operator_norm(pa, pb, pc, pd))
        estimates.append(log_norm / steps)

    mean = sum(estimates) / trials
    variance = sum((x - mean) ** 2 for x in estimates) / (trials - 1)
    stderr = math.sqrt(variance / trials)
    return McEstimate(mean=mean, stderr=stderr, steps=steps, trials=trials,
                      seed=seed)


def exact_single_matrix(m: PositiveMatrix2) -> gmpy2.mpfr:
    """Growth rate of the constant sequence: log of the dominant eigenvalue."""
    with working_context(m.precision):
        diff = m.a - m.d
        disc = diff * diff + 4 * (m.b * m.c)
        lam1 = (m.a + m.d + gmpy2.sqrt(disc)) / 2
        return gmpy2.log(lam1)
