"""Command-line front end and job orchestration.

Jobs are JSON documents; matrix entries and probabilities must be decimal
strings, "p/q" ratio strings, or integers (JSON floats are rejected to keep
inputs exact).  Example:

    {
      "matrices": [[["2", "1"], ["1", "1"]], [["3", "1"], ["2", "1"]]],
      "probabilities": ["1/2", "1/2"],
      "max_n": 10,
      "precision_bits": 512,
      "optimize_basis": true,
      "digits": 40,
      "output_format": "table",
      "verify": {"steps": 10000, "trials": 100, "seed": 1}
    }

Subcommands:

    compute <job>    full pipeline: constants, optional basis optimization,
                     approximants Lambda_1..Lambda_N with rigorous bounds
    verify  <job>    Monte Carlo cross-check only
    constants <job>  effective constants before/after basis optimization

The pipeline reruns at doubled precision and rejects the report if any
requested output digit of any Lambda_N changes (exit code 4).  Exit codes:
0 success, 2 configuration error, 3 enumeration budget exceeded,
4 precision unstable.

Decimal output is exact: values are converted to rationals and rounded
half-even at the requested digit count, so identical jobs render identical
strings on any platform.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

from gmpy2 import mpfr

from .basis_optimizer import ScalingResult, optimal_scaling
from .error_bounds import error_bound
from .exceptions import (BadProbabilityVector, BudgetExceeded, ConfigError,
                         DegenerateDenominator, NonPositiveEntry,
                         PrecisionUnstable, SingularMatrix)
from .matrix_core import (DEFAULT_PRECISION, EnsembleConstants,
                          compute_constants, validate_ensemble)
from .oracle import McEstimate, monte_carlo_lyapunov
from .trace_series import compute_traces, det_coefficients, lyapunov_estimate

OUTPUT_FORMATS = ("table", "csv", "structured")
DEFAULT_DIGITS = 40


# ---------------------------------------------------------------------------
# exact decimal rendering
# ---------------------------------------------------------------------------

def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    num, den = x.as_integer_ratio()
    return Fraction(int(num), int(den))


def _round_half_even(numerator: int, denominator: int) -> int:
    """Nearest integer to numerator/denominator, ties to even (denominator > 0)."""
    q, rem = divmod(numerator, denominator)
    twice = 2 * rem
    if twice > denominator or (twice == denominator and q % 2):
        q += 1
    return q


def fixed_decimal(x, places: int) -> str:
    """Fixed-point decimal string with `places` fractional digits, half-even."""
    scaled = _as_fraction(x) * 10 ** places
    q = _round_half_even(scaled.numerator, scaled.denominator)
    negative = q < 0
    digits = str(abs(q)).rjust(places + 1, "0")
    text = digits[:-places] + "." + digits[-places:] if places else digits
    return "-" + text if negative else text


def sci_decimal(x, significant: int = 6) -> str:
    """Scientific-notation decimal string with `significant` digits, half-even."""
    fraction = _as_fraction(x)
    if fraction == 0:
        return "0"
    sign = "-" if fraction < 0 else ""
    magnitude = abs(fraction)
    exponent = len(str(magnitude.numerator)) - len(str(magnitude.denominator))
    while Fraction(10) ** exponent > magnitude:
        exponent -= 1
    while magnitude >= Fraction(10) ** (exponent + 1):
        exponent += 1
    scaled = magnitude / Fraction(10) ** exponent * 10 ** (significant - 1)
    q = _round_half_even(scaled.numerator, scaled.denominator)
    if q >= 10 ** significant:  # rounded up into the next decade
        q //= 10
        exponent += 1
    digits = str(q)
    return f"{sign}{digits[0]}.{digits[1:]}e{exponent:+03d}"


# ---------------------------------------------------------------------------
# job configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VerifySpec:
    steps: int = 10000
    trials: int = 100
    seed: int = 1


@dataclass(frozen=True)
class JobConfig:
    matrices: tuple
    probabilities: tuple
    max_n: int = 10
    precision_bits: int = DEFAULT_PRECISION
    optimize_basis: bool = True
    digits: int = DEFAULT_DIGITS
    output_format: str = "table"
    verify: VerifySpec | None = None

    def __post_init__(self):
        if not self.matrices:
            raise ConfigError("matrices must be nonempty")
        if self.max_n < 1:
            raise ConfigError("max_n must be at least 1")
        if self.precision_bits < 64:
            raise ConfigError("precision_bits must be at least 64")
        if self.digits < 1:
            raise ConfigError("digits must be at least 1")
        if self.output_format not in OUTPUT_FORMATS:
            raise ConfigError(f"output_format must be one of {OUTPUT_FORMATS}")


def _check_scalar(value, where: str):
    # JSON floats silently lose exactness; insist on strings or integers.
    if isinstance(value, bool) or isinstance(value, float):
        raise ConfigError(
            f"{where}: use decimal strings, \"p/q\" strings, or integers, "
            f"not {value!r}")
    if not isinstance(value, (str, int)):
        raise ConfigError(f"{where}: unsupported value {value!r}")
    return value


def job_from_dict(raw: dict) -> JobConfig:
    """Validate a parsed job document (strict keys) into a JobConfig."""
    if not isinstance(raw, dict):
        raise ConfigError("job document must be a JSON object")
    allowed = {"matrices", "probabilities", "max_n", "precision_bits",
               "optimize_basis", "digits", "output_format", "verify"}
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigError(f"unknown job keys: {sorted(unknown)}")
    for key in ("matrices", "probabilities"):
        if key not in raw:
            raise ConfigError(f"missing required key {key!r}")
    matrices = raw["matrices"]
    if not isinstance(matrices, list) or not matrices:
        raise ConfigError("matrices must be a nonempty list")
    parsed_matrices = []
    for i, mat in enumerate(matrices):
        if (not isinstance(mat, list) or len(mat) != 2
                or any(not isinstance(row, list) or len(row) != 2 for row in mat)):
            raise ConfigError(f"matrices[{i}] must be a 2x2 nested list")
        parsed_matrices.append(tuple(
            tuple(_check_scalar(x, f"matrices[{i}]") for x in row) for row in mat))
    probabilities = raw["probabilities"]
    if not isinstance(probabilities, list):
        raise ConfigError("probabilities must be a list")
    parsed_probs = tuple(_check_scalar(p, "probabilities") for p in probabilities)

    verify = None
    if raw.get("verify") is not None:
        vraw = raw["verify"]
        if not isinstance(vraw, dict):
            raise ConfigError("verify must be an object")
        vunknown = set(vraw) - {"steps", "trials", "seed"}
        if vunknown:
            raise ConfigError(f"unknown verify keys: {sorted(vunknown)}")
        fields = {}
        for key in ("steps", "trials", "seed"):
            if key in vraw:
                if isinstance(vraw[key], bool) or not isinstance(vraw[key], int):
                    raise ConfigError(f"verify.{key} must be an integer")
                fields[key] = vraw[key]
        verify = VerifySpec(**fields)

    def _int_field(name, default):
        value = raw.get(name, default)
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{name} must be an integer")
        return value

    optimize = raw.get("optimize_basis", True)
    if not isinstance(optimize, bool):
        raise ConfigError("optimize_basis must be a boolean")
    fmt = raw.get("output_format", "table")
    if not isinstance(fmt, str):
        raise ConfigError("output_format must be a string")
    return JobConfig(
        matrices=tuple(parsed_matrices),
        probabilities=parsed_probs,
        max_n=_int_field("max_n", 10),
        precision_bits=_int_field("precision_bits", DEFAULT_PRECISION),
        optimize_basis=optimize,
        digits=_int_field("digits", DEFAULT_DIGITS),
        output_format=fmt,
        verify=verify,
    )


def load_job(path: str) -> JobConfig:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            raw = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read job file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return job_from_dict(raw)


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReportRow:
    n: int
    lyapunov: str
    bound: str


@dataclass(frozen=True)
class ApproximationReport:
    rows: tuple[ReportRow, ...]
    constants_pre: EnsembleConstants
    constants_post: EnsembleConstants | None
    lambda0: mpfr | None
    mc: McEstimate | None
    stochastic_shortcut: bool
    precision_bits: int
    digits: int


def _shortcut_report(cfg: JobConfig, precision_bits: int,
                     pre: EnsembleConstants,
                     scaling: ScalingResult | None) -> ApproximationReport:
    # Column-stochastic (possibly after scaling): the growth rate is exactly 0.
    row = ReportRow(0, fixed_decimal(Fraction(0), cfg.digits), "0")
    return ApproximationReport(
        rows=(row,),
        constants_pre=pre,
        constants_post=scaling.new_constants if scaling else None,
        lambda0=scaling.lambda0 if scaling else None,
        mc=None,
        stochastic_shortcut=True,
        precision_bits=precision_bits,
        digits=cfg.digits,
    )


def _pipeline(cfg: JobConfig, precision_bits: int, include_mc: bool,
              with_bounds: bool = True) -> ApproximationReport:
    ensemble = validate_ensemble(cfg.matrices, cfg.probabilities, precision_bits)
    pre = compute_constants(ensemble)
    if pre.is_all_column_stochastic:
        return _shortcut_report(cfg, precision_bits, pre, None)
    scaling = None
    bound_constants = pre
    if cfg.optimize_basis:
        scaling = optimal_scaling(ensemble)
        if scaling.is_stochastic_after:
            return _shortcut_report(cfg, precision_bits, pre, scaling)
        bound_constants = scaling.new_constants
    # Approximants always come from the input ensemble; the optimized basis
    # only feeds the error bound (the approximants agree by conjugation
    # invariance, so this keeps printed digits independent of the flag).
    traces = compute_traces(ensemble, pre, cfg.max_n)
    coeffs = det_coefficients(traces)
    rows = []
    for n in range(1, cfg.max_n + 1):
        estimate = lyapunov_estimate(coeffs, n)
        if with_bounds:
            report = error_bound(n, bound_constants)
            bound_text = sci_decimal(report.bound) if report.valid else "invalid"
        else:
            bound_text = ""
        rows.append(ReportRow(n, fixed_decimal(estimate, cfg.digits), bound_text))
    mc = None
    if include_mc and cfg.verify is not None:
        mc = monte_carlo_lyapunov(ensemble, cfg.verify.steps, cfg.verify.trials,
                                  cfg.verify.seed)
    return ApproximationReport(
        rows=tuple(rows),
        constants_pre=pre,
        constants_post=scaling.new_constants if scaling else None,
        lambda0=scaling.lambda0 if scaling else None,
        mc=mc,
        stochastic_shortcut=False,
        precision_bits=precision_bits,
        digits=cfg.digits,
    )


def run_job(cfg: JobConfig) -> ApproximationReport:
    """Full pipeline plus the doubled-precision stability check."""
    report = _pipeline(cfg, cfg.precision_bits, include_mc=True)
    if not report.stochastic_shortcut:
        check = _pipeline(cfg, 2 * cfg.precision_bits, include_mc=False,
                          with_bounds=False)
        for base_row, check_row in zip(report.rows, check.rows):
            if base_row.lyapunov != check_row.lyapunov:
                raise PrecisionUnstable(
                    f"Lambda_{base_row.n} changed at {cfg.digits} digits when "
                    f"precision was doubled from {cfg.precision_bits} bits; "
                    f"increase precision_bits")
    return report


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def _constants_dict(constants: EnsembleConstants) -> dict:
    return {
        "c1": sci_decimal(constants.c1, 30),
        "ratio_bounds": [sci_decimal(x, 30) for x in constants.ratio_bounds],
        "r": sci_decimal(constants.r, 30),
        "theta": sci_decimal(constants.theta, 30),
        "c2": sci_decimal(constants.c2, 30),
        "c0": sci_decimal(constants.c0, 30),
        "birkhoff_coeffs": [sci_decimal(x, 30) for x in constants.birkhoff_coeffs],
        "birkhoff_weighted": sci_decimal(constants.birkhoff_weighted, 30),
        "product_start": constants.product_start,
        "is_all_column_stochastic": constants.is_all_column_stochastic,
        "precision": constants.precision,
    }


def _mc_dict(mc: McEstimate) -> dict:
    return {"mean": mc.mean, "stderr": mc.stderr, "steps": mc.steps,
            "trials": mc.trials, "seed": mc.seed}


def report_to_dict(report: ApproximationReport) -> dict:
    return {
        "rows": [{"n": row.n, "lambda": row.lyapunov, "bound": row.bound}
                 for row in report.rows],
        "constants": {
            "pre": _constants_dict(report.constants_pre),
            "post": (_constants_dict(report.constants_post)
                     if report.constants_post else None),
        },
        "lambda0": sci_decimal(report.lambda0, 30) if report.lambda0 is not None else None,
        "mc": _mc_dict(report.mc) if report.mc else None,
        "stochastic_shortcut": report.stochastic_shortcut,
        "precision_bits": report.precision_bits,
        "digits": report.digits,
    }


def render_structured(report: ApproximationReport) -> str:
    return json.dumps(report_to_dict(report), indent=2)


def render_csv(report: ApproximationReport) -> str:
    lines = ["N,lambda_N,bound"]
    lines.extend(f"{row.n},{row.lyapunov},{row.bound}" for row in report.rows)
    return "\n".join(lines)


def render_table(report: ApproximationReport) -> str:
    width_n = max(len("N"), *(len(str(row.n)) for row in report.rows))
    width_l = max(len("Lambda_N"), *(len(row.lyapunov) for row in report.rows))
    lines = [f"{'N':>{width_n}}  {'Lambda_N':<{width_l}}  bound"]
    for row in report.rows:
        lines.append(f"{row.n:>{width_n}}  {row.lyapunov:<{width_l}}  {row.bound}")
    if report.stochastic_shortcut:
        lines.append("# all matrices column stochastic (possibly after scaling); "
                     "growth rate is exactly 0")
    if report.lambda0 is not None:
        lines.append(f"# basis optimization: lambda0 = {sci_decimal(report.lambda0, 12)}, "
                     f"r {sci_decimal(report.constants_pre.r, 6)} -> "
                     f"{sci_decimal(report.constants_post.r, 6)}")
    if report.mc is not None:
        mc = report.mc
        lines.append(f"# mc check: mean = {mc.mean!r}, stderr = {mc.stderr!r}, "
                     f"steps = {mc.steps}, trials = {mc.trials}, seed = {mc.seed}")
    return "\n".join(lines)


def render_report(report: ApproximationReport, fmt: str) -> str:
    if fmt == "csv":
        return render_csv(report)
    if fmt == "structured":
        return render_structured(report)
    return render_table(report)


def render_mc(mc: McEstimate, fmt: str) -> str:
    if fmt == "csv":
        return ("mean,stderr,steps,trials,seed\n"
                f"{mc.mean!r},{mc.stderr!r},{mc.steps},{mc.trials},{mc.seed}")
    if fmt == "structured":
        return json.dumps(_mc_dict(mc), indent=2)
    return "\n".join([
        f"mean   = {mc.mean!r}",
        f"stderr = {mc.stderr!r}",
        f"steps  = {mc.steps}",
        f"trials = {mc.trials}",
        f"seed   = {mc.seed}",
    ])


def render_constants(pre: EnsembleConstants, post: EnsembleConstants | None,
                     fmt: str) -> str:
    if fmt == "structured":
        return json.dumps({"pre": _constants_dict(pre),
                           "post": _constants_dict(post) if post else None},
                          indent=2)
    if fmt == "csv":
        lines = ["section,name,value"]
        for section, constants in (("pre", pre), ("post", post)):
            if constants is None:
                continue
            for name, value in _constants_dict(constants).items():
                lines.append(f"{section},{name},\"{value}\"")
        return "\n".join(lines)
    lines = []
    for section, constants in (("pre-optimization", pre), ("post-optimization", post)):
        if constants is None:
            continue
        lines.append(f"[{section}]")
        for name, value in _constants_dict(constants).items():
            lines.append(f"  {name} = {value}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lyapbound",
        description="Growth rates of random products of positive 2x2 matrices "
                    "with rigorous error bounds")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("job", help="path to the JSON job file")
        p.add_argument("--format", dest="output_format", choices=OUTPUT_FORMATS)
        p.add_argument("--digits", type=int)

    p_compute = sub.add_parser("compute", help="run the full pipeline")
    add_common(p_compute)
    p_compute.add_argument("--max-n", type=int, dest="max_n")
    p_compute.add_argument("--precision-bits", type=int, dest="precision_bits")
    p_compute.add_argument("--no-optimize", action="store_true")
    p_compute.add_argument("--seed", type=int, help="override verify seed")

    p_verify = sub.add_parser("verify", help="Monte Carlo cross-check only")
    add_common(p_verify)
    p_verify.add_argument("--steps", type=int)
    p_verify.add_argument("--trials", type=int)
    p_verify.add_argument("--seed", type=int)

    p_constants = sub.add_parser("constants", help="print effective constants")
    add_common(p_constants)
    p_constants.add_argument("--precision-bits", type=int, dest="precision_bits")
    p_constants.add_argument("--no-optimize", action="store_true")
    return parser


def _apply_overrides(cfg: JobConfig, args) -> JobConfig:
    updates = {}
    for field in ("max_n", "precision_bits", "digits", "output_format"):
        value = getattr(args, field, None)
        if value is not None:
            updates[field] = value
    if getattr(args, "no_optimize", False):
        updates["optimize_basis"] = False
    if getattr(args, "seed", None) is not None and args.command == "compute":
        base = cfg.verify or VerifySpec()
        updates["verify"] = dataclasses.replace(base, seed=args.seed)
    if updates:
        cfg = dataclasses.replace(cfg, **updates)
    return cfg


_CONFIG_ERRORS = (ConfigError, NonPositiveEntry, SingularMatrix,
                  BadProbabilityVector, DegenerateDenominator, ValueError)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _apply_overrides(load_job(args.job), args)
        if args.command == "compute":
            print(render_report(run_job(cfg), cfg.output_format))
        elif args.command == "verify":
            spec = cfg.verify or VerifySpec()
            if args.steps is not None:
                spec = dataclasses.replace(spec, steps=args.steps)
            if args.trials is not None:
                spec = dataclasses.replace(spec, trials=args.trials)
            if args.seed is not None:
                spec = dataclasses.replace(spec, seed=args.seed)
            ensemble = validate_ensemble(cfg.matrices, cfg.probabilities,
                                         cfg.precision_bits)
            mc = monte_carlo_lyapunov(ensemble, spec.steps, spec.trials, spec.seed)
            print(render_mc(mc, cfg.output_format))
        else:  # constants
            ensemble = validate_ensemble(cfg.matrices, cfg.probabilities,
                                         cfg.precision_bits)
            pre = compute_constants(ensemble)
            post = None
            if cfg.optimize_basis and not pre.is_all_column_stochastic:
                post = optimal_scaling(ensemble).new_constants
            print(render_constants(pre, post, cfg.output_format))
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except PrecisionUnstable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except _CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
