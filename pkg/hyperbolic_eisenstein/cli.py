"""
Command-line front end.

    hyperbolic-eisenstein group --config job.json
    hyperbolic-eisenstein eval --config job.json --out results --threads 4
    hyperbolic-eisenstein verify --config job.json --check duality --check collar
    hyperbolic-eisenstein degenerate --config job.json

Exit codes: 0 on success, 1 when a result did not converge or a check
failed, 2 when the job configuration is invalid.
"""

import argparse
import csv
import logging
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

from hyperbolic_eisenstein.analysis import (
    collar_separation_margin,
    deck_path,
    degeneration_diagnostic,
    duality_check,
    functional_equation_residual,
    generator_loop,
    l2_norm_estimate,
    standard_collar_check,
)
from hyperbolic_eisenstein.exceptions import (
    ConfigError,
    ConvergenceError,
    DiscretenessError,
    DomainError,
    HyperbolicEisensteinError,
    PoleError,
)
from hyperbolic_eisenstein.group import build_preset, counting_report, explicit_group
from hyperbolic_eisenstein.resolvent import (
    cusp_limit_identity,
    funnel_limit_identity,
    resolvent_lifts,
    select_kernel_convention,
)
from hyperbolic_eisenstein.series import (
    OrbitSum,
    cusp_expansion_report,
    evaluate_chunks,
    family_lifts,
    omega_lifts,
)
from hyperbolic_eisenstein.specfun import b_factor, b_factor_quadrature, k_factor
from hyperbolic_eisenstein.types.models import (
    CheckResult,
    CheckStatus,
    DegenerationSweep,
    FuchsianGroup,
    GridEvaluation,
    GridRecord,
    GroupConfig,
    GroupElement,
    GroupReport,
    JobConfig,
    LimitIdentityReport,
    PointH,
    PresetName,
    SeriesFamily,
    TraceType,
    VerifyReport,
)

logger = logging.getLogger(__name__)

OUT_DIR_ENV = "HYPERBOLIC_EISENSTEIN_OUT_DIR"

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_CONFIG = 2

COUNTING_RADII = (4.0, 6.0, 8.0, 10.0, 12.0, 14.0)

BASE_POINT = PointH(x=0.0, y=1.0)

CSV_COLUMNS = list(GridRecord.model_fields)


def load_job(path: str) -> JobConfig:
    """
    Read and validate a JSON job file.

    Raises:
        ConfigError: If the file cannot be read or does not validate
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    try:
        return JobConfig.model_validate_json(text)
    except ValidationError as e:
        raise ConfigError(f"invalid config {path}: {e}") from e


def build_group(config: GroupConfig) -> FuchsianGroup:
    """
    Build the job's group from a preset or explicit generators.

    Raises:
        ConfigError: If the parameters do not describe a group
        DiscretenessError: If discreteness cannot be certified
    """
    try:
        if config.preset is PresetName.EXPLICIT:
            if not config.generators:
                raise ConfigError("preset 'explicit' needs a generators list")
            return explicit_group(config.generators, config.assert_discrete)
        if config.generators:
            raise ConfigError("generators are only accepted with preset 'explicit'")
        return build_preset(config.preset, config.params)
    except DomainError as e:
        raise ConfigError(str(e)) from e


def output_dir(arg: Optional[str]) -> Path:
    """--out, else $HYPERBOLIC_EISENSTEIN_OUT_DIR, else the working directory."""
    path = Path(arg or os.environ.get(OUT_DIR_ENV) or ".")
    path.mkdir(parents=True, exist_ok=True)
    return path


def _numbered(name: str, index: int, count: int) -> str:
    if count == 1:
        return name
    stem, dot, suffix = name.rpartition(".")
    return f"{stem}_{index}.{suffix}" if dot else f"{name}_{index}"


def _write_json(path: Path, text: str) -> None:
    path.write_text(text + "\n", encoding="utf-8")
    logger.info("wrote %s", path)


# group


def cmd_group(job: JobConfig, out: Path) -> int:
    """Validate the group and report its certificate, δ estimate and counting-bound partials."""
    group = build_group(job.group)
    counting = counting_report(group, BASE_POINT, COUNTING_RADII)
    report = GroupReport(
        preset=group.preset,
        rank=group.rank,
        generators=list(group.generators),
        certificate=group.discreteness_certificate,
        counting=counting,
    )
    if job.outputs.json_path:
        _write_json(out / job.outputs.json_path, report.model_dump_json(indent=2))
    print(f"δ estimate {counting.delta_estimate:.4f} for {group.preset.name.value}")
    return EXIT_OK if counting.truncation_sufficient else EXIT_NUMERICAL


# eval


def _evaluator(job: JobConfig, group: FuchsianGroup, s: complex) -> Callable[[np.ndarray], OrbitSum]:
    family, policy = job.series.family, job.truncation
    if family is SeriesFamily.RESOLVENT:
        if job.series.w is None or len(job.series.w) != 2:
            raise ConfigError("the resolvent family needs series.w = [x, y]")
        try:
            w = PointH(x=job.series.w[0], y=job.series.w[1])
        except ValidationError as e:
            raise ConfigError(f"invalid resolvent point: {e}") from e
        return lambda pts: resolvent_lifts(group, s, pts, w, policy)
    return lambda pts: family_lifts(family, group, s, pts, job.series, policy)


def evaluate_grid(job: JobConfig, group: FuchsianGroup, s: complex, threads: int = 1) -> GridEvaluation:
    """Evaluate the job's series over its grid at one s."""
    if job.grid is None:
        raise ConfigError("the eval command needs a grid section")
    points = job.grid.points()
    chunks = evaluate_chunks(_evaluator(job, group, s), points, threads)
    records: List[GridRecord] = []
    offset = 0
    for chunk in chunks:
        for k in range(chunk.values.shape[0]):
            z = points[offset + k]
            lift = complex(chunk.values[k])
            coeff = lift / z.imag**chunk.weight
            records.append(
                GridRecord(
                    x=float(z.real),
                    y=float(z.imag),
                    re_f=coeff.real,
                    im_f=coeff.imag,
                    re_g=lift.real,
                    im_g=lift.imag,
                    word_len=chunk.word_len,
                    tail=float(chunk.tails[k]),
                )
            )
        offset += chunk.values.shape[0]
    return GridEvaluation(
        family=job.series.family,
        s=s,
        weight=chunks[0].weight if chunks else 0,
        converged=all(chunk.converged for chunk in chunks),
        records=records,
    )


def write_grid_csv(path: Path, evaluation: GridEvaluation) -> None:
    """CSV with a schema comment line, then the header and one row per node."""
    with path.open("w", newline="", encoding="utf-8") as handle:
        handle.write(f"# schema_version: {evaluation.schema_version}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for record in evaluation.records:
            writer.writerow([repr(getattr(record, column)) for column in CSV_COLUMNS])
    logger.info("wrote %s", path)


def read_grid_csv(path: Path) -> List[GridRecord]:
    """Parse a CSV written by `write_grid_csv`."""
    with path.open(newline="", encoding="utf-8") as handle:
        lines = [line for line in handle if not line.startswith("#")]
    return [GridRecord.model_validate(row) for row in csv.DictReader(lines)]


def cmd_eval(job: JobConfig, out: Path, threads: int = 1) -> int:
    """Evaluate the series on the grid for every s and write CSV/JSON files."""
    group = build_group(job.group)
    converged = True
    count = len(job.s_values)
    for index, s in enumerate(job.s_values):
        evaluation = evaluate_grid(job, group, complex(s), threads)
        converged = converged and evaluation.converged
        if job.outputs.csv:
            write_grid_csv(out / _numbered(job.outputs.csv, index, count), evaluation)
        if job.outputs.json_path:
            _write_json(out / _numbered(job.outputs.json_path, index, count), evaluation.model_dump_json(indent=2))
    return EXIT_OK if converged else EXIT_NUMERICAL


# verify


class NotApplicable(Exception):
    """Raised by a check that does not apply to the job's group."""


@dataclass(frozen=True)
class CheckSpec:
    """A verification check: its runner, default tolerance and the smallest resolvable tolerance."""

    run: Callable[[JobConfig, FuchsianGroup], Tuple[float, str]]
    tolerance: float
    floor: float


def _first_s(job: JobConfig, minimum: float, fallback: float) -> complex:
    s = complex(job.s_values[0]) if job.s_values else complex(fallback)
    return s if s.real > minimum else complex(fallback)


def _hyperbolic_generators(group: FuchsianGroup) -> List[int]:
    return [i for i, g in enumerate(group.generators, start=1) if g.trace_type is TraceType.HYPERBOLIC]


def _check_special_functions(job: JobConfig, group: FuchsianGroup) -> Tuple[float, str]:
    grid = np.linspace(1.15, 6.0, 20)
    identity = max(abs(b_factor(1, s) - k_factor(s - 1.0)) / abs(k_factor(s - 1.0)) for s in grid)
    recurrence = max(
        abs(b_factor(q, s + 2.0) * (s**2 - q**2) - s * (s - 1.0) * b_factor(q, s)) / abs(s * (s - 1.0) * b_factor(q, s))
        for q in range(4)
        for s in grid
    )
    quadrature = max(
        abs(b_factor_quadrature(q, s) - b_factor(q, s)) / abs(b_factor(q, s))
        for q in range(4)
        for s in (2.5, 3.7, 5.2)
    )
    value = max(identity, recurrence, quadrature)
    return value, f"b_1 = k(s-1) {identity:.1e}, recurrence {recurrence:.1e}, quadrature {quadrature:.1e}"


def _check_functional_equation(job: JobConfig, group: FuchsianGroup) -> Tuple[float, str]:
    family = job.series.family
    minimum = 0.0 if family is SeriesFamily.HYPERBOLIC else 1.0
    s = _first_s(job, minimum, 2.0)
    try:
        report = functional_equation_residual(family, group, s, config=job.series, trunc=job.truncation)
    except DomainError as e:
        raise NotApplicable(str(e)) from e
    return report.residual, f"{family.value} at s = {s}, word length {report.truncation}"


def _check_duality(job: JobConfig, group: FuchsianGroup) -> Tuple[float, str]:
    c_gen = job.series.c_gen
    if c_gen not in _hyperbolic_generators(group) or group.rank < 2:
        raise NotApplicable("needs a hyperbolic c_gen in a group of rank ≥ 2")
    other = next(i for i in range(1, group.rank + 1) if i != c_gen)
    if group.generators[other - 1].trace_type is TraceType.HYPERBOLIC:
        cycle = generator_loop(group, other)
    else:
        element = GroupElement(matrix=group.generators[other - 1].matrix.normalized(), word=(other,))
        cycle = deck_path(element, PointH(x=0.1, y=1.7))
    deviations = [abs(duality_check(group, c_gen, cycle, s, job.truncation)) for s in (0.5, 1.0, 2.0)]
    return max(deviations), f"deviations at s = 0.5, 1, 2: {[f'{d:.1e}' for d in deviations]}"


def _translation_cusp(group: FuchsianGroup) -> int:
    for index, info in enumerate(group.generators, start=1):
        if info.trace_type is TraceType.PARABOLIC and info.matrix.c == 0.0:
            return index
    raise NotApplicable("needs a cusp at ∞")


def _extrapolated_deviation(report: LimitIdentityReport, target: complex) -> float:
    return abs(complex(report.extrapolated_limit) - target) / abs(target)


def _check_cusp_limit(job: JobConfig, group: FuchsianGroup) -> Tuple[float, str]:
    cusp = _translation_cusp(group)
    s = _first_s(job, 1.0, 2.0)
    report = cusp_limit_identity(group, s, PointH(x=0.3, y=1.1), cusp_gen=cusp, trunc=job.truncation)
    deviations = [f"{d:.1e}" for d in report.deviations]
    if not report.converged:
        return math.inf, f"orbit sums not converged; deviations {deviations}"
    if not report.monotone:
        return math.inf, f"deviations grow with the height above the noise floor {report.noise_floor:.1e}: {deviations}"
    return report.deviation, f"deviations {deviations}, noise floor {report.noise_floor:.1e}"


def _check_funnel_limit(job: JobConfig, group: FuchsianGroup) -> Tuple[float, str]:
    if group.preset.name is not PresetName.CYCLIC_HYPERBOLIC:
        raise NotApplicable("the funnel limit is checked on cyclic_hyperbolic")
    s = _first_s(job, 1.0, 2.0)
    report = funnel_limit_identity(group, s, PointH(x=0.2, y=1.3), trunc=job.truncation)
    derived = complex(report.derived_factor)
    value = _extrapolated_deviation(report, derived)
    return value, f"ratio {complex(report.lhs[-1]):.6f} against {derived:.6f}, extrapolated {value:.1e}"


def _check_kernel_convention(job: JobConfig, group: FuchsianGroup) -> Tuple[float, str]:
    report = select_kernel_convention()
    if not report.unique:
        return math.inf, "no unique kernel convention"
    chosen = max(
        c.residual
        for c in report.candidates
        if (c.third_parameter, c.sign) == (report.selected_third_parameter, report.selected_sign)
    )
    return chosen, f"selected c = {report.selected_third_parameter}, sign {report.selected_sign}"


def _check_collar(job: JobConfig, group: FuchsianGroup) -> Tuple[float, str]:
    value = standard_collar_check()
    detail = f"collar relation {value:.1e}"
    if group.rank >= 2:
        for gen in _hyperbolic_generators(group):
            margin = collar_separation_margin(group, gen)
            detail += f"; generator {gen} separation margin {margin:.3g}"
            if margin < 0.0:
                value = max(value, -margin)
    return value, detail


def _check_cusp_expansion(job: JobConfig, group: FuchsianGroup) -> Tuple[float, str]:
    if group.preset.name is not PresetName.PARABOLIC_PAIR:
        raise NotApplicable("θ^s needs cusps at 0 and ∞")
    s = _first_s(job, 1.0, 2.0)
    report = cusp_expansion_report(group, s, trunc=job.truncation)
    growth = [
        max(devs) / max(devs[0], 1e-300) for devs in (report.infinity_deviations, report.zero_deviations)
    ]
    return max(growth), f"scaled deviations ∞ {report.infinity_deviations}, 0 {report.zero_deviations}"


def _check_l2(job: JobConfig, group: FuchsianGroup) -> Tuple[float, str]:
    if group.preset.name is not PresetName.CYCLIC_HYPERBOLIC:
        raise NotApplicable("the L² check runs on cyclic_hyperbolic")
    s = _first_s(job, 0.0, 1.0)

    def form(points: np.ndarray) -> np.ndarray:
        return omega_lifts(group, 1, s, points, job.truncation).values

    report = l2_norm_estimate(form, group, (2.0, 4.0, 6.0), normalization=k_factor(s), sigma=s.real)
    ratio = report.increments[-1] / report.masses[-1]
    if report.bound is not None and report.unnormalized_masses[-1] > report.bound:
        return math.inf, f"mass {report.unnormalized_masses[-1]:.4g} above bound {report.bound:.4g}"
    return ratio, f"masses {report.masses}, last band {ratio:.2e} of the total"


def _check_degeneration(job: JobConfig, group: FuchsianGroup) -> Tuple[float, str]:
    table = degeneration_diagnostic(1, 2.0, (0.4, 0.2, 0.1, 0.05), trunc=job.truncation)
    if not table.monotone:
        return math.inf, f"errors not monotone: {table.sup_errors}"
    return table.sup_errors[-1], f"sup errors {[f'{e:.1e}' for e in table.sup_errors]}"


CHECKS: Dict[str, CheckSpec] = {
    "special_functions": CheckSpec(_check_special_functions, 1e-8, 1e-15),
    "functional_equation": CheckSpec(_check_functional_equation, 5e-3, 1e-9),
    "duality": CheckSpec(_check_duality, 1e-3, 1e-12),
    "cusp_limit": CheckSpec(_check_cusp_limit, 0.05, 1e-6),
    "funnel_limit": CheckSpec(_check_funnel_limit, 0.05, 1e-6),
    "kernel_convention": CheckSpec(_check_kernel_convention, 1e-3, 1e-9),
    "collar": CheckSpec(_check_collar, 1e-12, 1e-16),
    "cusp_expansion": CheckSpec(_check_cusp_expansion, 1.5, 1.0),
    "l2": CheckSpec(_check_l2, 0.05, 1e-12),
    "degeneration": CheckSpec(_check_degeneration, 1e-3, 1e-12),
}


def run_check(name: str, job: JobConfig, group: FuchsianGroup) -> CheckResult:
    """
    Run one named check.

    A tolerance override below the check's floor cannot be resolved by the
    numerics, so such a check is marked inconclusive instead of failed; so
    is a check that does not apply to the group.
    """
    spec = CHECKS[name]
    tolerance = job.verify.tolerances.get(name, spec.tolerance)
    try:
        value, detail = spec.run(job, group)
    except NotApplicable as e:
        return CheckResult(name=name, status=CheckStatus.INCONCLUSIVE, value=math.nan, tolerance=tolerance, detail=str(e))
    if value <= tolerance:
        status = CheckStatus.PASSED
    elif tolerance < spec.floor:
        status = CheckStatus.INCONCLUSIVE
        detail += f"; tolerance below the resolvable floor {spec.floor:g}"
    else:
        status = CheckStatus.FAILED
    logger.info("check %s: %s (%.3e vs %.1e)", name, status.value, value, tolerance)
    return CheckResult(name=name, status=status, value=value, tolerance=tolerance, detail=detail)


def cmd_verify(job: JobConfig, out: Path, checks: Optional[Sequence[str]] = None) -> int:
    """Run the selected checks (all by default) and write the aggregated report."""
    names = list(checks or job.verify.checks or CHECKS)
    unknown = [name for name in names if name not in CHECKS]
    if unknown:
        raise ConfigError(f"unknown checks {unknown}; available: {sorted(CHECKS)}")
    group = build_group(job.group)
    report = VerifyReport(checks=[run_check(name, job, group) for name in names])
    if job.outputs.json_path:
        _write_json(out / job.outputs.json_path, report.model_dump_json(indent=2))
    for check in report.checks:
        print(f"{check.name:20s} {check.status.value:13s} {check.value:.3e} (tol {check.tolerance:.1e})")
    return EXIT_OK if report.passed else EXIT_NUMERICAL


# degenerate


def cmd_degenerate(job: JobConfig, out: Path) -> int:
    """Degeneration tables for every weight in the sweep."""
    settings = job.degenerate
    tables = [
        degeneration_diagnostic(q, settings.s, settings.l_grid, trunc=job.truncation)
        for q in settings.q_values
    ]
    sweep = DegenerationSweep(tables=tables)
    if job.outputs.json_path:
        _write_json(out / job.outputs.json_path, sweep.model_dump_json(indent=2))
    for table in tables:
        errors = ", ".join(f"{e:.2e}" for e in table.sup_errors)
        print(f"q = {table.q}: {errors}{'' if table.monotone else ' (not monotone)'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with the group, eval, verify and degenerate subcommands."""
    parser = argparse.ArgumentParser(
        prog="hyperbolic-eisenstein",
        description="Eisenstein series on Fuchsian groups of the second kind",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug logs")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("group", "validate a group and estimate its exponent of convergence"),
        ("eval", "evaluate a series family on a grid"),
        ("verify", "run verification checks"),
        ("degenerate", "compare pinching families with their cusp limit"),
    ):
        cmd = sub.add_parser(name, help=text)
        cmd.add_argument("--config", required=True, help="JSON job file")
        cmd.add_argument("--out", default=None, help=f"output directory (default: ${OUT_DIR_ENV} or .)")
        cmd.add_argument("--threads", type=int, default=1, help="worker threads for grid evaluation")
        if name == "verify":
            cmd.add_argument(
                "--check",
                action="append",
                default=None,
                choices=sorted(CHECKS),
                help="run only this check (repeatable)",
            )
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_CONFIG
    _configure_logging(args.verbose)
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        job = load_job(args.config)
        out = output_dir(args.out)
        if args.command == "group":
            return cmd_group(job, out)
        if args.command == "eval":
            return cmd_eval(job, out, args.threads)
        if args.command == "verify":
            return cmd_verify(job, out, args.check)
        return cmd_degenerate(job, out)
    except (ConfigError, DiscretenessError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, PoleError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except HyperbolicEisensteinError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
