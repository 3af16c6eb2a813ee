"""
Command-line interface for hs-sharp.

Usage:
    hs-sharp constants --n 3 --p inf --format csv
    hs-sharp profile --n 3 --p 2 --beta-count 33
    hs-sharp verify --n 3 --p inf --mode extremal
    hs-sharp verify --n 3 --p 1 --p 2 --p inf --mode random --samples 200 --seed 7
    hs-sharp scan-inequalities --which lemma

Exit codes: 0 success, 2 usage or invalid input, 3 numerical non-convergence,
4 an inequality or bound violated.
"""
import functools
import logging
import sys
from typing import Callable, Optional

import click
from pydantic import ValidationError

from . import __version__
from .config import Settings, get_settings
from .constants_closed import closed_constant
from .formatters import (
    format_csv,
    format_json,
    format_profile_csv,
    format_profile_json,
    format_scan_json,
    format_scan_text,
    format_sharpness_csv,
    format_summary,
    format_verify_json,
)
from .inequality_lab import SCANS, default_corollary1_grid, default_corollary2_grid, default_lemma_grid
from .models import Exponent
from .poisson_field import UnboundedDataError, sharpness_ratio, verify_random
from .quadrature import NonConvergenceError
from .schemas import QuadratureSpec, ReportRecord, ScanGrid
from .special_fn import DomainError
from .variational import direction_profile, sup_over_direction

__all__ = [
    "cli",
]

logger = logging.getLogger("hs-sharp.cli")

EXIT_USAGE = 2
EXIT_NONCONVERGENCE = 3
EXIT_VIOLATION = 4

VIOLATION_TOLERANCE = 1e-3

DEFAULT_GRIDS: dict[str, Callable[[], ScanGrid]] = {
    "lemma": default_lemma_grid,
    "corollary1": default_corollary1_grid,
    "corollary2": default_corollary2_grid,
}


class ExponentType(click.ParamType):
    """Click parameter for ``1``, ``inf`` or a decimal greater than 1."""

    name = "exponent"

    def convert(self, value, param, ctx) -> Exponent:
        if isinstance(value, Exponent):
            return value
        try:
            return Exponent.parse(value)
        except DomainError as e:
            self.fail(str(e), param, ctx)


EXPONENT = ExponentType()


def _spec(ctx: click.Context) -> QuadratureSpec:
    settings: Settings = ctx.obj
    return settings.quadrature_spec()


def _emit_records(records: list[ReportRecord], output_format: str) -> None:
    if output_format == "csv":
        click.echo(format_csv(records), nl=False)
    else:
        click.echo(format_json(records))


def handle_errors(fn: Callable) -> Callable:
    """Map library errors to exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (DomainError, UnboundedDataError, ValidationError) as e:
            logger.debug(f"{fn.__name__} rejected its input", exc_info=True)
            click.echo(f"Error: {e}", err=True)
            sys.exit(EXIT_USAGE)
        except NonConvergenceError as e:
            click.echo(
                f"Error: {e} (best estimate {e.best_estimate!r}, error {e.error_estimate!r})", err=True
            )
            sys.exit(EXIT_NONCONVERGENCE)

    return wrapper


@click.group()
@click.version_option(version=__version__, prog_name="hs-sharp")
@click.option(
    "--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
    help="key=value file overriding base_order, max_refinements, abs_tol, rel_tol",
)
@click.option(
    "--log-level", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default=None, help="Log level (logs go to stderr)",
)
@click.pass_context
def cli(ctx: click.Context, config_path: Optional[str], log_level: Optional[str]):
    """hs-sharp - sharp constants in gradient estimates for harmonic functions in the half-space."""
    try:
        settings = get_settings(config_path)
        if log_level is not None:
            settings = settings.model_copy(update={"log_level": log_level.upper()})
    except ValidationError as e:
        click.echo(f"Error: invalid configuration: {e}", err=True)
        sys.exit(EXIT_USAGE)
    logging.basicConfig(
        level=getattr(logging, settings.log_level),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )
    ctx.obj = settings


@cli.command()
@click.option("--n", "n_list", type=click.IntRange(min=2), multiple=True, required=True, help="Dimension (repeatable)")
@click.option("--p", "p_list", type=EXPONENT, multiple=True, required=True, help="Exponent: 1, inf or p > 1 (repeatable)")
@click.option("--format", "output_format", type=click.Choice(["csv", "json"]), default="csv")
@click.option("--threads", type=click.IntRange(min=1), default=None, help="Worker count (default HS_SHARP_THREADS)")
@click.pass_context
@handle_errors
def constants(ctx, n_list, p_list, output_format, threads):
    """Numerical C_p per (n, p) with the closed form when one exists."""
    spec = _spec(ctx)
    records: list[ReportRecord] = []
    try:
        for n in n_list:
            for p in p_list:
                result = sup_over_direction(n, p, spec, threads)
                closed = closed_constant(n, p)
                records.append(
                    ReportRecord(
                        n=n,
                        p=p.label,
                        method=result.method,
                        value=result.value,
                        abs_err=result.abs_err,
                        argmax_beta=result.argmax_beta,
                        closed_form=closed,
                        rel_gap=abs(result.value - closed) / closed if closed is not None else None,
                    )
                )
    except NonConvergenceError:
        if records:
            _emit_records(records, output_format)
            click.echo(f"partial output: {len(records)} of {len(n_list) * len(p_list)} rows", err=True)
        raise
    _emit_records(records, output_format)


@cli.command()
@click.option("--n", type=click.IntRange(min=2), required=True)
@click.option("--p", type=EXPONENT, required=True)
@click.option("--beta-count", type=click.IntRange(min=2), default=33, show_default=True)
@click.option("--format", "output_format", type=click.Choice(["csv", "json"]), default="csv")
@click.option("--threads", type=click.IntRange(min=1), default=None)
@click.pass_context
@handle_errors
def profile(ctx, n, p, beta_count, output_format, threads):
    """C_p(beta) on a uniform grid of beta in [0, pi/2]."""
    results = direction_profile(n, p, beta_count, _spec(ctx), threads)
    if output_format == "csv":
        click.echo(format_profile_csv(n, p.label, results), nl=False)
    else:
        click.echo(format_profile_json(n, p.label, results))


@cli.command()
@click.option("--n", type=click.IntRange(min=2), required=True)
@click.option("--p", "p_list", type=EXPONENT, multiple=True, required=True)
@click.option("--mode", type=click.Choice(["extremal", "random"]), default="extremal", show_default=True)
@click.option("--samples", type=click.IntRange(min=1), default=200, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option(
    "--truncation", type=float, default=1e4, show_default=True,
    help="Support radius of extremal data in units of x_n",
)
@click.option("--format", "output_format", type=click.Choice(["csv", "json"]), default="csv")
@click.option("--threads", type=click.IntRange(min=1), default=None)
@click.pass_context
@handle_errors
def verify(ctx, n, p_list, mode, samples, seed, truncation, output_format, threads):
    """Empirical ratios |grad u| x_n^{(n+p-1)/p} / ||f||_p against C_p."""
    spec = _spec(ctx)
    if mode == "extremal":
        reports = [sharpness_ratio(p, n, truncation_radius=truncation, spec=spec, extrapolate=True) for p in p_list]
    else:
        reports = verify_random(n, samples, seed, p_list, spec, threads)

    worst = max(r.ratio_over_bound for r in reports)
    if output_format == "csv":
        click.echo(format_sharpness_csv(reports), nl=False)
        click.echo(format_summary(worst))
    else:
        click.echo(format_verify_json(reports, worst))

    violations = [r for r in reports if not r.within(VIOLATION_TOLERANCE)]
    if violations:
        for r in violations:
            click.echo(f"violation: n={r.n} p={r.p} sample={r.sample} ratio={r.ratio!r} bound={r.bound!r}", err=True)
        sys.exit(EXIT_VIOLATION)


@cli.command("scan-inequalities")
@click.option(
    "--which", type=click.Choice(["lemma", "corollary1", "corollary2", "all"]), default="all", show_default=True
)
@click.option("--x-max", type=float, default=None, help="Upper end of the x (or y) axis")
@click.option("--x-count", type=click.IntRange(min=2), default=None, help="Uniform points on the x axis")
@click.option("--x-log-count", type=click.IntRange(min=0), default=None, help="Log-spaced points on the x axis")
@click.option("--second-max", type=float, default=None, help="Upper end of the mu (or n) axis")
@click.option("--second-count", type=click.IntRange(min=2), default=None, help="Points on the mu (or n) axis")
@click.option("--tolerance", type=float, default=None, help="Allowed positive normalized gap (default 1e-12)")
@click.option("--format", "output_format", type=click.Choice(["text", "json"]), default="text")
@handle_errors
def scan_inequalities(which, x_max, x_count, x_log_count, second_max, second_count, tolerance, output_format):
    """Scan the algebraic inequality and its corollaries on a grid."""
    overrides = {
        key: value
        for key, value in (
            ("x_hi", x_max),
            ("x_count", x_count),
            ("x_log_count", x_log_count),
            ("second_hi", second_max),
            ("second_count", second_count),
            ("tolerance", tolerance),
        )
        if value is not None
    }
    names = list(SCANS) if which == "all" else [which]
    reports = []
    for name in names:
        base = DEFAULT_GRIDS[name]()
        grid = ScanGrid.model_validate({**base.model_dump(), **overrides})
        reports.append(SCANS[name](grid))

    if output_format == "text":
        click.echo("\n\n".join(format_scan_text(r) for r in reports))
    else:
        click.echo(format_scan_json(reports))

    if any(not r.passed for r in reports):
        sys.exit(EXIT_VIOLATION)


if __name__ == "__main__":
    cli()
