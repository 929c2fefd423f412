"""Command-line entry point.

Exit status: 0 when every case passed, 1 when a bound check failed, 2 when
the run aborted (internal consistency failure or report I/O), 3 for an
invalid configuration.
"""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional, Sequence

import click

from .config import configure_logging, get_settings, load_config, with_seed
from .exceptions import ConfigError, InternalConsistencyError, ReportIOError
from .models.experiment import HHL_SUITES, SCHEMA_VERSION, ExperimentConfig
from .services.reports import emit_report
from .services.suites import run_suite

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_ABORTED = 2
EXIT_CONFIG = 3

_EXTENSIONS = {"structured": "json", "tabular": "csv"}


def _output_path(cfg: ExperimentConfig, out: Optional[str], fmt: str) -> Path:
    if out:
        return Path(out)
    report_dir = Path(get_settings().report_dir)
    if cfg.output:
        path = Path(cfg.output)
        return path if path.is_absolute() else report_dir / path
    return report_dir / f"{cfg.suite}-{cfg.seed}.{_EXTENSIONS[fmt]}"


def _default_demo_config() -> ExperimentConfig:
    return ExperimentConfig(schema_version=SCHEMA_VERSION, suite="adversarial_demo", seed=0)


def _execute(
        config: Optional[str],
        seed_override: Optional[int],
        out: Optional[str],
        fmt: Optional[str],
        allowed: Sequence[str],
) -> int:
    try:
        if config is None:
            cfg = _default_demo_config()
            if seed_override is not None:
                cfg = with_seed(cfg, seed_override)
        else:
            cfg = load_config(config, seed_override)
        if cfg.suite not in allowed:
            raise ConfigError(
                f"suite {cfg.suite!r} cannot run under this command",
                [("suite", f"expected one of {', '.join(allowed)}")],
            )
    except ConfigError as e:
        click.echo(f"configuration error: {e}", err=True)
        return EXIT_CONFIG

    fmt = fmt or cfg.format
    try:
        record = run_suite(cfg)
        path = emit_report(record, fmt, _output_path(cfg, out, fmt))
    except InternalConsistencyError as e:
        logger.error("Run aborted: %s", e, exc_info=True)
        click.echo(f"internal consistency failure: {e}", err=True)
        return EXIT_ABORTED
    except ReportIOError as e:
        click.echo(f"report error: {e}", err=True)
        return EXIT_ABORTED

    summary = record.summary
    click.echo(f"{record.suite}: {summary.passed}/{summary.total} cases passed -> {path}")
    for case in record.cases:
        if not case.passed:
            click.echo(f"  FAILED {case.case_id}: measured={case.measured} bound={case.bound}", err=True)
    return EXIT_OK if record.all_passed else EXIT_FAILED


def _common_options(config_required: bool):
    def decorate(fn):
        fn = click.option("--format", "fmt", type=click.Choice(["structured", "tabular"]), default=None,
                          help="Report format; defaults to the config's 'format'.")(fn)
        fn = click.option("--out", type=click.Path(dir_okay=False), default=None,
                          help="Report path; defaults to the config's 'output' under QFTV_REPORT_DIR.")(fn)
        fn = click.option("--seed-override", type=int, default=None, help="Replace the config's root seed.")(fn)
        fn = click.option("--config", type=click.Path(exists=True, dir_okay=False), required=config_required,
                          help="YAML experiment configuration.")(fn)
        return fn

    return decorate


@click.group()
@click.option("--log-level", default=None, help="Overrides LOG_LEVEL.")
def main(log_level: Optional[str]) -> None:
    """Verify imperfect QFT channels and certify HHL fidelity bounds."""
    level = getattr(logging, log_level.upper(), None) if log_level else None
    configure_logging(level if isinstance(level, int) else None)


@main.command()
@_common_options(config_required=True)
@click.pass_context
def audit(ctx, config, seed_override, out, fmt):
    """Exact closeness measures and the composition checks."""
    ctx.exit(_execute(config, seed_override, out, fmt, ("closeness_audit", "theorem_s3")))


@main.command()
@_common_options(config_required=True)
@click.pass_context
def verify(ctx, config, seed_override, out, fmt):
    """Shot-based protocol calibration."""
    ctx.exit(_execute(config, seed_override, out, fmt, ("protocol_calibration",)))


@main.command()
@_common_options(config_required=True)
@click.pass_context
def certify(ctx, config, seed_override, out, fmt):
    """HHL ensemble bounds with noisy QFT channels."""
    ctx.exit(_execute(config, seed_override, out, fmt, HHL_SUITES))


@main.command()
@_common_options(config_required=False)
@click.pass_context
def demo(ctx, config, seed_override, out, fmt):
    """The adversarial phase channel; runs the built-in preset without --config."""
    ctx.exit(_execute(config, seed_override, out, fmt, ("adversarial_demo",)))


if __name__ == "__main__":
    main()
