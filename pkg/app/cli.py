"""
The `bump` command: runs one experiment and writes its report.

Exit codes: 0 on success, 2 on a configuration error, 3 when a built-in
acceptance threshold fails in --check mode.
"""
import logging
from typing import Optional

import click
from pydantic import ValidationError

from app.core.config import BUMP_LOG_LEVEL, BUMP_THREADS
from app.core.constants import EXPERIMENT_NAMES
from app.core.exceptions import ConfigError
from app.core.logging import configure_logging
from app.schemas import ExperimentConfig, ExperimentReport
from app.services.experiments import run_experiment, write_report

logger = logging.getLogger(__name__)

EXIT_CONFIG_ERROR = 2
EXIT_CHECK_FAILED = 3


def _parse_floats(ctx, param, value: Optional[str]) -> list[float]:
    """Comma-separated floats; an empty option means the experiment default."""
    if not value:
        return []
    try:
        return [float(item) for item in value.split(",") if item.strip()]
    except ValueError as exc:
        raise click.BadParameter(f"expected comma-separated numbers, got {value!r}") from exc


def _parse_thresholds(ctx, param, value: tuple[str, ...]) -> dict[str, float]:
    thresholds = {}
    for item in value:
        name, sep, number = item.partition("=")
        if not sep or not name:
            raise click.BadParameter(f"expected NAME=VALUE, got {item!r}")
        try:
            thresholds[name.strip()] = float(number)
        except ValueError as exc:
            raise click.BadParameter(f"threshold {name!r} is not a number") from exc
    return thresholds


def _store(report: ExperimentReport) -> int:
    # Импорт здесь: без --store команда не трогает базу данных
    from app import crud  # pylint: disable=import-outside-toplevel
    from app.db import Base, SessionLocal, engine  # pylint: disable=import-outside-toplevel

    Base.metadata.create_all(bind=engine)
    db = SessionLocal()
    try:
        return crud.create_run(db, report).id
    finally:
        db.close()


@click.command(name="bump")
@click.argument("experiment", type=click.Choice(EXPERIMENT_NAMES))
@click.option("--m", "m", type=int, default=10, show_default=True, help="Probe level m.")
@click.option("--trials", type=int, default=100, show_default=True, help="Number of trials.")
@click.option("--seed", "master_seed", type=int, default=0, show_default=True, help="Master seed.")
@click.option("--t-max", type=int, default=None, help="Censoring horizon [default: 64·m² + 10⁶].")
@click.option("--x-max", type=int, default=2, show_default=True, help="Largest tracked column.")
@click.option("--grid", callback=_parse_floats, default=None, help="Comma-separated main grid.")
@click.option("--t-grid", callback=_parse_floats, default=None, help="Comma-separated t grid (surface-2d).")
@click.option("--n", "n", type=int, default=None, help="Length of a growth process.")
@click.option("--rows", type=int, default=0, show_default=True, help="Row cutoff of growth-row tracing.")
@click.option("--window-ratio", type=float, default=0.05, show_default=True,
              help="Relative width of the observation window.")
@click.option("--p", "p", type=float, default=0.5, show_default=True, help="Thinning probability.")
@click.option("--threshold", "thresholds", multiple=True, callback=_parse_thresholds,
              metavar="NAME=VALUE", help="Override a built-in acceptance threshold.")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None,
              help="Output path; stdout when omitted.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="json", show_default=True)
@click.option("--threads", type=int, default=BUMP_THREADS, show_default=True,
              help="Worker processes; results do not depend on it.")
@click.option("--check", is_flag=True, help="Exit with code 3 when an acceptance threshold fails.")
@click.option("--store", is_flag=True, help="Persist the run in the database.")
@click.option("--samples/--no-samples", "include_samples", default=True, show_default=True,
              help="Include sample rows in JSON output.")
@click.option("--log-level", default=BUMP_LOG_LEVEL, show_default=True)
@click.pass_context
def main(ctx: click.Context, experiment: str, fmt: str, check: bool, store: bool,
         log_level: str, **params) -> None:
    """Run the Monte Carlo experiment EXPERIMENT and write its report."""
    configure_logging(log_level)
    try:
        cfg = ExperimentConfig(experiment=experiment, format=fmt, **params)
        report = run_experiment(cfg)
    except (ValidationError, ConfigError) as exc:
        click.echo(f"configuration error: {exc}", err=True)
        ctx.exit(EXIT_CONFIG_ERROR)

    text = write_report(report, cfg.format, cfg.out, cfg.include_samples)
    if text is not None:
        click.echo(text, nl=False)
    if store:
        logger.info("Запуск сохранён с id=%d", _store(report))

    # Вердикт проверок
    for result in report.checks:
        if not result.passed:
            logger.warning("check %s failed: value=%s threshold=%s",
                           result.name, result.value, result.threshold)
    if check and report.passed is False:
        ctx.exit(EXIT_CHECK_FAILED)


if __name__ == "__main__":
    main()  # pylint: disable=no-value-for-parameter
