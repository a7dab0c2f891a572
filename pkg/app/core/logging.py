import logging
import logging.config

from app.core.config import BUMP_LOG_LEVEL

LOG_FORMAT = "%(levelname)-5.5s [%(name)s] %(message)s"


def configure_logging(level: str | None = None) -> None:
    """
    Configure console logging for the `bump` command and the API process.

    Args:
        level (str, optional): Level for the `app` logger hierarchy. Defaults to BUMP_LOG_LEVEL.
    """
    logging.config.dictConfig({
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {
            "generic": {"format": LOG_FORMAT, "datefmt": "%H:%M:%S"},
        },
        "handlers": {
            "console": {
                "class": "logging.StreamHandler",
                "stream": "ext://sys.stderr",
                "formatter": "generic",
            },
        },
        "loggers": {
            "app": {"level": (level or BUMP_LOG_LEVEL).upper(), "handlers": ["console"], "propagate": False},
            "sqlalchemy.engine": {"level": "WARNING"},
        },
        "root": {"level": "WARNING", "handlers": ["console"]},
    })
