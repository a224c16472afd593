import logging
import os

ROOT_LOGGER_NAME = "levelset_lab"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def get_logger(name: str) -> logging.Logger:
    """Return a logger nested under the package namespace."""
    if name == ROOT_LOGGER_NAME or name.startswith(f"{ROOT_LOGGER_NAME}."):
        return logging.getLogger(name)

    return logging.getLogger(f"{ROOT_LOGGER_NAME}.{name}")


def setup_logging(level: str | int | None = None) -> logging.Logger:
    """
    Configure the package root logger with a single stream handler.

    The level falls back to LEVELSET_LAB_LOG_LEVEL, then WARNING. Calling this
    more than once only updates the level.
    """
    if level is None:
        level = os.getenv("LEVELSET_LAB_LOG_LEVEL", "WARNING")

    if isinstance(level, str):
        resolved = logging.getLevelName(level.upper())
        if not isinstance(resolved, int):
            raise ValueError(
                f"Invalid log level: {level}. Must be one of DEBUG, INFO, WARNING, ERROR"
            )
        level = resolved

    logger = logging.getLogger(ROOT_LOGGER_NAME)
    logger.setLevel(level)

    if not any(getattr(h, "_levelset_lab", False) for h in logger.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._levelset_lab = True  # type: ignore[attr-defined]
        logger.addHandler(handler)

    return logger
