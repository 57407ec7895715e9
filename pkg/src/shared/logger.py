import logging
import sys

from src.shared.config import settings

# Structured JSON records when LOG_FORMAT=json
try:
    from pythonjsonlogger.json import JsonFormatter

    HAS_JSON_LOGGER = True
except ImportError:
    try:
        from pythonjsonlogger.jsonlogger import JsonFormatter  # python-json-logger < 3

        HAS_JSON_LOGGER = True
    except ImportError:
        HAS_JSON_LOGGER = False


def _resolve_level() -> int:
    level_str = settings.LOG_LEVEL.upper()
    return getattr(logging, level_str, logging.INFO)


def _build_formatter() -> logging.Formatter:
    if settings.json_logs and HAS_JSON_LOGGER:
        return JsonFormatter("%(asctime)s %(levelname)s %(name)s %(message)s")
    return logging.Formatter("%(asctime)s - [%(levelname)s] - %(name)s - %(message)s")


def setup_logger(name: str) -> logging.Logger:
    """
    Configures and returns a logger.
    Emits JSON records through python-json-logger when LOG_FORMAT=json.
    """
    logger = logging.getLogger(name)
    logger.setLevel(_resolve_level())

    # Idempotent configuration: if we've already configured this logger in-process,
    # only refresh level and return.
    if getattr(logger, "_pursuit_configured", False):
        return logger

    handler = logging.StreamHandler(sys.stdout)
    handler.setFormatter(_build_formatter())

    # Remove only handlers we previously attached.
    logger.handlers = [h for h in logger.handlers if not getattr(h, "_pursuit_handler", False)]
    handler._pursuit_handler = True  # type: ignore[attr-defined]
    logger.addHandler(handler)
    logger.propagate = False  # Prevent duplication via root logger handlers
    logger._pursuit_configured = True  # type: ignore[attr-defined]

    return logger


def get_logger(name: str) -> logging.Logger:
    return setup_logger(name)
