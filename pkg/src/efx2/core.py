"""
core.py -- Configuration and structured logging for efx2.

Configuration-driven behavior: every tunable lives in ``DEFAULT_CONFIG`` and
can be overridden by ``config/efx2.yaml`` (or a file passed with
``--config``). User keys are deep-merged over the defaults, so a config file
only needs the keys it changes.

Logs are JSON Lines written through a rotating file handler attached to the
``efx2`` logger. Modules log through children of that logger
(``efx2.engine``, ``efx2.cli`` ...).
"""

import copy
import json
import logging
import logging.handlers
import os
import pathlib
import sys
import typing

import yaml

# ------------------------------------------------------------------------------
# CONSTANTS AND PATHS
# ------------------------------------------------------------------------------

MODULE_DIR = pathlib.Path(__file__).parent
PROJECT_ROOT = MODULE_DIR.parent.parent
CONFIG_DIR = PROJECT_ROOT / "config"
CONFIG_FILE = CONFIG_DIR / "efx2.yaml"

DEFAULT_CONFIG = {
    "solver": {
        "max_steps": 1_000_000,
        # None follows the interpreter: on unless python runs with -O
        "assert_lemmas": None,
        "certify_raw": True,
    },
    "oracle": {
        "cap": 10_000_000,
        "partial_cap": 100_000,
    },
    "generator": {
        "n_alpha": 2,
        "n_beta": 2,
        "m": 8,
        "dist": "uniform_int",
        "lo": 0,
        "hi": 10,
        "den_max": 6,
        "rho": "1/2",
        "seed": 0,
    },
    "sweep": {
        "count": 500,
        "seed": 0,
    },
    "logging": {
        "enabled": True,
        "dir": "logs",
        "file": "efx2.log",
        "level": "INFO",
    },
}


# ------------------------------------------------------------------------------
# CORE SERVICES: CONFIGURATION & LOGGING
# ------------------------------------------------------------------------------


class JsonLogFormatter(logging.Formatter):
    """A custom log formatter that outputs log records as JSON Lines."""

    def format(self, record):
        log_obj = {
            "timestamp": self.formatTime(record),
            "levelname": record.levelname,
            "message": record.getMessage(),
            "name": record.name,
        }
        if record.exc_info:
            log_obj["exc_info"] = self.formatException(record.exc_info)
        return json.dumps(log_obj)


def _log_path(config: dict) -> pathlib.Path:
    log_cfg = config.get("logging", {})
    log_dir = pathlib.Path(log_cfg.get("dir", "logs"))
    if not log_dir.is_absolute():
        log_dir = PROJECT_ROOT / log_dir
    return log_dir / log_cfg.get("file", "efx2.log")


def setup_logging(config: typing.Optional[dict] = None) -> logging.Logger:
    """Configure the ``efx2`` logger to write JSON Lines to a rotating file.

    Calling it again is harmless: handlers are only attached once. When
    logging is disabled in config the logger gets a NullHandler instead.
    """
    config = config or DEFAULT_CONFIG
    log_cfg = config.get("logging", {})
    logger = logging.getLogger("efx2")
    logger.setLevel(str(log_cfg.get("level", "INFO")).upper())

    if logger.handlers:
        return logger

    if not log_cfg.get("enabled", True):
        logger.addHandler(logging.NullHandler())
        return logger

    log_file = _log_path(config)
    try:
        os.makedirs(log_file.parent, exist_ok=True)
    except OSError as e:
        print(
            f"WARNING: could not create log directory at '{log_file.parent}': {e}",
            file=sys.stderr,
        )
        logger.addHandler(logging.NullHandler())
        return logger

    handler = logging.handlers.RotatingFileHandler(
        log_file, maxBytes=10240000, backupCount=5, encoding="utf-8"
    )
    handler.setFormatter(JsonLogFormatter())
    logger.addHandler(handler)
    return logger


def log_event(event: str, **fields: typing.Any) -> None:
    """Lightweight logging helper for structured events."""
    try:
        payload = {"event": event}
        if fields:
            payload.update(fields)
        logging.getLogger("efx2").info(json.dumps(payload, default=str))
    except Exception:
        pass


def _deep_merge(user: dict, base: dict) -> dict:
    stack = [(user, base)]
    while stack:
        top_user, top_default = stack.pop()
        for k, v in top_user.items():
            if (
                k in top_default
                and isinstance(v, dict)
                and isinstance(top_default[k], dict)
            ):
                stack.append((v, top_default[k]))
            else:
                top_default[k] = v
    return base


def load_configuration(path: typing.Union[str, os.PathLike, None] = None) -> dict:
    """Return DEFAULT_CONFIG with the YAML file at ``path`` merged on top."""
    config = copy.deepcopy(DEFAULT_CONFIG)
    config_file = pathlib.Path(path) if path is not None else CONFIG_FILE

    if not config_file.exists():
        logging.getLogger("efx2").warning(
            "Config file not found at '%s'. Using defaults.", config_file
        )
        return config

    try:
        with open(config_file, "r", encoding="utf-8") as f:
            user_config = yaml.safe_load(f)
    except (OSError, yaml.YAMLError) as e:
        logging.getLogger("efx2").error("Failed to load config: %s", e)
        return copy.deepcopy(DEFAULT_CONFIG)

    if isinstance(user_config, dict):
        _deep_merge(user_config, config)
    return config
