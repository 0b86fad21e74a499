import logging
import sys

# Define all known logger names used within adelic_gates
# This list should be maintained as new loggers are added to the library.
ADELIC_GATES_LOGGERS = [
    "adelic_gates.padic",
    "adelic_gates.plinalg",
    "adelic_gates.psynth",
    "adelic_gates.zsynth",
    "adelic_gates.qsim",
    "adelic_gates.cli",
    "adelic_gates.config",
    "adelic_gates.datamodel",
    "adelic_gates.utils.job_utils",
]

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def set_adelic_gates_log_level(level: int) -> None:
    """
    Sets the logging level for all predefined adelic_gates loggers.

    Args:
        level: The logging level (e.g., logging.DEBUG, logging.INFO).
    """
    for logger_name in ADELIC_GATES_LOGGERS:
        logging.getLogger(logger_name).setLevel(level)
    # Also cover modules that log under the package root without being listed.
    logging.getLogger("adelic_gates").setLevel(level)


def get_adelic_gates_loggers() -> list[str]:
    """Returns a copy of the list of known adelic_gates logger names."""
    return list(ADELIC_GATES_LOGGERS)


def configure_cli_logging(level: int) -> None:
    """
    Route log records to stderr for the command-line front-end.

    stdout is reserved for reports, so nothing here may write to it.
    """
    logging.basicConfig(level=logging.WARNING, format=LOG_FORMAT,
                        stream=sys.stderr, force=True)
    set_adelic_gates_log_level(level)
