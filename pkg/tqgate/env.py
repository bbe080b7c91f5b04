"""
Parse environment flags.
"""

import os

from .custom_exceptions import ConfigError

THREADS_VARIABLE = "TQGATE_THREADS"


def sweep_workers(requested=None, environ=None):
    """Number of workers used to evaluate sweep points.

    An explicit `requested` value (the ``--workers`` flag) wins over the
    ``TQGATE_THREADS`` environment variable; without either, sweeps run
    serially.
    """
    if requested is None:
        environ = os.environ if environ is None else environ
        requested = environ.get(THREADS_VARIABLE)
        if requested in (None, ""):
            return 1
        source = THREADS_VARIABLE
    else:
        source = "--workers"

    try:
        workers = int(requested)
    except (TypeError, ValueError):
        raise ConfigError(f"expected an integer, got [{requested}]", path=source)
    if workers < 1:
        raise ConfigError("need at least one worker", path=source)
    return workers
