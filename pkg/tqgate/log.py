import functools
import sys
import zlib
from datetime import datetime

COLORS = ("black", "red", "green", "yellow", "blue", "magenta", "cyan", "white")
COMPONENT_COLORS = ("red", "green", "yellow", "blue", "magenta", "cyan", "white")


def colorize(s, fg=None, bold=False):
    """Wrap `s` in ANSI escapes for foreground colour `fg` and weight."""
    codes = []
    if fg in COLORS:
        codes.append(30 + COLORS.index(fg))
    if bold:
        codes.append(1)
    return f"\x1b[{';'.join(map(str, codes))}m{s}\x1b[0m"


def log(component, message, stream=None):
    """Write ``[HH:MM:SS component] message`` to stderr.

    Data products go to stdout, so diagnostics must stay off it.  The
    colour is fixed per component and only used on a terminal.
    """
    stream = stream or sys.stderr
    color = COMPONENT_COLORS[zlib.crc32(component.encode("ascii")) % len(COMPONENT_COLORS)]
    line = f"[{datetime.now():%H:%M:%S} {component}] {message}"
    if stream.isatty():
        line = colorize(line, fg=color, bold=True)
    print(line, file=stream)


def make_log(component):
    def component_log(*args, **kwargs):
        log(component, *args, **kwargs)

    return component_log


@functools.cache
def warn_once(component, message):
    """Log a regime warning once per process; sweeps repeat them per point."""
    log(component, f"Warning: {message}")
