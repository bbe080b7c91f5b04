import sys
from contextlib import contextmanager

RUNNING, DONE, FAILED = "·", "✓", "✗"


@contextmanager
def status(message, stream=None):
    """Show `message` as running, then rewrite the line as done or failed."""
    stream = stream or sys.stderr

    def mark(symbol, end="\n"):
        print(f"\r[{symbol}] {message}", end=end, file=stream)

    mark(RUNNING, end="")
    stream.flush()
    try:
        yield
    except:  # noqa: E722
        mark(FAILED)
        raise
    else:
        mark(DONE)
