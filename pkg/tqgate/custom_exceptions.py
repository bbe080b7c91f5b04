class TQGateError(Exception):
    """Base class for errors reported to the user.

    Parameters
    ----------
    reason : str
        Human-readable description.
    path : str, optional
        Dotted configuration path the error refers to, if any.
    """

    exit_code = 1

    def __init__(self, reason, path=None):
        Exception.__init__(self, reason)
        self.reason = reason
        self.path = path

    def __str__(self):
        if self.path is not None:
            return f"{self.path}: {self.reason}"
        return self.reason


class ConfigError(TQGateError):
    """Unknown key, unresolvable path, unit or invariant violation."""


class ParameterDomainError(TQGateError, ValueError):
    """A physical parameter lies outside the domain of a formula."""


class UnsupportedRegimeError(TQGateError):
    """No closed form exists for the requested parameter combination."""


class NumericalFailure(TQGateError):
    exit_code = 2
