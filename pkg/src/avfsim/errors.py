"""Exception types shared across the package."""


class AvfsimError(Exception):
    """Base class for all package-specific errors."""


class OverstrainError(AvfsimError):
    """Programming strain exceeds the material's programmable limit."""


class ProtocolError(AvfsimError):
    """Programming temperatures violate the required hot/fix ordering."""


class DomainError(AvfsimError):
    """Operation evaluated outside its temperature domain."""


class ConfigError(AvfsimError):
    """Assembly configuration names unknown parts or has invalid geometry."""


class ConvergenceError(AvfsimError):
    """Equilibrium iteration exhausted its budget without converging."""


class EmptyTraceError(AvfsimError):
    """Metrics requested for a trace with no rows."""


class DegenerateGroupError(AvfsimError):
    """Two-sample test on groups whose pooled variance is exactly zero."""


class NoProgressError(AvfsimError):
    """Fit failed to improve on the initial residual from every restart."""


class InfeasibleError(AvfsimError):
    """No point of the tuning grid satisfies the hard behavioral flags."""


class UnknownPresetError(AvfsimError):
    """Requested demonstrator preset name is not registered."""


class ParseError(AvfsimError):
    """Config document is not well-formed."""


class ValidationError(AvfsimError):
    """Config document is well-formed but violates the schema.

    Carries the offending key path in ``key_path`` when known.
    """

    def __init__(self, message, key_path=None):
        super().__init__(message if key_path is None else f"{key_path}: {message}")
        self.key_path = key_path
