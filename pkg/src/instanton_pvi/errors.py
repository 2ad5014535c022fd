"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class InstantonError(Exception):
    exit_code = 10


class DomainError(InstantonError, ValueError):
    exit_code = 11


class PoleError(InstantonError, ZeroDivisionError):
    exit_code = 12

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class BlowUpError(InstantonError):
    exit_code = 13

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class StepUnderflowError(InstantonError):
    exit_code = 14

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class DegenerateBranchError(InstantonError):
    exit_code = 15


class InconsistencyError(InstantonError):
    exit_code = 16


class NonConvergenceError(InstantonError):
    exit_code = 17


class BracketError(InstantonError):
    exit_code = 18


class FitError(InstantonError):
    exit_code = 19


class ExtrapolationError(InstantonError):
    exit_code = 20


class NonPowerLawError(FitError):
    """The best log-log line misses the data; ``fit`` holds it anyway."""
    exit_code = 21

    def __init__(self, message, fit=None):
        super().__init__(message)
        self.fit = fit


class SuiteFailure(InstantonError):
    """Raised by the verify command when an invariant check fails."""
    exit_code = 22


EXIT_CODES = {
    cls.__name__: cls.exit_code
    for cls in (
        InstantonError, DomainError, PoleError, BlowUpError,
        StepUnderflowError, DegenerateBranchError, InconsistencyError,
        NonConvergenceError, BracketError, FitError, ExtrapolationError,
        NonPowerLawError, SuiteFailure,
    )
}
