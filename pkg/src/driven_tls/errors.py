"""Exception hierarchy.

Every error raised by the pipeline derives from :class:`DrivenTLSError` and
carries the process exit code the command-line front end reports for it.
"""


class DrivenTLSError(Exception):
    exit_code = 1

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics

    def record(self):
        """Machine-readable description of the failure."""
        return {
            "error": type(self).__name__,
            "message": str(self),
            "exit_code": self.exit_code,
            "diagnostics": {k: _plain(v) for k, v in self.diagnostics.items()},
        }


def _plain(value):
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (bool, str)):
        return value
    if isinstance(value, int) or type(value).__name__.startswith(("int", "uint")):
        return int(value)
    try:
        return float(value)
    except (TypeError, ValueError):
        return str(value)


class ConfigError(DrivenTLSError):
    exit_code = 2


class InvalidInteractionError(ConfigError):
    """The driving field violates a construction invariant."""


class ResonantFieldError(InvalidInteractionError):
    """2*F0 is an integer multiple of omega."""


class UnsupportedOrderError(ConfigError):
    pass


class AccuracyUnsupportedError(DrivenTLSError, ValueError):
    """Bessel arguments outside the validated accuracy range."""


class ClassificationError(DrivenTLSError):
    exit_code = 3


class UnclassifiableError(ClassificationError):
    pass


class SpuriousCaseError(ClassificationError):
    pass


class WrongConditionError(ClassificationError):
    pass


class DivergenceSuspectedError(DrivenTLSError):
    exit_code = 4


class CrossingError(DrivenTLSError):
    exit_code = 5


class InternalConsistencyError(DrivenTLSError):
    exit_code = 6


class StructuralError(InternalConsistencyError, ValueError):
    """Series on incompatible harmonic lattices were combined."""


class SecularIntegrationError(InternalConsistencyError):
    """A resonant (secular) mode reached an integration."""


class TruncationError(InternalConsistencyError):
    pass


class CancellationFailureError(InternalConsistencyError):
    pass


class NearResonanceError(InternalConsistencyError):
    pass


class AssemblyError(InternalConsistencyError):
    pass


class StiffnessError(InternalConsistencyError):
    pass


class NormalizationError(DrivenTLSError, ValueError):
    pass
