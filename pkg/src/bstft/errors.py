"""Exception types shared across the package."""


class BstftError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(BstftError, ValueError):
    """An argument violates a documented precondition."""


class AliasingError(BstftError):
    """Requested spectral content does not fit below the Nyquist frequency."""


class FrameError(BstftError):
    """A spectral feature falls outside the complex-envelope frame band."""


class ReferenceNotFoundError(BstftError):
    """No reference pulse above threshold inside the guard interval."""


class MeasurementFailedError(BstftError):
    """A waveform measurement (e.g. pulse width) could not be completed."""


class ConfigError(BstftError):
    """Experiment configuration failed schema or cross-field validation."""
