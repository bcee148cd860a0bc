"""Exception and warning types raised across the package."""


class NVEddyError(Exception):
    """Base class for all package errors."""


class DomainError(NVEddyError, ValueError):
    """An argument lies outside the domain of a physical formula."""


class DegenerateRegionError(NVEddyError):
    """The lock-in response is flat over a bias-field window."""


class PreconditionError(NVEddyError, ValueError):
    """Signal-processing precondition violated (e.g. aliasing)."""


class InsufficientSettlingError(PreconditionError):
    """Record too short for the low-pass filter to settle."""


class FormatError(NVEddyError, ValueError):
    """Unreadable or malformed pattern/image file."""


class ResolutionError(NVEddyError, ValueError):
    """Conductivity map pitch too coarse for the dipole discretization."""


class DegenerateDataError(NVEddyError, ValueError):
    """Data cannot be normalized or fitted (e.g. all zeros)."""


class FitError(NVEddyError, RuntimeError):
    """Least-squares fit failed to converge."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class NoSolutionError(NVEddyError, ValueError):
    """An inversion has no finite solution."""


class ConfigError(NVEddyError, ValueError):
    """Invalid configuration file or value."""


class LargeModulationWarning(UserWarning):
    """Field modulation is not small compared with the PL feature widths."""


class RangeError(NVEddyError, ValueError):
    """Requested window falls outside the image bounds."""
