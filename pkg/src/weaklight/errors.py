"""Exception types shared across the package."""


class WeaklightError(Exception):
    """Base class for all weaklight-specific errors."""


class InvalidConfigError(WeaklightError):
    """A configuration value or combination of values is unusable."""


class DegenerateSpectrumError(WeaklightError):
    """Spectrum carries no intensity, so moments are undefined."""


class GridMismatchError(WeaklightError):
    """Two spectra that must share a wavelength grid do not."""


class OrthogonalPostselectionError(WeaklightError):
    """Pre- and post-selected states are exactly orthogonal with no
    intervening evolution: nothing survives post-selection and the
    conditioned average diverges."""


class NoPhotonsError(WeaklightError):
    """The simulated chain transmits numerically zero intensity."""


class CalibrationDomainError(WeaklightError):
    """The phase-to-shift response is flat or non-monotone over the
    requested range, so it cannot be inverted."""


class ExtrapolationRefusedError(WeaklightError):
    """Measured shift falls outside the calibration curve's range."""

    def __init__(self, message, valid_range=None):
        super().__init__(message)
        self.valid_range = valid_range
