"""Optical spectra on fixed wavelength grids.

A spectrum is a sampled non-negative intensity density (arbitrary units per
nm) over a uniform wavelength grid. All quadrature is trapezoidal on the
fixed grid -- no adaptive integration anywhere -- so every statistic is
bit-reproducible for a given grid.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DegenerateSpectrumError, GridMismatchError, InvalidConfigError


@dataclass(frozen=True)
class WavelengthGrid:
    """Uniform grid of wavelengths ``start + i*step`` (nm), ``count`` points."""

    start: float
    step: float
    count: int

    def __post_init__(self):
        if not self.start > 0:
            raise ValueError(f"grid start must be positive, got {self.start}")
        if not self.step > 0:
            raise ValueError(f"grid step must be positive, got {self.step}")
        if self.count < 2:
            raise ValueError(f"grid needs at least 2 points, got {self.count}")

    @property
    def stop(self) -> float:
        """Last grid point (nm)."""
        return self.start + (self.count - 1) * self.step

    def wavelengths(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.count)

    @classmethod
    def from_range(cls, start: float, stop: float, step: float) -> "WavelengthGrid":
        """Grid covering [start, stop] inclusive; (stop-start) must be an
        integral number of steps (within rounding)."""
        count = int(round((stop - start) / step)) + 1
        return cls(start, step, count)


#: Spectrometer window used throughout: 715-915 nm sampled every 0.02 nm.
SPECTROMETER_GRID = WavelengthGrid(715.0, 0.02, 10001)


@dataclass(frozen=True)
class Spectrum:
    """Sampled intensity density over a :class:`WavelengthGrid`.

    The density array is copied and frozen at construction; values must be
    finite and non-negative.
    """

    grid: WavelengthGrid
    density: np.ndarray

    def __post_init__(self):
        dens = np.asarray(self.density, dtype=float)
        if dens.shape != (self.grid.count,):
            raise ValueError(
                f"density has shape {dens.shape}, grid expects ({self.grid.count},)"
            )
        if not np.all(np.isfinite(dens)):
            raise ValueError("density must be finite everywhere")
        if np.any(dens < 0):
            raise ValueError("density must be non-negative everywhere")
        dens = dens.copy()
        dens.flags.writeable = False
        object.__setattr__(self, "density", dens)

    def wavelengths(self) -> np.ndarray:
        return self.grid.wavelengths()


@dataclass(frozen=True)
class SourceParams:
    """Broadband source characterized by central wavelength and RMS width.

    ``delta_lambda`` is the standard deviation of the spectral density, not
    the FWHM; a FWHM reading would shrink every predicted centroid shift by
    (1/2.355)**2.
    """

    lambda0: float
    delta_lambda: float

    def __post_init__(self):
        if not self.lambda0 > 0:
            raise ValueError(f"lambda0 must be positive, got {self.lambda0}")
        if not 0 < self.delta_lambda < self.lambda0:
            raise ValueError(
                f"delta_lambda must lie in (0, lambda0), got {self.delta_lambda}"
            )


def _moments(s: Spectrum):
    total, mean, var = _kernels.trapezoid_moments(s.wavelengths(), s.density)
    if total <= 0.0:
        raise DegenerateSpectrumError("spectrum has zero total intensity")
    return total, mean, var


def integral(s: Spectrum) -> float:
    """Trapezoidal integral of the density over the grid."""
    total, _, _ = _kernels.trapezoid_moments(s.wavelengths(), s.density)
    return total


def normalize(s: Spectrum) -> Spectrum:
    """Rescale so the trapezoidal integral over the grid equals 1."""
    total, _, _ = _moments(s)
    return Spectrum(s.grid, s.density / total)


def centroid(s: Spectrum) -> float:
    """Intensity-weighted mean wavelength (nm) via trapezoidal quadrature."""
    _, mean, _ = _moments(s)
    return mean


def rms_width(s: Spectrum) -> float:
    """Square root of the intensity-weighted wavelength variance (nm)."""
    _, _, var = _moments(s)
    return np.sqrt(max(var, 0.0))


def shift_between(reference: Spectrum, measured: Spectrum) -> float:
    """Signed centroid shift ``centroid(measured) - centroid(reference)``.

    Positive means redshift. Both spectra must share the same grid.
    """
    if reference.grid != measured.grid:
        raise GridMismatchError(
            f"spectra on different grids: {reference.grid} vs {measured.grid}"
        )
    return centroid(measured) - centroid(reference)


def momentum_stats(params: SourceParams) -> tuple[float, float]:
    """Central angular wavenumber and its width (rad/nm).

    Uses ``P = 2*pi/lambda`` and first-order propagation of the width,
    valid because the relative spectral width is small.
    """
    p0 = 2.0 * np.pi / params.lambda0
    dp = 2.0 * np.pi * params.delta_lambda / params.lambda0**2
    return p0, dp


def gaussian_spectrum(params: SourceParams, grid: WavelengthGrid) -> Spectrum:
    """Normalized Gaussian density with mean ``lambda0`` and standard
    deviation ``delta_lambda``, truncated to the grid.

    Raises
    ------
    InvalidConfigError
        If the grid lies entirely outside ``lambda0 +- 5*delta_lambda``.

    Warns when the grid covers less than ``lambda0 +- 2.5*delta_lambda``,
    because truncation then visibly biases the moments.
    """
    lo = params.lambda0 - 5.0 * params.delta_lambda
    hi = params.lambda0 + 5.0 * params.delta_lambda
    if grid.stop < lo or grid.start > hi:
        raise InvalidConfigError(
            f"grid [{grid.start}, {grid.stop}] nm lies entirely outside "
            f"[{lo:.6g}, {hi:.6g}] nm; the spectrum would be all zeros"
        )
    if grid.start > params.lambda0 - 2.5 * params.delta_lambda or grid.stop < (
        params.lambda0 + 2.5 * params.delta_lambda
    ):
        warnings.warn(
            f"grid [{grid.start}, {grid.stop}] nm covers less than +-2.5 "
            f"widths around {params.lambda0} nm; moments will be biased by "
            "truncation",
            stacklevel=2,
        )
    z = (grid.wavelengths() - params.lambda0) / params.delta_lambda
    return normalize(Spectrum(grid, np.exp(-0.5 * z * z)))


def translate(s: Spectrum, offset: float) -> Spectrum:
    """Shift the density by ``offset`` nm along the same grid.

    Resamples by linear interpolation; intensity entering from outside the
    grid is zero.
    """
    lam = s.wavelengths()
    return Spectrum(s.grid, np.interp(lam - offset, lam, s.density, left=0.0, right=0.0))


def resample(s: Spectrum, grid: WavelengthGrid) -> Spectrum:
    """Linear-interpolation resampling onto another grid (zero outside)."""
    dens = np.interp(grid.wavelengths(), s.wavelengths(), s.density, left=0.0, right=0.0)
    return Spectrum(grid, dens)


def save_spectrum_csv(s: Spectrum, path) -> None:
    """Write a two-column CSV ``wavelength_nm,intensity``."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("wavelength_nm,intensity\n")
        for lam, d in zip(s.wavelengths(), s.density):
            fh.write(f"{lam:.9g},{d:.9g}\n")


def load_spectrum_csv(path, grid: WavelengthGrid) -> Spectrum:
    """Read a ``wavelength_nm,intensity`` CSV and resample onto ``grid``.

    The file's wavelengths must be strictly increasing.
    """
    data = np.genfromtxt(path, delimiter=",", skip_header=1, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2 or data.shape[0] < 2:
        raise InvalidConfigError(f"{path}: expected two columns and >= 2 rows")
    lam, dens = data[:, 0], data[:, 1]
    if not np.all(np.diff(lam) > 0):
        raise InvalidConfigError(f"{path}: wavelengths must be strictly increasing")
    if np.any(dens < 0) or not np.all(np.isfinite(dens)):
        raise InvalidConfigError(f"{path}: intensities must be finite and >= 0")
    return Spectrum(grid, np.interp(grid.wavelengths(), lam, dens, left=0.0, right=0.0))
