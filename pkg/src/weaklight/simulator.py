"""Wavelength-resolved propagation through the full measurement chain.

The chain is: broadband source -> balanced pre-selection -> thin effective
retarder (direct phase parameter or tilted crossed-plate geometry) ->
optional dispersive slab -> near-orthogonal post-selection -> spectrometer.
Propagation is bin-by-bin Jones algebra with no small-angle step anywhere,
which makes this module the all-orders reference the analytic shift
formulas in :mod:`weaklight.weakvalue` are checked against.

Randomness (spectrometer noise) flows from the single seed in
:class:`SetupConfig`; sweep rows derive independent sub-seeds from
``(seed, row_index)`` so serial and parallel execution agree bit for bit.
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _kernels, spectral
from .errors import InvalidConfigError, NoPhotonsError, WeaklightError
from .polarization import (
    DispersiveSlab,
    PlateParams,
    PostSelectionParams,
    Retarder,
    constant_index,
    post_state,
    pre_state,
    znse_index,
)
from .spectral import SPECTROMETER_GRID, SourceParams, Spectrum, WavelengthGrid

#: Number of quadrature nodes for polarizer-angle ensemble averaging.
SPREAD_QUADRATURE_POINTS = 241
#: Half-width of the quadrature window in units of the angular spread.
SPREAD_QUADRATURE_SIGMAS = 6.0

_INDEX_MODELS = {
    "znse": constant_index(2.48),
    "znse_pole": znse_index(),
}


def resolve_index_model(index) -> Callable:
    if callable(index):
        return index
    try:
        return _INDEX_MODELS[index]
    except KeyError:
        raise InvalidConfigError(
            f"unknown index model {index!r}; known: {sorted(_INDEX_MODELS)}"
        ) from None


@dataclass(frozen=True)
class SpectrometerParams:
    """Measurement window plus the two noise knobs.

    ``centroid_noise_nm`` is the one-sigma uncertainty added to the reported
    shift; ``relative_noise`` is multiplicative per-bin intensity noise.
    """

    grid: WavelengthGrid = SPECTROMETER_GRID
    centroid_noise_nm: float = 0.0
    relative_noise: float = 0.0

    def __post_init__(self):
        if self.centroid_noise_nm < 0 or self.relative_noise < 0:
            raise ValueError("noise levels must be >= 0")


@dataclass(frozen=True)
class DispersionSpec:
    """Isotropic slab inserted in the chain.

    ``index`` is either a model name ("znse" for the constant 2.48 default,
    "znse_pole" for the single-pole fit) or a callable wavelength_nm -> n.
    """

    thickness_mm: float
    index: object = "znse"

    def __post_init__(self):
        if self.thickness_mm < 0:
            raise ValueError("thickness must be >= 0")
        resolve_index_model(self.index)

    def slab(self) -> DispersiveSlab:
        return DispersiveSlab(self.thickness_mm, resolve_index_model(self.index))


@dataclass(frozen=True)
class SetupConfig:
    """Complete description of one experimental configuration.

    Exactly one of ``plate`` (tilt geometry) and ``alpha`` (direct phase
    parameter) must be given. With ``extended_grid`` on (the default) the
    physics runs on an internal +-5-width grid and only
    :func:`apply_spectrometer` sees the instrument window; switching it off
    reproduces window-truncated behavior end to end.
    """

    source: SourceParams
    postsel: PostSelectionParams
    plate: PlateParams | None = None
    alpha: float | None = None
    dispersion: DispersionSpec | None = None
    spectrometer: SpectrometerParams = dataclasses.field(
        default_factory=SpectrometerParams
    )
    extended_grid: bool = True
    seed: int = 0

    def __post_init__(self):
        if (self.plate is None) == (self.alpha is None):
            raise InvalidConfigError(
                "exactly one of plate and alpha must be set"
            )
        if self.alpha is not None and not math.isfinite(self.alpha):
            raise InvalidConfigError(f"alpha must be finite, got {self.alpha}")

    @property
    def effective_alpha(self) -> float:
        return self.alpha if self.alpha is not None else self.plate.alpha

    def internal_grid(self) -> WavelengthGrid:
        if not self.extended_grid:
            return self.spectrometer.grid
        half_span = 5.0 * self.source.delta_lambda
        return WavelengthGrid.from_range(
            self.source.lambda0 - half_span,
            self.source.lambda0 + half_span,
            self.spectrometer.grid.step,
        )


@dataclass(frozen=True)
class SimulationResult:
    """Output spectrum plus the derived scalars.

    ``delta_lambda`` is signed (negative means the transmitted spectrum
    moved toward shorter wavelengths, which is the physical direction here);
    ``reference_centroid`` is the centroid of the zero-phase run on the same
    grid.
    """

    output_spectrum: Spectrum
    postselection_probability: float
    delta_lambda: float
    reference_centroid: float

    def __post_init__(self):
        p = self.postselection_probability
        if p < -1e-12 or p > 1.0 + 1e-9:
            raise ValueError(f"postselection probability {p} outside [0, 1]")
        object.__setattr__(
            self, "postselection_probability", min(max(p, 0.0), 1.0)
        )


def postselection_probability_at(
    lam: float, alpha: float, beta: float, lambda0: float
) -> float:
    """Survival probability at a single wavelength, by explicit Jones algebra.

    Builds the retarder matrix at ``lam`` and sandwiches it between the
    pre- and post-selection states. The closed form
    ``(1 - cos(beta)*cos(alpha*lambda0/lam)) / 2`` is an independent
    cross-check, not the implementation (see tests).
    """
    amp = Retarder(alpha, lambda0).at(lam).sandwich(post_state(beta), pre_state())
    return abs(amp) ** 2


def transmission_closed_form(lam, alpha: float, beta: float, lambda0: float):
    """Hand-derived transmission ``(1 - cos(beta)*cos(alpha*lambda0/lam))/2``.

    Used only to cross-check the Jones-algebra path.
    """
    lam = np.asarray(lam, dtype=float)
    return 0.5 * (1.0 - math.cos(beta) * np.cos(alpha * lambda0 / lam))


def _evaluate_index(model: Callable, lam: np.ndarray) -> np.ndarray:
    try:
        n = np.asarray(model(lam), dtype=float)
        return np.broadcast_to(n, lam.shape)
    except (TypeError, ValueError):
        return np.array([float(model(x)) for x in lam])


def _chi_array(config: SetupConfig, lam: np.ndarray):
    if config.dispersion is None or config.dispersion.thickness_mm == 0.0:
        return None
    model = resolve_index_model(config.dispersion.index)
    n = _evaluate_index(model, lam)
    if not np.all(np.isfinite(n)):
        raise InvalidConfigError("index model undefined on the simulation grid")
    thickness_nm = config.dispersion.thickness_mm * 1e6
    return np.ascontiguousarray(2.0 * np.pi * n * thickness_nm / lam)


def _source_and_chi(config: SetupConfig):
    grid = config.internal_grid()
    src = spectral.gaussian_spectrum(config.source, grid)
    lam = np.ascontiguousarray(grid.wavelengths())
    return grid, lam, src, _chi_array(config, lam)


def run(config: SetupConfig) -> SimulationResult:
    """Propagate the source through the chain with ideal polarizers.

    The reference for the shift is the zero-phase run at the same
    post-selection angle, whose output has exactly the source's shape, so
    ``delta_lambda`` is zero by construction when the plate is untilted.
    """
    alpha = config.effective_alpha
    beta = config.postsel.beta
    grid, lam, src, chi = _source_and_chi(config)
    out_density = _kernels.postselected_density(
        lam, src.density, alpha, beta, config.source.lambda0, chi
    )
    total, c_out, _ = _kernels.trapezoid_moments(lam, out_density)
    if total < 1e-30:
        raise NoPhotonsError(
            f"no transmitted intensity at alpha={alpha}, beta={beta} "
            "(exactly orthogonal ideal polarizers?)"
        )
    _, c_ref, _ = _kernels.trapezoid_moments(lam, src.density)
    return SimulationResult(
        output_spectrum=Spectrum(grid, out_density),
        postselection_probability=total,
        delta_lambda=c_out - c_ref,
        reference_centroid=c_ref,
    )


def spread_quadrature(beta: float, spread: float, n: int = SPREAD_QUADRATURE_POINTS):
    """Uniform angle grid over ``beta +- 6*spread`` and its Gaussian weights."""
    angles = np.linspace(
        beta - SPREAD_QUADRATURE_SIGMAS * spread,
        beta + SPREAD_QUADRATURE_SIGMAS * spread,
        n,
    )
    gauss = np.exp(-((beta - angles) ** 2) / (2.0 * spread * spread))
    return np.ascontiguousarray(angles), gauss


def run_with_polarizer_spread(config: SetupConfig, mode: str = "exact") -> SimulationResult:
    """Ensemble average over the polarizer angular uncertainty.

    The actual post-selection angle is Gaussian-distributed around the set
    value with the configured spread. Two weighting modes:

    * ``"exact"`` (default): Gaussian weights times each angle's simulated
      survival probability -- the photon-weighted mixture.
    * ``"paper"``: weights ``angle**2 * gaussian`` with no separate survival
      factor; the quadratic factor stands in for the survival probability,
      which is accurate only in the small-phase limit. Kept for reproducing
      published ensemble-averaged curves.

    With zero spread this delegates to :func:`run`.
    """
    if mode not in ("exact", "paper"):
        raise ValueError(f"mode must be 'exact' or 'paper', got {mode!r}")
    spread = config.postsel.spread
    if spread == 0.0:
        return run(config)
    alpha = config.effective_alpha
    beta = config.postsel.beta
    grid, lam, src, chi = _source_and_chi(config)
    angles, gauss = spread_quadrature(beta, spread)

    probs, cents = _kernels.spread_ensemble(
        lam, src.density, alpha, config.source.lambda0, angles, chi
    )
    gauss_total = float(np.sum(gauss))
    marginal_prob = float(np.sum(gauss * probs)) / gauss_total

    if mode == "exact":
        weights = gauss * probs
        if float(np.sum(weights)) < 1e-30:
            raise NoPhotonsError("ensemble transmits no intensity")
        mixture_coeffs = gauss / gauss_total
    else:
        weights = angles * angles * gauss
        if float(np.sum(weights)) < 1e-30:
            raise NoPhotonsError("ensemble weights vanish")
        norm_w = weights / float(np.sum(weights))
        safe = probs > 1e-300
        mixture_coeffs = np.where(safe, marginal_prob * norm_w / np.where(safe, probs, 1.0), 0.0)

    conditional_centroid = float(np.sum(weights * cents)) / float(np.sum(weights))
    mixture = _kernels.spread_mixture(
        lam,
        src.density,
        alpha,
        config.source.lambda0,
        angles,
        np.ascontiguousarray(mixture_coeffs),
        chi,
    )
    _, c_ref, _ = _kernels.trapezoid_moments(lam, src.density)
    return SimulationResult(
        output_spectrum=Spectrum(grid, mixture),
        postselection_probability=marginal_prob,
        delta_lambda=conditional_centroid - c_ref,
        reference_centroid=c_ref,
    )


def derive_row_seed(master_seed: int, row_index: int) -> int:
    """Deterministic independent sub-seed for one sweep row."""
    seq = np.random.SeedSequence(master_seed, spawn_key=(row_index,))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def apply_spectrometer(
    result: SimulationResult, config: SetupConfig, row_index: int = 0
) -> SimulationResult:
    """Measure a simulation result through the configured spectrometer.

    Resamples onto the instrument window (which truncates whatever falls
    outside), optionally applies per-bin multiplicative noise, recomputes
    the centroid shift against the windowed reference, and optionally adds
    the Gaussian centroid perturbation. Deterministic for a fixed
    ``(config.seed, row_index)``.
    """
    sp = config.spectrometer
    out_w = spectral.resample(result.output_spectrum, sp.grid)
    src = spectral.gaussian_spectrum(config.source, config.internal_grid())
    ref_w = spectral.resample(src, sp.grid)

    rng = np.random.default_rng(
        np.random.SeedSequence(config.seed, spawn_key=(row_index,))
    )
    density = out_w.density
    if sp.relative_noise > 0.0:
        density = np.clip(
            density * (1.0 + sp.relative_noise * rng.standard_normal(density.size)),
            0.0,
            None,
        )
        out_w = Spectrum(sp.grid, density)

    delta = spectral.centroid(out_w) - spectral.centroid(ref_w)
    if sp.centroid_noise_nm > 0.0:
        delta += sp.centroid_noise_nm * rng.standard_normal()

    return SimulationResult(
        output_spectrum=out_w,
        postselection_probability=result.postselection_probability,
        delta_lambda=delta,
        reference_centroid=spectral.centroid(ref_w),
    )


@dataclass(frozen=True)
class SweepRow:
    """One line of a sweep table. ``theta`` is NaN for direct-phase sweeps;
    on a per-row failure the numeric outputs are NaN and ``error`` holds the
    message."""

    theta: float
    alpha: float
    beta: float
    delta_lambda: float
    postselect_prob: float
    error: str | None = None


def _evaluate_row(base: SetupConfig, theta: float, alpha: float, beta: float,
                  index: int, mode: str) -> SweepRow:
    try:
        config = dataclasses.replace(
            base,
            alpha=alpha,
            plate=None,
            postsel=dataclasses.replace(base.postsel, beta=beta),
            seed=derive_row_seed(base.seed, index),
        )
        if config.postsel.spread > 0.0:
            result = run_with_polarizer_spread(config, mode=mode)
        else:
            result = run(config)
        return SweepRow(
            theta, alpha, beta, result.delta_lambda, result.postselection_probability
        )
    except WeaklightError as exc:
        return SweepRow(theta, alpha, beta, math.nan, math.nan, error=str(exc))


def sweep(
    base: SetupConfig,
    betas: Sequence[float],
    alphas: Sequence[float] | None = None,
    thetas: Sequence[float] | None = None,
    mode: str = "exact",
    threads: int = 1,
) -> list[SweepRow]:
    """Run the chain over a grid of post-selection angles and phases.

    Exactly one of ``alphas`` (direct phase parameters) and ``thetas``
    (tilt angles, converted through the plate geometry of ``base.plate``)
    must be given. Rows are ordered by (beta, phase) input order; failures
    are recorded per row without aborting the sweep. The result is
    independent of ``threads``.
    """
    if (alphas is None) == (thetas is None):
        raise InvalidConfigError("exactly one of alphas and thetas must be given")
    if len(betas) == 0:
        raise InvalidConfigError("at least one beta is required")
    if thetas is not None:
        if base.plate is None:
            plate = PlateParams(0.0, 1.54, base.source.lambda0)
        else:
            plate = base.plate
        pairs = [
            (float(t), PlateParams(float(t), plate.n0, plate.lambda0_design).alpha)
            for t in thetas
        ]
    else:
        pairs = [(math.nan, float(a)) for a in alphas]

    tasks = []
    index = 0
    for beta in betas:
        for theta, alpha in pairs:
            tasks.append((theta, alpha, float(beta), index))
            index += 1

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(_evaluate_row, base, t, a, b, i, mode)
                for (t, a, b, i) in tasks
            ]
            return [f.result() for f in futures]
    return [_evaluate_row(base, t, a, b, i, mode) for (t, a, b, i) in tasks]


SWEEP_CSV_HEADER = "theta_rad,alpha_rad,beta_rad,delta_lambda_nm,postselect_prob"


def write_sweep_csv(rows: Sequence[SweepRow], path, signed: bool = False) -> None:
    """Write sweep rows in the stable 5-column format (9 significant digits).

    By default the shift column carries magnitudes; ``signed=True`` keeps
    the sign (negative = blueshift at the transmitted port).
    """
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(SWEEP_CSV_HEADER + "\n")
        for row in rows:
            dl = row.delta_lambda if signed else abs(row.delta_lambda)
            fh.write(
                f"{row.theta:.9g},{row.alpha:.9g},{row.beta:.9g},"
                f"{dl:.9g},{row.postselect_prob:.9g}\n"
            )
