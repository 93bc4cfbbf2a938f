"""White-light weak-measurement phase estimation toolkit.

Simulates the pre-selection -> thin birefringent plate -> near-orthogonal
post-selection -> spectrometer chain for broadband light, and inverts
measured spectral-centroid shifts into phase estimates with propagated
uncertainty.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND as KERNEL_BACKEND
from .errors import (
    CalibrationDomainError,
    DegenerateSpectrumError,
    ExtrapolationRefusedError,
    GridMismatchError,
    InvalidConfigError,
    NoPhotonsError,
    OrthogonalPostselectionError,
    WeaklightError,
)
from .estimator import (
    CalibrationCurve,
    Estimate,
    build_calibration,
    curve_precision,
    estimate_from_shift,
    invert_shift,
    load_calibration,
    optimal_beta,
    optimal_beta_scan,
    precision,
    save_calibration,
)
from .polarization import (
    DispersiveSlab,
    HwpPair,
    PlateParams,
    PolarizationOperator,
    PolarizationState,
    PostSelectionParams,
    Retarder,
    alpha_from_tilt,
    alpha_from_tilt_approx,
    post_state,
    pre_state,
)
from .simulator import (
    DispersionSpec,
    SetupConfig,
    SimulationResult,
    SpectrometerParams,
    SweepRow,
    apply_spectrometer,
    postselection_probability_at,
    run,
    run_with_polarizer_spread,
    sweep,
)
from .spectral import (
    SPECTROMETER_GRID,
    SourceParams,
    Spectrum,
    WavelengthGrid,
    centroid,
    gaussian_spectrum,
    load_spectrum_csv,
    momentum_stats,
    normalize,
    rms_width,
    save_spectrum_csv,
    shift_between,
)
from .weakvalue import (
    CouplingParams,
    WeakValue,
    momentum_shift,
    wavelength_shift_analytic,
    weak_value_exact,
    weak_value_smallangle,
)
