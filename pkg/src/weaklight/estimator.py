"""Calibration curves from phase to spectral shift, and their inversion.

A calibration curve tabulates the expected shift magnitude against the
phase parameter at a fixed post-selection angle and source. Interpolation
is shape-preserving piecewise cubic (PCHIP), so the inverse map and the
derivative used for precision propagation are both continuous. Curves can
be persisted to CSV + JSON sidecar and reloaded bit-exactly.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import simulator
from .errors import CalibrationDomainError, ExtrapolationRefusedError, InvalidConfigError
from .polarization import PostSelectionParams
from .spectral import SourceParams

MODES = ("analytic", "simulated", "simulated-with-spread")

#: Default node count over the default phase range.
DEFAULT_POINTS = 121
DEFAULT_ALPHA_RANGE = (0.0, 0.013)


@dataclass(frozen=True, eq=False)
class CalibrationCurve:
    """Monotone table of (phase, expected |shift|) at fixed angle and source."""

    beta: float
    source: SourceParams
    alphas: np.ndarray
    shifts: np.ndarray
    mode: str

    def __post_init__(self):
        alphas = np.ascontiguousarray(self.alphas, dtype=float)
        shifts = np.ascontiguousarray(self.shifts, dtype=float)
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if alphas.ndim != 1 or alphas.size < 3 or shifts.shape != alphas.shape:
            raise ValueError("need matching 1-d arrays with at least 3 nodes")
        if not np.all(np.diff(alphas) > 0):
            raise ValueError("phase nodes must be strictly increasing")
        bad = np.nonzero(np.diff(shifts) <= 0)[0]
        if bad.size:
            i = int(bad[0])
            raise CalibrationDomainError(
                f"shift is not strictly increasing between alpha={alphas[i]:.6g} "
                f"and alpha={alphas[i + 1]:.6g} (mode={self.mode}, beta={self.beta:.6g})"
            )
        alphas.flags.writeable = False
        shifts.flags.writeable = False
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "shifts", shifts)
        object.__setattr__(self, "_forward", None)
        object.__setattr__(self, "_inverse", None)

    def forward(self) -> PchipInterpolator:
        if self._forward is None:
            object.__setattr__(self, "_forward", PchipInterpolator(self.alphas, self.shifts))
        return self._forward

    def inverse(self) -> PchipInterpolator:
        if self._inverse is None:
            object.__setattr__(self, "_inverse", PchipInterpolator(self.shifts, self.alphas))
        return self._inverse

    @property
    def shift_range(self) -> tuple[float, float]:
        return float(self.shifts[0]), float(self.shifts[-1])


def _simulated_shift(alpha: float, beta: float, source: SourceParams,
                     spread: float, with_spread: bool) -> float:
    config = simulator.SetupConfig(
        source=source,
        postsel=PostSelectionParams(beta, spread if with_spread else 0.0),
        alpha=alpha,
    )
    if with_spread:
        result = simulator.run_with_polarizer_spread(config, mode="exact")
    else:
        result = simulator.run(config)
    return abs(result.delta_lambda)


def build_calibration(
    beta: float,
    source: SourceParams,
    alpha_range: tuple[float, float] = DEFAULT_ALPHA_RANGE,
    n_points: int = DEFAULT_POINTS,
    mode: str = "analytic",
    spread: float = 0.0,
) -> CalibrationCurve:
    """Tabulate the expected shift magnitude over a phase range.

    ``analytic`` evaluates the closed-form shift (requires ``beta > 0``:
    at exactly orthogonal post-selection the closed form is flat in the
    phase and cannot be inverted). ``simulated`` runs the ideal-polarizer
    chain per node; ``simulated-with-spread`` ensemble-averages over the
    polarizer uncertainty ``spread`` and is the only mode usable at
    ``beta = 0``.
    """
    lo, hi = alpha_range
    if not (0.0 <= lo < hi):
        raise ValueError(f"need 0 <= lo < hi, got ({lo}, {hi})")
    if n_points < 3:
        raise ValueError(f"need at least 3 nodes, got {n_points}")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    alphas = np.linspace(lo, hi, n_points)
    if mode == "analytic":
        if beta == 0.0:
            raise CalibrationDomainError(
                "analytic shift at beta=0 is phase-independent and cannot be "
                "inverted; build a simulated-with-spread curve instead"
            )
        from .weakvalue import wavelength_shift_analytic

        shifts = np.array(
            [
                0.0 if a == 0.0 else wavelength_shift_analytic(a, beta, source)
                for a in alphas
            ]
        )
    elif mode == "simulated":
        if beta == 0.0:
            raise CalibrationDomainError(
                "ideal-polarizer simulation at beta=0 has a phase-independent "
                "shift; build a simulated-with-spread curve instead"
            )
        shifts = np.array([_simulated_shift(a, beta, source, 0.0, False) for a in alphas])
    else:
        if spread <= 0.0:
            raise ValueError("simulated-with-spread mode needs spread > 0")
        shifts = np.array([_simulated_shift(a, beta, source, spread, True) for a in alphas])
    return CalibrationCurve(beta, source, alphas, shifts, mode)


def invert_shift(curve: CalibrationCurve, measured_dl: float) -> float:
    """Phase estimate for a measured shift magnitude (nm).

    Refuses values outside the curve's tabulated shift range rather than
    clamping or extrapolating.
    """
    lo, hi = curve.shift_range
    if not (lo <= measured_dl <= hi):
        raise ExtrapolationRefusedError(
            f"measured shift {measured_dl:.6g} nm outside calibration range "
            f"[{lo:.6g}, {hi:.6g}] nm",
            valid_range=(lo, hi),
        )
    return float(curve.inverse()(measured_dl))


def curve_slope(curve: CalibrationCurve, alpha: float) -> float:
    """d(shift)/d(phase) of the calibrated response at ``alpha``."""
    return float(curve.forward().derivative()(alpha))


def precision(alpha: float, beta: float, source: SourceParams, sigma_dl: float) -> float:
    """Phase uncertainty from shift uncertainty via the analytic slope.

    ``sigma_alpha = sigma_dl / |d(shift)/d(alpha)|``. At ``beta = alpha``
    this reduces exactly to ``lambda0 * alpha * sigma_dl / delta_lambda**2``.
    Degenerate cases: returns 0 for ``sigma_dl = 0``; returns ``inf`` at
    ``alpha = 0`` where the analytic slope vanishes.
    """
    if sigma_dl < 0:
        raise ValueError(f"sigma_dl must be >= 0, got {sigma_dl}")
    if beta == 0.0:
        raise CalibrationDomainError(
            "analytic response at beta=0 has zero slope everywhere; use a "
            "simulated-with-spread calibration curve"
        )
    if sigma_dl == 0.0:
        return 0.0
    if alpha == 0.0:
        return math.inf
    from .weakvalue import wavelength_shift_slope

    return sigma_dl / abs(wavelength_shift_slope(alpha, beta, source))


def curve_precision(curve: CalibrationCurve, alpha: float, sigma_dl: float) -> float:
    """Slope-based phase uncertainty evaluated on a calibration curve."""
    if sigma_dl < 0:
        raise ValueError(f"sigma_dl must be >= 0, got {sigma_dl}")
    if sigma_dl == 0.0:
        return 0.0
    slope = curve_slope(curve, alpha)
    if slope <= 0.0:
        raise CalibrationDomainError(
            f"calibrated response is flat at alpha={alpha:.6g}"
        )
    return sigma_dl / slope


def optimal_beta(alpha_prior: float) -> float:
    """Post-selection angle minimizing the phase uncertainty: ``beta = alpha``.

    Exact for the analytic response; :func:`optimal_beta_scan` confirms the
    minimum numerically.
    """
    if not alpha_prior > 0:
        raise ValueError(f"alpha_prior must be positive, got {alpha_prior}")
    return alpha_prior


def optimal_beta_scan(
    alpha: float, source: SourceParams, sigma_dl: float, n: int = 81
) -> tuple[np.ndarray, np.ndarray]:
    """Numeric sigma_alpha(beta) over ``beta in [alpha/4, 4*alpha]``."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    betas = np.linspace(alpha / 4.0, 4.0 * alpha, n)
    sigmas = np.array([precision(alpha, b, source, sigma_dl) for b in betas])
    return betas, sigmas


@dataclass(frozen=True)
class Estimate:
    """Recovered phase with propagated uncertainty."""

    alpha_hat: float
    sigma_alpha: float
    beta_used: float
    method: str

    def __post_init__(self):
        if self.sigma_alpha < 0:
            raise ValueError("sigma_alpha must be >= 0")
        if self.method not in ("curve-inversion", "closed-form"):
            raise ValueError(f"unknown method {self.method!r}")


def estimate_from_shift(
    curve: CalibrationCurve, measured_dl: float, sigma_dl: float = 0.0
) -> Estimate:
    """Invert a measured shift magnitude on a calibration curve."""
    alpha_hat = invert_shift(curve, measured_dl)
    sigma_alpha = curve_precision(curve, alpha_hat, sigma_dl) if sigma_dl > 0 else 0.0
    return Estimate(alpha_hat, sigma_alpha, curve.beta, "curve-inversion")


def _curve_hash(curve: CalibrationCurve) -> str:
    digest = hashlib.sha256()
    digest.update(curve.alphas.tobytes())
    digest.update(curve.shifts.tobytes())
    meta = (curve.beta, curve.source.lambda0, curve.source.delta_lambda, curve.mode)
    digest.update(repr(meta).encode())
    return digest.hexdigest()


def _sidecar_path(csv_path) -> Path:
    return Path(csv_path).with_suffix(".json")


def save_calibration(curve: CalibrationCurve, csv_path) -> None:
    """Persist a curve as ``alpha_rad,delta_lambda_nm`` CSV plus JSON sidecar.

    Values are written with 17 significant digits so the reloaded curve is
    bit-identical and reproduces every inversion exactly.
    """
    csv_path = Path(csv_path)
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("alpha_rad,delta_lambda_nm\n")
        for a, d in zip(curve.alphas, curve.shifts):
            fh.write(f"{a:.17g},{d:.17g}\n")
    sidecar = {
        "schema_version": 1,
        "beta_rad": curve.beta,
        "source": {
            "lambda0_nm": curve.source.lambda0,
            "delta_lambda_nm": curve.source.delta_lambda,
        },
        "mode": curve.mode,
        "n_points": int(curve.alphas.size),
        "build_hash": _curve_hash(curve),
    }
    with open(_sidecar_path(csv_path), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_calibration(csv_path) -> CalibrationCurve:
    """Reload a persisted curve, verifying the sidecar's integrity hash."""
    csv_path = Path(csv_path)
    sidecar_path = _sidecar_path(csv_path)
    if not sidecar_path.exists():
        raise InvalidConfigError(f"missing calibration sidecar {sidecar_path}")
    with open(sidecar_path, encoding="utf-8") as fh:
        meta = json.load(fh)
    data = np.genfromtxt(csv_path, delimiter=",", skip_header=1, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise InvalidConfigError(f"{csv_path}: expected two columns")
    curve = CalibrationCurve(
        beta=float(meta["beta_rad"]),
        source=SourceParams(
            float(meta["source"]["lambda0_nm"]),
            float(meta["source"]["delta_lambda_nm"]),
        ),
        alphas=data[:, 0],
        shifts=data[:, 1],
        mode=str(meta["mode"]),
    )
    if _curve_hash(curve) != meta.get("build_hash"):
        raise InvalidConfigError(
            f"{csv_path}: contents do not match the sidecar build hash"
        )
    return curve
