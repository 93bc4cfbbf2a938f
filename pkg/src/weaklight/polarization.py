"""Jones-calculus primitives for the pre/post-selected measurement chain.

Everything lives in the (|H>, |V>) basis. States are unit two-component
complex vectors, optical elements are wavelength-parameterized 2x2 complex
Jones matrices. Global phases are physically irrelevant in this chain but
are never stripped silently: comparisons up to a global phase go through
:func:`states_equal_up_to_phase` / :func:`matrices_equal_up_to_phase`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidConfigError


@dataclass(frozen=True)
class PolarizationState:
    """Unit Jones vector; normalized at construction."""

    h: complex
    v: complex

    def __post_init__(self):
        norm = math.sqrt(abs(self.h) ** 2 + abs(self.v) ** 2)
        if not norm > 0 or not math.isfinite(norm):
            raise ValueError("state amplitudes must be finite and not both zero")
        object.__setattr__(self, "h", complex(self.h) / norm)
        object.__setattr__(self, "v", complex(self.v) / norm)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.h, self.v], dtype=complex)

    def overlap(self, other: "PolarizationState") -> complex:
        """<self|other>."""
        return np.conj(self.h) * other.h + np.conj(self.v) * other.v


@dataclass(frozen=True)
class PolarizationOperator:
    """2x2 complex Jones matrix in the (|H>, |V>) basis."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"Jones matrix must be 2x2, got shape {m.shape}")
        if not np.all(np.isfinite(m.view(float))):
            raise ValueError("Jones matrix elements must be finite")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def apply(self, state: PolarizationState) -> np.ndarray:
        """Raw (possibly unnormalized) output amplitudes."""
        return self.matrix @ state.vector

    def sandwich(self, post: PolarizationState, pre: PolarizationState) -> complex:
        """<post| M |pre>."""
        return complex(np.conj(post.vector) @ self.matrix @ pre.vector)


def pre_state() -> PolarizationState:
    """Balanced diagonal input state (equal H and V amplitudes)."""
    return PolarizationState(math.sin(math.pi / 4), math.cos(math.pi / 4))


def post_state(beta: float) -> PolarizationState:
    """Post-selection state at angle parameter ``beta``.

    At ``beta = 0`` it is exactly orthogonal to :func:`pre_state`; the
    overlap magnitude is ``|sin(beta/2)|``.
    """
    if abs(beta) > math.pi / 2:
        raise ValueError(f"|beta| must be <= pi/2, got {beta}")
    a = 0.5 * beta - 0.25 * math.pi
    return PolarizationState(math.sin(a), math.cos(a))


def hv_analyzer() -> PolarizationOperator:
    """The H/V analyzer operator: +1 on |H>, -1 on |V>."""
    return PolarizationOperator(np.diag([1.0 + 0j, -1.0 + 0j]))


@dataclass(frozen=True)
class PlateParams:
    """Tilted-plate geometry: tilt angle, refractive index, design wavelength."""

    theta: float
    n0: float
    lambda0_design: float

    def __post_init__(self):
        if abs(self.theta) >= math.pi / 2:
            raise ValueError(f"|theta| must be < pi/2, got {self.theta}")
        if not self.n0 > 1:
            raise ValueError(f"n0 must exceed 1, got {self.n0}")
        if not self.lambda0_design > 0:
            raise ValueError(f"design wavelength must be positive, got {self.lambda0_design}")

    @property
    def alpha(self) -> float:
        return alpha_from_tilt(self.theta, self.n0)


@dataclass(frozen=True)
class PostSelectionParams:
    """Post-selection angle parameter and polarizer angular uncertainty."""

    beta: float
    spread: float = 0.0

    def __post_init__(self):
        if abs(self.beta) > math.pi / 2:
            raise ValueError(f"|beta| must be <= pi/2, got {self.beta}")
        if self.spread < 0:
            raise ValueError(f"spread must be >= 0, got {self.spread}")


def alpha_from_tilt(theta: float, n0: float) -> float:
    """Phase parameter produced by tilting one plate of the crossed pair.

    Exact geometric path-lengthening expression; grows quadratically for
    small tilts (see :func:`alpha_from_tilt_approx`).
    """
    s2 = math.sin(theta) ** 2
    if s2 >= n0 * n0:
        raise ValueError(f"sin(theta)^2 must be < n0^2 (theta={theta}, n0={n0})")
    return math.pi * (1.0 / math.sqrt(1.0 - s2 / (n0 * n0)) - 1.0)


def alpha_from_tilt_approx(theta: float, n0: float) -> float:
    """Small-tilt approximation ``pi * theta**2 / (2 * n0**2)``."""
    return math.pi * theta * theta / (2.0 * n0 * n0)


class ChromaticOperator:
    """Wavelength-parameterized Jones matrix."""

    def jones(self, lam: float) -> np.ndarray:
        raise NotImplementedError

    def at(self, lam: float) -> PolarizationOperator:
        return PolarizationOperator(self.jones(lam))

    def jones_grid(self, wavelengths) -> np.ndarray:
        """Stack of matrices, shape (n, 2, 2)."""
        return np.stack([self.jones(lam) for lam in np.asarray(wavelengths, dtype=float)])


class Retarder(ChromaticOperator):
    """Thin birefringent plate: relative H-V phase ``alpha`` at ``lambda0``.

    The optical-path difference is modeled as achromatic, so the phase at
    another wavelength is ``alpha * lambda0 / lam``; only this 1/lam
    chromaticity is kept by default. A relative-birefringence table
    ``delta_n(lam)`` (normalized or not -- only the ratio to its value at
    ``lambda0`` enters) can be supplied to add material dispersion.
    """

    def __init__(self, alpha: float, lambda0: float,
                 delta_n: Callable[[float], float] | None = None):
        if not math.isfinite(alpha):
            raise ValueError(f"alpha must be finite, got {alpha}")
        if not lambda0 > 0:
            raise ValueError(f"lambda0 must be positive, got {lambda0}")
        self.alpha = alpha
        self.lambda0 = lambda0
        self._delta_n = delta_n
        self._dn0 = delta_n(lambda0) if delta_n is not None else 1.0

    def phase(self, lam: float) -> float:
        """Relative H-V phase at wavelength ``lam`` (nm)."""
        if not lam > 0:
            raise ValueError(f"wavelength must be positive, got {lam}")
        scale = 1.0 if self._delta_n is None else self._delta_n(lam) / self._dn0
        return self.alpha * self.lambda0 / lam * scale

    def jones(self, lam: float) -> np.ndarray:
        half = 0.5 * self.phase(lam)
        return np.diag([np.exp(-1j * half), np.exp(1j * half)])


class HwpPair(ChromaticOperator):
    """Two crossed half-wave plates, one tilted.

    With zero tilt the retardances cancel exactly and the pair is the
    identity at every wavelength. A tilt lengthens the path in the tilted
    plate, leaving a thin effective retarder with phase parameter
    :func:`alpha_from_tilt`. ``composed=True`` evaluates the explicit
    two-matrix product; the default uses the equivalent single retarder
    (the two agree to rounding and that equality is a regression test).
    """

    def __init__(self, plate: PlateParams, composed: bool = False):
        self.plate = plate
        self.composed = composed

    def path_ratio(self) -> float:
        s2 = math.sin(self.plate.theta) ** 2
        return 1.0 / math.sqrt(1.0 - s2 / (self.plate.n0 ** 2))

    def equivalent_retarder(self) -> Retarder:
        return Retarder(self.plate.alpha, self.plate.lambda0_design)

    def jones(self, lam: float) -> np.ndarray:
        if not self.composed:
            return self.equivalent_retarder().jones(lam)
        lam0 = self.plate.lambda0_design
        tilted = Retarder(math.pi * self.path_ratio(), lam0)
        crossed = Retarder(-math.pi, lam0)
        return tilted.jones(lam) @ crossed.jones(lam)


class DispersiveSlab(ChromaticOperator):
    """Isotropic slab: common phase ``2*pi*n(lam)*thickness/lam`` times identity.

    Polarization-independent, so it provably cancels in any intensity
    spectrum; it is kept in the chain to make that cancellation an explicit,
    testable property rather than an assumption.
    """

    def __init__(self, thickness_mm: float, index_model: Callable[[float], float]):
        if thickness_mm < 0:
            raise ValueError(f"thickness must be >= 0, got {thickness_mm}")
        self.thickness_mm = thickness_mm
        self.index_model = index_model

    def phase(self, lam: float) -> float:
        if not lam > 0:
            raise ValueError(f"wavelength must be positive, got {lam}")
        n = self.index_model(lam)
        if n is None or not math.isfinite(n):
            raise InvalidConfigError(f"index model undefined at {lam} nm")
        thickness_nm = self.thickness_mm * 1e6
        return 2.0 * math.pi * n * thickness_nm / lam

    def phase_grid(self, wavelengths) -> np.ndarray:
        return np.array([self.phase(lam) for lam in np.asarray(wavelengths, dtype=float)])

    def jones(self, lam: float) -> np.ndarray:
        return np.exp(1j * self.phase(lam)) * np.eye(2, dtype=complex)


def constant_index(n: float) -> Callable[[float], float]:
    """Wavelength-independent refractive index model."""
    return lambda lam: n


# Single-pole fit for ZnSe in the near infrared: n^2 = 4.0 + 1.9*L^2/(L^2 - 0.113)
# with L in micrometers. Good to a few 1e-2 over ~550-1800 nm, which is more
# than enough here because a common phase never reaches any observable.
def znse_index() -> Callable[[float], float]:
    def model(lam_nm: float) -> float:
        um2 = (lam_nm * 1e-3) ** 2
        if um2 <= 0.113:
            raise InvalidConfigError(
                f"ZnSe single-pole fit undefined at {lam_nm} nm (pole region)"
            )
        return math.sqrt(4.0 + 1.9 * um2 / (um2 - 0.113))

    return model


def load_index_table_csv(path) -> Callable[[float], float]:
    """Read a ``wavelength_nm,index`` CSV into an interpolating index model.

    The model raises outside the tabulated range instead of extrapolating.
    """
    data = np.genfromtxt(path, delimiter=",", skip_header=1, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2 or data.shape[0] < 2:
        raise InvalidConfigError(f"{path}: expected two columns and >= 2 rows")
    lam, idx = data[:, 0], data[:, 1]
    if not np.all(np.diff(lam) > 0):
        raise InvalidConfigError(f"{path}: wavelengths must be strictly increasing")

    def model(lam_nm: float) -> float:
        if lam_nm < lam[0] or lam_nm > lam[-1]:
            raise InvalidConfigError(
                f"index table covers [{lam[0]}, {lam[-1]}] nm, needed {lam_nm} nm"
            )
        return float(np.interp(lam_nm, lam, idx))

    return model


def is_unitary(matrix: np.ndarray, tol: float = 1e-12) -> bool:
    m = np.asarray(matrix, dtype=complex)
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(2))) <= tol)


def states_equal_up_to_phase(a: PolarizationState, b: PolarizationState,
                             tol: float = 1e-12) -> bool:
    """True when ``a = exp(i*phi) * b`` for some real phi."""
    inner = a.overlap(b)
    return bool(abs(abs(inner) - 1.0) <= tol)


def matrices_equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-12) -> bool:
    """True when ``a = exp(i*phi) * b`` for some real phi."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    ia = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(b[ia]) <= tol:
        return bool(np.max(np.abs(a - b)) <= tol)
    phase = a[ia] / b[ia]
    if abs(abs(phase) - 1.0) > tol:
        return False
    return bool(np.max(np.abs(a - phase * b)) <= tol)
