"""Conditioned polarization averages and the resulting pointer-shift formulas.

The conditioned average ("weak value") of the H/V analyzer between the
nearly orthogonal pre- and post-selected states is computed exactly in a
pole-free rational form built from the two inner products, so the spurious
singularity of the cotangent form at ``beta = pi/2`` never appears.

Two small-angle conventions coexist deliberately. The exact value expands
to ``-2/(beta + i*alpha)``; the printed small-angle convention used by the
shift formulas is ``1/(beta - i*alpha)``, whose imaginary part, paired with
the coupling ``k = alpha * lambda0 / (2*pi)``, yields the same end formulas
as the exact expansion paired with ``k/2``. Both routes land on

    shift = 2 * width**2 * alpha**2 / (center * (alpha**2 + beta**2))

which the full spectral simulator (simulator.run) reproduces to ~1% without
any small-angle step, and that agreement is what the acceptance suite pins.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import OrthogonalPostselectionError
from .polarization import hv_analyzer
from .spectral import SourceParams

_DENOM_FLOOR = 1e-14


@dataclass(frozen=True)
class WeakValue:
    """Real and imaginary parts of a conditioned average."""

    re: float
    im: float

    def __post_init__(self):
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise ValueError("weak value must be finite")

    @property
    def as_complex(self) -> complex:
        return complex(self.re, self.im)


def weak_value_exact(alpha: float, beta: float) -> WeakValue:
    """Exact conditioned average of the H/V analyzer.

    Rational form: with ``a = beta/2 - pi/4``,

        (sin(a) - cos(a)*exp(i*alpha)) / (sin(a) + cos(a)*exp(i*alpha))

    The denominator magnitude equals sqrt(1 - cos(alpha)*cos(beta)), zero
    exactly at ``alpha = beta = 0`` where post-selection is impossible.
    """
    a = 0.5 * beta - 0.25 * math.pi
    rot = cmath.exp(1j * alpha)
    num = math.sin(a) - math.cos(a) * rot
    den = math.sin(a) + math.cos(a) * rot
    if abs(den) <= _DENOM_FLOOR:
        raise OrthogonalPostselectionError(
            f"post-selection probability vanishes at alpha={alpha}, beta={beta}"
        )
    w = num / den
    return WeakValue(w.real, w.imag)


def weak_value_from_two_state(alpha: float, beta: float, x_fraction: float) -> WeakValue:
    """Conditioned average computed from the forward/backward state pair at
    a fractional depth ``x_fraction`` inside the plate.

    The pre-selected state has accumulated phase ``alpha * x_fraction``
    worth of retardance, the post-selection bra the remaining
    ``alpha * (1 - x_fraction)``. The result is independent of
    ``x_fraction``; that invariance is asserted by the property tests.
    """
    if not 0.0 <= x_fraction <= 1.0:
        raise ValueError(f"x_fraction must lie in [0, 1], got {x_fraction}")
    f = x_fraction
    ket = np.array(
        [cmath.exp(-0.5j * alpha * f), cmath.exp(0.5j * alpha * f)], dtype=complex
    ) / math.sqrt(2.0)
    a = 0.5 * beta - 0.25 * math.pi
    bra = np.array(
        [
            cmath.exp(-0.5j * alpha * (1.0 - f)) * math.sin(a),
            cmath.exp(0.5j * alpha * (1.0 - f)) * math.cos(a),
        ],
        dtype=complex,
    )
    analyzer = hv_analyzer().matrix
    den = bra @ ket
    if abs(den) <= _DENOM_FLOOR:
        raise OrthogonalPostselectionError(
            f"post-selection probability vanishes at alpha={alpha}, beta={beta}"
        )
    w = (bra @ analyzer @ ket) / den
    return WeakValue(w.real, w.imag)


def weak_value_smallangle(alpha: float, beta: float) -> WeakValue:
    """Small-angle convention ``1/(beta - i*alpha)``.

    This is the form the shift formulas are normalized against; it differs
    from the first-order expansion of :func:`weak_value_exact` by a factor
    of -2 (module docstring). :func:`smallangle_im` returns its imaginary
    part directly.
    """
    denom = alpha * alpha + beta * beta
    if denom == 0.0:
        raise OrthogonalPostselectionError(
            "small-angle weak value undefined at alpha = beta = 0"
        )
    return WeakValue(beta / denom, alpha / denom)


def smallangle_im(alpha: float, beta: float) -> float:
    """``alpha / (alpha**2 + beta**2)``, the amplification factor."""
    return weak_value_smallangle(alpha, beta).im


@dataclass(frozen=True)
class CouplingParams:
    """Integrated coupling between polarization and longitudinal momentum.

    ``k`` is tied to the plate's phase parameter by ``k = alpha / P0`` with
    ``P0 = 2*pi/lambda0`` -- the convention matched to
    :func:`weak_value_smallangle` (see module docstring).
    """

    alpha: float
    beta: float
    k: float
    lambda0: float

    def __post_init__(self):
        if not self.lambda0 > 0:
            raise ValueError(f"lambda0 must be positive, got {self.lambda0}")
        expected = self.alpha * self.lambda0 / (2.0 * math.pi)
        if abs(self.k - expected) > 1e-9 * max(1.0, abs(expected)):
            raise ValueError(
                f"k={self.k} inconsistent with alpha={self.alpha} at "
                f"lambda0={self.lambda0} (expected {expected})"
            )

    @classmethod
    def from_angles(cls, alpha: float, beta: float, lambda0: float) -> "CouplingParams":
        return cls(alpha, beta, alpha * lambda0 / (2.0 * math.pi), lambda0)


def momentum_shift(cp: CouplingParams, delta_p: float) -> float:
    """Conditioned mean momentum shift ``2*k*delta_p**2*Im(A)`` (rad/nm).

    Always non-negative, bounded by ``2*delta_p**2/P0`` (the ``beta = 0``
    plateau, where the phase parameter cancels).
    """
    return 2.0 * cp.k * delta_p * delta_p * smallangle_im(cp.alpha, cp.beta)


def wavelength_shift_analytic(alpha: float, beta: float, source: SourceParams) -> float:
    """Magnitude of the spectral-centroid shift (nm) in the weak regime:

        2 * delta_lambda**2 * alpha**2 / (lambda0 * (alpha**2 + beta**2))

    The physical shift at the transmitted port is toward shorter
    wavelengths; this returns the magnitude.
    """
    denom = alpha * alpha + beta * beta
    if denom == 0.0:
        raise OrthogonalPostselectionError(
            "shift undefined at alpha = beta = 0 (no transmitted light)"
        )
    dl2 = source.delta_lambda * source.delta_lambda
    return 2.0 * dl2 * alpha * alpha / (source.lambda0 * denom)


def wavelength_shift_slope(alpha: float, beta: float, source: SourceParams) -> float:
    """d(shift)/d(alpha) of :func:`wavelength_shift_analytic`:

        2 * delta_lambda**2 * 2*alpha*beta**2 / (lambda0 * (alpha**2 + beta**2)**2)
    """
    denom = alpha * alpha + beta * beta
    if denom == 0.0:
        raise OrthogonalPostselectionError(
            "shift slope undefined at alpha = beta = 0"
        )
    dl2 = source.delta_lambda * source.delta_lambda
    return 4.0 * dl2 * alpha * beta * beta / (source.lambda0 * denom * denom)
