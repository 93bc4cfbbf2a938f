"""Pure-numpy implementation of the hot kernels.

The optical chain per wavelength bin is: balanced pre-selection state,
diagonal retarder with relative H-V phase ``phi = alpha * lambda0 / lam``,
an optional polarization-independent common phase ``chi`` (dispersive slab),
and projection on the post-selection state at angle parameter ``beta``.
The transmitted amplitude is

    amp = (sin(b) * exp(i*(chi - phi/2)) + cos(b) * exp(i*(chi + phi/2))) / sqrt(2)

with ``b = beta/2 - pi/4``. All kernels are that amplitude squared, weighted
by the source density, plus trapezoidal moment accumulation. The compiled
backend in ``_core.pyx`` mirrors these formulas term by term.
"""

import numpy as np

_SQRT_HALF = np.sqrt(0.5)


def _phase_tables(wavelengths, alpha, lambda0, chi):
    """cos/sin of the two diagonal Jones phases, per wavelength."""
    half = 0.5 * alpha * lambda0 / wavelengths
    if chi is None:
        ch = np.cos(half)
        sh = np.sin(half)
        return ch, -sh, ch, sh
    return np.cos(chi - half), np.sin(chi - half), np.cos(chi + half), np.sin(chi + half)


def postselected_density(wavelengths, density, alpha, beta, lambda0, chi=None):
    """Source density times the post-selection probability, bin by bin."""
    c1, s1, c2, s2 = _phase_tables(wavelengths, alpha, lambda0, chi)
    b = 0.5 * beta - 0.25 * np.pi
    sb = np.sin(b)
    cb = np.cos(b)
    re = (sb * c1 + cb * c2) * _SQRT_HALF
    im = (sb * s1 + cb * s2) * _SQRT_HALF
    return density * (re * re + im * im)


def trapezoid_moments(x, y):
    """Trapezoidal integral, mean and variance of a sampled density.

    Accumulation is pivoted at the midpoint of ``x`` so the variance does
    not lose precision to catastrophic cancellation.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    pivot = 0.5 * (x[0] + x[-1])
    t = x - pivot
    dx = np.diff(x)
    f0, f1 = y[:-1], y[1:]
    t0, t1 = t[:-1], t[1:]
    m0 = 0.5 * np.sum(dx * (f0 + f1))
    if m0 == 0.0:
        return 0.0, pivot, 0.0
    m1 = 0.5 * np.sum(dx * (t0 * f0 + t1 * f1)) / m0
    m2 = 0.5 * np.sum(dx * (t0 * t0 * f0 + t1 * t1 * f1)) / m0
    return float(m0), float(pivot + m1), float(m2 - m1 * m1)


def spread_ensemble(wavelengths, density, alpha, lambda0, betas, chi=None):
    """Per-beta survival probability and output centroid for a batch of
    post-selection angles sharing one retarder setting."""
    c1, s1, c2, s2 = _phase_tables(wavelengths, alpha, lambda0, chi)
    b = 0.5 * np.asarray(betas, dtype=float)[:, None] - 0.25 * np.pi
    sb = np.sin(b)
    cb = np.cos(b)
    re = (sb * c1 + cb * c2) * _SQRT_HALF
    im = (sb * s1 + cb * s2) * _SQRT_HALF
    f = density * (re * re + im * im)

    pivot = 0.5 * (wavelengths[0] + wavelengths[-1])
    t = wavelengths - pivot
    dx = np.diff(wavelengths)
    probs = 0.5 * np.sum(dx * (f[:, :-1] + f[:, 1:]), axis=1)
    tf = t * f
    m1 = 0.5 * np.sum(dx * (tf[:, :-1] + tf[:, 1:]), axis=1)
    centroids = np.where(probs > 0.0, pivot + m1 / np.where(probs > 0.0, probs, 1.0), pivot)
    return probs, centroids


def spread_mixture(wavelengths, density, alpha, lambda0, betas, coeffs, chi=None):
    """Coefficient-weighted sum of per-beta post-selected densities."""
    c1, s1, c2, s2 = _phase_tables(wavelengths, alpha, lambda0, chi)
    b = 0.5 * np.asarray(betas, dtype=float)[:, None] - 0.25 * np.pi
    sb = np.sin(b)
    cb = np.cos(b)
    re = (sb * c1 + cb * c2) * _SQRT_HALF
    im = (sb * s1 + cb * s2) * _SQRT_HALF
    p = re * re + im * im
    return density * (np.asarray(coeffs, dtype=float) @ p)
