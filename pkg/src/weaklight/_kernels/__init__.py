"""Hot numerical kernels with an optional compiled fast path.

The Cython extension ``_core`` is built when a compiler is present; when it
is missing, the pure-numpy implementation takes over transparently. Both
backends expose the same four functions with identical semantics:

    postselected_density(wavelengths, density, alpha, beta, lambda0, chi=None)
    trapezoid_moments(x, y) -> (integral, mean, variance)
    spread_ensemble(wavelengths, density, alpha, lambda0, betas, chi=None)
    spread_mixture(wavelengths, density, alpha, lambda0, betas, coeffs, chi=None)

``benchmarks/bench_kernels.py`` compares their throughput; the conformance
tests hold them to floating-point-level agreement.
"""

from . import _numpy as numpy_impl

try:
    from . import _core as cython_impl
except ImportError:  # extension not built
    cython_impl = None

active = cython_impl if cython_impl is not None else numpy_impl
BACKEND = "cython" if cython_impl is not None else "numpy"

postselected_density = active.postselected_density
trapezoid_moments = active.trapezoid_moments
spread_ensemble = active.spread_ensemble
spread_mixture = active.spread_mixture


def available_backends():
    """Name -> module map of the kernel backends importable right now."""
    backends = {"numpy": numpy_impl}
    if cython_impl is not None:
        backends["cython"] = cython_impl
    return backends
