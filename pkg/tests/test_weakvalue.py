import math

import numpy as np
import pytest

from weaklight import (
    CouplingParams,
    OrthogonalPostselectionError,
    SourceParams,
    momentum_shift,
    momentum_stats,
    wavelength_shift_analytic,
    weak_value_exact,
    weak_value_smallangle,
)
from weaklight.weakvalue import (
    smallangle_im,
    wavelength_shift_slope,
    weak_value_from_two_state,
)

LED = SourceParams(808.0, 38.8)


class TestExactWeakValue:
    def test_no_pole_at_beta_half_pi(self):
        w = weak_value_exact(0.0, math.pi / 2)
        assert w.re == pytest.approx(-1.0, abs=1e-12)
        assert w.im == pytest.approx(0.0, abs=1e-12)

    def test_pure_real_amplification(self):
        # mpmath reference at alpha=0, beta=0.02
        w = weak_value_exact(0.0, 0.02)
        assert w.re == pytest.approx(-99.996666644444231, rel=1e-12)
        assert w.im == pytest.approx(0.0, abs=1e-12)
        assert w.re == pytest.approx(-100.0, abs=0.01)

    def test_balanced_point(self):
        # mpmath reference at alpha=beta=0.01; first order is -100+100j
        w = weak_value_exact(0.01, 0.01)
        assert w.re == pytest.approx(-100.00166668611131, rel=1e-12)
        assert w.im == pytest.approx(99.996666644444231, rel=1e-12)

    def test_orthogonal_point_raises(self):
        with pytest.raises(OrthogonalPostselectionError):
            weak_value_exact(0.0, 0.0)

    def test_x_independence(self):
        # the conditioned average from the two-state pair must not depend on
        # the depth inside the plate
        for alpha, beta in [(0.013, 0.004), (0.004, 0.0), (0.2, 0.1), (0.0, 0.03)]:
            ref = weak_value_exact(alpha, beta)
            scale = max(1.0, abs(ref.as_complex))
            for frac in (0.0, 1.0 / 3.0, 0.5, 1.0):
                w = weak_value_from_two_state(alpha, beta, frac)
                assert abs(w.as_complex - ref.as_complex) <= 1e-12 * scale

    def test_factor_two_against_smallangle_form(self):
        # Im(exact) * (a^2+b^2) / a -> 2 along a = b, i.e. twice the
        # small-angle convention's imaginary part; the residual shrinks
        # quadratically until float cancellation takes over
        errors = []
        for eps in (1e-3, 1e-4, 1e-5):
            w = weak_value_exact(eps, eps)
            errors.append(abs(w.im * (2 * eps * eps) / eps - 2.0))
        assert errors[0] < 1e-5
        assert errors[1] < errors[0]
        assert errors[2] < 1e-9


class TestSmallAngleForm:
    def test_real_axis(self):
        w = weak_value_smallangle(0.0, 0.01)
        assert w.re == pytest.approx(100.0, rel=1e-12)
        assert w.im == 0.0

    def test_balanced(self):
        assert smallangle_im(0.004, 0.004) == pytest.approx(125.0, rel=1e-12)

    def test_equal_angles_identity(self):
        for a in (1e-4, 0.004, 0.05):
            assert smallangle_im(a, a) == pytest.approx(1.0 / (2 * a), rel=1e-12)

    def test_orthogonal_point_raises(self):
        with pytest.raises(OrthogonalPostselectionError):
            weak_value_smallangle(0.0, 0.0)


class TestCouplingParams:
    def test_from_angles(self):
        cp = CouplingParams.from_angles(0.004, 0.004, 808.0)
        assert cp.k == pytest.approx(0.004 * 808.0 / (2 * math.pi), rel=1e-15)

    def test_inconsistent_k_rejected(self):
        with pytest.raises(ValueError):
            CouplingParams(0.004, 0.004, 1.0, 808.0)


class TestMomentumShift:
    def test_zero_phase(self):
        cp = CouplingParams.from_angles(0.0, 0.004, 808.0)
        _, dp = momentum_stats(LED)
        assert momentum_shift(cp, dp) == 0.0

    def test_orthogonal_plateau_phase_independent(self):
        # at beta=0 the phase parameter cancels: 2*dP^2/P0
        p0, dp = momentum_stats(LED)
        values = [
            momentum_shift(CouplingParams.from_angles(a, 0.0, 808.0), dp)
            for a in (0.001, 0.004, 0.013)
        ]
        assert values[0] == pytest.approx(values[1], rel=1e-12)
        assert values[1] == pytest.approx(values[2], rel=1e-12)
        assert values[0] == pytest.approx(2 * dp * dp / p0, rel=1e-12)

    def test_balanced_value(self):
        p0, dp = momentum_stats(LED)
        cp = CouplingParams.from_angles(0.004, 0.004, 808.0)
        assert momentum_shift(cp, dp) == pytest.approx(dp * dp / p0, rel=1e-12)
        assert momentum_shift(cp, dp) == pytest.approx(1.793119515415056e-05, rel=1e-9)

    def test_bounded(self):
        p0, dp = momentum_stats(LED)
        bound = 2 * dp * dp / p0
        for a in (0.001, 0.01, 0.1):
            for b in (0.0, 0.005, 0.05):
                cp = CouplingParams.from_angles(a, b, 808.0)
                assert 0.0 <= momentum_shift(cp, dp) <= bound * (1 + 1e-12)


class TestWavelengthShift:
    def test_zero_at_zero_phase(self):
        assert wavelength_shift_analytic(0.0, 0.004, LED) == 0.0

    def test_balanced_led(self):
        assert wavelength_shift_analytic(0.004, 0.004, LED) == pytest.approx(
            38.8**2 / 808.0, rel=1e-12
        )
        assert wavelength_shift_analytic(0.004, 0.004, LED) == pytest.approx(
            1.8631683168316828, rel=1e-12
        )

    def test_off_balance_value(self):
        assert wavelength_shift_analytic(0.013, 0.014, LED) == pytest.approx(
            1.7253449070934488, rel=1e-12
        )

    def test_orthogonal_raises(self):
        with pytest.raises(OrthogonalPostselectionError):
            wavelength_shift_analytic(0.0, 0.0, LED)

    def test_even_in_both_angles(self):
        for a, b in [(0.003, 0.007), (0.01, 0.002)]:
            ref = wavelength_shift_analytic(a, b, LED)
            assert wavelength_shift_analytic(-a, b, LED) == ref
            assert wavelength_shift_analytic(a, -b, LED) == ref
            assert wavelength_shift_analytic(-a, -b, LED) == ref

    def test_monotone_decreasing_in_beta(self):
        betas = np.linspace(0.0, 0.05, 30)
        shifts = [wavelength_shift_analytic(0.004, b, LED) for b in betas]
        assert np.all(np.diff(shifts) < 0)

    def test_monotone_increasing_in_alpha(self):
        alphas = np.linspace(1e-4, 0.05, 30)
        shifts = [wavelength_shift_analytic(a, 0.004, LED) for a in alphas]
        assert np.all(np.diff(shifts) > 0)

    def test_bound_with_equality_iff_orthogonal(self):
        bound = 2 * 38.8**2 / 808.0
        assert wavelength_shift_analytic(0.007, 0.0, LED) == pytest.approx(bound, rel=1e-12)
        for b in (1e-4, 0.004, 0.05):
            assert wavelength_shift_analytic(0.007, b, LED) < bound

    def test_chain_consistency_with_momentum_form(self):
        # delta_lambda = lambda0^2 * delta_P / (2 pi) reproduces the
        # wavelength-domain formula identically
        _, dp = momentum_stats(LED)
        for a, b in [(0.004, 0.004), (0.001, 0.01), (0.013, 0.0)]:
            cp = CouplingParams.from_angles(a, b, 808.0)
            via_p = 808.0**2 * momentum_shift(cp, dp) / (2 * math.pi)
            if a == 0.0 and b == 0.0:
                continue
            assert via_p == pytest.approx(
                wavelength_shift_analytic(a, b, LED), rel=1e-12
            )

    def test_slope(self):
        a, b = 0.004, 0.004
        h = 1e-9
        numeric = (
            wavelength_shift_analytic(a + h, b, LED)
            - wavelength_shift_analytic(a - h, b, LED)
        ) / (2 * h)
        assert wavelength_shift_slope(a, b, LED) == pytest.approx(numeric, rel=1e-6)
        # at beta = alpha the slope reduces to dl^2/(lambda0*alpha)
        assert wavelength_shift_slope(a, b, LED) == pytest.approx(
            38.8**2 / (808.0 * a), rel=1e-12
        )
