import math

import numpy as np
import pytest

from weaklight import (
    DispersiveSlab,
    HwpPair,
    InvalidConfigError,
    PlateParams,
    PolarizationState,
    PostSelectionParams,
    Retarder,
    alpha_from_tilt,
    alpha_from_tilt_approx,
    post_state,
    pre_state,
)
from weaklight.polarization import (
    constant_index,
    hv_analyzer,
    is_unitary,
    load_index_table_csv,
    matrices_equal_up_to_phase,
    states_equal_up_to_phase,
    znse_index,
)

GRID = np.linspace(615.0, 1000.0, 41)


class TestStates:
    def test_pre_state_balanced(self):
        s = pre_state()
        assert s.h == pytest.approx(1 / math.sqrt(2), abs=1e-15)
        assert s.v == pytest.approx(1 / math.sqrt(2), abs=1e-15)
        assert abs(s.h) ** 2 + abs(s.v) ** 2 == pytest.approx(1.0, abs=1e-12)

    def test_pre_state_analyzer_average_zero(self):
        s = pre_state()
        assert hv_analyzer().sandwich(s, s) == pytest.approx(0.0, abs=1e-15)

    def test_post_state_zero_orthogonal(self):
        phi = post_state(0.0)
        assert phi.h == pytest.approx(-1 / math.sqrt(2), abs=1e-15)
        assert phi.v == pytest.approx(1 / math.sqrt(2), abs=1e-15)
        assert phi.overlap(pre_state()) == pytest.approx(0.0, abs=1e-15)

    def test_overlap_identity(self):
        # |<post(beta)|pre>| = |sin(beta/2)| exactly
        for beta in np.linspace(-math.pi / 2, math.pi / 2, 31):
            got = abs(post_state(beta).overlap(pre_state()))
            assert got == pytest.approx(abs(math.sin(beta / 2)), abs=1e-12)

    def test_small_beta_survival(self):
        p = abs(post_state(0.004).overlap(pre_state())) ** 2
        assert p == pytest.approx(3.999994666669511e-06, rel=1e-10)

    def test_full_rotation_matches_pre_state(self):
        # at beta = pi the construction formula lands back on the input state;
        # built directly because post_state's domain stops at pi/2
        a = math.pi / 2 - math.pi / 4
        s = PolarizationState(math.sin(a), math.cos(a))
        assert states_equal_up_to_phase(s, pre_state(), tol=1e-12)

    def test_post_state_domain(self):
        with pytest.raises(ValueError):
            post_state(math.pi)

    def test_zero_state_rejected(self):
        with pytest.raises(ValueError):
            PolarizationState(0.0, 0.0)

    def test_normalization_at_construction(self):
        s = PolarizationState(3.0, 4.0j)
        assert abs(s.h) ** 2 + abs(s.v) ** 2 == pytest.approx(1.0, abs=1e-12)


class TestRetarder:
    def test_zero_phase_is_identity(self):
        r = Retarder(0.0, 808.0)
        for lam in GRID:
            assert np.allclose(r.jones(lam), np.eye(2), atol=1e-15)

    def test_half_wave_at_design_wavelength(self):
        r = Retarder(math.pi, 808.0)
        m = r.jones(808.0)
        # relative H-V phase is pi
        assert np.angle(m[1, 1] / m[0, 0]) == pytest.approx(math.pi, abs=1e-12)

    def test_chromatic_scaling(self):
        r = Retarder(0.013, 808.0)
        assert r.phase(2 * 808.0) == pytest.approx(0.0065, rel=1e-12)

    def test_invalid_wavelength(self):
        with pytest.raises(ValueError):
            Retarder(0.1, 808.0).jones(-5.0)

    def test_unitary_on_grid(self):
        r = Retarder(0.4, 808.0)
        for lam in GRID:
            assert is_unitary(r.jones(lam), tol=1e-12)

    def test_inverse_pair(self):
        plus = Retarder(0.37, 808.0)
        minus = Retarder(-0.37, 808.0)
        for lam in GRID:
            assert np.allclose(plus.jones(lam) @ minus.jones(lam), np.eye(2), atol=1e-12)

    def test_birefringence_table_hook(self):
        # 10% larger birefringence at shorter wavelengths scales the phase
        dn = lambda lam: 1.0 + 0.1 * (808.0 - lam) / 808.0
        r = Retarder(0.01, 808.0, delta_n=dn)
        assert r.phase(808.0) == pytest.approx(0.01, rel=1e-12)
        assert r.phase(700.0) > 0.01 * 808.0 / 700.0


class TestTiltGeometry:
    def test_zero_tilt(self):
        assert alpha_from_tilt(0.0, 1.54) == 0.0

    def test_reference_values(self):
        # high-precision evaluations of the path-lengthening expression
        assert alpha_from_tilt(0.14, 1.54) == pytest.approx(0.0129771625269, abs=1e-9)
        assert alpha_from_tilt(0.05, 1.54) == pytest.approx(0.00165576896113, abs=1e-9)

    def test_quadratic_approximation(self):
        assert alpha_from_tilt_approx(0.14, 1.54) == pytest.approx(0.0129817878248, abs=1e-9)
        for theta in np.linspace(0.01, 0.2, 20):
            exact = alpha_from_tilt(theta, 1.54)
            approx = alpha_from_tilt_approx(theta, 1.54)
            assert abs(approx - exact) / exact < 0.01

    def test_even_in_theta(self):
        for theta in (0.03, 0.1, 0.2):
            assert alpha_from_tilt(theta, 1.54) == alpha_from_tilt(-theta, 1.54)

    def test_strictly_increasing_in_magnitude(self):
        thetas = np.linspace(0.0, 0.3, 40)
        values = [alpha_from_tilt(t, 1.54) for t in thetas]
        assert np.all(np.diff(values) > 0)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            alpha_from_tilt(math.pi / 2, 0.9)


class TestHwpPair:
    def test_zero_tilt_is_identity(self):
        pair = HwpPair(PlateParams(0.0, 1.54, 808.0), composed=True)
        for lam in GRID:
            assert matrices_equal_up_to_phase(pair.jones(lam), np.eye(2), tol=1e-12)

    def test_composed_equals_equivalent_retarder(self):
        plate = PlateParams(0.14, 1.54, 808.0)
        composed = HwpPair(plate, composed=True)
        single = Retarder(alpha_from_tilt(0.14, 1.54), 808.0)
        for lam in GRID:
            assert np.allclose(composed.jones(lam), single.jones(lam), atol=1e-12)

    def test_default_uses_equivalent_form(self):
        plate = PlateParams(0.1, 1.54, 808.0)
        pair = HwpPair(plate)
        assert np.allclose(pair.jones(750.0), pair.equivalent_retarder().jones(750.0))

    def test_h_eigenstate(self):
        pair = HwpPair(PlateParams(0.14, 1.54, 808.0), composed=True)
        out = pair.at(808.0).apply(PolarizationState(1.0, 0.0))
        assert abs(out[0]) == pytest.approx(1.0, abs=1e-12)
        assert abs(out[1]) == pytest.approx(0.0, abs=1e-12)

    def test_unitary_on_grid(self):
        pair = HwpPair(PlateParams(0.14, 1.54, 808.0), composed=True)
        for lam in GRID:
            assert is_unitary(pair.jones(lam), tol=1e-12)


class TestDispersiveSlab:
    def test_zero_thickness_identity(self):
        slab = DispersiveSlab(0.0, constant_index(2.48))
        assert np.allclose(slab.jones(808.0), np.eye(2), atol=1e-12)

    def test_unit_determinant(self):
        slab = DispersiveSlab(1.0, constant_index(2.48))
        for lam in GRID:
            assert abs(np.linalg.det(slab.jones(lam))) == pytest.approx(1.0, abs=1e-12)

    def test_unitary(self):
        slab = DispersiveSlab(1.0, znse_index())
        for lam in GRID:
            assert is_unitary(slab.jones(lam), tol=1e-12)

    def test_znse_pole_fit_reasonable(self):
        n = znse_index()(808.0)
        assert 2.3 < n < 2.6

    def test_index_table(self, tmp_path):
        path = tmp_path / "index.csv"
        path.write_text(
            "wavelength_nm,index\n700,2.50\n800,2.48\n900,2.46\n"
        )
        model = load_index_table_csv(path)
        assert model(800.0) == pytest.approx(2.48)
        assert model(750.0) == pytest.approx(2.49)
        with pytest.raises(InvalidConfigError):
            model(650.0)


class TestParamTypes:
    def test_plate_params_validation(self):
        with pytest.raises(ValueError):
            PlateParams(2.0, 1.54, 808.0)
        with pytest.raises(ValueError):
            PlateParams(0.1, 0.9, 808.0)
        with pytest.raises(ValueError):
            PlateParams(0.1, 1.54, -808.0)

    def test_plate_alpha_property(self):
        plate = PlateParams(0.14, 1.54, 808.0)
        assert plate.alpha == alpha_from_tilt(0.14, 1.54)

    def test_postselection_params_validation(self):
        with pytest.raises(ValueError):
            PostSelectionParams(2.0)
        with pytest.raises(ValueError):
            PostSelectionParams(0.004, -0.1)


class TestPhaseQuotientHelpers:
    def test_states_equal_up_to_phase(self):
        a = PolarizationState(1.0, 1.0)
        b = PolarizationState(np.exp(0.7j), np.exp(0.7j))
        assert states_equal_up_to_phase(a, b)
        assert not states_equal_up_to_phase(a, PolarizationState(1.0, -1.0))

    def test_matrices_equal_up_to_phase(self):
        m = Retarder(0.3, 808.0).jones(900.0)
        assert matrices_equal_up_to_phase(m, np.exp(1.3j) * m)
        assert not matrices_equal_up_to_phase(m, np.eye(2))
