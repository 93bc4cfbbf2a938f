import math

import numpy as np
import pytest

from weaklight import (
    DegenerateSpectrumError,
    GridMismatchError,
    InvalidConfigError,
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
from weaklight.spectral import SPECTROMETER_GRID, integral, resample, translate

WINDOW = SPECTROMETER_GRID
WIDE = WavelengthGrid.from_range(808 - 5 * 38.8, 808 + 5 * 38.8, 0.02)


class TestWavelengthGrid:
    def test_points_exactly_reproducible(self):
        g = WavelengthGrid(715.0, 0.02, 10001)
        lam = g.wavelengths()
        assert lam[0] == 715.0
        assert lam[5050] == 715.0 + 5050 * 0.02
        assert g.stop == pytest.approx(915.0, abs=1e-9)
        assert np.all(np.diff(lam) > 0)

    def test_from_range(self):
        g = WavelengthGrid.from_range(715.0, 915.0, 0.02)
        assert g.count == 10001

    @pytest.mark.parametrize(
        "args", [(715.0, -0.1, 100), (715.0, 0.0, 100), (715.0, 0.02, 1), (-5.0, 0.02, 10)]
    )
    def test_invalid(self, args):
        with pytest.raises(ValueError):
            WavelengthGrid(*args)


class TestSpectrumType:
    def test_rejects_negative_density(self):
        g = WavelengthGrid(700.0, 1.0, 5)
        with pytest.raises(ValueError):
            Spectrum(g, [1.0, 2.0, -0.1, 2.0, 1.0])

    def test_rejects_wrong_length(self):
        g = WavelengthGrid(700.0, 1.0, 5)
        with pytest.raises(ValueError):
            Spectrum(g, [1.0, 2.0])

    def test_density_frozen(self):
        g = WavelengthGrid(700.0, 1.0, 5)
        s = Spectrum(g, np.ones(5))
        with pytest.raises(ValueError):
            s.density[0] = 2.0


class TestGaussianSpectrum:
    def test_windowed_led_centroid(self, led):
        # asymmetric truncation at 715-915 nm pulls the centroid up by ~0.54
        s = gaussian_spectrum(led, WINDOW)
        assert centroid(s) == pytest.approx(808.5359710260169, abs=1e-6)

    def test_wide_grid_centroid_is_center(self, led):
        s = gaussian_spectrum(led, WIDE)
        assert centroid(s) == pytest.approx(808.0, abs=1e-9)

    def test_normalized(self, led):
        s = gaussian_spectrum(led, WINDOW)
        assert integral(s) == pytest.approx(1.0, abs=1e-12)

    def test_windowed_rms_below_nominal(self, led):
        # truncated-Gaussian oracle (checked against scipy.stats.truncnorm)
        s = gaussian_spectrum(led, WINDOW)
        assert rms_width(s) == pytest.approx(37.22159585164563, abs=1e-6)
        assert rms_width(s) < 38.8

    def test_wide_grid_rms(self, led):
        s = gaussian_spectrum(led, WIDE)
        assert rms_width(s) == pytest.approx(38.8, rel=5e-3)
        assert rms_width(s) == pytest.approx(38.79971157503627, abs=1e-6)

    def test_filtered_rms_on_window(self, filtered_source):
        s = gaussian_spectrum(filtered_source, WINDOW)
        assert rms_width(s) == pytest.approx(18.9, abs=0.05)

    def test_warns_on_tight_grid(self, led):
        tight = WavelengthGrid.from_range(760.0, 860.0, 0.02)
        with pytest.warns(UserWarning):
            gaussian_spectrum(led, tight)

    def test_error_when_grid_outside(self, led):
        far = WavelengthGrid.from_range(1200.0, 1300.0, 0.02)
        with pytest.raises(InvalidConfigError):
            gaussian_spectrum(led, far)


class TestMoments:
    def test_centroid_symmetric(self, led):
        s = gaussian_spectrum(led, WIDE)
        assert centroid(s) == pytest.approx(808.0, abs=1e-9)

    def test_centroid_linear_density_skews_up(self):
        g = WavelengthGrid.from_range(700.0, 900.0, 0.1)
        s = Spectrum(g, g.wavelengths() - 600.0)
        assert centroid(s) > 800.0

    def test_delta_spike_zero_width(self):
        g = WavelengthGrid(700.0, 1.0, 11)
        dens = np.zeros(11)
        dens[4] = 3.0
        assert rms_width(Spectrum(g, dens)) == pytest.approx(0.0, abs=1e-9)

    def test_all_zero_density_raises(self):
        g = WavelengthGrid(700.0, 1.0, 11)
        s = Spectrum(g, np.zeros(11))
        with pytest.raises(DegenerateSpectrumError):
            centroid(s)
        with pytest.raises(DegenerateSpectrumError):
            rms_width(s)

    def test_scale_invariance(self, led, rng):
        s = gaussian_spectrum(led, WIDE)
        for c in (1e-6, 0.37, 2000.0):
            scaled = Spectrum(s.grid, s.density * c)
            assert centroid(scaled) == pytest.approx(centroid(s), rel=1e-12)
            assert rms_width(scaled) == pytest.approx(rms_width(s), rel=1e-12)

    def test_normalize_idempotent(self, led):
        s = normalize(gaussian_spectrum(led, WINDOW))
        again = normalize(s)
        assert np.allclose(again.density, s.density, rtol=1e-15, atol=0.0)


class TestShift:
    def test_identical_zero(self, led):
        s = gaussian_spectrum(led, WIDE)
        assert shift_between(s, s) == 0.0

    def test_translation(self, led):
        s = gaussian_spectrum(led, WIDE)
        moved = translate(s, 0.5)
        assert shift_between(s, moved) == pytest.approx(0.5, abs=WIDE.step)

    def test_translation_covariance(self, led):
        s = gaussian_spectrum(led, WIDE)
        for d in (-9.7, -1.0, 0.25, 3.3, 9.9):
            assert centroid(translate(s, d)) == pytest.approx(
                centroid(s) + d, abs=WIDE.step
            )

    def test_antisymmetry_exact(self, led):
        a = gaussian_spectrum(led, WIDE)
        b = translate(a, 1.2)
        assert shift_between(a, b) == -shift_between(b, a)

    def test_grid_mismatch(self, led):
        a = gaussian_spectrum(led, WIDE)
        b = gaussian_spectrum(led, WINDOW)
        with pytest.raises(GridMismatchError):
            shift_between(a, b)


class TestMomentumStats:
    def test_values(self, led):
        p0, dp = momentum_stats(led)
        assert p0 == pytest.approx(2 * math.pi / 808.0, rel=1e-15)
        assert p0 == pytest.approx(7.776219439578696e-3, rel=1e-12)
        assert dp == pytest.approx(3.734125176431354e-4, rel=1e-12)

    def test_width_vanishes_with_narrow_source(self):
        _, dp = momentum_stats(SourceParams(808.0, 1e-12))
        assert dp < 1e-16

    def test_source_params_invariants(self):
        with pytest.raises(ValueError):
            SourceParams(-808.0, 38.8)
        with pytest.raises(ValueError):
            SourceParams(808.0, 0.0)
        with pytest.raises(ValueError):
            SourceParams(808.0, 900.0)


class TestCsvRoundTrip:
    def test_save_load(self, tmp_path):
        s = gaussian_spectrum(
            SourceParams(800.0, 30.0), WavelengthGrid.from_range(700.0, 900.0, 0.5)
        )
        path = tmp_path / "spec.csv"
        save_spectrum_csv(s, path)
        loaded = load_spectrum_csv(path, s.grid)
        assert np.allclose(loaded.density, s.density, rtol=1e-8)
        assert centroid(loaded) == pytest.approx(centroid(s), abs=1e-6)

    def test_loader_resamples(self, tmp_path):
        source = SourceParams(800.0, 30.0)
        fine = gaussian_spectrum(source, WavelengthGrid.from_range(700.0, 900.0, 0.1))
        path = tmp_path / "spec.csv"
        save_spectrum_csv(fine, path)
        coarse = WavelengthGrid.from_range(700.0, 900.0, 1.0)
        loaded = load_spectrum_csv(path, coarse)
        assert loaded.grid == coarse
        assert centroid(loaded) == pytest.approx(centroid(fine), abs=0.05)

    def test_loader_rejects_non_monotone(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("wavelength_nm,intensity\n700,1\n699,1\n701,1\n")
        with pytest.raises(InvalidConfigError):
            load_spectrum_csv(path, WavelengthGrid(700.0, 1.0, 3))


def test_resample_zero_outside(led):
    s = gaussian_spectrum(led, WavelengthGrid.from_range(790.0, 830.0, 0.1))
    wide = resample(s, WavelengthGrid.from_range(600.0, 1000.0, 0.5))
    lam = wide.wavelengths()
    assert np.all(wide.density[lam < 789.0] == 0.0)
    assert np.all(wide.density[lam > 831.0] == 0.0)
