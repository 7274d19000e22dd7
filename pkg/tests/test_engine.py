import numpy as np
import pytest

from qoctsim import (
    Interface,
    Layer,
    LayerStack,
    NoFeatureError,
    EdgeFeatureError,
    NormalizationError,
    NoSignalError,
    ascan,
    coincidence_baseline,
    coincidence_rate,
    dip_fwhm,
    interference_profile,
    interference_profile_fft,
    interference_term,
    vacuum_like_layer,
)
from qoctsim.engine import interference_complex
from qoctsim.fwhm import dip_full_width

from conftest import SIGMA_7P5, random_stack

C = 299_792_458.0


def gaussian_transform(u, sigma):
    """Fourier transform of the normalized Gaussian density at lag u."""
    return np.exp(-0.5 * (sigma * u) ** 2)


def analytic_two_mirror(z_um, z1_um, r1, z2_um, r2, w0, sigma):
    """Closed-form interference term for two mirrors in vacuum (oracle)."""
    z = np.asarray(z_um, dtype=float) * 1e-6
    z1, z2 = z1_um * 1e-6, z2_um * 1e-6
    out = r1**2 * gaussian_transform(4.0 * (z1 - z) / C, sigma)
    out = out + r2**2 * gaussian_transform(4.0 * (z2 - z) / C, sigma)
    cross_phase = 2.0 * w0 * (z1 - z2) / C
    out = out + (
        2.0
        * r1
        * r2
        * np.cos(cross_phase)
        * gaussian_transform(2.0 * (z1 + z2) / C - 4.0 * z / C, sigma)
    )
    return out


class TestBaseline:
    def test_perfect_mirror(self, spectrum, mirror):
        assert coincidence_baseline(spectrum, mirror) == pytest.approx(1.0, abs=1e-12)

    def test_half_mirror(self, spectrum):
        stack = LayerStack.single_mirror(0.0, 0.5)
        assert coincidence_baseline(spectrum, stack) == pytest.approx(0.25, abs=1e-12)

    def test_two_mirror_12um_gap(self, spectrum):
        """Gap comparable to the coherence scale: the beat term survives."""
        stack = LayerStack([Interface(0.0, 0.4), Interface(12.0, 0.4)])
        value = coincidence_baseline(spectrum, stack)
        assert value == pytest.approx(0.2691372157229367, rel=1e-9)
        # independent closed form: 0.32 + 0.32 cos(2 w0 d / c) * gaussian lag
        d = 12e-6
        analytic = 0.32 + 0.32 * np.cos(2 * spectrum.center_frequency * d / C) * (
            gaussian_transform(2 * d / C, spectrum.sigma)
        )
        assert value == pytest.approx(analytic, rel=1e-6)

    def test_dark_sample_baseline_is_zero(self, spectrum):
        dark = LayerStack([Interface(0.0, 0.0)])
        assert coincidence_baseline(spectrum, dark) == 0.0


class TestInterferenceTerm:
    def test_matched_delay_full_dip(self, spectrum):
        stack = LayerStack.single_mirror(5.0, 1.0)
        assert interference_term(spectrum, stack, 5.0) == pytest.approx(1.0, rel=1e-12)

    def test_far_delay_vanishes(self, spectrum):
        # decays from O(1) to the quadrature truncation floor (~1e-9)
        stack = LayerStack.single_mirror(5.0, 1.0)
        assert abs(interference_term(spectrum, stack, 150.0)) < 1e-6

    def test_two_mirror_matches_analytic_oracle(self, spectrum):
        z1, r1, z2, r2 = 0.0, 0.4, 18.0, 0.3
        stack = LayerStack([Interface(z1, r1), Interface(z2, r2)])
        z = np.linspace(-10.0, 30.0, 401)
        engine_vals = interference_profile(spectrum, stack, z)
        oracle_vals = analytic_two_mirror(
            z, z1, r1, z2, r2, spectrum.center_frequency, spectrum.sigma
        )
        assert np.max(np.abs(engine_vals - oracle_vals)) < 1e-6

    def test_midpoint_cross_feature_bounded(self, spectrum):
        r1 = r2 = 0.4
        stack = LayerStack([Interface(0.0, r1), Interface(40.0, r2)])
        baseline = coincidence_baseline(spectrum, stack)
        z = np.linspace(15.0, 25.0, 201)
        values = baseline - interference_profile(spectrum, stack, z)
        assert np.max(np.abs(values - baseline)) <= 2.0 * r1 * r2 + 1e-9

    def test_dispersion_cancellation(self, spectrum):
        """Dip width is insensitive to accumulated quadratic spectral phase."""
        beta2 = 36e-30 / 1e-3  # 36 fs^2/mm
        plain = LayerStack.single_mirror(0.0, 1.0)
        dispersive = LayerStack.single_mirror(
            0.0, 1.0,
            layers_above=vacuum_like_layer(10_000.0, spectrum.center_frequency, beta2),
        )
        c_plain = ascan(spectrum, plain, -15.0, 0.1, 301)
        c_disp = ascan(spectrum, dispersive, -15.0, 0.1, 301)
        w_plain = dip_fwhm(c_plain)
        w_disp = dip_fwhm(c_disp)
        assert abs(w_disp - w_plain) / w_plain < 0.005


class TestCoincidenceRate:
    def test_matched_perfect_mirror_extinguishes(self, spectrum):
        stack = LayerStack.single_mirror(0.0, 1.0)
        assert coincidence_rate(spectrum, stack, 0.0) == pytest.approx(0.0, abs=1e-9)

    def test_far_delay_gives_baseline(self, spectrum):
        stack = LayerStack.single_mirror(0.0, 1.0)
        baseline = coincidence_baseline(spectrum, stack)
        assert coincidence_rate(spectrum, stack, 120.0) == pytest.approx(baseline, rel=1e-6)

    def test_dark_sample_raises(self, spectrum):
        dark = LayerStack([Interface(0.0, 0.0)])
        with pytest.raises(NoSignalError):
            coincidence_rate(spectrum, dark, 0.0)


class TestAscan:
    def test_default_grid_shape_and_normalization(self, spectrum, mirror):
        curve = ascan(spectrum, mirror, -15.0, 1.0, 31)
        assert curve.z_um.size == 31
        assert curve.z_um[0] == -15.0 and curve.z_um[-1] == 15.0
        assert curve.values[0] == 1.0
        assert np.argmin(curve.values) == 15  # dip at z = 0
        assert np.all(curve.values >= 0.0)
        assert np.all(curve.values <= 2.0 * curve.baseline / (0.99 * curve.baseline))

    def test_needs_two_points(self, spectrum, mirror):
        with pytest.raises(ValueError):
            ascan(spectrum, mirror, -15.0, 1.0, 1)

    def test_first_point_on_feature_rejected(self, spectrum):
        stack = LayerStack.single_mirror(-15.0, 1.0)
        with pytest.raises(NormalizationError):
            ascan(spectrum, stack, -15.0, 1.0, 31)

    def test_dark_sample_rejected(self, spectrum):
        dark = LayerStack([Interface(0.0, 0.0)])
        with pytest.raises(NormalizationError):
            ascan(spectrum, dark, -15.0, 1.0, 31)

    def test_washout_leaves_single_mirror_unchanged(self, spectrum, mirror):
        plain = ascan(spectrum, mirror, -15.0, 1.0, 31)
        washed = ascan(spectrum, mirror, -15.0, 1.0, 31, washout_trials=64, rng_seed=11)
        assert np.max(np.abs(plain.values - washed.values)) < 1e-12
        assert washed.baseline == plain.baseline  # untouched by jitter draws

    def test_washout_suppresses_cross_feature_only(self, spectrum):
        stack = LayerStack([Interface(0.0, 0.4), Interface(40.0, 0.4)])
        plain = ascan(spectrum, stack, -15.0, 1.0, 71)
        washed = ascan(spectrum, stack, -15.0, 1.0, 71, washout_trials=256, rng_seed=2)
        mid, dip1, dip2 = 35, 15, 55
        feature_plain = abs(plain.values[mid] - 1.0)
        feature_washed = abs(washed.values[mid] - 1.0)
        assert feature_plain > 0.9  # nearly full-contrast cross feature
        assert feature_plain / feature_washed >= 10.0
        for idx in (dip1, dip2):
            change = abs(washed.values[idx] - plain.values[idx]) / abs(plain.values[idx])
            assert change < 0.01

    def test_washout_deterministic_per_seed(self, spectrum):
        stack = LayerStack([Interface(0.0, 0.4), Interface(40.0, 0.4)])
        a = ascan(spectrum, stack, -15.0, 1.0, 71, washout_trials=32, rng_seed=5)
        b = ascan(spectrum, stack, -15.0, 1.0, 71, washout_trials=32, rng_seed=5)
        assert np.array_equal(a.values, b.values)


class TestDipWidth:
    def test_closed_form_gaussian_dip(self):
        sigma = SIGMA_7P5
        z_um = np.arange(-15.0, 15.0001, 0.05)
        values = 1.0 - np.exp(-8.0 * sigma**2 * (z_um * 1e-6) ** 2 / C**2)
        expected = (C * np.sqrt(np.log(2.0) / 2.0) / sigma) / 1e-6
        assert dip_full_width(z_um, values) == pytest.approx(expected, rel=2e-3)

    def test_measured_dip_width(self, spectrum, mirror):
        curve = ascan(spectrum, mirror, -15.0, 0.1, 301)
        assert dip_fwhm(curve) == pytest.approx(7.5, rel=0.01)

    def test_flat_curve_has_no_feature(self):
        z = np.arange(31.0)
        with pytest.raises(NoFeatureError):
            dip_full_width(z, np.ones(31))

    def test_edge_touching_dip_rejected(self, spectrum):
        stack = LayerStack.single_mirror(14.0, 1.0)
        curve = ascan(spectrum, stack, -15.0, 1.0, 30)  # grid ends at z = 14
        with pytest.raises(EdgeFeatureError):
            dip_fwhm(curve)


class TestFftOracle:
    @pytest.mark.parametrize("seed", [3, 17])
    def test_fft_matches_quadrature(self, spectrum, seed):
        stack = random_stack(np.random.default_rng(seed))
        baseline = coincidence_baseline(spectrum, stack)
        z_fft, vals_fft = interference_profile_fft(spectrum, stack)
        window = np.abs(z_fft) < 50.0
        z_sel = z_fft[window][:: max(1, window.sum() // 300)]
        idx = np.searchsorted(z_fft, z_sel)
        quad = interference_profile(spectrum, stack, z_fft[idx])
        assert np.max(np.abs(vals_fft[idx] - quad)) <= 1e-6 * baseline


class TestInvariants:
    @pytest.mark.parametrize("seed", [0, 1, 4])
    def test_reality_and_bounds(self, spectrum, seed):
        stack = random_stack(np.random.default_rng(seed))
        baseline = coincidence_baseline(spectrum, stack)
        z = np.linspace(-20.0, 60.0, 321)
        lam = interference_complex(spectrum, stack, z)
        assert np.max(np.abs(lam.imag)) < 1e-10 * baseline
        assert np.max(np.abs(lam.real)) <= baseline * (1.0 + 1e-9)
        rates = baseline - lam.real
        assert np.all(rates >= -1e-9 * baseline)
        assert np.all(rates <= 2.0 * baseline * (1.0 + 1e-9))
