import numpy as np
import pytest
from scipy.signal import welch as scipy_welch

from filtspec import (
    AMPLITUDE_DENSITY,
    POWER_DENSITY,
    GridError,
    InvalidInputError,
    InvalidKindError,
    PowerSpectrum,
    SegmentationError,
    Signal,
    dft_magnitudes,
    hann_window,
    resample_linear,
    spectral_density,
    welch_psd,
)

from oracles import direct_dft_magnitudes

RATE = 100.0


class TestDftMagnitudes:
    def test_eegnet_grid(self):
        # 50 taps at 100 Hz: detectable range 0..48 Hz in 2 Hz steps, 25 bins
        freqs, mags = dft_magnitudes(np.ones(50), RATE)
        assert freqs.size == mags.size == 25
        assert np.array_equal(freqs, np.arange(25) * 2.0)

    def test_constant_signal_is_dc_only(self):
        freqs, mags = dft_magnitudes([1.0, 1.0, 1.0, 1.0], RATE)
        assert np.array_equal(freqs, [0.0, 25.0])
        assert mags[0] == pytest.approx(4.0, abs=1e-12)
        assert mags[1] == pytest.approx(0.0, abs=1e-12)

    def test_on_grid_cosine_peaks_at_20hz(self):
        taps = np.cos(2 * np.pi * 3 * np.arange(15) / 15)
        freqs, mags = dft_magnitudes(taps, RATE)
        assert freqs[np.argmax(mags)] == pytest.approx(20.0)
        expected = direct_dft_magnitudes(list(taps))
        # atol floor for the analytically-zero side bins
        np.testing.assert_allclose(mags, expected, rtol=1e-10, atol=1e-12)

    def test_matches_direct_summation_oracle(self):
        rng = np.random.default_rng(42)
        for _ in range(50):
            length = int(rng.integers(2, 65))
            taps = rng.normal(size=length)
            _, mags = dft_magnitudes(taps, RATE)
            expected = direct_dft_magnitudes(list(taps))
            assert mags.size == (length + 1) // 2
            np.testing.assert_allclose(mags, expected, rtol=1e-10, atol=1e-12)

    def test_bin_count_and_spacing(self):
        for length in (2, 3, 15, 16, 50, 63, 64):
            freqs, mags = dft_magnitudes(np.ones(length), RATE)
            assert mags.size == (length + 1) // 2
            if freqs.size > 1:
                np.testing.assert_allclose(np.diff(freqs), RATE / length, rtol=1e-12)

    def test_deterministic(self):
        taps = np.random.default_rng(1).normal(size=31)
        a = dft_magnitudes(taps, RATE)[1]
        b = dft_magnitudes(taps, RATE)[1]
        assert np.array_equal(a, b)

    def test_rejects_short_filter(self):
        with pytest.raises(InvalidInputError):
            dft_magnitudes([1.0], RATE)

    def test_rejects_non_finite(self):
        with pytest.raises(InvalidInputError):
            dft_magnitudes([1.0, np.nan, 0.0], RATE)


class TestHannWindow:
    def test_length_one(self):
        assert hann_window(1).tolist() == [0.0]

    def test_length_four(self):
        np.testing.assert_allclose(hann_window(4), [0.0, 0.5, 1.0, 0.5], atol=1e-15)

    def test_bounded_and_symmetric(self):
        for length in (2, 5, 8, 17, 256):
            w = hann_window(length)
            assert w.max() <= 1.0
            for n in range(1, length):
                assert w[n] == pytest.approx(w[length - n], abs=1e-12)

    def test_rejects_zero_length(self):
        with pytest.raises(InvalidInputError):
            hann_window(0)


class TestWelchPsd:
    def test_zero_signal(self):
        psd = welch_psd(Signal(np.zeros(1000), RATE), 256, 0.5)
        assert psd.kind == POWER_DENSITY
        assert np.all(psd.values == 0.0)

    def test_grid(self):
        psd = welch_psd(Signal(np.zeros(1000), RATE), 256, 0.5)
        assert psd.frequencies_hz.size == 129
        assert psd.frequencies_hz[0] == 0.0
        assert psd.frequencies_hz[-1] == pytest.approx(RATE / 2)
        np.testing.assert_allclose(np.diff(psd.frequencies_hz), RATE / 256, rtol=1e-15)

    def test_sinusoid_total_power(self):
        # on-grid bin 26 of a 256-sample segment; total power A^2/2 = 2
        t = np.arange(3000) / RATE
        x = 2.0 * np.cos(2 * np.pi * (26 * RATE / 256) * t)
        psd = welch_psd(Signal(x, RATE), 256, 0.5)
        total = np.sum(psd.values) * (RATE / 256)
        assert total == pytest.approx(2.0, rel=0.05)

    def test_white_noise_total_power(self):
        ratios = []
        for seed in range(20):
            x = np.random.default_rng(seed).standard_normal(3000)
            psd = welch_psd(Signal(x, RATE), 256, 0.5)
            ratios.append(np.sum(psd.values) * (RATE / 256) / np.var(x))
        assert np.mean(ratios) == pytest.approx(1.0, rel=0.05)

    def test_matches_scipy(self):
        x = np.random.default_rng(3).standard_normal(2000)
        psd = welch_psd(Signal(x, RATE), 256, 0.5)
        f_sp, p_sp = scipy_welch(
            x, fs=RATE, window="hann", nperseg=256, noverlap=128, detrend=False
        )
        np.testing.assert_allclose(psd.frequencies_hz, f_sp, rtol=1e-12)
        np.testing.assert_allclose(psd.values, p_sp, rtol=1e-10)

    def test_duplicate_segments_average_out(self):
        x = np.random.default_rng(4).standard_normal(1024)
        once = welch_psd(Signal(x, RATE), 256, 0.0)
        twice = welch_psd(Signal(np.concatenate([x, x]), RATE), 256, 0.0)
        np.testing.assert_allclose(twice.values, once.values, rtol=1e-12)

    def test_quadratic_scaling(self):
        x = np.random.default_rng(5).standard_normal(1000)
        base = welch_psd(Signal(x, RATE), 256, 0.5)
        scaled = welch_psd(Signal(3.0 * x, RATE), 256, 0.5)
        np.testing.assert_allclose(scaled.values, 9.0 * base.values, rtol=1e-12)

    def test_segment_longer_than_signal(self):
        with pytest.raises(SegmentationError):
            welch_psd(Signal(np.zeros(100), RATE), 256, 0.5)

    def test_zero_hop_rejected(self):
        with pytest.raises(SegmentationError):
            welch_psd(Signal(np.zeros(100), RATE), 2, 0.9)

    def test_bad_overlap_rejected(self):
        with pytest.raises(SegmentationError):
            welch_psd(Signal(np.zeros(100), RATE), 64, 1.0)


class TestSpectralDensity:
    def test_square_roots(self):
        psd = PowerSpectrum([0.0, 1.0, 2.0], [0.0, 4.0, 9.0], POWER_DENSITY)
        density = spectral_density(psd)
        assert density.kind == AMPLITUDE_DENSITY
        np.testing.assert_array_equal(density.values, [0.0, 2.0, 3.0])
        np.testing.assert_array_equal(density.frequencies_hz, psd.frequencies_hz)

    def test_zero_stays_zero(self):
        psd = PowerSpectrum([0.0, 1.0], [0.0, 0.0], POWER_DENSITY)
        assert np.all(spectral_density(psd).values == 0.0)

    def test_round_trip(self):
        rng = np.random.default_rng(6)
        values = rng.uniform(0, 10, size=64)
        psd = PowerSpectrum(np.arange(64.0), values, POWER_DENSITY)
        back = spectral_density(psd).values ** 2
        np.testing.assert_allclose(back, values, rtol=1e-12)

    def test_rejects_wrong_kind(self):
        density = PowerSpectrum([0.0, 1.0], [1.0, 1.0], AMPLITUDE_DENSITY)
        with pytest.raises(InvalidKindError):
            spectral_density(density)


class TestResampleLinear:
    def test_midpoint(self):
        assert resample_linear([0.0, 10.0], [0.0, 10.0], [5.0])[0] == 5.0

    def test_exact_at_grid_points(self):
        values = resample_linear([0.0, 2.0, 4.0], [1.0, 3.0, 9.0], [0.0, 2.0, 4.0])
        np.testing.assert_array_equal(values, [1.0, 3.0, 9.0])

    def test_hand_interpolation(self):
        assert resample_linear([0.0, 2.0, 4.0], [1.0, 3.0, 9.0], [3.0])[0] == pytest.approx(6.0)

    def test_rejects_extrapolation(self):
        with pytest.raises(GridError):
            resample_linear([0.0, 2.0], [0.0, 1.0], [2.5])

    def test_rejects_unsorted_source(self):
        with pytest.raises(InvalidInputError):
            resample_linear([0.0, 2.0, 1.0], [0.0, 1.0, 2.0], [0.5])
