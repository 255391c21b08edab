import numpy as np
import numpy.testing as npt
import pytest

from nvmag.noise import (PsdModel, TabulatedPsd, NoiseTrace, synthesize_trace,
                         estimate_psd, cumulative_rss, cumulative_rss_curve,
                         cumulative_rss_descending)


class TestPsdModel:
    def test_density_band_limits(self):
        m = PsdModel("laser_intensity", white=2.0, f_min=1.0, f_max=100.0)
        f = np.array([0.5, 1.0, 10.0, 100.0, 200.0])
        npt.assert_allclose(m.density(f), [0.0, 2.0, 2.0, 2.0, 0.0])

    def test_flicker_density(self):
        m = PsdModel("mw_amplitude", flicker=((4.0, 1.0), (9.0, 2.0)))
        assert m.density(3.0) == pytest.approx(4.0 / 3 + 1.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            PsdModel("nope", white=1.0)
        with pytest.raises(ValueError):
            PsdModel("laser_intensity", white=-1.0)
        with pytest.raises(ValueError):
            PsdModel("laser_intensity", flicker=((1.0, 2.5),))
        with pytest.raises(ValueError):
            PsdModel("laser_intensity", f_min=10.0, f_max=1.0)

    def test_band_variance_matches_quadrature(self):
        m = PsdModel("mw_frequency", white=0.3, flicker=((2.0, 1.0), (5.0, 0.7)))
        f = np.linspace(2.0, 300.0, 200_000)
        numeric = np.trapezoid(m.density(f), f)
        assert m.band_variance(2.0, 300.0) == pytest.approx(numeric, rel=1e-6)

    def test_tabulated_psd(self):
        t = TabulatedPsd("laser_intensity", (1.0, 10.0, 100.0), (0.0, 4.0, 2.0))
        assert t.density(10.0) == pytest.approx(4.0)
        assert t.density(0.1) == 0.0
        assert t.density(1e4) == 0.0
        with pytest.raises(ValueError):
            TabulatedPsd("laser_intensity", (1.0, 1.0), (0.0, 1.0))


class TestSynthesis:
    def test_zero_psd_gives_zero_trace(self):
        m = PsdModel("laser_intensity")
        tr = synthesize_trace(m, 1e-2, 1e-5, seed=1)
        assert np.all(tr.samples == 0.0)

    def test_white_variance_matches_band_integral(self):
        s0, dt, duration = 2.5, 0.5e-6, 0.5
        m = PsdModel("laser_intensity", white=s0)
        tr = synthesize_trace(m, duration, dt, seed=42)
        assert tr.samples.size == 1_000_000
        expected = m.band_variance(1.0 / duration, 1.0 / (2 * dt))
        assert tr.samples.var() == pytest.approx(expected, rel=0.05)

    def test_zero_mean(self):
        m = PsdModel("laser_intensity", white=1.0)
        tr = synthesize_trace(m, 0.1, 1e-5, seed=3)
        assert abs(tr.samples.mean()) < 1e-10

    def test_deterministic_per_seed(self):
        m = PsdModel("mw_amplitude", white=1.0, flicker=((0.5, 1.0),))
        a = synthesize_trace(m, 1e-2, 1e-5, seed=7).samples
        b = synthesize_trace(m, 1e-2, 1e-5, seed=7).samples
        c = synthesize_trace(m, 1e-2, 1e-5, seed=8).samples
        npt.assert_array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_white_trace_is_uncorrelated(self):
        m = PsdModel("laser_intensity", white=1.0)
        x = synthesize_trace(m, 1.0, 1e-5, seed=11).samples
        n = x.size
        x = x - x.mean()
        var = x.var()
        for lag in (1, 2, 5, 10):
            rho = np.dot(x[:-lag], x[lag:]) / ((n - lag) * var)
            assert abs(rho) < 3.0 / np.sqrt(n)

    def test_round_trip_psd_within_ten_percent_per_octave(self):
        m = PsdModel("mw_amplitude", white=0.05, flicker=((1.0, 1.0),))
        fs, n_seg = 1e3, 512
        acc = None
        n_seeds = 100
        for seed in range(n_seeds):
            tr = synthesize_trace(m, 8.192, 1.0 / fs, seed=seed)
            f, pxx = estimate_psd(tr, n_seg)
            acc = pxx if acc is None else acc + pxx
        mean_psd = acc / n_seeds
        edges = 2.0 ** np.arange(1, 8)  # octaves from 2 Hz to 256 Hz
        for lo, hi in zip(edges[:-1], edges[1:]):
            band = (f >= lo) & (f < hi)
            est = mean_psd[band].mean()
            model = m.density(f[band]).mean()
            assert est == pytest.approx(model, rel=0.10)

    def test_rejects_bad_sampling(self):
        m = PsdModel("laser_intensity", white=1.0)
        with pytest.raises(ValueError):
            synthesize_trace(m, 1.0, 0.0, seed=1)
        with pytest.raises(ValueError):
            synthesize_trace(m, 1e-5, 1e-5, seed=1)

    def test_value_at_lookup(self):
        tr = NoiseTrace(np.arange(10.0), dt=0.5)
        npt.assert_allclose(tr.value_at([0.0, 0.6, 100.0]), [0.0, 1.0, 9.0])


class TestEstimatePsd:
    def test_sinusoid_integrated_power(self):
        fs, f0, a = 1e4, 500.0, 0.8
        t = np.arange(200_000) / fs
        x = a * np.sin(2 * np.pi * f0 * t)
        f, pxx = estimate_psd(NoiseTrace(x, 1 / fs), 4096)
        assert np.trapezoid(pxx, f) == pytest.approx(a * a / 2, rel=0.05)
        assert abs(f[np.argmax(pxx)] - f0) < fs / 4096 * 2

    def test_white_input_is_flat(self, rng):
        x = rng.standard_normal(400_000)
        f, pxx = estimate_psd(NoiseTrace(x, 1e-4), 1024)
        level = 2 * 1e-4  # two-sided variance 1 spread over the band
        band = pxx[(f > 50) & (f < 4500)]
        assert band.mean() == pytest.approx(level, rel=0.05)

    def test_zero_input(self):
        f, pxx = estimate_psd(NoiseTrace(np.zeros(4096), 1e-3), 512)
        assert np.all(pxx == 0.0)

    def test_needs_two_segments(self):
        with pytest.raises(ValueError):
            estimate_psd(NoiseTrace(np.zeros(600), 1e-3), 512)


class TestCumulative:
    def test_zero_width_band(self):
        f = np.linspace(1, 100, 50)
        assert cumulative_rss(f, np.ones_like(f), 10.0, 10.0) == 0.0

    def test_white_closed_form(self):
        f = np.linspace(1, 1000, 2000)
        s0 = 3.0
        got = cumulative_rss(f, np.full_like(f, s0), 10.0, 250.0)
        assert got == pytest.approx(np.sqrt(s0 * 240.0), rel=1e-12)

    def test_monotone_in_upper_frequency(self):
        f = np.logspace(0, 4, 300)
        dens = 1.0 / f
        curve = cumulative_rss_curve(f, dens, f[0])
        assert np.all(np.diff(curve) >= 0)

    def test_descending_direction(self):
        f = np.linspace(1, 100, 500)
        s0 = 2.0
        curve = cumulative_rss_descending(f, np.full_like(f, s0), 100.0)
        npt.assert_allclose(curve, np.sqrt(s0 * (100.0 - f)), rtol=1e-9,
                            atol=1e-12)
        assert np.all(np.diff(curve) <= 1e-12)

    def test_rejects_inverted_band(self):
        f = np.linspace(1, 100, 50)
        with pytest.raises(ValueError):
            cumulative_rss(f, np.ones_like(f), 50.0, 10.0)
