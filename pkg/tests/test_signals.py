import numpy as np
import pytest

from pnlssdec.signals import (Dataset, MultisineSpec, Signal, SweptSineSpec,
                              generate_multisine, generate_swept_sine,
                              load_dataset, load_signal, rms, rms_db,
                              save_dataset, save_signal)


def bench_spec(**kw):
    base = dict(samples_per_period=8192, fs=750.0, band_low=5.0,
                band_high=150.0, target_rms=55.0, period_count=1, seed=0)
    base.update(kw)
    return MultisineSpec(**base)


class TestMultisineSpec:
    def test_excited_line_bounds_benchmark(self):
        # ceil(5*8192/750) = 55, floor(150*8192/750) = 1638
        lines = bench_spec().excited_lines()
        assert lines[0] == 55
        assert lines[-1] == 1638
        assert lines.size == 1584

    def test_band_must_be_ordered(self):
        with pytest.raises(ValueError):
            bench_spec(band_low=150.0, band_high=5.0)

    def test_band_below_nyquist(self):
        with pytest.raises(ValueError):
            bench_spec(band_high=400.0)

    def test_ns_power_of_two(self):
        with pytest.raises(ValueError):
            bench_spec(samples_per_period=6000)

    def test_empty_excited_set_rejected(self):
        # line spacing 750/1024 ~ 0.73 Hz, band narrower than one line
        with pytest.raises(ValueError, match="excited"):
            MultisineSpec(1024, 750.0, 100.1, 100.2, 1.0)


class TestGenerateMultisine:
    def test_target_rms(self):
        u = generate_multisine(bench_spec())
        assert u.rms() == pytest.approx(55.0, rel=1e-3)

    def test_flat_spectrum_and_purity(self):
        spec = bench_spec(samples_per_period=2048, seed=5)
        u = generate_multisine(spec)
        lines = spec.excited_lines()
        spectrum = np.abs(np.fft.rfft(u.samples))
        excited = spectrum[lines]
        assert np.allclose(excited, excited[0], rtol=1e-12)
        mask = np.ones(spectrum.size, dtype=bool)
        mask[lines] = False
        assert spectrum[mask].max() < 1e-12 * excited.max()

    def test_single_line_is_pure_sinusoid(self):
        spec = MultisineSpec(1024, 750.0, 30.0, 30.5, 2.0, seed=9)
        lines = spec.excited_lines()
        assert lines.size == 1
        u = generate_multisine(spec)
        k = lines[0]
        t = np.arange(1024)
        phase = np.angle(np.fft.rfft(u.samples)[k])
        expected = 2.0 * np.sqrt(2.0) * np.cos(2 * np.pi * k * t / 1024 + phase)
        assert np.allclose(u.samples, expected, atol=1e-12)

    def test_same_seed_bit_identical(self):
        u1 = generate_multisine(bench_spec(seed=17))
        u2 = generate_multisine(bench_spec(seed=17))
        assert np.array_equal(u1.samples, u2.samples)

    def test_different_seed_differs(self):
        u1 = generate_multisine(bench_spec(seed=17))
        u2 = generate_multisine(bench_spec(seed=18))
        assert not np.array_equal(u1.samples, u2.samples)

    def test_tiled_periodicity_exact(self):
        spec = bench_spec(samples_per_period=1024, period_count=3)
        u = generate_multisine(spec)
        assert np.array_equal(u.samples[:1024], u.samples[1024:2048])
        assert np.array_equal(u.samples[:1024], u.samples[2048:])

    def test_oversampled_grid_contains_base_samples(self):
        spec = bench_spec(samples_per_period=1024, seed=2)
        u = generate_multisine(spec)
        uf = generate_multisine(spec, oversample=8)
        assert uf.fs == 8 * u.fs
        assert np.allclose(uf.samples[::8], u.samples, atol=1e-12 * u.rms())

    def test_gaussian_limit_many_lines(self):
        # with >= 1000 excited lines the sample distribution gets Gaussian
        from scipy import stats

        skews, kurts = [], []
        for seed in range(20):
            u = generate_multisine(bench_spec(seed=seed)).samples
            skews.append(stats.skew(u))
            kurts.append(stats.kurtosis(u, fisher=False))
        assert abs(np.mean(skews)) < 0.1
        assert abs(np.mean(kurts) - 3.0) < 0.3


class TestSweptSine:
    def test_benchmark_duration_and_length(self):
        spec = SweptSineSpec(20.0, 50.0, 10.0, 50.0, 750.0)
        assert spec.resolved_duration() == pytest.approx(180.0)
        u = generate_swept_sine(spec)
        assert len(u) == 135000

    def test_cycle_count_matches_chirp_integral(self):
        spec = SweptSineSpec(20.0, 50.0, 10.0, 1.0, 750.0)
        u = generate_swept_sine(spec).samples
        crossings = np.sum(np.diff(np.signbit(u)) != 0)
        expected = 180.0 * (20.0 + 50.0) / 2.0 * 2.0
        assert abs(crossings - expected) / expected < 0.01

    def test_zero_width_sweep_is_constant_frequency(self):
        spec = SweptSineSpec(30.0, 30.0, 10.0, 1.5, 750.0, duration=2.0)
        u = generate_swept_sine(spec)
        t = u.time()
        assert np.allclose(u.samples, 1.5 * np.sin(2 * np.pi * 30.0 * t), atol=1e-12)

    def test_zero_width_sweep_needs_duration(self):
        with pytest.raises(ValueError):
            SweptSineSpec(30.0, 30.0, 10.0, 1.0, 750.0)

    def test_nonpositive_rate_rejected(self):
        with pytest.raises(ValueError):
            SweptSineSpec(20.0, 50.0, 0.0, 1.0, 750.0)

    def test_constant_amplitude_envelope(self):
        spec = SweptSineSpec(20.0, 50.0, 10.0, 3.0, 750.0, duration=10.0)
        u = generate_swept_sine(spec).samples
        assert np.max(np.abs(u)) <= 3.0 + 1e-12
        # every 1-second window reaches close to the full amplitude
        windows = u[: 7500].reshape(10, 750)
        assert np.all(np.max(np.abs(windows), axis=1) > 2.9)


class TestRmsDb:
    def test_constant_one_is_zero_db(self):
        assert rms_db(np.ones(100)) == pytest.approx(0.0, abs=1e-12)

    def test_constant_tenth_is_minus_twenty(self):
        assert rms_db(0.1 * np.ones(100)) == pytest.approx(-20.0, abs=1e-12)

    def test_white_sequence_scaled_to_1e4(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal(4096)
        x *= 1e-4 / rms(x)
        assert rms_db(x) == pytest.approx(-80.0, abs=0.01)

    def test_zero_signal_reports_minus_inf(self):
        assert rms_db(np.zeros(10)) == float("-inf")

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            rms_db(np.zeros(0))

    def test_accepts_signal_objects(self):
        sig = Signal(np.ones(8), 10.0)
        assert rms_db(sig) == pytest.approx(0.0)


class TestContainers:
    def test_signal_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            Signal(np.array([1.0, np.nan]), 10.0)

    def test_dataset_length_mismatch(self):
        with pytest.raises(ValueError):
            Dataset(Signal(np.ones(4), 10.0), Signal(np.ones(5), 10.0))

    def test_dataset_period_bookkeeping(self):
        with pytest.raises(ValueError):
            Dataset(Signal(np.ones(6), 10.0), Signal(np.ones(6), 10.0),
                    periods=2, samples_per_period=4)


class TestPersistence:
    def test_signal_roundtrip(self, tmp_path):
        u = generate_multisine(bench_spec(samples_per_period=1024))
        path = tmp_path / "u.csv"
        save_signal(u, path)
        back = load_signal(path)
        assert np.array_equal(back.samples, u.samples)
        assert back.fs == u.fs
        assert back.meta["spec"]["target_rms"] == 55.0

    def test_dataset_roundtrip(self, tmp_path):
        u = generate_multisine(bench_spec(samples_per_period=1024, period_count=2))
        y = Signal(np.cumsum(u.samples) * 1e-3, u.fs)
        ds = Dataset(u, y, label="train", periods=2, samples_per_period=1024)
        path = tmp_path / "ds.csv"
        save_dataset(ds, path)
        back = load_dataset(path)
        assert np.array_equal(back.u.samples, ds.u.samples)
        assert np.array_equal(back.y.samples, ds.y.samples)
        assert back.label == "train"
        assert back.periods == 2
        assert back.samples_per_period == 1024

    def test_same_seed_same_bytes(self, tmp_path):
        for name in ("a.csv", "b.csv"):
            save_signal(generate_multisine(bench_spec(samples_per_period=1024)),
                        tmp_path / name)
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
