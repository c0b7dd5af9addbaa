import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bstft.errors import AliasingError, InvalidArgumentError
from bstft.sigkit import (
    BurstOnLfm,
    ComplexTrace,
    FreqHop,
    Lfm,
    MixedWithLo,
    Multitone,
    NlfmProfile,
    RealTrace,
    StepFreq,
    SumSignal,
    TimeGrid,
    Tone,
    make_time_grid,
    max_frequency,
    mix_with_lo,
    read_trace,
    synthesize,
    true_instantaneous_frequency,
    write_trace,
)
from conftest import grid_16g, spectrum_peaks_hz


class TestTimeGrid:
    def test_sample_counts(self):
        assert make_time_grid(16e9, 2e-6).n_samples == 32000
        assert make_time_grid(16e9, 200e-6).n_samples == 3_200_000

    def test_rejects_nonpositive(self):
        with pytest.raises(InvalidArgumentError):
            make_time_grid(0, 1e-6)
        with pytest.raises(InvalidArgumentError):
            make_time_grid(1e9, -1.0)

    def test_duration_roundtrip(self):
        grid = make_time_grid(2e9, 5e-6)
        assert grid.duration == pytest.approx(5e-6)
        assert grid.times()[0] == 0.0


class TestSynthesize:
    def test_lfm_chirp_rate(self):
        lfm = Lfm(f_start=10e6, f_stop=4e9, duration=1.5e-3)
        assert lfm.chirp_rate == pytest.approx((4e9 - 1e7) / 1.5e-3)

    def test_zero_frequency_tone_is_constant(self):
        trace = synthesize(Tone(frequency=0.0), grid_16g())
        assert np.allclose(trace.samples, 1.0)

    def test_two_tone_spectrum_has_two_peaks(self):
        grid = grid_16g(4e-6)
        trace = synthesize(Multitone(frequencies=(2.0e9, 2.06e9)), grid)
        peaks = spectrum_peaks_hz(trace.samples, grid.sample_rate, 2)
        assert peaks == pytest.approx([2.0e9, 2.06e9], abs=grid.sample_rate / grid.n_samples)

    def test_aliasing_rejected(self):
        with pytest.raises(AliasingError):
            synthesize(Tone(frequency=9e9), grid_16g())

    def test_no_energy_above_declared_max(self):
        # spectral leakage above the descriptor band stays below -60 dB of peak
        grid = grid_16g(10e-6)
        for desc in [
            Lfm(f_start=10e6, f_stop=4e9, duration=10e-6),
            FreqHop(dwell=2e-6, frequencies=(1e9, 3e9, 2e9)),
            StepFreq(f_start=0.5e9, f_step=1e9, n_steps=4, dwell=2.5e-6),
        ]:
            trace = synthesize(desc, grid)
            power = np.abs(np.fft.rfft(trace.samples)) ** 2
            freqs = np.fft.rfftfreq(grid.n_samples, grid.dt)
            above = freqs > max_frequency(desc) + 50e6
            assert power[above].max() < 1e-6 * power.max()

    def test_lfm_phase_increment_below_pi(self):
        grid = grid_16g(10e-6)
        trace = synthesize(Lfm(f_start=10e6, f_stop=4e9, duration=10e-6), grid)
        phase = np.unwrap(np.angle(_analytic_signal(trace.samples)))
        steps = np.abs(np.diff(phase[100:-100]))
        assert steps.max() < np.pi

    def test_hop_phase_continuity(self):
        grid = make_time_grid(16e9, 6e-6)
        desc = FreqHop(dwell=2e-6, frequencies=(1e9, 3e9, 2e9))
        x = synthesize(desc, grid).samples
        # no sample-to-sample jump may exceed the steepest tone slope
        max_step = 2 * np.pi * 3e9 * grid.dt
        assert np.abs(np.diff(x)).max() <= max_step * 1.01

    def test_phase_reset_mode_differs(self):
        grid = make_time_grid(16e9, 4e-6)
        cont = synthesize(FreqHop(dwell=1.3e-6, frequencies=(1e9, 2.2e9), phase_continuous=True), grid)
        reset = synthesize(FreqHop(dwell=1.3e-6, frequencies=(1e9, 2.2e9), phase_continuous=False), grid)
        assert not np.allclose(cont.samples, reset.samples)

    def test_sum_and_burst(self):
        grid = make_time_grid(16e9, 10e-6)
        burst = BurstOnLfm(
            lfm=Lfm(f_start=10e6, f_stop=4e9, duration=10e-6),
            burst_frequency=2e9,
            burst_t_start=4e-6,
            burst_duration=2e-6,
            burst_amplitude=0.5,
        )
        explicit = SumSignal(
            components=(
                Lfm(f_start=10e6, f_stop=4e9, duration=10e-6),
                Tone(frequency=2e9, amplitude=0.5, t_start=4e-6, t_stop=6e-6),
            )
        )
        assert np.array_equal(synthesize(burst, grid).samples, synthesize(explicit, grid).samples)

    def test_validation_errors(self):
        with pytest.raises(InvalidArgumentError):
            synthesize(FreqHop(dwell=1e-6, frequencies=()), grid_16g())
        with pytest.raises(InvalidArgumentError):
            synthesize(NlfmProfile(times=(0.0,), freqs=(1e9,)), grid_16g())
        with pytest.raises(InvalidArgumentError):
            synthesize(Tone(frequency=-1.0), grid_16g())


class TestMixWithLo:
    def test_paper_dual_chirp_band(self):
        grid = make_time_grid(46e9, 20e-6)
        lfm = Lfm(f_start=10e6, f_stop=4e9, duration=20e-6)
        mixed = MixedWithLo(inner=lfm, lo_frequency=8e9)
        assert max_frequency(mixed) == pytest.approx(12e9)
        up, down = true_instantaneous_frequency(mixed, 0.0)[1], true_instantaneous_frequency(mixed, 0.0)[0]
        assert up == pytest.approx(8.01e9)
        assert down == pytest.approx(7.99e9)
        end = true_instantaneous_frequency(mixed, 20e-6 - 1e-12)
        assert end[0] == pytest.approx(4e9, rel=1e-3)
        assert end[1] == pytest.approx(12e9, rel=1e-3)

    def test_zero_lo_is_identity(self):
        grid = grid_16g()
        trace = synthesize(Tone(frequency=1e9), grid)
        assert np.array_equal(mix_with_lo(trace, 0.0).samples, trace.samples)

    def test_tone_mix_produces_sum_and_difference(self):
        grid = grid_16g(4e-6)
        mixed = mix_with_lo(synthesize(Tone(frequency=1e9), grid), 3e9)
        peaks = spectrum_peaks_hz(mixed.samples, grid.sample_rate, 2)
        assert peaks == pytest.approx([2e9, 4e9], abs=2 * grid.sample_rate / grid.n_samples)


class TestTrueInstantaneousFrequency:
    def test_lfm_midpoint(self):
        lfm = Lfm(f_start=10e6, f_stop=4e9, duration=200e-6)
        (f,) = true_instantaneous_frequency(lfm, 100e-6)
        assert f == pytest.approx(2.005e9)

    def test_tone_everywhere(self):
        assert true_instantaneous_frequency(Tone(frequency=2e9), 1.23e-5) == (2e9,)

    def test_hop_table_lookup(self):
        hop = FreqHop(dwell=10e-6, frequencies=(1e9, 3e9))
        assert true_instantaneous_frequency(hop, 15e-6) == (3e9,)
        assert true_instantaneous_frequency(hop, 10e-6) == (3e9,)

    def test_out_of_range(self):
        with pytest.raises(InvalidArgumentError):
            true_instantaneous_frequency(Tone(frequency=1e9), -1e-9)
        with pytest.raises(InvalidArgumentError):
            true_instantaneous_frequency(Tone(frequency=1e9), 2.0, duration=1.0)

    def test_burst_reports_both(self):
        burst = BurstOnLfm(
            lfm=Lfm(f_start=10e6, f_stop=4e9, duration=40e-6),
            burst_frequency=2e9,
            burst_t_start=8e-6,
            burst_duration=2e-6,
            burst_amplitude=0.4,
        )
        freqs = true_instantaneous_frequency(burst, 9e-6)
        assert len(freqs) == 2 and 2e9 in freqs

    def test_matches_numerical_phase_derivative(self):
        # analytic frequency equals d(phase)/dt/2pi of the synthesis to 1e-6
        grid = make_time_grid(16e9, 20e-6)
        desc = Lfm(f_start=10e6, f_stop=4e9, duration=20e-6)
        trace = synthesize(desc, grid)
        analytic = np.unwrap(np.angle(_analytic_signal(trace.samples)))
        inst = np.diff(analytic) / (2 * np.pi * grid.dt)
        t_mid = (np.arange(grid.n_samples - 1) + 0.5) * grid.dt
        sel = slice(1000, grid.n_samples - 1000)
        expected = np.array([true_instantaneous_frequency(desc, t)[0] for t in t_mid[sel][::5000]])
        measured = inst[sel][::5000]
        assert np.max(np.abs(measured - expected) / expected) < 1e-6


def _analytic_signal(x: np.ndarray) -> np.ndarray:
    spec = np.fft.fft(x)
    half = x.size // 2
    spec[1:half] *= 2
    spec[half + 1 :] = 0
    return np.fft.ifft(spec)


class TestTraceTypes:
    def test_length_mismatch_rejected(self):
        grid = TimeGrid(sample_rate=1e9, n_samples=16)
        with pytest.raises(InvalidArgumentError):
            RealTrace(grid=grid, samples=np.zeros(8))

    def test_nonfinite_rejected(self):
        grid = TimeGrid(sample_rate=1e9, n_samples=4)
        with pytest.raises(InvalidArgumentError):
            RealTrace(grid=grid, samples=np.array([0.0, np.nan, 0.0, 0.0]))

    def test_samples_immutable(self):
        grid = TimeGrid(sample_rate=1e9, n_samples=4)
        trace = RealTrace(grid=grid, samples=np.zeros(4))
        with pytest.raises(ValueError):
            trace.samples[0] = 1.0


class TestBstfFormat:
    def test_real_roundtrip(self, tmp_path):
        grid = make_time_grid(2e9, 1e-6)
        trace = RealTrace(grid=grid, samples=np.sin(np.arange(grid.n_samples)))
        path = tmp_path / "trace.bstf"
        write_trace(path, trace)
        back = read_trace(path)
        assert isinstance(back, RealTrace)
        assert back.grid.sample_rate == grid.sample_rate
        assert np.array_equal(back.samples, trace.samples)

    def test_complex_roundtrip(self, tmp_path):
        grid = make_time_grid(2e9, 1e-6)
        samples = np.exp(1j * np.linspace(0, 20, grid.n_samples))
        trace = ComplexTrace(grid=grid, samples=samples, frame_offset=-12.8e9)
        path = tmp_path / "trace.bstf"
        write_trace(path, trace)
        back = read_trace(path)
        assert isinstance(back, ComplexTrace)
        assert back.frame_offset == -12.8e9
        assert np.array_equal(back.samples, trace.samples)

    def test_header_layout(self, tmp_path):
        grid = TimeGrid(sample_rate=1e9, n_samples=2)
        path = tmp_path / "t.bstf"
        write_trace(path, RealTrace(grid=grid, samples=np.array([1.0, -1.0])))
        raw = path.read_bytes()
        assert raw[:4] == b"BSTF"
        assert raw[4] == 1 and raw[5] == 0
        assert np.frombuffer(raw[6:14], "<f8")[0] == 1e9
        assert np.frombuffer(raw[14:22], "<u8")[0] == 2
        assert len(raw) == 30 + 16

    def test_bad_magic_and_truncation(self, tmp_path):
        path = tmp_path / "bad.bstf"
        path.write_bytes(b"NOPE" + bytes(26))
        with pytest.raises(InvalidArgumentError):
            read_trace(path)
        grid = TimeGrid(sample_rate=1e9, n_samples=4)
        write_trace(path, RealTrace(grid=grid, samples=np.zeros(4)))
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(InvalidArgumentError):
            read_trace(path)

    @given(
        n=st.integers(min_value=1, max_value=64),
        rate=st.floats(min_value=1e3, max_value=1e12),
        frame=st.floats(min_value=-20e9, max_value=20e9),
    )
    @settings(max_examples=25, deadline=None)
    def test_roundtrip_property(self, tmp_path_factory, n, rate, frame):
        rng = np.random.default_rng(n)
        grid = TimeGrid(sample_rate=rate, n_samples=n)
        trace = ComplexTrace(
            grid=grid, samples=rng.normal(size=n) + 1j * rng.normal(size=n), frame_offset=frame
        )
        path = tmp_path_factory.mktemp("bstf") / "t.bstf"
        write_trace(path, trace)
        back = read_trace(path)
        assert back.grid.n_samples == n
        assert np.array_equal(back.samples, trace.samples)
