import numpy as np
import pytest

from bstft.config import (
    DecodeCfg,
    ExperimentConfig,
    GainCfg,
    MultitoneCfg,
    OutputCfg,
    ReceiverCfg,
    SweepCfg,
    ToneCfg,
)
from bstft.frontend import FrameSpec, ReferenceSpec, SweepPlan
from bstft.sbs import SbsGainSpec
from bstft.sigkit import TimeGrid, make_time_grid


@pytest.fixture
def plan_2ghz_per_us() -> SweepPlan:
    """Paper-style sweep: 10.8-14.8 GHz over 2 us (K = 2 GHz/us)."""
    return SweepPlan(f1=10.8e9, f2=14.8e9, period=2e-6, n_periods=4)


@pytest.fixture
def gain_default() -> SbsGainSpec:
    return SbsGainSpec()


@pytest.fixture
def reference_default() -> ReferenceSpec:
    return ReferenceSpec(frequency=10e6)


@pytest.fixture
def frame_centered(plan_2ghz_per_us) -> FrameSpec:
    return FrameSpec(frame_center=-(plan_2ghz_per_us.f1 + plan_2ghz_per_us.f2) / 2)


def small_config(
    sut=None,
    duration=6e-6,
    period=1e-6,
    fidelity="full_field",
    seed=0,
    noise=0.0,
    t_ref_policy="per_window",
    n_bins=1024,
    fwhm=30e6,
) -> ExperimentConfig:
    """Fast full-chain config: 4-GHz sweep bandwidth, short record."""
    if sut is None:
        sut = ToneCfg(frequency_hz=2e9)
    return ExperimentConfig(
        name="test",
        sut=sut,
        duration_s=duration,
        sweep=SweepCfg(f1_hz=10.8e9, f2_hz=14.8e9, period_s=period),
        gain=GainCfg(fwhm_hz=fwhm),
        receiver=ReceiverCfg(noise_sigma=noise, seed=seed),
        fidelity=fidelity,
        decode=DecodeCfg(n_bins=n_bins, t_ref_policy=t_ref_policy),
        output=OutputCfg(formats=[]),
        compute_oracle=False,
    )


def two_tone_small(f_a=2.0e9, f_b=2.06e9, **kw) -> ExperimentConfig:
    return small_config(sut=MultitoneCfg(frequencies_hz=[f_a, f_b]), **kw)


def grid_16g(duration=2e-6) -> TimeGrid:
    return make_time_grid(16e9, duration)


def spectrum_peaks_hz(samples: np.ndarray, sample_rate: float, n_peaks: int) -> list[float]:
    """Strongest positive-frequency FFT peaks of a real trace (test oracle)."""
    power = np.abs(np.fft.rfft(samples)) ** 2
    freqs = np.fft.rfftfreq(samples.size, 1 / sample_rate)
    inner = power[1:-1]
    idx = np.where((inner >= power[:-2]) & (inner > power[2:]))[0] + 1
    idx = sorted(idx, key=lambda k: -power[k])[:n_peaks]
    return sorted(freqs[k] for k in idx)
