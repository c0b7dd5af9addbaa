"""Brillouin gain models at three fidelity levels.

full_field filters the whole probe record through the Lorentzian gain as an
LTI system (overlap-save block convolution). The analytic modes predict each
window's photocurrent directly from the windowed drive spectrum: `dirac`
samples |A|^2 along the frequency-to-time mapping line, `lorentzian_analytic`
first smooths |A|^2 with the unit-area gain Lorentzian (incoherent
approximation; full_field exists to bound it).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import FrameError, InvalidArgumentError
from .frontend import SweepPlan
from .sigkit import ComplexTrace, RealTrace, TimeGrid

# impulse response of the zero-phase Lorentzian decays as exp(-pi*fwhm*|t|);
# ln(1e4)/pi sets the -80 dB truncation point in units of 1/fwhm
_DECAY_80DB = float(np.log(1e4) / np.pi)


class FidelityMode(enum.Enum):
    FULL_FIELD = "full_field"
    LORENTZIAN_ANALYTIC = "lorentzian_analytic"
    DIRAC = "dirac"


@dataclass(frozen=True)
class SbsGainSpec:
    """Lorentzian gain parameters.

    The gain centers at pump_offset - brillouin_shift relative to the optical
    carrier (the pump is tapped from the same laser, so pump_offset defaults
    to zero). shape_mode selects the literal Lorentzian amplitude multiplier
    or the complex small-signal exponential response.
    """

    brillouin_shift: float = 10.8e9
    fwhm: float = 30e6
    peak_gain: float = 5.0
    pump_offset: float = 0.0
    shape_mode: str = "linear_lorentzian"

    def __post_init__(self):
        if self.fwhm <= 0:
            raise InvalidArgumentError("gain fwhm must be positive")
        if self.peak_gain <= 0:
            raise InvalidArgumentError("peak gain must be positive")
        if self.shape_mode not in ("linear_lorentzian", "exponential_small_signal"):
            raise InvalidArgumentError(f"unknown shape_mode {self.shape_mode!r}")

    @property
    def gain_center(self) -> float:
        """Gain-peak frequency relative to the optical carrier."""
        return self.pump_offset - self.brillouin_shift


def gain_profile(g: SbsGainSpec, f) -> np.ndarray | float | complex:
    """Gain at optical offset f (Hz relative to the carrier).

    linear_lorentzian returns the real Lorentzian amplitude multiplier with
    peak value peak_gain; exponential_small_signal returns the complex
    exp(g0/2 / (1 + 2j*(f - center)/fwhm)) response.
    """
    detune = np.asarray(f, dtype=float) - g.gain_center
    if g.shape_mode == "linear_lorentzian":
        hw = g.fwhm / 2
        out = g.peak_gain * hw**2 / (hw**2 + detune**2)
    else:
        out = np.exp(0.5 * g.peak_gain / (1 + 2j * detune / g.fwhm))
    return out if np.ndim(f) else out[()]


def analysis_band(plan: SweepPlan, g: SbsGainSpec) -> tuple[float, float]:
    """Decodable RF band per sweep window: [f1 - f_SBS, f1 - f_SBS + K*T]."""
    f_min = plan.f1 - g.brillouin_shift + g.pump_offset
    return f_min, f_min + plan.chirp_rate * plan.period


def overlap_save_block_length(sample_rate: float, fwhm: float) -> int:
    """Next power of two >= 64 * sample_rate / fwhm (captures the ring-down)."""
    target = max(64 * sample_rate / fwhm, 1024)
    return 1 << int(np.ceil(np.log2(target)))


def apply_gain_filter(probe: ComplexTrace, g: SbsGainSpec) -> ComplexTrace:
    """LTI-filter the probe field through the gain profile (overlap-save)."""
    fs = probe.grid.sample_rate
    nu_center = g.gain_center - probe.frame_offset
    if not (-fs / 2 < nu_center < fs / 2):
        raise FrameError(
            f"gain center at {nu_center:.3e} Hz in-frame is outside +-{fs / 2:.3e} Hz"
        )
    n = probe.grid.n_samples
    # edge guard: samples polluted by kernel truncation on each block side
    guard = int(np.ceil(_DECAY_80DB * fs / g.fwhm))
    block = overlap_save_block_length(fs, g.fwhm)
    while block < 4 * guard:
        block *= 2
    step = block - 2 * guard

    h = gain_profile(g, probe.frame_offset + np.fft.fftfreq(block, 1 / fs))
    padded = np.zeros(guard + n + block, dtype=np.complex128)
    padded[guard : guard + n] = probe.samples
    out = np.empty(n, dtype=np.complex128)
    for start in range(0, n, step):
        seg = np.fft.ifft(np.fft.fft(padded[start : start + block]) * h)
        keep = min(step, n - start)
        out[start : start + keep] = seg[guard : guard + keep]
    return ComplexTrace(grid=probe.grid, samples=out, frame_offset=probe.frame_offset)


def sample_power_spectrum(f: np.ndarray, bins: np.ndarray, power: np.ndarray) -> np.ndarray:
    """Linearly interpolate a one-sided power spectrum; zero outside the bins."""
    return np.interp(f, bins, power, left=0.0, right=0.0)


def lorentzian_smooth_power(power: np.ndarray, bin_width: float, fwhm: float) -> np.ndarray:
    """Convolve a one-sided power spectrum with the unit-area Lorentzian.

    Works on the circular full spectrum (even extension), where the smoothing
    is exact: the Fourier transform of the Lorentzian is exp(-pi*fwhm*|tau|),
    applied to the spectrum's inverse transform lags.
    """
    if power.size < 2:
        return power.copy()
    full = np.concatenate([power, power[-2:0:-1]])
    n = full.size
    lags = np.minimum(np.arange(n), n - np.arange(n)) / (n * bin_width)
    smoothed = np.fft.ifft(np.fft.fft(full) * np.exp(-np.pi * fwhm * lags)).real
    return smoothed[: power.size]


def analytic_window_response(
    windowed_m: RealTrace,
    plan: SweepPlan,
    g: SbsGainSpec,
    mode: FidelityMode,
    osc_sample_rate: float,
) -> RealTrace:
    """Predict one sweep window's photocurrent without simulating the field.

    The drive spectrum A of the T-long window is evaluated along the mapping
    line f(t) = f_min + K*t; `dirac` returns |A(f(t))|^2, `lorentzian_analytic`
    smooths |A|^2 with the gain Lorentzian first.
    """
    if mode not in (FidelityMode.DIRAC, FidelityMode.LORENTZIAN_ANALYTIC):
        raise InvalidArgumentError(f"analytic response does not support mode {mode}")
    if abs(windowed_m.grid.duration - plan.period) > 0.5 * windowed_m.grid.dt:
        raise InvalidArgumentError(
            f"window duration {windowed_m.grid.duration:.4e} s != sweep period {plan.period:.4e} s"
        )
    spectrum = np.fft.rfft(windowed_m.samples)
    power = np.abs(spectrum) ** 2
    bins = np.fft.rfftfreq(windowed_m.grid.n_samples, windowed_m.grid.dt)
    if mode is FidelityMode.LORENTZIAN_ANALYTIC:
        power = lorentzian_smooth_power(power, bins[1], g.fwhm)

    n_out = int(round(plan.period * osc_sample_rate))
    t_local = np.arange(n_out) / osc_sample_rate
    f_min, _ = analysis_band(plan, g)
    current = sample_power_spectrum(f_min + plan.chirp_rate * t_local, bins, power)
    grid = TimeGrid(sample_rate=osc_sample_rate, n_samples=n_out, t0=windowed_m.grid.t0)
    return RealTrace(grid=grid, samples=current)
