"""Photodetection, window segmentation and frequency-to-time decoding.

The photocurrent is |field|^2 low-passed at the detector bandwidth and
decimated to the oscilloscope rate. Each sweep window is decoded by locating
the reference pulse inside the guard interval and mapping local time to
frequency along f = f_r + K * (t - t_ref).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from .errors import InvalidArgumentError, ReferenceNotFoundError
from .frontend import ReferenceSpec, SweepPlan
from .sbs import SbsGainSpec, analysis_band
from .sigkit import ComplexTrace, RealTrace, TimeGrid

# pulses below this fraction of the window maximum do not qualify as a reference
_REF_REL_FLOOR = 0.01


@dataclass(frozen=True)
class ReceiverSpec:
    pd_bandwidth: float = 500e6
    osc_sample_rate: float = 2e9
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.pd_bandwidth <= 0 or self.osc_sample_rate <= 0:
            raise InvalidArgumentError("receiver rates must be positive")
        if self.pd_bandwidth > self.osc_sample_rate / 2:
            raise InvalidArgumentError("pd_bandwidth must not exceed half the scope rate")
        if self.noise_sigma < 0:
            raise InvalidArgumentError("noise_sigma must be >= 0")


@dataclass(frozen=True)
class SpectrumColumn:
    """One decoded sweep window: power on a uniform frequency grid."""

    window_index: int
    t_center: float
    freq_grid: np.ndarray
    power: np.ndarray
    t_ref_found: float
    uncalibrated: bool = False
    edge_straddle: bool = False

    def __post_init__(self):
        if self.power.shape != self.freq_grid.shape:
            raise InvalidArgumentError("power and freq_grid lengths differ")


def photodetect(field: ComplexTrace, rx: ReceiverSpec) -> RealTrace:
    """Square-law detect, low-pass at pd_bandwidth and decimate to the scope rate."""
    fs = field.grid.sample_rate
    current = np.abs(field.samples) ** 2
    if rx.osc_sample_rate > fs:
        raise InvalidArgumentError("scope rate above the field sample rate")
    q = fs / rx.osc_sample_rate
    if abs(q - round(q)) > 1e-9:
        raise InvalidArgumentError("field rate must be an integer multiple of the scope rate")
    q = int(round(q))
    if rx.pd_bandwidth < fs / 2:
        # odd-length linear-phase FIR applied centered: zero net group delay
        numtaps = int(np.ceil(3.3 * fs / rx.pd_bandwidth)) | 1
        taps = signal.firwin(numtaps, rx.pd_bandwidth, fs=fs)
        current = signal.fftconvolve(current, taps, mode="same")
    current = current[::q]
    if rx.noise_sigma > 0:
        rng = np.random.default_rng(rx.seed)
        current = current + rng.normal(0.0, rx.noise_sigma, current.size)
    grid = TimeGrid(sample_rate=rx.osc_sample_rate, n_samples=current.size, t0=field.grid.t0)
    return RealTrace(grid=grid, samples=current)


def samples_per_period(plan: SweepPlan, sample_rate: float) -> int:
    n = plan.period * sample_rate
    if abs(n - round(n)) > 1e-6:
        raise InvalidArgumentError(
            f"sweep period {plan.period} s is not an integer number of samples at {sample_rate} Hz"
        )
    return int(round(n))


def segment_periods(trace: RealTrace, plan: SweepPlan, t_start: float = 0.0) -> list[RealTrace]:
    """Slice consecutive sweep periods out of a record; partial head/tail dropped."""
    rate = trace.grid.sample_rate
    n_per = samples_per_period(plan, rate)
    first = int(round((t_start - trace.grid.t0) * rate))
    if first < 0:
        raise InvalidArgumentError("t_start precedes the record")
    windows = []
    while first + n_per <= trace.grid.n_samples:
        grid = TimeGrid(sample_rate=rate, n_samples=n_per, t0=trace.grid.t0 + first / rate)
        windows.append(RealTrace(grid=grid, samples=trace.samples[first : first + n_per]))
        first += n_per
    if not windows:
        raise InvalidArgumentError("record shorter than one sweep period")
    return windows


def nominal_t_ref(plan: SweepPlan, ref: ReferenceSpec, g: SbsGainSpec) -> float:
    """Reference-pulse position predicted by the mapping line."""
    f_min, _ = analysis_band(plan, g)
    return (ref.frequency - f_min) / plan.chirp_rate


def locate_reference(
    window: RealTrace,
    plan: SweepPlan,
    ref: ReferenceSpec,
    guard_fraction: float = 0.1,
) -> float:
    """Centroid of the largest pulse inside the guard interval, in window-local time.

    The reference repeats once per sweep period, so a pulse sitting close to
    the window start is handled circularly: the window's own tail samples
    stand in for the pulse energy that wrapped into the previous period. The
    returned centroid can therefore be slightly negative. Raises
    ReferenceNotFoundError when no pulse stands above the threshold.
    """
    rate = window.grid.sample_rate
    n_guard = int(np.ceil(guard_fraction * plan.period * rate))
    n_guard = min(n_guard, window.grid.n_samples)
    if n_guard == 0:
        raise ReferenceNotFoundError("guard interval contains no samples")
    guard = window.samples[:n_guard]
    peak = guard.max()
    if peak <= 0 or peak < _REF_REL_FLOOR * window.samples.max():
        raise ReferenceNotFoundError("no reference pulse above threshold in guard interval")
    # circular view: [-n_wrap, n_guard) with the wrap taken from the window tail
    n_wrap = min(n_guard, window.grid.n_samples - n_guard)
    circ = np.concatenate([window.samples[window.grid.n_samples - n_wrap :], guard])
    k = n_wrap + int(np.argmax(guard))
    half = circ[k] / 2
    lo = k
    while lo > 0 and circ[lo - 1] >= half:
        lo -= 1
    hi = k
    while hi < circ.size - 1 and circ[hi + 1] >= half:
        hi += 1
    region = circ[lo : hi + 1]
    t_local = (np.arange(lo, hi + 1) - n_wrap) / rate
    return float(np.sum(t_local * region) / np.sum(region))


def fttm_map(
    plan: SweepPlan, ref: ReferenceSpec, g: SbsGainSpec, t_local, t_ref: float
) -> np.ndarray | float:
    """Frequency decoded at local time t: f_r + K * (t_local - t_ref)."""
    return ref.frequency + plan.chirp_rate * (np.asarray(t_local) - t_ref)


def frequency_grid(plan: SweepPlan, g: SbsGainSpec, n_bins: int) -> np.ndarray:
    f_min, f_max = analysis_band(plan, g)
    return np.linspace(f_min, f_max, n_bins, endpoint=False)


def resample_power(f_samples: np.ndarray, power: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Resample mapped power onto a uniform grid; zero outside the mapped span."""
    return np.interp(grid, f_samples, power, left=0.0, right=0.0)


def decode_window(
    window: RealTrace,
    plan: SweepPlan,
    ref: ReferenceSpec,
    g: SbsGainSpec,
    n_bins: int = 1024,
    t_ref: float | None = None,
    guard_fraction: float = 0.1,
) -> SpectrumColumn:
    """Decode one photocurrent window into a spectrum column.

    When t_ref is not supplied it is located from the window itself; a missing
    reference degrades to the nominal mapping and flags the column rather than
    failing.
    """
    uncalibrated = False
    found = np.nan
    if t_ref is None:
        try:
            t_ref = locate_reference(window, plan, ref, guard_fraction)
            found = t_ref
        except ReferenceNotFoundError:
            t_ref = nominal_t_ref(plan, ref, g)
            uncalibrated = True
    else:
        found = t_ref

    rate = window.grid.sample_rate
    t_local = np.arange(window.grid.n_samples) / rate
    power = np.clip(window.samples, 0.0, None)
    f_samples = fttm_map(plan, ref, g, t_local, t_ref)
    grid = frequency_grid(plan, g, n_bins)
    column = resample_power(f_samples, power, grid)

    peak = int(np.argmax(window.samples))
    straddle = peak < 2 or peak >= window.grid.n_samples - 2
    return SpectrumColumn(
        window_index=int(np.floor((window.grid.t0 + plan.period / 2) / plan.period)),
        t_center=window.grid.t0 + plan.period / 2,
        freq_grid=grid,
        power=column,
        t_ref_found=float(found),
        uncalibrated=uncalibrated,
        edge_straddle=straddle,
    )
