"""Reference digital STFT and analytic smoothed-spectrum cross-checks.

These routines never touch the optical chain; they transform the raw drive
signal directly and exist to validate every fidelity mode against an
independent computation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal

from .errors import InvalidArgumentError
from .frontend import ReferenceSpec, SweepPlan
from .receiver import SpectrumColumn, fttm_map, frequency_grid, resample_power
from .sbs import SbsGainSpec, analysis_band, sample_power_spectrum
from .sigkit import RealTrace
from .spectrogram import Spectrogram, assemble, column_peaks


@dataclass(frozen=True)
class DigitalStftSpec:
    """Rectangular-window STFT parameters; hop defaults to the window length."""

    window_len: float
    hop: float | None = None
    window_shape: str = "rectangular"

    def __post_init__(self):
        if self.window_len <= 0 or (self.hop is not None and self.hop <= 0):
            raise InvalidArgumentError("window_len and hop must be positive")
        if self.window_shape != "rectangular":
            raise InvalidArgumentError("only the rectangular window is supported")


def digital_stft(s: RealTrace, spec: DigitalStftSpec) -> Spectrogram:
    """Magnitude-squared rectangular-window STFT, positive frequencies only."""
    rate = s.grid.sample_rate
    n_win = int(round(spec.window_len * rate))
    hop = spec.hop if spec.hop is not None else spec.window_len
    n_hop = int(round(hop * rate))
    if n_win < 2 or n_win > s.grid.n_samples:
        raise InvalidArgumentError("record shorter than one STFT window")
    bins = np.fft.rfftfreq(n_win, 1 / rate)
    columns = []
    w = 0
    for start in range(0, s.grid.n_samples - n_win + 1, n_hop):
        power = np.abs(np.fft.rfft(s.samples[start : start + n_win])) ** 2
        columns.append(
            SpectrumColumn(
                window_index=w,
                t_center=s.grid.t0 + start / rate + spec.window_len / 2,
                freq_grid=bins,
                power=power,
                t_ref_found=np.nan,
            )
        )
        w += 1
    return assemble(columns, window_period=hop, metadata={"source": "digital_stft"})


def _direct_lorentzian_smooth(bins: np.ndarray, power: np.ndarray, fwhm: float) -> np.ndarray:
    """Truncated-kernel convolution of a one-sided spectrum at bin resolution.

    The grid spacing is never wider than max(bin width, fwhm/20), so the raw
    spectrum enters at full resolution and no spectral mass is skipped; the
    kernel is the unit-sum Lorentzian truncated at +-40 FWHM.
    """
    if bins.size < 2:
        return power.copy()
    step = bins[1] - bins[0]
    half_extent = int(round(40 * fwhm / step))
    if half_extent == 0:
        return power.copy()
    offsets = np.arange(-half_extent, half_extent + 1) * step
    hw = fwhm / 2
    kernel = 1.0 / (1.0 + (offsets / hw) ** 2)
    kernel /= kernel.sum()
    # even extension below DC keeps the convolution exact near f = 0
    pad = min(half_extent, power.size - 1)
    padded = np.concatenate([power[pad:0:-1], power])
    smoothed = signal.fftconvolve(padded, kernel, mode="same")[pad:]
    return smoothed


def smoothed_power_spectrum(windowed_m: RealTrace, g: SbsGainSpec):
    """(|A|^2 * L)(f) evaluated by direct dense-grid convolution.

    Returns a callable of frequency (Hz). The unit-area Lorentzian kernel has
    FWHM equal to the gain linewidth.
    """
    n = windowed_m.grid.n_samples
    rate = windowed_m.grid.sample_rate
    power = np.abs(np.fft.rfft(windowed_m.samples)) ** 2
    bins = np.fft.rfftfreq(n, 1 / rate)
    smoothed = _direct_lorentzian_smooth(bins, power, g.fwhm)

    def evaluate(f):
        return np.interp(f, bins, smoothed)

    return evaluate


def smooth_spectrogram(spec: Spectrogram, g: SbsGainSpec) -> Spectrogram:
    """Gain-linewidth-smoothed copy of a spectrogram, column by column.

    Puts a digital STFT on the same footing as the physically filtered output
    before peak matching; raw rectangular-window ripple is averaged away.
    """
    bins = spec.freq_grid
    columns = []
    for col in spec.columns:
        columns.append(
            SpectrumColumn(
                window_index=col.window_index,
                t_center=col.t_center,
                freq_grid=bins,
                power=_direct_lorentzian_smooth(bins, col.power, g.fwhm),
                t_ref_found=col.t_ref_found,
            )
        )
    meta = dict(spec.metadata)
    meta["smoothed_fwhm_hz"] = g.fwhm
    return assemble(columns, window_period=spec.window_period, metadata=meta)


def project_through_fttm(
    column: SpectrumColumn,
    plan: SweepPlan,
    ref: ReferenceSpec,
    g: SbsGainSpec,
    t_ref: float,
    osc_sample_rate: float,
    n_bins: int,
) -> np.ndarray:
    """Resample a digital-STFT column exactly the way the receiver decodes.

    The column's power is read along the mapping line at the scope sampling
    instants and then interpolated onto the uniform analysis grid, mirroring
    decode_window sample for sample.
    """
    n_out = int(round(plan.period * osc_sample_rate))
    t_local = np.arange(n_out) / osc_sample_rate
    f_min, _ = analysis_band(plan, g)
    current = sample_power_spectrum(
        f_min + plan.chirp_rate * t_local, column.freq_grid, column.power
    )
    f_samples = fttm_map(plan, ref, g, t_local, t_ref)
    return resample_power(f_samples, np.clip(current, 0.0, None), frequency_grid(plan, g, n_bins))


@dataclass(frozen=True)
class ComparisonReport:
    matched_peak_fraction: float
    max_ridge_deviation: float

    def as_dict(self) -> dict:
        dev = self.max_ridge_deviation
        return {
            "matched_peak_fraction": self.matched_peak_fraction,
            "max_ridge_deviation_hz": None if np.isnan(dev) else dev,
        }


def _masked_max(spec: Spectrogram, exclude) -> float:
    keep = np.ones(spec.freq_grid.size, dtype=bool)
    for lo, hi in exclude:
        keep &= (spec.freq_grid < lo) | (spec.freq_grid > hi)
    if not keep.any():
        return 0.0
    return float(spec.power_matrix()[:, keep].max())


def compare_spectrograms(
    a: Spectrogram,
    b: Spectrogram,
    freq_tol: float,
    n_peaks: int = 3,
    rel_threshold: float = 0.1,
    exclude: list[tuple[float, float]] | None = None,
) -> ComparisonReport:
    """Greedy per-column matching of top peaks between two spectrograms.

    matched_peak_fraction counts matched pairs against the larger peak count
    of each column; max_ridge_deviation is the worst matched-pair frequency
    offset (NaN when nothing matched). Peaks inside any `exclude` band (for
    instance the calibration-tone line) are dropped from both sides.
    """
    if a.n_windows != b.n_windows:
        raise InvalidArgumentError("spectrograms must have the same number of columns")
    exclude = exclude or []

    def keep(f: float) -> bool:
        return all(not (lo <= f <= hi) for lo, hi in exclude)

    thr_a = rel_threshold * _masked_max(a, exclude)
    thr_b = rel_threshold * _masked_max(b, exclude)
    matched = 0
    total = 0
    worst = np.nan
    pool = n_peaks + 4 * len(exclude)
    for col_a, col_b in zip(a.columns, b.columns):
        peaks_a = [p for p in column_peaks(col_a.power, col_a.freq_grid, pool, thr_a) if keep(p[0])][:n_peaks]
        peaks_b = [p for p in column_peaks(col_b.power, col_b.freq_grid, pool, thr_b) if keep(p[0])][:n_peaks]
        if not peaks_a and not peaks_b:
            continue
        total += max(len(peaks_a), len(peaks_b))
        pairs = sorted(
            (abs(fa - fb), i, j)
            for i, (fa, _) in enumerate(peaks_a)
            for j, (fb, _) in enumerate(peaks_b)
            if abs(fa - fb) <= freq_tol
        )
        used_a: set[int] = set()
        used_b: set[int] = set()
        for dev, i, j in pairs:
            if i in used_a or j in used_b:
                continue
            used_a.add(i)
            used_b.add(j)
            matched += 1
            worst = dev if np.isnan(worst) else max(worst, dev)
    fraction = matched / total if total else 1.0
    return ComparisonReport(matched_peak_fraction=fraction, max_ridge_deviation=float(worst))
