"""Spectrogram assembly, ridge extraction and resolution measurement."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, MeasurementFailedError
from .receiver import SpectrumColumn
from .sigkit import RealTrace


@dataclass(frozen=True)
class Spectrogram:
    columns: tuple[SpectrumColumn, ...]
    freq_grid: np.ndarray
    window_period: float
    metadata: dict = field(default_factory=dict)

    @property
    def n_windows(self) -> int:
        return len(self.columns)

    def power_matrix(self) -> np.ndarray:
        """(n_windows, n_bins) power array, rows in time order."""
        return np.stack([c.power for c in self.columns])

    def times(self) -> np.ndarray:
        return np.array([c.t_center for c in self.columns])


@dataclass(frozen=True)
class ResolutionReport:
    chirp_rate: float
    period: float
    gain_fwhm: float
    min_resolvable_sep: float
    pulse_fwhm_time: float
    pulse_fwhm_freq: float

    def as_dict(self) -> dict:
        def finite(x):
            return None if not np.isfinite(x) else x

        return {
            "chirp_rate_hz_per_s": self.chirp_rate,
            "period_s": self.period,
            "gain_fwhm_hz": self.gain_fwhm,
            "min_resolvable_sep_hz": finite(self.min_resolvable_sep),
            "unresolvable": bool(np.isinf(self.min_resolvable_sep)),
            "pulse_fwhm_s": finite(self.pulse_fwhm_time),
            "pulse_fwhm_hz": finite(self.pulse_fwhm_freq),
        }


def assemble(
    columns, window_period: float | None = None, metadata: dict | None = None
) -> Spectrogram:
    """Stack decoded columns into a time-frequency matrix (time-ordered)."""
    columns = tuple(columns)
    if not columns:
        raise InvalidArgumentError("cannot assemble an empty spectrogram")
    grid = columns[0].freq_grid
    for c in columns[1:]:
        if c.freq_grid.shape != grid.shape or not np.array_equal(c.freq_grid, grid):
            raise InvalidArgumentError("columns must share a frequency grid")
    t = np.array([c.t_center for c in columns])
    if len(t) > 1:
        steps = np.diff(t)
        if np.any(steps <= 0):
            raise InvalidArgumentError("columns out of chronological order")
        period = window_period if window_period is not None else float(steps[0])
        if np.any(np.abs(steps - period) > 1e-6 * period):
            raise InvalidArgumentError("column spacing must equal the window period")
    else:
        period = window_period if window_period is not None else 0.0
    meta = dict(metadata or {})
    flagged = [c.window_index for c in columns if c.uncalibrated]
    if flagged:
        meta.setdefault("uncalibrated_windows", flagged)
    return Spectrogram(columns=columns, freq_grid=grid, window_period=period, metadata=meta)


def column_peaks(
    power: np.ndarray,
    freq_grid: np.ndarray,
    n_peaks: int,
    threshold: float,
) -> list[tuple[float, float]]:
    """Up to n_peaks (frequency, power) local maxima above threshold, strongest first.

    Peak positions are refined by 3-point parabolic interpolation.
    """
    if power.size < 3:
        return []
    inner = power[1:-1]
    idx = np.where((inner >= power[:-2]) & (inner > power[2:]) & (inner >= threshold))[0] + 1
    if idx.size == 0:
        return []
    order = idx[np.argsort(power[idx])[::-1][:n_peaks]]
    df = freq_grid[1] - freq_grid[0]
    out = []
    for k in order:
        denom = power[k - 1] - 2 * power[k] + power[k + 1]
        shift = 0.5 * (power[k - 1] - power[k + 1]) / denom if denom != 0 else 0.0
        out.append((float(freq_grid[k] + shift * df), float(power[k])))
    return out


def extract_ridge(spec: Spectrogram, n_peaks: int = 1, rel_threshold: float = 0.1) -> list[list[float]]:
    """Per-column peak frequencies (strongest first), thresholded at a fraction
    of the spectrogram-wide maximum; columns without peaks yield empty lists."""
    if n_peaks < 1:
        raise InvalidArgumentError("n_peaks must be at least 1")
    matrix = spec.power_matrix()
    threshold = rel_threshold * matrix.max()
    return [
        [f for f, _ in column_peaks(row, spec.freq_grid, n_peaks, threshold)] for row in matrix
    ]


def two_tone_resolved(
    column: SpectrumColumn,
    f_a: float,
    f_b: float,
    dip_db: float = 3.0,
    search_halfwidth: float | None = None,
) -> bool:
    """True when distinct peaks appear near both tones with a dip_db valley between.

    search_halfwidth bounds the peak search around each tone; it defaults to
    half the tone separation (callers normally pass the gain FWHM).
    """
    if f_a == f_b:
        raise InvalidArgumentError("two_tone_resolved requires distinct tones")
    if f_a > f_b:
        f_a, f_b = f_b, f_a
    grid = column.freq_grid
    if not (grid[0] <= f_a <= grid[-1] and grid[0] <= f_b <= grid[-1]):
        raise InvalidArgumentError("both tones must lie inside the column grid")
    hw = search_halfwidth if search_halfwidth is not None else (f_b - f_a) / 2

    def peak_near(f0: float) -> int | None:
        sel = np.where((grid >= f0 - hw) & (grid <= f0 + hw))[0]
        if sel.size < 3:
            return None
        found = column_peaks(column.power[sel], grid[sel], 1, 0.0)
        if not found:
            return None
        return int(sel[0] + np.argmin(np.abs(grid[sel] - found[0][0])))

    ka, kb = peak_near(f_a), peak_near(f_b)
    if ka is None or kb is None or ka == kb:
        return False
    lo, hi = sorted((ka, kb))
    if hi - lo < 2:
        return False
    dip = column.power[lo + 1 : hi].min()
    lower_peak = min(column.power[ka], column.power[kb])
    return bool(dip <= lower_peak * 10 ** (-dip_db / 10))


def pulse_fwhm(window: RealTrace, around: float, search_halfwidth: float | None = None) -> float:
    """Full width at half maximum of the pulse near `around` (window-local time).

    Half-max crossings are located by linear interpolation; raises
    MeasurementFailedError when either crossing is missing.
    """
    rate = window.grid.sample_rate
    t = np.arange(window.grid.n_samples) / rate
    hw = search_halfwidth if search_halfwidth is not None else window.grid.duration / 10
    sel = np.where(np.abs(t - around) <= hw)[0]
    if sel.size == 0:
        raise MeasurementFailedError("no samples near the requested pulse position")
    k = int(sel[np.argmax(window.samples[sel])])
    peak = window.samples[k]
    if peak <= 0:
        raise MeasurementFailedError("no pulse found")
    half = peak / 2
    x = window.samples

    left = k
    while left > 0 and x[left - 1] >= half:
        left -= 1
    if left == 0 and x[0] >= half:
        raise MeasurementFailedError("pulse clipped at window start")
    t_left = t[left] - (x[left] - half) / (x[left] - x[left - 1]) / rate

    right = k
    while right < x.size - 1 and x[right + 1] >= half:
        right += 1
    if right == x.size - 1 and x[right] >= half:
        raise MeasurementFailedError("pulse clipped at window end")
    t_right = t[right] + (x[right] - half) / (x[right] - x[right + 1]) / rate
    return float(t_right - t_left)


def measure_resolution(
    cfg,
    f_center: float,
    dip_db: float = 3.0,
    n_windows: int = 10,
    resolved_fraction: float = 0.9,
) -> ResolutionReport:
    """Bisect the smallest two-tone separation the configured system resolves.

    Two tones at f_center and f_center + delta are simulated end to end; a
    separation counts as resolved when the dip criterion holds in at least
    `resolved_fraction` of the decoded columns. The search runs between one
    frequency bin and a quarter of the analysis span, to one-bin tolerance.
    The report also carries the single-tone pulse width and its frequency
    image K * FWHM_t.
    """
    from .config import two_tone_config
    from .pipeline import run_experiment

    base = two_tone_config(cfg, f_center, 0.0, n_windows)
    plan_period = base.sweep.period_s
    chirp = (base.sweep.f2_hz - base.sweep.f1_hz) / plan_period
    span = chirp * plan_period
    bin_width = span / base.decode.n_bins
    fwhm = base.gain.fwhm_hz

    def resolved_at(delta: float) -> bool:
        run = run_experiment(two_tone_config(cfg, f_center, delta, n_windows))
        votes = [
            two_tone_resolved(c, f_center, f_center + delta, dip_db, search_halfwidth=fwhm)
            for c in run.spectrogram.columns
        ]
        return bool(np.mean(votes) >= resolved_fraction)

    lo, hi = bin_width, span / 4
    if not resolved_at(hi):
        min_sep = np.inf
    else:
        while hi - lo > bin_width:
            mid = 0.5 * (lo + hi)
            if resolved_at(mid):
                hi = mid
            else:
                lo = mid
        min_sep = hi

    single = run_experiment(two_tone_config(cfg, f_center, None, n_windows))
    widths = []
    for w in single.photocurrent_windows[1:-1] or single.photocurrent_windows:
        expected = single.t_ref_nominal + (f_center - base.reference.frequency_hz) / chirp
        try:
            widths.append(pulse_fwhm(w, expected, search_halfwidth=plan_period / 4))
        except MeasurementFailedError:
            continue
    fwhm_t = float(np.median(widths)) if widths else float("nan")
    return ResolutionReport(
        chirp_rate=chirp,
        period=plan_period,
        gain_fwhm=fwhm,
        min_resolvable_sep=float(min_sep),
        pulse_fwhm_time=fwhm_t,
        pulse_fwhm_freq=chirp * fwhm_t,
    )
