"""End-to-end experiment execution for all fidelity modes."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import outputs
from .config import (
    ExperimentConfig,
    config_digest,
    drive_rate,
    field_rate,
    to_descriptor,
    to_fidelity,
    to_frame,
    to_gain,
    to_receiver,
    to_reference,
    to_sweep_plan,
    updated,
    validate_domain,
    with_period,
)
from .errors import ReferenceNotFoundError
from .frontend import combine_with_reference, default_frame_center, gen_sweep_envelope, modulate_dsb
from .oracle import DigitalStftSpec, compare_spectrograms, digital_stft, smooth_spectrogram
from .receiver import decode_window, locate_reference, nominal_t_ref, photodetect, segment_periods
from .sbs import FidelityMode, analysis_band, analytic_window_response, apply_gain_filter
from .sigkit import RealTrace, TimeGrid, make_time_grid, synthesize, true_instantaneous_frequency
from .spectrogram import Spectrogram, assemble, extract_ridge, measure_resolution
from .utils import worker_count

MODE_ALIASES = {"full": "full_field", "lorentzian": "lorentzian_analytic", "dirac": "dirac"}


@dataclass
class RunResult:
    config: ExperimentConfig
    spectrogram: Spectrogram
    report: dict
    photocurrent_windows: list[RealTrace]
    t_ref_nominal: float
    oracle_spectrogram: Spectrogram | None = None
    truth_rows: list[tuple[int, float, tuple[float, ...]]] = field(default_factory=list)
    artifacts: list[Path] = field(default_factory=list)


def apply_overrides(
    cfg: ExperimentConfig, mode: str | None = None, seed: int | None = None
) -> ExperimentConfig:
    changes: dict = {}
    if mode is not None:
        changes["fidelity"] = MODE_ALIASES.get(mode, mode)
    if seed is not None:
        rx = cfg.receiver.model_copy(update={"seed": seed})
        changes["receiver"] = rx
    return updated(cfg, **changes) if changes else cfg


def _full_field_windows(cfg, plan, ref, gain, rx, record_duration) -> list[RealTrace]:
    grid = make_time_grid(field_rate(cfg), record_duration)
    frame = to_frame(cfg)
    m = combine_with_reference(synthesize(to_descriptor(cfg.sut), grid), ref)
    probe = modulate_dsb(gen_sweep_envelope(plan, grid, frame), m)
    del m
    filtered = apply_gain_filter(probe, gain)
    del probe
    photo = photodetect(filtered, rx)
    del filtered
    return segment_periods(photo, plan, t_start=0.0)


def _analytic_windows(cfg, plan, ref, gain, rx, record_duration, mode) -> list[RealTrace]:
    grid = make_time_grid(drive_rate(cfg), record_duration)
    m = combine_with_reference(synthesize(to_descriptor(cfg.sut), grid), ref)
    m_windows = segment_periods(m, plan, t_start=0.0)

    def respond(indexed):
        w, mw = indexed
        out = analytic_window_response(mw, plan, gain, mode, rx.osc_sample_rate)
        if rx.noise_sigma > 0:
            rng = np.random.default_rng((rx.seed, w))
            noisy = out.samples + rng.normal(0.0, rx.noise_sigma, out.samples.size)
            out = RealTrace(grid=out.grid, samples=noisy)
        return out

    n_workers = min(worker_count(), len(m_windows))
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            return list(pool.map(respond, enumerate(m_windows)))
    return [respond(item) for item in enumerate(m_windows)]


def run_experiment(
    cfg: ExperimentConfig,
    out_dir: str | Path | None = None,
    mode: str | None = None,
    seed: int | None = None,
) -> RunResult:
    """Run the configured chain and decode a spectrogram.

    full_field simulates the optical record end to end; the analytic modes
    predict each window's photocurrent from the windowed drive spectrum. When
    the config requests it, the result also carries the digital-STFT oracle
    comparison, ridge-vs-truth statistics and any written artifact paths.
    """
    t_begin = time.perf_counter()
    cfg = apply_overrides(cfg, mode=mode, seed=seed)
    validate_domain(cfg)
    plan = to_sweep_plan(cfg)
    ref = to_reference(cfg)
    gain = to_gain(cfg)
    rx = to_receiver(cfg)
    fidelity = to_fidelity(cfg)
    record_duration = plan.n_periods * plan.period

    if fidelity is FidelityMode.FULL_FIELD:
        windows = _full_field_windows(cfg, plan, ref, gain, rx, record_duration)
    else:
        windows = _analytic_windows(cfg, plan, ref, gain, rx, record_duration, fidelity)

    nominal = nominal_t_ref(plan, ref, gain)
    located: list[float | None] = []
    for w in windows:
        try:
            located.append(locate_reference(w, plan, ref, cfg.decode.guard_fraction))
        except ReferenceNotFoundError:
            located.append(None)
    found = [t for t in located if t is not None]

    policy = cfg.decode.t_ref_policy
    if policy == "median":
        shared = float(np.median(found)) if found else nominal
        t_refs = [shared] * len(windows)
    elif policy == "nominal":
        t_refs = [nominal] * len(windows)
    else:
        t_refs = [None] * len(windows)

    def decode(indexed):
        w, trace = indexed
        return decode_window(
            trace, plan, ref, gain, cfg.decode.n_bins, t_refs[w], cfg.decode.guard_fraction
        )

    n_workers = min(worker_count(), len(windows))
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            columns = list(pool.map(decode, enumerate(windows)))
    else:
        columns = [decode(item) for item in enumerate(windows)]

    spec = assemble(
        columns,
        window_period=plan.period,
        metadata={"name": cfg.name, "digest": config_digest(cfg), "fidelity": cfg.fidelity},
    )

    desc = to_descriptor(cfg.sut)
    truth_rows = []
    for col in columns:
        freqs = true_instantaneous_frequency(desc, col.t_center, duration=record_duration)
        truth_rows.append((col.window_index, col.t_center, freqs))

    f_min, f_max = analysis_band(plan, gain)
    report: dict = {
        "name": cfg.name,
        "fidelity": cfg.fidelity,
        "digest": config_digest(cfg),
        "derived": {
            "chirp_rate_hz_per_s": plan.chirp_rate,
            "analysis_band_hz": [f_min, f_max],
            "sample_rate_hz": field_rate(cfg) if fidelity is FidelityMode.FULL_FIELD else drive_rate(cfg),
            "n_windows": len(columns),
            "record_duration_s": record_duration,
            "n_bins": cfg.decode.n_bins,
        },
        "reference": {
            "policy": policy,
            "nominal_t_ref_s": nominal,
            "found_fraction": len(found) / len(windows),
            "median_t_ref_s": float(np.median(found)) if found else None,
        },
        "ridge": _ridge_stats(spec, truth_rows, calibration_bands(plan, ref, gain)),
    }

    oracle_spec = None
    if cfg.compute_oracle:
        oracle_spec = smooth_spectrogram(
            compute_oracle_spectrogram(cfg, plan, ref, record_duration), gain
        )
        comp = compare_spectrograms(
            spec,
            oracle_spec,
            freq_tol=gain.fwhm,
            exclude=calibration_bands(plan, ref, gain),
        )
        report["oracle"] = comp.as_dict()

    result = RunResult(
        config=cfg,
        spectrogram=spec,
        report=report,
        photocurrent_windows=windows,
        t_ref_nominal=nominal,
        oracle_spectrogram=oracle_spec,
        truth_rows=truth_rows,
    )
    report["elapsed_s"] = round(time.perf_counter() - t_begin, 3)
    if out_dir is None and cfg.output.dir:
        out_dir = cfg.output.dir
    if out_dir is not None and cfg.output.formats:
        result.artifacts = outputs.write_artifacts(result, Path(out_dir))
    return result


def compute_oracle_spectrogram(cfg, plan, ref, record_duration) -> Spectrogram:
    """Digital STFT of the combined drive signal at the sweep-period window."""
    grid = make_time_grid(drive_rate(cfg), record_duration)
    m = combine_with_reference(synthesize(to_descriptor(cfg.sut), grid), ref)
    return digital_stft(m, DigitalStftSpec(window_len=plan.period))


def calibration_bands(plan, ref, gain) -> list[tuple[float, float]]:
    """Frequency bands owned by the calibration tone, excluded from peak scoring.

    The band around f_r holds the reference line itself; the top of the
    analysis range holds the wrapped leading tail of the next period's
    reference pulse (the pulse straddles the period boundary whenever
    f_r - f_min is smaller than the pulse width).
    """
    f_min, f_max = analysis_band(plan, gain)
    # pulse extent: gain crossing time plus ring-down, mapped to frequency
    width = 2 * gain.fwhm + 3 * plan.chirp_rate / (np.pi * gain.fwhm)
    return [
        (f_min, ref.frequency + width),
        (f_max - width + (ref.frequency - f_min), f_max),
    ]


def ridge_against_truth(
    spec: Spectrogram,
    truth_rows,
    exclude: list[tuple[float, float]] | None = None,
    rel_threshold: float = 0.05,
    interior_only: bool = True,
) -> list[float]:
    """Nearest-peak frequency error for every scoreable (column, component) pair.

    Peaks inside an excluded band (the calibration-tone line and its wrapped
    tail) are dropped, as are true components falling there; the threshold is
    relative to the spectrogram maximum outside the excluded bands.
    """
    from .oracle import _masked_max
    from .spectrogram import column_peaks

    exclude = exclude or []

    def keep(f: float) -> bool:
        return all(not (lo <= f <= hi) for lo, hi in exclude)

    max_components = max((len(r[2]) for r in truth_rows), default=0)
    if max_components == 0:
        return []
    threshold = rel_threshold * _masked_max(spec, exclude)
    errors = []
    lo, hi = (1, len(truth_rows) - 1) if interior_only and len(truth_rows) > 2 else (0, len(truth_rows))
    for i in range(lo, hi):
        _, _, truths = truth_rows[i]
        found = column_peaks(
            spec.columns[i].power, spec.freq_grid, max_components + 1 + 4 * len(exclude), threshold
        )
        peaks = [f for f, _ in found if keep(f)]
        if not peaks:
            continue
        for f_true in truths:
            if keep(f_true):
                errors.append(min(abs(p - f_true) for p in peaks))
    return errors


def _ridge_stats(spec, truth_rows, exclude=None) -> dict | None:
    errors = ridge_against_truth(spec, truth_rows, exclude)
    if not errors:
        return None
    err = np.asarray(errors)
    return {
        "rms_hz": float(np.sqrt(np.mean(err**2))),
        "max_hz": float(err.max()),
        "n_scored": int(err.size),
    }


def resolution_scan(
    cfg: ExperimentConfig,
    periods: list[float] | None = None,
    chirp_rates: list[float] | None = None,
    f_center: float = 2e9,
    dip_db: float = 3.0,
    n_windows: int = 10,
) -> dict:
    """measure_resolution across sweep periods (or chirp rates) at fixed bandwidth.

    Returns the resolution curve sorted by period ascending plus a
    monotonicity verdict (resolution must not degrade as the period grows).
    """
    if (periods is None) == (chirp_rates is None):
        raise ValueError("provide exactly one of periods or chirp_rates")
    bandwidth = cfg.sweep.f2_hz - cfg.sweep.f1_hz
    if chirp_rates is not None:
        periods = [bandwidth / k for k in chirp_rates]
    points = []
    for period in periods:
        cfg_p = with_period(cfg, period)
        rep = measure_resolution(cfg_p, f_center, dip_db=dip_db, n_windows=n_windows)
        points.append(rep.as_dict())
    points.sort(key=lambda p: p["period_s"])
    seps = [np.inf if p["unresolvable"] else p["min_resolvable_sep_hz"] for p in points]
    non_increasing = all(b <= a * (1 + 1e-9) for a, b in zip(seps, seps[1:]))
    return {
        "f_center_hz": f_center,
        "sweep_bandwidth_hz": bandwidth,
        "dip_db": dip_db,
        "points": points,
        "non_increasing_with_period": bool(non_increasing),
    }
