"""Artifact writers and readers: spectrogram CSV, PGM images, JSON reports."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import InvalidArgumentError
from .receiver import SpectrumColumn
from .spectrogram import Spectrogram, assemble


def write_spectrogram_csv(spec: Spectrogram, path: str | Path) -> None:
    """Rows are windows in time order; header carries the frequency grid in Hz."""
    with open(path, "w", newline="") as fh:
        fh.write("time_s," + ",".join(f"{f:.10g}" for f in spec.freq_grid) + "\n")
        for col in spec.columns:
            fh.write(f"{col.t_center:.10g}," + ",".join(f"{p:.8e}" for p in col.power) + "\n")


def read_spectrogram_csv(path: str | Path) -> Spectrogram:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if not header or header[0] != "time_s":
            raise InvalidArgumentError(f"{path}: not a spectrogram CSV")
        grid = np.array([float(x) for x in header[1:]])
        rows = np.loadtxt(fh, delimiter=",", ndmin=2)
    if rows.size == 0:
        raise InvalidArgumentError(f"{path}: spectrogram CSV has no rows")
    columns = [
        SpectrumColumn(
            window_index=i,
            t_center=float(row[0]),
            freq_grid=grid,
            power=row[1:],
            t_ref_found=float("nan"),
        )
        for i, row in enumerate(rows)
    ]
    period = float(rows[1, 0] - rows[0, 0]) if len(rows) > 1 else None
    return assemble(columns, window_period=period, metadata={"source": str(path)})


def write_pgm(spec: Spectrogram, path: str | Path, db_floor: float = -40.0) -> None:
    """Binary PGM (P5): rows are frequency bins (lowest at the bottom),
    columns are windows, log-scaled between db_floor and the global peak."""
    matrix = spec.power_matrix()
    p_max = matrix.max()
    if p_max > 0:
        with np.errstate(divide="ignore"):
            db = 10 * np.log10(np.where(matrix > 0, matrix / p_max, 0.0))
        scaled = np.clip((db - db_floor) / (0.0 - db_floor), 0.0, 1.0)
    else:
        scaled = np.zeros_like(matrix)
    pixels = np.round(255 * scaled).astype(np.uint8)
    image = pixels.T[::-1]  # (n_bins, n_windows), top row = highest frequency
    with open(path, "wb") as fh:
        fh.write(f"P5\n{image.shape[1]} {image.shape[0]}\n255\n".encode())
        fh.write(image.tobytes())


def write_truth_overlay(truth_rows, path: str | Path) -> None:
    """One row per (window, true component): window,time_s,freq_hz."""
    with open(path, "w", newline="") as fh:
        fh.write("window,time_s,freq_hz\n")
        for window, t_center, freqs in truth_rows:
            for f in freqs:
                fh.write(f"{window},{t_center:.10g},{f:.10g}\n")


def write_report(report: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")


def write_artifacts(result, out_dir: Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    formats = result.config.output.formats
    written = []
    if "csv" in formats:
        p = out_dir / "spectrogram.csv"
        write_spectrogram_csv(result.spectrogram, p)
        written.append(p)
    if "pgm" in formats:
        p = out_dir / "spectrogram.pgm"
        write_pgm(result.spectrogram, p, result.config.output.db_floor)
        written.append(p)
    if "truth" in formats:
        p = out_dir / "truth_overlay.csv"
        write_truth_overlay(result.truth_rows, p)
        written.append(p)
    if "report" in formats:
        p = out_dir / "report.json"
        write_report(result.report, p)
        written.append(p)
    return written


def write_resolution_curve(curve: dict, out_dir: Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / "resolution_curve.json"
    json_path.write_text(json.dumps(curve, indent=2, sort_keys=True) + "\n")
    csv_path = out_dir / "resolution_curve.csv"
    fields = [
        "period_s",
        "chirp_rate_hz_per_s",
        "gain_fwhm_hz",
        "min_resolvable_sep_hz",
        "pulse_fwhm_s",
        "pulse_fwhm_hz",
    ]
    with open(csv_path, "w", newline="") as fh:
        fh.write(",".join(fields) + "\n")
        for point in curve["points"]:
            cells = ["" if point[k] is None else f"{point[k]:.10g}" for k in fields]
            fh.write(",".join(cells) + "\n")
    return [json_path, csv_path]
