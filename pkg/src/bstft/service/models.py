"""Request/response schemas for the HTTP service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict

from ..config import ExperimentConfig

ModeAlias = Literal["full", "lorentzian", "dirac"]


class SimulateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: ExperimentConfig
    mode: Optional[ModeAlias] = None
    out_dir: Optional[str] = None
    seed: Optional[int] = None


class SimulateResponse(BaseModel):
    report: dict
    artifacts: list[str]


class PresetListResponse(BaseModel):
    presets: list[str]


class PresetResponse(BaseModel):
    name: str
    config: ExperimentConfig


class ResolutionScanRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: ExperimentConfig
    periods_s: Optional[list[float]] = None
    chirp_rates_hz_per_s: Optional[list[float]] = None
    f_center_hz: float = 2e9
    out_dir: Optional[str] = None


class ResolutionScanResponse(BaseModel):
    curve: dict
    artifacts: list[str]


class CompareRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    a_path: str
    b_path: str
    freq_tol_hz: float
    n_peaks: int = 3


class CompareResponse(BaseModel):
    matched_peak_fraction: float
    max_ridge_deviation_hz: Optional[float]


class HealthResponse(BaseModel):
    status: str = "ok"
