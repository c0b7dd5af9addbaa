"""FastAPI application exposing simulate / preset / resolution-scan / compare."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import outputs, presets
from ..config import ExperimentConfig
from ..errors import BstftError, ConfigError, InvalidArgumentError
from ..oracle import compare_spectrograms
from ..pipeline import apply_overrides, resolution_scan, run_experiment
from .models import (
    CompareRequest,
    CompareResponse,
    HealthResponse,
    PresetListResponse,
    PresetResponse,
    ResolutionScanRequest,
    ResolutionScanResponse,
    SimulateRequest,
    SimulateResponse,
)


def create_app() -> FastAPI:
    app = FastAPI(title="bstft", description="Swept-carrier Brillouin STFT simulator")

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse()

    @app.get("/presets", response_model=PresetListResponse)
    def list_presets() -> PresetListResponse:
        return PresetListResponse(presets=presets.preset_names())

    @app.get("/presets/{name}", response_model=PresetResponse)
    def get_preset(name: str) -> PresetResponse:
        try:
            return PresetResponse(name=name, config=presets.preset(name))
        except ConfigError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc

    @app.post("/simulate", response_model=SimulateResponse)
    def simulate(req: SimulateRequest) -> SimulateResponse:
        try:
            cfg = apply_overrides(req.config, mode=req.mode, seed=req.seed)
        except (ConfigError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        try:
            result = run_experiment(cfg, out_dir=req.out_dir)
        except BstftError as exc:
            raise HTTPException(status_code=500, detail=str(exc)) from exc
        return SimulateResponse(report=result.report, artifacts=[str(p) for p in result.artifacts])

    @app.post("/resolution-scan", response_model=ResolutionScanResponse)
    def scan(req: ResolutionScanRequest) -> ResolutionScanResponse:
        if (req.periods_s is None) == (req.chirp_rates_hz_per_s is None):
            raise HTTPException(
                status_code=422, detail="provide exactly one of periods_s or chirp_rates_hz_per_s"
            )
        try:
            curve = resolution_scan(
                req.config,
                periods=req.periods_s,
                chirp_rates=req.chirp_rates_hz_per_s,
                f_center=req.f_center_hz,
            )
        except ConfigError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        except BstftError as exc:
            raise HTTPException(status_code=500, detail=str(exc)) from exc
        artifacts = []
        if req.out_dir:
            artifacts = [str(p) for p in outputs.write_resolution_curve(curve, req.out_dir)]
        return ResolutionScanResponse(curve=curve, artifacts=artifacts)

    @app.post("/compare", response_model=CompareResponse)
    def compare(req: CompareRequest) -> CompareResponse:
        try:
            a = outputs.read_spectrogram_csv(req.a_path)
            b = outputs.read_spectrogram_csv(req.b_path)
            report = compare_spectrograms(a, b, freq_tol=req.freq_tol_hz, n_peaks=req.n_peaks)
        except (FileNotFoundError, InvalidArgumentError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        data = report.as_dict()
        return CompareResponse(
            matched_peak_fraction=data["matched_peak_fraction"],
            max_ridge_deviation_hz=data["max_ridge_deviation_hz"],
        )

    return app


app = create_app()
