"""Experiment configuration: JSON schema, validation and domain conversion.

Configs are strict pydantic models (unknown keys are errors) so typos in
physics parameters fail loudly. Cross-module invariants -- reference
placement, Nyquist margins, scope-rate divisibility -- are re-checked at load.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from . import sigkit
from .errors import ConfigError
from .frontend import FrameSpec, ReferenceSpec, SweepPlan, check_reference_placement
from .receiver import ReceiverSpec
from .sbs import FidelityMode, SbsGainSpec


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


# ---------------------------------------------------------------------------
# Signal-under-test variants
# ---------------------------------------------------------------------------


class ToneCfg(StrictModel):
    variant: Literal["tone"] = "tone"
    frequency_hz: float
    amplitude: float = 1.0
    phase_rad: float = 0.0
    t_start_s: Optional[float] = None
    t_stop_s: Optional[float] = None


class MultitoneCfg(StrictModel):
    variant: Literal["multitone"] = "multitone"
    frequencies_hz: list[float]
    amplitudes: Optional[list[float]] = None
    phases_rad: Optional[list[float]] = None


class LfmCfg(StrictModel):
    variant: Literal["lfm"] = "lfm"
    f_start_hz: float
    f_stop_hz: float
    duration_s: float
    t_start_s: float = 0.0
    amplitude: float = 1.0


class NlfmProfileCfg(StrictModel):
    variant: Literal["nlfm_profile"] = "nlfm_profile"
    times_s: list[float]
    freqs_hz: list[float]
    amplitude: float = 1.0


class FreqHopCfg(StrictModel):
    variant: Literal["freq_hop"] = "freq_hop"
    dwell_s: float
    frequencies_hz: list[float]
    t_start_s: float = 0.0
    amplitude: float = 1.0
    phase_continuous: bool = True


class StepFreqCfg(StrictModel):
    variant: Literal["step_freq"] = "step_freq"
    f_start_hz: float
    f_step_hz: float
    n_steps: int
    dwell_s: float
    t_start_s: float = 0.0
    amplitude: float = 1.0
    phase_continuous: bool = True


class BurstOnLfmCfg(StrictModel):
    variant: Literal["burst_on_lfm"] = "burst_on_lfm"
    lfm: LfmCfg
    burst_frequency_hz: float
    burst_t_start_s: float
    burst_duration_s: float
    burst_amplitude: float


class MixedWithLoCfg(StrictModel):
    variant: Literal["mixed_with_lo"] = "mixed_with_lo"
    inner: "SutCfg"
    lo_hz: float


class SumCfg(StrictModel):
    variant: Literal["sum"] = "sum"
    components: list["SutCfg"]


SutCfg = Annotated[
    Union[
        ToneCfg,
        MultitoneCfg,
        LfmCfg,
        NlfmProfileCfg,
        FreqHopCfg,
        StepFreqCfg,
        BurstOnLfmCfg,
        MixedWithLoCfg,
        SumCfg,
    ],
    Field(discriminator="variant"),
]

MixedWithLoCfg.model_rebuild()
SumCfg.model_rebuild()


def to_descriptor(cfg) -> sigkit.SutDescriptor:
    """Convert a SUT config model to its synthesis descriptor."""
    if isinstance(cfg, ToneCfg):
        return sigkit.Tone(cfg.frequency_hz, cfg.amplitude, cfg.phase_rad, cfg.t_start_s, cfg.t_stop_s)
    if isinstance(cfg, MultitoneCfg):
        return sigkit.Multitone(
            tuple(cfg.frequencies_hz),
            tuple(cfg.amplitudes) if cfg.amplitudes is not None else None,
            tuple(cfg.phases_rad) if cfg.phases_rad is not None else None,
        )
    if isinstance(cfg, LfmCfg):
        return sigkit.Lfm(cfg.f_start_hz, cfg.f_stop_hz, cfg.duration_s, cfg.t_start_s, cfg.amplitude)
    if isinstance(cfg, NlfmProfileCfg):
        return sigkit.NlfmProfile(tuple(cfg.times_s), tuple(cfg.freqs_hz), cfg.amplitude)
    if isinstance(cfg, FreqHopCfg):
        return sigkit.FreqHop(
            cfg.dwell_s, tuple(cfg.frequencies_hz), cfg.t_start_s, cfg.amplitude, cfg.phase_continuous
        )
    if isinstance(cfg, StepFreqCfg):
        return sigkit.StepFreq(
            cfg.f_start_hz, cfg.f_step_hz, cfg.n_steps, cfg.dwell_s,
            cfg.t_start_s, cfg.amplitude, cfg.phase_continuous,
        )
    if isinstance(cfg, BurstOnLfmCfg):
        return sigkit.BurstOnLfm(
            to_descriptor(cfg.lfm), cfg.burst_frequency_hz, cfg.burst_t_start_s,
            cfg.burst_duration_s, cfg.burst_amplitude,
        )
    if isinstance(cfg, MixedWithLoCfg):
        return sigkit.MixedWithLo(to_descriptor(cfg.inner), cfg.lo_hz)
    if isinstance(cfg, SumCfg):
        return sigkit.SumSignal(tuple(to_descriptor(c) for c in cfg.components))
    raise ConfigError(f"unknown SUT variant {cfg!r}")


# ---------------------------------------------------------------------------
# Experiment sections
# ---------------------------------------------------------------------------


class SweepCfg(StrictModel):
    f1_hz: float
    f2_hz: float
    period_s: float


class ReferenceCfg(StrictModel):
    frequency_hz: float = 10e6
    amplitude: float = 1.0


class GainCfg(StrictModel):
    brillouin_shift_hz: float = 10.8e9
    fwhm_hz: float = 30e6
    peak_gain: float = 5.0
    pump_offset_hz: float = 0.0
    shape: Literal["linear_lorentzian", "exponential_small_signal"] = "linear_lorentzian"


class ReceiverCfg(StrictModel):
    pd_bandwidth_hz: float = 500e6
    osc_sample_rate_hz: float = 2e9
    noise_sigma: float = 0.0
    seed: int = 0


class FrameCfg(StrictModel):
    center_hz: Optional[float] = None
    sample_rate_hz: Optional[float] = None


class DecodeCfg(StrictModel):
    n_bins: int = 1024
    guard_fraction: float = 0.1
    t_ref_policy: Literal["per_window", "median", "nominal"] = "per_window"


class OutputCfg(StrictModel):
    dir: Optional[str] = None
    formats: list[Literal["csv", "pgm", "report", "truth"]] = Field(
        default_factory=lambda: ["csv", "pgm", "report", "truth"]
    )
    db_floor: float = -40.0


class ExperimentConfig(StrictModel):
    name: str = ""
    sut: SutCfg
    duration_s: float
    sweep: SweepCfg
    reference: ReferenceCfg = ReferenceCfg()
    gain: GainCfg = GainCfg()
    receiver: ReceiverCfg = ReceiverCfg()
    fidelity: Literal["full_field", "lorentzian_analytic", "dirac"] = "full_field"
    frame: FrameCfg = FrameCfg()
    decode: DecodeCfg = DecodeCfg()
    output: OutputCfg = OutputCfg()
    compute_oracle: bool = True

    @model_validator(mode="after")
    def _cross_checks(self):
        s = self.sweep
        if not (s.f2_hz > s.f1_hz > 0):
            raise ValueError("sweep requires f2 > f1 > 0")
        if s.period_s <= 0:
            raise ValueError("sweep period must be positive")
        if self.duration_s < s.period_s:
            raise ValueError("duration must cover at least one sweep period")
        chirp = (s.f2_hz - s.f1_hz) / s.period_s
        f_min = s.f1_hz - self.gain.brillouin_shift_hz + self.gain.pump_offset_hz
        if f_min < 0:
            raise ValueError("analysis range start f1 - f_SBS must be >= 0")
        gap = self.reference.frequency_hz - f_min
        guard = self.decode.guard_fraction
        if not (0 < gap < chirp * guard * s.period_s):
            raise ValueError(
                "reference must map into the guard interval: "
                f"f_r - f_min = {gap:.4e} Hz not in (0, {chirp * guard * s.period_s:.4e})"
            )
        rx = self.receiver
        if rx.pd_bandwidth_hz > rx.osc_sample_rate_hz / 2:
            raise ValueError("pd_bandwidth must not exceed half the scope sample rate")
        n_per = s.period_s * rx.osc_sample_rate_hz
        if abs(n_per - round(n_per)) > 1e-6:
            raise ValueError("sweep period must be an integer number of scope samples")
        if self.decode.n_bins < 8:
            raise ValueError("n_bins must be at least 8")
        try:
            desc = to_descriptor(self.sut)
            sigkit.validate_descriptor(desc, duration=self.duration_s)
        except sigkit.InvalidArgumentError as exc:
            raise ValueError(str(exc)) from exc
        f_max = max(sigkit.max_frequency(desc), self.reference.frequency_hz)
        needed = required_field_rate(self)
        fr = self.frame.sample_rate_hz
        if fr is not None:
            if fr < needed:
                raise ValueError(
                    f"frame sample_rate override {fr:.3e} Hz below required {needed:.3e} Hz"
                )
            ratio = fr / rx.osc_sample_rate_hz
            if abs(ratio - round(ratio)) > 1e-9:
                raise ValueError("frame sample rate must be a multiple of the scope rate")
        return self


def required_field_rate(cfg: ExperimentConfig) -> float:
    """Minimum full-field envelope rate: 1.25 * (sweep bandwidth + 2 * f_max)."""
    f_max = max(sigkit.max_frequency(to_descriptor(cfg.sut)), cfg.reference.frequency_hz)
    return 1.25 * (cfg.sweep.f2_hz - cfg.sweep.f1_hz + 2 * f_max)


def field_rate(cfg: ExperimentConfig) -> float:
    """Actual full-field rate: the override, or the smallest scope-rate multiple
    covering the required band."""
    if cfg.frame.sample_rate_hz is not None:
        return cfg.frame.sample_rate_hz
    osc = cfg.receiver.osc_sample_rate_hz
    return osc * math.ceil(required_field_rate(cfg) / osc)


def drive_rate(cfg: ExperimentConfig) -> float:
    """Real-signal rate for analytic modes and the digital oracle (>= 2.5 f_max)."""
    f_max = max(sigkit.max_frequency(to_descriptor(cfg.sut)), cfg.reference.frequency_hz)
    osc = cfg.receiver.osc_sample_rate_hz
    return osc * math.ceil(2.5 * f_max / osc)


# ---------------------------------------------------------------------------
# Domain conversion
# ---------------------------------------------------------------------------


def to_sweep_plan(cfg: ExperimentConfig) -> SweepPlan:
    n = int(math.floor(cfg.duration_s / cfg.sweep.period_s + 1e-9))
    return SweepPlan(cfg.sweep.f1_hz, cfg.sweep.f2_hz, cfg.sweep.period_s, max(n, 1))


def to_reference(cfg: ExperimentConfig) -> ReferenceSpec:
    return ReferenceSpec(cfg.reference.frequency_hz, cfg.reference.amplitude)


def to_gain(cfg: ExperimentConfig) -> SbsGainSpec:
    return SbsGainSpec(
        brillouin_shift=cfg.gain.brillouin_shift_hz,
        fwhm=cfg.gain.fwhm_hz,
        peak_gain=cfg.gain.peak_gain,
        pump_offset=cfg.gain.pump_offset_hz,
        shape_mode=cfg.gain.shape,
    )


def to_receiver(cfg: ExperimentConfig) -> ReceiverSpec:
    return ReceiverSpec(
        pd_bandwidth=cfg.receiver.pd_bandwidth_hz,
        osc_sample_rate=cfg.receiver.osc_sample_rate_hz,
        noise_sigma=cfg.receiver.noise_sigma,
        seed=cfg.receiver.seed,
    )


def to_frame(cfg: ExperimentConfig) -> FrameSpec:
    center = cfg.frame.center_hz
    if center is None:
        center = -(cfg.sweep.f1_hz + cfg.sweep.f2_hz) / 2
    return FrameSpec(frame_center=center)


def to_fidelity(cfg: ExperimentConfig) -> FidelityMode:
    return FidelityMode(cfg.fidelity)


def validate_domain(cfg: ExperimentConfig) -> None:
    """Run the frontend placement check on the converted domain objects."""
    check_reference_placement(
        to_sweep_plan(cfg), to_reference(cfg), cfg.gain.brillouin_shift_hz, cfg.decode.guard_fraction
    )


# ---------------------------------------------------------------------------
# Loading / saving
# ---------------------------------------------------------------------------


def _line_hint(text: str, loc: tuple) -> str:
    keys = [str(p) for p in loc if not str(p).isdigit()]
    if not keys:
        return ""
    needle = f'"{keys[-1]}"'
    for lineno, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return f" (near line {lineno})"
    return ""


def parse_config(data: dict, source_text: str = "") -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        msgs = []
        for err in exc.errors():
            path = ".".join(str(p) for p in err["loc"]) or "<root>"
            msgs.append(f"{path}: {err['msg']}{_line_hint(source_text, err['loc'])}")
        raise ConfigError("invalid experiment config:\n  " + "\n  ".join(msgs)) from exc


def load_config(path: str | Path) -> ExperimentConfig:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return parse_config(data, source_text=text)


def save_config(cfg: ExperimentConfig, path: str | Path) -> None:
    Path(path).write_text(config_json(cfg))


def config_json(cfg: ExperimentConfig) -> str:
    return json.dumps(cfg.model_dump(), indent=2, sort_keys=True)


def config_digest(cfg: ExperimentConfig) -> str:
    import hashlib

    return hashlib.sha256(config_json(cfg).encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# Derived configs for resolution studies
# ---------------------------------------------------------------------------


def updated(base: ExperimentConfig, **changes) -> ExperimentConfig:
    """Clone a config with field replacements, re-running full validation."""
    data = base.model_dump()
    data.update({k: (v.model_dump() if isinstance(v, BaseModel) else v) for k, v in changes.items()})
    return ExperimentConfig.model_validate(data)


def two_tone_config(
    base: ExperimentConfig, f_center: float, delta: float | None, n_windows: int
) -> ExperimentConfig:
    """Clone a config with a tone pair (or single tone when delta is None) as SUT.

    The record is trimmed to n_windows sweep periods and file outputs plus the
    oracle comparison are disabled; everything else is inherited.
    """
    if delta is None:
        sut = ToneCfg(frequency_hz=f_center)
    else:
        sut = MultitoneCfg(frequencies_hz=[f_center, f_center + delta])
    return updated(
        base,
        sut=sut,
        duration_s=n_windows * base.sweep.period_s,
        output=OutputCfg(formats=[]),
        compute_oracle=False,
        name=base.name + "-twotone" if base.name else "twotone",
    )


def with_period(base: ExperimentConfig, period_s: float) -> ExperimentConfig:
    """Clone a config with a new sweep period, snapped to whole scope samples."""
    osc = base.receiver.osc_sample_rate_hz
    snapped = round(period_s * osc) / osc
    sweep = SweepCfg(f1_hz=base.sweep.f1_hz, f2_hz=base.sweep.f2_hz, period_s=snapped)
    return updated(base, sweep=sweep, duration_s=max(base.duration_s, snapped))
