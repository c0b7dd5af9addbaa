"""Multi-fidelity simulator of a swept-carrier Brillouin-gain STFT analyzer."""

from .config import ExperimentConfig, load_config, parse_config, save_config
from .errors import (
    AliasingError,
    BstftError,
    ConfigError,
    FrameError,
    InvalidArgumentError,
    MeasurementFailedError,
    ReferenceNotFoundError,
)
from .frontend import FrameSpec, ReferenceSpec, SweepPlan, make_sweep_plan
from .oracle import DigitalStftSpec, compare_spectrograms, digital_stft
from .pipeline import RunResult, resolution_scan, run_experiment
from .presets import preset, preset_names
from .receiver import ReceiverSpec, SpectrumColumn
from .sbs import FidelityMode, SbsGainSpec, gain_profile
from .sigkit import (
    ComplexTrace,
    RealTrace,
    TimeGrid,
    make_time_grid,
    read_trace,
    synthesize,
    true_instantaneous_frequency,
    write_trace,
)
from .spectrogram import (
    ResolutionReport,
    Spectrogram,
    extract_ridge,
    measure_resolution,
    pulse_fwhm,
    two_tone_resolved,
)

__version__ = "0.1.0"

__all__ = [
    "AliasingError",
    "BstftError",
    "ComplexTrace",
    "ConfigError",
    "DigitalStftSpec",
    "ExperimentConfig",
    "FidelityMode",
    "FrameError",
    "FrameSpec",
    "InvalidArgumentError",
    "MeasurementFailedError",
    "RealTrace",
    "ReceiverSpec",
    "ReferenceNotFoundError",
    "ReferenceSpec",
    "ResolutionReport",
    "RunResult",
    "SbsGainSpec",
    "Spectrogram",
    "SpectrumColumn",
    "SweepPlan",
    "TimeGrid",
    "compare_spectrograms",
    "digital_stft",
    "extract_ridge",
    "gain_profile",
    "load_config",
    "make_sweep_plan",
    "make_time_grid",
    "measure_resolution",
    "parse_config",
    "preset",
    "preset_names",
    "pulse_fwhm",
    "read_trace",
    "resolution_scan",
    "run_experiment",
    "save_config",
    "synthesize",
    "true_instantaneous_frequency",
    "two_tone_resolved",
    "write_trace",
]
