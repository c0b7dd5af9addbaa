"""Signal-under-test synthesis on uniform time grids.

All waveforms are generated as real-valued voltage traces. Each descriptor
also exposes its analytic instantaneous frequency so decoded spectrograms can
be scored against ground truth.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .errors import AliasingError, InvalidArgumentError

_BSTF_MAGIC = b"BSTF"
_BSTF_VERSION = 1
_BSTF_HEADER = struct.Struct("<4sBBdQd")


@dataclass(frozen=True)
class TimeGrid:
    """Uniform sampling grid: n_samples points spaced 1/sample_rate from t0."""

    sample_rate: float
    n_samples: int
    t0: float = 0.0

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise InvalidArgumentError("sample_rate must be positive")
        if self.n_samples < 1:
            raise InvalidArgumentError("n_samples must be at least 1")

    @property
    def duration(self) -> float:
        return self.n_samples / self.sample_rate

    @property
    def dt(self) -> float:
        return 1.0 / self.sample_rate

    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.n_samples) / self.sample_rate


def make_time_grid(sample_rate: float, duration: float) -> TimeGrid:
    """Build a grid of round(duration * sample_rate) samples starting at t=0."""
    if sample_rate <= 0 or duration <= 0:
        raise InvalidArgumentError("sample_rate and duration must be positive")
    return TimeGrid(sample_rate=sample_rate, n_samples=int(round(duration * sample_rate)))


def _as_locked(samples: np.ndarray, dtype) -> np.ndarray:
    out = np.ascontiguousarray(samples, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class RealTrace:
    """Real-valued sampled signal (SUT voltage or photocurrent)."""

    grid: TimeGrid
    samples: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "samples", _as_locked(self.samples, np.float64))
        if self.samples.shape != (self.grid.n_samples,):
            raise InvalidArgumentError("samples length must equal grid.n_samples")
        if not np.all(np.isfinite(self.samples)):
            raise InvalidArgumentError("samples must be finite")


@dataclass(frozen=True)
class ComplexTrace:
    """Complex envelope sampled on a grid.

    frame_offset is the absolute frequency (relative to the optical carrier)
    that the envelope's zero frequency represents; a spectral component at
    baseband frequency nu sits at optical offset frame_offset + nu.
    """

    grid: TimeGrid
    samples: np.ndarray
    frame_offset: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "samples", _as_locked(self.samples, np.complex128))
        if self.samples.shape != (self.grid.n_samples,):
            raise InvalidArgumentError("samples length must equal grid.n_samples")
        if not np.all(np.isfinite(self.samples)):
            raise InvalidArgumentError("samples must be finite")


# ---------------------------------------------------------------------------
# Signal descriptors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Tone:
    frequency: float
    amplitude: float = 1.0
    phase: float = 0.0
    t_start: float | None = None
    t_stop: float | None = None


@dataclass(frozen=True)
class Multitone:
    frequencies: tuple[float, ...]
    amplitudes: tuple[float, ...] | None = None
    phases: tuple[float, ...] | None = None


@dataclass(frozen=True)
class Lfm:
    """Linear chirp from f_start to f_stop over `duration` starting at t_start."""

    f_start: float
    f_stop: float
    duration: float
    t_start: float = 0.0
    amplitude: float = 1.0

    @property
    def chirp_rate(self) -> float:
        return (self.f_stop - self.f_start) / self.duration


@dataclass(frozen=True)
class NlfmProfile:
    """Tabulated frequency-vs-time profile, linearly interpolated between knots."""

    times: tuple[float, ...]
    freqs: tuple[float, ...]
    amplitude: float = 1.0


@dataclass(frozen=True)
class FreqHop:
    dwell: float
    frequencies: tuple[float, ...]
    t_start: float = 0.0
    amplitude: float = 1.0
    phase_continuous: bool = True


@dataclass(frozen=True)
class StepFreq:
    f_start: float
    f_step: float
    n_steps: int
    dwell: float
    t_start: float = 0.0
    amplitude: float = 1.0
    phase_continuous: bool = True


@dataclass(frozen=True)
class BurstOnLfm:
    lfm: Lfm
    burst_frequency: float
    burst_t_start: float
    burst_duration: float
    burst_amplitude: float


@dataclass(frozen=True)
class MixedWithLo:
    inner: "SutDescriptor"
    lo_frequency: float


@dataclass(frozen=True)
class SumSignal:
    components: tuple["SutDescriptor", ...] = field(default_factory=tuple)


SutDescriptor = Union[
    Tone, Multitone, Lfm, NlfmProfile, FreqHop, StepFreq, BurstOnLfm, MixedWithLo, SumSignal
]


def max_frequency(desc: SutDescriptor) -> float:
    """Largest instantaneous frequency the descriptor can produce."""
    if isinstance(desc, Tone):
        return desc.frequency
    if isinstance(desc, Multitone):
        return max(desc.frequencies)
    if isinstance(desc, Lfm):
        return max(desc.f_start, desc.f_stop)
    if isinstance(desc, NlfmProfile):
        return max(desc.freqs)
    if isinstance(desc, FreqHop):
        return max(desc.frequencies)
    if isinstance(desc, StepFreq):
        return max(desc.f_start, desc.f_start + (desc.n_steps - 1) * desc.f_step)
    if isinstance(desc, BurstOnLfm):
        return max(max_frequency(desc.lfm), desc.burst_frequency)
    if isinstance(desc, MixedWithLo):
        return max_frequency(desc.inner) + desc.lo_frequency
    if isinstance(desc, SumSignal):
        return max((max_frequency(c) for c in desc.components), default=0.0)
    raise InvalidArgumentError(f"unknown descriptor type {type(desc)!r}")


def validate_descriptor(desc: SutDescriptor, duration: float | None = None) -> None:
    """Check descriptor invariants; raise InvalidArgumentError on violation."""
    if isinstance(desc, Tone):
        if desc.frequency < 0:
            raise InvalidArgumentError("tone frequency must be >= 0")
        if desc.t_start is not None and desc.t_stop is not None and desc.t_stop <= desc.t_start:
            raise InvalidArgumentError("tone gate must have t_stop > t_start")
    elif isinstance(desc, Multitone):
        if not desc.frequencies:
            raise InvalidArgumentError("multitone needs at least one frequency")
        if any(f < 0 for f in desc.frequencies):
            raise InvalidArgumentError("multitone frequencies must be >= 0")
        for name in ("amplitudes", "phases"):
            vals = getattr(desc, name)
            if vals is not None and len(vals) != len(desc.frequencies):
                raise InvalidArgumentError(f"multitone {name} length mismatch")
    elif isinstance(desc, Lfm):
        if desc.duration <= 0:
            raise InvalidArgumentError("lfm duration must be positive")
        if min(desc.f_start, desc.f_stop) < 0:
            raise InvalidArgumentError("lfm frequencies must be >= 0")
    elif isinstance(desc, NlfmProfile):
        if len(desc.times) < 2 or len(desc.times) != len(desc.freqs):
            raise InvalidArgumentError("nlfm profile needs matching times/freqs, >= 2 knots")
        if np.any(np.diff(desc.times) <= 0):
            raise InvalidArgumentError("nlfm profile times must be strictly increasing")
        if min(desc.freqs) < 0:
            raise InvalidArgumentError("nlfm frequencies must be >= 0")
    elif isinstance(desc, FreqHop):
        if not desc.frequencies:
            raise InvalidArgumentError("hop table must be non-empty")
        if desc.dwell <= 0:
            raise InvalidArgumentError("hop dwell must be positive")
        if min(desc.frequencies) < 0:
            raise InvalidArgumentError("hop frequencies must be >= 0")
    elif isinstance(desc, StepFreq):
        if desc.n_steps < 1:
            raise InvalidArgumentError("step table must be non-empty")
        if desc.dwell <= 0:
            raise InvalidArgumentError("step dwell must be positive")
        if desc.f_start < 0 or desc.f_start + (desc.n_steps - 1) * desc.f_step < 0:
            raise InvalidArgumentError("step frequencies must be >= 0")
    elif isinstance(desc, BurstOnLfm):
        validate_descriptor(desc.lfm, duration)
        if desc.burst_duration <= 0 or desc.burst_frequency < 0:
            raise InvalidArgumentError("burst must have positive duration and frequency >= 0")
    elif isinstance(desc, MixedWithLo):
        validate_descriptor(desc.inner, duration)
        if desc.lo_frequency < 0:
            raise InvalidArgumentError("LO frequency must be >= 0")
    elif isinstance(desc, SumSignal):
        for c in desc.components:
            validate_descriptor(c, duration)
    else:
        raise InvalidArgumentError(f"unknown descriptor type {type(desc)!r}")
    if duration is not None:
        for t in _segment_starts(desc):
            if t < 0 or t > duration:
                raise InvalidArgumentError("segment times must lie within the record duration")


def _segment_starts(desc: SutDescriptor) -> list[float]:
    if isinstance(desc, (Lfm, FreqHop, StepFreq)):
        return [desc.t_start]
    if isinstance(desc, Tone) and desc.t_start is not None:
        return [desc.t_start]
    if isinstance(desc, BurstOnLfm):
        return [desc.lfm.t_start, desc.burst_t_start]
    if isinstance(desc, MixedWithLo):
        return _segment_starts(desc.inner)
    if isinstance(desc, SumSignal):
        return [t for c in desc.components for t in _segment_starts(c)]
    return []


# ---------------------------------------------------------------------------
# Synthesis
# ---------------------------------------------------------------------------

# raised-cosine ramp on every gate edge; an ideal rectangular gate would put
# -26 dB skirts above the declared band that no band-limited generator emits
EDGE_TAPER = 50e-9


def _gate(t: np.ndarray, t_start: float | None, t_stop: float | None) -> np.ndarray:
    g = np.ones_like(t)
    edge = EDGE_TAPER
    if t_start is not None and t_stop is not None:
        edge = min(edge, (t_stop - t_start) / 4)
    if t_start is not None:
        if edge > 0:
            g *= 0.5 - 0.5 * np.cos(np.pi * np.clip((t - t_start) / edge, 0.0, 1.0))
        else:
            g *= t >= t_start
    if t_stop is not None:
        if edge > 0:
            g *= 0.5 - 0.5 * np.cos(np.pi * np.clip((t_stop - t) / edge, 0.0, 1.0))
        else:
            g *= t < t_stop
    return g


def _synth(desc: SutDescriptor, t: np.ndarray) -> np.ndarray:
    if isinstance(desc, Tone):
        t0 = desc.t_start if desc.t_start is not None else 0.0
        x = desc.amplitude * np.cos(2 * np.pi * desc.frequency * (t - t0) + desc.phase)
        return x * _gate(t, desc.t_start, desc.t_stop)

    if isinstance(desc, Multitone):
        n = len(desc.frequencies)
        amps = desc.amplitudes if desc.amplitudes is not None else (1.0,) * n
        phases = desc.phases if desc.phases is not None else (0.0,) * n
        x = np.zeros_like(t)
        for f, a, p in zip(desc.frequencies, amps, phases):
            x += a * np.cos(2 * np.pi * f * t + p)
        return x

    if isinstance(desc, Lfm):
        tr = t - desc.t_start
        phase = 2 * np.pi * (desc.f_start * tr + 0.5 * desc.chirp_rate * tr**2)
        x = desc.amplitude * np.cos(phase)
        return x * _gate(t, desc.t_start, desc.t_start + desc.duration)

    if isinstance(desc, NlfmProfile):
        freq = np.interp(t, desc.times, desc.freqs)
        dt = t[1] - t[0] if len(t) > 1 else 0.0
        # cumulative trapezoidal integral of the frequency profile
        phase = np.empty_like(t)
        phase[0] = 0.0
        np.cumsum(0.5 * (freq[1:] + freq[:-1]) * dt, out=phase[1:])
        x = desc.amplitude * np.cos(2 * np.pi * phase)
        return x * _gate(t, desc.times[0], desc.times[-1])

    if isinstance(desc, (FreqHop, StepFreq)):
        if isinstance(desc, FreqHop):
            freqs = np.asarray(desc.frequencies, dtype=float)
        else:
            freqs = desc.f_start + desc.f_step * np.arange(desc.n_steps, dtype=float)
        n_seg = len(freqs)
        t0 = desc.t_start
        t_end = t0 + n_seg * desc.dwell
        if desc.phase_continuous:
            # short linear glide between dwells keeps the splash inside the band
            glide = min(EDGE_TAPER, desc.dwell / 10)
            knot_t = [t0]
            knot_f = [freqs[0]]
            for s in range(1, n_seg):
                boundary = t0 + s * desc.dwell
                knot_t += [boundary, boundary + glide]
                knot_f += [freqs[s - 1], freqs[s]]
            knot_t.append(t_end)
            knot_f.append(freqs[-1])
            freq = np.interp(t, knot_t, knot_f)
            dt = t[1] - t[0] if len(t) > 1 else 0.0
            phase = np.empty_like(t)
            phase[0] = 0.0
            np.cumsum(0.5 * (freq[1:] + freq[:-1]) * dt, out=phase[1:])
            x = desc.amplitude * np.cos(2 * np.pi * phase)
            return x * _gate(t, t0, t_end)
        # phase-reset mode: independent tapered tone per dwell
        x = np.zeros_like(t)
        for s, f in enumerate(freqs):
            seg = Tone(
                frequency=float(f),
                amplitude=desc.amplitude,
                t_start=t0 + s * desc.dwell,
                t_stop=t0 + (s + 1) * desc.dwell,
            )
            x += _synth(seg, t)
        return x

    if isinstance(desc, BurstOnLfm):
        burst = Tone(
            frequency=desc.burst_frequency,
            amplitude=desc.burst_amplitude,
            t_start=desc.burst_t_start,
            t_stop=desc.burst_t_start + desc.burst_duration,
        )
        return _synth(desc.lfm, t) + _synth(burst, t)

    if isinstance(desc, MixedWithLo):
        return _synth(desc.inner, t) * np.cos(2 * np.pi * desc.lo_frequency * t)

    if isinstance(desc, SumSignal):
        x = np.zeros_like(t)
        for c in desc.components:
            x += _synth(c, t)
        return x

    raise InvalidArgumentError(f"unknown descriptor type {type(desc)!r}")


def synthesize(desc: SutDescriptor, grid: TimeGrid) -> RealTrace:
    """Render a descriptor to a real trace on the given grid.

    Raises AliasingError if the descriptor's maximum instantaneous frequency
    reaches the grid's Nyquist frequency.
    """
    validate_descriptor(desc, duration=grid.duration)
    if max_frequency(desc) >= grid.sample_rate / 2:
        raise AliasingError(
            f"max frequency {max_frequency(desc):.3e} Hz >= Nyquist {grid.sample_rate / 2:.3e} Hz"
        )
    return RealTrace(grid=grid, samples=_synth(desc, grid.times()))


def mix_with_lo(sut: RealTrace, f_lo: float) -> RealTrace:
    """Multiply a trace by cos(2*pi*f_lo*t), producing sum and difference bands."""
    if f_lo < 0:
        raise InvalidArgumentError("LO frequency must be >= 0")
    t = sut.grid.times()
    return RealTrace(grid=sut.grid, samples=sut.samples * np.cos(2 * np.pi * f_lo * t))


# ---------------------------------------------------------------------------
# Ground truth
# ---------------------------------------------------------------------------


def true_instantaneous_frequency(
    desc: SutDescriptor, t: float, duration: float | None = None
) -> tuple[float, ...]:
    """Analytic frequencies present at time t, sorted ascending.

    Multi-component descriptors return one entry per active component; gated
    components outside their interval contribute nothing.
    """
    if t < 0 or (duration is not None and t > duration):
        raise InvalidArgumentError(f"t={t} outside record duration")
    return tuple(sorted(_true_if(desc, t)))


def _true_if(desc: SutDescriptor, t: float) -> list[float]:
    if isinstance(desc, Tone):
        lo = desc.t_start if desc.t_start is not None else -np.inf
        hi = desc.t_stop if desc.t_stop is not None else np.inf
        return [desc.frequency] if lo <= t < hi else []
    if isinstance(desc, Multitone):
        return list(desc.frequencies)
    if isinstance(desc, Lfm):
        if desc.t_start <= t < desc.t_start + desc.duration:
            return [desc.f_start + desc.chirp_rate * (t - desc.t_start)]
        return []
    if isinstance(desc, NlfmProfile):
        if desc.times[0] <= t < desc.times[-1]:
            return [float(np.interp(t, desc.times, desc.freqs))]
        return []
    if isinstance(desc, (FreqHop, StepFreq)):
        if isinstance(desc, FreqHop):
            freqs = list(desc.frequencies)
        else:
            freqs = [desc.f_start + desc.f_step * k for k in range(desc.n_steps)]
        seg = int(np.floor((t - desc.t_start) / desc.dwell))
        return [freqs[seg]] if 0 <= seg < len(freqs) else []
    if isinstance(desc, BurstOnLfm):
        out = _true_if(desc.lfm, t)
        if desc.burst_t_start <= t < desc.burst_t_start + desc.burst_duration:
            out.append(desc.burst_frequency)
        return out
    if isinstance(desc, MixedWithLo):
        out = []
        for f in _true_if(desc.inner, t):
            out.extend([desc.lo_frequency + f, abs(desc.lo_frequency - f)])
        return out
    if isinstance(desc, SumSignal):
        return [f for c in desc.components for f in _true_if(c, t)]
    raise InvalidArgumentError(f"unknown descriptor type {type(desc)!r}")


# ---------------------------------------------------------------------------
# BSTF trace files
# ---------------------------------------------------------------------------


def write_trace(path: str | Path, trace: RealTrace | ComplexTrace) -> None:
    """Write a trace in the BSTF binary format (version 1)."""
    is_complex = isinstance(trace, ComplexTrace)
    frame = trace.frame_offset if is_complex else 0.0
    header = _BSTF_HEADER.pack(
        _BSTF_MAGIC,
        _BSTF_VERSION,
        1 if is_complex else 0,
        trace.grid.sample_rate,
        trace.grid.n_samples,
        frame,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        if is_complex:
            interleaved = np.empty(2 * trace.grid.n_samples, dtype="<f8")
            interleaved[0::2] = trace.samples.real
            interleaved[1::2] = trace.samples.imag
            fh.write(interleaved.tobytes())
        else:
            fh.write(trace.samples.astype("<f8").tobytes())


def read_trace(path: str | Path) -> RealTrace | ComplexTrace:
    """Read a BSTF trace file; returns RealTrace or ComplexTrace by kind byte."""
    with open(path, "rb") as fh:
        raw = fh.read(_BSTF_HEADER.size)
        if len(raw) != _BSTF_HEADER.size:
            raise InvalidArgumentError("truncated BSTF header")
        magic, version, kind, rate, n, frame = _BSTF_HEADER.unpack(raw)
        if magic != _BSTF_MAGIC:
            raise InvalidArgumentError("not a BSTF file")
        if version != _BSTF_VERSION:
            raise InvalidArgumentError(f"unsupported BSTF version {version}")
        n_values = 2 * n if kind == 1 else n
        data = np.frombuffer(fh.read(8 * n_values), dtype="<f8")
        if data.size != n_values:
            raise InvalidArgumentError("truncated BSTF payload")
    grid = TimeGrid(sample_rate=rate, n_samples=n)
    if kind == 1:
        return ComplexTrace(grid=grid, samples=data[0::2] + 1j * data[1::2], frame_offset=frame)
    if kind == 0:
        return RealTrace(grid=grid, samples=data)
    raise InvalidArgumentError(f"unknown BSTF kind {kind}")
