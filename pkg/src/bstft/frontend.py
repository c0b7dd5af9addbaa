"""Sweep-carrier generation and modulator models.

The periodic electrical sweep (f1 -> f2, period T) is carried as the lower
optical sideband, so the complex envelope's instantaneous frequency relative
to the carrier is -(f1 + K * t_local). Modulators are ideal: the sweep stage
is carrier-suppressed single-sideband, the signal stage carrier-suppressed
double-sideband (pointwise product with the real drive).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AliasingError, InvalidArgumentError
from .sigkit import ComplexTrace, RealTrace, TimeGrid


@dataclass(frozen=True)
class SweepPlan:
    """Periodic sweep parameters; chirp_rate is (f2 - f1) / period."""

    f1: float
    f2: float
    period: float
    n_periods: int = 1

    def __post_init__(self):
        if not (self.f2 > self.f1 > 0):
            raise InvalidArgumentError("sweep requires f2 > f1 > 0")
        if self.period <= 0:
            raise InvalidArgumentError("sweep period must be positive")
        if self.n_periods < 1:
            raise InvalidArgumentError("n_periods must be at least 1")

    @property
    def chirp_rate(self) -> float:
        return (self.f2 - self.f1) / self.period

    @property
    def bandwidth(self) -> float:
        return self.f2 - self.f1


def make_sweep_plan(f1: float, f2: float, period: float, n_periods: int = 1) -> SweepPlan:
    return SweepPlan(f1=f1, f2=f2, period=period, n_periods=n_periods)


@dataclass(frozen=True)
class ReferenceSpec:
    """Single-frequency calibration tone injected alongside the SUT."""

    frequency: float
    amplitude: float = 1.0

    def __post_init__(self):
        if self.frequency < 0:
            raise InvalidArgumentError("reference frequency must be >= 0")
        if self.amplitude < 0:
            raise InvalidArgumentError("reference amplitude must be >= 0")

    def constant_c(self, f1: float) -> float:
        """Offset between the sweep start and the reference tone."""
        return f1 - self.frequency


def check_reference_placement(
    plan: SweepPlan, ref: ReferenceSpec, brillouin_shift: float, guard_fraction: float = 0.1
) -> None:
    """Enforce that the reference pulse lands inside the guard interval.

    The constant c = f1 - f_r must sit slightly below the Brillouin shift:
    0 < f_SBS - c < K * guard_fraction * T.
    """
    gap = brillouin_shift - ref.constant_c(plan.f1)
    limit = plan.chirp_rate * guard_fraction * plan.period
    if not (0 < gap < limit):
        raise InvalidArgumentError(
            f"reference placement violated: f_SBS - c = {gap:.4e} Hz not in (0, {limit:.4e})"
        )


@dataclass(frozen=True)
class FrameSpec:
    """Absolute offset (from the optical carrier) of the envelope's zero frequency."""

    frame_center: float


def default_frame_center(plan: SweepPlan) -> float:
    """Center the frame on the sweep band so both sidebands fit symmetrically."""
    return -(plan.f1 + plan.f2) / 2


def gen_sweep_envelope(plan: SweepPlan, grid: TimeGrid, frame: FrameSpec) -> ComplexTrace:
    """Unit-magnitude envelope of the periodic lower-sideband sweep.

    Instantaneous frequency relative to the carrier is -(f1 + K * (t mod T)),
    a periodic sawtooth; the phase resets at each period boundary.
    """
    nu_start = -plan.f1 - frame.frame_center
    nu_stop = -plan.f2 - frame.frame_center
    nyq = grid.sample_rate / 2
    if not (-nyq < min(nu_start, nu_stop) and max(nu_start, nu_stop) < nyq):
        raise AliasingError(
            f"sweep band [{min(nu_start, nu_stop):.3e}, {max(nu_start, nu_stop):.3e}] Hz "
            f"does not fit in the +-{nyq:.3e} Hz frame"
        )
    t_local = grid.times() % plan.period
    phase = 2 * np.pi * (nu_start * t_local - 0.5 * plan.chirp_rate * t_local**2)
    return ComplexTrace(grid=grid, samples=np.exp(1j * phase), frame_offset=frame.frame_center)


def combine_with_reference(sut: RealTrace, ref: ReferenceSpec) -> RealTrace:
    """Add the CW reference tone to the SUT."""
    t = sut.grid.times()
    samples = sut.samples + ref.amplitude * np.cos(2 * np.pi * ref.frequency * t)
    return RealTrace(grid=sut.grid, samples=samples)


def modulate_dsb(sweep: ComplexTrace, m: RealTrace) -> ComplexTrace:
    """Null-biased MZM small-signal model: pointwise product sweep(t) * m(t)."""
    if sweep.grid != m.grid:
        raise InvalidArgumentError("sweep and modulating traces must share a grid")
    return ComplexTrace(
        grid=sweep.grid, samples=sweep.samples * m.samples, frame_offset=sweep.frame_offset
    )


def window_index(plan: SweepPlan, t: float) -> tuple[int, float]:
    """Map absolute time to (sweep window, local time); boundaries belong to the next window."""
    if t < 0:
        raise InvalidArgumentError("t must be >= 0")
    w = int(np.floor(t / plan.period))
    return w, t - w * plan.period
