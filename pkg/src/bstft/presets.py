"""Canned experiment configurations for the reproduction scenarios.

Long source records are desk-scaled (1500 us originals run as 200 us here) so
every preset completes on a workstation; sweep parameters, tone pairs and
burst timing are kept as published.
"""

from __future__ import annotations

from .config import (
    BurstOnLfmCfg,
    DecodeCfg,
    ExperimentConfig,
    FreqHopCfg,
    LfmCfg,
    MixedWithLoCfg,
    MultitoneCfg,
    NlfmProfileCfg,
    StepFreqCfg,
    SumCfg,
    SutCfg,
    SweepCfg,
    ToneCfg,
)
from .errors import ConfigError

_US = 1e-6
_GHZ = 1e9


def _lfm_0_4ghz(duration: float) -> LfmCfg:
    return LfmCfg(f_start_hz=10e6, f_stop_hz=4 * _GHZ, duration_s=duration)


def _config(
    name: str,
    sut: SutCfg,
    duration: float,
    f1: float,
    f2: float,
    period: float,
    t_ref_policy: str = "per_window",
    n_bins: int = 1024,
) -> ExperimentConfig:
    return ExperimentConfig(
        name=name,
        sut=sut,
        duration_s=duration,
        sweep=SweepCfg(f1_hz=f1, f2_hz=f2, period_s=period),
        decode=DecodeCfg(n_bins=n_bins, t_ref_policy=t_ref_policy),
    )


def _nlfm_s_curve(duration: float, n_knots: int = 81) -> NlfmProfileCfg:
    import numpy as np

    t = np.linspace(0.0, duration, n_knots)
    f = 2 * _GHZ - 1.8 * _GHZ * np.cos(np.pi * t / duration)
    return NlfmProfileCfg(times_s=t.tolist(), freqs_hz=f.tolist())


def _ecnu(duration: float) -> SumCfg:
    """Strokes drawing the letters E, C, N, U on the time-frequency plane."""
    lo, hi = 0.5 * _GHZ, 3.5 * _GHZ
    top, mid, bot = 3.4 * _GHZ, 2.0 * _GHZ, 0.6 * _GHZ
    width, vbar = 110 * _US, 12 * _US

    def up(t0):
        return LfmCfg(f_start_hz=lo, f_stop_hz=hi, duration_s=vbar, t_start_s=t0)

    def down(t0):
        return LfmCfg(f_start_hz=hi, f_stop_hz=lo, duration_s=vbar, t_start_s=t0)

    def bar(freq, t0, t1):
        return ToneCfg(frequency_hz=freq, t_start_s=t0, t_stop_s=t1)

    strokes: list[SutCfg] = []
    e0, c0, n0, u0 = 30 * _US, 160 * _US, 290 * _US, 420 * _US
    strokes += [up(e0), bar(top, e0, e0 + width), bar(mid, e0, e0 + width), bar(bot, e0, e0 + width)]
    strokes += [up(c0), bar(top, c0, c0 + width), bar(bot, c0, c0 + width)]
    strokes += [up(n0), down(n0), LfmCfg(f_start_hz=lo, f_stop_hz=hi, duration_s=vbar, t_start_s=n0 + width - vbar)]
    strokes += [
        down(u0),
        bar(bot, u0 + 6 * _US, u0 + width - 6 * _US),
        LfmCfg(f_start_hz=lo, f_stop_hz=hi, duration_s=vbar, t_start_s=u0 + width - vbar),
    ]
    assert duration >= u0 + width
    return SumCfg(components=strokes)


def _fig3a():
    return _config("fig3a", _lfm_0_4ghz(200 * _US), 200 * _US, 10.8e9, 14.8e9, 2 * _US, "median")


def _fig3b():
    return _config(
        "fig3b", _lfm_0_4ghz(200 * _US), 200 * _US, 10.8e9, 22.8e9, 2 * _US, "median", n_bins=2048
    )


def _fig3c():
    sut = MixedWithLoCfg(inner=_lfm_0_4ghz(100 * _US), lo_hz=8 * _GHZ)
    return _config("fig3c", sut, 100 * _US, 10.8e9, 22.8e9, 2 * _US, "median", n_bins=2048)


def _fig4(period_us: float, name: str):
    return _config(name, _lfm_0_4ghz(200 * _US), 200 * _US, 10.8e9, 14.8e9, period_us * _US, "median")


def _fig5(duration_us: float, name: str):
    return _config(name, _lfm_0_4ghz(duration_us * _US), duration_us * _US, 10.8e9, 14.8e9, 4 * _US, "median")


def _fig6(delta_mhz: float, period_us: float, name: str):
    sut = MultitoneCfg(frequencies_hz=[2 * _GHZ, 2 * _GHZ + delta_mhz * 1e6])
    return _config(name, sut, 10 * period_us * _US, 10.8e9, 14.8e9, period_us * _US)


def _fig7():
    return _config("fig7", ToneCfg(frequency_hz=2 * _GHZ), 40 * _US, 10.8e9, 14.8e9, 4 * _US)


def _fig8(sut: SutCfg, name: str, policy: str = "median"):
    return _config(name, sut, 40 * _US, 10.8e9, 14.8e9, 1 * _US, policy)


def _fig8a():
    dual = SumCfg(
        components=[
            LfmCfg(f_start_hz=10e6, f_stop_hz=4 * _GHZ, duration_s=40 * _US),
            LfmCfg(f_start_hz=4 * _GHZ, f_stop_hz=10e6, duration_s=40 * _US),
        ]
    )
    return _fig8(dual, "fig8a")


def _fig8b():
    return _fig8(_nlfm_s_curve(40 * _US), "fig8b")


def _fig8c():
    hops = [3.2, 1.2, 2.8, 0.6, 3.6, 1.8, 0.9, 2.3]
    sut = FreqHopCfg(dwell_s=5 * _US, frequencies_hz=[f * _GHZ for f in hops])
    return _fig8(sut, "fig8c", policy="per_window")


def _fig8d():
    sut = StepFreqCfg(f_start_hz=0.4 * _GHZ, f_step_hz=0.5 * _GHZ, n_steps=8, dwell_s=5 * _US)
    return _fig8(sut, "fig8d")


def _fig8e():
    return _config("fig8e", _ecnu(560 * _US), 560 * _US, 10.8e9, 14.8e9, 2 * _US, "median")


def _fig9():
    # burst power 8 dB below the LFM carrier
    sut = BurstOnLfmCfg(
        lfm=_lfm_0_4ghz(40 * _US),
        burst_frequency_hz=2 * _GHZ,
        burst_t_start_s=8 * _US,
        burst_duration_s=2 * _US,
        burst_amplitude=10 ** (-8 / 20),
    )
    return _config("fig9", sut, 40 * _US, 10.8e9, 14.8e9, 1 * _US, "median")


_BUILDERS = {
    "fig3a": _fig3a,
    "fig3b": _fig3b,
    "fig3c": _fig3c,
    "fig4a": lambda: _fig4(4, "fig4a"),
    "fig4b": lambda: _fig4(2, "fig4b"),
    "fig4c": lambda: _fig4(0.5, "fig4c"),
    "fig5a": lambda: _fig5(40, "fig5a"),
    "fig5b": lambda: _fig5(200, "fig5b"),
    "fig6a": lambda: _fig6(60, 4, "fig6a"),
    "fig6b": lambda: _fig6(85, 3, "fig6b"),
    "fig6c": lambda: _fig6(100, 2.5, "fig6c"),
    "fig6d": lambda: _fig6(116, 2, "fig6d"),
    "fig7": _fig7,
    "fig8a": _fig8a,
    "fig8b": _fig8b,
    "fig8c": _fig8c,
    "fig8d": _fig8d,
    "fig8e": _fig8e,
    "fig9": _fig9,
}


def preset_names() -> list[str]:
    return sorted(_BUILDERS)


def preset(name: str) -> ExperimentConfig:
    """Fully populated config for a named scenario; unknown names raise ConfigError."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; known: {', '.join(preset_names())}") from None
    return builder()
