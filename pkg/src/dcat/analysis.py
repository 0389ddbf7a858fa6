"""Post-processing of simulated waveforms: distortion, tracking, balance, losses."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .circuit import winding_path_resistance
from .topology import ConverterConfig


def thd(signal, f0: float, fs: float) -> float:
    """Total harmonic distortion relative to the fundamental amplitude.

    The DFT runs over the largest whole number of ``f0`` periods contained in
    the (uniformly sampled) signal, taken from its end. Harmonics 2 through
    ``floor((fs/2) / f0)`` are included; the DC component is ignored.
    """
    x = np.asarray(signal, dtype=float)
    if f0 <= 0 or fs <= 0:
        raise ValueError("f0 and fs must be > 0")
    if f0 > fs / 2:
        raise ValueError(f"f0 = {f0} Hz lies above the Nyquist frequency {fs / 2} Hz")
    per_period = fs / f0
    periods = int(math.floor(len(x) / per_period + 1e-9))
    if periods < 1:
        raise ValueError("signal must cover at least one full period of f0")
    n = int(round(periods * per_period))
    x = x[len(x) - n:]
    coeffs = np.fft.rfft(x)
    amp = np.abs(coeffs) * 2.0 / n
    if n % 2 == 0:
        amp[-1] /= 2.0
    fund = amp[periods]
    if fund == 0:
        raise ValueError("signal has no fundamental component")
    h_max = int(math.floor((fs / 2) / f0 + 1e-9))
    bins = [h * periods for h in range(2, h_max + 1) if h * periods < len(amp)]
    harm = amp[bins]
    return float(math.sqrt(float(np.sum(harm ** 2))) / fund)


def _moving_average(x: np.ndarray, window: int) -> np.ndarray:
    c = np.cumsum(np.concatenate([[0.0], x]))
    return (c[window:] - c[:-window]) / window


def tracking_error(v_out, v_ref, f_pwm: float, fs: float) -> float:
    """RMS difference between the PWM-period averages of output and reference.

    Both signals pass through the same trailing one-PWM-period rectangular
    window, so only completed windows (after the first period) contribute.
    """
    v_out = np.asarray(v_out, dtype=float)
    v_ref = np.asarray(v_ref, dtype=float)
    if v_out.shape != v_ref.shape:
        raise ValueError("v_out and v_ref must share one sample grid")
    window = max(1, int(round(fs / f_pwm)))
    if len(v_out) < window:
        raise ValueError("signal shorter than one PWM period")
    err = _moving_average(v_out, window) - _moving_average(v_ref, window)
    return float(np.sqrt(np.mean(err ** 2)))


def _trapz(y: np.ndarray, t: np.ndarray) -> float:
    if len(t) < 2:
        return 0.0
    return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(t)))


def conduction_loss(waveform, config: ConverterConfig) -> float:
    """Ohmic loss in the load path (one tap and one PWM switch) and the windings."""
    t = waveform["time"]
    i_load = waveform["i_load"]
    loss = _trapz(i_load ** 2 * (config.r_on_tap + config.r_on_pwm), t)
    winding = waveform.module_channels("i_wind")
    if winding.size:
        loss += _trapz(np.sum(winding ** 2, axis=1) * winding_path_resistance(config), t)
    return loss


def spread(v_caps: np.ndarray) -> np.ndarray:
    """Max minus min across modules per sample; NaN entries (bypassed) are skipped."""
    v = np.atleast_2d(np.asarray(v_caps, dtype=float))
    return np.nanmax(v, axis=1) - np.nanmin(v, axis=1)


def ladder_from_caps(v_caps) -> np.ndarray:
    """Tap voltages from the active capacitor voltages (NaNs dropped)."""
    v = np.asarray(v_caps, dtype=float)
    v = v[np.isfinite(v)]
    return np.concatenate([[0.0], np.cumsum(v)])


def settling_time(times: np.ndarray, spreads: np.ndarray, threshold: float) -> float | None:
    below = np.nonzero(spreads < threshold)[0]
    return float(times[below[0]]) if below.size else None


def is_monotone_decay(spreads: np.ndarray, atol: float) -> bool:
    """Non-increasing up to ``atol`` (roundoff once the spread has collapsed)."""
    return bool(np.all(np.diff(spreads) <= atol))


@dataclass
class RunReport:
    thd: float | None
    rms_tracking_error: float | None
    capacitor_spread_final: float
    balance_settling_time: float | None
    settled: bool
    conduction_loss: float
    switching_event_counts: dict[str, int]
    gate_energy: dict[str, float]
    energy: dict[str, float] = field(default_factory=dict)
    power_balance_max_residual: float = 0.0
    spread_monotone: bool = True
    final_ladder: list[float] = field(default_factory=list)
    effective_frequencies: dict[str, float] = field(default_factory=dict)
    tap_transitions: int = 0
    max_tap_toggles_per_transition: int = 0
    faults: list[dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunReport":
        return cls(**data)


def build_report(result, scenario) -> RunReport:
    from .engine import gate_energy_estimate

    wf = result.waveform
    cfg = result.final_config
    grid = result.grid
    fs = 1.0 / (scenario.dt * scenario.record_decimation)
    f0 = getattr(scenario.reference, "fundamental", None)

    thd_value = None
    tracking = None
    if f0 is not None and len(wf) * scenario.dt * scenario.record_decimation * f0 >= 1 and f0 <= fs / 2:
        n0 = int(round(fs / f0))
        tail_out = wf["v_out"][-n0:]
        tail_ref = wf["v_ref"][-n0:]
        try:
            thd_value = thd(tail_out, f0, fs)
        except ValueError:
            thd_value = None
        tracking = tracking_error(tail_out, tail_ref, grid.f_pwm, fs)
    elif len(wf) * scenario.record_decimation * grid.f_pwm * scenario.dt >= 1:
        tracking = tracking_error(wf["v_out"], wf["v_ref"], grid.f_pwm, fs)

    bs = result.waveform.bridge_samples
    caps = np.column_stack([bs[f"v_cap_{k}"] for k in range(scenario.config.module_count)])
    spreads = spread(caps)
    settle = settling_time(bs["time"], spreads, 0.01 * cfg.v_dc)
    final_v = result.final_state.v_cap
    ev = result.events
    return RunReport(
        thd=thd_value,
        rms_tracking_error=tracking,
        capacitor_spread_final=float(final_v.max() - final_v.min()),
        balance_settling_time=settle,
        settled=settle is not None,
        conduction_loss=conduction_loss(wf, cfg),
        switching_event_counts={"bridge": ev["bridge"], "tap": ev["tap"], "pwm": ev["pwm"]},
        gate_energy=gate_energy_estimate(cfg, grid, scenario.duration),
        energy=dict(result.energy),
        power_balance_max_residual=ev["power_balance_max_residual"],
        spread_monotone=is_monotone_decay(spreads, 1e-9 * cfg.v_dc),
        final_ladder=[float(v) for v in np.concatenate([[0.0], np.cumsum(final_v)])],
        effective_frequencies={"f_bridge": grid.f_bridge, "f_pwm": grid.f_pwm, "f_tap": grid.f_tap},
        tap_transitions=ev["tap_transitions"],
        max_tap_toggles_per_transition=ev["max_tap_toggles_per_transition"],
        faults=list(ev["faults"]),
    )
