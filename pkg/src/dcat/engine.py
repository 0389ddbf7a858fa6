"""Fixed-step time-domain simulation of the converter and its gate driver.

The plant is integrated with classical RK4 on a fixed grid. Bridge
polarity, PWM edges and tap decisions all fall on step boundaries: the
switching frequencies are snapped so that every bridge half period, PWM
period and tap interval is a whole number of steps. Tap decisions sample
the reference at ``f_tap`` (zero-order hold) against the nominal ladder;
the controller never measures the capacitors.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

import numpy as np

from . import kernels
from .circuit import GateDriverState, SimState, gate_driver_derivatives, gate_stored_energy, winding_path_resistance
from .modulation import (
    GateDriverParams,
    TapSelection,
    default_gate_params,
    gate_waveform_at,
    select_taps,
)
from .topology import ConfigError, ConverterConfig, apply_fault_bypass, nominal_tap_ladder

log = logging.getLogger(__name__)


class SimulationError(RuntimeError):
    """The integration produced a non-finite state."""


# -- references --------------------------------------------------------------

@dataclass(frozen=True)
class Sine:
    amplitude: float
    frequency: float
    offset: float = 0.0
    kind = "sine"

    def __call__(self, t: float) -> float:
        return self.offset + self.amplitude * math.sin(2 * math.pi * self.frequency * t)

    @property
    def fundamental(self) -> float:
        return self.frequency


@dataclass(frozen=True)
class SquaredSine:
    """``peak * sin(pi * f * t) ** 2``: a unipolar bump train repeating at ``f``."""

    peak: float
    frequency: float
    kind = "squared_sine"

    def __call__(self, t: float) -> float:
        return self.peak * math.sin(math.pi * self.frequency * t) ** 2

    @property
    def fundamental(self) -> float:
        return self.frequency


@dataclass(frozen=True)
class Constant:
    volts: float
    kind = "constant"

    def __call__(self, t: float) -> float:
        return self.volts

    @property
    def fundamental(self) -> None:
        return None


@dataclass(frozen=True)
class Table:
    """Piecewise-linear reference through ``(t, v)`` points, held flat outside."""

    points: tuple[tuple[float, float], ...]
    kind = "table"

    def __post_init__(self):
        pts = tuple((float(t), float(v)) for t, v in self.points)
        if not pts:
            raise ConfigError("table reference needs at least one point")
        if any(b[0] <= a[0] for a, b in zip(pts, pts[1:])):
            raise ConfigError("table reference times must be strictly increasing")
        object.__setattr__(self, "points", pts)

    def __call__(self, t: float) -> float:
        ts, vs = zip(*self.points)
        return float(np.interp(t, ts, vs))

    @property
    def fundamental(self) -> None:
        return None


_REFERENCE_KINDS = {cls.kind: cls for cls in (Sine, SquaredSine, Constant, Table)}


def reference_from_dict(data: Mapping[str, Any]):
    if not isinstance(data, Mapping) or "kind" not in data:
        raise ConfigError("reference must be an object with a 'kind' field")
    kind = data["kind"]
    if kind not in _REFERENCE_KINDS:
        raise ConfigError(f"unknown reference kind {kind!r}; expected one of {sorted(_REFERENCE_KINDS)}")
    cls = _REFERENCE_KINDS[kind]
    names = {f.name for f in dataclasses.fields(cls)}
    args = {k: v for k, v in data.items() if k != "kind"}
    unknown = sorted(set(args) - names)
    missing = sorted(f.name for f in dataclasses.fields(cls)
                     if f.name not in args and f.default is dataclasses.MISSING)
    if unknown:
        raise ConfigError(f"unknown field(s) for {kind} reference: {', '.join(unknown)}")
    if missing:
        raise ConfigError(f"missing field(s) for {kind} reference: {', '.join(missing)}")
    if cls is Table:
        try:
            return Table(tuple((t, v) for t, v in args["points"]))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"table points must be [t, v] pairs: {exc}") from None
    for k, v in args.items():
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"reference field {k} must be a number, got {v!r}")
    ref = cls(**{k: float(v) for k, v in args.items()})
    if getattr(ref, "frequency", 1.0) <= 0:
        raise ConfigError("reference frequency must be > 0")
    return ref


def reference_to_dict(ref) -> dict[str, Any]:
    out = {"kind": ref.kind}
    for f in dataclasses.fields(ref):
        value = getattr(ref, f.name)
        out[f.name] = [list(p) for p in value] if f.name == "points" else value
    return out


# -- scenario ----------------------------------------------------------------

@dataclass(frozen=True)
class Scenario:
    config: ConverterConfig
    reference: Callable[[float], float]
    duration: float
    dt: float | None = None
    record_decimation: int = 1
    initial_v_cap: tuple[float, ...] | None = None
    fault_events: tuple[tuple[float, int], ...] = ()

    def __post_init__(self):
        if self.dt is None:
            object.__setattr__(self, "dt", 1.0 / (200.0 * self.config.f_bridge))
        if self.initial_v_cap is not None:
            object.__setattr__(self, "initial_v_cap", tuple(float(v) for v in self.initial_v_cap))
        object.__setattr__(self, "fault_events", tuple((float(t), int(k)) for t, k in self.fault_events))
        self.validate()

    def validate(self) -> None:
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ConfigError(f"dt must be > 0, got {self.dt}")
        if self.dt > (1 + 1e-9) / (50.0 * self.config.f_bridge):
            raise ConfigError(
                f"dt = {self.dt:.3g} s is coarser than 1/(50 f_bridge) = {1 / (50 * self.config.f_bridge):.3g} s"
            )
        if not self.duration > 0:
            raise ConfigError(f"duration must be > 0, got {self.duration}")
        if self.duration < self.dt:
            raise ConfigError(f"duration {self.duration} s is shorter than one step ({self.dt} s)")
        if isinstance(self.record_decimation, bool) or int(self.record_decimation) != self.record_decimation \
                or self.record_decimation < 1:
            raise ConfigError("record_decimation must be an integer >= 1")
        if self.initial_v_cap is not None:
            if len(self.initial_v_cap) != self.config.active_count:
                raise ConfigError(
                    f"initial_v_cap has {len(self.initial_v_cap)} entries, "
                    f"expected {self.config.active_count} (active modules)"
                )
            if not all(math.isfinite(v) for v in self.initial_v_cap):
                raise ConfigError("initial_v_cap must be finite")
        cfg = self.config
        for t, k in sorted(self.fault_events):
            if not 0 <= t <= self.duration:
                raise ConfigError(f"fault at t={t} lies outside [0, duration]")
            cfg = apply_fault_bypass(cfg, k)

    def replace(self, **changes) -> "Scenario":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        return {
            "config": self.config.to_dict(),
            "reference": reference_to_dict(self.reference),
            "duration": self.duration,
            "dt": self.dt,
            "record_decimation": self.record_decimation,
            "initial_v_cap": list(self.initial_v_cap) if self.initial_v_cap is not None else None,
            "fault_events": [[t, k] for t, k in self.fault_events],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Scenario":
        if not isinstance(data, Mapping):
            raise ConfigError("scenario must be a JSON object")
        allowed = {"config", "reference", "duration", "dt", "record_decimation", "initial_v_cap", "fault_events"}
        unknown = sorted(set(data) - allowed)
        if unknown:
            raise ConfigError(f"unknown scenario field(s): {', '.join(unknown)}")
        for req in ("reference", "duration"):
            if req not in data:
                raise ConfigError(f"scenario is missing required field '{req}'")
        config = ConverterConfig.from_dict(data.get("config", {}))
        for name in ("duration", "dt"):
            value = data.get(name)
            if value is not None and (isinstance(value, bool) or not isinstance(value, (int, float))):
                raise ConfigError(f"{name} must be a number, got {value!r}")
        decim = data.get("record_decimation", 1)
        if isinstance(decim, bool) or not isinstance(decim, int):
            raise ConfigError(f"record_decimation must be an integer, got {decim!r}")
        faults = data.get("fault_events", [])
        try:
            faults = tuple((float(t), int(k)) for t, k in faults)
        except (TypeError, ValueError):
            raise ConfigError("fault_events must be a list of [time, module] pairs") from None
        v0 = data.get("initial_v_cap")
        if v0 is not None and (not isinstance(v0, list) or
                               any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in v0)):
            raise ConfigError("initial_v_cap must be a list of numbers")
        return cls(
            config=config,
            reference=reference_from_dict(data["reference"]),
            duration=float(data["duration"]),
            dt=None if data.get("dt") is None else float(data["dt"]),
            record_decimation=decim,
            initial_v_cap=None if v0 is None else tuple(v0),
            fault_events=faults,
        )


@dataclass(frozen=True)
class StepGrid:
    """Switching periods expressed in whole integration steps."""

    dt: float
    n_half: int
    n_pwm: int
    n_tap: int

    @classmethod
    def for_config(cls, config: ConverterConfig, dt: float) -> "StepGrid":
        n_half = max(1, round(1.0 / (2.0 * config.f_bridge * dt)))
        n_pwm = max(1, round(1.0 / (config.f_pwm * dt)))
        n_tap = max(1, round(1.0 / (config.f_tap * dt)))
        grid = cls(dt, n_half, n_pwm, n_tap)
        for name, want, got in (("f_bridge", config.f_bridge, grid.f_bridge),
                                ("f_pwm", config.f_pwm, grid.f_pwm),
                                ("f_tap", config.f_tap, grid.f_tap)):
            if abs(got - want) > 1e-9 * want:
                log.info("%s snapped from %.9g Hz to %.9g Hz to fit dt=%.3g s", name, want, got, dt)
        return grid

    @property
    def f_bridge(self) -> float:
        return 1.0 / (2 * self.n_half * self.dt)

    @property
    def f_pwm(self) -> float:
        return 1.0 / (self.n_pwm * self.dt)

    @property
    def f_tap(self) -> float:
        return 1.0 / (self.n_tap * self.dt)

    @property
    def bridge_period(self) -> int:
        return 2 * self.n_half


# -- waveform ----------------------------------------------------------------

@dataclass
class Waveform:
    """Named channels on a uniform grid plus capacitor samples once per bridge period.

    ``v_out`` is the mean tap-selector output over each record interval, so
    with decimation the PWM average is preserved exactly. All other channels
    are instantaneous values at the sample time. Tap indices refer to the
    active ladder; a bypassed module reads 0 V / 0 A.
    """

    channels: dict[str, np.ndarray]
    bridge_samples: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        lengths = {len(v) for v in self.channels.values()}
        if len(lengths) > 1:
            raise ValueError("all channels must have equal length")
        t = self.channels.get("time")
        if t is not None and len(t) > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("time must be strictly increasing")

    def __getitem__(self, name: str) -> np.ndarray:
        return self.channels[name]

    def __len__(self) -> int:
        return len(self.channels["time"])

    @property
    def names(self) -> list[str]:
        return list(self.channels)

    @property
    def sample_rate(self) -> float:
        t = self.channels["time"]
        return 1.0 / (t[1] - t[0])

    def module_channels(self, prefix: str) -> np.ndarray:
        """Stack ``prefix_0, prefix_1, ...`` into a (samples, modules) array."""
        cols = []
        k = 0
        while f"{prefix}_{k}" in self.channels:
            cols.append(self.channels[f"{prefix}_{k}"])
            k += 1
        return np.column_stack(cols) if cols else np.empty((len(self), 0))

    def window(self, t_start: float, t_stop: float) -> "Waveform":
        t = self.channels["time"]
        mask = (t >= t_start - 1e-15) & (t < t_stop - 1e-15)
        return Waveform({k: v[mask] for k, v in self.channels.items()})


# -- simulation --------------------------------------------------------------

@dataclass
class SimResult:
    waveform: Waveform
    report: Any
    final_state: SimState
    final_config: ConverterConfig
    grid: StepGrid
    energy: dict[str, float]
    events: dict[str, Any]


_PARAM_ORDER = ("v_dc", "c_module", "l_leak", "l_mag", "r_w", "r_batt", "r_load", "r_path", "l_load")


def kernel_params(config: ConverterConfig) -> np.ndarray:
    if config.r_batt <= 0:
        raise ConfigError("r_batt must be > 0: an ideal source across the capacitor string is singular")
    return np.array([
        config.v_dc, config.c_module, config.l_leak, config.l_mag,
        winding_path_resistance(config), config.r_batt, config.r_load,
        config.r_on_tap + config.r_on_pwm, config.l_load,
    ], dtype=float)


def _physical_tap(config: ConverterConfig, active_tap: int) -> int:
    return 0 if active_tap == 0 else config.active_modules[active_tap - 1] + 1


def _stored_energy(x: np.ndarray, m: int, config: ConverterConfig) -> float:
    v, i = x[:m], x[m:2 * m]
    return float(0.5 * config.c_module * np.dot(v, v) + 0.5 * config.l_leak * np.dot(i, i)
                 + 0.5 * config.l_mag * x[2 * m] ** 2 + 0.5 * config.l_load * x[2 * m + 1] ** 2)


def simulate(scenario: Scenario, *, backend: str | None = None, with_report: bool = True) -> SimResult:
    """Integrate ``scenario`` and return the waveform, report and final state."""
    from . import analysis

    advance = kernels.advance if backend is None else kernels.load_backend(backend)
    config = scenario.config
    dt = scenario.dt
    grid = StepGrid.for_config(config, dt)
    n_total = max(1, round(scenario.duration / dt))
    decim = int(scenario.record_decimation)
    m_phys = config.module_count

    n_rows = -(-n_total // decim)
    rec = np.full((n_rows, 2 * m_phys + 3), np.nan)
    p_steps = grid.bridge_period
    n_prow = -(-n_total // p_steps)
    rec_period = np.full((n_prow + 1, m_phys), np.nan)
    sel_rows = np.zeros((n_rows, 4))  # v_ref, tap_low, tap_high, duty

    if scenario.initial_v_cap is not None:
        v0 = np.array(scenario.initial_v_cap, dtype=float)
    else:
        v0 = np.full(config.active_count, config.v_dc / config.active_count)
    m = len(v0)
    x = np.concatenate([v0, np.zeros(m), [0.0, 0.0]])
    acc = np.zeros(11)
    acc[8] = -1.0
    e_stored0 = _stored_energy(x, m, config)
    e_discarded = 0.0

    faults = sorted((round(t / dt), k) for t, k in scenario.fault_events)
    breaks = set(range(0, n_total, grid.n_tap)) | {n for n, _ in faults if n < n_total}
    breaks = sorted(breaks) + [n_total]

    ladder = nominal_tap_ladder(config)
    phys = np.array(config.active_modules, dtype=np.int_)
    params = kernel_params(config)
    sel: TapSelection | None = None
    phys_sel: set[int] | None = None
    v_ref = float("nan")
    tap_device_toggles = 0
    tap_transitions = 0
    max_toggles = 0
    bridge_device_toggles = 0.0
    fault_log = []

    for a, b in zip(breaks[:-1], breaks[1:]):
        for n_f, k in [f for f in faults if f[0] == a]:
            j = config.active_modules.index(k)
            before = _stored_energy(x, m, config)
            v = np.delete(x[:m], j)
            i = np.delete(x[m:2 * m], j)
            config = apply_fault_bypass(config, k)
            m -= 1
            x = np.concatenate([v, i, [i.sum(), x[-1]]])
            e_discarded += before - _stored_energy(x, m, config)
            ladder = nominal_tap_ladder(config)
            phys = np.array(config.active_modules, dtype=np.int_)
            params = kernel_params(config)
            fault_log.append({"time": n_f * dt, "module": k})
            sel = None  # force a fresh decision on the new ladder
        if sel is None or a % grid.n_tap == 0:
            v_ref = float(scenario.reference(a * dt))
            new = select_taps(v_ref, ladder)
            new_phys = {_physical_tap(config, new.low_tap), _physical_tap(config, new.high_tap)}
            if phys_sel is not None and new_phys != phys_sel:
                toggles = len(new_phys ^ phys_sel)
                tap_device_toggles += toggles
                tap_transitions += 1
                max_toggles = max(max_toggles, toggles)
            sel, phys_sel = new, new_phys
        n_high = round(sel.duty * grid.n_pwm)
        flips_before = acc[9]
        failed = advance(x, m, a, b - a, dt, grid.n_half, grid.n_pwm, n_high,
                         sel.low_tap, sel.high_tap, params, phys, m_phys,
                         rec, decim, rec_period, p_steps, acc)
        bridge_device_toggles += (acc[9] - flips_before) * 4 * m
        r0, r1 = -(-a // decim), -(-b // decim)
        sel_rows[r0:r1] = (v_ref, sel.low_tap, sel.high_tap, sel.duty)
        if failed >= 0:
            raise SimulationError(f"state diverged (non-finite) at t = {failed * dt:.6g} s")

    # partial last record window
    if n_total % decim:
        rec[-1, 2 * m_phys + 2] = acc[6] / (n_total % decim)
    if n_total % p_steps == 0:
        rec_period[n_prow, phys] = x[:m]
    else:
        rec_period = rec_period[:n_prow]

    time = np.arange(n_rows) * decim * dt
    ch: dict[str, np.ndarray] = {"time": time, "v_out": rec[:, 2 * m_phys + 2], "v_ref": sel_rows[:, 0]}
    for k in range(m_phys):
        ch[f"v_cap_{k}"] = np.nan_to_num(rec[:, k], nan=0.0)
    ch["i_load"] = rec[:, 2 * m_phys + 1]
    for k in range(m_phys):
        ch[f"i_wind_{k}"] = np.nan_to_num(rec[:, m_phys + k], nan=0.0)
    ch["i_mag"] = rec[:, 2 * m_phys]
    ch["tap_low"] = sel_rows[:, 1]
    ch["tap_high"] = sel_rows[:, 2]
    ch["duty"] = sel_rows[:, 3]
    bridge = {"time": np.arange(len(rec_period)) * p_steps * dt}
    for k in range(m_phys):
        bridge[f"v_cap_{k}"] = rec_period[:, k]
    waveform = Waveform(ch, bridge)

    e_stored1 = _stored_energy(x, m, config)
    energy = {
        "source": float(acc[0]),
        "load": float(acc[1]),
        "battery_loss": float(acc[2]),
        "winding_loss": float(acc[3]),
        "path_loss": float(acc[4]),
        "stored_initial": e_stored0,
        "stored_final": e_stored1,
        "fault_discarded": e_discarded,
    }
    energy["balance_error"] = (energy["source"] - energy["load"] - energy["battery_loss"]
                               - energy["winding_loss"] - energy["path_loss"]
                               - (e_stored1 - e_stored0) - e_discarded)
    events = {
        "bridge": int(round(bridge_device_toggles)),
        "tap": tap_device_toggles,
        "pwm": 2 * int(acc[10]),
        "tap_transitions": tap_transitions,
        "max_tap_toggles_per_transition": max_toggles,
        "faults": fault_log,
        "power_balance_max_residual": float(acc[5]),
    }
    final_state = SimState.from_vector(x)
    result = SimResult(waveform, None, final_state, config, grid, energy, events)
    if with_report:
        result.report = analysis.build_report(result, scenario)
    return result


# -- gate driver ---------------------------------------------------------------

@dataclass
class GateDriverRun:
    trajectory: dict[str, np.ndarray]
    final_state: GateDriverState
    report: dict[str, Any]


def _gate_rk4(y: np.ndarray, p: GateDriverParams, pol: int, h: float) -> np.ndarray:
    def f(z):
        return gate_driver_derivatives(GateDriverState(z[0], z[1]), p, pol)

    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def run_gate_driver(p: GateDriverParams, periods: int, dt: float) -> GateDriverRun:
    """Drive the gate loop through ``periods`` reference periods.

    Each transition segment is integrated with RK4 on ``ceil(duration/dt)``
    equal sub-steps so segment ends land exactly on the schedule. At the
    start of a hold interval the clamp pins the gate to its level and takes
    over the loop current; any energy mismatch at that instant is booked as
    dissipated (or as delivered if the clamp has to add energy).
    """
    if periods < 1:
        raise ValueError("periods must be >= 1")
    if not dt > 0:
        raise ValueError("dt must be > 0")
    transition = min(t for t in (p.t_rise, p.t_fall) if t > 0) if (p.t_rise > 0 or p.t_fall > 0) else None
    if transition is not None and dt > transition / 20 * (1 + 1e-9):
        raise ValueError(f"dt = {dt:.3g} s exceeds t_rise/20 = {transition / 20:.3g} s")

    y = np.array([-p.v_gd, 0.0, 0.0, 0.0])
    clamp = True
    ts, vs, is_, cl, refs = [0.0], [y[0]], [y[1]], [True], [gate_waveform_at(0.0, p)]
    per_period = []
    stored_at_start = []
    rise_times = []
    t0 = 0.0
    for period in range(periods):
        stored_at_start.append(gate_stored_energy(GateDriverState(y[0], y[1]), p))
        diss0, deliv0 = y[2], y[3]
        returned = 0.0
        for name, start, dur, v_a, v_b, pol, clamped in p.segments():
            t_seg = t0 + start
            if clamped:
                before = gate_stored_energy(GateDriverState(y[0], y[1]), p)
                y[0], y[1] = v_b, 0.0
                after = gate_stored_energy(GateDriverState(y[0], y[1]), p)
                if before >= after:
                    y[2] += before - after
                else:
                    y[3] += after - before
                clamp = True
                if dur > 0:
                    ts.append(t_seg + dur)
                    vs.append(y[0]); is_.append(y[1]); cl.append(True)
                    refs.append(gate_waveform_at(t_seg + dur, p))
                continue
            clamp = False
            if dur <= 0:
                continue
            n_sub = max(1, math.ceil(dur / dt - 1e-9))
            h = dur / n_sub
            peak_time = None
            for j in range(n_sub):
                i_prev = y[1]
                u = pol * p.turns_ratio * p.v_gd
                y_new = _gate_rk4(y, p, pol, h)
                # energy handed back to the supply is tracked separately
                returned += max(-u * 0.5 * (i_prev + y_new[1]), 0.0) * h
                y = y_new
                t_now = t_seg + (j + 1) * h
                if name == "rise" and peak_time is None and i_prev > 0 >= y[1]:
                    peak_time = t_now - h + h * i_prev / (i_prev - y[1]) - t_seg
                ts.append(t_now); vs.append(y[0]); is_.append(y[1]); cl.append(False)
                refs.append(gate_waveform_at(t_now, p))
                if not np.all(np.isfinite(y)):
                    raise SimulationError(f"gate driver diverged at t = {t_now:.6g} s")
            if name == "rise":
                if peak_time is None:
                    # peak not reached inside the window: extrapolate the current zero crossing
                    di = (-p.r_loop * y[1] - y[0]) / p.l_mag_gd
                    peak_time = dur - y[1] / di if di < 0 else dur
                rise_times.append(peak_time)
        t0 += p.period
        per_period.append({
            "delivered": float(y[3] - deliv0),
            "dissipated": float(y[2] - diss0),
            "returned": float(returned),
        })
    delivered = float(sum(r["delivered"] for r in per_period))
    dissipated = float(sum(r["dissipated"] for r in per_period))
    ratios = [r["dissipated"] / r["delivered"] if r["delivered"] > 0 else 0.0 for r in per_period]
    report = {
        "periods": periods,
        "dt": dt,
        "delivered": delivered,
        "dissipated": dissipated,
        "loss_ratio": dissipated / delivered if delivered > 0 else 0.0,
        "max_period_loss_ratio": max(ratios),
        "per_period": per_period,
        "rise_time": float(np.mean(rise_times)) if rise_times else None,
        "rise_time_expected": p.t_rise,
        "stored_energy_period_start": stored_at_start,
    }
    final = GateDriverState(float(y[0]), float(y[1]), clamp, float(y[2]), float(y[3]))
    traj = {
        "time": np.array(ts), "v_gate": np.array(vs), "i_lmag": np.array(is_),
        "clamp": np.array(cl, dtype=float), "v_ref": np.array(refs),
    }
    return GateDriverRun(traj, final, report)


def gate_energy_estimate(config: ConverterConfig, grid: StepGrid, duration: float) -> dict[str, float]:
    """Gate-drive energy over ``duration`` from a short run of the default driver."""
    p = default_gate_params(grid.f_bridge)
    run = run_gate_driver(p, periods=4, dt=p.t_rise / 50)
    periods = duration * grid.f_bridge
    return {
        "delivered": run.report["delivered"] / 4 * periods,
        "dissipated": run.report["dissipated"] / 4 * periods,
    }
