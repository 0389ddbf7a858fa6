"""Network equations of the converter and of the resonant gate-drive loop.

Converter network (active modules only, bottom-up):

* AC side: winding ``m`` sees the EMF ``s * v_cap[m]`` through its leakage
  inductance and path resistance ``r_winding + 2 * r_on_bridge`` into a
  common star node; the star node carries the magnetizing inductance. The
  star voltage is eliminated algebraically from
  ``l_mag * di_mag/dt = v_star`` and ``i_mag = sum(i_wind)``.
* DC side: the source ``v_dc`` behind ``r_batt`` drives the series string.
  Capacitor ``m`` carries its segment current minus the bridge input
  current ``s * i_wind[m]``. The load draws ``i_load`` from the conducting
  tap, so segments below that tap carry ``i_load`` less.
* Load: ``l_load * di_load/dt = v_tap - i_load * (r_load + r_on_tap + r_on_pwm)``.

The stand-alone python implementation here is the reference the stepping
kernels are tested against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .modulation import BridgePhase, GateDriverParams, PwmLevel, TapSelection
from .topology import ConfigError, ConverterConfig


@dataclass
class SimState:
    v_cap: np.ndarray
    i_wind: np.ndarray
    i_mag: float = 0.0
    i_load: float = 0.0

    def __post_init__(self):
        self.v_cap = np.asarray(self.v_cap, dtype=float)
        self.i_wind = np.asarray(self.i_wind, dtype=float)
        if self.v_cap.shape != self.i_wind.shape or self.v_cap.ndim != 1:
            raise ValueError("v_cap and i_wind must be 1-d and equally long")

    @classmethod
    def balanced(cls, config: ConverterConfig) -> "SimState":
        n = config.active_count
        return cls(np.full(n, config.v_dc / n), np.zeros(n))

    @classmethod
    def from_vector(cls, x: np.ndarray) -> "SimState":
        n = (len(x) - 2) // 2
        return cls(x[:n].copy(), x[n:2 * n].copy(), float(x[2 * n]), float(x[2 * n + 1]))

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.v_cap, self.i_wind, [self.i_mag, self.i_load]])

    @property
    def taps(self) -> np.ndarray:
        """Tap node voltages, ``[0, v0, v0 + v1, ...]``."""
        return np.concatenate([[0.0], np.cumsum(self.v_cap)])

    def string_currents(self, config: ConverterConfig, conducting_tap: int) -> np.ndarray:
        """Series-string current in each capacitor segment (KCL, not stored)."""
        i_b = (config.v_dc - self.v_cap.sum()) / config.r_batt
        seg = np.full(len(self.v_cap), i_b)
        seg[:conducting_tap] -= self.i_load
        return seg


@dataclass(frozen=True)
class PowerTerms:
    source: float
    load: float
    battery_loss: float
    winding_loss: float
    path_loss: float
    stored_rate: float

    @property
    def residual(self) -> float:
        return self.source - self.load - self.battery_loss - self.winding_loss - self.path_loss - self.stored_rate


def winding_path_resistance(config: ConverterConfig) -> float:
    return config.r_winding + 2.0 * config.r_on_bridge


def derivatives(state: SimState, config: ConverterConfig, phase: BridgePhase,
                sel: TapSelection, pwm_state: PwmLevel | str) -> tuple[SimState, PowerTerms]:
    """Time derivative of ``state`` plus the instantaneous power terms."""
    n = config.active_count
    if len(state.v_cap) != n:
        raise ValueError(f"state has {len(state.v_cap)} modules, config has {n} active")
    if config.r_batt <= 0:
        raise ConfigError("r_batt must be > 0: an ideal source across the capacitor string is singular")
    if sel.high_tap > n:
        raise ValueError("selection does not fit the active ladder")
    # bridges share one polarity
    s = float(phase.polarity[0])

    r_w = winding_path_resistance(config)
    r_path = config.r_on_tap + config.r_on_pwm
    tap = sel.conducting_tap(pwm_state)

    emf = s * state.v_cap
    v_star = np.sum(emf - r_w * state.i_wind) / (n + config.l_leak / config.l_mag)
    di_wind = (emf - r_w * state.i_wind - v_star) / config.l_leak
    di_mag = v_star / config.l_mag

    seg = state.string_currents(config, tap)
    dv_cap = (seg - s * state.i_wind) / config.c_module

    v_tap = float(np.sum(state.v_cap[:tap]))
    di_load = (v_tap - state.i_load * (config.r_load + r_path)) / config.l_load

    i_b = (config.v_dc - state.v_cap.sum()) / config.r_batt
    stored = (config.c_module * np.dot(state.v_cap, dv_cap)
              + config.l_leak * np.dot(state.i_wind, di_wind)
              + config.l_mag * state.i_mag * di_mag
              + config.l_load * state.i_load * di_load)
    power = PowerTerms(
        source=config.v_dc * i_b,
        load=config.r_load * state.i_load ** 2,
        battery_loss=config.r_batt * i_b ** 2,
        winding_loss=r_w * float(np.dot(state.i_wind, state.i_wind)),
        path_loss=r_path * state.i_load ** 2,
        stored_rate=float(stored),
    )
    return SimState(dv_cap, di_wind, float(di_mag), float(di_load)), power


def tap_device(k: int) -> str:
    return f"tap{k}"


def conduction_path_devices(sel: TapSelection, pwm_state: PwmLevel | str) -> list[str]:
    """Devices carrying the load current: one tap switch and one PWM switch."""
    level = PwmLevel(pwm_state)
    return [tap_device(sel.conducting_tap(level)), f"pwm_{level.value}"]


# -- gate driver -------------------------------------------------------------

@dataclass
class GateDriverState:
    v_gate: float = 0.0
    i_lmag: float = 0.0
    clamp_active: bool = False
    dissipated_energy: float = 0.0
    delivered_energy: float = 0.0


def gate_stored_energy(state: GateDriverState, p: GateDriverParams) -> float:
    return 0.5 * p.c_gs_total * state.v_gate ** 2 + 0.5 * p.l_mag_gd * state.i_lmag ** 2


def gate_driver_derivatives(state: GateDriverState, p: GateDriverParams, supply_polarity: int) -> np.ndarray:
    """Rates ``[dv_gate, di_lmag, d_dissipated, d_delivered]`` of the series LC loop.

    The loop is the transformer-reflected supply ``polarity * turns_ratio * v_gd``
    in series with ``l_mag_gd``, ``r_loop`` and ``c_gs_total``. While the clamp
    is closed it holds the gate and carries the loop, so nothing moves.
    """
    if supply_polarity not in (-1, 0, 1):
        raise ValueError("supply polarity must be -1, 0 or +1")
    if state.clamp_active:
        return np.zeros(4)
    u = supply_polarity * p.turns_ratio * p.v_gd
    i = state.i_lmag
    dv = i / p.c_gs_total
    di = (u - p.r_loop * i - state.v_gate) / p.l_mag_gd
    return np.array([dv, di, p.r_loop * i * i, max(u * i, 0.0)])
