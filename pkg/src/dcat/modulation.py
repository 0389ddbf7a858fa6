"""Switching signals: bridge square waves, tap selection, PWM and gate drive.

Everything here is a pure function of time and parameters.
"""

from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass
from typing import Sequence


class PwmLevel(str, enum.Enum):
    HIGH = "high"
    LOW = "low"


@dataclass(frozen=True)
class TapSelection:
    """Adjacent tap pair and the PWM duty spent on ``high_tap``."""

    low_tap: int
    high_tap: int
    duty: float

    def __post_init__(self):
        if self.low_tap < 0 or self.high_tap < self.low_tap or self.high_tap - self.low_tap > 1:
            raise ValueError(f"taps must be equal or adjacent and ordered, got {self.low_tap}, {self.high_tap}")
        if not 0.0 <= self.duty <= 1.0:
            raise ValueError(f"duty must lie in [0, 1], got {self.duty}")
        if self.low_tap == self.high_tap and self.duty not in (0.0, 1.0):
            raise ValueError("a single-tap selection needs duty 0 or 1")

    def conducting_tap(self, level: PwmLevel | str) -> int:
        return self.high_tap if PwmLevel(level) is PwmLevel.HIGH else self.low_tap


@dataclass(frozen=True)
class BridgePhase:
    polarity: tuple[int, ...]
    clamp: tuple[bool, ...]

    def __post_init__(self):
        if len(set(self.polarity)) > 1:
            raise ValueError("all bridges share one polarity")
        if any(s not in (1, -1) for s in self.polarity):
            raise ValueError("polarity must be +1 or -1")
        if len(self.clamp) != len(self.polarity):
            raise ValueError("clamp flags must match the module count")


def bridge_phase_at(t: float, f_bridge: float, module_count: int = 1,
                    gate: "GateDriverParams | None" = None) -> BridgePhase:
    """Polarity of every bridge at time ``t``.

    All bridges run at 50 % duty in phase, +1 over the first half period.
    Clamp flags are raised while the gate waveform sits in its zero interval
    (only when ``gate`` is given).
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    period = 1.0 / f_bridge
    s = 1 if math.fmod(t, period) < 0.5 * period else -1
    clamped = gate is not None and gate.segment_at(t)[0] == "zero"
    return BridgePhase((s,) * module_count, (clamped,) * module_count)


def _check_ladder(ladder: Sequence[float]) -> None:
    if len(ladder) < 2:
        raise ValueError("ladder needs at least two taps")
    for a, b in zip(ladder, ladder[1:]):
        if not b > a:
            raise ValueError("ladder must be strictly increasing")


def select_taps(v_ref: float, ladder: Sequence[float]) -> TapSelection:
    """Pick the two taps bracketing ``v_ref`` and the duty that averages to it.

    A reference exactly on an inner tap ``k`` selects ``(k, k + 1)`` with duty
    0, so the high tap is never below the reference. Out-of-range references
    saturate to the top tap at duty 1 or the bottom tap at duty 0.
    """
    _check_ladder(ladder)
    top = len(ladder) - 1
    if v_ref >= ladder[top]:
        return TapSelection(top, top, 1.0)
    if v_ref < ladder[0]:
        return TapSelection(0, 0, 0.0)
    k = bisect.bisect_right(ladder, v_ref) - 1
    lo, hi = ladder[k], ladder[k + 1]
    duty = (v_ref - lo) / (hi - lo)
    return TapSelection(k, k + 1, min(max(duty, 0.0), 1.0))


def pwm_gate_at(t: float, sel: TapSelection, f_pwm: float) -> PwmLevel:
    """Leading-edge PWM: high for the first ``duty`` fraction of each period."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if sel.duty >= 1.0:
        return PwmLevel.HIGH
    period = 1.0 / f_pwm
    return PwmLevel.HIGH if math.fmod(t, period) < sel.duty * period else PwmLevel.LOW


def tap_device_states(sel: TapSelection, tap_count: int) -> list[bool]:
    """On/off state of each tap device: a tap's device conducts while selected."""
    return [k in (sel.low_tap, sel.high_tap) for k in range(tap_count)]


def tap_transition_toggle_count(prev: TapSelection, next: TapSelection) -> int:
    return len({prev.low_tap, prev.high_tap} ^ {next.low_tap, next.high_tap})


# -- gate driver -------------------------------------------------------------

def resonant_transition_time(l_mag_gd: float, c_gs_total: float) -> float:
    """Half period of the gate-drive LC resonance, ``pi * sqrt(L * C)``."""
    if l_mag_gd <= 0 or c_gs_total < 0:
        raise ValueError("inductance must be > 0 and capacitance >= 0")
    return math.pi * math.sqrt(l_mag_gd * c_gs_total)


# segment name, start level, end level (in units of v_gd), supply polarity, clamped
_GATE_SEGMENTS = (
    ("rise", -1.0, 1.0, 0, False),
    ("high", 1.0, 1.0, 1, True),
    ("fall", 1.0, 0.0, 1, False),
    ("zero", 0.0, 0.0, 0, True),
    ("fall_low", 0.0, -1.0, -1, False),
    ("low", -1.0, -1.0, -1, True),
)


@dataclass(frozen=True)
class GateDriverParams:
    """Resonant gate-drive loop and its reference-waveform timing.

    One period runs rise (-V to +V), high, fall (+V to 0), zero, fall (0 to -V),
    low; the two falls share ``t_fall``. The timings must add up to
    ``1 / f_switch``. The transformer feeds ``polarity * turns_ratio * v_gd``
    into the loop, so with ``turns_ratio = 0.5`` a free half-swing starting
    from rest lands exactly on the next level.
    """

    v_gd: float = 12.0
    l_mag_gd: float = 10e-6
    c_gs_total: float = 10e-9
    turns_ratio: float = 0.5
    r_loop: float = 0.0
    t_rise: float = 0.0
    t_high: float = 0.0
    t_fall: float = 0.0
    t_zero: float = 0.0
    t_low: float = 0.0
    f_switch: float = 110e3

    def __post_init__(self):
        if not self.v_gd > 0:
            raise ValueError("v_gd must be > 0")
        if not (self.l_mag_gd > 0 and self.c_gs_total > 0 and self.f_switch > 0):
            raise ValueError("l_mag_gd, c_gs_total and f_switch must be > 0")
        if self.r_loop < 0 or self.turns_ratio <= 0:
            raise ValueError("r_loop must be >= 0 and turns_ratio > 0")
        timings = self.timings()
        if any(v < 0 for v in timings.values()):
            raise ValueError("timings must be >= 0")
        total = sum(timings.values())
        if abs(total - self.period) > 1e-9 * self.period:
            raise ValueError(f"timings sum to {total:.6g} s but the period is {self.period:.6g} s")

    @property
    def period(self) -> float:
        return 1.0 / self.f_switch

    def timings(self) -> dict[str, float]:
        return {
            "rise": self.t_rise, "high": self.t_high, "fall": self.t_fall,
            "zero": self.t_zero, "fall_low": self.t_fall, "low": self.t_low,
        }

    def segments(self):
        """Yield ``(name, start, duration, v_start, v_end, polarity, clamped)`` for one period."""
        start = 0.0
        durations = self.timings()
        for name, a, b, pol, clamped in _GATE_SEGMENTS:
            d = durations[name]
            yield name, start, d, a * self.v_gd, b * self.v_gd, pol, clamped
            start += d

    def segment_at(self, t: float):
        tau = math.fmod(t, self.period)
        if tau < 0:
            tau += self.period
        last = None
        for seg in self.segments():
            last = seg
            if seg[2] > 0 and tau < seg[1] + seg[2]:
                return seg[0], tau - seg[1], seg
        return last[0], tau - last[1], last

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    @classmethod
    def from_dict(cls, data) -> "GateDriverParams":
        unknown = sorted(set(data) - set(cls.__dataclass_fields__))
        if unknown:
            raise ValueError(f"unknown gate-driver field(s): {', '.join(unknown)}")
        for k, v in data.items():
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ValueError(f"{k} must be a number, got {v!r}")
        return cls(**{k: float(v) for k, v in data.items()})


def default_gate_params(f_switch: float = 110e3, *, v_gd: float = 12.0, l_mag_gd: float = 10e-6,
                        c_gs_total: float = 10e-9, turns_ratio: float = 0.5, r_loop: float = 0.0,
                        t_zero: float | None = None) -> GateDriverParams:
    """Gate parameters with resonant transitions and equal high/low plateaus.

    ``t_rise = t_fall`` is the LC half period, ``t_zero`` defaults to one
    transition time, and the rest of the period is split between high and low.
    """
    t_tr = resonant_transition_time(l_mag_gd, c_gs_total)
    if t_zero is None:
        t_zero = t_tr
    period = 1.0 / f_switch
    plateau = (period - 3 * t_tr - t_zero) / 2
    if plateau < 0:
        raise ValueError(
            f"transitions of {t_tr:.3g} s do not fit in a {period:.3g} s period"
        )
    return GateDriverParams(
        v_gd=v_gd, l_mag_gd=l_mag_gd, c_gs_total=c_gs_total, turns_ratio=turns_ratio,
        r_loop=r_loop, t_rise=t_tr, t_high=plateau, t_fall=t_tr, t_zero=t_zero,
        t_low=period - 3 * t_tr - t_zero - plateau, f_switch=f_switch,
    )


def gate_waveform_at(t: float, p: GateDriverParams) -> float:
    """Piecewise-linear gate reference voltage, periodic in ``p.period``."""
    _, offset, (_, _, dur, a, b, _, _) = p.segment_at(t)
    if dur <= 0:
        return b
    return a + (b - a) * min(offset / dur, 1.0)
