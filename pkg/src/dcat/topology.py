"""Converter parameterization, tap ladder and fault bypass.

Modules are indexed bottom-up: module 0 sits between tap 0 (ground) and
tap 1, module ``M - 1`` between tap ``M - 1`` and tap ``M`` (the source's
positive rail).
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Any, Mapping


class ConfigError(ValueError):
    """Raised for invalid converter or scenario parameters."""


@dataclass(frozen=True)
class ConverterConfig:
    module_count: int = 4
    v_dc: float = 400.0
    c_module: float = 10e-6
    l_leak: float = 0.15e-6
    l_mag: float = 100e-6
    r_winding: float = 10e-3
    r_on_bridge: float = 10e-3
    r_on_tap: float = 10e-3
    r_on_pwm: float = 10e-3
    r_batt: float = 50e-3
    r_load: float = 10.0
    l_load: float = 1e-3
    f_bridge: float = 110e3
    f_pwm: float = 10e3
    f_tap: float = 10e3
    bypassed_modules: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "bypassed_modules", frozenset(int(k) for k in self.bypassed_modules))
        self.validate()

    def validate(self) -> None:
        if isinstance(self.module_count, bool) or int(self.module_count) != self.module_count:
            raise ConfigError(f"module_count must be an integer, got {self.module_count!r}")
        if self.module_count < 1:
            raise ConfigError(f"module_count must be >= 1, got {self.module_count}")
        for name in ("r_winding", "r_on_bridge", "r_on_tap", "r_on_pwm", "r_batt", "r_load"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ConfigError(f"{name} must be finite and >= 0, got {value!r}")
        for name in ("v_dc", "c_module", "l_leak", "l_mag", "l_load", "f_bridge", "f_pwm", "f_tap"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise ConfigError(f"{name} must be finite and > 0, got {value!r}")
        if not self.f_tap <= self.f_pwm <= self.f_bridge:
            raise ConfigError(
                f"frequencies must satisfy f_tap <= f_pwm <= f_bridge, got "
                f"{self.f_tap}, {self.f_pwm}, {self.f_bridge}"
            )
        for k in self.bypassed_modules:
            if not 0 <= k < self.module_count:
                raise ConfigError(f"bypassed module index {k} out of range 0..{self.module_count - 1}")
        if len(self.bypassed_modules) >= self.module_count:
            raise ConfigError("at least one module must remain active")

    @property
    def active_modules(self) -> tuple[int, ...]:
        """Physical indices of non-bypassed modules, bottom-up."""
        return tuple(k for k in range(self.module_count) if k not in self.bypassed_modules)

    @property
    def active_count(self) -> int:
        return self.module_count - len(self.bypassed_modules)

    def replace(self, **changes) -> "ConverterConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        out = dataclasses.asdict(self)
        out["bypassed_modules"] = sorted(self.bypassed_modules)
        return out

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ConverterConfig":
        """Build a config from a JSON-style mapping; unknown keys are rejected."""
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config field(s): {', '.join(unknown)}")
        kwargs = {}
        for f in dataclasses.fields(cls):
            if f.name not in data:
                continue
            value = data[f.name]
            if f.name == "bypassed_modules":
                if not isinstance(value, (list, tuple, set, frozenset)):
                    raise ConfigError("bypassed_modules must be a list of module indices")
                kwargs[f.name] = frozenset(value)
            elif f.name == "module_count":
                if isinstance(value, bool) or not isinstance(value, int):
                    raise ConfigError(f"module_count must be an integer, got {value!r}")
                kwargs[f.name] = value
            else:
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise ConfigError(f"{f.name} must be a number, got {value!r}")
                kwargs[f.name] = float(value)
        return cls(**kwargs)


def nominal_tap_ladder(config: ConverterConfig) -> list[float]:
    """Evenly spaced tap voltages ``[0, V/Ma, ..., V]`` over the active modules."""
    n = config.active_count
    if n < 1:
        raise ConfigError("all modules bypassed")
    step = config.v_dc / n
    ladder = [k * step for k in range(n)]
    ladder.append(config.v_dc)
    return ladder


def apply_fault_bypass(config: ConverterConfig, module: int) -> ConverterConfig:
    """Return a copy of ``config`` with ``module`` bypassed.

    A bypassed module has its DC terminals shorted (the series string loses
    one capacitor) and its transformer winding open.
    """
    if not 0 <= module < config.module_count:
        raise ConfigError(f"module index {module} out of range 0..{config.module_count - 1}")
    if module in config.bypassed_modules:
        raise ConfigError(f"module {module} is already bypassed")
    if config.active_count < 2:
        raise ConfigError("cannot bypass the last active module")
    return config.replace(bypassed_modules=config.bypassed_modules | {module})


def switch_inventory(config: ConverterConfig) -> dict[str, int]:
    """Device counts: 4 per active bridge, ``2M - 2`` tap switches, 2 PWM switches.

    The tap-selector count follows the installed (pre-fault) ladder.
    """
    return {
        "bridge": 4 * config.active_count,
        "tap": 2 * config.module_count - 2,
        "pwm": 2,
    }
