"""Scenario files, bundled scenarios, CSV waveforms and JSON reports."""

from __future__ import annotations

import csv
import json
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .engine import Scenario, Waveform
from .modulation import GateDriverParams, default_gate_params
from .topology import ConfigError

BUNDLED = ("prototype-m4", "balance-recovery", "level-synthesis", "fault-bypass", "gatedrive-ideal")


def bundled_path(name: str) -> Path:
    stem = name[:-5] if name.endswith(".json") else name
    if stem not in BUNDLED:
        raise FileNotFoundError(f"no bundled scenario named {name!r}")
    return Path(str(resources.files("dcat") / "scenarios" / f"{stem}.json"))


def resolve(path_or_name: str | Path) -> Path:
    """A filesystem path if it exists, else a bundled scenario of that name."""
    p = Path(path_or_name)
    if p.exists():
        return p
    try:
        return bundled_path(p.name)
    except FileNotFoundError:
        raise FileNotFoundError(f"scenario file not found: {path_or_name}") from None


def read_json(path: str | Path) -> Any:
    p = resolve(path)
    try:
        return json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{p}: invalid JSON ({exc})") from None


def load_scenario(path: str | Path) -> Scenario:
    return Scenario.from_dict(read_json(path))


_TIMINGS = ("t_rise", "t_high", "t_fall", "t_zero", "t_low")


def gate_params_from_dict(data: Mapping[str, Any]) -> GateDriverParams:
    """Gate parameters; when no timing is given the resonant defaults are filled in."""
    if not isinstance(data, Mapping):
        raise ConfigError("gate-driver parameters must be a JSON object")
    try:
        if any(k in data for k in _TIMINGS):
            return GateDriverParams.from_dict(data)
        unknown = sorted(set(data) - set(GateDriverParams.__dataclass_fields__))
        if unknown:
            raise ValueError(f"unknown gate-driver field(s): {', '.join(unknown)}")
        kwargs = {k: float(v) for k, v in data.items() if k != "f_switch"}
        return default_gate_params(float(data.get("f_switch", 110e3)), **kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_gate_params(path: str | Path) -> GateDriverParams:
    return gate_params_from_dict(read_json(path))


def write_csv(columns: Mapping[str, np.ndarray], path: str | Path) -> None:
    """Header row of channel names, one row per sample, LF line endings."""
    names = list(columns)
    data = np.column_stack([np.asarray(columns[n], dtype=float) for n in names])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for row in data:
            w.writerow([repr(float(v)) for v in row])


def read_csv(path: str | Path) -> Waveform:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    names = rows[0]
    data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float).reshape(-1, len(names))
    return Waveform({n: data[:, i].copy() for i, n in enumerate(names)})


def write_json(obj: Any, path: str | Path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, allow_nan=False) + "\n", encoding="utf-8")
