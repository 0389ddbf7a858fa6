"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import scenario_io
from .engine import Scenario, SimulationError, run_gate_driver, simulate
from .topology import ConfigError, ConverterConfig

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3

log = logging.getLogger("dcat")


class InputError(Exception):
    pass


def _out_dir(path: str) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InputError(f"cannot create output directory {out}: {exc}") from None
    return out


def _write_run(result, out: Path) -> None:
    scenario_io.write_csv(result.waveform.channels, out / "waveform.csv")
    scenario_io.write_csv(result.waveform.bridge_samples, out / "bridge_samples.csv")
    scenario_io.write_json(result.report.to_dict(), out / "report.json")


def cmd_simulate(scenario_path: str, out_dir: str, dt: float | None = None) -> int:
    scenario = scenario_io.load_scenario(scenario_path)
    if dt is not None:
        scenario = scenario.replace(dt=dt)
    out = _out_dir(out_dir)
    result = simulate(scenario)
    _write_run(result, out)
    rep = result.report
    print(f"wrote {out / 'waveform.csv'} ({len(result.waveform)} samples) and {out / 'report.json'}")
    print(f"thd={rep.thd} tracking_rms={rep.rms_tracking_error} spread_final={rep.capacitor_spread_final:.4g} V")
    return EXIT_OK


def _with_parameter(template: dict, parameter: str, value) -> Scenario:
    data = json.loads(json.dumps(template))
    config_fields = {f.name for f in dataclasses.fields(ConverterConfig)}
    scenario_fields = {f.name for f in dataclasses.fields(Scenario)} - {"config", "reference"}
    if parameter in config_fields:
        data.setdefault("config", {})[parameter] = value
    elif parameter in scenario_fields:
        data[parameter] = value
    elif parameter.startswith("reference."):
        data["reference"][parameter.split(".", 1)[1]] = value
    else:
        raise InputError(f"unknown sweep parameter {parameter!r}")
    return Scenario.from_dict(data)


def _sweep_one(args):
    index, scenario, out = args
    result = simulate(scenario)
    run_dir = out / f"run_{index:03d}"
    run_dir.mkdir(parents=True, exist_ok=True)
    _write_run(result, run_dir)
    return result.report.to_dict()


def cmd_sweep(template_path: str, parameter: str, values: list, out_dir: str,
              dt: float | None = None, jobs: int = 1) -> int:
    if not values:
        raise InputError("sweep needs at least one value")
    template = scenario_io.read_json(template_path)
    if not isinstance(template, dict):
        raise ConfigError("scenario template must be a JSON object")
    if dt is not None:
        template["dt"] = dt
    scenarios = [_with_parameter(template, parameter, v) for v in values]
    out = _out_dir(out_dir)
    work = [(i, sc, out) for i, sc in enumerate(scenarios)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_sweep_one, work))
    else:
        reports = [_sweep_one(w) for w in work]
    with open(out / "summary.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["run", parameter, "thd", "rms_tracking_error", "balance_settling_time",
                    "capacitor_spread_final"])
        for i, (v, rep) in enumerate(zip(values, reports)):
            w.writerow([i, json.dumps(v), _cell(rep["thd"]), _cell(rep["rms_tracking_error"]),
                        _cell(rep["balance_settling_time"]), _cell(rep["capacitor_spread_final"])])
    print(f"wrote {len(reports)} runs and {out / 'summary.csv'}")
    return EXIT_OK


def _cell(v):
    return "" if v is None else repr(float(v))


def cmd_gatedrive(params_path: str, out_dir: str, dt: float | None = None, periods: int = 10) -> int:
    params = scenario_io.load_gate_params(params_path)
    if dt is None:
        dt = params.t_rise / 50
    try:
        run = run_gate_driver(params, periods, dt)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    out = _out_dir(out_dir)
    scenario_io.write_csv(run.trajectory, out / "trajectory.csv")
    report = dict(run.report)
    report["params"] = params.to_dict()
    scenario_io.write_json(report, out / "energy.json")
    print(f"delivered={run.report['delivered']:.6g} J dissipated={run.report['dissipated']:.6g} J "
          f"ratio={run.report['loss_ratio']:.3g} rise={run.report['rise_time']}")
    return EXIT_OK


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        raise InputError(f"sweep value {text!r} is not valid JSON") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dcat", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one scenario file (or bundled scenario name)")
    p.add_argument("scenario")
    p.add_argument("--out", required=True)
    p.add_argument("--dt", type=float)

    p = sub.add_parser("sweep", help="run a scenario template over values of one parameter")
    p.add_argument("template")
    p.add_argument("parameter")
    p.add_argument("values", nargs="*", help="JSON values, e.g. 2 4 8 or '[95,105]'")
    p.add_argument("--out", required=True)
    p.add_argument("--dt", type=float)
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("gatedrive", help="simulate the resonant gate driver")
    p.add_argument("params")
    p.add_argument("--out", required=True)
    p.add_argument("--dt", type=float)
    p.add_argument("--periods", type=int, default=10)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "simulate":
            return cmd_simulate(args.scenario, args.out, args.dt)
        if args.command == "sweep":
            values = [_parse_value(v) for v in args.values]
            return cmd_sweep(args.template, args.parameter, values, args.out, args.dt, args.jobs)
        return cmd_gatedrive(args.params, args.out, args.dt, args.periods)
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InputError, ConfigError, FileNotFoundError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
