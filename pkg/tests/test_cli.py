import csv
import json

import numpy as np
import pytest

from dcat import scenario_io
from dcat.analysis import RunReport
from dcat.cli import main


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


SHORT = {
    "config": {"module_count": 4},
    "reference": {"kind": "squared_sine", "peak": 400.0, "frequency": 50.0},
    "duration": 0.002,
    "record_decimation": 22,
}


def test_simulate_writes_outputs(tmp_path):
    out = tmp_path / "run"
    assert main(["simulate", write(tmp_path / "s.json", SHORT), "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    rep = RunReport.from_dict(report)
    assert rep.switching_event_counts["bridge"] > 0
    wf = scenario_io.read_csv(out / "waveform.csv")
    assert {"time", "v_out", "v_ref", "v_cap_0", "i_load"} <= set(wf.names)
    assert (out / "bridge_samples.csv").exists()


def test_csv_round_trip_is_exact(tmp_path):
    cols = {"time": np.arange(5) * 1e-7, "x": np.array([0.1, -2.5e-12, 3.0, np.pi, 1e300])}
    scenario_io.write_csv(cols, tmp_path / "w.csv")
    back = scenario_io.read_csv(tmp_path / "w.csv")
    for k, v in cols.items():
        assert back[k].tobytes() == v.tobytes()
    assert b"\r\n" not in (tmp_path / "w.csv").read_bytes()


def test_simulate_bundled_name(tmp_path):
    sc = scenario_io.load_scenario("prototype-m4")
    assert sc.config.module_count == 4
    assert set(scenario_io.BUNDLED) >= {"prototype-m4", "balance-recovery", "fault-bypass", "gatedrive-ideal"}


@pytest.mark.parametrize("argv", [
    ["simulate", "does-not-exist.json", "--out", "x"],
    ["simulate"],
    ["frobnicate"],
])
def test_input_errors_exit_2(tmp_path, argv, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    assert main(argv) == 2


def test_invalid_scenario_exit_2(tmp_path):
    bad = dict(SHORT, config={"module_count": 4, "r_load": -1})
    assert main(["simulate", write(tmp_path / "s.json", bad), "--out", str(tmp_path / "o")]) == 2
    assert main(["simulate", write(tmp_path / "t.json", dict(SHORT, dt=1e-6)), "--out", str(tmp_path / "o")]) == 2
    (tmp_path / "broken.json").write_text("{not json")
    assert main(["simulate", str(tmp_path / "broken.json"), "--out", str(tmp_path / "o")]) == 2


def test_divergence_exit_3(tmp_path):
    blowup = dict(SHORT, config={"module_count": 4, "c_module": 1e-300})
    assert main(["simulate", write(tmp_path / "s.json", blowup), "--out", str(tmp_path / "o")]) == 3


def test_sweep_module_count_thd_decreases(tmp_path):
    template = {
        "config": {"module_count": 4},
        "reference": {"kind": "sine", "amplitude": 190.0, "frequency": 50.0, "offset": 200.0},
        "duration": 0.03,
        "record_decimation": 22,
    }
    out = tmp_path / "sweep"
    assert main(["sweep", write(tmp_path / "t.json", template), "module_count", "2", "4", "8",
                 "--out", str(out)]) == 0
    with open(out / "summary.csv") as fh:
        rows = list(csv.DictReader(fh))
    thds = [float(r["thd"]) for r in rows]
    assert thds[0] > thds[1] > thds[2]
    for i in range(3):
        assert (out / f"run_{i:03d}" / "report.json").exists()


def test_sweep_initial_unbalance(tmp_path):
    template = dict(SHORT, reference={"kind": "constant", "volts": 0.0})
    out = tmp_path / "sweep"
    rc = main(["sweep", write(tmp_path / "t.json", template), "initial_v_cap",
               "[95,105,100,100]", "[80,120,100,100]", "--out", str(out)])
    assert rc == 0
    with open(out / "summary.csv") as fh:
        assert len(list(csv.DictReader(fh))) == 2


def test_sweep_errors(tmp_path):
    t = write(tmp_path / "t.json", SHORT)
    assert main(["sweep", t, "module_count", "--out", str(tmp_path / "a")]) == 2
    assert main(["sweep", t, "warp_factor", "3", "--out", str(tmp_path / "b")]) == 2
    assert main(["sweep", t, "module_count", "four", "--out", str(tmp_path / "c")]) == 2


def test_gatedrive_outputs(tmp_path):
    out = tmp_path / "gd"
    assert main(["gatedrive", "gatedrive-ideal", "--out", str(out)]) == 0
    energy = json.loads((out / "energy.json").read_text())
    assert energy["loss_ratio"] < 1e-3
    assert (out / "trajectory.csv").exists()


def test_gatedrive_lossy_and_coarse(tmp_path):
    params = json.loads(scenario_io.bundled_path("gatedrive-ideal").read_text())
    lossy = write(tmp_path / "lossy.json", dict(params, r_loop=1.0))
    assert main(["gatedrive", lossy, "--out", str(tmp_path / "l")]) == 0
    assert json.loads((tmp_path / "l" / "energy.json").read_text())["loss_ratio"] > 0
    assert main(["gatedrive", lossy, "--out", str(tmp_path / "c"), "--dt", "1e-7"]) == 2
