import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dcat.modulation import (
    GateDriverParams,
    PwmLevel,
    TapSelection,
    bridge_phase_at,
    default_gate_params,
    gate_waveform_at,
    pwm_gate_at,
    resonant_transition_time,
    select_taps,
    tap_device_states,
    tap_transition_toggle_count,
)

LADDER = [0.0, 100.0, 200.0, 300.0, 400.0]


@pytest.mark.parametrize("v_ref, expected", [
    (0.0, TapSelection(0, 1, 0.0)),
    (50.0, TapSelection(0, 1, 0.5)),
    (100.0, TapSelection(1, 2, 0.0)),
    (275.0, TapSelection(2, 3, 0.75)),
    (399.999, TapSelection(3, 4, (399.999 - 300.0) / 100.0)),
    (400.0, TapSelection(4, 4, 1.0)),
    (450.0, TapSelection(4, 4, 1.0)),
    (-10.0, TapSelection(0, 0, 0.0)),
])
def test_select_taps_examples(v_ref, expected):
    assert select_taps(v_ref, LADDER) == expected


@pytest.mark.parametrize("ladder", [[0.0], [0.0, 0.0], [0.0, 200.0, 100.0]])
def test_select_taps_bad_ladder(ladder):
    with pytest.raises(ValueError):
        select_taps(1.0, ladder)


def _mean(sel, ladder):
    return sel.duty * ladder[sel.high_tap] + (1 - sel.duty) * ladder[sel.low_tap]


@pytest.mark.parametrize("m", range(2, 9))
def test_select_taps_grid_identities(m):
    ladder = [400.0 * k / m for k in range(m)] + [400.0]
    for v in np.linspace(0.0, 400.0, 10_000):
        sel = select_taps(float(v), ladder)
        assert ladder[sel.low_tap] <= v <= ladder[sel.high_tap]
        assert abs(_mean(sel, ladder) - v) <= 1e-12 * 400.0


@settings(max_examples=300, deadline=None)
@given(
    steps=st.lists(st.floats(0.5, 200.0), min_size=1, max_size=9),
    frac=st.floats(0.0, 1.0),
)
def test_select_taps_mean_value_property(steps, frac):
    ladder = [0.0] + list(itertools.accumulate(steps))
    v = frac * ladder[-1]
    sel = select_taps(v, ladder)
    assert ladder[sel.low_tap] <= v <= ladder[sel.high_tap]
    assert _mean(sel, ladder) == pytest.approx(v, rel=1e-12, abs=1e-12 * ladder[-1])


def test_tap_selection_validation():
    with pytest.raises(ValueError):
        TapSelection(2, 4, 0.5)
    with pytest.raises(ValueError):
        TapSelection(1, 2, 1.5)
    with pytest.raises(ValueError):
        TapSelection(2, 2, 0.5)


def test_pwm_leading_edge():
    sel = TapSelection(1, 2, 0.25)
    f = 10e3
    high = [pwm_gate_at(t, sel, f) for t in np.arange(400) / 400 / f]
    assert high.count(PwmLevel.HIGH) == 100
    assert all(h is PwmLevel.HIGH for h in high[:100])
    assert pwm_gate_at(0.0, TapSelection(4, 4, 1.0), f) is PwmLevel.HIGH
    assert pwm_gate_at(0.0, TapSelection(0, 0, 0.0), f) is PwmLevel.LOW


def test_pwm_rejects_negative_time():
    with pytest.raises(ValueError):
        pwm_gate_at(-1.0, TapSelection(0, 1, 0.5), 10e3)


def test_bridge_phase_square_wave():
    f = 110e3
    t = np.arange(200) / 200 / f
    pol = [bridge_phase_at(float(x), f, 4).polarity for x in t]
    assert all(p == (1,) * 4 for p in pol[:100])
    assert all(p == (-1,) * 4 for p in pol[100:])
    with pytest.raises(ValueError):
        bridge_phase_at(-1e-9, f)


def _all_selections(m):
    sels = [TapSelection(0, 0, 0.0), TapSelection(m, m, 1.0)]
    sels += [TapSelection(k, k + 1, 0.5) for k in range(m)]
    return sels


def _toggles_from_device_table(a, b, m):
    sa = tap_device_states(a, m + 1)
    sb = tap_device_states(b, m + 1)
    return sum(x != y for x, y in zip(sa, sb))


@pytest.mark.parametrize("m", range(2, 9))
def test_tap_toggles_bounded_exhaustive(m):
    sels = _all_selections(m)
    for a, b in itertools.product(sels, repeat=2):
        n = tap_transition_toggle_count(a, b)
        assert n == _toggles_from_device_table(a, b, m)
        assert n <= 4


def test_tap_toggles_examples():
    assert tap_transition_toggle_count(TapSelection(1, 2, 0.1), TapSelection(2, 3, 0.1)) == 2
    assert tap_transition_toggle_count(TapSelection(0, 1, 0.1), TapSelection(2, 3, 0.1)) == 4
    assert tap_transition_toggle_count(TapSelection(1, 2, 0.1), TapSelection(1, 2, 0.9)) == 0


def test_resonant_transition_time():
    assert resonant_transition_time(10e-6, 10e-9) == pytest.approx(math.pi * math.sqrt(1e-13))
    with pytest.raises(ValueError):
        resonant_transition_time(0.0, 1e-9)


def test_gate_params_timing_must_fill_period():
    p = default_gate_params(110e3)
    assert sum(p.timings().values()) == pytest.approx(p.period, rel=1e-12)
    with pytest.raises(ValueError):
        GateDriverParams(t_rise=1e-6, t_high=1e-6, t_fall=1e-6, t_zero=1e-6, t_low=1e-6)
    assert GateDriverParams.from_dict(p.to_dict()) == p


def test_gate_waveform_levels_and_continuity():
    p = default_gate_params(110e3)
    t = np.linspace(0, 2 * p.period, 20_001)
    v = np.array([gate_waveform_at(float(x), p) for x in t])
    assert v.max() == pytest.approx(p.v_gd)
    assert v.min() == pytest.approx(-p.v_gd)
    # piecewise linear: no jumps larger than the steepest ramp allows
    slope = 2 * p.v_gd / p.t_rise
    assert np.max(np.abs(np.diff(v))) <= slope * (t[1] - t[0]) * (1 + 1e-6)
    assert gate_waveform_at(0.0, p) == pytest.approx(-p.v_gd)
    assert gate_waveform_at(p.t_rise, p) == pytest.approx(p.v_gd)


def test_gate_waveform_zero_mean_when_plateaus_match():
    p = default_gate_params(110e3, t_zero=0.0)
    t = (np.arange(100_000) + 0.5) / 100_000 * p.period
    v = np.array([gate_waveform_at(float(x), p) for x in t])
    assert abs(v.mean()) < 1e-3 * p.v_gd
