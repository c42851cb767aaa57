import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wgdoublet import io as wio
from wgdoublet.errors import FormatError
from wgdoublet.estimation import fit_avoided_crossing
from wgdoublet.response import TransmissionMap, sweep


def small_map():
    return TransmissionMap([-1e-3, 0.0, 2.5e-4], [-10.0, 0.0, 10.0, 20.0], np.arange(12.0).reshape(3, 4) - 30.123456789)


def test_map_layout():
    text = wio.map_to_csv(small_map())
    lines = text.splitlines()
    assert lines[0] == "b_mT,detuning_hz,s21_db"
    assert lines[1] == "-1,-10,-30.1234568"
    assert lines[5] == "0,-10,-26.1234568"
    assert len(lines) == 13


def test_map_round_trip_identity():
    text = wio.map_to_csv(small_map())
    again = wio.parse_map_csv(text)
    assert wio.map_to_csv(again) == text


@settings(max_examples=30)
@given(st.integers(1, 5), st.integers(2, 6), st.integers(0, 2**31))
def test_map_round_trip_random(nb, nf, seed):
    rng = np.random.default_rng(seed)
    b = np.sort(rng.choice(np.arange(-2000, 2000), nb, replace=False)) * 1e-6
    f = np.sort(rng.choice(np.arange(-40000, 40000), nf, replace=False)).astype(float)
    tmap = TransmissionMap(b, f, rng.normal(scale=20, size=(nb, nf)))
    text = wio.map_to_csv(tmap)
    parsed = wio.parse_map_csv(text)
    assert wio.map_to_csv(parsed) == text
    assert np.allclose(parsed.values, tmap.values, rtol=1e-8)


def test_trace_is_single_row_map():
    text = wio.trace_to_csv(-5e-4, [0.0, 1.0], [-3.0, -4.0])
    b, f, db = wio.parse_trace_csv(text)
    assert b == pytest.approx(-5e-4, rel=1e-12)
    assert list(f) == [0.0, 1.0] and list(db) == [-3.0, -4.0]
    with pytest.raises(FormatError):
        wio.parse_trace_csv(wio.map_to_csv(small_map()))


@pytest.mark.parametrize(
    "text, line",
    [
        ("", 1),
        ("b,f,s\n1,2,3\n", 1),
        ("b_mT,detuning_hz,s21_db\n", 2),
        ("b_mT,detuning_hz,s21_db\n0,1,2\n0,2,x\n", 3),
        ("b_mT,detuning_hz,s21_db\n0,1,2\n0,2\n", 3),
        ("b_mT,detuning_hz,s21_db\n0,1,2\n0,2,nan\n", 3),
        ("b_mT,detuning_hz,s21_db\n0,1,2\n0,2,3\n1,1,2\n1,3,3\n", 5),
        ("b_mT,detuning_hz,s21_db\n1,1,2\n1,2,3\n0,1,2\n0,2,3\n", 4),
    ],
)
def test_format_errors_report_line(text, line):
    with pytest.raises(FormatError) as info:
        wio.parse_map_csv(text)
    assert info.value.line == line


def test_summary_round_trip(bundled):
    res = sweep(bundled.medium, bundled.cavity, bundled.sweep.b_axis()[::40])
    text = wio.summary_to_csv(res)
    cols = wio.parse_summary_csv(text)
    assert list(cols) == list(wio.SUMMARY_HEADER)
    assert np.array_equal(cols["f_plus_hz"], [m[0].f_center for m in res.modes])
    assert np.array_equal(cols["f_bare_low_hz"], res.bare_low)
    assert np.allclose(cols["b_mT"] * 1e-3, res.b_points, rtol=1e-15)


def test_report_json_round_trip():
    b = np.linspace(-2e-3, 1e-3, 21)
    h = np.sqrt(3230.0**2 + (2e7 * (b + 5e-4)) ** 2)
    rep = fit_avoided_crossing(b, 1e10 + h, 1e10 - h, delta=600.0)
    text = wio.report_to_json(rep.to_dict())
    data = wio.parse_report_json(text)
    assert data["g_hz"] == rep.g and data["ratio_g_delta"] == rep.ratio_g_delta
    assert wio.report_to_json(data) == text


def test_report_json_nan_becomes_null():
    assert json.loads(wio.report_to_json({"x": float("nan")}))["x"] is None
    with pytest.raises(FormatError):
        wio.parse_report_json("[1, 2]")
