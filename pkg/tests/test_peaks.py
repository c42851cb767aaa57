import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wgdoublet.estimation.peaks import find_peaks, smooth_db
from wgdoublet.response import ModeResponse, s21_trace, to_db

F_C = 11.77355e9
F = np.linspace(-2e4, 2e4, 2001)


def trace(*modes, sign="peak"):
    return to_db(s21_trace([ModeResponse(F_C + c, w) for c, w in modes], F, sign, F_C))


def test_single_lorentzian():
    pk = find_peaks(F, trace((1234.0, 1206.0)))
    assert len(pk) == 1
    assert abs(pk[0].f - 1234.0) <= F[1] - F[0]
    assert pk[0].width_estimate == pytest.approx(1206.0, rel=0.02)


def test_reference_pair():
    pk = find_peaks(F, trace((3230, 1206.0), (-3230, 1206.0)))
    assert len(pk) == 2
    assert pk[0].f < pk[1].f


def test_constant_trace():
    assert find_peaks(F, np.full(F.size, -3.0)) == []


def test_dips():
    pk = find_peaks(F, trace((0.0, 1206.0), sign="dip") + 0.0, 3.0, extremum="dip")
    assert len(pk) == 1 and abs(pk[0].f) <= F[1] - F[0]


def test_flat_top_takes_lower_index():
    y = np.array([0, 1, 5, 5, 5, 1, 0.0])
    pk = find_peaks(np.arange(7.0), y, 1.0)
    assert [p.index for p in pk] == [2]


def test_prominence_threshold():
    y = np.array([0, 2, 1, 10, 0.0])
    assert [p.index for p in find_peaks(np.arange(5.0), y, 1.5)] == [3]
    assert [p.index for p in find_peaks(np.arange(5.0), y, 0.5)] == [1, 3]


def test_bad_axes():
    with pytest.raises(ValueError):
        find_peaks([0.0, 1.0], [1.0])
    with pytest.raises(ValueError):
        find_peaks([1.0, 0.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        find_peaks([0.0, 1.0], [1.0, 2.0], extremum="saddle")


def test_smoothing_preserves_constant():
    assert np.allclose(smooth_db(np.full(50, -7.0), 9), -7.0)


@settings(max_examples=50)
@given(st.lists(st.floats(-60, 10), min_size=3, max_size=60), st.floats(0, 10))
def test_peaks_sorted_and_prominent(vals, prom):
    y = np.array(vals)
    pk = find_peaks(np.arange(y.size, dtype=float), y, prom)
    fs = [p.f for p in pk]
    assert fs == sorted(fs)
    assert all(p.prominence_db >= prom for p in pk)
    assert all(0 < p.index < y.size - 1 for p in pk)
