import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wgdoublet import kernels

BACKENDS = kernels.available_backends()


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")
    assert "python" in BACKENDS


@pytest.mark.skipif("cython" not in BACKENDS, reason="compiled extension not built")
@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["peak", "dip"]))
def test_pole_sum_backends_agree(seed, sign):
    rng = np.random.default_rng(seed)
    f = np.sort(rng.uniform(-1e4, 1e4, 300))
    k = rng.integers(1, 4)
    c = rng.uniform(-5e3, 5e3, k)
    w = rng.uniform(10, 2e3, k)
    a = rng.normal(size=k) + 1j * rng.normal(size=k)
    base, sgn = (0.0, 1.0) if sign == "peak" else (1.0, -1.0)
    py = kernels.pole_sum(f, c, w, a, base, sgn, backend="python")
    cy = kernels.pole_sum(f, c, w, a, base, sgn, backend="cython")
    assert np.allclose(py, cy, rtol=1e-13, atol=1e-15)
    pa = kernels.pole_sum_abs(f, c, w, a, base, sgn, backend="python")
    ca = kernels.pole_sum_abs(f, c, w, a, base, sgn, backend="cython")
    assert np.allclose(pa, ca, rtol=1e-13, atol=1e-15)
    assert np.allclose(np.abs(py), pa, rtol=1e-13, atol=1e-15)


@pytest.mark.skipif("cython" not in BACKENDS, reason="compiled extension not built")
@settings(max_examples=100)
@given(st.lists(st.integers(-5, 5), min_size=0, max_size=40), st.floats(0, 4))
def test_peak_scan_backends_agree(vals, prom):
    y = np.array(vals, dtype=float)
    ip, pp = kernels.peak_scan(y, prom, backend="python")
    ic, pc = kernels.peak_scan(y, prom, backend="cython")
    assert np.array_equal(ip, ic)
    assert np.array_equal(pp, pc)


@pytest.mark.parametrize("backend", BACKENDS)
def test_peak_scan_cases(backend):
    idx, prom = kernels.peak_scan(np.array([0, 1, 0, 3, 3, 0, 2, 0.0]), 0.5, backend=backend)
    assert list(idx) == [1, 3, 6]
    assert list(prom) == [1.0, 3.0, 2.0]
    idx, _ = kernels.peak_scan(np.array([0, 1, 0, 3, 0.0]), 2.0, backend=backend)
    assert list(idx) == [3]
    idx, _ = kernels.peak_scan(np.ones(10), 0.0, backend=backend)
    assert idx.size == 0
    # plateau that rises again is not a peak
    idx, _ = kernels.peak_scan(np.array([0, 2, 2, 3, 0.0]), 0.1, backend=backend)
    assert list(idx) == [3]


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.pole_sum([0.0], [0.0], [1.0], [1.0], backend="fortran")


def test_pure_env_selects_fallback():
    import os
    import subprocess
    import sys

    env = dict(os.environ, WGDOUBLET_PURE="1")
    out = subprocess.run([sys.executable, "-c", "import wgdoublet.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
