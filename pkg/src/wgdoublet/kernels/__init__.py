"""Hot loops behind a stable interface.

The Cython build is used when importable; set ``WGDOUBLET_PURE=1`` to force the
numpy fallback. ``BACKEND`` names the active implementation.

pole_sum(f, centers, fwhms, amps, baseline, sign)
    ``baseline + sign * sum_k amps[k] * (w_k/2) / (i (f - c_k) + w_k/2)``
pole_sum_abs(...)
    Magnitude of the above.
peak_scan(y, min_prominence)
    Indices of interior local maxima (first sample of a flat top) whose
    topographic prominence reaches ``min_prominence``, and those prominences.
"""
import os

import numpy as np

from . import _fallback

_FORCE_PURE = os.environ.get("WGDOUBLET_PURE", "") not in ("", "0")

try:
    if _FORCE_PURE:
        raise ImportError("pure backend requested")
    from . import _ckernels as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _fallback
    BACKEND = "python"


def _prep(f, centers, fwhms, amps):
    return (
        np.ascontiguousarray(f, dtype=np.float64),
        np.ascontiguousarray(centers, dtype=np.float64),
        np.ascontiguousarray(fwhms, dtype=np.float64),
        np.ascontiguousarray(amps, dtype=np.complex128),
    )


def pole_sum(f, centers, fwhms, amps, baseline=0.0, sign=1.0, backend=None):
    impl = _select(backend)
    return impl.pole_sum(*_prep(f, centers, fwhms, amps), float(baseline), float(sign))


def pole_sum_abs(f, centers, fwhms, amps, baseline=0.0, sign=1.0, backend=None):
    impl = _select(backend)
    return impl.pole_sum_abs(*_prep(f, centers, fwhms, amps), float(baseline), float(sign))


def peak_scan(y, min_prominence, backend=None):
    impl = _select(backend)
    return impl.peak_scan(np.ascontiguousarray(y, dtype=np.float64), float(min_prominence))


def available_backends():
    out = ["python"]
    if BACKEND == "cython" or _cython_importable():
        out.append("cython")
    return out


def _cython_importable():
    try:
        from . import _ckernels  # noqa: F401
    except ImportError:
        return False
    return True


def _select(backend):
    if backend is None:
        return _impl
    if backend == "python":
        return _fallback
    if backend == "cython":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown kernel backend {backend!r}")
