"""Parameter recovery: two-pole trace fits, avoided-crossing fits, full-map pipeline.

All fits run in detuning coordinates; ``f_ref`` is added back when reporting.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .. import kernels
from ..errors import (
    ConvergenceFailure,
    DegenerateInit,
    InsufficientSpan,
    NumericalFailure,
    TooFewUsableRows,
)
from ..response import ModeResponse, TransmissionMap
from .lm import LMOptions, lm_minimize
from .peaks import Peak, find_peaks

CROSSING_PARAMS = ("f_c_hz", "g_hz", "b0_t", "slope_hz_per_t")


@dataclass
class FitOptions:
    min_prominence_db: float = 10.0
    max_iter: int = 200
    tol: float = 1e-10
    lambda0: float = 1e-3
    xtol: float = 1e-10
    ftol: float = 1e-12
    smooth: int = 21
    extremum: str = "peak"
    refine: bool = True
    workers: int | None = None

    def lm(self, x_scale=None) -> LMOptions:
        return LMOptions(
            max_iter=self.max_iter, tol=self.tol, lambda0=self.lambda0,
            xtol=self.xtol, ftol=self.ftol, x_scale=x_scale,
        )


@dataclass
class PairFit:
    """Two-pole fit of one trace; index 0 is the lower-frequency mode."""

    centers: np.ndarray
    fwhms: np.ndarray
    amplitudes: np.ndarray
    params: np.ndarray
    covariance: np.ndarray
    center_err: np.ndarray
    fwhm_err: np.ndarray
    residual_rms: float
    iterations: int
    converged: bool
    f_ref: float = 0.0

    @property
    def modes(self) -> tuple[ModeResponse, ModeResponse]:
        """(upper, lower) as ModeResponse, absolute frequencies."""
        lo = ModeResponse(self.f_ref + self.centers[0], self.fwhms[0], complex(self.amplitudes[0]))
        hi = ModeResponse(self.f_ref + self.centers[1], self.fwhms[1], complex(self.amplitudes[1]))
        return hi, lo

    @property
    def delta(self) -> float:
        return 0.25 * float(self.fwhms[0] + self.fwhms[1])

    @property
    def delta_err(self) -> float:
        return 0.25 * float(math.hypot(self.fwhm_err[0], self.fwhm_err[1]))


@dataclass
class FitReport:
    g: float
    delta: float | None
    b0: float | None
    slope: float | None
    f_c: float
    ratio_g_delta: float | None
    covariance: np.ndarray
    residual_rms: float
    iterations: int
    converged: bool
    n_rows_used: int = 0
    n_rows_dropped: int = 0
    param_names: tuple = CROSSING_PARAMS
    stderr: dict = field(default_factory=dict)
    delta_err: float | None = None
    kind: str = "branches"

    def __post_init__(self):
        if self.g < 0:
            raise ValueError("g must be >= 0")
        if self.delta is not None and not self.delta > 0:
            raise ValueError("delta must be > 0 when fitted")

    def to_dict(self) -> dict:
        def num(x):
            return None if x is None else float(x)

        out = {
            "kind": self.kind,
            "g_hz": num(self.g),
            "delta_hz": num(self.delta),
            "b0_t": num(self.b0),
            "slope_hz_per_t": num(self.slope),
            "f_c_hz": num(self.f_c),
            "ratio_g_delta": num(self.ratio_g_delta),
            "residual_rms": num(self.residual_rms),
            "converged": bool(self.converged),
            "iterations": int(self.iterations),
            "n_rows_used": int(self.n_rows_used),
            "n_rows_dropped": int(self.n_rows_dropped),
            "delta_err_hz": num(self.delta_err),
        }
        for k, v in self.stderr.items():
            out[_err_key(k)] = num(v)
        out["covariance_params"] = list(self.param_names)
        out["covariance"] = [[float(v) for v in row] for row in np.atleast_2d(self.covariance)]
        return out


def _err_key(name: str) -> str:
    # g_hz -> g_err_hz, slope_hz_per_t -> slope_err_hz_per_t
    head, _, unit = name.partition("_")
    if name.startswith("f_c_"):
        return "f_c_err_" + name[len("f_c_"):]
    return f"{head}_err_{unit}"


# ---------------------------------------------------------------- pair fits


def _pair_model(sign):
    """Power model ``|S21|^2 + floor``; the floor absorbs the mean noise power."""
    baseline, sgn = (0.0, 1.0) if sign == "peak" else (1.0, -1.0)

    def model(f, p):
        c = p[0:2]
        w = np.abs(p[2:4])
        a = np.abs(p[4:6])
        amps = np.array([a[0], a[1] * np.exp(1j * p[6])])
        if sign == "dip":
            amps = amps * np.exp(1j * p[7])
        mag = kernels.pole_sum_abs(f, c, w, amps, baseline, sgn)
        return mag * mag + p[-1]

    return model


def _init_from_peaks(peaks, f, y_lin, sign):
    if len(peaks) < 2:
        raise DegenerateInit(f"need two initial extrema, found {len(peaks)}")
    top = sorted(peaks, key=lambda pk: pk.prominence_db, reverse=True)[:2]
    top.sort(key=lambda pk: pk.f)
    centers = [pk.f for pk in top]
    widths = [pk.width_estimate for pk in top]
    if sign == "peak":
        amps = [float(y_lin[pk.index]) for pk in top]
    else:
        amps = [float(min(1.0, max(1.0 - y_lin[pk.index], 1e-3))) for pk in top]
    return centers, widths, amps


def fit_lorentzian_pair(
    f_axis,
    s21_db,
    init=None,
    *,
    sign: str = "peak",
    f_ref: float = 0.0,
    options: FitOptions | None = None,
) -> PairFit:
    """Fit the two-pole transmission model to one dB trace.

    The fit runs on linear power, ``|S21|^2 + floor``, so additive noise
    does not bias the linewidths. ``init`` is a list of Peak objects or a
    tuple ``(centers, fwhms, amplitudes)`` in detuning Hz; when omitted the
    trace's own extrema are used. Free parameters are both centers, both
    FWHMs, both amplitude magnitudes, the relative phase (plus a common phase
    for dips) and the floor.
    """
    opts = options or FitOptions(extremum=sign)
    f = np.asarray(f_axis, dtype=np.float64)
    y_db = np.asarray(s21_db, dtype=np.float64)
    y = 10.0 ** (y_db / 20.0)
    power = y * y
    if init is None:
        init = find_peaks(f, y_db, opts.min_prominence_db, sign, opts.smooth)
    if isinstance(init, (list, tuple)) and init and isinstance(init[0], Peak):
        centers, widths, amps = _init_from_peaks(list(init), f, y, sign)
    elif isinstance(init, (list, tuple)) and len(init) == 3 and not isinstance(init[0], Peak):
        centers, widths, amps = (list(map(float, v)) for v in init)
    else:
        raise DegenerateInit("need two initial extrema, found fewer")
    step = float(np.min(np.diff(f))) if f.size > 1 else 0.0
    if abs(centers[1] - centers[0]) <= step:
        raise DegenerateInit(
            f"initial centers {centers[0]:.6g} and {centers[1]:.6g} Hz coincide within one grid step"
        )
    # work relative to the midpoint for conditioning and translation covariance
    mid = 0.5 * (centers[0] + centers[1])
    fl = f - mid
    p0 = [centers[0] - mid, centers[1] - mid, widths[0], widths[1], amps[0], amps[1], 0.0]
    if sign == "dip":
        p0.append(0.0)
    p0.append(0.0)
    wscale = max(widths)
    ascale = max(amps)
    x_scale = np.array(
        [wscale, wscale, wscale, wscale, ascale, ascale, 1.0] + ([1.0] if sign == "dip" else []) + [ascale**2]
    )
    model = _pair_model(sign)
    res = lm_minimize(lambda p: model(fl, p) - power, np.array(p0), opts.lm(x_scale))
    if not res.converged:
        raise ConvergenceFailure("two-pole fit did not converge", res.diagnostics())
    p = res.params.copy()
    c = p[0:2] + mid
    w = np.abs(p[2:4])
    a = np.abs(p[4:6])
    amps_c = np.array([a[0], a[1] * np.exp(1j * p[6])], dtype=np.complex128)
    if sign == "dip":
        amps_c = amps_c * np.exp(1j * p[7])
    err = np.sqrt(np.clip(np.diag(res.covariance), 0.0, None))
    order = np.argsort(c, kind="stable")
    return PairFit(
        centers=c[order],
        fwhms=w[order],
        amplitudes=amps_c[order],
        params=p,
        covariance=res.covariance,
        center_err=err[0:2][order],
        fwhm_err=err[2:4][order],
        residual_rms=res.residual_rms,
        iterations=res.iterations,
        converged=res.converged,
        f_ref=f_ref,
    )


# ------------------------------------------------------------ crossing fits


def _hyperbola(b_mt, p):
    fc, g, b0, slope = p
    return np.sqrt(g * g + (slope * (b_mt - b0)) ** 2)


def fit_avoided_crossing(
    b,
    f_plus,
    f_minus,
    init: dict | None = None,
    *,
    f_ref: float = 0.0,
    options: FitOptions | None = None,
    delta: float | None = None,
    delta_err: float | None = None,
) -> FitReport:
    """Fit ``f_pm(b) = f_c +- sqrt(g^2 + slope^2 (b - b0)^2)`` to branch data.

    ``b`` in tesla, branches in Hz (detuning from ``f_ref`` or absolute with
    ``f_ref=0``). ``init`` may override any of ``f_c``, ``g``, ``b0``,
    ``slope`` (SI units, ``f_c`` as detuning). Raises InsufficientSpan when
    the gap minimum is not bracketed by data on both sides.
    """
    opts = options or FitOptions()
    b = np.asarray(b, dtype=np.float64)
    fp = np.asarray(f_plus, dtype=np.float64)
    fm = np.asarray(f_minus, dtype=np.float64)
    if not (b.shape == fp.shape == fm.shape and b.ndim == 1):
        raise ValueError("b, f_plus and f_minus must be 1-D arrays of equal length")
    if b.size < 4:
        raise InsufficientSpan(f"need at least 4 field points, got {b.size}", {"n_points": int(b.size)})
    if not (np.all(np.isfinite(b)) and np.all(np.isfinite(fp)) and np.all(np.isfinite(fm))):
        raise ValueError("branch data must be finite")
    order = np.argsort(b, kind="stable")
    b, fp, fm = b[order], fp[order], fm[order]
    upper = np.maximum(fp, fm)
    lower = np.minimum(fp, fm)
    sep = upper - lower
    i0 = int(np.argmin(sep))
    if i0 == 0 or i0 == b.size - 1 or np.ptp(sep) == 0.0:
        raise InsufficientSpan(
            "gap minimum lies at the edge of the field range; b0 and slope are unidentifiable",
            {"argmin_index": i0, "n_points": int(b.size), "b_min_t": float(b[0]), "b_max_t": float(b[-1])},
        )
    center = float(np.mean(0.5 * (upper + lower)))
    up = upper - center
    lo = lower - center
    g0 = 0.5 * sep[i0]
    h_first, h_last = 0.5 * sep[0], 0.5 * sep[-1]
    rise = math.sqrt(max(h_first**2 - g0**2, 0.0)) + math.sqrt(max(h_last**2 - g0**2, 0.0))
    slope0 = rise / (b[-1] - b[0])
    init = dict(init or {})
    b_mt = b * 1e3
    p0 = np.array([
        init.get("f_c", center) - center,
        init.get("g", g0),
        init.get("b0", b[i0]) * 1e3,
        init.get("slope", slope0) * 1e-3,
    ])
    if p0[3] == 0.0:
        raise InsufficientSpan("branches do not tune with field (zero slope)", {"slope_init": 0.0})

    def resid(p):
        h = _hyperbola(b_mt, p)
        return np.concatenate([p[0] + h - up, p[0] - h - lo])

    x_scale = np.array([max(g0, 1.0), max(g0, 1.0), max(np.ptp(b_mt), 1e-12), max(abs(p0[3]), 1e-12)])
    res = lm_minimize(resid, p0, opts.lm(x_scale))
    fc_d, g, b0_mt, slope_mt = res.params
    if not res.converged:
        raise ConvergenceFailure("avoided-crossing fit did not converge", res.diagnostics())
    b0 = b0_mt * 1e-3
    if not (b[0] < b0 < b[-1]) or np.sum(b < b0) == 0 or np.sum(b > b0) == 0:
        raise InsufficientSpan(
            "fitted crossing field is not bracketed by the data",
            {"b0_t": float(b0), "b_min_t": float(b[0]), "b_max_t": float(b[-1])},
        )
    scale = np.diag([1.0, 1.0, 1e-3, 1e3])
    cov = scale @ res.covariance @ scale
    err = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    g = abs(g)
    ratio = g / delta if delta else None
    return FitReport(
        g=g,
        delta=delta,
        b0=b0,
        slope=abs(slope_mt) * 1e3,
        f_c=f_ref + center + fc_d,
        ratio_g_delta=ratio,
        covariance=cov,
        residual_rms=res.residual_rms,
        iterations=res.iterations,
        converged=res.converged,
        n_rows_used=int(b.size),
        stderr=dict(zip(CROSSING_PARAMS, err.tolist())),
        delta_err=delta_err,
    )


# ---------------------------------------------------------------- pipelines


def _row_branches(f, row, opts):
    peaks = find_peaks(f, row, opts.min_prominence_db, opts.extremum, opts.smooth)
    if len(peaks) != 2:
        return None
    if not opts.refine:
        return (peaks[1].f, peaks[0].f), None
    try:
        pf = fit_lorentzian_pair(f, row, peaks, sign=opts.extremum, options=opts)
    except NumericalFailure:
        return None
    return (pf.centers[1], pf.centers[0]), pf


def fit_map(tmap: TransmissionMap, options: FitOptions | None = None, f_ref: float | None = None) -> FitReport:
    """Rows -> extrema -> branches -> hyperbola; delta from the row nearest b0.

    Rows with other than two extrema (or whose refinement fails) are dropped
    and counted. With ``refine`` each row's branch frequencies come from a
    two-pole fit instead of the raw extremum positions.
    """
    opts = options or FitOptions()
    f_ref = tmap.f_ref if f_ref is None else f_ref
    f = tmap.f_axis
    rows = range(tmap.b_axis.size)
    if opts.workers and opts.workers > 1:
        with ThreadPoolExecutor(max_workers=opts.workers) as ex:
            found = list(ex.map(lambda i: _row_branches(f, tmap.values[i], opts), rows))
    else:
        found = [_row_branches(f, tmap.values[i], opts) for i in rows]
    used = [i for i, r in enumerate(found) if r is not None]
    dropped = tmap.b_axis.size - len(used)
    if len(used) < 4:
        raise TooFewUsableRows(
            f"only {len(used)} rows show exactly two extrema (need 4)",
            {"n_rows_used": len(used), "n_rows_dropped": dropped},
        )
    b = tmap.b_axis[used]
    fp = np.array([found[i][0][0] for i in used])
    fm = np.array([found[i][0][1] for i in used])
    report = fit_avoided_crossing(b, fp, fm, f_ref=f_ref, options=opts)
    nearest = used[int(np.argmin(np.abs(b - report.b0)))]
    pf = found[nearest][1]
    if pf is None:
        pf = fit_lorentzian_pair(f, tmap.values[nearest], sign=opts.extremum, options=opts)
    report.delta = pf.delta
    report.delta_err = pf.delta_err
    report.ratio_g_delta = report.g / pf.delta
    report.n_rows_used = len(used)
    report.n_rows_dropped = dropped
    report.kind = "map"
    return report


def fit_trace(f_axis, s21_db, b: float | None = None, options: FitOptions | None = None, f_ref: float = 0.0) -> FitReport:
    """Single-trace report: g is half the fitted splitting at this field."""
    opts = options or FitOptions()
    pf = fit_lorentzian_pair(f_axis, s21_db, sign=opts.extremum, f_ref=f_ref, options=opts)
    g = 0.5 * float(pf.centers[1] - pf.centers[0])
    cov_c = pf.covariance[0:2, 0:2]
    g_err = 0.5 * math.sqrt(max(cov_c[0, 0] + cov_c[1, 1] - 2 * cov_c[0, 1], 0.0))
    return FitReport(
        g=g,
        delta=pf.delta,
        b0=b,
        slope=None,
        f_c=f_ref + 0.5 * float(pf.centers[0] + pf.centers[1]),
        ratio_g_delta=g / pf.delta,
        covariance=pf.covariance,
        residual_rms=pf.residual_rms,
        iterations=pf.iterations,
        converged=pf.converged,
        n_rows_used=1,
        param_names=("center_a_hz", "center_b_hz", "fwhm_a_hz", "fwhm_b_hz", "amp_a", "amp_b", "phase_rad")
        + (("common_phase_rad",) if opts.extremum == "dip" else ())
        + ("floor",),
        stderr={"g_hz": g_err},
        delta_err=pf.delta_err,
        kind="trace",
    )
