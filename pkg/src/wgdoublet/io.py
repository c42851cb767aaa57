"""CSV/JSON artifacts: transmission maps, single traces, sweep summaries, fit reports."""
from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .errors import FormatError
from .response import SweepResult, TransmissionMap

MAP_HEADER = ("b_mT", "detuning_hz", "s21_db")
SUMMARY_HEADER = (
    "b_mT", "f_plus_hz", "f_minus_hz", "fwhm_plus_hz", "fwhm_minus_hz", "f_bare_up_hz", "f_bare_low_hz",
)


def _g9(x):
    return format(float(x), ".9g")


def _g17(x):
    return format(float(x), ".17g")


def map_to_csv(tmap: TransmissionMap) -> str:
    """Long format, b outer and detuning inner, 9 significant digits."""
    lines = [",".join(MAP_HEADER)]
    f_txt = [_g9(f) for f in tmap.f_axis]
    for b, row in zip(tmap.b_axis, tmap.values):
        b_txt = _g9(b * 1e3)
        lines.extend(f"{b_txt},{ft},{_g9(v)}" for ft, v in zip(f_txt, row))
    return "\n".join(lines) + "\n"


def trace_to_csv(b: float, f_axis, s21_db) -> str:
    """A trace is a one-row map."""
    return map_to_csv(TransmissionMap(np.array([b]), f_axis, np.atleast_2d(s21_db)))


def summary_to_csv(result: SweepResult) -> str:
    lines = [",".join(SUMMARY_HEADER)]
    for i, b in enumerate(result.b_points):
        up, low = result.modes[i]
        vals = (b * 1e3, up.f_center, low.f_center, up.fwhm, low.fwhm, result.bare_up[i], result.bare_low[i])
        lines.append(",".join(_g17(v) for v in vals))
    return "\n".join(lines) + "\n"


def _rows(text, header):
    if not text.strip():
        raise FormatError("file is empty", 1)
    reader = csv.reader(io.StringIO(text))
    first = next(reader, None)
    if first is None or tuple(c.strip() for c in first) != header:
        raise FormatError(f"expected header {','.join(header)}", 1)
    out = []
    for row in reader:
        lineno = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise FormatError(f"expected {len(header)} fields, got {len(row)}", lineno)
        try:
            vals = [float(c) for c in row]
        except ValueError:
            raise FormatError(f"non-numeric field in {row!r}", lineno) from None
        if not all(math.isfinite(v) for v in vals):
            raise FormatError("non-finite value", lineno)
        out.append((lineno, vals))
    if not out:
        raise FormatError("no data rows", 2)
    return out


def parse_map_csv(text: str, f_ref: float = 0.0) -> TransmissionMap:
    """Inverse of ``map_to_csv``; the grid must be complete and row-major."""
    rows = _rows(text, MAP_HEADER)
    b_vals, f_vals = [], []
    for lineno, (b, f, _) in rows:
        if not b_vals or b != b_vals[-1]:
            if b_vals and b <= b_vals[-1]:
                raise FormatError("field values must increase between blocks", lineno)
            b_vals.append(b)
    n_b = len(b_vals)
    if len(rows) % n_b:
        raise FormatError(f"{len(rows)} data rows do not form a grid over {n_b} field values", rows[-1][0])
    n_f = len(rows) // n_b
    if n_f < 2:
        raise FormatError("need at least two detuning points per field value", rows[0][0])
    f_vals = [r[1][1] for r in rows[:n_f]]
    values = np.empty((n_b, n_f))
    for k, (lineno, (b, f, v)) in enumerate(rows):
        i, j = divmod(k, n_f)
        if b != b_vals[i] or f != f_vals[j]:
            raise FormatError("grid is not complete and row-major", lineno)
        values[i, j] = v
    f_axis = np.array(f_vals)
    if not np.all(np.diff(f_axis) > 0):
        raise FormatError("detuning must increase within a block", rows[0][0])
    return TransmissionMap(np.array(b_vals) * 1e-3, f_axis, values, f_ref=f_ref)


def parse_trace_csv(text: str, f_ref: float = 0.0) -> tuple[float, np.ndarray, np.ndarray]:
    """Returns (b in tesla, detuning axis, s21_db)."""
    tmap = parse_map_csv(text, f_ref)
    if tmap.b_axis.size != 1:
        raise FormatError(f"trace must hold one field value, found {tmap.b_axis.size}", 2)
    return float(tmap.b_axis[0]), tmap.f_axis, tmap.values[0]


def parse_summary_csv(text: str) -> dict:
    rows = _rows(text, SUMMARY_HEADER)
    cols = np.array([r[1] for r in rows]).T
    return dict(zip(SUMMARY_HEADER, cols))


def report_to_json(data: dict) -> str:
    # NaN/inf are not valid JSON; write them as null
    def clean(x):
        if isinstance(x, float) and not math.isfinite(x):
            return None
        if isinstance(x, dict):
            return {k: clean(v) for k, v in x.items()}
        if isinstance(x, (list, tuple)):
            return [clean(v) for v in x]
        return x

    return json.dumps(clean(data), indent=2, sort_keys=True) + "\n"


def parse_report_json(text: str) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, exc.lineno) from exc
    if not isinstance(data, dict):
        raise FormatError("expected a JSON object", 1)
    return data
