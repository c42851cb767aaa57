"""Observables: dressed doublet frequencies and linewidths, S21 traces and field maps.

Frequency axes of traces and maps are detunings from the cavity reference
``f_c``; field values are in tesla.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .doublet import (
    DoubletSolution,
    Family,
    bloch_coefficients,
    diagonalize,
    overlap_with_L,
    overlap_with_R,
)
from .medium import MediumModel, permeability_perturbation

_POWER_FLOOR = 1e-30


@dataclass(frozen=True)
class CavityModel:
    """Bare WG mode: reference frequency, intrinsic HWHM and readout conventions.

    ``corotating`` names the circular state that co-rotates with the spins and
    therefore carries the ESR absorption. ``sign`` selects transmission peaks
    (pole sum) or dips (unit baseline minus the pole sum). The upper mode is
    given ``amplitude * exp(i relative_phase)``, the lower one ``amplitude``.
    """

    f_c: float
    delta0: float
    family: Family = Family.WGH
    corotating: str = "R"
    sign: str = "peak"
    amplitude: float = 1.0
    relative_phase: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not (math.isfinite(self.f_c) and self.f_c > 0):
            raise ValueError("cavity f_c must be > 0")
        if not (math.isfinite(self.delta0) and self.delta0 > 0):
            raise ValueError("cavity delta0 must be > 0")
        if self.corotating not in ("R", "L"):
            raise ValueError("cavity corotating must be 'R' or 'L'")
        if self.sign not in ("peak", "dip"):
            raise ValueError("cavity sign must be 'peak' or 'dip'")
        if not (math.isfinite(self.amplitude) and self.amplitude > 0):
            raise ValueError("cavity amplitude must be > 0")
        if not math.isfinite(self.relative_phase):
            raise ValueError("cavity relative_phase must be finite")


@dataclass(frozen=True)
class ModeResponse:
    f_center: float
    fwhm: float
    amplitude: complex = 1.0 + 0j

    def __post_init__(self):
        if not (self.fwhm > 0 and self.f_center > 0):
            raise ValueError("ModeResponse needs fwhm > 0 and f_center > 0")

    @property
    def hwhm(self) -> float:
        return 0.5 * self.fwhm

    @property
    def q(self) -> float:
        return self.f_center / self.fwhm


@dataclass
class SweepResult:
    b_points: np.ndarray
    solutions: list[DoubletSolution]
    modes: list[tuple[ModeResponse, ModeResponse]]
    bare_up: np.ndarray
    bare_low: np.ndarray
    bare_separation: np.ndarray
    splitting: np.ndarray
    spin_weights: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.b_points)


@dataclass
class TransmissionMap:
    b_axis: np.ndarray
    f_axis: np.ndarray
    values: np.ndarray
    seed: int = 0
    snr_db: float | None = None
    f_ref: float = 0.0

    def __post_init__(self):
        self.b_axis = np.asarray(self.b_axis, dtype=np.float64)
        self.f_axis = np.asarray(self.f_axis, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (self.b_axis.size, self.f_axis.size):
            raise ValueError(
                f"map grid {self.values.shape} does not match axes "
                f"({self.b_axis.size}, {self.f_axis.size})"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("map values must be finite")

    def row(self, i: int) -> np.ndarray:
        return self.values[i]


def spin_loss(medium: MediumModel, cavity: CavityModel, b: float) -> tuple[object, float]:
    """Permeability tensor at ``b`` and the ESR contribution to the FWHM (Hz)."""
    nu, chi_abs = permeability_perturbation(medium, b, cavity.f_c)
    return nu, 2.0 * cavity.f_c * medium.coupling * chi_abs


def _weight(state, corotating):
    return overlap_with_R(state) if corotating == "R" else overlap_with_L(state)


def solve_at_field(
    medium: MediumModel, cavity: CavityModel, b: float
) -> tuple[DoubletSolution, tuple[ModeResponse, ModeResponse]]:
    """Dressed doublet at field ``b``; modes are returned as (upper, lower).

    Linewidths are ``2 delta0 + loss * w`` with ``w`` the weight of the
    co-rotating circular state in each eigenmode.
    """
    nu, loss = spin_loss(medium, cavity, b)
    bc = bloch_coefficients(medium.eta, nu, cavity.family, cavity.f_c)
    sol = diagonalize(bc)
    base = 2.0 * cavity.delta0
    w_plus = _weight(sol.state_plus, cavity.corotating)
    w_minus = _weight(sol.state_minus, cavity.corotating)
    upper = ModeResponse(
        sol.f_plus,
        base + loss * w_plus,
        cavity.amplitude * complex(math.cos(cavity.relative_phase), math.sin(cavity.relative_phase)),
    )
    lower = ModeResponse(sol.f_minus, base + loss * w_minus, complex(cavity.amplitude))
    return sol, (upper, lower)


def bare_lines(medium: MediumModel, cavity: CavityModel, b: float) -> tuple[float, float]:
    """Uncoupled (transverse part removed) doublet frequencies ``f_c (a0 +- |az|)``."""
    nu, _ = permeability_perturbation(medium, b, cavity.f_c)
    bc = bloch_coefficients(medium.eta, nu, cavity.family, cavity.f_c)
    return bc.omega0 * (bc.a0 + abs(bc.az)), bc.omega0 * (bc.a0 - abs(bc.az))


def _bare_separation(medium, cavity, b):
    nu, _ = permeability_perturbation(medium, b, cavity.f_c)
    bc = bloch_coefficients(medium.eta, nu, cavity.family, cavity.f_c)
    return 2.0 * bc.omega0 * abs(bc.az)


def _map_rows(fn, items, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def _check_axis(name, axis, allow_single=True):
    axis = np.asarray(axis, dtype=np.float64).ravel()
    if axis.size == 0:
        raise ValueError(f"{name} must be nonempty")
    if not np.all(np.isfinite(axis)):
        raise ValueError(f"{name} must be finite")
    if axis.size > 1 and not np.all(np.diff(axis) > 0):
        raise ValueError(f"{name} must be strictly increasing")
    return axis


def sweep(medium: MediumModel, cavity: CavityModel, b_points, workers: int | None = None) -> SweepResult:
    b_points = _check_axis("b_points", b_points)

    def one(b):
        sol, modes = solve_at_field(medium, cavity, b)
        up, low = bare_lines(medium, cavity, b)
        sep = _bare_separation(medium, cavity, b)
        w = (_weight(sol.state_plus, cavity.corotating), _weight(sol.state_minus, cavity.corotating))
        return sol, modes, up, low, sep, w

    rows = _map_rows(one, b_points, workers)
    return SweepResult(
        b_points=b_points,
        solutions=[r[0] for r in rows],
        modes=[r[1] for r in rows],
        bare_up=np.array([r[2] for r in rows]),
        bare_low=np.array([r[3] for r in rows]),
        bare_separation=np.array([r[4] for r in rows]),
        splitting=np.array([r[0].splitting for r in rows]),
        spin_weights=np.array([r[5] for r in rows]),
    )


def _sign_terms(sign):
    if sign == "peak":
        return 0.0, 1.0
    if sign == "dip":
        return 1.0, -1.0
    raise ValueError(f"sign must be 'peak' or 'dip', got {sign!r}")


def s21_trace(modes, f_axis, sign: str = "peak", f_ref: float = 0.0) -> np.ndarray:
    """Complex two-pole transmission on ``f_ref + f_axis``.

    ``S21 = sum_i a_i (w_i/2) / (i (f - f_i) + w_i/2)`` for peaks, ``1 - sum`` for dips.
    """
    baseline, sgn = _sign_terms(sign)
    f_axis = np.asarray(f_axis, dtype=np.float64)
    centers = np.array([m.f_center - f_ref for m in modes])
    fwhms = np.array([m.fwhm for m in modes])
    amps = np.array([m.amplitude for m in modes], dtype=np.complex128)
    return kernels.pole_sum(f_axis, centers, fwhms, amps, baseline, sgn)


def to_db(s21) -> np.ndarray:
    power = np.abs(np.asarray(s21)) ** 2
    return 10.0 * np.log10(np.maximum(power, _POWER_FLOOR))


def row_rng(seed: int, row: int) -> np.random.Generator:
    """Independent generator for one map row, derived from the master seed."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(row),)))


def add_noise(s21, snr_db: float, rng: np.random.Generator) -> np.ndarray:
    """Additive circular complex Gaussian noise, power ``peak |S21|^2 / 10^(snr/10)``."""
    s21 = np.asarray(s21, dtype=np.complex128)
    peak = float(np.max(np.abs(s21) ** 2))
    sigma = math.sqrt(peak * 10.0 ** (-snr_db / 10.0) / 2.0)
    z = rng.standard_normal((2, s21.size))
    return s21 + sigma * (z[0] + 1j * z[1])


def trace_row(medium, cavity, b, f_axis, snr_db=None, seed=0, row=0) -> np.ndarray:
    """One map row in dB; noise (if any) comes from the substream of ``row``."""
    _, modes = solve_at_field(medium, cavity, b)
    s = s21_trace(modes, f_axis, cavity.sign, cavity.f_c)
    if snr_db is not None:
        s = add_noise(s, snr_db, row_rng(seed, row))
    return to_db(s)


def synthesize_map(
    medium: MediumModel,
    cavity: CavityModel,
    b_axis,
    f_axis,
    snr_db: float | None = None,
    seed: int = 0,
    workers: int | None = None,
) -> TransmissionMap:
    b_axis = _check_axis("b_axis", b_axis)
    f_axis = _check_axis("f_axis", f_axis)
    rows = _map_rows(
        lambda i: trace_row(medium, cavity, b_axis[i], f_axis, snr_db, seed, i),
        range(b_axis.size),
        workers,
    )
    return TransmissionMap(b_axis, f_axis, np.vstack(rows), seed=int(seed), snr_db=snr_db, f_ref=cavity.f_c)
