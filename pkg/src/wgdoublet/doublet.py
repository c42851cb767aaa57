"""Effective photon-spin Hamiltonian of a WG mode and its closed-form eigensystem.

A single WG mode with wavenumber k and bare frequency ``omega0`` has the
spin-dependent frequency operator

    omega0 * (a0 * I + ax * sx + ay * sy + az * sz)

on the circular basis (|R>, |L>), with ``sz = |R><R| - |L><L|`` and the usual
Pauli ``sx``, ``sy``. Frequencies are in Hz throughout.

Conventions fixed here (observables do not depend on them):

* eigenstates carry a real, non-negative |R> amplitude; if that amplitude is
  zero the |L> amplitude is made real and positive;
* a degenerate doublet (zero Bloch vector) returns |R> as the upper state and
  |L> as the lower one;
* the sign in front of the magnetic-field quantisation prefactor is taken as +.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import NonNormalized
from .medium import MediumModel, PerturbationTensor

# CODATA 2018 reduced Planck constant, J s
HBAR = 1.054571817e-34
_SQRT2 = math.sqrt(2.0)
_NORM_TOL = 1e-12


class Family(str, Enum):
    """WG mode polarisation family: WGH is x (radially) polarised, WGE is y polarised."""

    WGH = "WGH"
    WGE = "WGE"


@dataclass(frozen=True)
class PolarizationState:
    alpha: complex
    beta: complex

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        n = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if not abs(n - 1.0) <= _NORM_TOL:
            raise NonNormalized(f"|alpha|^2 + |beta|^2 = {n!r}, expected 1")

    def vector(self) -> np.ndarray:
        return np.array([self.alpha, self.beta], dtype=np.complex128)

    def inner(self, other: "PolarizationState") -> complex:
        """<self|other>."""
        return self.alpha.conjugate() * other.alpha + self.beta.conjugate() * other.beta


R_STATE = PolarizationState(1.0, 0.0)
L_STATE = PolarizationState(0.0, 1.0)


@dataclass(frozen=True)
class BlochCoefficients:
    a0: float
    ax: float
    ay: float
    az: float
    omega0: float

    def __post_init__(self):
        for name in ("a0", "ax", "ay", "az", "omega0"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"BlochCoefficients.{name} must be finite")
            object.__setattr__(self, name, v)
        if self.omega0 <= 0:
            raise ValueError("BlochCoefficients.omega0 must be > 0")
        if self.radius >= 1.0:
            raise ValueError("Bloch vector length must be < 1 (perturbative regime)")

    @property
    def radius(self) -> float:
        return math.sqrt(self.ax * self.ax + self.ay * self.ay + self.az * self.az)

    @property
    def transverse(self) -> float:
        return math.hypot(self.ax, self.ay)

    def matrix(self) -> np.ndarray:
        """Frequency operator in Hz on the (|R>, |L>) basis."""
        a0, ax, ay, az = self.a0, self.ax, self.ay, self.az
        return self.omega0 * np.array(
            [[a0 + az, ax - 1j * ay], [ax + 1j * ay, a0 - az]], dtype=np.complex128
        )


@dataclass(frozen=True)
class DoubletSolution:
    f_plus: float
    f_minus: float
    state_plus: PolarizationState
    state_minus: PolarizationState
    splitting: float


def bloch_coefficients(
    eta: PerturbationTensor,
    nu: PerturbationTensor,
    family: Family | str,
    omega0: float,
    a0: float = 1.0,
) -> BlochCoefficients:
    """Decompose the WGH/WGE mode Hamiltonian onto the Pauli basis.

    For WGH: ``az = (eta22 + nu22)/2`` and ``ax + i ay = (eta21 - nu21)/sqrt(2)``;
    WGE flips the sign of the transverse part.
    """
    family = Family(family)
    az = 0.5 * (eta.m22 + nu.m22)
    t = (eta.m21 - nu.m21) / _SQRT2
    if family is Family.WGE:
        t = -t
    return BlochCoefficients(a0=a0, ax=t.real, ay=t.imag, az=az, omega0=omega0)


def _upper_state(ax: float, ay: float, az: float, r: float) -> PolarizationState:
    t = math.hypot(ax, ay)
    if t == 0.0:
        return R_STATE if az >= 0 else L_STATE
    # cos^2(theta/2) = (r + az)/(2r); evaluate the smaller of r +- az without cancellation
    if az >= 0:
        p = r + az
        q = t * t / p
    else:
        q = r - az
        p = t * t / q
    c = math.sqrt(p / (2.0 * r))
    s = math.sqrt(q / (2.0 * r))
    phase = complex(ax, ay) / t
    return PolarizationState(c, phase * s)


def _orthogonal(state: PolarizationState) -> PolarizationState:
    # (a, b) -> (conj b, -conj a), then fix the global phase convention
    alpha = state.beta.conjugate()
    beta = -state.alpha.conjugate()
    if abs(alpha) > 0:
        return PolarizationState(complex(abs(alpha)), beta * (abs(alpha) / alpha))
    return PolarizationState(0j, complex(abs(beta)))


def diagonalize(b: BlochCoefficients) -> DoubletSolution:
    r = b.radius
    f_plus = b.omega0 * (b.a0 + r)
    f_minus = b.omega0 * (b.a0 - r)
    if r == 0.0:
        return DoubletSolution(f_plus, f_minus, R_STATE, L_STATE, 0.0)
    up = _upper_state(b.ax, b.ay, b.az, r)
    return DoubletSolution(f_plus, f_minus, up, _orthogonal(up), 2.0 * b.omega0 * r)


def overlap_with_R(state: PolarizationState) -> float:
    return abs(state.alpha) ** 2


def overlap_with_L(state: PolarizationState) -> float:
    return abs(state.beta) ** 2


# linear (x, y) -> circular (R, L): x = (R + L)/sqrt2, y = (L - R)/(i sqrt2)
_LIN_TO_CIRC = np.array([[1.0, 1j], [1.0, -1j]], dtype=np.complex128) / _SQRT2


def linear_to_circular_matrix(handedness: str = "standard") -> np.ndarray:
    """Unitary mapping (cx, cy) amplitudes to (alpha, beta).

    ``handedness="flipped"`` exchanges which circular state is called R.
    """
    if handedness == "standard":
        return _LIN_TO_CIRC.copy()
    if handedness == "flipped":
        return _LIN_TO_CIRC[::-1].copy()
    raise ValueError(f"handedness must be 'standard' or 'flipped', got {handedness!r}")


def _check_norm(a: complex, b: complex) -> None:
    n = abs(a) ** 2 + abs(b) ** 2
    if not abs(n - 1.0) <= _NORM_TOL:
        raise NonNormalized(f"input amplitudes have norm^2 {n!r}, expected 1")


def linear_to_circular(cx: complex, cy: complex, handedness: str = "standard") -> PolarizationState:
    """x-polarised (1, 0) maps to (|R> + |L>)/sqrt2 and y-polarised (0, 1) to i(|R> - |L>)/sqrt2."""
    _check_norm(cx, cy)
    alpha, beta = linear_to_circular_matrix(handedness) @ np.array([cx, cy], dtype=np.complex128)
    # renormalise away the last-ulp drift of the matrix product
    n = math.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
    return PolarizationState(alpha / n, beta / n)


def circular_to_linear(state: PolarizationState, handedness: str = "standard") -> tuple[complex, complex]:
    m = linear_to_circular_matrix(handedness).conj().T
    cx, cy = m @ state.vector()
    return complex(cx), complex(cy)


def vacuum_amplitude(freq: float, mode_volume: float, epsilon: float) -> float:
    """Single-photon field prefactor ``sqrt(2 pi hbar omega / (V eps))`` with omega = 2 pi freq."""
    if not (freq > 0 and mode_volume > 0 and epsilon > 0):
        raise ValueError("freq, mode_volume and epsilon must all be positive")
    omega = 2.0 * math.pi * freq
    return math.sqrt(2.0 * math.pi * HBAR * omega / (mode_volume * epsilon))


def energy_density(
    e_field,
    b_field,
    medium: MediumModel,
    nu: PerturbationTensor | None = None,
) -> float:
    """Quadratic field energy ``(E^H eps(I+eta) E + B^H mu^-1 (I+nu) B) / 2``.

    Field vectors are given on the circular (|R>, |L>) basis. ``nu`` defaults
    to the medium's static permeability perturbation.
    """
    e = np.asarray(e_field, dtype=np.complex128).reshape(2)
    bf = np.asarray(b_field, dtype=np.complex128).reshape(2)
    nu = medium.nu_static if nu is None else nu
    eye = np.eye(2)
    eps_t = medium.epsilon * (eye + medium.eta.matrix())
    inv_mu_t = (eye + nu.matrix()) / medium.mu
    total = e.conj() @ eps_t @ e + bf.conj() @ inv_mu_t @ bf
    return 0.5 * float(total.real)


def spin_expectation(state: PolarizationState) -> tuple[float, float, float]:
    """Bloch vector <sx>, <sy>, <sz> of a polarisation state."""
    a, b = state.alpha, state.beta
    cross = a.conjugate() * b
    return 2.0 * cross.real, 2.0 * cross.imag, abs(a) ** 2 - abs(b) ** 2



basis_convert = linear_to_circular
