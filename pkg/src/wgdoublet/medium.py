"""Gyro-anisotropic medium: perturbation tensors in the circular basis and ESR tuning.

Tensors are stored in the ordered basis (|R>, |L>)::

    [[m11,        conj(m21)],
     [m21,        -m11     ]]

so that ``m22 = -m11`` and the matrix is Hermitian by construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonFinite, SmallnessViolation


@dataclass(frozen=True)
class PerturbationTensor:
    m11: float = 0.0
    m21: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "m11", float(self.m11))
        object.__setattr__(self, "m21", complex(self.m21))
        vals = (self.m11, self.m21.real, self.m21.imag)
        if not all(math.isfinite(v) for v in vals):
            raise NonFinite(f"perturbation tensor elements must be finite, got {vals}")
        if self.norm >= 1.0:
            raise SmallnessViolation(
                f"spectral norm {self.norm:.6g} >= 1 leaves the perturbation regime"
            )

    @property
    def m12(self) -> complex:
        return self.m21.conjugate()

    @property
    def m22(self) -> float:
        return -self.m11

    @property
    def norm(self) -> float:
        # eigenvalues of a traceless Hermitian 2x2 are +-sqrt(m11^2 + |m21|^2)
        return math.hypot(self.m11, abs(self.m21))

    def matrix(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]], dtype=np.complex128)

    def shifted(self, delta_m11: float) -> "PerturbationTensor":
        return PerturbationTensor(self.m11 + delta_m11, self.m21)


ZERO_TENSOR = PerturbationTensor()


def validate_perturbation(m11: float, m21: complex) -> PerturbationTensor:
    """Build a PerturbationTensor, raising NonFinite / SmallnessViolation on bad input."""
    return PerturbationTensor(m11, m21)


@dataclass(frozen=True)
class EsrLine:
    """Lorentzian magnetic resonance line with linear Zeeman tuning.

    ``f0`` is the zero-field center (Hz), ``slope`` the tuning rate (Hz/T),
    ``gamma`` the HWHM (Hz) and ``chi0`` the peak susceptibility.
    """

    f0: float
    slope: float
    gamma: float
    chi0: float
    label: str = ""

    def __post_init__(self):
        for name in ("f0", "slope", "gamma", "chi0"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise NonFinite(f"EsrLine.{name} must be finite")
            object.__setattr__(self, name, v)
        if self.f0 <= 0:
            raise ValueError("EsrLine.f0 must be > 0")
        if self.gamma <= 0:
            raise ValueError("EsrLine.gamma must be > 0")
        if self.chi0 < 0:
            raise ValueError("EsrLine.chi0 must be >= 0")

    def center(self, b_field: float) -> float:
        return self.f0 + self.slope * b_field


@dataclass(frozen=True)
class MediumModel:
    epsilon: float = 1.0
    mu: float = 1.0
    eta: PerturbationTensor = ZERO_TENSOR
    nu_static: PerturbationTensor = ZERO_TENSOR
    lines: tuple[EsrLine, ...] = field(default_factory=tuple)
    coupling: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "lines", tuple(self.lines))
        if not (math.isfinite(self.epsilon) and self.epsilon > 0):
            raise ValueError("MediumModel.epsilon must be > 0")
        if not (math.isfinite(self.mu) and self.mu > 0):
            raise ValueError("MediumModel.mu must be > 0")
        if not math.isfinite(self.coupling):
            raise NonFinite("MediumModel.coupling must be finite")


def susceptibility(line: EsrLine, b_field, probe_freq):
    """Complex susceptibility ``chi0 * gamma / (D - i gamma)``, D = line center - probe.

    Works elementwise on arrays. Im(chi) >= 0 (absorption), Re(chi) is odd in D.
    """
    probe_freq = np.asarray(probe_freq, dtype=np.float64)
    if np.any(probe_freq <= 0):
        raise ValueError("probe_freq must be > 0")
    detuning = line.f0 + line.slope * np.asarray(b_field, dtype=np.float64) - probe_freq
    g = line.gamma
    den = detuning * detuning + g * g
    chi = line.chi0 * g * (detuning + 1j * g) / den
    return chi if chi.ndim else complex(chi)


def total_susceptibility(medium: MediumModel, b_field, probe_freq):
    chi = 0j
    for line in medium.lines:
        chi = chi + susceptibility(line, b_field, probe_freq)
    return chi


def permeability_perturbation(
    medium: MediumModel, b_field: float, probe_freq: float
) -> tuple[PerturbationTensor, float]:
    """Field-dependent permeability perturbation and the summed absorptive part.

    The dispersive response shifts the circular-basis diagonal,
    ``nu = nu_static + diag(+d, -d)`` with ``d = coupling * sum Re chi``;
    ``sum Im chi`` is returned as the spin-loss scalar.
    """
    chi = total_susceptibility(medium, b_field, probe_freq)
    shift = medium.coupling * complex(chi).real
    nu = medium.nu_static.shifted(shift) if shift else medium.nu_static
    return nu, complex(chi).imag


def with_crossing_at(medium: MediumModel, b0: float, probe_freq: float) -> MediumModel:
    """Copy of ``medium`` whose static diagonal cancels the total diagonal at ``b0``.

    After this, eta22 + nu22(b0) = 0, i.e. the bare lines cross at ``b0``.
    """
    chi = total_susceptibility(medium, b0, probe_freq)
    m11 = -(medium.eta.m11 + medium.coupling * complex(chi).real)
    return MediumModel(
        epsilon=medium.epsilon,
        mu=medium.mu,
        eta=medium.eta,
        nu_static=PerturbationTensor(m11, medium.nu_static.m21),
        lines=medium.lines,
        coupling=medium.coupling,
    )
