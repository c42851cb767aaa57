import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from wgdoublet.errors import NonFinite, SmallnessViolation
from wgdoublet.medium import (
    EsrLine,
    MediumModel,
    PerturbationTensor,
    ZERO_TENSOR,
    permeability_perturbation,
    susceptibility,
    total_susceptibility,
    validate_perturbation,
    with_crossing_at,
)

small = st.floats(-0.6, 0.6, allow_nan=False)


def test_zero_tensor():
    t = validate_perturbation(0.0, 0j)
    assert t == ZERO_TENSOR
    assert np.array_equal(t.matrix(), np.zeros((2, 2)))


def test_diagonal_norm():
    t = validate_perturbation(2.7e-7, 0)
    assert t.norm == pytest.approx(2.7e-7, rel=1e-15)


def test_smallness_violation():
    with pytest.raises(SmallnessViolation):
        validate_perturbation(0.8, 0.7 + 0j)


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_non_finite(bad):
    with pytest.raises(NonFinite):
        validate_perturbation(bad, 0)
    with pytest.raises(NonFinite):
        validate_perturbation(0, complex(0, bad))


@given(small, small, small)
def test_tensor_hermitian_traceless(m11, re, im):
    assume(math.hypot(m11, re, im) < 0.999)
    t = PerturbationTensor(m11, complex(re, im))
    m = t.matrix()
    assert np.allclose(m, m.conj().T, atol=0)
    assert m[0, 0] + m[1, 1] == 0
    assert t.m22 == -t.m11
    assert t.m12 == t.m21.conjugate()
    # norm is the largest eigenvalue magnitude
    assert t.norm == pytest.approx(np.max(np.abs(np.linalg.eigvalsh(m))), rel=1e-12, abs=1e-300)


LINE = EsrLine(f0=12.0e9, slope=2.8e10, gamma=5e6, chi0=0.02)


def test_chi_on_resonance():
    b = (11.9e9 - LINE.f0) / LINE.slope
    chi = susceptibility(LINE, b, LINE.center(b))
    assert chi == pytest.approx(1j * LINE.chi0, rel=1e-12)


def test_chi_one_width_off():
    probe = 11.9e9
    b = (probe + LINE.gamma - LINE.f0) / LINE.slope
    chi = susceptibility(LINE, b, probe)
    assert chi == pytest.approx(LINE.chi0 * (1 + 1j) / 2, rel=1e-6)


def test_chi_far_tail():
    probe = 11.9e9
    b = (probe + 100 * LINE.gamma - LINE.f0) / LINE.slope
    chi = susceptibility(LINE, b, probe)
    assert abs(chi.real) == pytest.approx(LINE.chi0 / 100, rel=1e-3)
    assert chi.imag == pytest.approx(LINE.chi0 / 1e4, rel=1e-3)


@given(st.floats(-1e3, 1e3), st.floats(0.01, 10))
def test_chi_absorptive_and_odd(d, chi0):
    line = EsrLine(f0=1e9, slope=1.0, gamma=1.0, chi0=chi0)
    plus = susceptibility(line, 0.0, 1e9 - d)
    minus = susceptibility(line, 0.0, 1e9 + d)
    assert plus.imag >= 0
    assert plus.real == pytest.approx(-minus.real, rel=1e-9, abs=1e-12)


def test_chi_vectorised():
    b = np.linspace(-1e-3, 1e-3, 7)
    chi = susceptibility(LINE, b, 11.9e9)
    assert chi.shape == b.shape
    assert chi[3] == susceptibility(LINE, b[3], 11.9e9)


def test_no_lines_zero_perturbation():
    nu, chi_im = permeability_perturbation(MediumModel(), 1e-3, 1e10)
    assert nu == ZERO_TENSOR and chi_im == 0.0
    assert total_susceptibility(MediumModel(), 0.0, 1e10) == 0


def test_zero_coupling_keeps_static():
    nu0 = PerturbationTensor(1e-6, 2e-7j)
    med = MediumModel(nu_static=nu0, lines=(LINE,), coupling=0.0)
    for b in (-2e-3, 0.0, 5e-3):
        assert permeability_perturbation(med, b, 11.9e9)[0] == nu0


def test_bundled_crossing(bundled):
    nu, _ = permeability_perturbation(bundled.medium, -0.5e-3, bundled.cavity.f_c)
    total = bundled.medium.eta.m22 + nu.m22
    assert abs(total) < 1e-15


def test_with_crossing_at_moves_zero():
    med = MediumModel(eta=PerturbationTensor(3e-7, 0), lines=(LINE,), coupling=1e-4)
    tuned = with_crossing_at(med, 1e-3, 11.9e9)
    nu, _ = permeability_perturbation(tuned, 1e-3, 11.9e9)
    assert abs(tuned.eta.m22 + nu.m22) < 1e-18


def test_esr_line_validation():
    with pytest.raises(ValueError):
        EsrLine(0.0, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        EsrLine(1.0, 1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        EsrLine(1.0, 1.0, 1.0, -1.0)
    with pytest.raises(NonFinite):
        EsrLine(1.0, math.nan, 1.0, 1.0)
