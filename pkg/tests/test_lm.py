import numpy as np
import pytest

from wgdoublet.errors import NonFiniteResidual, SingularNormalMatrix
from wgdoublet.estimation.lm import LMOptions, fd_jacobian, lm_minimize


def test_linear_least_squares():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(40, 3))
    # modest residual: FD rounding in J scales like eps*|r|/h
    y = a @ np.array([0.3, -1.1, 2.0]) + rng.normal(scale=0.01, size=40)
    res = lm_minimize(lambda p: a @ p - y, np.zeros(3), lambda0=1e-12)
    exact = np.linalg.solve(a.T @ a, a.T @ y)
    assert res.converged
    assert res.accepted <= 2
    assert np.allclose(res.params, exact, rtol=1e-10, atol=1e-12)


def test_rosenbrock():
    def r(p):
        return np.array([10 * (p[1] - p[0] ** 2), 1 - p[0]])

    res = lm_minimize(r, [-1.2, 1.0], max_iter=500, tol=1e-14, xtol=0, ftol=0)
    assert res.converged
    assert np.allclose(res.params, [1.0, 1.0], atol=1e-8)
    assert np.allclose(r(np.array([1.0, 1.0])), 0.0)


def test_start_at_optimum():
    res = lm_minimize(lambda p: np.array([p[0] - 2.0, p[1] + 1.0]), [2.0, -1.0])
    assert res.converged and res.accepted == 0 and res.iterations == 0
    assert res.reason == "gtol"


def test_fd_jacobian_matches_analytic():
    x = np.linspace(0, 3, 25)

    def r(p):
        return p[0] * np.exp(-p[1] * x) + p[2]

    p = np.array([2.0, 0.7, -0.3])
    analytic = np.column_stack([np.exp(-p[1] * x), -p[0] * x * np.exp(-p[1] * x), np.ones_like(x)])
    assert np.allclose(fd_jacobian(r, p), analytic, rtol=1e-8, atol=1e-10)


def test_unpacking_and_diagnostics():
    params, cov, diag = lm_minimize(lambda p: np.array([p[0] - 1, 2 * (p[0] - 1), 0.1]), [5.0])
    assert params[0] == pytest.approx(1.0)
    assert cov.shape == (1, 1)
    assert diag["converged"] and diag["accepted_steps"] >= 1


def test_non_finite_initial():
    with pytest.raises(NonFiniteResidual):
        lm_minimize(lambda p: np.array([np.nan, p[0]]), [1.0])


def test_singular_reports_index():
    with pytest.raises(SingularNormalMatrix) as info:
        lm_minimize(lambda p: np.array([p[0] - 1, 2 * p[0] - 3, 0 * p[1]]), [0.0, 1.0])
    assert info.value.index == 1


def test_max_iter_flagged():
    def r(p):
        return np.array([10 * (p[1] - p[0] ** 2), 1 - p[0]])

    res = lm_minimize(r, [-1.2, 1.0], max_iter=2, tol=0, xtol=0, ftol=0)
    assert not res.converged and res.reason == "max_iter"


def test_options_validation():
    with pytest.raises(ValueError):
        LMOptions(lambda0=0)
    with pytest.raises(ValueError):
        LMOptions(max_iter=-1)


def test_covariance_linear_model():
    rng = np.random.default_rng(4)
    x = np.linspace(0, 1, 200)
    y = 1.5 * x - 0.2 + rng.normal(scale=0.01, size=x.size)
    res = lm_minimize(lambda p: p[0] * x + p[1] - y, [1.0, 0.0])
    a = np.column_stack([x, np.ones_like(x)])
    s2 = np.sum(res.residuals**2) / (x.size - 2)
    assert np.allclose(res.covariance, s2 * np.linalg.inv(a.T @ a), rtol=1e-5)
