"""Damped least squares (Levenberg-Marquardt) with central-difference Jacobians."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import NonFiniteResidual, SingularNormalMatrix

_LAMBDA_MAX = 1e16
_LAMBDA_MIN = 1e-15


@dataclass
class LMOptions:
    max_iter: int = 200
    tol: float = 1e-10
    lambda0: float = 1e-3
    xtol: float = 1e-12
    ftol: float = 1e-15
    rel_step: float = 1e-6
    x_scale: np.ndarray | None = None

    def __post_init__(self):
        if self.max_iter < 0:
            raise ValueError("max_iter must be >= 0")
        if not (self.tol >= 0 and self.lambda0 > 0 and self.rel_step > 0):
            raise ValueError("tol must be >= 0, lambda0 and rel_step > 0")


@dataclass
class LMResult:
    params: np.ndarray
    covariance: np.ndarray
    cost: float
    residuals: np.ndarray = field(repr=False)
    jacobian: np.ndarray = field(repr=False)
    iterations: int = 0
    accepted: int = 0
    n_eval: int = 0
    converged: bool = False
    reason: str = ""
    grad_norm: float = float("nan")
    damping: float = float("nan")

    @property
    def residual_rms(self) -> float:
        return float(np.sqrt(np.mean(self.residuals**2))) if self.residuals.size else 0.0

    def diagnostics(self) -> dict:
        return {
            "iterations": self.iterations,
            "accepted_steps": self.accepted,
            "evaluations": self.n_eval,
            "converged": self.converged,
            "reason": self.reason,
            "grad_norm": self.grad_norm,
            "damping": self.damping,
            "cost": self.cost,
        }

    def __iter__(self):
        # allows ``params, cov, diag = lm_minimize(...)``
        return iter((self.params, self.covariance, self.diagnostics()))


def _steps(p, rel_step, x_scale):
    mag = np.abs(p)
    if x_scale is None:
        ref = np.where(mag > 0, mag, 1.0)
    else:
        ref = np.maximum(mag, np.abs(np.asarray(x_scale, dtype=np.float64)))
    return rel_step * ref


def fd_jacobian(residuals, p, rel_step=1e-6, x_scale=None):
    """Central-difference Jacobian, one column per parameter."""
    p = np.asarray(p, dtype=np.float64)
    h = _steps(p, rel_step, x_scale)
    cols = []
    for i in range(p.size):
        up = p.copy()
        dn = p.copy()
        up[i] += h[i]
        dn[i] -= h[i]
        # use the representable step actually taken
        width = up[i] - dn[i]
        cols.append((np.asarray(residuals(up)) - np.asarray(residuals(dn))) / width)
    return np.column_stack(cols) if cols else np.zeros((0, 0))


def _finite(r):
    return bool(np.all(np.isfinite(r)))


def _covariance(jac, cost, m, n):
    a = jac.T @ jac
    try:
        inv = np.linalg.inv(a)
    except np.linalg.LinAlgError:
        inv = np.linalg.pinv(a)
    dof = m - n
    s2 = 2.0 * cost / dof if dof > 0 else 1.0
    cov = inv * s2
    return 0.5 * (cov + cov.T)


def lm_minimize(residuals, init, options: LMOptions | None = None, **overrides) -> LMResult:
    """Minimise ``0.5 * ||residuals(p)||^2`` from ``init``.

    Stops when ``max|J^T r| <= tol``, when an accepted step is below ``xtol``
    relative to ``|p|``, when both actual and predicted relative cost
    reductions fall below ``ftol``, or after ``max_iter`` Jacobian updates
    (then ``converged`` is False). Damping is multiplied by 10 on a rejected
    step and divided by 10 on an accepted one.
    """
    opts = options or LMOptions()
    if overrides:
        opts = LMOptions(**{**opts.__dict__, **overrides})
    p = np.array(init, dtype=np.float64, copy=True).ravel()
    r = np.asarray(residuals(p), dtype=np.float64).ravel()
    n_eval = 1
    if not _finite(r) or not np.all(np.isfinite(p)):
        raise NonFiniteResidual("residuals are not finite at the initial point", {"params": p.tolist()})
    cost = 0.5 * float(r @ r)
    lam = float(opts.lambda0)
    accepted = 0
    converged = False
    reason = "max_iter"
    it = 0
    jac = None
    gnorm = float("nan")

    def jacobian(pt):
        nonlocal n_eval
        j = fd_jacobian(residuals, pt, opts.rel_step, opts.x_scale)
        n_eval += 2 * pt.size
        if not _finite(j):
            raise NonFiniteResidual("non-finite Jacobian", {"params": pt.tolist()})
        return j

    jac = jacobian(p)
    while it < opts.max_iter:
        grad = jac.T @ r
        gnorm = float(np.max(np.abs(grad))) if grad.size else 0.0
        if gnorm <= opts.tol:
            converged, reason = True, "gtol"
            break
        a = jac.T @ jac
        d = np.diag(a).copy()
        zero = np.flatnonzero(d == 0.0)
        if zero.size:
            idx = int(zero[0])
            raise SingularNormalMatrix(
                f"parameter {idx} has no influence on the residuals", index=idx,
                diagnostics={"params": p.tolist(), "iterations": it},
            )
        it += 1
        step_taken = False
        while lam <= _LAMBDA_MAX:
            m = a + lam * np.diag(d)
            try:
                dp = np.linalg.solve(m, -grad)
            except np.linalg.LinAlgError as exc:
                idx = int(np.argmin(np.abs(np.diag(np.linalg.qr(m)[1]))))
                raise SingularNormalMatrix(
                    "normal matrix is singular", index=idx,
                    diagnostics={"params": p.tolist(), "iterations": it},
                ) from exc
            p_new = p + dp
            r_new = np.asarray(residuals(p_new), dtype=np.float64).ravel()
            n_eval += 1
            cost_new = 0.5 * float(r_new @ r_new) if _finite(r_new) else np.inf
            if cost_new < cost:
                predicted = -(grad @ dp + 0.5 * dp @ a @ dp)
                actual = cost - cost_new
                small_step = np.linalg.norm(dp) <= opts.xtol * (np.linalg.norm(p) + opts.xtol)
                flat = actual <= opts.ftol * cost and abs(predicted) <= opts.ftol * cost
                p, r, cost = p_new, r_new, cost_new
                accepted += 1
                lam = max(lam / 10.0, _LAMBDA_MIN)
                step_taken = True
                if small_step or flat:
                    converged, reason = True, "xtol" if small_step else "ftol"
                break
            lam *= 10.0
        if converged:
            jac = jacobian(p)
            break
        if not step_taken:
            # no decrease even along a vanishing gradient step: numerically stationary
            scale = np.linalg.norm(jac) * np.linalg.norm(r)
            converged = scale == 0 or gnorm <= 1e-6 * scale
            reason = "stalled" if converged else "no_decrease"
            break
        jac = jacobian(p)
    else:
        grad = jac.T @ r
        gnorm = float(np.max(np.abs(grad))) if grad.size else 0.0
        if gnorm <= opts.tol:
            converged, reason = True, "gtol"

    cov = _covariance(jac, cost, r.size, p.size)
    return LMResult(
        params=p, covariance=cov, cost=cost, residuals=r, jacobian=jac,
        iterations=it, accepted=accepted, n_eval=n_eval, converged=converged,
        reason=reason, grad_norm=gnorm, damping=lam,
    )
