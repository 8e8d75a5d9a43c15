"""Semidefinite relaxation of the two-community estimator.

    maximize   tr(W Y)   with  W = 2A - 11^T + I
    subject to Y_ii = 1,  Y PSD

Two solvers share one result type:

``ipm``  primal-dual path following (XZ direction). Iterates stay exactly
         primal and dual feasible, so the only residual is the duality gap.
``admm`` operator splitting: alternate projection onto the unit-diagonal
         affine set and the PSD cone (full eigendecomposition), with scaled
         dual updates and residual balancing of the penalty.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import InvalidInputError, InvalidParameterError, NumericalError
from .model import check_adjacency

SUCCESS_TOL = 1e-3


@dataclass(frozen=True)
class SolverConfig:
    method: str = "ipm"
    max_iters: int = 5000
    feas_tol: float = 1e-6
    round_tol: float = SUCCESS_TOL
    rho: float = 1.0
    seed: int = 0
    # ipm only: centering parameter and fraction-to-boundary factor
    centering: float = 0.1
    step_fraction: float = 0.95

    def __post_init__(self):
        if self.method not in ("ipm", "admm"):
            raise InvalidParameterError(f"unknown method {self.method!r}")
        if self.max_iters < 1:
            raise InvalidParameterError("max_iters must be >= 1")
        if not (self.feas_tol > 0 and self.round_tol > 0 and self.rho > 0):
            raise InvalidParameterError("tolerances and rho must be positive")


@dataclass(frozen=True, eq=False)
class SdpSolution:
    Y: np.ndarray
    objective: float
    rounded_labels: np.ndarray
    converged: bool
    iterations: int
    primal_residual: float
    dual_residual: float
    exact_flag: bool
    method: str = "ipm"
    gap: float = float("nan")
    dual_vector: np.ndarray | None = None
    history: tuple = field(default=(), repr=False)

    def summary(self) -> dict:
        return {
            "method": self.method,
            "n": int(self.Y.shape[0]),
            "objective": self.objective,
            "iterations": self.iterations,
            "converged": self.converged,
            "primal_residual": self.primal_residual,
            "dual_residual": self.dual_residual,
            "gap": self.gap,
            "exact_flag": self.exact_flag,
        }


def objective_matrix(A) -> np.ndarray:
    """W = 2A - 11^T + I."""
    A = check_adjacency(A).astype(float)
    n = A.shape[0]
    return 2.0 * A - np.ones((n, n)) + np.eye(n)


def round_labels(Y) -> np.ndarray:
    """Signs of the leading eigenvector of Y, normalised so entry 0 is +1.

    Zero entries map to +1. For a degenerate top eigenspace (e.g. Y = I) the
    eigenvector is whatever LAPACK's ``syevd`` returns last, which is
    deterministic for a fixed input.
    """
    Y = np.asarray(Y, dtype=float)
    try:
        _, vecs = np.linalg.eigh(0.5 * (Y + Y.T))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    v = vecs[:, -1]
    nz = np.flatnonzero(v)
    if nz.size and v[nz[0]] < 0:
        v = -v
    # sign fixed first so that zero entries stay +1 after normalisation
    return np.where(v >= 0, 1, -1).astype(np.int64)


def max_deviation(Y, labels) -> float:
    y = np.asarray(labels, dtype=float)
    return float(np.max(np.abs(np.asarray(Y) - np.outer(y, y))))


def success_test(Y, y_star, tol: float = SUCCESS_TOL) -> bool:
    """True iff every entry of Y is within ``tol`` of y* y*^T."""
    Y = np.asarray(Y)
    if Y.shape != (len(y_star), len(y_star)):
        raise InvalidInputError(f"shape mismatch: Y {Y.shape}, labels {len(y_star)}")
    return max_deviation(Y, y_star) < tol


def _max_step(M, dM) -> float:
    """Largest t with M + t dM still PSD (inf if dM keeps it PSD), M PD."""
    L = np.linalg.cholesky(M)
    T = sla.solve_triangular(L, dM, lower=True)
    T = sla.solve_triangular(L, T.T, lower=True)
    lam = np.linalg.eigvalsh(0.5 * (T + T.T))[0]
    return np.inf if lam >= 0 else -1.0 / lam


def _solve_ipm(W, config):
    n = W.shape[0]
    X = np.eye(n)
    v = np.abs(W).sum(axis=1) + 1.0
    Z = np.diag(v) - W
    history = []
    converged = False
    gap = float(np.sum(X * Z))
    k = 0
    for k in range(1, config.max_iters + 1):
        Zinv = np.linalg.inv(Z)
        Zinv = 0.5 * (Zinv + Zinv.T)
        mu = config.centering * gap / n
        # Schur complement system for the dual step (X o Z^-1) dv = mu diag(Z^-1) - 1
        schur = X * Zinv
        rhs = mu * np.diag(Zinv) - 1.0
        dv = sla.solve(schur, rhs, assume_a="pos")
        dX = mu * Zinv - X - (X * dv[None, :]) @ Zinv
        dX = 0.5 * (dX + dX.T)
        np.fill_diagonal(dX, 0.0)
        alpha_p = min(1.0, config.step_fraction * _max_step(X, dX))
        # dZ is diagonal: the step limit comes from a diagonal scaling of Z
        alpha_d = min(1.0, config.step_fraction * _max_step(Z, np.diag(dv)))
        X = X + alpha_p * dX
        v = v + alpha_d * dv
        Z = np.diag(v) - W
        gap = float(np.sum(X * Z))
        history.append(float(np.sum(W * X)))
        if gap / n < config.feas_tol:
            converged = True
            break
    primal_res = float(np.max(np.abs(np.diag(X) - 1.0)))
    return X, k, converged, primal_res, 0.0, gap, v, history


def _project_psd(M):
    w, V = np.linalg.eigh(M)
    pos = w > 0
    Vp = V[:, pos]
    return (Vp * w[pos]) @ Vp.T


def _solve_admm(W, config, relax=1.6, balance_every=20):
    n = W.shape[0]
    C = -W
    rho = config.rho * n  # the optimal dual slack grows like n
    Z = np.eye(n)
    U = np.zeros((n, n))
    history = []
    converged = False
    r = s = np.inf
    k = 0
    for k in range(1, config.max_iters + 1):
        Y = Z - U - C / rho
        np.fill_diagonal(Y, 1.0)
        Yr = relax * Y + (1.0 - relax) * Z
        Z_old = Z
        Z = _project_psd(Yr + U)
        U = U + Yr - Z
        r = float(np.max(np.abs(Y - Z)))
        s = float(rho * np.max(np.abs(Z - Z_old)))
        history.append(float(np.sum(W * Z)))
        if r < config.feas_tol and s < config.feas_tol:
            converged = True
            break
        if k % balance_every == 0:
            # compare residuals relative to their own scales
            rel_r = r / max(np.max(np.abs(Z)), 1.0)
            rel_s = s / max(rho * np.max(np.abs(U)), 1.0)
            if rel_r > 10 * rel_s:
                rho *= 2.0
                U /= 2.0
            elif rel_s > 10 * rel_r:
                rho /= 2.0
                U *= 2.0
    # Z is PSD; rescale to unit diagonal so the returned point is feasible
    dg = np.sqrt(np.clip(np.diag(Z), 1e-300, None))
    Y = Z / np.outer(dg, dg)
    Y = 0.5 * (Y + Y.T)
    dual = rho * U
    return Y, k, converged, r, s, float("nan"), np.diag(dual).copy(), history


def solve(A, config: SolverConfig | None = None) -> SdpSolution:
    config = config or SolverConfig()
    W = objective_matrix(A)
    if W.shape[0] < 2:
        raise InvalidInputError("need at least two nodes")
    runner = _solve_ipm if config.method == "ipm" else _solve_admm
    try:
        Y, iters, converged, pres, dres, gap, dual, hist = runner(W, config)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"{config.method} solver failed: {exc}") from exc
    labels = round_labels(Y)
    return SdpSolution(
        Y=Y,
        objective=float(np.sum(W * Y)),
        rounded_labels=labels,
        converged=converged,
        iterations=iters,
        primal_residual=pres,
        dual_residual=dres,
        exact_flag=max_deviation(Y, labels) < config.round_tol,
        method=config.method,
        gap=gap,
        dual_vector=dual,
        history=tuple(hist),
    )
