"""Dual certificate for exact recovery, checked without solving the SDP.

With signed degrees d_i = sum_j A_ij y_i y_j and D = diag(d), the diagonal
matrix M = 2D + I closes the duality gap at Y* = y* y*^T. Y* is the unique
optimum when S = 2D - 2A + 11^T is PSD with a strictly positive second
smallest eigenvalue. S y* = 0 always, so the smallest eigenvalue is <= 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as spla

from .errors import InvalidInputError, NumericalError
from .model import check_adjacency, check_labels
from .moments import GaussianMoments


def _inputs(A, y_star):
    A = check_adjacency(A)
    y = check_labels(y_star, A.shape[0])
    return A.astype(float), y.astype(float)


def degrees(A, y_star) -> np.ndarray:
    """Within-community degree minus cross-community degree, per node."""
    A, y = _inputs(A, y_star)
    return y * (A @ y)


def degree_matrix(A, y_star) -> np.ndarray:
    return np.diag(degrees(A, y_star))


def certificate_matrix(A, y_star) -> np.ndarray:
    """S = 2D - 2A + 11^T."""
    A, y = _inputs(A, y_star)
    return 2.0 * np.diag(y * (A @ y)) - 2.0 * A + 1.0


def default_eig_tol(n: int) -> float:
    return 1e-8 * n


@dataclass(frozen=True, eq=False)
class CertificateReport:
    degrees: np.ndarray
    lambda_min: float
    lambda_2: float
    psd: bool
    unique: bool
    gap_identity_ok: bool
    eigvector_residual: float
    eig_tol: float

    @property
    def certified(self) -> bool:
        return self.psd and self.unique

    def to_dict(self) -> dict:
        return {
            "n": int(self.degrees.shape[0]),
            "lambda_min": self.lambda_min,
            "lambda_2": self.lambda_2,
            "psd": self.psd,
            "unique": self.unique,
            "certified": self.certified,
            "gap_identity_ok": self.gap_identity_ok,
            "eigvector_residual": self.eigvector_residual,
            "eig_tol": self.eig_tol,
            "min_degree": float(self.degrees.min()),
            "mean_degree": float(self.degrees.mean()),
        }


def certify(A, y_star, eig_tol: float | None = None) -> CertificateReport:
    A, y = _inputs(A, y_star)
    n = A.shape[0]
    tol = default_eig_tol(n) if eig_tol is None else float(eig_tol)
    if tol <= 0:
        raise InvalidInputError("eig_tol must be positive")
    d = y * (A @ y)
    S = 2.0 * np.diag(d) - 2.0 * A + 1.0
    try:
        eigs = np.linalg.eigvalsh(S)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    lam_min, lam_2 = float(eigs[0]), float(eigs[1])
    psd = lam_min >= -tol
    # tr(W y y^T) computed directly from W, independently of D
    W = 2.0 * A - 1.0 + np.eye(n)
    primal = float(y @ W @ y)
    dual = float(np.sum(2.0 * d + 1.0))
    return CertificateReport(
        degrees=d,
        lambda_min=lam_min,
        lambda_2=lam_2,
        psd=bool(psd),
        unique=bool(psd and lam_2 > tol),
        gap_identity_ok=abs(primal - dual) <= tol * max(1.0, abs(dual)),
        eigvector_residual=float(np.max(np.abs(S @ y))),
        eig_tol=tol,
    )


def lambda2_deflated(S, tol: float = 1e-12) -> float:
    """Second-smallest eigenvalue by Lanczos with explicit deflation.

    Finds the smallest eigenpair, shifts it above the spectrum, then finds
    the smallest eigenvalue of the deflated operator. Kept apart from the
    dense path in ``certify`` so the two can be checked against each other.
    """
    S = np.asarray(S, dtype=float)
    n = S.shape[0]
    v0 = np.ones(n) / np.sqrt(n)
    w1, v1 = spla.eigsh(S, k=1, which="SA", tol=tol, v0=v0)
    u = v1[:, 0]
    shift = 2.0 * np.max(np.sum(np.abs(S), axis=1)) + 1.0  # exceeds ||S||

    def matvec(x):
        x = np.ravel(x)
        return S @ x + shift * u * (u @ x)

    op = spla.LinearOperator((n, n), matvec=matvec, dtype=float)
    w2, _ = spla.eigsh(op, k=1, which="SA", tol=tol, v0=v0)
    return float(w2[0])


@dataclass(frozen=True)
class ConcentrationMargins:
    """Four signed margins; all positive is sufficient for a unique optimum."""

    degree_given_latents: float
    adjacency_given_latents: float
    expected_degree: float
    expected_adjacency: float
    threshold: float

    @property
    def values(self) -> tuple[float, float, float, float]:
        return (self.degree_given_latents, self.adjacency_given_latents,
                self.expected_degree, self.expected_adjacency)

    @property
    def all_positive(self) -> bool:
        return all(m > 0 for m in self.values)

    def to_dict(self):
        return {"degree_given_latents": self.degree_given_latents,
                "adjacency_given_latents": self.adjacency_given_latents,
                "expected_degree": self.expected_degree,
                "expected_adjacency": self.expected_adjacency,
                "threshold": self.threshold,
                "all_positive": self.all_positive}


def expected_adjacency(n: int, p: float, q: float, y_star) -> np.ndarray:
    """E[A] = p(1+q)/2 11^T + p(1-q)/2 y y^T - pI."""
    y = np.asarray(y_star, dtype=float)
    return (0.5 * p * (1 + q) * np.ones((n, n)) + 0.5 * p * (1 - q) * np.outer(y, y)
            - p * np.eye(n))


def expected_degree(n: int, p: float, q: float) -> float:
    """Common diagonal entry of E[D]: np(1-q)/2 - p."""
    return 0.5 * n * p * (1 - q) - p


def lemma5_margins(A, kernel_matrix, y_star, moments: GaussianMoments) -> ConcentrationMargins:
    """Concentration margins given E[A | X] (``kernel_matrix``, zero diagonal).

    ``kernel_matrix`` of None means the latents are unknown (real data); the
    margins are then undefined and None is returned.
    """
    if kernel_matrix is None:
        return None
    A, y = _inputs(A, y_star)
    n = A.shape[0]
    F = np.array(kernel_matrix, dtype=float)
    if F.shape != A.shape:
        raise InvalidInputError("kernel matrix shape does not match adjacency")
    np.fill_diagonal(F, 0.0)
    p, q = moments.p, moments.q
    t = n * p * (1 - q) / 8.0
    d = y * (A @ y)
    d_given_x = y * (F @ y)
    m1 = t + float(np.min(d - d_given_x))
    m2 = t - float(np.linalg.eigvalsh(A - F)[-1])
    m3 = t - float(np.max(np.abs(d_given_x - expected_degree(n, p, q))))
    m4 = t - float(np.max(np.abs(np.linalg.eigvalsh(F - expected_adjacency(n, p, q, y)))))
    return ConcentrationMargins(m1, m2, m3, m4, t)


@dataclass(frozen=True)
class ExpectationCheck:
    value: float
    numeric: float
    precondition_ok: bool
    agrees: bool


def expected_matrix_lambda2(n: int, p: float, q: float, y_star=None,
                            tol: float | None = None) -> ExpectationCheck:
    """lambda_2(2E[D] - 2E[A] + 11^T) = np(1-q) when p(1+q) <= 1.

    Also builds the n x n expectation matrix and checks its second smallest
    eigenvalue numerically.
    """
    if y_star is None:
        y_star = np.tile([1, -1], n // 2)
    y = check_labels(y_star, n)
    value = n * p * (1 - q)
    S = (2.0 * expected_degree(n, p, q) * np.eye(n)
         - 2.0 * expected_adjacency(n, p, q, y) + 1.0)
    numeric = float(np.linalg.eigvalsh(S)[1])
    tol = 1e-8 * n if tol is None else tol
    return ExpectationCheck(
        value=float(value),
        numeric=numeric,
        precondition_ok=bool(p * (1 + q) <= 1.0),
        agrees=abs(numeric - value) <= tol,
    )
