"""Exhaustive maximiser of y^T (2A - 11^T + I) y over sign vectors.

Exponential in n; used as ground truth for the SDP on small graphs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, ResourceLimitError
from .model import check_adjacency

MAX_NODES = 24


@dataclass(frozen=True, eq=False)
class MleResult:
    best_labels: np.ndarray
    best_objective: int
    num_optima: int
    optima: np.ndarray  # every optimal sign class, entry 0 fixed to +1

    @property
    def is_unique(self) -> bool:
        return self.num_optima == 1

    def contains(self, labels) -> bool:
        y = np.asarray(labels)
        y = y if y[0] > 0 else -y
        return bool(np.any(np.all(self.optima == y[None, :], axis=1)))

    def to_dict(self):
        return {"best_labels": self.best_labels.tolist(),
                "best_objective": self.best_objective,
                "num_optima": self.num_optima,
                "is_unique": self.is_unique}


def mle_objective(A, labels) -> int:
    A = check_adjacency(A).astype(np.int64)
    y = np.asarray(labels, dtype=np.int64)
    if y.shape != (A.shape[0],):
        raise InvalidInputError("labels length does not match adjacency")
    n = y.shape[0]
    s = int(y.sum())
    return int(2 * (y @ A @ y) - s * s + n)


def _sign_block(start, stop, n):
    """Sign vectors for enumeration indices [start, stop); entry 0 is +1.

    Entry i >= 1 is -1 iff bit (n-1-i) of the index is set, so increasing
    index is lexicographic order with +1 before -1.
    """
    idx = np.arange(start, stop, dtype=np.int64)
    shifts = np.arange(n - 2, -1, -1, dtype=np.int64)
    bits = (idx[:, None] >> shifts[None, :]) & 1
    signs = np.ones((idx.shape[0], n), dtype=np.int64)
    signs[:, 1:] = 1 - 2 * bits
    return signs


def brute_force_mle(A, balanced_only: bool = False, max_nodes: int = MAX_NODES,
                    chunk: int = 1 << 15) -> MleResult:
    A = check_adjacency(A)
    n = A.shape[0]
    if n > max_nodes:
        raise ResourceLimitError(f"brute force limited to n <= {max_nodes}, got n={n}")
    if n < 1:
        raise InvalidInputError("empty graph")
    W = (2 * A.astype(np.int64) - 1 + np.eye(n, dtype=np.int64)).astype(float)
    total = 1 << (n - 1)
    best = -np.inf
    optima = []
    for start in range(0, total, chunk):
        Y = _sign_block(start, min(start + chunk, total), n)
        if balanced_only:
            Y = Y[Y.sum(axis=1) == 0]
            if Y.shape[0] == 0:
                continue
        Yf = Y.astype(float)
        vals = ((Yf @ W) * Yf).sum(axis=1)  # exact: integers below 2**53
        top = vals.max()
        if top > best:
            best = top
            optima = [Y[vals == top]]
        elif top == best:
            optima.append(Y[vals == top])
    if not optima:
        raise InvalidInputError("no balanced sign vector exists for odd n")
    opt = np.concatenate(optima)
    return MleResult(opt[0].copy(), int(best), int(opt.shape[0]), opt)


def y_distance(labels, labels_star) -> int:
    """<Y*, Y* - Y> for Y = y y^T; twice the number of differing entries."""
    y = np.asarray(labels, dtype=np.int64)
    ys = np.asarray(labels_star, dtype=np.int64)
    if y.shape != ys.shape:
        raise InvalidInputError("label vectors differ in length")
    n = ys.shape[0]
    return int(n * n - int(y @ ys) ** 2)
