"""Symmetric latent space model with two balanced communities.

Each node gets a label in {+1, -1} (exactly half of each), a latent vector
drawn from N(y_i * mu, sigma^2 I), and edges are independent Bernoulli draws
with probability f(x_i, x_j) once the latents are fixed.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.spatial.distance import cdist

from .errors import InvalidInputError, InvalidParameterError, KernelRangeError

# Slack allowed when checking kernel output against [0, 1].
KERNEL_RANGE_SLACK = 1e-12


@dataclass(frozen=True)
class Kernel:
    """A symmetric edge-probability function f: R^d x R^d -> [0, 1].

    ``fn`` evaluates row-wise on broadcastable arrays of shape (..., d).
    ``pairwise`` (optional) returns the full n x n matrix for an n x d input
    and is used when present because it avoids an n x n x d temporary.
    """

    name: str
    fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    pairwise: Callable[[np.ndarray], np.ndarray] | None = None

    def __call__(self, x, xp):
        return self.fn(np.asarray(x, dtype=float), np.asarray(xp, dtype=float))

    def matrix(self, latents: np.ndarray, chunk: int = 256) -> np.ndarray:
        latents = np.asarray(latents, dtype=float)
        if self.pairwise is not None:
            return self.pairwise(latents)
        n = latents.shape[0]
        out = np.empty((n, n))
        for start in range(0, n, chunk):
            block = latents[start:start + chunk]
            out[start:start + chunk] = self.fn(block[:, None, :], latents[None, :, :])
        return out


def _sqexp(x, xp):
    return np.exp(-np.sum((x - xp) ** 2, axis=-1))


def _sqexp_pairwise(latents):
    return np.exp(-cdist(latents, latents, "sqeuclidean"))


def _laplace(x, xp):
    return np.exp(-np.sqrt(np.sum((x - xp) ** 2, axis=-1)))


def _laplace_pairwise(latents):
    return np.exp(-cdist(latents, latents, "euclidean"))


KERNELS: dict[str, Kernel] = {
    "sqexp": Kernel("sqexp", _sqexp, _sqexp_pairwise),
    "laplace": Kernel("laplace", _laplace, _laplace_pairwise),
}


def get_kernel(kernel: str | Kernel) -> Kernel:
    if isinstance(kernel, Kernel):
        return kernel
    try:
        return KERNELS[kernel]
    except KeyError:
        raise InvalidParameterError(
            f"unknown kernel {kernel!r}; known: {sorted(KERNELS)}"
        ) from None


def register_kernel(kernel: Kernel) -> None:
    KERNELS[kernel.name] = kernel


@dataclass(frozen=True)
class ModelParams:
    n: int
    d: int = 2
    mu_norm: float = 1.0
    sigma: float = 0.3
    kernel: str = "sqexp"

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 4 or self.n % 2:
            raise InvalidParameterError(f"n must be an even integer >= 4, got {self.n}")
        if int(self.d) != self.d or self.d < 1:
            raise InvalidParameterError(f"d must be a positive integer, got {self.d}")
        if not self.sigma > 0:
            raise InvalidParameterError(f"sigma must be > 0, got {self.sigma}")
        if not self.mu_norm >= 0:
            raise InvalidParameterError(f"mu_norm must be >= 0, got {self.mu_norm}")
        get_kernel(self.kernel)

    @property
    def mean(self) -> np.ndarray:
        """Mean of the +1 class; fixed along the first axis."""
        mu = np.zeros(self.d)
        mu[0] = self.mu_norm
        return mu


@dataclass(frozen=True, eq=False)
class LsmInstance:
    params: ModelParams
    labels: np.ndarray
    latents: np.ndarray
    adjacency: np.ndarray
    seed: int | None = None

    @property
    def n(self) -> int:
        return self.params.n

    def kernel_matrix(self) -> np.ndarray:
        """E[A | X]: kernel values with a zero diagonal."""
        f = get_kernel(self.params.kernel).matrix(self.latents)
        np.fill_diagonal(f, 0.0)
        return f

    def same_as(self, other: "LsmInstance") -> bool:
        return (
            self.params == other.params
            and np.array_equal(self.labels, other.labels)
            and np.array_equal(self.latents, other.latents)
            and np.array_equal(self.adjacency, other.adjacency)
        )


def check_labels(labels, n: int | None = None, balanced: bool = True) -> np.ndarray:
    y = np.asarray(labels)
    if y.ndim != 1:
        raise InvalidInputError("labels must be a 1-d vector")
    if n is not None and y.shape[0] != n:
        raise InvalidInputError(f"expected {n} labels, got {y.shape[0]}")
    if not np.all(np.abs(y) == 1):
        raise InvalidInputError("labels must be +1 or -1")
    if balanced and y.sum() != 0:
        raise InvalidInputError("labels must be balanced (sum to zero)")
    return y.astype(np.int64)


def check_adjacency(A) -> np.ndarray:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidInputError(f"adjacency must be square, got shape {A.shape}")
    if not np.all((A == 0) | (A == 1)):
        raise InvalidInputError("adjacency entries must be 0 or 1")
    if not np.array_equal(A, A.T):
        raise InvalidInputError("adjacency must be symmetric")
    if np.any(np.diag(A) != 0):
        raise InvalidInputError("adjacency must have a zero diagonal")
    return A


def _rng(rng) -> np.random.Generator:
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


def sample_labels(n: int, rng=None) -> np.ndarray:
    """Uniformly random balanced +-1 vector (shuffled half/half)."""
    if int(n) != n or n < 2 or n % 2:
        raise InvalidParameterError(f"n must be a positive even integer, got {n}")
    y = np.repeat(np.array([1, -1], dtype=np.int64), n // 2)
    _rng(rng).shuffle(y)
    return y


def sample_latents(labels, params: ModelParams, rng=None) -> np.ndarray:
    y = check_labels(labels, balanced=False)
    noise = _rng(rng).normal(scale=params.sigma, size=(y.shape[0], params.d))
    return y[:, None] * params.mean[None, :] + noise


def edge_probabilities(latents, kernel: str | Kernel = "sqexp") -> np.ndarray:
    k = get_kernel(kernel)
    P = k.matrix(latents)
    lo, hi = np.min(P), np.max(P)
    if lo < -KERNEL_RANGE_SLACK or hi > 1 + KERNEL_RANGE_SLACK or np.isnan(P).any():
        raise KernelRangeError(
            f"kernel {k.name!r} produced values in [{lo}, {hi}], outside [0, 1]"
        )
    return P


def sample_adjacency(latents, kernel: str | Kernel = "sqexp", rng=None) -> np.ndarray:
    P = edge_probabilities(latents, kernel)
    n = P.shape[0]
    iu = np.triu_indices(n, k=1)
    draws = _rng(rng).random(iu[0].shape[0]) < P[iu]
    A = np.zeros((n, n), dtype=np.uint8)
    A[iu] = draws
    return A | A.T


def seed_streams(seed) -> tuple[np.random.Generator, ...]:
    """Independent (labels, latents, edges) generators from one master seed."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return tuple(np.random.default_rng(s) for s in ss.spawn(3))


def generate(params: ModelParams, seed=None) -> LsmInstance:
    label_rng, latent_rng, edge_rng = seed_streams(seed)
    y = sample_labels(params.n, label_rng)
    X = sample_latents(y, params, latent_rng)
    A = sample_adjacency(X, params.kernel, edge_rng)
    plain_seed = seed if isinstance(seed, (int, np.integer)) else None
    return LsmInstance(params, y, X, A, plain_seed)


# -- serialization ------------------------------------------------------------

HEADER_FILE = "header.json"
EDGES_FILE = "edges.txt"
LABELS_FILE = "labels.txt"
LATENTS_FILE = "latents.csv"


def write_edge_list(A, path) -> None:
    i, j = np.nonzero(np.triu(np.asarray(A), k=1))
    with open(path, "w") as fh:
        for a, b in zip(i.tolist(), j.tolist()):
            fh.write(f"{a} {b}\n")


def write_labels(labels, path) -> None:
    with open(path, "w") as fh:
        fh.writelines(f"{int(v)}\n" for v in labels)


def save_instance(instance: LsmInstance, directory) -> Path:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    header = {"params": asdict(instance.params), "seed": instance.seed}
    (out / HEADER_FILE).write_text(json.dumps(header, indent=2) + "\n")
    write_edge_list(instance.adjacency, out / EDGES_FILE)
    write_labels(instance.labels, out / LABELS_FILE)
    np.savetxt(out / LATENTS_FILE, instance.latents, delimiter=",", fmt="%.17g")
    return out


def load_instance(directory) -> LsmInstance:
    src = Path(directory)
    header = json.loads((src / HEADER_FILE).read_text())
    params = ModelParams(**header["params"])
    n = params.n
    labels = np.loadtxt(src / LABELS_FILE, dtype=np.int64).reshape(n)
    latents = np.loadtxt(src / LATENTS_FILE, delimiter=",", ndmin=2).reshape(n, params.d)
    edges = np.loadtxt(src / EDGES_FILE, dtype=np.int64, ndmin=2).reshape(-1, 2)
    A = np.zeros((n, n), dtype=np.uint8)
    A[edges[:, 0], edges[:, 1]] = 1
    A[edges[:, 1], edges[:, 0]] = 1
    return LsmInstance(params, labels, latents, A, header.get("seed"))
