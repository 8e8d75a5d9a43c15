"""Experiment orchestration: phase-diagram sweeps, large-n replication and
real-graph scoring.

Every trial draws from its own seed, derived from the master seed and the
cell's (mu, sigma) coordinates, so any single cell can be recomputed alone.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from . import certificate, moments, regimes, sdp
from .errors import IngestionError, InvalidParameterError
from .model import ModelParams, generate

log = logging.getLogger(__name__)

CSV_VERSION = "# lsm-sweep-csv v1"
CSV_COLUMNS = [
    "mu", "sigma", "n", "d",
    "cert_successes", "trials_cert", "cert_rate",
    "sdp_successes", "trials_sdp", "sdp_rate",
    "mean_lambda2", "cert_sdp_conflicts", "sdp_nonconverged",
    "impossible", "mle_recoverable", "sdp_recoverable", "sdp_precondition_ok", "regime",
]


def grid_values(start: float, stop: float, step: float) -> tuple[float, ...]:
    """Inclusive arithmetic grid, rounded to suppress float drift."""
    if step <= 0 or stop < start:
        raise InvalidParameterError(f"bad grid {start}:{stop}:{step}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(round(start + i * step, 10) for i in range(count))


@dataclass(frozen=True)
class SweepSpec:
    mu_values: tuple[float, ...]
    sigma_values: tuple[float, ...]
    n: int = 300
    d: int = 2
    trials_cert: int = 100
    trials_sdp: int = 10
    seed: int = 0
    constants: regimes.RegimeConstants = field(default_factory=regimes.RegimeConstants)
    solver: sdp.SolverConfig = field(default_factory=sdp.SolverConfig)
    kernel: str = "sqexp"

    def __post_init__(self):
        if self.trials_cert < 1 or self.trials_sdp < 1:
            raise InvalidParameterError("trial counts must be >= 1")
        if not self.mu_values or not self.sigma_values:
            raise InvalidParameterError("grid must be non-empty")


@dataclass(frozen=True)
class SweepCell:
    mu: float
    sigma: float
    n: int
    d: int
    cert_successes: int
    trials_cert: int
    sdp_successes: int
    trials_sdp: int
    mean_lambda2: float
    cert_sdp_conflicts: int
    sdp_nonconverged: int
    regime: regimes.RegimeReport

    @property
    def cert_rate(self) -> float:
        return self.cert_successes / self.trials_cert

    @property
    def sdp_rate(self) -> float:
        return self.sdp_successes / self.trials_sdp

    def row(self) -> dict:
        r = self.regime
        return {
            "mu": self.mu, "sigma": self.sigma, "n": self.n, "d": self.d,
            "cert_successes": self.cert_successes, "trials_cert": self.trials_cert,
            "cert_rate": self.cert_rate,
            "sdp_successes": self.sdp_successes, "trials_sdp": self.trials_sdp,
            "sdp_rate": self.sdp_rate,
            "mean_lambda2": self.mean_lambda2,
            "cert_sdp_conflicts": self.cert_sdp_conflicts,
            "sdp_nonconverged": self.sdp_nonconverged,
            "impossible": r.impossible.verdict,
            "mle_recoverable": r.mle.verdict,
            "sdp_recoverable": r.sdp.verdict,
            "sdp_precondition_ok": r.precondition_ok,
            "regime": r.label,
        }


def trial_seed(master: int, mu: float, sigma: float, trial: int) -> np.random.SeedSequence:
    key = (int(round(mu * 1e6)), int(round(sigma * 1e6)), int(trial))
    return np.random.SeedSequence(master, spawn_key=key)


def run_cell(spec: SweepSpec, mu: float, sigma: float) -> SweepCell:
    """Certificate test on ``trials_cert`` instances; SDP on the first
    ``trials_sdp`` of those same instances."""
    params = ModelParams(spec.n, spec.d, mu, sigma, spec.kernel)
    cert_ok = sdp_ok = conflicts = nonconv = 0
    lam2 = []
    for t in range(max(spec.trials_cert, spec.trials_sdp)):
        inst = generate(params, trial_seed(spec.seed, mu, sigma, t))
        rep = certificate.certify(inst.adjacency, inst.labels)
        if t < spec.trials_cert:
            cert_ok += rep.certified
            lam2.append(rep.lambda_2)
        if t < spec.trials_sdp:
            sol = sdp.solve(inst.adjacency, spec.solver)
            ok = sol.converged and sdp.success_test(sol.Y, inst.labels)
            if not sol.converged:
                nonconv += 1
                log.warning("solver did not converge: mu=%s sigma=%s trial=%d", mu, sigma, t)
            sdp_ok += ok
            if rep.certified and not ok:
                conflicts += 1
                log.error("certified instance not recovered: mu=%s sigma=%s trial=%d",
                          mu, sigma, t)
    report = regimes.classify(spec.n, cell_moments(spec, mu, sigma), spec.constants)
    return SweepCell(mu, sigma, spec.n, spec.d, cert_ok, spec.trials_cert, sdp_ok,
                     spec.trials_sdp, float(np.mean(lam2)), conflicts, nonconv, report)


def cell_moments(spec: SweepSpec, mu: float, sigma: float) -> moments.GaussianMoments:
    """Closed forms for the squared-exponential kernel, sampling otherwise."""
    if spec.kernel == "sqexp":
        return moments.closed_form(spec.d, mu, sigma)
    params = ModelParams(spec.n, spec.d, mu, sigma, spec.kernel)
    return moments.monte_carlo(params, 10**5, trial_seed(spec.seed, mu, sigma, 10**9))


def _run_cell_args(args):
    return run_cell(*args)


def run_sweep(spec: SweepSpec, workers: int = 1, progress=None) -> list[SweepCell]:
    coords = [(mu, s) for mu in spec.mu_values for s in spec.sigma_values]
    jobs = [(spec, mu, s) for mu, s in coords]
    cells = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for cell in pool.map(_run_cell_args, jobs):
                cells.append(cell)
                if progress:
                    progress(cell)
    else:
        for job in jobs:
            cell = _run_cell_args(job)
            cells.append(cell)
            if progress:
                progress(cell)
    return sorted(cells, key=lambda c: (c.mu, c.sigma))


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else str(v)


def write_rows(rows, columns, out, header_comment: str | None = None) -> None:
    """Write dict rows as CSV to a path or an open text stream."""
    if isinstance(out, (str, Path)):
        with open(out, "w", newline="") as fh:
            write_rows(rows, columns, fh, header_comment)
        return
    if header_comment:
        out.write(header_comment + "\n")
    writer = csv.DictWriter(out, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _fmt(row[k]) for k in columns})


def write_sweep_csv(cells, out) -> None:
    write_rows([c.row() for c in cells], CSV_COLUMNS, out, CSV_VERSION)


def sweep_csv_text(cells) -> str:
    buf = io.StringIO()
    write_sweep_csv(cells, buf)
    return buf.getvalue()


def read_sweep_csv(path) -> list[dict]:
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rows = list(csv.DictReader(lines))
    for row in rows:
        for k in ("mu", "sigma", "cert_rate", "sdp_rate", "mean_lambda2"):
            row[k] = float(row[k])
        for k in ("n", "d", "cert_successes", "trials_cert", "sdp_successes", "trials_sdp",
                  "cert_sdp_conflicts", "sdp_nonconverged"):
            row[k] = int(row[k])
    return rows


# -- trend test ---------------------------------------------------------------

@dataclass(frozen=True)
class TrendResult:
    z: float
    p_increasing: float
    significant_increase: bool


def cochran_armitage_increase(successes, totals, scores, alpha: float = 0.01) -> TrendResult:
    """One-sided Cochran-Armitage test for an increasing success trend."""
    x = np.asarray(successes, dtype=float)
    m = np.asarray(totals, dtype=float)
    t = np.asarray(scores, dtype=float)
    N = m.sum()
    pbar = x.sum() / N
    T = np.sum(t * (x - m * pbar))
    var = pbar * (1 - pbar) * (np.sum(m * t * t) - np.sum(m * t) ** 2 / N)
    if var <= 0:
        return TrendResult(0.0, 1.0, False)
    z = float(T / math.sqrt(var))
    pval = float(stats.norm.sf(z))
    return TrendResult(z, pval, pval < alpha)


def sdp_trend_by_mu(rows, alpha: float = 0.01) -> dict[float, TrendResult]:
    """Per-mu test of whether SDP success *increases* with sigma."""
    out = {}
    for mu in sorted({_get(r, "mu") for r in rows}):
        sel = sorted((r for r in rows if _get(r, "mu") == mu), key=lambda r: _get(r, "sigma"))
        out[mu] = cochran_armitage_increase(
            [_get(r, "sdp_successes") for r in sel],
            [_get(r, "trials_sdp") for r in sel],
            [_get(r, "sigma") for r in sel], alpha)
    return out


def _get(row, key):
    return getattr(row, key) if hasattr(row, key) else row[key]


# -- large-n replication --------------------------------------------------------

@dataclass(frozen=True)
class ReplicationRow:
    sigma: float
    trials: int
    positive_lambda2: int
    certified: int
    sdp_successes: int | None
    lambda2: tuple


def replicate_appendix_d(n: int = 5000, mu: float = 1.0, sigmas=(0.05, 0.3),
                         trials: int = 10, d: int = 2, seed: int = 0,
                         run_sdp: bool = False, solver: sdp.SolverConfig | None = None,
                         progress=None) -> list[ReplicationRow]:
    """Count trials with a positive second-smallest certificate eigenvalue."""
    out = []
    for sigma in sigmas:
        params = ModelParams(n, d, mu, sigma)
        pos = cert = 0
        sdp_ok = 0 if run_sdp else None
        lam2 = []
        for t in range(trials):
            inst = generate(params, trial_seed(seed, mu, sigma, t))
            rep = certificate.certify(inst.adjacency, inst.labels)
            pos += rep.lambda_2 > rep.eig_tol
            cert += rep.certified
            lam2.append(rep.lambda_2)
            if run_sdp:
                sol = sdp.solve(inst.adjacency, solver)
                sdp_ok += bool(sol.converged and sdp.success_test(sol.Y, inst.labels))
            if progress:
                progress(sigma, t, rep)
            del inst
        out.append(ReplicationRow(sigma, trials, pos, cert, sdp_ok, tuple(lam2)))
    return out


# -- real graphs ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Graph:
    adjacency: np.ndarray
    node_ids: list
    clusters: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]


def _data_lines(path):
    try:
        fh = open(path)
    except OSError as exc:
        raise IngestionError(f"cannot read file: {exc}", path) from exc
    with fh:
        for lineno, line in enumerate(fh, 1):
            text = line.split("#", 1)[0].strip()
            if text and not text.startswith("%"):
                yield lineno, text.split()


def _sort_ids(ids):
    try:
        return sorted(ids, key=int)
    except ValueError:
        return sorted(ids)


def ingest_edge_list(path, labels_path=None, num_nodes: int | None = None) -> Graph:
    """Read an undirected graph from whitespace-separated id pairs.

    Node ids are remapped densely (numeric order when all ids are integers).
    Duplicate and reversed edges collapse; self-loops are dropped with a
    warning. The optional labels file has either one value per line (aligned
    with the remapped ids) or "node cluster" pairs; in the pair form every
    labelled node is part of the graph even without edges. ``num_nodes``
    declares integer ids 0..num_nodes-1, so isolated nodes are kept.
    """
    edges = []
    for lineno, tok in _data_lines(path):
        if len(tok) < 2:
            raise IngestionError("expected two node ids", path, lineno)
        u, v = tok[0], tok[1]
        if u == v:
            log.warning("%s:%d: dropping self-loop on node %s", path, lineno, u)
            continue
        edges.append((u, v))

    label_pairs = None
    label_list = None
    if labels_path is not None:
        rows = list(_data_lines(labels_path))
        if rows and all(len(tok) == 1 for _, tok in rows):
            label_list = [(ln, tok[0]) for ln, tok in rows]
        else:
            label_pairs = {}
            for ln, tok in rows:
                if len(tok) != 2:
                    raise IngestionError("expected 'node cluster'", labels_path, ln)
                node, cl = tok
                if node in label_pairs and label_pairs[node] != cl:
                    raise IngestionError(f"node {node} has conflicting clusters",
                                         labels_path, ln)
                label_pairs[node] = cl

    ids = {u for e in edges for u in e}
    if label_pairs is not None:
        missing = ids - set(label_pairs)
        if missing:
            first = _sort_ids(missing)[0]
            lineno = next(ln for ln, tok in _data_lines(path) if first in tok[:2])
            raise IngestionError(f"node {first} has no cluster label", path, lineno)
        ids |= set(label_pairs)
    if num_nodes is not None:
        declared = [str(i) for i in range(num_nodes)]
        extra = ids - set(declared)
        if extra:
            bad = _sort_ids(extra)[0]
            lineno = next((ln for ln, tok in _data_lines(path) if bad in tok[:2]), None)
            raise IngestionError(f"node id {bad} outside 0..{num_nodes - 1}", path, lineno)
        ids = set(declared)
    node_ids = _sort_ids(ids)
    index = {u: i for i, u in enumerate(node_ids)}
    n = len(node_ids)
    A = np.zeros((n, n), dtype=np.uint8)
    for u, v in edges:
        A[index[u], index[v]] = 1
        A[index[v], index[u]] = 1

    clusters = None
    if label_list is not None:
        if len(label_list) != n:
            ln = label_list[min(len(label_list), n) - 1][0] if label_list else None
            raise IngestionError(f"{len(label_list)} labels for {n} nodes", labels_path, ln)
        clusters = np.array([_parse_cluster(v) for _, v in label_list], dtype=object)
    elif label_pairs is not None:
        clusters = np.array([_parse_cluster(label_pairs[u]) for u in node_ids], dtype=object)
    return Graph(A, node_ids, clusters)


def _parse_cluster(v):
    try:
        return int(v)
    except ValueError:
        return v


def two_largest_clusters(graph: Graph) -> tuple[Graph, np.ndarray, tuple[int, int]]:
    """Induced subgraph on the two largest clusters, labelled +1 (larger) / -1.

    Ties in size are broken by cluster id order.
    """
    if graph.clusters is None:
        raise IngestionError("graph has no cluster labels")
    values, counts = np.unique(graph.clusters.astype(str), return_counts=True)
    if values.shape[0] < 2:
        raise IngestionError("need at least two clusters")
    order = sorted(range(len(values)), key=lambda i: (-counts[i], _sort_key(values[i])))
    big, small = values[order[0]], values[order[1]]
    cl = graph.clusters.astype(str)
    keep = np.flatnonzero((cl == big) | (cl == small))
    labels = np.where(cl[keep] == big, 1, -1).astype(np.int64)
    sub = Graph(graph.adjacency[np.ix_(keep, keep)], [graph.node_ids[i] for i in keep],
                graph.clusters[keep])
    return sub, labels, (int(counts[order[0]]), int(counts[order[1]]))


def _sort_key(v):
    try:
        return (0, int(v), "")
    except ValueError:
        return (1, 0, v)


@dataclass(frozen=True, eq=False)
class RealDataResult:
    n: int
    cluster_sizes: tuple[int, int]
    accuracy: float
    signed_rank_one: bool
    labels: np.ndarray
    solution: sdp.SdpSolution

    def to_dict(self):
        return {"n": self.n, "cluster_sizes": list(self.cluster_sizes),
                "accuracy": self.accuracy, "signed_rank_one": self.signed_rank_one,
                "solver": self.solution.summary()}


def flip_accuracy(labels, truth) -> float:
    match = float(np.mean(np.asarray(labels) == np.asarray(truth)))
    return max(match, 1.0 - match)


def score_real(adjacency, labels, config: sdp.SolverConfig | None = None) -> RealDataResult:
    """Solve, take sign(Y), read labels off its leading eigenvector, score."""
    truth = np.asarray(labels)
    sol = sdp.solve(adjacency, config)
    signed = np.where(sol.Y >= 0, 1.0, -1.0)
    rank_one = bool(np.linalg.matrix_rank(signed) == 1)
    if not rank_one:
        log.warning("sign(Y) is not rank one; reading its leading eigenvector")
    est = sdp.round_labels(signed)
    sizes = (int(np.sum(truth == 1)), int(np.sum(truth == -1)))
    return RealDataResult(truth.shape[0], sizes, flip_accuracy(est, truth), rank_one, est, sol)
