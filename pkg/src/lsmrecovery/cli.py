"""Command line entry point: ``lsm-recovery <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import certificate, harness, mle, moments, regimes, sdp
from .errors import LsmError, NumericalError
from .model import ModelParams, generate, load_instance, save_instance, write_labels

log = logging.getLogger("lsmrecovery")


def _emit(obj, out=None):
    text = json.dumps(obj, indent=2, default=_json_default)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def _grid(specs):
    out = {}
    for item in specs or []:
        try:
            key, rng = item.split("=", 1)
            start, stop, step = (float(x) for x in rng.split(":"))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad --grid {item!r}; use mu=START:STOP:STEP")
        if key not in ("mu", "sigma"):
            raise argparse.ArgumentTypeError(f"--grid key must be mu or sigma, got {key!r}")
        out[key] = harness.grid_values(start, stop, step)
    return out


def _constants(args):
    return regimes.RegimeConstants(c0_mle=args.c0_mle, c1_mle=args.c1_mle,
                                   c0_sdp=args.c0, c1_sdp=args.c1, c2_sdp=args.c2)


def _solver(args):
    return sdp.SolverConfig(method=args.method, max_iters=args.max_iters,
                            feas_tol=args.tol, seed=args.seed)


def _params(args):
    return ModelParams(args.n, args.d, args.mu, args.sigma, getattr(args, "kernel", "sqexp"))


def _load_graph(args):
    """Adjacency, labels (or None) and latent info from a dir or edge list."""
    src = Path(args.input)
    if src.is_dir():
        inst = load_instance(src)
        return inst.adjacency, inst.labels, inst
    g = harness.ingest_edge_list(src, getattr(args, "labels", None), args.nodes)
    labels = None
    if g.clusters is not None:
        labels = np.array([int(c) for c in g.clusters], dtype=np.int64)
    return g.adjacency, labels, None


# -- subcommands ------------------------------------------------------------------

def cmd_gen(args):
    inst = generate(_params(args), args.seed)
    save_instance(inst, args.out)
    A = inst.adjacency
    _emit({"out": str(args.out), "n": inst.n, "edges": int(A.sum() // 2),
           "seed": args.seed})


def cmd_moments(args):
    cf = moments.closed_form(args.d, args.mu, args.sigma)
    out = {"closed_form": cf.to_dict()}
    if args.samples:
        params = ModelParams(4, args.d, args.mu, args.sigma)
        mc = moments.monte_carlo(params, args.samples, args.seed)
        out["monte_carlo"] = mc.to_dict()
        out["z_scores"] = moments.compare(cf, mc)
    _emit(out, args.out)


def cmd_regime(args):
    m = moments.closed_form(args.d, args.mu, args.sigma)
    _emit(regimes.classify(args.n, m, _constants(args)).to_dict(), args.out)


def cmd_regime_grid(args):
    grid = _grid(args.grid)
    consts = _constants(args)
    rows = []
    for mu in grid.get("mu", (args.mu,)):
        for sigma in grid.get("sigma", (args.sigma,)):
            rep = regimes.classify(args.n, moments.closed_form(args.d, mu, sigma), consts)
            rows.append(regimes.report_row(rep))
    harness.write_rows(rows, regimes.GRID_COLUMNS, args.out or sys.stdout)


def cmd_solve(args):
    A, labels, _ = _load_graph(args)
    sol = sdp.solve(A, _solver(args))
    out = sol.summary()
    if labels is not None:
        out["accuracy"] = harness.flip_accuracy(sol.rounded_labels, labels)
        if abs(int(np.sum(labels))) == 0:
            out["success"] = sdp.success_test(sol.Y, labels)
    if args.labels_out:
        write_labels(sol.rounded_labels, args.labels_out)
    _emit(out, args.out)


def cmd_certify(args):
    if args.input is None:
        inst = generate(_params(args), args.seed)
        A, labels = inst.adjacency, inst.labels
    else:
        A, labels, inst = _load_graph(args)
        if labels is None:
            raise LsmError("certify needs ground-truth labels (--labels or an instance dir)")
    rep = certificate.certify(A, labels, args.eig_tol)
    out = rep.to_dict()
    if inst is not None and inst.params.kernel == "sqexp":
        m = moments.from_params(inst.params)
        margins = certificate.lemma5_margins(A, inst.kernel_matrix(), labels, m)
        out["margins"] = margins.to_dict()
    _emit(out, args.out)


def cmd_mle(args):
    A, _, _ = _load_graph(args)
    _emit(mle.brute_force_mle(A, balanced_only=args.balanced).to_dict(), args.out)


def cmd_sweep(args):
    grid = _grid(args.grid)
    spec = harness.SweepSpec(
        mu_values=grid.get("mu", (args.mu,)), sigma_values=grid.get("sigma", (args.sigma,)),
        n=args.n, d=args.d, trials_cert=args.trials_cert, trials_sdp=args.trials_sdp,
        seed=args.seed, constants=_constants(args), solver=_solver(args))

    def progress(cell):
        log.info("mu=%g sigma=%g cert=%d/%d sdp=%d/%d", cell.mu, cell.sigma,
                 cell.cert_successes, cell.trials_cert, cell.sdp_successes, cell.trials_sdp)

    cells = harness.run_sweep(spec, workers=args.workers, progress=progress)
    harness.write_sweep_csv(cells, args.out or sys.stdout)


def cmd_replicate(args):
    rows = harness.replicate_appendix_d(
        n=args.n, mu=args.mu, sigmas=tuple(args.sigma), trials=args.trials, d=args.d,
        seed=args.seed, run_sdp=args.run_sdp, solver=_solver(args),
        progress=lambda s, t, rep: log.info("sigma=%g trial=%d lambda2=%.4g", s, t,
                                            rep.lambda_2))
    _emit({"n": args.n, "d": args.d, "mu": args.mu, "rows": [
        {"sigma": r.sigma, "trials": r.trials, "positive_lambda2": r.positive_lambda2,
         "certified": r.certified, "sdp_successes": r.sdp_successes,
         "lambda2": list(r.lambda2)} for r in rows]}, args.out)


def cmd_score_real(args):
    g = harness.ingest_edge_list(args.input, args.labels, args.nodes)
    sub, labels, _ = harness.two_largest_clusters(g)
    res = harness.score_real(sub.adjacency, labels, _solver(args))
    _emit(res.to_dict(), args.out)


# -- parser -----------------------------------------------------------------------

def _model_flags(p, n=300):
    p.add_argument("--n", type=int, default=n)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=0)


def _const_flags(p):
    p.add_argument("--c0", type=float, default=1.0, help="c0 for the SDP conditions")
    p.add_argument("--c0-mle", type=float, default=13.0, help="c0 for the MLE conditions")
    p.add_argument("--c1", type=float, default=500.0, help="c1 for the SDP conditions")
    p.add_argument("--c1-mle", type=float, default=500.0)
    p.add_argument("--c2", type=float, default=500.0)


def _solver_flags(p):
    p.add_argument("--method", choices=("ipm", "admm"), default="ipm")
    p.add_argument("--max-iters", type=int, default=5000)
    p.add_argument("--tol", type=float, default=1e-6)


def _graph_input(p, labels=True):
    p.add_argument("input", help="edge-list file or instance directory from `gen`")
    if labels:
        p.add_argument("--labels", help="labels file: one +-1 per line or 'node cluster' pairs")
    p.add_argument("--nodes", type=int, help="node ids are 0..NODES-1 (keeps isolated nodes)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lsm-recovery", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="sample an instance and write it to a directory")
    _model_flags(p)
    p.add_argument("--kernel", default="sqexp")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("moments", help="closed-form and Monte-Carlo moments")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=0.3)
    p.add_argument("--samples", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("regime", help="evaluate the recovery conditions at one point")
    _model_flags(p)
    _const_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_regime)

    p = sub.add_parser("regime-grid", help="recovery conditions over a (mu, sigma) grid")
    _model_flags(p)
    _const_flags(p)
    p.add_argument("--grid", action="append", help="mu=START:STOP:STEP or sigma=...")
    p.add_argument("--out")
    p.set_defaults(func=cmd_regime_grid)

    p = sub.add_parser("solve", help="solve the SDP relaxation for a graph")
    _graph_input(p)
    _solver_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--labels-out")
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("certify", help="dual-certificate test against ground truth")
    p.add_argument("input", nargs="?", help="edge list or instance dir; omit to generate")
    p.add_argument("--labels")
    p.add_argument("--nodes", type=int)
    _model_flags(p)
    p.add_argument("--eig-tol", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("mle", help="brute-force maximiser (n <= 24)")
    _graph_input(p, labels=False)
    p.add_argument("--balanced", action="store_true", help="only balanced label vectors")
    p.add_argument("--out")
    p.set_defaults(func=cmd_mle)

    p = sub.add_parser("sweep", help="phase-diagram sweep to CSV")
    _model_flags(p)
    _const_flags(p)
    _solver_flags(p)
    p.add_argument("--grid", action="append")
    p.add_argument("--trials-cert", type=int, default=100)
    p.add_argument("--trials-sdp", type=int, default=10)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("replicate-appendix-d", help="large-n certificate replication")
    p.add_argument("--n", type=int, default=5000)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--sigma", type=float, action="append")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--run-sdp", action="store_true")
    _solver_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_replicate)

    p = sub.add_parser("score-real", help="SDP accuracy on the two largest clusters")
    _graph_input(p)
    _solver_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_score_real)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "sigma", None) is None and args.command == "replicate-appendix-d":
        args.sigma = [0.05, 0.3]
    try:
        args.func(args)
    except argparse.ArgumentTypeError as exc:
        ap.error(str(exc))
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except LsmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
