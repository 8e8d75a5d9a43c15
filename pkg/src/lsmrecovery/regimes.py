"""Sufficient/necessary recovery conditions evaluated on moment parameters.

Three independent checks:

* ``check_impossible``: information-theoretic failure (every estimator errs
  with probability >= 1/2).
* ``check_mle``: exact recovery by the exhaustive quadratic estimator.
* ``check_sdp``: exact recovery by the semidefinite relaxation.

The conditions are one-sided, so a parameter point may satisfy several of
them or none. Every check keeps the raw left and right sides so that the
verdict can be recomputed by hand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError
from .moments import GaussianMoments, latent_excess

LOG2 = math.log(2.0)


@dataclass(frozen=True)
class RegimeConstants:
    c0_mle: float = 13.0
    c1_mle: float = 500.0
    c0_sdp: float = 1.0
    c1_sdp: float = 500.0
    c2_sdp: float = 500.0

    def __post_init__(self):
        if not self.c0_mle > 12.5:
            raise InvalidParameterError(f"c0 for the MLE check must exceed 25/2, got {self.c0_mle}")
        for name in ("c1_mle", "c0_sdp", "c1_sdp", "c2_sdp"):
            if not getattr(self, name) > 0:
                raise InvalidParameterError(f"{name} must be > 0")


@dataclass(frozen=True)
class Condition:
    name: str
    lhs: float
    rhs: float
    relation: str  # "<=" or ">="

    @property
    def holds(self) -> bool:
        if math.isnan(self.lhs) or math.isnan(self.rhs):
            return False
        return self.lhs <= self.rhs if self.relation == "<=" else self.lhs >= self.rhs

    def to_dict(self):
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs,
                "relation": self.relation, "holds": self.holds}


@dataclass(frozen=True)
class Check:
    """Conjunction of conditions plus metadata.

    ``verdict`` is None when the check does not apply (``note`` says why).
    """

    name: str
    conditions: tuple[Condition, ...]
    verdict: bool | None
    success_bound: float | None = None
    note: str = ""
    extra: dict = field(default_factory=dict)

    def condition(self, name: str) -> Condition:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self):
        out = {"verdict": self.verdict,
               "conditions": [c.to_dict() for c in self.conditions]}
        if self.success_bound is not None:
            out["success_bound"] = self.success_bound
        if self.note:
            out["note"] = self.note
        out.update(self.extra)
        return out


def _f(x) -> float:
    return float(x)


def _inv_sq(x):
    with np.errstate(divide="ignore"):
        return np.float64(1.0) / np.float64(x) ** 2


def _check_n(n):
    if int(n) != n or n < 1:
        raise InvalidParameterError(f"n must be a positive integer, got {n}")


def check_impossible(n: int, m: GaussianMoments) -> Check:
    """-p log q <= 3 log 2 / (10 n); only stated for n >= 10."""
    _check_n(n)
    with np.errstate(divide="ignore"):
        lhs = -m.p * np.log(np.float64(m.q))
    lhs = _f(lhs) + 0.0  # normalise -0.0
    cond = Condition("fano", lhs, 3.0 * LOG2 / (10.0 * n), "<=")
    if n < 10:
        return Check("impossible", (cond,), None, note="not applicable: requires n >= 10")
    return Check("impossible", (cond,), cond.holds)


def check_mle(n: int, m: GaussianMoments, c0: float = 13.0, c1: float = 500.0) -> Check:
    _check_n(n)
    if not c0 > 12.5:
        raise InvalidParameterError(f"c0 must exceed 25/2, got {c0}")
    if not c1 > 0:
        raise InvalidParameterError(f"c1 must be > 0, got {c1}")
    p, q = m.p, m.q
    sep = p * p * (1.0 - q) ** 2
    first = Condition(
        "separation", _f(sep),
        3375.0 * math.log(n) / n + 75.0 * math.log(2.0 * c0 / 25.0) / n, ">=",
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        lhs2 = 32.0 * _inv_sq(p) * _inv_sq(1.0 - q) * latent_excess(m)
    second = Condition("latent_variance", _f(lhs2), c1 / n**2, "<=")
    verdict = first.holds and second.holds
    return Check("mle", (first, second), verdict, success_bound=1.0 - (c0 + c1) / n)


def sdp_d_condition_terms(n: int, m: GaussianMoments) -> tuple[float, float, float]:
    """The three summands of the degree-concentration condition, as printed."""
    p, pp, q, r, s0, s1 = m.p, m.p_prime, m.q, m.r, m.s0, m.s1
    with np.errstate(divide="ignore", invalid="ignore"):
        k = _inv_sq(p) * _inv_sq(1.0 - q)  # p^-2 (1-q)^-2
        inv_gap = np.float64(1.0) / np.float64(1.0 - q)
        t1 = 4.0 * n * (4.0 * n * r * k * (1.0 - s0 - 2.0 * s1) - 1.0)
        t2 = 32.0 * n * (2.0 * inv_gap - 2.0 * pp * k + r * k * (3.0 - s0 - 2.0 * s1))
        t3 = 64.0 * (2.0 * r * k - pp * k - _inv_sq(1.0 - q))
    return _f(t1), _f(t2), _f(t3)


def check_sdp(n: int, m: GaussianMoments, c0: float = 1.0, c1: float = 500.0,
              c2: float = 500.0) -> Check:
    _check_n(n)
    for name, c in (("c0", c0), ("c1", c1), ("c2", c2)):
        if not c > 0:
            raise InvalidParameterError(f"{name} must be > 0, got {c}")
    p, q = m.p, m.q
    precondition = p * (1.0 + q)
    first = Condition(
        "separation", _f(p * p * (1.0 - q) ** 2),
        512.0 * math.log(n) / n - math.log(c0) / n, ">=",
    )
    terms = sdp_d_condition_terms(n, m)
    second = Condition("degree_concentration", _f(math.fsum(terms)), float(c1), "<=")
    with np.errstate(divide="ignore", invalid="ignore"):
        # p'p^-2(1+q') - (1+q^2), rearranged to share the stable difference
        lhs3 = 32.0 * n * _inv_sq(1.0 - q) * _inv_sq(p) * latent_excess(m)
    third = Condition("adjacency_concentration", _f(lhs3), float(c2), "<=")
    extra = {"precondition_lhs": _f(precondition),
             "precondition_ok": bool(precondition <= 1.0),
             "degree_condition_terms": list(terms)}
    bound = 1.0 - (2.0 * c0 + c1 + c2) / n
    conds = (first, second, third)
    if precondition > 1.0:
        return Check("sdp", conds, None, success_bound=bound,
                     note="precondition violated: p(1+q) > 1", extra=extra)
    verdict = all(c.holds for c in conds)
    return Check("sdp", conds, verdict, success_bound=bound, extra=extra)


@dataclass(frozen=True)
class RegimeReport:
    n: int
    moments: GaussianMoments
    constants: RegimeConstants
    impossible: Check
    mle: Check
    sdp: Check

    @property
    def precondition_ok(self) -> bool:
        return bool(self.sdp.extra["precondition_ok"])

    @property
    def label(self) -> str:
        """Short tag for tables; theory gives no answer for "indeterminate"."""
        tags = []
        if self.impossible.verdict:
            tags.append("impossible")
        if self.sdp.verdict:
            tags.append("sdp")
        if self.mle.verdict:
            tags.append("mle")
        return "+".join(tags) if tags else "indeterminate"

    def to_dict(self):
        return {
            "n": self.n,
            "moments": self.moments.to_dict(),
            "constants": vars(self.constants).copy(),
            "impossible": self.impossible.to_dict(),
            "mle_recoverable": self.mle.to_dict(),
            "sdp_recoverable": self.sdp.to_dict(),
            "precondition_ok": self.precondition_ok,
            "label": self.label,
        }


def classify(n: int, moments: GaussianMoments,
             constants: RegimeConstants | None = None) -> RegimeReport:
    c = constants or RegimeConstants()
    return RegimeReport(
        n, moments, c,
        check_impossible(n, moments),
        check_mle(n, moments, c.c0_mle, c.c1_mle),
        check_sdp(n, moments, c.c0_sdp, c.c1_sdp, c.c2_sdp),
    )


GRID_COLUMNS = (
    ["mu", "sigma", "n", "d", "p", "p_prime", "q", "q_prime", "r", "s0", "s1",
     "fano_lhs", "fano_rhs", "impossible",
     "mle_sep_lhs", "mle_sep_rhs", "mle_var_lhs", "mle_var_rhs", "mle_recoverable",
     "sdp_precondition_lhs", "sdp_sep_lhs", "sdp_sep_rhs", "sdp_deg_lhs", "sdp_deg_rhs",
     "sdp_adj_lhs", "sdp_adj_rhs", "sdp_recoverable", "label"]
)


def report_row(report: RegimeReport) -> dict:
    """Flatten a report into one CSV row (see GRID_COLUMNS)."""
    d, mu, sigma = report.moments.source or (None, None, None)
    imp, mle, sdp = report.impossible, report.mle, report.sdp
    row = {"mu": mu, "sigma": sigma, "n": report.n, "d": d}
    row.update(report.moments.values())
    row.update({
        "fano_lhs": imp.conditions[0].lhs, "fano_rhs": imp.conditions[0].rhs,
        "impossible": imp.verdict,
        "mle_sep_lhs": mle.conditions[0].lhs, "mle_sep_rhs": mle.conditions[0].rhs,
        "mle_var_lhs": mle.conditions[1].lhs, "mle_var_rhs": mle.conditions[1].rhs,
        "mle_recoverable": mle.verdict,
        "sdp_precondition_lhs": sdp.extra["precondition_lhs"],
        "sdp_sep_lhs": sdp.conditions[0].lhs, "sdp_sep_rhs": sdp.conditions[0].rhs,
        "sdp_deg_lhs": sdp.conditions[1].lhs, "sdp_deg_rhs": sdp.conditions[1].rhs,
        "sdp_adj_lhs": sdp.conditions[2].lhs, "sdp_adj_rhs": sdp.conditions[2].rhs,
        "sdp_recoverable": "precondition violated" if sdp.verdict is None else sdp.verdict,
        "label": report.label,
    })
    return row
