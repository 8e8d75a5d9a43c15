"""Moment parameters p, p', q, q', r, s0, s1 of the latent space model.

``closed_form`` covers Gaussian latents with the squared-exponential kernel.
``monte_carlo`` estimates the same seven quantities for any registered
kernel by direct sampling and doubles as an independent check of the
closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .model import ModelParams, get_kernel

NAMES = ("p", "p_prime", "q", "q_prime", "r", "s0", "s1")


@dataclass(frozen=True)
class GaussianMoments:
    """The seven moment parameters.

    ``source`` is (d, mu_norm, sigma) when the values came from a model,
    ``stderr`` holds per-quantity standard errors for Monte-Carlo estimates.
    """

    p: float
    p_prime: float
    q: float
    q_prime: float
    r: float
    s0: float
    s1: float
    source: tuple | None = None
    stderr: dict | None = None

    def values(self) -> dict[str, float]:
        return {k: float(getattr(self, k)) for k in NAMES}

    def to_dict(self) -> dict:
        out = self.values()
        if self.source is not None:
            out["source"] = dict(zip(("d", "mu_norm", "sigma"), self.source))
        if self.stderr is not None:
            out["stderr"] = {k: float(v) for k, v in self.stderr.items()}
        return out

    @property
    def homophily_gap(self) -> float:
        """p(1 - q): within minus cross edge probability."""
        return self.p * (1.0 - self.q)


def _check(d, mu_norm, sigma):
    if int(d) != d or d < 1:
        raise InvalidParameterError(f"d must be a positive integer, got {d}")
    if not sigma > 0:
        raise InvalidParameterError(f"sigma must be > 0, got {sigma}")
    if not mu_norm >= 0:
        raise InvalidParameterError(f"mu_norm must be >= 0, got {mu_norm}")


def closed_form(d: int, mu_norm: float, sigma: float) -> GaussianMoments:
    _check(d, mu_norm, sigma)
    s2 = float(sigma) ** 2
    m2 = float(mu_norm) ** 2
    half_d = 0.5 * d
    # powers in log space; log1p keeps precision for small sigma
    p = np.exp(-half_d * np.log1p(4 * s2))
    p_prime = np.exp(-half_d * np.log1p(8 * s2))
    r = np.exp(-half_d * (np.log1p(2 * s2) + np.log1p(6 * s2)))
    q = np.exp(-4 * m2 / (4 * s2 + 1))
    q_prime = np.exp(-8 * m2 / (8 * s2 + 1))
    s0 = np.exp(-8 * m2 / (6 * s2 + 1))
    s1 = np.exp(-4 * (4 * s2 + 1) * m2 / (12 * s2 * s2 + 8 * s2 + 1))
    return GaussianMoments(
        float(p), float(p_prime), float(q), float(q_prime), float(r),
        float(s0), float(s1), source=(int(d), float(mu_norm), float(sigma)),
    )


def latent_excess(m: GaussianMoments) -> float:
    """p'(1 + q') - p^2(1 + q^2).

    The two products agree to several digits when sigma is small, so for
    closed-form moments the difference is evaluated through expm1 of the
    log-ratio instead of by subtraction.
    """
    if m.source is None or m.stderr is not None:
        return m.p_prime * (1.0 + m.q_prime) - m.p * m.p * (1.0 + m.q * m.q)
    d, mu_norm, sigma = m.source
    s2, m2 = sigma * sigma, mu_norm * mu_norm
    # log(p^2 / p') and log(q^2 / q')
    log_p = -0.5 * d * np.log1p(16 * s2 * s2 / (1 + 8 * s2))
    log_q = -32 * m2 * s2 / ((4 * s2 + 1) * (8 * s2 + 1))
    first = -m.p_prime * np.expm1(log_p)
    second = -m.p_prime * m.q_prime * np.expm1(log_p + log_q)
    return float(first + second)


def from_params(params: ModelParams) -> GaussianMoments:
    return closed_form(params.d, params.mu_norm, params.sigma)


def _ratio(num, num_se, den, den_se):
    ratio = num / den
    se = np.hypot(num_se / den, num * den_se / den**2)
    return ratio, se


def monte_carlo(params: ModelParams, num_samples: int = 10**6, rng=None,
                chunk: int = 250_000) -> GaussianMoments:
    """Estimate the seven moments by sampling latent pairs and triples.

    Each conditional case uses its own fresh draws. Ratio quantities are
    ratios of mean estimates, with delta-method standard errors.
    """
    if num_samples < 1000:
        raise InvalidParameterError("num_samples must be >= 1000")
    rng = np.random.default_rng(rng)
    f = get_kernel(params.kernel).fn
    mu, sigma, d = params.mean, params.sigma, params.d

    def draw(sign):
        return sign[:, None] * mu[None, :] + rng.normal(scale=sigma, size=(sign.shape[0], d))

    # accumulators: sum and sum of squares per statistic
    stats = {k: [0.0, 0.0] for k in ("w", "w2", "c", "c2", "r", "s0", "s1")}

    def add(key, v):
        stats[key][0] += v.sum()
        stats[key][1] += np.square(v).sum()

    done = 0
    while done < num_samples:
        m = min(chunk, num_samples - done)
        done += m

        def signs():
            return rng.choice(np.array([1.0, -1.0]), size=m)

        y = signs()
        fw = f(draw(y), draw(y))
        add("w", fw)
        add("w2", fw ** 2)
        y = signs()
        fc = f(draw(y), draw(-y))
        add("c", fc)
        add("c2", fc ** 2)
        # r: i, j, k all same label
        y = signs()
        xk = draw(y)
        add("r", f(draw(y), xk) * f(draw(y), xk))
        # s0: i, j share a label, k differs
        y = signs()
        xk = draw(-y)
        add("s0", f(draw(y), xk) * f(draw(y), xk))
        # s1: i and k share a label, j differs
        y = signs()
        xk = draw(y)
        add("s1", f(draw(y), xk) * f(draw(-y), xk))

    N = float(num_samples)
    est = {}
    for key, (s, ss) in stats.items():
        mean = s / N
        var = max(ss / N - mean * mean, 0.0) * N / (N - 1)
        est[key] = (mean, np.sqrt(var / N))

    p, p_se = est["w"]
    pp, pp_se = est["w2"]
    r, r_se = est["r"]
    q, q_se = _ratio(*est["c"], p, p_se)
    qp, qp_se = _ratio(*est["c2"], pp, pp_se)
    s0, s0_se = _ratio(*est["s0"], r, r_se)
    s1, s1_se = _ratio(*est["s1"], r, r_se)
    stderr = dict(zip(NAMES, map(float, (p_se, pp_se, q_se, qp_se, r_se, s0_se, s1_se))))
    return GaussianMoments(
        float(p), float(pp), float(q), float(qp), float(r), float(s0), float(s1),
        source=(params.d, params.mu_norm, params.sigma), stderr=stderr,
    )


def compare(closed: GaussianMoments, estimate: GaussianMoments) -> dict[str, float]:
    """|closed - estimate| in units of the estimate's standard error."""
    out = {}
    for k in NAMES:
        diff = abs(getattr(closed, k) - getattr(estimate, k))
        se = estimate.stderr[k]
        out[k] = diff / se if se > 0 else (0.0 if diff == 0 else np.inf)
    return out
