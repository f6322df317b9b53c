"""Posterior inference for the GIM influence constant from repost data.

Single-parameter random-walk Metropolis under a uniform prior, pooled over
independently seeded chains, with the usual MCMC summaries (naive and
time-series standard errors, quantiles, autocorrelation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .datasets import RepostDataset, repost_link

LIKELIHOOD_FLOOR = 1e-12
QUANTILE_LEVELS = (0.025, 0.25, 0.5, 0.75, 0.975)


class LagError(ValueError):
    pass


@dataclass(frozen=True)
class PriorSpec:
    low: float = 0.0
    high: float = 5.0
    kind: str = "uniform"

    def __post_init__(self):
        if self.kind != "uniform":
            raise ValueError("only uniform priors are supported")
        if not self.low < self.high:
            raise ValueError("prior needs low < high")
        if self.low < 0:
            raise ValueError("prior support must be non-negative")

    @property
    def width(self) -> float:
        return self.high - self.low


@dataclass(frozen=True)
class McmcConfig:
    chains: int = 3
    iterations: int = 10_000
    burn_in: int = 1_000
    thin: int = 5
    seed: int = 1
    proposal_sd: Optional[float] = None  # default 0.15 * prior width

    def __post_init__(self):
        if self.chains < 1 or self.iterations < 1 or self.thin < 1:
            raise ValueError("chains, iterations and thin must be positive")
        if self.burn_in < 0:
            raise ValueError("burn_in must be non-negative")
        if self.thin > self.iterations:
            raise ValueError("thin must not exceed iterations")
        if self.proposal_sd is not None and self.proposal_sd <= 0:
            raise ValueError("proposal_sd must be positive")


@dataclass
class PosteriorRun:
    draws: list
    acceptance_rate: float = float("nan")
    low_acceptance: bool = False
    mean: float = float("nan")
    sd: float = float("nan")
    naive_se: float = float("nan")
    timeseries_se: float = float("nan")
    quantiles: dict = field(default_factory=dict)
    acf: Optional[np.ndarray] = None
    tau: float = float("nan")
    mcse_ok: bool = False

    @property
    def pooled(self) -> np.ndarray:
        return np.concatenate([np.asarray(d, dtype=float) for d in self.draws])

    @property
    def n_kept(self) -> int:
        return sum(len(d) for d in self.draws)


def log_posterior(alpha: float, data: RepostDataset, prior: PriorSpec) -> float:
    """Bernoulli log-likelihood up to the flat prior's constant; -inf off the support."""
    if not prior.low <= alpha <= prior.high:
        return -math.inf
    if len(data) == 0:
        return 0.0
    p = repost_link(alpha, data.reposts, data.avg_friends, data.p0)
    p = np.clip(p, LIKELIHOOD_FLOOR, 1.0 - LIKELIHOOD_FLOOR)
    y = data.outcomes
    return float(np.sum(y * np.log(p) + (1.0 - y) * np.log1p(-p)))


def _run_chain(data, prior, cfg, chain: int):
    rng = np.random.default_rng(cfg.seed + chain)
    step = cfg.proposal_sd if cfg.proposal_sd is not None else 0.15 * prior.width
    total = cfg.burn_in + cfg.iterations
    current = rng.uniform(prior.low, prior.high)
    cur_lp = log_posterior(current, data, prior)
    noise = rng.normal(0.0, step, size=total)
    logu = np.log(rng.random(total))
    kept = []
    accepted = 0
    for t in range(total):
        prop = current + noise[t]
        lp = log_posterior(prop, data, prior)
        if lp - cur_lp >= logu[t]:
            current, cur_lp = prop, lp
            if t >= cfg.burn_in:
                accepted += 1
        if t >= cfg.burn_in and (t - cfg.burn_in + 1) % cfg.thin == 0:
            kept.append(current)
    return np.array(kept), accepted


def sample_posterior(data: RepostDataset, prior: PriorSpec, cfg: McmcConfig = McmcConfig(),
                     lag_max: int = 50) -> PosteriorRun:
    """Run ``cfg.chains`` chains seeded ``seed + chain`` and pool their kept draws."""
    draws, accepted = [], 0
    for c in range(cfg.chains):
        kept, acc = _run_chain(data, prior, cfg, c)
        draws.append(kept)
        accepted += acc
    rate = accepted / (cfg.chains * cfg.iterations)
    run = PosteriorRun(draws=draws, acceptance_rate=rate, low_acceptance=rate < 0.01)
    per_chain = min(len(d) for d in draws)
    return diagnostics(run, max(1, min(lag_max, per_chain - 1)))


def naive_se(sd: float, n_draws: int) -> float:
    return sd / math.sqrt(n_draws)


def autocorrelation(x, lag_max: int) -> np.ndarray:
    """Sample ACF at lags 0..lag_max (biased estimator, divides by n)."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    if n < lag_max + 1:
        raise LagError(f"need at least {lag_max + 1} draws for lag {lag_max}, got {n}")
    d = x - x.mean()
    c0 = float(d @ d) / n
    acf = np.zeros(lag_max + 1)
    acf[0] = 1.0
    if c0 <= 0.0:
        return acf
    for k in range(1, lag_max + 1):
        acf[k] = float(d[:-k] @ d[k:]) / n / c0
    return acf


def integrated_time(acf: np.ndarray) -> float:
    """1 + 2 * sum of ACF over lags >= 1, stopping at the first negative value."""
    tau = 1.0
    for r in acf[1:]:
        if r < 0:
            break
        tau += 2.0 * r
    return tau


def diagnostics(run: PosteriorRun, lag_max: int) -> PosteriorRun:
    """Fill summary statistics; the ACF is averaged over chains."""
    pooled = run.pooled
    if pooled.size == 0:
        raise ValueError("no draws")
    m = pooled.size
    run.mean = float(pooled.mean())
    run.sd = float(pooled.std(ddof=1)) if m > 1 else 0.0
    run.quantiles = {q: float(v) for q, v in zip(QUANTILE_LEVELS, np.quantile(pooled, QUANTILE_LEVELS))}
    run.acf = np.mean([autocorrelation(d, lag_max) for d in run.draws], axis=0)
    run.tau = integrated_time(run.acf)
    run.naive_se = naive_se(run.sd, m)
    run.timeseries_se = run.sd * math.sqrt(run.tau / m)
    run.mcse_ok = run.timeseries_se <= 0.05 * run.sd
    return run


SUMMARY_HEADER = ["Dataset", "Mean", "SD", "Naive SE", "Time Series SE",
                  "2.5%", "25%", "50%", "75%", "97.5%",
                  "Draws", "Acceptance", "MCSE OK", "Low Acceptance"]


def summary_row(name: str, run: PosteriorRun) -> list:
    q = run.quantiles
    return [name, f"{run.mean:.6f}", f"{run.sd:.6f}", f"{run.naive_se:.6f}", f"{run.timeseries_se:.6f}",
            *(f"{q[l]:.6f}" for l in QUANTILE_LEVELS),
            run.n_kept, f"{run.acceptance_rate:.4f}", int(run.mcse_ok), int(run.low_acceptance)]
