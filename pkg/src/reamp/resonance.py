"""Stochastic resonance sampling over the count statistic.

Each iteration draws ``alpha, beta ~ U(a, b)`` and records the cut ``i``
minimising ``S(i) / f(i / n; alpha, beta)`` with ``f`` the Beta density.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import betaln

from .graph import CountStatistic


@dataclass(frozen=True)
class ResonanceConfig:
    # a > 1 keeps the Beta densities away from the path ends, where S is
    # always tiny; b much above 10 lets sharp priors lift shallow dips of S
    # inside a segment into spurious candidates
    a: float = 2.0
    b: float = 10.0
    iterations: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if not self.a >= 1e-6:
            raise ValueError(f"a must be >= 1e-6, got {self.a}")
        if not self.b >= self.a:
            raise ValueError(f"b must be >= a, got a={self.a}, b={self.b}")
        if int(self.iterations) != self.iterations or self.iterations < 1:
            raise ValueError(f"iterations must be a positive integer, got {self.iterations}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class ResonanceCloud:
    candidates: np.ndarray  # cut indices in 1..n-1, in draw order
    n: int

    def frequencies(self) -> np.ndarray:
        """Count of each cut ``1..n-1`` in the cloud."""
        return np.bincount(self.candidates, minlength=self.n)[1:]


def log_beta_pdf(x, alpha, beta):
    x = np.asarray(x, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if np.any((x <= 0) | (x >= 1)):
        raise ValueError("Beta density argument must lie in (0, 1)")
    if np.any(alpha <= 0) or np.any(beta <= 0):
        raise ValueError("Beta shape parameters must be positive")
    return (alpha - 1) * np.log(x) + (beta - 1) * np.log1p(-x) - betaln(alpha, beta)


def beta_pdf(x, alpha, beta):
    """Beta(alpha, beta) density at ``x`` in (0, 1), evaluated through logs."""
    return np.exp(log_beta_pdf(x, alpha, beta))


def _scores(values, alpha, beta):
    n = values.shape[0] + 1
    grid = np.arange(1, n) / n
    logf = log_beta_pdf(grid[None, :], np.atleast_1d(alpha)[:, None],
                        np.atleast_1d(beta)[:, None])
    return np.log(values)[None, :] - logf


def resonate_once(stat: CountStatistic, alpha: float, beta: float) -> int:
    """Cut minimising ``S(i) / f(i/n)``; the smallest index wins ties."""
    values = np.asarray(stat.values, dtype=float)
    scores = _scores(values, alpha, beta)[0]
    assert np.isfinite(scores).any(), "Beta density vanished on every cut"
    return int(np.argmin(scores)) + 1


def draw_shapes(cfg: ResonanceConfig, start: int = 0, stop: int | None = None):
    """``(alpha, beta)`` for iterations ``start..stop-1``.

    Iteration ``k`` always uses the stream seeded by ``(seed, k)``, so any
    split of the iteration range reproduces the same draws.
    """
    stop = cfg.iterations if stop is None else stop
    u = np.array([np.random.default_rng([cfg.seed, k]).random(2)
                  for k in range(start, stop)]).reshape(-1, 2)
    shapes = cfg.a + (cfg.b - cfg.a) * u
    return shapes[:, 0], shapes[:, 1]


def resonate(stat: CountStatistic, cfg: ResonanceConfig | None = None,
             threads: int = 1) -> ResonanceCloud:
    """Run ``cfg.iterations`` resonance draws and collect the argmin cuts."""
    cfg = cfg or ResonanceConfig()
    values = np.asarray(stat.values, dtype=float)
    if values.min() <= 0:
        raise ValueError("count statistic must be positive")
    out = np.empty(cfg.iterations, dtype=np.int64)

    def work(bounds):
        lo, hi = bounds
        for s in range(lo, hi, 1024):
            e = min(s + 1024, hi)
            alpha, beta = draw_shapes(cfg, s, e)
            out[s:e] = np.argmin(_scores(values, alpha, beta), axis=1) + 1

    threads = max(1, int(threads))
    edges = np.linspace(0, cfg.iterations, threads + 1).astype(int)
    spans = list(zip(edges[:-1], edges[1:]))
    if threads == 1:
        work(spans[0])
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, spans))
    return ResonanceCloud(out, stat.n)


def save_cloud(path, cloud: ResonanceCloud) -> None:
    np.savetxt(path, cloud.candidates, fmt="%d")
