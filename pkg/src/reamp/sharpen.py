"""Density of the resonance cloud, double data sharpening and peak localisation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .resonance import ResonanceCloud


@dataclass(frozen=True)
class DensityCurve:
    x: np.ndarray  # equally spaced bin midpoints, in time-index units
    y: np.ndarray
    count: int = 0  # number of samples behind a histogram, 0 if unknown

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])


@dataclass(frozen=True)
class SharpenConfig:
    """``threshold`` is relative to the curve maximum unless ``relative`` is False."""

    nb2: int = 90
    bandwidth: float | str = "auto"
    threshold: float = 0.05
    relative: bool = True

    def __post_init__(self):
        if int(self.nb2) != self.nb2 or self.nb2 < 4:
            raise ValueError(f"nb2 must be an integer >= 4, got {self.nb2!r}")
        if isinstance(self.bandwidth, str):
            if self.bandwidth != "auto":
                raise ValueError(f"bandwidth must be 'auto' or positive, got {self.bandwidth!r}")
        elif not self.bandwidth > 0:
            raise ValueError(f"bandwidth must be positive, got {self.bandwidth!r}")
        if not 0 < self.threshold < 1:
            raise ValueError(f"threshold must lie in (0, 1), got {self.threshold!r}")


@dataclass(frozen=True)
class ChangePointSet:
    estimates: tuple[int, ...]

    def __post_init__(self):
        est = tuple(int(e) for e in self.estimates)
        if list(est) != sorted(set(est)):
            raise ValueError("estimates must be strictly increasing")
        object.__setattr__(self, "estimates", est)

    def __len__(self):
        return len(self.estimates)

    def __iter__(self):
        return iter(self.estimates)


def cloud_histogram(cloud: ResonanceCloud, nb2: int) -> DensityCurve:
    """Density histogram of the candidates over ``[0.5, n - 0.5]``."""
    cand = np.asarray(cloud.candidates)
    if cand.size == 0:
        raise ValueError("empty resonance cloud")
    y, edges = np.histogram(cand, bins=nb2, range=(0.5, cloud.n - 0.5), density=True)
    return DensityCurve(0.5 * (edges[:-1] + edges[1:]), y, int(cand.size))


def nadaraya_watson(xq, xs, ys, h):
    """Gaussian-kernel Nadaraya-Watson regression of ``ys`` on ``xs`` at ``xq``.

    Squared distances are shifted by their minimum before exponentiating, so
    the weights never all underflow; far from the data the estimate tends to
    the value at the nearest ``xs``.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1 or xs.size < 2:
        raise ValueError("xs and ys must be 1-D of equal length >= 2")
    if not h > 0:
        raise ValueError("bandwidth must be positive")
    xq_arr = np.atleast_1d(np.asarray(xq, dtype=float))
    z2 = ((xq_arr[:, None] - xs[None, :]) / h) ** 2
    k = np.exp(-0.5 * (z2 - z2.min(axis=1, keepdims=True)))
    out = (k @ ys) / k.sum(axis=1)
    return out if np.ndim(xq) else float(out[0])


def auto_bandwidth(curve: DensityCurve) -> float:
    """Normal-reference bandwidth ``1.06 * sd * N ** (-1/5)``, at least one bin wide.

    ``sd`` is the spread of the histogram and ``N`` its sample count, or the
    number of bins when the count is unknown.
    """
    w = np.clip(curve.y, 0, None)
    if w.sum() <= 0:
        return curve.dx
    mean = np.average(curve.x, weights=w)
    sd = math.sqrt(np.average((curve.x - mean) ** 2, weights=w))
    size = curve.count if curve.count > 0 else curve.x.size
    h = 1.06 * sd * size ** -0.2
    return max(h, curve.dx)


def double_sharpen(curve: DensityCurve, cfg: SharpenConfig | None = None) -> DensityCurve:
    """Two data-sharpening steps followed by a final kernel smooth.

    ``y1 = 2y - g0(x)`` and ``y2 = y + y1 - g1(x)`` where ``gm`` is the
    Nadaraya-Watson fit to ``ym``; the result is the fit to ``y2`` evaluated
    at ``x``, clamped at zero.
    """
    cfg = cfg or SharpenConfig()
    h = auto_bandwidth(curve) if cfg.bandwidth == "auto" else float(cfg.bandwidth)
    x = curve.x
    y = np.asarray(curve.y, dtype=float)
    ym = y
    for _ in range(2):
        ym = y + ym - nadaraya_watson(x, x, ym, h)
    g2 = nadaraya_watson(x, x, ym, h)
    return DensityCurve(x.copy(), np.clip(g2, 0, None))


def localize(curve: DensityCurve, threshold: float = 0.05, n: int | None = None,
             relative: bool = True) -> ChangePointSet:
    """Ceiling of every thresholded interior local maximum of the curve.

    A maximum needs ``y[i] > y[i-1]`` and ``y[i] >= y[i+1]`` so plateaus
    resolve to their left end.  Results are clamped to ``[1, n - 1]``.
    """
    x = np.asarray(curve.x)
    y = np.asarray(curve.y)
    if y.size < 3 or y.max() <= 0:
        return ChangePointSet(())
    cut = threshold * y.max() if relative else threshold
    mid = y[1:-1]
    peak = (mid > y[:-2]) & (mid >= y[2:]) & (mid >= cut)
    locs = np.ceil(x[1:-1][peak]).astype(np.int64)
    if n is not None:
        locs = np.clip(locs, 1, n - 1)
    return ChangePointSet(tuple(np.unique(locs).tolist()))
