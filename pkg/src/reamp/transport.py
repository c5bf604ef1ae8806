"""Earth Mover's Distance between histogram features and pairwise cost matrices."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _simplex
from .ingest import HistogramFeatures

GROUND_METRICS = ("manhattan", "euclidean")
COST_MODES = ("emd", "ground")

MARGINAL_TOL = 1e-9


@dataclass(frozen=True)
class TransportPlan:
    flows: np.ndarray
    cost: float


@dataclass(frozen=True)
class CostMatrix:
    """Symmetric ``n x n`` pairwise costs with zero diagonal.

    ``metric`` is ``"emd"`` or ``"ground"`` (ground metric applied to the
    flattened feature matrices, no transport).
    """

    values: np.ndarray
    metric: str

    @property
    def n(self) -> int:
        return self.values.shape[0]


def _check_ground(ground):
    if ground not in GROUND_METRICS:
        raise ValueError(f"unknown ground metric {ground!r}; choose from {GROUND_METRICS}")
    return ground == "euclidean"


def _check_compatible(a, b):
    if a.features.shape != b.features.shape:
        raise ValueError(
            f"feature matrices differ in shape: {a.features.shape} vs {b.features.shape}")


def ground_distance_matrix(a: HistogramFeatures, b: HistogramFeatures,
                           ground: str = "euclidean") -> np.ndarray:
    """Distances between every row of ``a.features`` and every row of ``b.features``."""
    euclid = _check_ground(ground)
    _check_compatible(a, b)
    return _simplex.ground_matrix(a.features, b.features, euclid)


def _order_key(h):
    return h.weights.tobytes(), h.features.tobytes()


def _solve(a, b, euclid):
    sa = np.flatnonzero(a.weights > 0)
    sb = np.flatnonzero(b.weights > 0)
    wa = a.weights[sa]
    wb = b.weights[sb]
    if abs(wa.sum() - 1.0) > MARGINAL_TOL or abs(wb.sum() - 1.0) > MARGINAL_TOL:
        raise ValueError("histogram weights must each sum to 1")
    c = _simplex.ground_matrix(a.features[sa], b.features[sb], euclid)
    sub, total, _ = _simplex.transport_simplex(wa, wb, c)
    flows = np.zeros((a.p, b.p))
    flows[np.ix_(sa, sb)] = sub
    return flows, total


def emd(a: HistogramFeatures, b: HistogramFeatures, ground: str = "euclidean") -> TransportPlan:
    """Optimal transport plan and its cost between two weighted feature histograms.

    The problem is solved on the occupied bins only; empty bins carry zero
    flow in the returned ``p x p`` plan.  The two arguments are put into a
    canonical order before solving, so ``emd(a, b).cost == emd(b, a).cost``
    holds exactly.
    """
    euclid = _check_ground(ground)
    _check_compatible(a, b)
    if _order_key(b) < _order_key(a):
        flows, total = _solve(b, a, euclid)
        flows = flows.T
    else:
        flows, total = _solve(a, b, euclid)

    rows = np.abs(flows.sum(axis=1) - a.weights).max()
    cols = np.abs(flows.sum(axis=0) - b.weights).max()
    assert rows < MARGINAL_TOL and cols < MARGINAL_TOL, "infeasible transport plan"
    return TransportPlan(flows, float(total))


def _pack(features):
    offsets = [0]
    ws, xs = [], []
    for h in features:
        occ = h.weights > 0
        ws.append(h.weights[occ])
        xs.append(h.features[occ])
        offsets.append(offsets[-1] + int(occ.sum()))
    return (np.asarray(offsets, dtype=np.int64), np.concatenate(ws),
            np.ascontiguousarray(np.concatenate(xs)))


def cost_matrix(features: Sequence[HistogramFeatures], ground: str = "euclidean",
                mode: str = "emd", threads: int = 1) -> CostMatrix:
    """Pairwise costs between all frames.

    ``mode="emd"`` solves one transport problem per unordered pair;
    ``mode="ground"`` applies the ground metric to the row-concatenated
    feature matrices.  ``threads`` only changes the wall-clock time.
    """
    euclid = _check_ground(ground)
    if mode not in COST_MODES:
        raise ValueError(f"unknown cost mode {mode!r}; choose from {COST_MODES}")
    n = len(features)
    if n < 2:
        raise ValueError("need at least 2 frames for a cost matrix")
    for h in features[1:]:
        _check_compatible(features[0], h)

    iu, ju = np.triu_indices(n, k=1)
    if mode == "ground":
        flat = np.stack([h.features.ravel() for h in features])
        diff = flat[iu] - flat[ju]
        upper = np.sqrt((diff * diff).sum(axis=1)) if euclid else np.abs(diff).sum(axis=1)
    else:
        for h in features:
            if abs(h.weights.sum() - 1.0) > MARGINAL_TOL:
                raise ValueError("histogram weights must each sum to 1")
        # orient each pair like emd() does so both routes agree bit for bit
        rank = np.empty(n, dtype=np.int64)
        rank[sorted(range(n), key=lambda t: _order_key(features[t]))] = np.arange(n)
        swap = rank[ju] < rank[iu]
        left = np.where(swap, ju, iu).astype(np.int64)
        right = np.where(swap, iu, ju).astype(np.int64)
        offsets, w, x = _pack(features)

        def work(sl):
            return _simplex.pairwise_emd(offsets, w, x, left[sl], right[sl], euclid)

        threads = max(1, int(threads))
        bounds = np.linspace(0, left.size, threads + 1).astype(int)
        chunks = [slice(bounds[k], bounds[k + 1]) for k in range(threads)]
        if threads == 1:
            parts = [work(chunks[0])]
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                parts = list(pool.map(work, chunks))
        upper = np.concatenate(parts)

    values = np.zeros((n, n))
    values[iu, ju] = upper
    values[ju, iu] = upper
    return CostMatrix(values, mode)


def save_cost_matrix(path, cm: CostMatrix) -> None:
    np.savetxt(path, cm.values, delimiter=",", fmt="%.17g")
