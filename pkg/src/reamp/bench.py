"""Simulation scenarios, Hausdorff scoring, Monte Carlo benchmarks and figure data."""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .ingest import BinningConfig, MatrixSequence, reduce
from .pipeline import PipelineConfig, detect_sequence
from .resonance import ResonanceCloud, ResonanceConfig, resonate
from .graph import build_graph, count_statistic
from .sharpen import DensityCurve, cloud_histogram
from .transport import cost_matrix, emd

MASK64 = (1 << 64) - 1

# (mu1, sigma1, mu2, sigma2) for the four segments of the mean/variance-shift scenarios
SHIFT_SEGMENTS = (
    (1.0, 1.0, 1.0, 1.0),
    (1.0, 1.0, -1.0, 1.0),
    (-1.0, 2.0, -1.0, 2.0),
    (0.0, 1.0, 0.0, 1.0),
)


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def derive_seed(seed: int, index: int) -> int:
    """Seed for replication ``index``: ``seed XOR splitmix64(index)``."""
    return (int(seed) ^ splitmix64(int(index))) & MASK64


@dataclass(frozen=True)
class ScenarioSpec:
    n: int
    d: int
    taus: tuple[int, ...]
    segments: tuple[tuple[float, float, float, float], ...]
    seed: int = 0

    def __post_init__(self):
        taus = tuple(int(t) for t in self.taus)
        object.__setattr__(self, "taus", taus)
        object.__setattr__(self, "segments", tuple(tuple(map(float, s)) for s in self.segments))
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.d < 2 or self.d % 2:
            raise ValueError(f"d must be a positive even number, got {self.d}")
        if any(b <= a for a, b in zip(taus, taus[1:])):
            raise ValueError(f"change points must be strictly increasing, got {taus}")
        if taus and (taus[0] < 1 or taus[-1] >= self.n):
            raise ValueError(f"change points must lie in [1, n - 1], got {taus}")
        if len(self.segments) != len(taus) + 1:
            raise ValueError("need exactly one segment more than change points")
        for seg in self.segments:
            if len(seg) != 4 or seg[1] <= 0 or seg[3] <= 0:
                raise ValueError(f"segment must be (mu1, sigma1, mu2, sigma2) with sigmas > 0: {seg}")


def scenario1(seed: int = 0) -> ScenarioSpec:
    return ScenarioSpec(100, 200, (20, 40, 75), SHIFT_SEGMENTS, seed)


def scenario2(seed: int = 0) -> ScenarioSpec:
    return ScenarioSpec(200, 400, (40, 80, 150), SHIFT_SEGMENTS, seed)


SCENARIOS = {"scenario1": (scenario1, 90), "scenario2": (scenario2, 180)}


def generate_scenario(spec: ScenarioSpec) -> MatrixSequence:
    """Draw ``n`` vectors; time ``i`` in segment ``l`` has first-half entries
    ``N(mu1, sigma1^2)`` and second-half entries ``N(mu2, sigma2^2)``."""
    rng = np.random.default_rng(spec.seed)
    half = spec.d // 2
    bounds = (0, *spec.taus, spec.n)
    out = np.empty((spec.n, spec.d))
    for (lo, hi), (m1, s1, m2, s2) in zip(zip(bounds, bounds[1:]), spec.segments):
        out[lo:hi, :half] = rng.normal(m1, s1, size=(hi - lo, half))
        out[lo:hi, half:] = rng.normal(m2, s2, size=(hi - lo, spec.d - half))
    return MatrixSequence(out[:, None, :])


def hausdorff(a: Iterable[int], b: Iterable[int]) -> float:
    """Symmetric Hausdorff distance between two finite integer sets.

    Returns ``math.inf`` when either set is empty.
    """
    a = np.unique(np.fromiter(a, dtype=np.int64))
    b = np.unique(np.fromiter(b, dtype=np.int64))
    if a.size == 0 or b.size == 0:
        return math.inf
    gap = np.abs(a[:, None] - b[None, :])
    return float(max(gap.min(axis=1).max(), gap.min(axis=0).max()))


@dataclass
class RepResult:
    seed: int
    estimates: tuple[int, ...]
    hausdorff: float

    @property
    def count(self) -> int:
        return len(self.estimates)


@dataclass
class BenchResult:
    per_rep: list[RepResult]
    wall_clock: float = 0.0

    @property
    def reps(self) -> int:
        return len(self.per_rep)

    @property
    def excluded(self) -> int:
        """Replications with no detection (infinite Hausdorff distance)."""
        return sum(math.isinf(r.hausdorff) for r in self.per_rep)

    @property
    def ah(self) -> float:
        finite = [r.hausdorff for r in self.per_rep if math.isfinite(r.hausdorff)]
        return float(np.mean(finite)) if finite else math.inf

    @property
    def an(self) -> float:
        return float(np.mean([r.count for r in self.per_rep]))

    def to_dict(self) -> dict:
        return {
            "reps": self.reps,
            "AH": self.ah if math.isfinite(self.ah) else None,
            "AN": self.an,
            "excluded_no_detection": self.excluded,
            "wall_clock_s": self.wall_clock,
            "per_rep": [
                {"seed": r.seed, "estimates": list(r.estimates),
                 "hausdorff": r.hausdorff if math.isfinite(r.hausdorff) else None,
                 "count": r.count}
                for r in self.per_rep
            ],
        }


def run_single(spec: ScenarioSpec, cfg: PipelineConfig) -> RepResult:
    seq = generate_scenario(spec)
    cfg = replace(cfg, resonance=replace(cfg.resonance, seed=spec.seed))
    report = detect_sequence(seq, cfg)
    est = report.estimates.estimates
    return RepResult(spec.seed, est, hausdorff(est, spec.taus))


def run_benchmark(spec: ScenarioSpec, cfg: PipelineConfig | None = None, reps: int = 20,
                  progress=None) -> BenchResult:
    """Repeat generate -> detect ``reps`` times with per-replication derived seeds.

    Replication ``r`` uses ``derive_seed(spec.seed, r)`` both for the data and
    for the resonance draws.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    cfg = cfg or PipelineConfig()
    start = time.perf_counter()
    results = []
    for r in range(reps):
        rep_spec = replace(spec, seed=derive_seed(spec.seed, r))
        try:
            results.append(run_single(rep_spec, cfg))
        except Exception as exc:
            raise RuntimeError(f"replication {r} failed: {exc}") from exc
        if progress is not None:
            progress(r, results[-1])
    return BenchResult(results, time.perf_counter() - start)


def resonance_gain(eta, zeta):
    """Amplitude ratio ``1 / sqrt((1 - eta^2)^2 + (2 eta zeta)^2)`` of a driven damped oscillator."""
    eta = np.asarray(eta, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    if np.any(eta < 0) or np.any((zeta < 0) | (zeta >= 1)):
        raise ValueError("need eta >= 0 and 0 <= zeta < 1")
    denom = np.sqrt((1 - eta ** 2) ** 2 + (2 * eta * zeta) ** 2)
    if np.any(denom == 0):
        raise ValueError("undamped system driven at resonance (eta=1, zeta=0)")
    out = 1.0 / denom
    return float(out) if out.ndim == 0 else out


def fig1_data(zetas: Sequence[float] = (0.1, 0.25, 0.5), step: float = 0.01,
              eta_max: float = 2.0) -> list[tuple[str, float, float]]:
    eta = np.round(np.arange(0, round(eta_max / step) + 1) * step, 12)
    rows = []
    for z in zetas:
        for e, g in zip(eta, resonance_gain(eta, z)):
            rows.append((f"zeta={z:g}", float(e), float(g)))
    return rows


def variance_shift_sequence(n: int = 100, d: int = 200, tau: int = 40, ratio: float = 5.0,
                            seed: int = 0) -> MatrixSequence:
    """``N(0, I_d)`` up to ``tau`` and ``N(0, ratio * I_d)`` afterwards."""
    rng = np.random.default_rng(seed)
    out = rng.standard_normal((n, d))
    out[tau:] *= math.sqrt(ratio)
    return MatrixSequence(out[:, None, :])


FIG3_COMBOS = (("ground", "mst"), ("ground", "shp"), ("emd", "mst"), ("emd", "shp"))


def combo_name(mode: str, kind: str) -> str:
    return f"{'ED' if mode == 'ground' else 'EMD'}+{kind.upper()}"


@dataclass
class Fig3Result:
    clouds: dict[str, ResonanceCloud]
    counts: dict[str, np.ndarray] = field(default_factory=dict)

    def histogram(self, name: str) -> DensityCurve:
        """Candidate frequencies with one bin per cut ``1..n-1``."""
        cloud = self.clouds[name]
        return cloud_histogram(cloud, cloud.n - 1)

    def mode(self, name: str) -> int:
        return int(np.argmax(self.clouds[name].frequencies())) + 1

    def mass_within(self, name: str, lo: int, hi: int) -> float:
        c = self.clouds[name].candidates
        return float(np.mean((c >= lo) & (c <= hi)))


def fig3_experiment(seed: int = 0, d: int = 200, n: int = 100, tau: int = 40,
                    iterations: int = 10_000, binning: BinningConfig | None = None,
                    ground: str = "euclidean", resonance: ResonanceConfig | None = None,
                    threads: int = 1) -> Fig3Result:
    """Resonance clouds for {ED, EMD} x {MST, SHP} on one variance-shift sequence."""
    seq = variance_shift_sequence(n, d, tau, seed=seed)
    feats = reduce(seq, binning or BinningConfig())
    res_cfg = resonance or ResonanceConfig()
    res_cfg = replace(res_cfg, iterations=iterations, seed=seed)
    clouds, counts = {}, {}
    for mode in ("ground", "emd"):
        cm = cost_matrix(feats, ground, mode, threads=threads)
        for kind in ("mst", "shp"):
            stat = count_statistic(build_graph(cm, kind), n)
            name = combo_name(mode, kind)
            counts[name] = stat.values
            clouds[name] = resonate(stat, res_cfg, threads=threads)
    return Fig3Result(clouds, counts)


def fig2_experiment(seed: int = 0, reps: int = 200, draws: int = 1000, p: int = 40,
                    value_range: tuple[float, float] = (-10.0, 10.0),
                    sds: tuple[float, float, float] = (0.5, 0.2, 1.5),
                    ground: str = "euclidean") -> list[tuple[float, float]]:
    """``(delta_ed, delta_emd)`` per repetition for three zero-mean normals x, y, z.

    ``delta = dist(x, z) - dist(x, y)`` with features {mean, sd} over ``p``
    bins of ``value_range``; ``delta_ed`` uses the ground metric on the
    flattened feature matrices, ``delta_emd`` the transport cost.
    """
    cfg = BinningConfig(p=p, range=value_range, features=("mean", "sd"))
    out = []
    for r in range(reps):
        rng = np.random.default_rng(derive_seed(seed, r))
        samples = np.stack([rng.normal(0.0, s, draws) for s in sds])
        hx, hy, hz = reduce(MatrixSequence(samples[:, None, :]), cfg)
        ed = cost_matrix([hx, hy, hz], ground, "ground").values
        delta_ed = ed[0, 2] - ed[0, 1]
        delta_emd = emd(hx, hz, ground).cost - emd(hx, hy, ground).cost
        out.append((float(delta_ed), float(delta_emd)))
    return out


def write_long_csv(path, rows: Iterable[tuple], header=("series", "x", "y")) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])
