"""End-to-end detection: reduce -> costs -> graph -> resonance -> sharpen -> localize."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .graph import GRAPH_KINDS, build_graph, count_statistic
from .ingest import BinningConfig, MatrixSequence, reduce
from .resonance import ResonanceCloud, ResonanceConfig, resonate
from .sharpen import (ChangePointSet, DensityCurve, SharpenConfig, cloud_histogram,
                      double_sharpen, localize)
from .transport import COST_MODES, GROUND_METRICS, cost_matrix

SCHEMA_VERSION = 1
MIN_FRAMES = 4
NO_CHANGE_NOTE = "no change points detected"


class StageError(RuntimeError):
    """A pipeline stage failed; ``stage`` names it."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class PipelineConfig:
    binning: BinningConfig = field(default_factory=BinningConfig)
    ground: str = "euclidean"
    metric: str = "emd"
    graph: str = "shp"
    resonance: ResonanceConfig = field(default_factory=ResonanceConfig)
    sharpen: SharpenConfig = field(default_factory=SharpenConfig)
    threads: int = 1

    def __post_init__(self):
        if self.ground not in GROUND_METRICS:
            raise ValueError(f"unknown ground metric {self.ground!r}")
        if self.metric not in COST_MODES:
            raise ValueError(f"unknown cost metric {self.metric!r}")
        if self.graph not in GRAPH_KINDS:
            raise ValueError(f"unknown graph kind {self.graph!r}")

    def to_dict(self) -> dict:
        """Everything that influences the result (``threads`` does not)."""
        d = asdict(self)
        d.pop("threads")
        b = d["binning"]
        b["range"] = b["range"] if isinstance(b["range"], str) else list(b["range"])
        b["features"] = list(b["features"])
        return d

    @classmethod
    def from_dict(cls, d: dict, threads: int = 1) -> "PipelineConfig":
        b = dict(d["binning"])
        b["range"] = b["range"] if isinstance(b["range"], str) else tuple(b["range"])
        b["features"] = tuple(b["features"])
        return cls(BinningConfig(**b), d["ground"], d["metric"], d["graph"],
                   ResonanceConfig(**d["resonance"]), SharpenConfig(**d["sharpen"]), threads)


@dataclass
class DetectionReport:
    n: int
    estimates: ChangePointSet
    cloud: ResonanceCloud | None
    histogram: DensityCurve | None
    curve: DensityCurve | None
    config: PipelineConfig
    timings: dict[str, float] = field(default_factory=dict)
    note: str = ""

    def to_dict(self, timings: bool = True) -> dict:
        out = {
            "schemaVersion": SCHEMA_VERSION,
            "version": __version__,
            "n": self.n,
            "estimates": list(self.estimates.estimates),
            "note": self.note,
            "cloud": ({"frequencies": self.cloud.frequencies().tolist()}
                      if self.cloud is not None else None),
            "histogram": _curve_dict(self.histogram),
            "sharpenedCurve": _curve_dict(self.curve),
            "config": self.config.to_dict(),
        }
        if timings:
            out["timings_ms"] = dict(self.timings)
        return out


def _curve_dict(c):
    if c is None:
        return None
    return {"x": c.x.tolist(), "y": c.y.tolist()}


def detect_sequence(seq: MatrixSequence, cfg: PipelineConfig | None = None) -> DetectionReport:
    """Run the full detection pipeline on an in-memory sequence.

    A sequence whose frames are pairwise indistinguishable (all costs zero)
    carries no ordering information and yields an empty estimate set.
    """
    cfg = cfg or PipelineConfig()
    if seq.n < MIN_FRAMES:
        raise StageError("input", ValueError(f"need at least {MIN_FRAMES} frames, got {seq.n}"))
    timings = {}

    def stage(name, fn, *args, **kw):
        t0 = time.perf_counter()
        try:
            result = fn(*args, **kw)
        except Exception as exc:
            raise StageError(name, exc) from exc
        timings[name] = 1e3 * (time.perf_counter() - t0)
        return result

    feats = stage("reduce", reduce, seq, cfg.binning)
    costs = stage("cost_matrix", cost_matrix, feats, cfg.ground, cfg.metric, cfg.threads)
    if not np.any(costs.values > 0):
        return DetectionReport(seq.n, ChangePointSet(()), None, None, None, cfg, timings,
                               NO_CHANGE_NOTE)
    graph = stage("graph", build_graph, costs, cfg.graph)
    stat = stage("count_statistic", count_statistic, graph, seq.n)
    cloud = stage("resonate", resonate, stat, cfg.resonance, cfg.threads)
    hist = stage("cloud_histogram", cloud_histogram, cloud, cfg.sharpen.nb2)
    curve = stage("double_sharpen", double_sharpen, hist, cfg.sharpen)
    est = stage("localize", localize, curve, cfg.sharpen.threshold, seq.n, cfg.sharpen.relative)
    return DetectionReport(seq.n, est, cloud, hist, curve, cfg, timings,
                           "" if len(est) else NO_CHANGE_NOTE)
