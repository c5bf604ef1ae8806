"""Multi-change-point detection for sequences of high-dimensional matrices.

Frames are reduced to weighted per-bin feature histograms, compared with the
Earth Mover's Distance, linked by a greedy shortest Hamiltonian path, and the
edge-crossing counts are probed with randomly shaped Beta priors.  The
resulting candidate cloud is sharpened and its peaks are the estimates.
"""

__version__ = "0.1.0"

from .ingest import (BinningConfig, HistogramFeatures, MatrixSequence, load_frame_directory,
                     load_vector_sequence, reduce)
from .transport import CostMatrix, TransportPlan, cost_matrix, emd, ground_distance_matrix
from .graph import (CountStatistic, PathGraph, count_statistic, minimum_spanning_tree,
                    shortest_hamiltonian_path)
from .resonance import ResonanceCloud, ResonanceConfig, beta_pdf, resonate, resonate_once
from .sharpen import (ChangePointSet, DensityCurve, SharpenConfig, cloud_histogram,
                      double_sharpen, localize, nadaraya_watson)
from .pipeline import DetectionReport, PipelineConfig, detect_sequence

__all__ = [
    "BinningConfig", "HistogramFeatures", "MatrixSequence", "load_frame_directory",
    "load_vector_sequence", "reduce", "CostMatrix", "TransportPlan", "cost_matrix", "emd",
    "ground_distance_matrix", "CountStatistic", "PathGraph", "count_statistic",
    "minimum_spanning_tree", "shortest_hamiltonian_path", "ResonanceCloud", "ResonanceConfig",
    "beta_pdf", "resonate", "resonate_once", "ChangePointSet", "DensityCurve", "SharpenConfig",
    "cloud_histogram", "double_sharpen", "localize", "nadaraya_watson", "DetectionReport",
    "PipelineConfig", "detect_sequence",
]
