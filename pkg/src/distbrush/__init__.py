"""Distortion-aware brushing: engine, metrics, and CLI for correcting
missing/false-neighbor distortions while brushing 2D projections of
multidimensional data."""

__version__ = "0.1.0"

from .closeness import ClosenessParams, ClosenessResult, PointClass, classify, closeness
from .data import Dataset, KnnIndex, Projection, build_knn, load_dataset, load_projection
from .engine import (
    EngineConfig,
    Phase,
    SessionState,
    contextualize,
    export_labels,
    handle_event,
    heatmap_order,
    new_session,
    snapshot,
)
from .lens import Lens, RelocationPlan, build_inner, build_lens, build_plan
from .metrics import clustering_scores, distort_projection, silhouette, trust_continuity
from .seeds import Painter, covered_points, select_seeds
from .snn import SnnModel, build_snn_model, normalized_sim, snn_similarity

__all__ = [
    "ClosenessParams",
    "ClosenessResult",
    "Dataset",
    "EngineConfig",
    "KnnIndex",
    "Lens",
    "Painter",
    "Phase",
    "PointClass",
    "Projection",
    "RelocationPlan",
    "SessionState",
    "SnnModel",
    "__version__",
    "build_inner",
    "build_knn",
    "build_lens",
    "build_plan",
    "build_snn_model",
    "classify",
    "closeness",
    "clustering_scores",
    "contextualize",
    "covered_points",
    "distort_projection",
    "export_labels",
    "handle_event",
    "heatmap_order",
    "load_dataset",
    "load_projection",
    "new_session",
    "normalized_sim",
    "select_seeds",
    "silhouette",
    "snapshot",
    "snn_similarity",
    "trust_continuity",
]
