"""Projection-quality and clustering-accuracy metrics plus a synthetic
position-randomization distortion generator.

Trustworthiness penalizes 2D neighbors that are not close in the original
space (false neighbors); continuity penalizes original-space neighbors
missing from the 2D neighborhood (missing neighbors).  Both use the
rank-based formulation with the 2 / (n*k*(2n - 3k - 1)) normalizer, valid
for k < n / 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.metrics import (
    adjusted_mutual_info_score,
    adjusted_rand_score,
    v_measure_score,
)

from .data import squared_distances
from .errors import ParameterError, ValidationError

AMI_AVERAGE_METHOD = "max"


@dataclass(frozen=True)
class QualityScores:
    trustworthiness: float
    continuity: float
    k_eval: int


@dataclass(frozen=True)
class ClusteringScores:
    ami: float
    arand: float
    vmeasure: float
    unassigned_fraction: float


def _neighbor_ranks(values: np.ndarray, chunk_rows: np.ndarray) -> np.ndarray:
    """1-based rank of every other point by ascending distance (stable ties)."""
    d2 = squared_distances(values, chunk_rows)
    d2[np.arange(len(chunk_rows)), chunk_rows] = np.inf
    order = np.argsort(d2, axis=1, kind="stable")
    ranks = np.empty_like(order)
    cols = np.arange(values.shape[0], dtype=np.int64)
    for r in range(len(chunk_rows)):
        ranks[r, order[r]] = cols
    return ranks  # self gets the largest rank; callers never look it up


def trust_continuity(values: np.ndarray, positions: np.ndarray, k_eval: int) -> QualityScores:
    """Rank-penalty trustworthiness and continuity of a 2D layout."""
    values = np.asarray(values, dtype=np.float64)
    positions = np.asarray(positions, dtype=np.float64)
    n = values.shape[0]
    if positions.shape[0] != n:
        raise ValidationError("positions and values must have the same row count")
    if not 1 <= k_eval <= n - 1:
        raise ParameterError(f"k_eval must be in [1, {n - 1}], got {k_eval}")
    if k_eval >= n / 2:
        raise ParameterError(f"rank normalizer requires k_eval < n/2, got {k_eval} for n={n}")

    k = k_eval
    trust_penalty = 0
    cont_penalty = 0
    chunk = max(1, min(n, 2_000_000 // max(n, 1)))
    for start in range(0, n, chunk):
        rows = np.arange(start, min(start + chunk, n))
        hd_ranks = _neighbor_ranks(values, rows)
        ld_ranks = _neighbor_ranks(positions, rows)
        hd_top = hd_ranks < k  # 0-based rank below k <=> within k nearest
        ld_top = ld_ranks < k
        false_neighbors = ld_top & ~hd_top
        missing_neighbors = hd_top & ~ld_top
        # penalties use 1-based ranks: excess = rank1 - k = (rank0 + 1) - k
        trust_penalty += int(np.sum((hd_ranks[false_neighbors] + 1) - k))
        cont_penalty += int(np.sum((ld_ranks[missing_neighbors] + 1) - k))

    norm = 2.0 / (n * k * (2.0 * n - 3.0 * k - 1.0))
    return QualityScores(
        trustworthiness=1.0 - norm * trust_penalty,
        continuity=1.0 - norm * cont_penalty,
        k_eval=k,
    )


def clustering_scores(predicted: np.ndarray, truth: np.ndarray) -> ClusteringScores:
    """AMI (max-normalized), adjusted Rand, and V-measure over labeled points.

    Points with predicted == -1 are treated as unlabeled: they are excluded
    from the scores and reported as a fraction instead.
    """
    predicted = np.asarray(predicted, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    if predicted.shape != truth.shape:
        raise ValidationError("predicted and truth must have the same length")
    if len(np.unique(truth)) < 2:
        raise ValidationError("truth labels must contain at least 2 classes")
    mask = predicted != -1
    if not mask.any():
        raise ValidationError("all points are unassigned")
    p = predicted[mask]
    t = truth[mask]
    return ClusteringScores(
        ami=float(adjusted_mutual_info_score(t, p, average_method=AMI_AVERAGE_METHOD)),
        arand=float(adjusted_rand_score(t, p)),
        vmeasure=float(v_measure_score(t, p)),
        unassigned_fraction=float(1.0 - mask.mean()),
    )


def silhouette(points: np.ndarray, labels: np.ndarray) -> float:
    """Mean silhouette coefficient; singleton clusters score 0 by convention."""
    points = np.asarray(points, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if len(points) != len(labels):
        raise ValidationError("points and labels must have the same length")
    classes = np.unique(labels)
    if len(classes) < 2:
        raise ValidationError("need at least 2 classes for a silhouette")
    n = len(points)
    d = np.sqrt(squared_distances(points, np.arange(n)))
    scores = np.zeros(n, dtype=np.float64)
    masks = {c: labels == c for c in classes}
    sizes = {c: int(masks[c].sum()) for c in classes}
    for i in range(n):
        own = labels[i]
        if sizes[own] <= 1:
            continue  # convention: silhouette 0
        a = d[i][masks[own]].sum() / (sizes[own] - 1)
        b = min(
            d[i][masks[c]].mean() for c in classes if c != own
        )
        top = max(a, b)
        if top > 0:
            scores[i] = (b - a) / top
    return float(scores.mean())


def distort_projection(
    positions: np.ndarray, proportion: float, rng_seed: int
) -> np.ndarray:
    """Unit-square-normalized copy with a proportion of rows resampled from
    an isotropic Gaussian (sigma 0.166 per axis) centered on the square."""
    if not 0.0 <= proportion <= 1.0:
        raise ParameterError(f"proportion must be in [0, 1], got {proportion}")
    positions = np.asarray(positions, dtype=np.float64)
    n = len(positions)
    out = positions.copy()
    for axis in range(2):
        lo = out[:, axis].min()
        hi = out[:, axis].max()
        if hi > lo:
            out[:, axis] = (out[:, axis] - lo) / (hi - lo)
        else:
            out[:, axis] = 0.5
    count = int(np.ceil(proportion * n))
    if count == 0:
        return out
    rng = np.random.default_rng(rng_seed)
    chosen = rng.choice(n, size=count, replace=False)
    out[chosen] = rng.normal(loc=0.5, scale=0.166, size=(count, 2))
    return out
