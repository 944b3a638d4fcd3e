"""Painter coverage and single-cluster seed selection.

Seeds are chosen so the initial brush cannot mix points from distinct
clusters: the densest covered point anchors the set and only covered points
sufficiently similar to it are kept.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .closeness import ClosenessParams
from .errors import EmptyCoverError, ParameterError
from .snn import SnnModel


@dataclass(frozen=True)
class Painter:
    """Disc-shaped selector in layout units."""

    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ParameterError(f"painter radius must be positive, got {self.radius}")


def covered_points(live_positions: np.ndarray, painter: Painter) -> np.ndarray:
    """Indices of points within the painter disc, ascending."""
    dx = live_positions[:, 0] - painter.center[0]
    dy = live_positions[:, 1] - painter.center[1]
    d2 = dx * dx + dy * dy
    return np.flatnonzero(d2 <= painter.radius * painter.radius)


def densest_point(model: SnnModel, candidates: np.ndarray) -> int:
    """Candidate with maximum density; ties go to the lowest index."""
    cand = np.sort(np.asarray(candidates, dtype=np.int64))
    dens = model.density[cand]
    return int(cand[int(np.argmax(dens))])  # argmax returns first max: lowest index wins


def select_seeds(model: SnnModel, params: ClosenessParams, covered) -> np.ndarray:
    """Subset of the covered points forming a single cluster around its densest point."""
    cand = np.asarray(list(covered) if not isinstance(covered, np.ndarray) else covered,
                      dtype=np.int64)
    if cand.size == 0:
        raise EmptyCoverError("painter covers no points")
    cand = np.sort(cand)
    center = densest_point(model, cand)
    cols, vals = model.normalized_row(center)
    qualifying = set(cols[vals > params.theta_in].tolist())
    seeds = [int(i) for i in cand if int(i) in qualifying or int(i) == center]
    return np.asarray(sorted(seeds), dtype=np.int64)
