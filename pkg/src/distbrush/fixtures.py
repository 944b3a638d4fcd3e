"""Deterministic synthetic fixtures and brute-force reference implementations.

The oracles here are intentionally naive (nested loops, no shared code with
the production modules); property tests treat them as ground truth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import Dataset, Projection
from .errors import ParameterError, SizeError, ValidationError
from .metrics import silhouette

_ORACLE_MAX_POINTS = 500


@dataclass(frozen=True)
class FixtureSpec:
    kind: str  # twoBlobs | threeBlobs | hypersphereShells | gridLattice
    n_per_cluster: int = 100
    dim: int = 10
    separation: float = 10.0
    seed: int = 0


def generate(spec: FixtureSpec) -> tuple[Dataset, Projection, np.ndarray]:
    """Dataset, orthogonal 2D projection (first two coordinates), and labels.

    Blob and shell fixtures are checked for multidimensional separability
    (silhouette >= 0.5) at generation time.  threeBlobs places its third
    cluster along a later axis so the first two clusters and the third
    overlap in the projection: separation exists only in the full space.
    """
    if spec.n_per_cluster < 2:
        raise ParameterError("n_per_cluster must be >= 2")
    if spec.dim < 2:
        raise ParameterError("dim must be >= 2 for a 2D projection")
    rng = np.random.default_rng(spec.seed)
    sep = spec.separation
    m = spec.dim

    if spec.kind == "twoBlobs":
        centers = [np.zeros(m), _axis_vector(m, 0, sep)]
        values, labels = _blobs(rng, centers, spec.n_per_cluster)
    elif spec.kind == "threeBlobs":
        if m < 3:
            raise ParameterError("threeBlobs needs dim >= 3")
        centers = [np.zeros(m), _axis_vector(m, 0, sep), _axis_vector(m, m - 1, sep)]
        values, labels = _blobs(rng, centers, spec.n_per_cluster)
    elif spec.kind == "hypersphereShells":
        centers = [np.zeros(m), _axis_vector(m, 0, sep)]
        values, labels = _shells(rng, centers, spec.n_per_cluster)
    elif spec.kind == "gridLattice":
        side = int(math.ceil(math.sqrt(spec.n_per_cluster)))
        xs, ys = np.meshgrid(np.arange(side), np.arange(side))
        pts2 = np.column_stack([xs.ravel(), ys.ravel()])[: spec.n_per_cluster]
        values = np.zeros((len(pts2), m))
        values[:, :2] = pts2
        labels = np.zeros(len(pts2), dtype=np.int64)
    else:
        raise ParameterError(f"unknown fixture kind {spec.kind!r}")

    dataset = Dataset(values=values, labels=labels)
    projection = Projection(positions=values[:, :2].copy())
    if spec.kind in ("twoBlobs", "threeBlobs", "hypersphereShells"):
        score = silhouette(values, labels)
        if score < 0.5:
            raise ValidationError(
                f"{spec.kind} fixture is not separable enough (silhouette {score:.3f})"
            )
    return dataset, projection, labels


def _axis_vector(m: int, axis: int, value: float) -> np.ndarray:
    v = np.zeros(m)
    v[axis] = value
    return v


def _blobs(rng, centers, n_per):
    values = []
    labels = []
    for c, center in enumerate(centers):
        values.append(rng.normal(0.0, 1.0, (n_per, len(center))) + center)
        labels.extend([c] * n_per)
    return np.vstack(values), np.asarray(labels, dtype=np.int64)


def _shells(rng, centers, n_per, radius: float = 1.0):
    values = []
    labels = []
    for c, center in enumerate(centers):
        raw = rng.normal(0.0, 1.0, (n_per, len(center)))
        norms = np.linalg.norm(raw, axis=1, keepdims=True)
        values.append(center + radius * raw / norms)
        labels.extend([c] * n_per)
    return np.vstack(values), np.asarray(labels, dtype=np.int64)


# ------------------------------------------------------------------ oracles


def _check_size(n: int) -> None:
    if n > _ORACLE_MAX_POINTS:
        raise SizeError(f"oracle supports n <= {_ORACLE_MAX_POINTS}, got {n}")


def oracle_knn(values: np.ndarray, k: int) -> np.ndarray:
    """Brute-force exact kNN table with index tie-breaking."""
    n = len(values)
    _check_size(n)
    out = np.empty((n, k), dtype=np.int64)
    for i in range(n):
        dists = []
        for j in range(n):
            if j == i:
                continue
            d = 0.0
            for c in range(values.shape[1]):
                d += (values[i, c] - values[j, c]) ** 2
            dists.append((d, j))
        dists.sort()
        out[i] = [j for _, j in dists[:k]]
    return out


def oracle_snn(neighbors: np.ndarray, p: int, q: int) -> int:
    """Direct enumeration of shared-neighbor rank pairs."""
    _check_size(len(neighbors))
    k = neighbors.shape[1]
    total = 0
    for m in range(1, k + 1):
        for nn in range(1, k + 1):
            if neighbors[p, m - 1] == neighbors[q, nn - 1]:
                total += (k + 1 - m) * (k + 1 - nn)
    return total


def oracle_density(neighbors: np.ndarray, p: int) -> int:
    _check_size(len(neighbors))
    total = 0
    for q in range(len(neighbors)):
        if q != p:
            total += oracle_snn(neighbors, p, q)
    return total


def oracle_closeness(neighbors: np.ndarray, theta_in: float, p: int, C) -> float:
    """From-scratch closeness via the definitional route."""
    n = len(neighbors)
    _check_size(n)
    k = neighbors.shape[1]
    sim_max = sum((k - i) ** 2 for i in range(k))
    members = set(int(c) for c in C)

    def norm_sim(a: int, b: int) -> float:
        return oracle_snn(neighbors, a, b) / sim_max

    if p in members:
        return 1.0
    cut = [q for q in sorted(members) if norm_sim(p, q) > theta_in]
    a_in = sum(norm_sim(p, q) for q in cut) / len(cut) if cut else 0.0
    everyone = [q for q in range(n) if q != p and norm_sim(p, q) > 0.0]
    a_all = sum(norm_sim(p, q) for q in everyone) / len(everyone) if everyone else 0.0
    if a_all == 0.0:
        return 1.0 if a_in > 0.0 else 0.0
    return min(a_in / a_all, 1.0)


def oracle_ranks(values: np.ndarray, positions: np.ndarray, k: int) -> tuple[float, float]:
    """Triple-loop trustworthiness and continuity."""
    n = len(values)
    _check_size(n)

    def rank_table(mat: np.ndarray) -> list[dict[int, int]]:
        tables = []
        for i in range(n):
            dists = []
            for j in range(n):
                if j == i:
                    continue
                d = 0.0
                for c in range(mat.shape[1]):
                    d += (mat[i, c] - mat[j, c]) ** 2
                dists.append((d, j))
            dists.sort()
            tables.append({j: r + 1 for r, (_, j) in enumerate(dists)})
        return tables

    hd = rank_table(values)
    ld = rank_table(positions)
    trust_penalty = 0
    cont_penalty = 0
    for i in range(n):
        for j in range(n):
            if j == i:
                continue
            if ld[i][j] <= k and hd[i][j] > k:
                trust_penalty += hd[i][j] - k
            if hd[i][j] <= k and ld[i][j] > k:
                cont_penalty += ld[i][j] - k
    norm = 2.0 / (n * k * (2.0 * n - 3.0 * k - 1.0))
    return 1.0 - norm * trust_penalty, 1.0 - norm * cont_penalty
