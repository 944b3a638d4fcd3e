"""Shared-nearest-neighbor similarity and per-point density.

The raw similarity of two points rewards neighbor-list overlap at high
ranks: every shared neighbor appearing at 1-based ranks m and n in the two
lists contributes (k+1-m)*(k+1-n).  Scores are integers, so sums are exact
and portable across implementations.  The maximum attainable raw score
(identical lists) is k(k+1)(2k+1)/6, used to normalize scores onto [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .data import KnnIndex
from .errors import ParameterError


def max_raw_score(k: int) -> int:
    """Raw score of two identical neighbor lists: sum of squares 1..k."""
    return k * (k + 1) * (2 * k + 1) // 6


@dataclass(frozen=True)
class SnnModel:
    """Sparse symmetric similarity matrix with per-point density.

    ``sim`` stores raw integer scores; pairs sharing no neighbor are
    implicit zeros.  ``density`` is the integer row sum of ``sim`` and
    ``density_norm`` its min-max normalization (all-equal densities map
    to 1.0).
    """

    k: int
    sim: sparse.csr_matrix
    sim_max: int
    density: np.ndarray
    density_norm: np.ndarray

    @property
    def n(self) -> int:
        return self.sim.shape[0]

    def raw(self, p: int, q: int) -> int:
        return int(self.sim[p, q])

    def normalized_row(self, p: int) -> tuple[np.ndarray, np.ndarray]:
        """Indices and normalized scores of all points with sim(p, .) > 0."""
        start, end = self.sim.indptr[p], self.sim.indptr[p + 1]
        cols = self.sim.indices[start:end]
        vals = self.sim.data[start:end] / self.sim_max
        return cols, vals


def snn_similarity(index: KnnIndex, p: int, q: int) -> int:
    """Raw shared-neighbor score between two distinct points."""
    n = index.neighbors.shape[0]
    if not (0 <= p < n and 0 <= q < n):
        raise IndexError(f"point index out of range: p={p}, q={q}, n={n}")
    if p == q:
        raise ParameterError("similarity of a point with itself is undefined")
    k = index.k
    rank_q = {int(x): r for r, x in enumerate(index.neighbors[q], start=1)}
    total = 0
    for m, x in enumerate(index.neighbors[p], start=1):
        r = rank_q.get(int(x))
        if r is not None:
            total += (k + 1 - m) * (k + 1 - r)
    return total


def build_snn_model(index: KnnIndex) -> SnnModel:
    """Build the full sparse similarity matrix and densities.

    Accumulates contributions through an inverted neighbor table: every
    point x shared by the lists of p and q contributes one (rank, rank)
    term to sim(p, q).  Work is O(sum over x of |owners(x)|^2), about
    n*k^2 for typical neighbor structure.
    """
    neighbors = index.neighbors
    n, k = neighbors.shape
    owner = np.repeat(np.arange(n, dtype=np.int64), k)
    owner_w = np.tile(np.arange(k, 0, -1, dtype=np.int64), n)  # rank m carries k+1-m
    flat = neighbors.ravel()
    order = np.argsort(flat, kind="stable")
    flat_sorted = flat[order]
    owner_sorted = owner[order]
    weight_sorted = owner_w[order]
    boundaries = np.flatnonzero(np.diff(flat_sorted)) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [len(flat_sorted)]))

    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    vals: list[np.ndarray] = []
    for s, e in zip(starts, ends):
        if e - s < 2:
            continue
        pts = owner_sorted[s:e]
        wts = weight_sorted[s:e]
        iu, ju = np.triu_indices(len(pts), 1)
        pi, pj = pts[iu], pts[ju]
        rows.append(np.minimum(pi, pj))
        cols.append(np.maximum(pi, pj))
        vals.append(wts[iu] * wts[ju])

    if rows:
        upper = sparse.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(n, n),
            dtype=np.int64,
        ).tocsr()
        upper.sum_duplicates()
        sim = (upper + upper.T).tocsr()
    else:
        sim = sparse.csr_matrix((n, n), dtype=np.int64)

    density = np.asarray(sim.sum(axis=1)).ravel().astype(np.int64)
    lo, hi = density.min(), density.max()
    if hi == lo:
        density_norm = np.ones(n, dtype=np.float64)
    else:
        density_norm = (density - lo) / float(hi - lo)
    return SnnModel(
        k=k,
        sim=sim,
        sim_max=max_raw_score(k),
        density=density,
        density_norm=density_norm,
    )


def normalized_sim(model: SnnModel, p: int, q: int) -> float:
    """sim(p, q) scaled by the maximum attainable raw score."""
    if p == q:
        raise ParameterError("similarity of a point with itself is undefined")
    return model.raw(p, q) / model.sim_max
