"""Cluster-membership closeness and the derived point classes.

For a candidate cluster C, a point's closeness is the ratio of its average
similarity to the sufficiently-similar part of C over its average similarity
to everything it shares any neighbor with, clamped to [0, 1].  Averages are
computed from exact integer score sums divided once, so results are
bit-reproducible across implementations.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ParameterError
from .snn import SnnModel


class PointClass(str, Enum):
    MEMBER = "member"
    TRUE_NEIGHBOR = "true_neighbor"
    UNCERTAIN = "uncertain"
    NON_NEIGHBOR = "non_neighbor"


@dataclass(frozen=True)
class ClosenessParams:
    """theta_in: similarity cutoff in [0,1); theta_out: attract threshold in [0,1]."""

    theta_in: float = 0.35
    theta_out: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.theta_in < 1.0:
            raise ParameterError(f"theta_in must be in [0, 1), got {self.theta_in}")
        if not 0.0 <= self.theta_out <= 1.0:
            raise ParameterError(f"theta_out must be in [0, 1], got {self.theta_out}")


@dataclass(frozen=True)
class ClosenessResult:
    """Per-point closeness in [0,1] plus the class partition it implies.

    Non-members: value 1 is a true neighbor, 0 a non-neighbor, anything
    in between uncertain.  Members of C carry value 1 and class MEMBER.
    """

    values: np.ndarray
    classes: list[PointClass]
    member_mask: np.ndarray


def _as_member_mask(n: int, C) -> np.ndarray:
    mask = np.zeros(n, dtype=bool)
    idx = np.fromiter(C, dtype=np.int64) if not isinstance(C, np.ndarray) else C
    if idx.size == 0:
        raise ParameterError("cluster C must be nonempty")
    mask[idx] = True
    return mask


def cluster_cut(model: SnnModel, params: ClosenessParams, p: int, C) -> set[int]:
    """Members of C whose normalized similarity to p strictly exceeds theta_in."""
    mask = _as_member_mask(model.n, C)
    cols, vals = model.normalized_row(p)
    keep = mask[cols] & (vals > params.theta_in)
    return set(int(c) for c in cols[keep])


def avg_similarity(model: SnnModel, params: ClosenessParams, p: int, C) -> float:
    """Mean normalized similarity of p over its theta_in cut of C, 0 if empty."""
    mask = _as_member_mask(model.n, C)
    start, end = model.sim.indptr[p], model.sim.indptr[p + 1]
    cols = model.sim.indices[start:end]
    raw = model.sim.data[start:end]
    keep = mask[cols] & (raw / model.sim_max > params.theta_in)
    count = int(keep.sum())
    if count == 0:
        return 0.0
    return int(raw[keep].sum()) / (count * model.sim_max)


def _baseline_avg(model: SnnModel, p: int) -> float:
    """Average normalized similarity of p over every positively-similar point."""
    start, end = model.sim.indptr[p], model.sim.indptr[p + 1]
    nnz = end - start
    if nnz == 0:
        return 0.0
    return int(model.sim.data[start:end].sum()) / (nnz * model.sim_max)


def closeness(model: SnnModel, params: ClosenessParams, p: int, C) -> float:
    """Degree of membership of p in cluster C, in [0, 1]."""
    mask = _as_member_mask(model.n, C)
    if mask[p]:
        return 1.0  # members by convention
    a_in = avg_similarity(model, params, p, C)
    a_all = _baseline_avg(model, p)
    if a_all == 0.0:
        return 1.0 if a_in > 0.0 else 0.0
    return min(a_in / a_all, 1.0)


def _row_segments(model: SnnModel):
    sim = model.sim
    return sim.indptr, sim.indices, sim.data


def classify(model: SnnModel, params: ClosenessParams, C) -> ClosenessResult:
    """Closeness of every point to C and the implied class partition."""
    n = model.n
    member = _as_member_mask(n, C)
    indptr, indices, data = _row_segments(model)

    in_c = member[indices]
    above = data / model.sim_max > params.theta_in
    keep = in_c & above
    cut_sums = _segment_sum(np.where(keep, data, 0), indptr)
    cut_counts = _segment_sum(keep.astype(np.int64), indptr)
    row_sums = _segment_sum(data, indptr)
    row_nnz = np.diff(indptr)

    a_in = np.zeros(n, dtype=np.float64)
    nz = cut_counts > 0
    a_in[nz] = cut_sums[nz] / (cut_counts[nz] * model.sim_max)
    a_all = np.zeros(n, dtype=np.float64)
    pos = row_nnz > 0
    a_all[pos] = row_sums[pos] / (row_nnz[pos] * model.sim_max)

    ratio = np.zeros(n, dtype=np.float64)
    pos_all = a_all > 0
    ratio[pos_all] = a_in[pos_all] / a_all[pos_all]
    values = np.minimum(ratio, 1.0)
    values[(a_all == 0) & (a_in > 0)] = 1.0
    values[member] = 1.0

    classes: list[PointClass] = []
    for i in range(n):
        if member[i]:
            classes.append(PointClass.MEMBER)
        elif values[i] == 1.0:
            classes.append(PointClass.TRUE_NEIGHBOR)
        elif values[i] == 0.0:
            classes.append(PointClass.NON_NEIGHBOR)
        else:
            classes.append(PointClass.UNCERTAIN)
    return ClosenessResult(values=values, classes=classes, member_mask=member)


def _segment_sum(values: np.ndarray, indptr: np.ndarray) -> np.ndarray:
    """Per-row sums of CSR-laid-out values; empty rows sum to 0."""
    out = np.zeros(len(indptr) - 1, dtype=values.dtype)
    nonempty = indptr[:-1] < indptr[1:]
    if values.size:
        sums = np.add.reduceat(values, indptr[:-1][nonempty])
        out[nonempty] = sums
    return out
