from __future__ import annotations

import numpy as np
import pytest
from scipy import sparse

from distbrush.data import Dataset, Projection, build_knn
from distbrush.fixtures import FixtureSpec, generate
from distbrush.snn import SnnModel, build_snn_model


@pytest.fixture(scope="session")
def two_blob():
    """Well-separated 10D two-blob fixture with its orthogonal projection."""
    dataset, projection, labels = generate(
        FixtureSpec(kind="twoBlobs", n_per_cluster=60, dim=10, separation=10.0, seed=7)
    )
    return dataset, projection, labels


@pytest.fixture(scope="session")
def two_blob_model(two_blob):
    dataset, _, _ = two_blob
    return build_snn_model(build_knn(dataset, 10))


def model_from_raw(n: int, entries: dict[tuple[int, int], int], sim_max: int, k: int = 3):
    """Hand-built similarity model for formula-level unit tests."""
    rows, cols, vals = [], [], []
    for (p, q), v in entries.items():
        rows += [p, q]
        cols += [q, p]
        vals += [v, v]
    sim = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n), dtype=np.int64)
    density = np.asarray(sim.sum(axis=1)).ravel().astype(np.int64)
    lo, hi = density.min(), density.max()
    norm = np.ones(n) if hi == lo else (density - lo) / float(hi - lo)
    return SnnModel(k=k, sim=sim, sim_max=sim_max, density=density, density_norm=norm)
