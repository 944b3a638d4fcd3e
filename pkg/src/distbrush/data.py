"""Dataset/projection ingestion, validation, and exact kNN index construction.

File formats:
  * dataset CSV: header row, numeric feature columns, optional integer
    ``label`` column;
  * dataset JSON: ``{"values": [[...], ...], "labels": [...]?}``;
  * projection CSV: header ``x,y``, row-aligned with its dataset.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionError, ParameterError, ParseError, ValidationError


@dataclass(frozen=True)
class Dataset:
    """n x M matrix of finite reals plus optional ground-truth labels."""

    values: np.ndarray
    labels: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValidationError(f"dataset values must be 2D, got shape {values.shape}")
        if values.shape[0] < 2:
            raise ValidationError(f"dataset needs at least 2 rows, got {values.shape[0]}")
        if values.shape[1] < 1:
            raise ValidationError("dataset needs at least 1 column")
        if not np.all(np.isfinite(values)):
            raise ValidationError("dataset contains NaN or Inf entries")
        object.__setattr__(self, "values", values)
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=np.int64)
            if labels.shape != (values.shape[0],):
                raise ValidationError(
                    f"labels length {labels.shape} does not match {values.shape[0]} rows"
                )
            object.__setattr__(self, "labels", labels)


@dataclass(frozen=True)
class Projection:
    """n x 2 layout bound to a Dataset by shared row index."""

    positions: np.ndarray

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    def __post_init__(self):
        positions = np.asarray(self.positions, dtype=np.float64)
        if positions.ndim != 2 or positions.shape[1] != 2:
            raise ValidationError(f"projection must be n x 2, got shape {positions.shape}")
        if not np.all(np.isfinite(positions)):
            raise ValidationError("projection contains NaN or Inf entries")
        object.__setattr__(self, "positions", positions)


@dataclass(frozen=True)
class KnnIndex:
    """Exact k-nearest-neighbor table.

    Row i lists the k neighbors of point i sorted by ascending Euclidean
    distance in the original space, ties broken by ascending index, i itself
    excluded.
    """

    k: int
    neighbors: np.ndarray


def _parse_float(token: str, row: int, col: int) -> float:
    try:
        value = float(token)
    except ValueError as exc:
        raise ParseError(f"row {row}, column {col}: {token!r} is not a number") from exc
    if not math.isfinite(value):
        raise ValidationError(f"row {row}, column {col}: non-finite value {token!r}")
    return value


def load_dataset(path: str | Path, format: str | None = None) -> Dataset:
    """Load a Dataset from CSV or JSON; format inferred from suffix if omitted."""
    path = Path(path)
    fmt = format or ("json" if path.suffix.lower() == ".json" else "csv")
    if fmt == "csv":
        return _load_dataset_csv(path)
    if fmt == "json":
        return _load_dataset_json(path)
    raise ParameterError(f"unknown dataset format {fmt!r}")


def _load_dataset_csv(path: Path) -> Dataset:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise ParseError(f"{path}: expected a header row and at least 2 data rows")
    header = [h.strip() for h in rows[0]]
    width = len(header)
    label_col = header.index("label") if "label" in header else None
    values: list[list[float]] = []
    labels: list[int] = []
    for r, row in enumerate(rows[1:], start=1):
        if not row or all(cell.strip() == "" for cell in row):
            continue
        if len(row) != width:
            raise DimensionError(f"{path}: row {r} has {len(row)} cells, expected {width}")
        feats = []
        for c, cell in enumerate(row):
            if c == label_col:
                try:
                    labels.append(int(cell))
                except ValueError as exc:
                    raise ParseError(f"{path}: row {r}: bad label {cell!r}") from exc
            else:
                feats.append(_parse_float(cell.strip(), r, c))
        values.append(feats)
    return Dataset(
        values=np.asarray(values, dtype=np.float64),
        labels=np.asarray(labels, dtype=np.int64) if label_col is not None else None,
    )


def _load_dataset_json(path: Path) -> Dataset:
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(payload, dict) or "values" not in payload:
        raise ParseError(f"{path}: expected an object with a 'values' key")
    rows = payload["values"]
    widths = {len(r) for r in rows}
    if len(widths) > 1:
        raise DimensionError(f"{path}: ragged rows, widths {sorted(widths)}")
    values = np.asarray(rows, dtype=np.float64)
    labels = payload.get("labels")
    return Dataset(
        values=values,
        labels=np.asarray(labels, dtype=np.int64) if labels is not None else None,
    )


def load_projection(path: str | Path) -> Projection:
    """Load an n x 2 projection from a CSV with header ``x,y``."""
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError(f"{path}: empty projection file")
    positions = []
    for r, row in enumerate(rows[1:], start=1):
        if not row or all(cell.strip() == "" for cell in row):
            continue
        if len(row) != 2:
            raise DimensionError(f"{path}: row {r} has {len(row)} cells, expected 2")
        positions.append([_parse_float(row[0].strip(), r, 0), _parse_float(row[1].strip(), r, 1)])
    return Projection(positions=np.asarray(positions, dtype=np.float64))


def save_dataset_csv(dataset: Dataset, path: str | Path) -> None:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = [f"f{j}" for j in range(dataset.dim)]
        if dataset.labels is not None:
            header.append("label")
        writer.writerow(header)
        for i in range(dataset.n):
            row = [repr(float(v)) for v in dataset.values[i]]
            if dataset.labels is not None:
                row.append(str(int(dataset.labels[i])))
            writer.writerow(row)


def save_projection_csv(projection: Projection, path: str | Path) -> None:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y"])
        for x, y in projection.positions:
            writer.writerow([repr(float(x)), repr(float(y))])


def squared_distances(values: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances from the given rows to every point.

    Accumulates per dimension so the floating-point result is independent of
    numpy's reduction strategy (keeps replay portable across implementations).
    """
    out = np.zeros((len(rows), values.shape[0]), dtype=np.float64)
    for m in range(values.shape[1]):
        diff = values[rows, m][:, None] - values[None, :, m]
        out += diff * diff
    return out


def build_knn(dataset: Dataset, k: int) -> KnnIndex:
    """Exact kNN by chunked brute force; deterministic for tied distances."""
    n = dataset.n
    if not 1 <= k <= n - 1:
        raise ParameterError(f"k must be in [1, {n - 1}], got {k}")
    values = dataset.values
    neighbors = np.empty((n, k), dtype=np.int64)
    chunk = max(1, min(n, 2_000_000 // max(n, 1)))
    for start in range(0, n, chunk):
        rows = np.arange(start, min(start + chunk, n))
        d2 = squared_distances(values, rows)
        d2[np.arange(len(rows)), rows] = np.inf
        # stable sort: equal distances keep ascending-index order
        order = np.argsort(d2, axis=1, kind="stable")
        neighbors[rows] = order[:, :k]
    return KnnIndex(k=k, neighbors=neighbors)
