"""Headless command-line surface.

Subcommands: ``precompute`` (kNN + similarity cache), ``replay`` (scripted
session -> labels/snapshot/scores), ``distort`` (position-randomization
noise), ``metrics`` (score a labeling), ``fixture`` (synthetic test data).
Exit codes: 0 success, 2 usage/validation error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import fields, replace
from pathlib import Path

import numpy as np
from scipy import sparse

from . import __version__
from .closeness import ClosenessParams
from .config import RunConfig, load_config
from .data import (
    Dataset,
    Projection,
    build_knn,
    load_dataset,
    load_projection,
    save_dataset_csv,
    save_projection_csv,
)
from .engine import (
    event_from_json,
    handle_event,
    export_labels,
    new_session,
    snapshot,
    heatmap_order,
)
from .errors import (
    DistbrushError,
    ParameterError,
    ParseError,
    TrajectoryError,
    ValidationError,
    DimensionError,
    AlignmentError,
)
from .fixtures import FixtureSpec, generate
from .metrics import (
    AMI_AVERAGE_METHOD,
    clustering_scores,
    distort_projection,
    silhouette,
    trust_continuity,
)
from .snn import SnnModel, build_snn_model, max_raw_score

_USAGE_ERRORS = (
    ParameterError,
    ParseError,
    ValidationError,
    DimensionError,
    AlignmentError,
    TrajectoryError,
    FileNotFoundError,
)


def _file_hash(path: str | Path) -> str:
    digest = hashlib.sha256(Path(path).read_bytes()).hexdigest()
    return digest[:16]


def _write_json_atomic(path: Path, payload) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")
    tmp.replace(path)


def _cache_path(config: RunConfig) -> Path:
    stem = f"{_file_hash(config.dataset)}_k{config.k}"
    return Path(config.output_dir) / "cache" / f"{stem}.npz"


def _build_model(dataset: Dataset, k: int) -> SnnModel:
    return build_snn_model(build_knn(dataset, k))


def _load_or_build_model(config: RunConfig, dataset: Dataset) -> SnnModel:
    cache = _cache_path(config)
    if cache.exists():
        payload = np.load(cache)
        sim = sparse.csr_matrix(
            (payload["sim_data"], payload["sim_indices"], payload["sim_indptr"]),
            shape=(dataset.n, dataset.n),
        )
        return SnnModel(
            k=int(payload["k"]),
            sim=sim,
            sim_max=max_raw_score(int(payload["k"])),
            density=payload["density"],
            density_norm=payload["density_norm"],
        )
    return _build_model(dataset, config.k)


def _resolve_config(args) -> RunConfig:
    config = load_config(args.config) if args.config else RunConfig()
    overrides = {}
    for attr in (
        "dataset", "projection", "k", "theta_in", "theta_out", "margin_fraction",
        "alpha_fraction", "grid_resolution", "bandwidth_factor",
        "pause_threshold_ms", "seed", "output_dir",
    ):
        value = getattr(args, attr, None)
        if value is not None:
            overrides[attr] = value
    config = replace(config, **overrides)
    config.validate()
    return config


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--dataset", help="dataset CSV/JSON path")
    parser.add_argument("--projection", help="projection CSV path")
    parser.add_argument("--k", type=int, help="neighbor count for the similarity model")
    parser.add_argument("--theta-in", dest="theta_in", type=float,
                        help="similarity cutoff in [0,1)")
    parser.add_argument("--theta-out", dest="theta_out", type=float,
                        help="attract threshold in [0,1]")
    parser.add_argument("--margin-fraction", dest="margin_fraction", type=float)
    parser.add_argument("--alpha-fraction", dest="alpha_fraction", type=float)
    parser.add_argument("--grid-resolution", dest="grid_resolution", type=int)
    parser.add_argument("--bandwidth-factor", dest="bandwidth_factor", type=float)
    parser.add_argument("--pause-threshold-ms", dest="pause_threshold_ms", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--output-dir", dest="output_dir")


def cmd_precompute(args) -> int:
    config = _resolve_config(args)
    if not config.dataset:
        raise ParameterError("precompute requires --dataset (or a config with one)")
    dataset = load_dataset(config.dataset)
    cache = _cache_path(config)
    if cache.exists():
        print(f"cache hit: {cache}")
        return 0
    model = _build_model(dataset, config.k)
    cache.parent.mkdir(parents=True, exist_ok=True)
    tmp = cache.with_suffix(".npz.tmp")
    with open(tmp, "wb") as fh:
        np.savez_compressed(
            fh,
            k=model.k,
            sim_data=model.sim.data,
            sim_indices=model.sim.indices,
            sim_indptr=model.sim.indptr,
            density=model.density,
            density_norm=model.density_norm,
        )
    tmp.replace(cache)
    print(f"cache written: {cache}")
    return 0


def cmd_replay(args) -> int:
    config = _resolve_config(args)
    if not config.dataset or not config.projection:
        raise ParameterError("replay requires --dataset and --projection")
    dataset = load_dataset(config.dataset)
    projection = load_projection(config.projection)
    model = _load_or_build_model(config, dataset)

    try:
        with open(args.trajectory) as fh:
            trajectory = json.load(fh)
    except json.JSONDecodeError as exc:
        raise TrajectoryError(f"{args.trajectory}: invalid JSON: {exc}") from exc
    if not isinstance(trajectory, dict) or "events" not in trajectory:
        raise TrajectoryError(f"{args.trajectory}: expected an object with 'events'")

    params = config.closeness_params()
    traj_params = trajectory.get("params", {})
    if "thetaIn" in traj_params or "thetaOut" in traj_params:
        params = ClosenessParams(
            theta_in=traj_params.get("thetaIn", params.theta_in),
            theta_out=traj_params.get("thetaOut", params.theta_out),
        )

    state = new_session(dataset, projection, model, params, config.engine_config())
    if "painterRadius" in traj_params:
        radius = float(traj_params["painterRadius"])
        if radius <= 0:
            raise TrajectoryError("painterRadius must be positive")
        state.painter = type(state.painter)(center=state.painter.center, radius=radius)

    for i, raw_event in enumerate(trajectory["events"]):
        event = event_from_json(raw_event)
        try:
            handle_event(state, event)
        except DistbrushError as exc:
            raise TrajectoryError(f"event {i} ({raw_event.get('type')}): {exc}") from exc

    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    labels = export_labels(state)
    _write_json_atomic(out_dir / "labels.json", {"labels": labels.tolist()})
    snap = snapshot(state)
    snap["heatmapOrder"] = heatmap_order(state).tolist()
    _write_json_atomic(out_dir / "snapshot.json", snap)

    if dataset.labels is not None:
        if np.any(labels != -1):
            scores = clustering_scores(labels, dataset.labels)
            payload = {
                "ami": scores.ami,
                "arand": scores.arand,
                "vmeasure": scores.vmeasure,
                "unassignedFraction": scores.unassigned_fraction,
            }
        else:
            payload = {
                "ami": None,
                "arand": None,
                "vmeasure": None,
                "unassignedFraction": 1.0,
            }
        payload["amiAverageMethod"] = AMI_AVERAGE_METHOD
        _write_json_atomic(out_dir / "scores.json", payload)

    config_record = config.to_json_dict()
    config_record.pop("outputDir")  # run-specific, not part of the reproducible input
    manifest = {
        "version": __version__,
        "config": config_record,
        "inputs": {
            "dataset": _file_hash(config.dataset),
            "projection": _file_hash(config.projection),
            "trajectory": _file_hash(args.trajectory),
        },
    }
    _write_json_atomic(out_dir / "manifest.json", manifest)
    print(f"replay complete: {out_dir}")
    return 0


def cmd_distort(args) -> int:
    config = _resolve_config(args)
    if not config.projection:
        raise ParameterError("distort requires --projection")
    projection = load_projection(config.projection)
    distorted = distort_projection(projection.positions, args.proportion, config.seed)
    out_path = Path(args.output) if args.output else Path(config.output_dir) / "distorted.csv"
    out_path.parent.mkdir(parents=True, exist_ok=True)
    save_projection_csv(Projection(positions=distorted), out_path)
    print(f"distorted projection written: {out_path}")
    return 0


def cmd_metrics(args) -> int:
    config = _resolve_config(args)
    if not config.dataset or not config.projection:
        raise ParameterError("metrics requires --dataset and --projection")
    dataset = load_dataset(config.dataset)
    projection = load_projection(config.projection)
    with open(args.labels) as fh:
        payload = json.load(fh)
    predicted = np.asarray(payload["labels"], dtype=np.int64)
    if len(predicted) != dataset.n:
        raise ValidationError(
            f"labels length {len(predicted)} does not match dataset rows {dataset.n}"
        )

    quality = trust_continuity(dataset.values, projection.positions, args.k_eval)
    out: dict = {
        "trustworthiness": quality.trustworthiness,
        "continuity": quality.continuity,
        "kEval": quality.k_eval,
        "amiAverageMethod": AMI_AVERAGE_METHOD,
    }
    if dataset.labels is not None:
        scores = clustering_scores(predicted, dataset.labels)
        out.update(
            ami=scores.ami,
            arand=scores.arand,
            vmeasure=scores.vmeasure,
            unassignedFraction=scores.unassigned_fraction,
        )
    assigned = predicted != -1
    if assigned.any() and len(np.unique(predicted[assigned])) >= 2:
        out["silhouetteMd"] = silhouette(dataset.values[assigned], predicted[assigned])
        out["silhouette2d"] = silhouette(projection.positions[assigned], predicted[assigned])
    out_path = Path(args.output) if args.output else Path(config.output_dir) / "metrics.json"
    out_path.parent.mkdir(parents=True, exist_ok=True)
    _write_json_atomic(out_path, out)
    print(f"metrics written: {out_path}")
    return 0


def cmd_fixture(args) -> int:
    spec = FixtureSpec(
        kind=args.kind,
        n_per_cluster=args.n_per_cluster,
        dim=args.dim,
        separation=args.separation,
        seed=args.seed if args.seed is not None else 0,
    )
    dataset, projection, _ = generate(spec)
    out_dir = Path(args.output_dir or "fixture")
    out_dir.mkdir(parents=True, exist_ok=True)
    save_dataset_csv(dataset, out_dir / "dataset.csv")
    save_projection_csv(projection, out_dir / "projection.csv")
    print(f"fixture written: {out_dir / 'dataset.csv'}, {out_dir / 'projection.csv'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="distbrush",
        description="Distortion-aware brushing: precompute, replay, distort, metrics.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("precompute", help="build and cache the similarity model")
    _add_config_flags(p)
    p.set_defaults(func=cmd_precompute)

    p = sub.add_parser("replay", help="replay a scripted event trajectory")
    _add_config_flags(p)
    p.add_argument("--trajectory", required=True, help="trajectory JSON path")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("distort", help="randomize a proportion of projection positions")
    _add_config_flags(p)
    p.add_argument("--proportion", type=float, required=True)
    p.add_argument("--output", help="output CSV path")
    p.set_defaults(func=cmd_distort)

    p = sub.add_parser("metrics", help="score a labeling against ground truth")
    _add_config_flags(p)
    p.add_argument("--labels", required=True, help="labels JSON path")
    p.add_argument("--k-eval", dest="k_eval", type=int, default=20)
    p.add_argument("--output", help="output JSON path")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("fixture", help="generate a synthetic dataset + projection")
    p.add_argument("--kind", required=True,
                   choices=["twoBlobs", "threeBlobs", "hypersphereShells", "gridLattice"])
    p.add_argument("--n-per-cluster", dest="n_per_cluster", type=int, default=100)
    p.add_argument("--dim", type=int, default=10)
    p.add_argument("--separation", type=float, default=10.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output-dir", dest="output_dir")
    p.set_defaults(func=cmd_fixture)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DistbrushError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
