#!/usr/bin/env python3
"""Author the golden replay trajectories used by the acceptance suite.

Runs a greedy scripted agent against seeded fixtures: for each ground-truth
cluster it moves the painter to a dense spot, pauses to trigger the lens,
presses, then sweeps the painter over the relocated points until the cluster
is captured.  Ground truth steers the agent only here, at authoring time;
the frozen event logs replay without it.

Usage: python tools/author_trajectories.py [output_dir]
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

from distbrush.closeness import ClosenessParams
from distbrush.data import Dataset, Projection, build_knn
from distbrush.engine import (
    MoveTo,
    NewBrush,
    PauseElapsed,
    Phase,
    Press,
    Release,
    Wheel,
    event_to_json,
    export_labels,
    handle_event,
    new_session,
)
from distbrush.fixtures import FixtureSpec, generate
from distbrush.metrics import clustering_scores, distort_projection
from distbrush.seeds import densest_point
from distbrush.snn import build_snn_model

THETA_IN = 0.35
THETA_OUT = 0.5
K = 15

EASY_SPEC = FixtureSpec(kind="twoBlobs", n_per_cluster=300, dim=10, separation=10.0, seed=404)
HARD_SPEC = FixtureSpec(kind="threeBlobs", n_per_cluster=250, dim=10, separation=10.0, seed=405)
DISTORT_SEED = 777
DISTORT_PROPORTIONS = (0.0, 0.2, 0.4, 0.6)


class Recorder:
    def __init__(self, state):
        self.state = state
        self.events = []

    def emit(self, event):
        self.events.append(event)
        handle_event(self.state, event)

    def move(self, pos) -> None:
        self.emit(MoveTo(float(pos[0]), float(pos[1])))

    def set_radius(self, radius: float) -> None:
        delta = radius - self.state.painter.radius
        if abs(delta) > 1e-12:
            self.emit(Wheel(float(delta)))


def polygon_apothem(poly: np.ndarray, center: np.ndarray) -> float:
    """Distance from center to the nearest polygon edge."""
    best = np.inf
    m = len(poly)
    for i in range(m):
        a = poly[i]
        b = poly[(i + 1) % m]
        e = b - a
        length = float(np.hypot(e[0], e[1]))
        if length == 0.0:
            continue
        d = abs(e[0] * (center[1] - a[1]) - e[1] * (center[0] - a[0])) / length
        best = min(best, d)
    return best


def capture_radius(state) -> float:
    """Painter radius inside the outer boundary, clear of the pushed-out ring.

    Measured from the current painter center: a disc that stays within the
    outer boundary even when the painter is off the lens centroid.
    """
    lens = state.lens
    apothem = polygon_apothem(lens.outer, lens.centroid)
    offset = float(np.hypot(state.painter.center[0] - lens.centroid[0],
                            state.painter.center[1] - lens.centroid[1]))
    return max(0.98 * apothem - offset, 0.02 * apothem)


def brush_cluster(rec: Recorder, labels: np.ndarray, cluster: int) -> None:
    state = rec.state
    members = set(int(i) for i in np.flatnonzero(labels == cluster))

    rec.emit(NewBrush())
    start = densest_point(state.model, np.asarray(sorted(members)))
    start_pos = state.live[start]
    near = np.sort(np.linalg.norm(state.live - start_pos, axis=1))
    rec.set_radius(float(near[min(20, state.n - 1)]))
    rec.move(start_pos)
    rec.emit(PauseElapsed())
    if state.phase is not Phase.TRANSIENT_LENS:
        raise RuntimeError(f"cluster {cluster}: pause produced no lens")
    # keep the press inside the lens: points beyond the outer boundary were
    # not relocated and must not enter the brush
    rec.set_radius(capture_radius(state))
    rec.emit(Press())

    for _ in range(30):
        brush = state.brushes[state.active_brush]
        before = len(brush.point_set())
        if members <= brush.point_set():
            break
        lens = state.lens
        rec.set_radius(capture_radius(state))
        rec.move(lens.centroid)
        if len(state.brushes[state.active_brush].point_set()) > before:
            continue  # centroid capture still making progress
        # stalled: sweep the inner boundary to pick up points parked near it
        lens = state.lens
        sweep_radius = 0.45 * lens.margin
        step = max(1, len(lens.inner) // 8)
        for v in lens.inner[::step]:
            if members <= state.brushes[state.active_brush].point_set():
                break
            rec.set_radius(sweep_radius)
            rec.move(lens.centroid + 0.85 * (v - lens.centroid))
        rec.set_radius(capture_radius(state))
        rec.move(state.lens.centroid)
    rec.emit(Release())

    brush = state.brushes[state.active_brush]
    owned = brush.point_set()
    wrong = len(owned - members)
    if owned and wrong / len(owned) > 0.01:
        raise RuntimeError(
            f"cluster {cluster}: brush polluted ({wrong}/{len(owned)} foreign points)"
        )


def author(dataset: Dataset, projection: Projection, labels: np.ndarray, radius0: float):
    model = build_snn_model(build_knn(dataset, K))
    params = ClosenessParams(theta_in=THETA_IN, theta_out=THETA_OUT)
    state = new_session(dataset, projection, model, params)
    state.painter = type(state.painter)(center=state.painter.center, radius=radius0)
    rec = Recorder(state)
    for cluster in sorted(set(labels.tolist())):
        brush_cluster(rec, labels, cluster)
    predicted = export_labels(state)
    scores = clustering_scores(predicted, labels)
    trajectory = {
        "params": {"thetaIn": THETA_IN, "thetaOut": THETA_OUT, "painterRadius": radius0},
        "events": [event_to_json(e) for e in rec.events],
    }
    return trajectory, scores


def main() -> int:
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("tests/data")
    out_dir.mkdir(parents=True, exist_ok=True)

    jobs = []
    easy_ds, easy_proj, easy_labels = generate(EASY_SPEC)
    jobs.append(("trajectory_twoblobs.json", easy_ds, easy_proj, easy_labels))

    hard_ds, hard_proj, hard_labels = generate(HARD_SPEC)
    jobs.append(("trajectory_threeblobs.json", hard_ds, hard_proj, hard_labels))

    for prop in DISTORT_PROPORTIONS:
        positions = distort_projection(easy_proj.positions, prop, DISTORT_SEED)
        name = f"trajectory_twoblobs_distort{int(prop * 100):03d}.json"
        jobs.append((name, easy_ds, Projection(positions=positions), easy_labels))

    failures = 0
    for name, ds, proj, labels in jobs:
        radius0 = 0.05 * float(np.ptp(proj.positions, axis=0).max())
        trajectory, scores = author(ds, proj, labels, radius0)
        path = out_dir / name
        with open(path, "w") as fh:
            json.dump(trajectory, fh, indent=1)
            fh.write("\n")
        n_events = len(trajectory["events"])
        print(
            f"{name}: events={n_events} ami={scores.ami:.4f} arand={scores.arand:.4f} "
            f"vm={scores.vmeasure:.4f} unassigned={scores.unassigned_fraction:.3f}"
        )
        if scores.ami < 0.95:
            failures += 1
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
