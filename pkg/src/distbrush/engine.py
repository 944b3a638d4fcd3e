"""Interactive brushing state machine.

Phases: Idle (density overview), Inspect (painter hovering, closeness
coloring), TransientLens (reversible relocation after a pause), Brushing
(mouse held, permanent relocation and capture), Contextualized (original
layout shown).  All events for a session are processed sequentially; replay
of the same event log over the same inputs is bit-deterministic.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Union

import numpy as np

from .closeness import ClosenessParams, ClosenessResult, classify
from .data import Dataset, Projection
from .errors import AlignmentError, ParameterError, PhaseError, TrajectoryError
from .lens import (
    Lens,
    RelocationPlan,
    apply_plan,
    build_inner,
    build_lens,
    build_plan,
    polygon_diameter,
)
from .seeds import Painter, covered_points, densest_point, select_seeds
from .snn import SnnModel

logger = logging.getLogger(__name__)

_COLOR_TAGS = ["blue", "orange", "green", "red", "purple", "brown", "pink", "olive"]


class Phase(str, Enum):
    IDLE = "idle"
    INSPECT = "inspect"
    TRANSIENT_LENS = "transient_lens"
    BRUSHING = "brushing"
    CONTEXTUALIZED = "contextualized"


# ---------------------------------------------------------------- events


@dataclass(frozen=True)
class MoveTo:
    x: float
    y: float


@dataclass(frozen=True)
class Wheel:
    delta: float


@dataclass(frozen=True)
class PauseElapsed:
    pass


@dataclass(frozen=True)
class Press:
    pass


@dataclass(frozen=True)
class Release:
    pass


@dataclass(frozen=True)
class SetThetaIn:
    value: float


@dataclass(frozen=True)
class SetThetaOut:
    value: float


@dataclass(frozen=True)
class ToggleContext:
    pass


@dataclass(frozen=True)
class SwitchBrush:
    brush_id: int


@dataclass(frozen=True)
class NewBrush:
    pass


@dataclass(frozen=True)
class SetOverwrite:
    on: bool


@dataclass(frozen=True)
class SetDrag:
    on: bool


Event = Union[
    MoveTo, Wheel, PauseElapsed, Press, Release, SetThetaIn, SetThetaOut,
    ToggleContext, SwitchBrush, NewBrush, SetOverwrite, SetDrag,
]

_EVENT_TYPES: dict[str, type] = {
    "MoveTo": MoveTo,
    "Wheel": Wheel,
    "PauseElapsed": PauseElapsed,
    "Press": Press,
    "Release": Release,
    "SetThetaIn": SetThetaIn,
    "SetThetaOut": SetThetaOut,
    "ToggleContext": ToggleContext,
    "SwitchBrush": SwitchBrush,
    "NewBrush": NewBrush,
    "SetOverwrite": SetOverwrite,
    "SetDrag": SetDrag,
}

_EVENT_FIELDS: dict[str, tuple[str, ...]] = {
    "MoveTo": ("x", "y"),
    "Wheel": ("delta",),
    "SetThetaIn": ("value",),
    "SetThetaOut": ("value",),
    "SwitchBrush": ("brush_id",),
    "SetOverwrite": ("on",),
    "SetDrag": ("on",),
}


def event_from_json(obj: dict) -> Event:
    """Decode one trajectory event; raises TrajectoryError on malformed input."""
    if not isinstance(obj, dict) or "type" not in obj:
        raise TrajectoryError(f"event must be an object with a 'type': {obj!r}")
    etype = obj["type"]
    cls = _EVENT_TYPES.get(etype)
    if cls is None:
        raise TrajectoryError(f"unknown event type {etype!r}")
    fields = _EVENT_FIELDS.get(etype, ())
    try:
        return cls(**{f: obj[f] for f in fields})
    except KeyError as exc:
        raise TrajectoryError(f"event {etype} missing field {exc}") from exc


def event_to_json(event: Event) -> dict:
    name = type(event).__name__
    out: dict = {"type": name}
    for f in _EVENT_FIELDS.get(name, ()):
        out[f] = getattr(event, f)
    return out


# ---------------------------------------------------------------- state


@dataclass
class Brush:
    id: int
    color_tag: str
    points: list[int] = field(default_factory=list)
    active: bool = False

    def point_set(self) -> set[int]:
        return set(self.points)


@dataclass
class Trace:
    index: int
    src: np.ndarray
    dst: np.ndarray
    age: int = 0


@dataclass(frozen=True)
class EngineConfig:
    """Interaction hyperparameters; every value can be overridden per run."""

    margin_fraction: float = 0.2
    alpha_fraction: float = 0.15
    grid_resolution: int = 64
    bandwidth_factor: float = 0.25
    pause_threshold_ms: int = 500
    trace_lifetime_events: int = 30
    painter_radius_fraction: float = 0.08  # of projection extent
    min_painter_radius_fraction: float = 0.01


@dataclass
class SessionState:
    dataset: Dataset
    projection: Projection
    model: SnnModel
    params: ClosenessParams
    config: EngineConfig
    original: np.ndarray
    live: np.ndarray
    extent: float
    painter: Painter
    phase: Phase = Phase.IDLE
    brushes: list[Brush] = field(default_factory=list)
    active_brush: int | None = None
    overwrite: bool = False
    drag: bool = False
    seeds: np.ndarray | None = None
    lens: Lens | None = None
    pending_traces: list[Trace] = field(default_factory=list)
    transient_snapshot: tuple[np.ndarray, list[Trace]] | None = None
    stroke_start: np.ndarray | None = None
    context_stash: np.ndarray | None = None
    context_return_phase: Phase = Phase.IDLE

    @property
    def n(self) -> int:
        return self.original.shape[0]

    def brush_of(self, point: int) -> int | None:
        for brush in self.brushes:
            if point in brush.point_set():
                return brush.id
        return None

    def get_brush(self, brush_id: int) -> Brush:
        for brush in self.brushes:
            if brush.id == brush_id:
                return brush
        raise TrajectoryError(f"unknown brush id {brush_id}")


def new_session(
    dataset: Dataset,
    projection: Projection,
    model: SnnModel,
    params: ClosenessParams | None = None,
    config: EngineConfig | None = None,
) -> SessionState:
    if projection.n != dataset.n:
        raise AlignmentError(
            f"projection has {projection.n} rows but dataset has {dataset.n}"
        )
    if model.n != dataset.n:
        raise AlignmentError(f"model covers {model.n} points, dataset has {dataset.n}")
    params = params or ClosenessParams()
    config = config or EngineConfig()
    original = projection.positions.copy()
    lo = original.min(axis=0)
    hi = original.max(axis=0)
    extent = float(max(hi[0] - lo[0], hi[1] - lo[1]))
    if extent <= 0:
        extent = 1.0
    painter = Painter(center=(float(lo[0]), float(lo[1])),
                      radius=config.painter_radius_fraction * extent)
    return SessionState(
        dataset=dataset,
        projection=projection,
        model=model,
        params=params,
        config=config,
        original=original,
        live=original.copy(),
        extent=extent,
        painter=painter,
    )


# ---------------------------------------------------------------- internals


def _min_painter_radius(state: SessionState) -> float:
    return state.config.min_painter_radius_fraction * state.extent


def _age_traces(state: SessionState) -> None:
    for trace in state.pending_traces:
        trace.age += 1
    state.pending_traces = [
        t for t in state.pending_traces if t.age < state.config.trace_lifetime_events
    ]


def _seed_context(state: SessionState) -> np.ndarray | None:
    """Recompute the seed set for the painter's current position."""
    covered = covered_points(state.live, state.painter)
    active = _active_brush(state)
    if active is not None and active.points:
        merged = sorted(set(active.points) | set(int(i) for i in covered))
        return np.asarray(merged, dtype=np.int64)
    if covered.size == 0:
        return None
    return select_seeds(state.model, state.params, covered)


def _active_brush(state: SessionState) -> Brush | None:
    if state.active_brush is None:
        return None
    return state.get_brush(state.active_brush)


def _ensure_active_brush(state: SessionState) -> Brush:
    brush = _active_brush(state)
    if brush is None:
        brush = _create_brush(state)
    return brush


def _create_brush(state: SessionState) -> Brush:
    new_id = len(state.brushes)
    brush = Brush(id=new_id, color_tag=_COLOR_TAGS[new_id % len(_COLOR_TAGS)], active=True)
    for other in state.brushes:
        other.active = False
    state.brushes.append(brush)
    state.active_brush = new_id
    return brush


def _capture(state: SessionState, indices) -> None:
    """Append points to the active brush, honoring ownership and overwrite mode."""
    brush = _ensure_active_brush(state)
    owned = brush.point_set()
    for i in sorted(int(x) for x in set(indices)):
        if i in owned:
            continue
        owner = state.brush_of(i)
        if owner is not None and owner != brush.id:
            if not state.overwrite:
                continue
            other = state.get_brush(owner)
            other.points = [p for p in other.points if p != i]
        brush.points.append(i)
        owned.add(i)


def _lens_for(state: SessionState, anchor_points: np.ndarray) -> Lens:
    positions = state.live[anchor_points]
    lo = positions.min(axis=0)
    hi = positions.max(axis=0)
    dx, dy = hi[0] - lo[0], hi[1] - lo[1]
    diag = float(np.sqrt(dx * dx + dy * dy))
    bandwidth = max(state.config.bandwidth_factor * diag, 0.01 * state.extent)
    center = densest_point(state.model, anchor_points)
    inner = build_inner(
        positions,
        alpha_fraction=state.config.alpha_fraction,
        resolution=state.config.grid_resolution,
        bandwidth=bandwidth,
        anchor=state.live[center],
    )
    margin = max(state.config.margin_fraction * polygon_diameter(inner),
                 _min_painter_radius(state))
    return build_lens(inner, margin)


def _relocate(
    state: SessionState,
    cluster: np.ndarray,
    lens_points: np.ndarray,
    brushed,
) -> tuple[ClosenessResult, RelocationPlan]:
    """Build the lens on lens_points, classify against cluster, apply the plan."""
    lens = _lens_for(state, lens_points)
    result = classify(state.model, state.params, cluster)
    plan = build_plan(lens, result, state.params, state.live, brushed)
    state.live = apply_plan(state.live, plan)
    state.lens = lens
    for index, src, dst in plan.traces:
        state.pending_traces.append(Trace(index=index, src=src, dst=dst))
    return result, plan


def _revert_transient(state: SessionState) -> None:
    assert state.transient_snapshot is not None
    live, traces = state.transient_snapshot
    state.live = live
    state.pending_traces = traces
    state.transient_snapshot = None
    state.lens = None
    state.phase = Phase.INSPECT


def _restore_foreign_points(state: SessionState) -> None:
    """Non-overwrite strokes must not displace other brushes' points."""
    if state.stroke_start is None:
        return
    brush = _active_brush(state)
    active_id = brush.id if brush else None
    for other in state.brushes:
        if other.id == active_id:
            continue
        for p in other.points:
            if not np.array_equal(state.live[p], state.stroke_start[p]):
                state.live[p] = state.stroke_start[p]


# ---------------------------------------------------------------- operations


def handle_event(state: SessionState, event: Event) -> dict:
    """Advance the session by one event; returns render hints.

    Events that are illegal in the current phase are no-ops (logged), so the
    function is total over well-formed events.
    """
    if isinstance(event, MoveTo):
        return _on_move(state, np.array([event.x, event.y], dtype=np.float64))
    if isinstance(event, Wheel):
        new_radius = max(state.painter.radius + event.delta, _min_painter_radius(state))
        new_radius = min(new_radius, 2.0 * state.extent)
        state.painter = Painter(center=state.painter.center, radius=new_radius)
        return {}
    if isinstance(event, PauseElapsed):
        return _on_pause(state)
    if isinstance(event, Press):
        return _on_press(state)
    if isinstance(event, Release):
        return _on_release(state)
    if isinstance(event, SetThetaIn):
        state.params = ClosenessParams(theta_in=event.value, theta_out=state.params.theta_out)
        return {}
    if isinstance(event, SetThetaOut):
        state.params = ClosenessParams(theta_in=state.params.theta_in, theta_out=event.value)
        return {}
    if isinstance(event, ToggleContext):
        if state.phase is Phase.BRUSHING:
            logger.info("ToggleContext ignored during Brushing")
            return {}
        _, endpoints = contextualize(state)
        return {"endpoints": endpoints}
    if isinstance(event, SwitchBrush):
        if state.phase in (Phase.BRUSHING, Phase.TRANSIENT_LENS):
            logger.info("SwitchBrush ignored in phase %s", state.phase)
            return {}
        brush = state.get_brush(event.brush_id)
        for other in state.brushes:
            other.active = other.id == brush.id
        state.active_brush = brush.id
        return {}
    if isinstance(event, NewBrush):
        if state.phase in (Phase.BRUSHING, Phase.TRANSIENT_LENS):
            logger.info("NewBrush ignored in phase %s", state.phase)
            return {}
        _create_brush(state)
        return {}
    if isinstance(event, SetOverwrite):
        state.overwrite = bool(event.on)
        return {}
    if isinstance(event, SetDrag):
        state.drag = bool(event.on)
        return {}
    raise TrajectoryError(f"unsupported event {event!r}")


def _on_move(state: SessionState, pos: np.ndarray) -> dict:
    if state.phase is Phase.CONTEXTUALIZED:
        state.painter = Painter(center=(float(pos[0]), float(pos[1])),
                                radius=state.painter.radius)
        return {}
    if state.phase is Phase.TRANSIENT_LENS:
        _revert_transient(state)
    if state.phase is Phase.IDLE:
        state.phase = Phase.INSPECT

    _age_traces(state)
    previous = np.array(state.painter.center)
    state.painter = Painter(center=(float(pos[0]), float(pos[1])),
                            radius=state.painter.radius)

    brush = _active_brush(state)
    if state.drag and brush is not None and brush.points:
        delta = pos - previous
        idx = np.asarray(brush.points, dtype=np.int64)
        state.live[idx] += delta
        return {"dragged": brush.id}

    if state.phase is Phase.BRUSHING:
        # settle relocation for the new painter position first: the painter
        # captures relocated points, never the stale pre-correction layout
        covered = covered_points(state.live, state.painter)
        brush = _active_brush(state)
        cluster = np.asarray(
            sorted(set(brush.points) | set(int(i) for i in covered)), dtype=np.int64
        )
        if cluster.size == 0:
            return {"closeness": None}
        # an all-foreign cover captures nothing; anchor the lens on the cover
        basis = np.asarray(brush.points, dtype=np.int64) if brush.points else cluster
        result, plan = _relocate(state, cluster, basis, brush.points)
        _capture(state, covered_points(state.live, state.painter))
        return {"closeness": result, "plan": plan}

    # Inspect: recompute seeds and closeness coloring
    state.seeds = _seed_context(state)
    if state.seeds is None:
        return {"closeness": None}
    result = classify(state.model, state.params, state.seeds)
    return {"closeness": result}


def _on_pause(state: SessionState) -> dict:
    if state.phase is not Phase.INSPECT or state.seeds is None or state.seeds.size == 0:
        logger.info("PauseElapsed ignored in phase %s", state.phase)
        return {}
    state.transient_snapshot = (
        state.live.copy(),
        [Trace(t.index, t.src, t.dst, t.age) for t in state.pending_traces],
    )
    brush = _active_brush(state)
    brushed = brush.points if brush is not None and brush.points else state.seeds
    result, plan = _relocate(state, state.seeds, state.seeds, brushed)
    state.phase = Phase.TRANSIENT_LENS
    return {"closeness": result, "plan": plan}


def _on_press(state: SessionState) -> dict:
    if state.phase is not Phase.TRANSIENT_LENS:
        logger.info("Press ignored in phase %s", state.phase)
        return {}
    state.transient_snapshot = None  # relocation becomes permanent
    state.stroke_start = state.live.copy()
    state.phase = Phase.BRUSHING
    brush = _ensure_active_brush(state)
    covered = covered_points(state.live, state.painter)
    capture_set = set(int(i) for i in covered)
    if state.seeds is not None:
        capture_set |= set(int(i) for i in state.seeds)
    _capture(state, capture_set)
    brush = _active_brush(state)
    cluster = np.asarray(sorted(capture_set | set(brush.points)), dtype=np.int64)
    if cluster.size == 0:
        return {"closeness": None}
    basis = np.asarray(brush.points, dtype=np.int64) if brush.points else cluster
    result, plan = _relocate(state, cluster, basis, brush.points)
    return {"closeness": result, "plan": plan}


def _on_release(state: SessionState) -> dict:
    if state.phase is not Phase.BRUSHING:
        logger.info("Release ignored in phase %s", state.phase)
        return {}
    _restore_foreign_points(state)
    state.stroke_start = None
    state.phase = Phase.INSPECT
    state.lens = None
    brush = _active_brush(state)
    covered = covered_points(state.live, state.painter)
    merged = set(int(i) for i in covered)
    if brush is not None:
        merged |= brush.point_set()
    state.seeds = (
        np.asarray(sorted(merged), dtype=np.int64) if merged else None
    )
    return {"confirmed": brush.id if brush else None}


def contextualize(state: SessionState) -> tuple[SessionState, dict[int, tuple]]:
    """Toggle between the relocated layout and the original projection.

    Returns an endpoint map {index: (from, to)} so a UI can animate the
    transition; the engine itself switches instantly.
    """
    if state.phase is Phase.BRUSHING:
        raise PhaseError("cannot contextualize while brushing")
    if state.phase is Phase.TRANSIENT_LENS:
        _revert_transient(state)
    endpoints: dict[int, tuple] = {}
    if state.phase is Phase.CONTEXTUALIZED:
        assert state.context_stash is not None
        for i in range(state.n):
            endpoints[i] = (state.live[i].copy(), state.context_stash[i].copy())
        state.live = state.context_stash
        state.context_stash = None
        state.phase = state.context_return_phase
    else:
        state.context_stash = state.live
        state.context_return_phase = state.phase
        for i in range(state.n):
            endpoints[i] = (state.live[i].copy(), state.original[i].copy())
        state.live = state.original.copy()
        state.phase = Phase.CONTEXTUALIZED
    return state, endpoints


def heatmap_order(state: SessionState) -> np.ndarray:
    """Row/column permutation: brushed blocks first (creation, then insertion
    order), unbrushed points last in index order."""
    seen: list[int] = []
    taken = set()
    for brush in state.brushes:
        for p in brush.points:
            seen.append(p)
            taken.add(p)
    rest = [i for i in range(state.n) if i not in taken]
    return np.asarray(seen + rest, dtype=np.int64)


def export_labels(state: SessionState) -> np.ndarray:
    """Brush id owning each point, -1 for unbrushed."""
    labels = np.full(state.n, -1, dtype=np.int64)
    for brush in state.brushes:
        for p in brush.points:
            labels[p] = brush.id
    return labels


def snapshot(state: SessionState) -> dict:
    """JSON-ready view of the session: positions, brushes, phase, lens, traces."""
    return {
        "phase": state.phase.value,
        "live": [[float(x), float(y)] for x, y in state.live],
        "brushes": [
            {
                "id": b.id,
                "colorTag": b.color_tag,
                "points": list(b.points),
                "active": b.id == state.active_brush,
            }
            for b in state.brushes
        ],
        "lens": None
        if state.lens is None
        else {
            "inner": [[float(x), float(y)] for x, y in state.lens.inner],
            "outer": [[float(x), float(y)] for x, y in state.lens.outer],
            "margin": float(state.lens.margin),
        },
        "traces": [
            {
                "index": t.index,
                "from": [float(t.src[0]), float(t.src[1])],
                "to": [float(t.dst[0]), float(t.dst[1])],
                "age": t.age,
            }
            for t in state.pending_traces
        ],
        "params": {
            "thetaIn": state.params.theta_in,
            "thetaOut": state.params.theta_out,
        },
        "painter": {
            "x": float(state.painter.center[0]),
            "y": float(state.painter.center[1]),
            "radius": float(state.painter.radius),
        },
    }
