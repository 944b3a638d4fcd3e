from __future__ import annotations

import numpy as np
import pytest

from distbrush.closeness import ClosenessParams, PointClass, classify
from distbrush.data import Dataset, Projection, build_knn
from distbrush.engine import (
    EngineConfig,
    MoveTo,
    NewBrush,
    PauseElapsed,
    Phase,
    Press,
    Release,
    SetDrag,
    SetOverwrite,
    SetThetaIn,
    SwitchBrush,
    ToggleContext,
    Wheel,
    contextualize,
    event_from_json,
    event_to_json,
    export_labels,
    handle_event,
    heatmap_order,
    new_session,
    snapshot,
)
from distbrush.errors import AlignmentError, PhaseError, TrajectoryError
from distbrush.lens import point_in_polygon
from distbrush.snn import build_snn_model


@pytest.fixture()
def session(two_blob, two_blob_model):
    dataset, projection, _ = two_blob
    return new_session(dataset, projection, two_blob_model, ClosenessParams(theta_in=0.35))


def blob_center(two_blob, label):
    _, projection, labels = two_blob
    return projection.positions[labels == label].mean(axis=0)


def run(state, *events):
    hints = None
    for e in events:
        hints = handle_event(state, e)
    return hints


def test_new_session_initial_state(session):
    assert session.phase is Phase.IDLE
    assert session.brushes == []
    np.testing.assert_array_equal(session.live, session.original)


def test_new_session_alignment_error(two_blob, two_blob_model):
    dataset, projection, _ = two_blob
    bad = Projection(positions=projection.positions[:-1])
    with pytest.raises(AlignmentError):
        new_session(dataset, bad, two_blob_model)


def test_move_enters_inspect_and_colors(session, two_blob):
    c = blob_center(two_blob, 0)
    hints = run(session, MoveTo(*c))
    assert session.phase is Phase.INSPECT
    assert session.seeds is not None and session.seeds.size > 0
    assert hints["closeness"] is not None


def test_transient_relocation_reverts_bitwise(session, two_blob):
    c = blob_center(two_blob, 0)
    run(session, MoveTo(*c))
    before = session.live.copy()
    run(session, PauseElapsed())
    assert session.phase is Phase.TRANSIENT_LENS
    assert session.lens is not None
    assert not np.array_equal(session.live, before)  # something relocated
    run(session, MoveTo(c[0] + 0.01, c[1]))
    assert session.phase is Phase.INSPECT
    np.testing.assert_array_equal(session.live, before)


def test_pause_without_cover_is_noop(session, two_blob):
    _, projection, _ = two_blob
    far = projection.positions.max(axis=0) + 100.0
    run(session, MoveTo(*far))
    run(session, PauseElapsed())
    assert session.phase is Phase.INSPECT
    assert session.lens is None


def test_press_only_legal_in_transient(session, two_blob):
    c = blob_center(two_blob, 0)
    run(session, MoveTo(*c), Press())
    assert session.phase is Phase.INSPECT  # ignored
    run(session, PauseElapsed(), Press())
    assert session.phase is Phase.BRUSHING
    assert session.brushes and session.brushes[0].points


def test_press_captures_seeds_and_covered(session, two_blob):
    from distbrush.seeds import covered_points

    c = blob_center(two_blob, 0)
    run(session, MoveTo(*c), PauseElapsed())
    seeds = set(int(i) for i in session.seeds)
    covered_at_press = set(int(i) for i in covered_points(session.live, session.painter))
    run(session, Press())
    brush = session.brushes[0]
    assert brush.point_set() == seeds | covered_at_press
    run(session, Release())
    assert session.phase is Phase.INSPECT
    assert set(int(i) for i in session.seeds) >= brush.point_set()


def test_brushing_respects_lens_invariants(session, two_blob):
    dataset, _, labels = two_blob
    c = blob_center(two_blob, 0)
    run(session, MoveTo(*c), PauseElapsed(), Press())
    brush = session.brushes[0]
    cluster = np.asarray(sorted(set(brush.points)), dtype=np.int64)
    result = classify(session.model, session.params, cluster)
    lens = session.lens
    scale = max(np.abs(session.live).max(), 1.0)
    for i in range(session.n):
        if result.classes[i] is PointClass.NON_NEIGHBOR:
            assert not point_in_polygon(lens.outer, session.live[i], -1e-9 * scale)
        if result.classes[i] in (PointClass.TRUE_NEIGHBOR, PointClass.MEMBER):
            assert point_in_polygon(lens.inner, session.live[i], 1e-9 * scale)


def test_whole_blob_brushed_after_sweep(session, two_blob):
    dataset, projection, labels = two_blob
    c = blob_center(two_blob, 0)
    run(session, Wheel(2.5), MoveTo(*c), PauseElapsed(), Press())
    for _ in range(8):
        run(session, MoveTo(*c))
    run(session, Release())
    got = export_labels(session)
    blob0 = np.flatnonzero(labels == 0)
    assert set(blob0) <= set(np.flatnonzero(got == 0))
    assert not (set(np.flatnonzero(labels == 1)) & set(np.flatnonzero(got == 0)))


def test_overwrite_off_returns_attracted_points(session, two_blob):
    """Foreign points pulled in during another brush's stroke must snap back."""
    dataset, projection, labels = two_blob
    c0 = blob_center(two_blob, 0)
    run(session, MoveTo(*c0), PauseElapsed(), Press(), MoveTo(*c0), Release())
    first = session.brushes[0].point_set()
    assert first

    victim = sorted(first)[0]
    pre_stroke = session.live.copy()

    run(session, NewBrush())
    run(session, MoveTo(*c0), PauseElapsed())
    if session.phase is Phase.TRANSIENT_LENS:
        run(session, Press(), MoveTo(*c0), Release())
    assert session.brushes[1].point_set().isdisjoint(first)
    assert victim in session.brushes[0].point_set()
    np.testing.assert_array_equal(session.live[victim], pre_stroke[victim])


def test_overwrite_on_reassigns(session, two_blob):
    c0 = blob_center(two_blob, 0)
    run(session, MoveTo(*c0), PauseElapsed(), Press(), MoveTo(*c0), Release())
    first = session.brushes[0].point_set()
    run(session, SetOverwrite(True), NewBrush())
    run(session, MoveTo(*c0), PauseElapsed())
    run(session, Press(), MoveTo(*c0), Release())
    second = session.brushes[1].point_set()
    assert second & first  # stole points
    assert session.brushes[0].point_set().isdisjoint(second)


def test_brush_disjointness_random_events(session, two_blob):
    rng = np.random.default_rng(123)
    _, projection, _ = two_blob
    lo = projection.positions.min(axis=0)
    hi = projection.positions.max(axis=0)
    events = []
    for _ in range(120):
        r = rng.random()
        if r < 0.45:
            pos = lo + rng.random(2) * (hi - lo)
            events.append(MoveTo(float(pos[0]), float(pos[1])))
        elif r < 0.55:
            events.append(PauseElapsed())
        elif r < 0.65:
            events.append(Press())
        elif r < 0.75:
            events.append(Release())
        elif r < 0.8:
            events.append(NewBrush())
        elif r < 0.85:
            events.append(SetOverwrite(bool(rng.random() < 0.5)))
        elif r < 0.9:
            events.append(Wheel(float(rng.normal(0, 0.5))))
        elif r < 0.95:
            events.append(SetDrag(bool(rng.random() < 0.3)))
        else:
            events.append(ToggleContext())
    for e in events:
        handle_event(session, e)
        seen = {}
        for brush in session.brushes:
            for p in brush.points:
                assert p not in seen, f"point {p} owned by {seen.get(p)} and {brush.id}"
                seen[p] = brush.id


def test_replay_determinism(two_blob, two_blob_model):
    dataset, projection, _ = two_blob
    c = projection.positions[:60].mean(axis=0)
    events = [MoveTo(*c), PauseElapsed(), Press(), MoveTo(c[0] + 0.5, c[1]), Release()]

    def final():
        s = new_session(dataset, projection, two_blob_model, ClosenessParams())
        for e in events:
            handle_event(s, e)
        return s

    a, b = final(), final()
    np.testing.assert_array_equal(a.live, b.live)
    assert snapshot(a) == snapshot(b)


def test_contextualize_roundtrip(session, two_blob):
    c = blob_center(two_blob, 0)
    run(session, MoveTo(*c), PauseElapsed(), Press(), MoveTo(*c), Release())
    relocated = session.live.copy()
    state, endpoints = contextualize(session)
    assert session.phase is Phase.CONTEXTUALIZED
    np.testing.assert_array_equal(session.live, session.original)
    brushed = session.brushes[0].points
    for p in brushed:
        np.testing.assert_array_equal(endpoints[p][1], session.original[p])
    contextualize(session)
    np.testing.assert_array_equal(session.live, relocated)
    assert session.phase is Phase.INSPECT


def test_contextualize_identity_without_brushing(session):
    _, endpoints = contextualize(session)
    for i in range(session.n):
        np.testing.assert_array_equal(endpoints[i][0], endpoints[i][1])


def test_contextualize_illegal_during_brushing(session, two_blob):
    c = blob_center(two_blob, 0)
    run(session, MoveTo(*c), PauseElapsed(), Press())
    with pytest.raises(PhaseError):
        contextualize(session)
    # via handle_event it is a logged no-op
    handle_event(session, ToggleContext())
    assert session.phase is Phase.BRUSHING


def test_drag_translates_active_brush(session, two_blob):
    c = blob_center(two_blob, 0)
    run(session, MoveTo(*c), PauseElapsed(), Press(), MoveTo(*c), Release())
    brush_points = np.asarray(session.brushes[0].points)
    before = session.live[brush_points].copy()
    others_before = np.delete(session.live.copy(), brush_points, axis=0)
    run(session, SetDrag(True), MoveTo(c[0] + 3.0, c[1] - 2.0))
    delta = np.array([3.0, -2.0])
    np.testing.assert_allclose(session.live[brush_points], before + delta, atol=1e-12)
    np.testing.assert_array_equal(
        np.delete(session.live, brush_points, axis=0), others_before
    )


def test_switch_brush(session, two_blob):
    c0 = blob_center(two_blob, 0)
    c1 = blob_center(two_blob, 1)
    run(session, MoveTo(*c0), PauseElapsed(), Press(), Release())
    run(session, NewBrush())
    run(session, MoveTo(*c1), PauseElapsed(), Press(), Release())
    assert session.active_brush == 1
    run(session, SwitchBrush(0))
    assert session.active_brush == 0
    with pytest.raises(TrajectoryError):
        handle_event(session, SwitchBrush(99))


def test_wheel_clamps_radius(session):
    run(session, Wheel(-1e9))
    assert session.painter.radius > 0
    r_min = session.painter.radius
    run(session, Wheel(0.5))
    assert session.painter.radius == r_min + 0.5


def test_set_theta_events(session):
    run(session, SetThetaIn(0.6))
    assert session.params.theta_in == 0.6
    run(session, SetThetaIn(0.1))
    assert session.params.theta_in == 0.1


def test_heatmap_order_example():
    # brush1 = {5, 2}, brush2 = {7}, n = 8 -> [5, 2, 7, 0, 1, 3, 4, 6]
    values = np.arange(16, dtype=np.float64).reshape(8, 2)
    ds = Dataset(values=values)
    proj = Projection(positions=values.copy())
    model = build_snn_model(build_knn(ds, 2))
    state = new_session(ds, proj, model)
    from distbrush.engine import Brush

    state.brushes = [
        Brush(id=0, color_tag="blue", points=[5, 2]),
        Brush(id=1, color_tag="orange", points=[7]),
    ]
    np.testing.assert_array_equal(heatmap_order(state), [5, 2, 7, 0, 1, 3, 4, 6])
    labels = export_labels(state)
    np.testing.assert_array_equal(labels, [-1, -1, 0, -1, -1, 0, -1, 1])


def test_heatmap_order_is_permutation(session, two_blob):
    c = blob_center(two_blob, 0)
    run(session, MoveTo(*c), PauseElapsed(), Press(), MoveTo(*c), Release())
    order = heatmap_order(session)
    assert sorted(order.tolist()) == list(range(session.n))


def test_export_labels_empty(session):
    np.testing.assert_array_equal(export_labels(session), np.full(session.n, -1))


def test_event_json_roundtrip():
    events = [
        MoveTo(1.5, -2.0), Wheel(0.3), PauseElapsed(), Press(), Release(),
        SetThetaIn(0.4), SwitchBrush(2), NewBrush(), SetOverwrite(True), SetDrag(False),
    ]
    for e in events:
        assert event_from_json(event_to_json(e)) == e
    with pytest.raises(TrajectoryError):
        event_from_json({"type": "Nope"})
    with pytest.raises(TrajectoryError):
        event_from_json({"type": "MoveTo", "x": 1.0})


def test_traces_age_and_expire(two_blob, two_blob_model):
    dataset, projection, _ = two_blob
    config = EngineConfig(trace_lifetime_events=3)
    state = new_session(dataset, projection, two_blob_model, ClosenessParams(), config)
    c = projection.positions[:60].mean(axis=0)
    run(state, MoveTo(*c), PauseElapsed(), Press())
    if state.pending_traces:
        for _ in range(3):
            run(state, MoveTo(*c))
        assert state.pending_traces == []
