import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.core.exceptions import InvalidParameterError
from app.services.bumping import (
    RouteTrace,
    StopCondition,
    bumping_tree,
    hitting_times,
    lazy_route_oracle,
    projective_jump_times,
    projective_route,
    row_route,
    sentinel_trajectory,
    simulate_route,
    trajectory_of_infinity,
    tree_non_crossing,
)
from app.services.plancherel import SeededStream
from app.services.tableau_core import Entry, InsertionTableau, StandardTableau, rsk

EXAMPLE_ROWS = [[16, 37, 41, 82], [23, 53, 70], [74, 99]]

words = st.lists(st.floats(min_value=0, max_value=1, allow_nan=False), min_size=0, max_size=40, unique=True)


@pytest.fixture(scope="module")
def long_trace():
    # Траектория пробы 3½ по 3000 равномерным величинам
    w = SeededStream(11).take(3000)
    return trajectory_of_infinity(w, 3, StopCondition(t_max=len(w)))


def _recomputed_hits(trace, x):
    for t, (bx, by) in trace.events:
        if bx <= x:
            return by, t
    return None


# --- Row parametrization ---

def test_row_route_example():
    tableau = InsertionTableau([[Entry.finite(v) for v in row] for row in EXAMPLE_ROWS])
    assert row_route(tableau, 17) == {0: 1, 1: 1, 2: 0, 3: 0}
    # простые числа вместо Entry
    assert row_route(InsertionTableau(EXAMPLE_ROWS), 17) == {0: 1, 1: 1, 2: 0, 3: 0}
    # таблица не изменилась
    assert tableau.to_lists() == EXAMPLE_ROWS


def test_row_route_of_empty_tableau():
    assert row_route(InsertionTableau(), 5) == {0: 0}
    assert row_route(StandardTableau([]), 0) == {0: 0}


@given(words, st.integers(0, 40))
def test_row_route_moves_left(w, m):
    _, q = rsk(w)
    route = row_route(q, min(m, len(w)))
    columns = [route[y] for y in sorted(route)]
    assert sorted(route) == list(range(len(route)))
    assert all(a >= b for a, b in zip(columns, columns[1:]))


# --- Lazy parametrization ---

def test_increasing_sequence_moves_the_probe_once():
    # следующий элемент встаёт в клетку (m, 0) и выталкивает ∞ в столбец 0 второй строки
    w = [i / 10 for i in range(1, 10)]
    for m in range(len(w) + 1):
        expected = [(m, (m, 0))] + ([(m + 1, (0, 1))] if m < len(w) else [])
        assert lazy_route_oracle(w, m).events == expected
        assert trajectory_of_infinity(w, m, StopCondition(t_max=len(w))).events == expected


def test_lazy_route_oracle_rejects_bad_ranges():
    with pytest.raises(InvalidParameterError):
        lazy_route_oracle([0.1, 0.2], 3)
    with pytest.raises(InvalidParameterError):
        lazy_route_oracle([0.1, 0.2], 1, t_range=[0])
    with pytest.raises(InvalidParameterError):
        sentinel_trajectory([0.1], 2)


@settings(max_examples=60)
@given(words, st.integers(0, 40))
def test_three_route_oracles_agree(w, m):
    m = min(m, len(w))
    simulated = trajectory_of_infinity(w, m, StopCondition(t_max=len(w)))
    oracle = lazy_route_oracle(w, m)
    sentinel = sentinel_trajectory(w, m)
    assert simulated.events == oracle.events == sentinel.events
    assert simulated.steps == oracle.steps == len(w)
    assert not simulated.censored


def test_route_oracles_agree_on_random_words():
    # 1000 слов длины до 40, все m от 0 до |w|
    rng = np.random.default_rng(2024)
    for length in rng.integers(0, 41, size=1000):
        w = rng.random(int(length)).tolist()
        for m in range(len(w) + 1):
            simulated = trajectory_of_infinity(w, m, StopCondition(t_max=len(w)))
            assert simulated.events == lazy_route_oracle(w, m).events == sentinel_trajectory(w, m).events


@settings(max_examples=60)
@given(words, st.integers(0, 40))
def test_lazy_route_visits_the_row_route(w, m):
    m = min(m, len(w))
    _, q = rsk(w)
    trace = trajectory_of_infinity(w, m, StopCondition(t_max=len(w)))
    assert trace.y_by_row == row_route(q, m)


@given(words, st.integers(0, 40))
def test_event_geometry(w, m):
    trace = trajectory_of_infinity(w, min(m, len(w)), StopCondition(t_max=len(w)))
    boxes = [box for _, box in trace.events]
    assert all(a[1] + 1 == b[1] for a, b in zip(boxes, boxes[1:]))
    assert all(a[0] >= b[0] for a, b in zip(boxes, boxes[1:]))
    times = [t for t, _ in trace.events]
    assert all(a < b for a, b in zip(times, times[1:]))


# --- Simulation kernel ---

def test_simulate_route_validation():
    with pytest.raises(InvalidParameterError):
        simulate_route([0.1, 0.2], -1, StopCondition(t_max=5))
    with pytest.raises(InvalidParameterError):
        simulate_route([0.1, 0.2], 3, StopCondition(t_max=2))
    with pytest.raises(InvalidParameterError):
        simulate_route([0.1, 0.2], 3, StopCondition(t_max=10))
    with pytest.raises(InvalidParameterError):
        StopCondition(t_max=-1)
    with pytest.raises(InvalidParameterError):
        StopCondition(t_max=1, target_column=-1)


def test_censored_trace_gives_lower_bounds():
    w = SeededStream(5).take(5)
    trace, _ = simulate_route(w, 5, StopCondition(t_max=5, target_column=0))
    assert trace.censored
    assert trace.steps == 5
    hits = hitting_times(trace, 0)
    assert hits.censored == [True]
    assert hits.Y == [trace.final[1] + 1]
    assert hits.T == [trace.steps + 1]


def test_exhausted_stream_ends_the_run():
    trace, _ = simulate_route([0.3, 0.1], 1, StopCondition(t_max=100, target_column=0))
    assert trace.steps == 2
    assert trace.events == [(1, (1, 0))]
    assert trace.censored

    trace, _ = simulate_route([0.1, 0.3], 1, StopCondition(t_max=100, target_column=0))
    assert trace.events == [(1, (1, 0)), (2, (0, 1))]
    assert not trace.censored


def test_row_cap_stops_the_run():
    w = SeededStream(2).take(2000)
    trace, _ = simulate_route(w, 20, StopCondition(t_max=2000, target_column=0, row_cap=1))
    assert trace.final[1] <= 1
    if trace.final[0] > 0:
        assert trace.censored


def test_checkpoints():
    w = SeededStream(4).take(400)
    trace, snapshots = simulate_route(
        w, 10, StopCondition(t_max=400), t_checkpoints=[10, 50, 400], x_checkpoints=[2]
    )
    by_time = {s.t: s for s in snapshots}
    for t in (10, 50, 400):
        assert by_time[t].regular.size == t
        assert by_time[t].special == trace.position_at(t)
    column_hits = [s for s in snapshots if s.special[0] <= 2]
    if 2 in trace.T:
        assert column_hits[0].t == trace.T[2]


# --- Hitting times ---

def test_zero_probe_starts_in_column_zero():
    trace = trajectory_of_infinity(SeededStream(1).take(50), 0, StopCondition(t_max=50))
    hits = hitting_times(trace, 0)
    assert hits.Y == [0]
    assert hits.T == [0]
    # проба 0½ меньше всех элементов и всегда остаётся в столбце 0
    assert all(box[0] == 0 for _, box in trace.events)


def test_hitting_times_match_raw_events(long_trace):
    hits = hitting_times(long_trace, 3)
    for x in range(4):
        raw = _recomputed_hits(long_trace, x)
        if raw is None:
            assert hits.censored[x]
        else:
            assert (hits.Y[x], hits.T[x]) == raw
            assert not hits.censored[x]
            assert hits.T[x] >= hits.Y[x] >= 0
    assert all(a >= b for a, b in zip(hits.Y, hits.Y[1:]))
    assert all(a >= b for a, b in zip(hits.T, hits.T[1:]))
    assert hits.x_max == 3


def test_hitting_times_rejects_negative_column(long_trace):
    with pytest.raises(InvalidParameterError):
        hitting_times(long_trace, -1)


def test_trace_accessors(long_trace):
    assert long_trace.position_at(3) == long_trace.start
    assert long_trace.position_at(long_trace.steps) == long_trace.final
    with pytest.raises(InvalidParameterError):
        long_trace.position_at(2)
    data = long_trace.to_dict()
    assert data["m"] == 3
    assert data["events"][0] == [3, list(long_trace.start)]


# --- Projective coordinates ---

def test_projective_route(long_trace):
    m = 3
    samples = projective_route(long_trace, m, [1e9, 0.5, 1.0, 2.0, 4.0])
    # ⌊2m/z⌋ = 0: столбец маршрута в нижней строке
    assert samples[0].known and samples[0].x == long_trace.start[0]
    known = [s.x for s in samples[1:] if s.known]
    assert all(a <= b for a, b in zip(known, known[1:]))
    with pytest.raises(InvalidParameterError):
        projective_route(long_trace, m, [0.0])


def test_projective_jump_times(long_trace):
    m = 3
    hits = hitting_times(long_trace, 2)
    jumps = projective_jump_times(long_trace, m, 3)
    for k, time in enumerate(jumps, start=1):
        if hits.censored[k - 1]:
            assert time is None
        elif hits.Y[k - 1] == 0:
            assert time == math.inf
        else:
            assert time == 2 * m / hits.Y[k - 1]
            # сразу после скачка x^proj ≥ k, чуть раньше ещё меньше k
            after, at = projective_route(long_trace, m, [time * 1.0001, time * 0.9999])
            if after.known:
                assert after.x >= k
            if at.known:
                assert at.x <= k - 1
    assert projective_jump_times(long_trace, m, 0) == []


# --- Bumping trees ---

def test_tree_of_a_single_letter():
    first, second = bumping_tree([0.5], 1)
    assert first.events == [(0, (0, 0)), (1, (0, 1))]
    assert second.events == [(1, (1, 0))]
    with pytest.raises(InvalidParameterError):
        bumping_tree([0.5], 2)


@settings(max_examples=30)
@given(words)
def test_tree_routes_do_not_cross(w):
    traces = bumping_tree(w, len(w))
    assert [trace.m for trace in traces] == list(range(len(w) + 1))
    assert tree_non_crossing(traces)


def test_crossing_routes_are_detected():
    left = RouteTrace(m=0, events=[(0, (2, 0))], steps=3)
    right = RouteTrace(m=1, events=[(1, (1, 0))], steps=3)
    assert not tree_non_crossing([left, right])
