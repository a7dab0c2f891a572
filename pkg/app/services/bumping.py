"""
Bumping routes of a probe m+½ through a recording tableau, in the row
parametrization and in the lazy (time) parametrization, together with the
hitting times Y_x and T_x, the projective reparametrization and bumping trees.

The lazy route is simulated as the trajectory of ∞: the regular tableau
receives the insertions and the special box moves up one row exactly when the
newly created box lands on it. No sentinel entry is ever stored.
"""
import logging
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from app.core.exceptions import InvalidParameterError
from app.services.augmented import special_after_step
from app.services.tableau_core import (
    Box,
    Entry,
    InsertionTableau,
    StandardTableau,
    YoungDiagram,
    restrict_leq,
    rsk,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StopCondition:
    """
    When a route simulation ends.

    Attributes:
        target_column (int | None): Stop as soon as the route reaches a column ≤ target_column.
        t_max (int): Last insertion step that may be simulated.
        row_cap (int | None): Stop (censored) once the route sits in a row ≥ row_cap
            without having reached the target column.
    """
    t_max: int
    target_column: int | None = None
    row_cap: int | None = None

    def __post_init__(self):
        if self.t_max < 0:
            raise InvalidParameterError(f"t_max must be non-negative, got {self.t_max}")
        if self.target_column is not None and self.target_column < 0:
            raise InvalidParameterError(f"target_column must be non-negative, got {self.target_column}")
        if self.row_cap is not None and self.row_cap < 0:
            raise InvalidParameterError(f"row_cap must be non-negative, got {self.row_cap}")


@dataclass
class Snapshot:
    """State of the augmented process at a checkpoint."""
    t: int
    special: Box
    regular: YoungDiagram


@dataclass
class RouteTrace:
    """
    Lazy bumping route of the probe m+½ (equivalently, the trajectory of ∞).

    Attributes:
        m (int): Probe level.
        events (list[tuple[int, Box]]): (t, box) at t = m and at every later move of the route.
        steps (int): Last simulated insertion step.
        censored (bool): True when the stop condition's target was not reached.
        t_max (int | None): The horizon the simulation was allowed to run to.
    """
    m: int
    events: list[tuple[int, Box]]
    steps: int
    censored: bool = False
    t_max: int | None = None
    y_by_row: dict[int, int] = field(init=False)
    Y: dict[int, int] = field(init=False)
    T: dict[int, int] = field(init=False)

    def __post_init__(self):
        self.events = [(int(t), (int(b[0]), int(b[1]))) for t, b in self.events]
        self.y_by_row = {box[1]: box[0] for _, box in self.events}
        self.Y = {}
        self.T = {}
        previous_x = None
        for t, (x, y) in self.events:
            # столбцы, впервые достигнутые этим событием
            upper = x if previous_x is None else previous_x - 1
            for column in range(x, upper + 1):
                self.Y[column] = y
                self.T[column] = t
            previous_x = x

    @property
    def start(self) -> Box:
        return self.events[0][1]

    @property
    def final(self) -> Box:
        return self.events[-1][1]

    def position_at(self, t: int) -> Box:
        """The route's box at time t (m ≤ t ≤ steps)."""
        if t < self.events[0][0] or t > self.steps:
            raise InvalidParameterError(f"t={t} outside the simulated window [{self.events[0][0]}, {self.steps}]")
        index = bisect_right([e[0] for e in self.events], t) - 1
        return self.events[index][1]

    def to_dict(self) -> dict[str, Any]:
        return {
            "m": self.m,
            "events": [[t, [x, y]] for t, (x, y) in self.events],
            "steps": self.steps,
            "censored": self.censored,
            "t_max": self.t_max,
        }


@dataclass
class HittingTimes:
    """
    Y_x and T_x for columns 0..x_max.

    For a censored column the stored value is a lower bound: Y ≥ row + 1 and
    T ≥ steps + 1 of the censored trace.
    """
    Y: list[int]
    T: list[int]
    censored: list[bool]

    @property
    def x_max(self) -> int:
        return len(self.Y) - 1


def simulate_route(
        values: Iterable[Any],
        m: int,
        stop: StopCondition,
        t_checkpoints: Sequence[int] = (),
        x_checkpoints: Sequence[int] = ()
) -> tuple[RouteTrace, list[Snapshot]]:
    """
    Simulate the augmented growth process initiated at time m.

    Args:
        values (Iterable): The insertion stream ξ_1, ξ_2, …; plain floats or entries.
        m (int): Initiation time (the probe level).
        stop (StopCondition): Termination rule; an exhausted stream ends the run as well.
        t_checkpoints (Sequence[int]): Times at which to snapshot the process.
        x_checkpoints (Sequence[int]): Columns; the process is snapshotted when the route first reaches each.

    Returns:
        tuple[RouteTrace, list[Snapshot]]: The route and the snapshots in time order.

    Raises:
        InvalidParameterError: If m is negative, exceeds t_max or the stream.
    """
    if m < 0:
        raise InvalidParameterError(f"m must be non-negative, got {m}")
    if stop.t_max < m:
        raise InvalidParameterError(f"t_max={stop.t_max} is smaller than m={m}")
    stream = iter(values)
    tableau = InsertionTableau(strict=False, check_invariants=False)
    insert_box = tableau.insert_box
    rows = tableau.rows

    def row_length(y: int) -> int:
        return len(rows[y]) if y < len(rows) else 0

    # 1. Заполняем обычную таблицу первыми m значениями
    for _ in range(m):
        try:
            insert_box(next(stream))
        except StopIteration as exc:
            raise InvalidParameterError(f"the stream holds fewer than m={m} values") from exc

    # 2. Специальная клетка стартует в нижней строке
    special = (row_length(0), 0)
    events = [(m, special)]
    t_pending = sorted(set(t for t in t_checkpoints if t >= m), reverse=True)
    x_pending = sorted(set(x_checkpoints))
    snapshots: list[Snapshot] = []

    def snapshot(t: int) -> None:
        snapshots.append(Snapshot(t, special, YoungDiagram(tuple(len(r) for r in rows))))

    def take_x_snapshots(t: int) -> None:
        while x_pending and special[0] <= x_pending[-1]:
            x_pending.pop()
            snapshot(t)

    target = stop.target_column
    row_cap = stop.row_cap
    t = m
    if t_pending and t_pending[-1] == t:
        t_pending.pop()
        snapshot(t)
    take_x_snapshots(t)
    reached = target is not None and special[0] <= target
    capped = row_cap is not None and not reached and special[1] >= row_cap

    # 3. Основной цикл: вставка в обычную таблицу и правило сдвига специальной клетки
    while not reached and not capped and t < stop.t_max:
        try:
            value = next(stream)
        except StopIteration:
            break
        t += 1
        box = insert_box(value)
        if box == special:
            special = special_after_step(special, box, row_length)
            events.append((t, special))
            if x_pending:
                take_x_snapshots(t)
            if target is not None and special[0] <= target:
                reached = True
            elif row_cap is not None and special[1] >= row_cap:
                capped = True
        if t_pending and t_pending[-1] == t:
            t_pending.pop()
            snapshot(t)

    censored = target is not None and not reached
    if censored:
        logger.debug("route m=%d censored at t=%d in box %s", m, t, special)
    trace = RouteTrace(m=m, events=events, steps=t, censored=censored, t_max=stop.t_max)
    return trace, snapshots


def trajectory_of_infinity(stream: Iterable[Any], m: int, stop: StopCondition) -> RouteTrace:
    """
    Trajectory of ∞ inserted after ξ_1..ξ_m, as a lazy route trace.

    Args:
        stream (Iterable): Distinct entries ξ_1, ξ_2, ….
        m (int): Number of entries inserted before ∞.
        stop (StopCondition): Termination rule; a stop that never triggers yields a censored trace.

    Returns:
        RouteTrace: Positions of ∞ at t = m and at each of its moves.
    """
    return simulate_route(stream, m, stop)[0]


def sentinel_trajectory(w: Sequence[Any], m: int) -> RouteTrace:
    """
    Trajectory of ∞ computed by inserting an explicit ∞ entry into P(w_1..w_m).

    Raises:
        InvalidParameterError: If m > |w|.
    """
    if not 0 <= m <= len(w):
        raise InvalidParameterError(f"m={m} outside [0, {len(w)}]")
    tableau = InsertionTableau(strict=True)
    for i, value in enumerate(w[:m], start=1):
        tableau.insert(Entry.finite(value, i))
    infinity = Entry.plus_infinity()
    position = tableau.insert(infinity)[-1]
    events = [(m, position)]
    for t in range(m + 1, len(w) + 1):
        tableau.insert(Entry.finite(w[t - 1], t))
        x, y = position
        # ∞ всегда стоит в конце своей строки
        if len(tableau.rows[y]) <= x or tableau.rows[y][x] != infinity:
            position = tableau.position(infinity)
            events.append((t, position))
    return RouteTrace(m=m, events=events, steps=len(w), censored=False, t_max=len(w))


def _probe_for(tableau: InsertionTableau, m: int) -> Any:
    sample = next((e for row in tableau.rows for e in row), None)
    if sample is None or isinstance(sample, Entry):
        return Entry.probe(m)
    return m + 0.5


def row_route(tableau: StandardTableau | InsertionTableau, m: int) -> dict[int, int]:
    """
    𝒯_{↜m+½}: the column of the bumping route in each row it visits.

    Args:
        tableau (StandardTableau | InsertionTableau): The tableau 𝒯 with integer-valued entries.
        m (int): Probe level.

    Returns:
        dict[int, int]: Row index → column of the route in that row.
    """
    if isinstance(tableau, StandardTableau):
        tableau = tableau.to_insertion_tableau()
    working = tableau.copy()
    route = working.insert(_probe_for(working, m))
    return {y: x for x, y in route}


def lazy_route_oracle(w: Sequence[Any], m: int, t_range: Iterable[int] | None = None) -> RouteTrace:
    """
    Lazy bumping route evaluated from the definition, one fresh insertion per time t.

    For each t the box is the one-box difference sh(Q|_{≤t} ← m+½) / sh(Q|_{≤t})
    where Q is the recording tableau of w.

    Raises:
        InvalidParameterError: If m > |w| or the time range leaves [m, |w|].
    """
    if not 0 <= m <= len(w):
        raise InvalidParameterError(f"m={m} outside [0, {len(w)}]")
    times = list(range(m, len(w) + 1) if t_range is None else t_range)
    if not times or min(times) < m or max(times) > len(w):
        raise InvalidParameterError(f"time range must lie within [{m}, {len(w)}]")
    _, q = rsk(w)
    events: list[tuple[int, Box]] = []
    for t in sorted(times):
        restricted = restrict_leq(q, t).to_insertion_tableau()
        box = restricted.insert(Entry.probe(m))[-1]
        if not events or events[-1][1] != box:
            events.append((t, box))
    return RouteTrace(m=m, events=events, steps=max(times), censored=False, t_max=max(times))


def hitting_times(trace: RouteTrace, x_max: int) -> HittingTimes:
    """
    Y_x and T_x for x = 0..x_max read from a trace.

    Columns at or right of the starting column are hit at row 0 and time m;
    columns never reached carry lower bounds and a censored flag.
    """
    if x_max < 0:
        raise InvalidParameterError(f"x_max must be non-negative, got {x_max}")
    start_t = trace.events[0][0]
    start_x = trace.start[0]
    final_row = trace.final[1]
    y_values, t_values, flags = [], [], []
    for x in range(x_max + 1):
        if x >= start_x:
            y_values.append(0)
            t_values.append(start_t)
            flags.append(False)
        elif x in trace.Y:
            y_values.append(trace.Y[x])
            t_values.append(trace.T[x])
            flags.append(False)
        else:
            y_values.append(final_row + 1)
            t_values.append(trace.steps + 1)
            flags.append(True)
    return HittingTimes(Y=y_values, T=t_values, censored=flags)


@dataclass(frozen=True)
class ProjectiveSample:
    z: float
    x: int | None
    known: bool


def projective_route(trace: RouteTrace, m: int, z_grid: Sequence[float]) -> list[ProjectiveSample]:
    """
    Samples of x^proj(z) = 𝒯_{↜m+½}(⌊2m/z⌋) on a grid of positive z.

    Rows beyond the simulated part of the route are flagged unknown, unless the
    route already sits in column 0 and therefore stays there.
    """
    if any(z <= 0 for z in z_grid):
        raise InvalidParameterError("z grid must be positive")
    final_x, final_row = trace.final
    samples = []
    for z in z_grid:
        row = math.floor(2 * m / z)
        if row in trace.y_by_row:
            samples.append(ProjectiveSample(z, trace.y_by_row[row], True))
        elif row > final_row and final_x == 0:
            samples.append(ProjectiveSample(z, 0, True))
        else:
            samples.append(ProjectiveSample(z, None, False))
    return samples


def projective_jump_times(trace: RouteTrace, m: int, k_max: int) -> list[float | None]:
    """
    Times 2m / Y_{k-1} of the k-th jump of x^proj, k = 1..k_max.

    x^proj(z) ≥ k exactly when z > 2m / Y_{k-1}; the time is ∞ when Y_{k-1} = 0
    and None when Y_{k-1} is censored.
    """
    if k_max < 1:
        return []
    hits = hitting_times(trace, k_max - 1)
    times: list[float | None] = []
    for k in range(1, k_max + 1):
        if hits.censored[k - 1]:
            times.append(None)
        elif hits.Y[k - 1] == 0:
            times.append(math.inf)
        else:
            times.append(2 * m / hits.Y[k - 1])
    return times


def bumping_tree(w: Sequence[Any], m_max: int) -> list[RouteTrace]:
    """
    Lazy routes of all probes 0+½, …, m_max+½ through the recording tableau of w.

    Raises:
        InvalidParameterError: If |w| < m_max.
    """
    if m_max < 0 or len(w) < m_max:
        raise InvalidParameterError(f"need 0 ≤ m_max ≤ |w|, got m_max={m_max}, |w|={len(w)}")
    return [
        trajectory_of_infinity(w, m, StopCondition(t_max=len(w)))
        for m in range(m_max + 1)
    ]


def tree_non_crossing(traces: Sequence[RouteTrace]) -> bool:
    """True when, at every common time, a route of a smaller probe is weakly left of a larger one."""
    ordered = sorted(traces, key=lambda tr: tr.m)
    for lower, upper in zip(ordered, ordered[1:]):
        for t in range(upper.m, min(lower.steps, upper.steps) + 1):
            if lower.position_at(t)[0] > upper.position_at(t)[0]:
                return False
    return True
