"""
Seeded uniform streams, the Plancherel growth process λ^{(n)} = RSK(ξ_1, …, ξ_n)
and the augmented Plancherel growth process.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from app.core.constants import STREAM_BLOCK_SIZE
from app.core.exceptions import InvalidParameterError
from app.services.augmented import ExtendedNode
from app.services.bumping import RouteTrace, Snapshot, StopCondition, simulate_route
from app.services.tableau_core import InsertionTableau, YoungDiagram

logger = logging.getLogger(__name__)

INFINITE_ROW = math.inf


class SeededStream:
    """
    Stream of i.i.d. U(0,1) reals owned by one trial.

    The value at position i depends only on (master_seed, trial_index, lane, i),
    never on the block size or on how trials are scheduled.

    Attributes:
        master_seed (int): Seed of the whole experiment.
        trial_index (int): Index of the trial owning the stream.
        lane (int): Independent sub-stream of the trial.
        counter (int): Number of values handed out so far.
    """

    def __init__(self, master_seed: int, trial_index: int = 0, lane: int = 0,
                 block_size: int = STREAM_BLOCK_SIZE):
        if master_seed < 0 or trial_index < 0 or lane < 0:
            raise InvalidParameterError("seed, trial index and lane must be non-negative")
        self.master_seed = master_seed
        self.trial_index = trial_index
        self.lane = lane
        self.counter = 0
        self._block_size = block_size
        sequence = np.random.SeedSequence(entropy=master_seed, spawn_key=(trial_index, lane))
        self._generator = np.random.Generator(np.random.PCG64(sequence))
        self._buffer: list[float] = []
        self._position = 0

    def __iter__(self) -> Iterator[float]:
        return self

    def __next__(self) -> float:
        if self._position == len(self._buffer):
            self._buffer = self._generator.random(self._block_size).tolist()
            self._position = 0
        value = self._buffer[self._position]
        self._position += 1
        self.counter += 1
        return value

    def take(self, n: int) -> list[float]:
        return [next(self) for _ in range(n)]


@dataclass
class GrowthRowTrace:
    """
    Rows R^{(t)} of the boxes created at steps start < t ≤ end, reduced to {0..k, ∞}.

    Attributes:
        k (int): Cutoff; rows above k are recorded as INFINITE_ROW.
        start (int): Steps up to `start` are not recorded.
        rows (list[float]): One reduced row index per recorded step.
        final (YoungDiagram): The diagram at the end of the growth.
    """
    k: int
    start: int
    rows: list[float] = field(default_factory=list)
    final: YoungDiagram = field(default_factory=YoungDiagram)

    @property
    def end(self) -> int:
        return self.start + len(self.rows)

    def steps(self) -> range:
        return range(self.start + 1, self.end + 1)

    def counts(self) -> list[int]:
        """Number of recorded steps whose box landed in row r, r = 0..k."""
        tally = [0] * (self.k + 1)
        for r in self.rows:
            if r != INFINITE_ROW:
                tally[int(r)] += 1
        return tally

    def weighted_counts(self) -> list[float]:
        """Σ √t · 1{R^{(t)} = r} over recorded steps, r = 0..k."""
        tally = [0.0] * (self.k + 1)
        for t, r in zip(self.steps(), self.rows):
            if r != INFINITE_ROW:
                tally[int(r)] += math.sqrt(t)
        return tally


def _reduce_row(row: int, k: int) -> float:
    return row if row <= k else INFINITE_ROW


def plancherel_growth(
        n: int,
        seed: int,
        trace_rows: int | None = None,
        window: tuple[int, int] | None = None,
        trial_index: int = 0
) -> tuple[YoungDiagram, GrowthRowTrace | None]:
    """
    Run the Plancherel growth process for n steps.

    Args:
        n (int): Number of insertions.
        seed (int): Master seed of the uniform stream.
        trace_rows (int | None): Cutoff k of the growth-row trace; None disables tracing.
        window (tuple[int, int] | None): Steps (start, end] to trace, defaults to (0, n].
        trial_index (int): Trial owning the stream.

    Returns:
        tuple[YoungDiagram, GrowthRowTrace | None]: λ^{(n)} and the optional trace.

    Raises:
        InvalidParameterError: If n is negative or the window leaves [0, n].
    """
    if n < 0:
        raise InvalidParameterError(f"n must be non-negative, got {n}")
    start, end = window if window is not None else (0, n)
    if not 0 <= start <= end <= n:
        raise InvalidParameterError(f"window ({start}, {end}] must lie within (0, {n}]")
    stream = SeededStream(seed, trial_index)
    tableau = InsertionTableau(strict=False, check_invariants=False)
    insert_box = tableau.insert_box
    trace = GrowthRowTrace(trace_rows, start) if trace_rows is not None else None

    for t in range(1, n + 1):
        _, row = insert_box(next(stream))
        if trace is not None and start < t <= end:
            trace.rows.append(_reduce_row(row, trace_rows))

    diagram = tableau.shape
    if trace is not None:
        trace.final = diagram
    return diagram, trace


def plancherel_sample(n: int, seed: int, trial_index: int = 0) -> YoungDiagram:
    """A Plancherel-distributed Young diagram with n boxes."""
    return plancherel_growth(n, seed, trial_index=trial_index)[0]


def augmented_growth(
        m: int,
        seed: int,
        stop: StopCondition,
        x_checkpoints: Sequence[int] = (),
        t_checkpoints: Sequence[int] = (),
        trial_index: int = 0,
        lane: int = 0
) -> tuple[RouteTrace, list[Snapshot]]:
    """
    Augmented Plancherel growth process initiated at time m.

    The first m uniforms build λ^{(m)}, the special box is placed at the
    outer corner of the bottom row and every further insertion moves it by
    the augmented-step rule.

    Args:
        m (int): Initiation time.
        seed (int): Master seed.
        stop (StopCondition): Termination rule; censored traces are flagged, never raised.
        x_checkpoints (Sequence[int]): Snapshot the process when the special box first reaches these columns.
        t_checkpoints (Sequence[int]): Snapshot the process at these times.
        trial_index (int): Trial owning the stream.
        lane (int): Sub-stream of the trial.

    Returns:
        tuple[RouteTrace, list[Snapshot]]: Event trace of the special box and snapshots.
    """
    stream = SeededStream(seed, trial_index, lane)
    return simulate_route(stream, m, stop, t_checkpoints=t_checkpoints, x_checkpoints=x_checkpoints)


def special_row_from_growth_rows(rows: Iterable[float], k: int) -> float:
    """
    Row of the special box (reduced to {0..k, ∞}) after the growth rows R^{(m+1)}, …, R^{(s)}.

    The special box starts in row 0 and climbs one row exactly when the new
    box lands in its current row.
    """
    y: float = 0
    for r in rows:
        if y != INFINITE_ROW and r == y:
            y += 1
            if y > k:
                y = INFINITE_ROW
    return y


def extended_growth(n: int, n_end: int, x: int, seed: int, trial_index: int = 0) -> ExtendedNode:
    """
    Extended augmented process on ℕ0 × 𝕐 started at time n from (x, λ^{(n)}).

    Args:
        n (int): Starting time; λ^{(n)} is Plancherel distributed.
        n_end (int): Final time.
        x (int): Initial column, not necessarily an outer corner of λ^{(n)}.
        seed (int): Master seed.
        trial_index (int): Trial owning the stream.

    Returns:
        ExtendedNode: The state at time n_end.
    """
    if not 0 <= n <= n_end:
        raise InvalidParameterError(f"need 0 ≤ n ≤ n_end, got n={n}, n_end={n_end}")
    if x < 0:
        raise InvalidParameterError(f"column must be non-negative, got {x}")
    stream = SeededStream(seed, trial_index)
    tableau = InsertionTableau(strict=False, check_invariants=False)
    insert_box = tableau.insert_box
    rows = tableau.rows
    for _ in range(n):
        insert_box(next(stream))
    for _ in range(n, n_end):
        box_x, box_y = insert_box(next(stream))
        if box_x == x:
            # строки выше новой клетки не длиннее x, строки ниже длиннее
            x = len(rows[box_y + 1]) if box_y + 1 < len(rows) else 0
    return ExtendedNode(x, tableau.shape)
