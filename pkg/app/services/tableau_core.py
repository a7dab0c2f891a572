"""
Young diagrams, tableaux with totally ordered entries, Schensted row insertion
and the Robinson-Schensted-Knuth correspondence.

Diagrams are drawn in the French convention: row 0 is the bottom row and a box
is addressed by zero-based coordinates (x, y) = (column, row).
"""
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from enum import IntEnum
from functools import lru_cache, singledispatch, total_ordering
from typing import Any, Iterable, Iterator, Sequence

from app.core.config import BUMP_CHECK_INVARIANTS
from app.core.exceptions import (
    DuplicateEntryError,
    InvalidCornerError,
    InvalidDiagramError,
    InvalidParameterError,
    InvalidPathError,
    InvalidTableauError,
)

Box = tuple[int, int]


@dataclass(frozen=True)
class YoungDiagram:
    """
    Young diagram given by its row lengths λ_0 ≥ λ_1 ≥ … (bottom row first).

    Attributes:
        rows (tuple[int, ...]): Row lengths without trailing zeros.
    """
    rows: tuple[int, ...] = ()

    def __post_init__(self):
        rows = tuple(int(r) for r in self.rows)
        if any(r < 0 for r in rows):
            raise InvalidDiagramError(f"negative row length in {rows}")
        if any(rows[i] < rows[i + 1] for i in range(len(rows) - 1)):
            raise InvalidDiagramError(f"row lengths {rows} are not weakly decreasing")
        while rows and rows[-1] == 0:
            rows = rows[:-1]
        object.__setattr__(self, "rows", rows)

    @property
    def size(self) -> int:
        """Number of boxes |λ|."""
        return sum(self.rows)

    @property
    def height(self) -> int:
        """Number of non-empty rows."""
        return len(self.rows)

    @property
    def width(self) -> int:
        return self.rows[0] if self.rows else 0

    def row_length(self, y: int) -> int:
        return self.rows[y] if 0 <= y < len(self.rows) else 0

    def boxes(self) -> Iterator[Box]:
        for y, length in enumerate(self.rows):
            for x in range(length):
                yield (x, y)

    def outer_corners(self) -> list[Box]:
        """
        Boxes which can be added keeping a valid diagram, from the bottom row upwards.

        Returns:
            list[Box]: One box per row y with λ_y < λ_{y-1}, plus the box opening a new row.
        """
        corners = []
        for y in range(len(self.rows) + 1):
            if y == 0 or self.row_length(y) < self.row_length(y - 1):
                corners.append((self.row_length(y), y))
        return corners

    def is_outer_corner(self, box: Box) -> bool:
        x, y = box
        if y < 0 or x != self.row_length(y):
            return False
        return y == 0 or self.row_length(y - 1) > x

    def add_box(self, box: Box) -> "YoungDiagram":
        """
        Return the diagram with one more box.

        Raises:
            InvalidCornerError: If `box` is not an outer corner of the diagram.
        """
        if not self.is_outer_corner(box):
            raise InvalidCornerError(f"{box} is not an outer corner of {self.rows}")
        x, y = box
        rows = list(self.rows)
        if y == len(rows):
            rows.append(1)
        else:
            rows[y] = x + 1
        return YoungDiagram(tuple(rows))

    def added_box(self, larger: "YoungDiagram") -> Box:
        """
        The unique box of the skew diagram `larger` / `self`.

        Raises:
            InvalidPathError: If `larger` is not obtained from `self` by adding exactly one box.
        """
        if larger.size != self.size + 1:
            raise InvalidPathError(f"{larger.rows} is not a one-box extension of {self.rows}")
        diff = [y for y in range(larger.height) if larger.row_length(y) != self.row_length(y)]
        if len(diff) != 1 or larger.row_length(diff[0]) != self.row_length(diff[0]) + 1:
            raise InvalidPathError(f"{larger.rows} is not a one-box extension of {self.rows}")
        y = diff[0]
        return (self.row_length(y), y)

    def transpose(self) -> "YoungDiagram":
        if not self.rows:
            return YoungDiagram()
        return YoungDiagram(tuple(sum(1 for r in self.rows if r > x) for x in range(self.rows[0])))


class EntryKind(IntEnum):
    FINITE = 0
    PROBE = 1
    PLUS_INFINITY = 2


@total_ordering
@dataclass(frozen=True)
class Entry:
    """
    Totally ordered tableau entry.

    A finite entry is ordered by (value, tiebreak); a probe of level k sits
    strictly between the integers k and k+1; the plus-infinity entry exceeds
    everything.
    """
    kind: EntryKind
    value: float = 0.0
    tiebreak: int = 0

    def __post_init__(self):
        if self.kind == EntryKind.FINITE and not math.isfinite(self.value):
            raise InvalidParameterError(f"finite entry with non-finite value {self.value}")

    @classmethod
    def finite(cls, value: float, tiebreak: int = 0) -> "Entry":
        return cls(EntryKind.FINITE, float(value), int(tiebreak))

    @classmethod
    def probe(cls, level: int) -> "Entry":
        return cls(EntryKind.PROBE, int(level) + 0.5, 0)

    @classmethod
    def plus_infinity(cls) -> "Entry":
        return cls(EntryKind.PLUS_INFINITY, math.inf, 0)

    @property
    def is_infinite(self) -> bool:
        return self.kind == EntryKind.PLUS_INFINITY

    def _rank(self) -> tuple:
        if self.kind == EntryKind.PLUS_INFINITY:
            return (1, 0.0, 0, 0)
        if self.kind == EntryKind.PROBE:
            return (0, self.value, -1, 0)
        return (0, self.value, 0, self.tiebreak)

    def __lt__(self, other: "Entry") -> bool:
        if not isinstance(other, Entry):
            return NotImplemented
        return self._rank() < other._rank()

    def __repr__(self) -> str:
        if self.kind == EntryKind.PLUS_INFINITY:
            return "Entry(∞)"
        if self.kind == EntryKind.PROBE:
            return f"Entry(probe {int(self.value - 0.5)}+½)"
        return f"Entry({self.value:g}#{self.tiebreak})"


def as_entry(value: Any, index: int = 0) -> Entry:
    """Wrap a plain number as a finite entry; entries pass through unchanged."""
    if isinstance(value, Entry):
        return value
    return Entry.finite(float(value), index)


def entry_value(entry: Any) -> float:
    """Numeric view of an entry: the value itself, m+½ for a probe, ∞ for the sentinel."""
    if isinstance(entry, Entry):
        return entry.value
    return entry


class InsertionTableau:
    """
    Tableau whose rows strictly increase left-to-right and whose columns strictly increase upwards.

    Entries are any mutually comparable objects: `Entry` instances for the
    generic API, plain floats in the simulation kernels. With `strict=True`
    the tableau remembers its entries and rejects exact duplicates; without it
    an equal entry is placed to the right of the existing one, which realizes
    the (value, insertion index) order.
    """

    def __init__(
            self,
            rows: Iterable[Sequence[Any]] = (),
            strict: bool = True,
            check_invariants: bool | None = None
    ):
        self.rows: list[list[Any]] = [list(r) for r in rows if len(r) > 0]
        self.strict = strict
        self.check_invariants = BUMP_CHECK_INVARIANTS if check_invariants is None else check_invariants
        self._members: set | None = None
        if strict:
            self._members = {e for row in self.rows for e in row}
            if len(self._members) != sum(len(r) for r in self.rows):
                raise DuplicateEntryError("tableau rows contain repeated entries")
        self.validate()

    def __len__(self) -> int:
        return sum(len(row) for row in self.rows)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, InsertionTableau):
            return NotImplemented
        return self.rows == other.rows

    def __repr__(self) -> str:
        return f"InsertionTableau({self.to_lists()})"

    @property
    def shape(self) -> YoungDiagram:
        return YoungDiagram(tuple(len(row) for row in self.rows))

    def copy(self) -> "InsertionTableau":
        clone = InsertionTableau.__new__(InsertionTableau)
        clone.rows = [row[:] for row in self.rows]
        clone.strict = self.strict
        clone.check_invariants = self.check_invariants
        clone._members = set(self._members) if self._members is not None else None
        return clone

    def entry(self, box: Box) -> Any:
        x, y = box
        return self.rows[y][x]

    def position(self, value: Any) -> Box | None:
        for y, row in enumerate(self.rows):
            x = bisect_right(row, value) - 1
            if x >= 0 and row[x] == value:
                return (x, y)
        return None

    def to_lists(self) -> list[list[float]]:
        """Rows as plain numbers (see `entry_value`)."""
        return [[entry_value(e) for e in row] for row in self.rows]

    def validate(self) -> None:
        """
        Check the row, column and shape invariants.

        Raises:
            InvalidTableauError: If any invariant is violated.
        """
        for y, row in enumerate(self.rows):
            if any(not row[i] < row[i + 1] for i in range(len(row) - 1)):
                raise InvalidTableauError(f"row {y} is not strictly increasing")
            if y > 0:
                below = self.rows[y - 1]
                if len(row) > len(below):
                    raise InvalidTableauError(f"row {y} is longer than row {y - 1}")
                if any(not below[x] < row[x] for x in range(len(row))):
                    raise InvalidTableauError(f"a column is not strictly increasing at row {y}")

    def insert(self, a: Any) -> list[Box]:
        """
        Schensted row insertion in place.

        Args:
            a: The entry to insert.

        Returns:
            list[Box]: The bumping route, one box per visited row, ending with the new box.

        Raises:
            DuplicateEntryError: In strict mode, if `a` is already present.
        """
        if self._members is not None:
            if a in self._members:
                raise DuplicateEntryError(f"{a!r} is already in the tableau")
            self._members.add(a)
        rows = self.rows
        route = []
        y = 0
        while True:
            if y == len(rows):
                rows.append([a])
                route.append((0, y))
                break
            row = rows[y]
            x = bisect_right(row, a)
            route.append((x, y))
            if x == len(row):
                row.append(a)
                break
            a, row[x] = row[x], a
            y += 1
        if self.check_invariants:
            self.validate()
        return route

    def insert_box(self, a: Any) -> Box:
        """Row insertion in place returning only the newly created box."""
        if self._members is not None:
            return self.insert(a)[-1]
        rows = self.rows
        y = 0
        n_rows = len(rows)
        while y < n_rows:
            row = rows[y]
            x = bisect_right(row, a)
            if x == len(row):
                row.append(a)
                return (x, y)
            a, row[x] = row[x], a
            y += 1
        rows.append([a])
        return (0, y)


@dataclass
class StandardTableau:
    """
    Tableau filled with distinct positive integers, increasing along rows and up columns.

    Recording tableaux are standard (entries 1..n); restrictions Q|_{≤t} are
    standard tableaux of a smaller size.
    """
    rows: list[list[int]] = field(default_factory=list)

    def __post_init__(self):
        self.rows = [list(map(int, r)) for r in self.rows if len(r) > 0]
        InsertionTableau(self.rows, strict=True)

    @property
    def shape(self) -> YoungDiagram:
        return YoungDiagram(tuple(len(row) for row in self.rows))

    def __len__(self) -> int:
        return sum(len(row) for row in self.rows)

    def entry(self, box: Box) -> int:
        x, y = box
        return self.rows[y][x]

    def get(self, box: Box) -> int | None:
        x, y = box
        if 0 <= y < len(self.rows) and 0 <= x < len(self.rows[y]):
            return self.rows[y][x]
        return None

    def position(self, value: int) -> Box | None:
        """Pos_s(𝒯): the box holding `value`."""
        for y, row in enumerate(self.rows):
            x = bisect_right(row, value) - 1
            if x >= 0 and row[x] == value:
                return (x, y)
        return None

    def is_complete(self) -> bool:
        """True when the entries are exactly {1, …, n}."""
        values = sorted(v for row in self.rows for v in row)
        return values == list(range(1, len(values) + 1))

    def restrict_leq(self, t: int) -> "StandardTableau":
        return restrict_leq(self, t)

    def to_insertion_tableau(self) -> InsertionTableau:
        return InsertionTableau(
            [[Entry.finite(v, 0) for v in row] for row in self.rows], strict=True
        )


def row_insert(tableau: InsertionTableau, a: Any) -> tuple[InsertionTableau, list[Box]]:
    """
    Schensted row insertion 𝒯 ← a without modifying the input.

    Args:
        tableau (InsertionTableau): The tableau 𝒯.
        a: Entry to insert; plain numbers are wrapped as finite entries.

    Returns:
        tuple[InsertionTableau, list[Box]]: The tableau 𝒯 ← a and the full bumping route.
    """
    result = tableau.copy()
    route = result.insert(as_entry(a, len(tableau)) if tableau.strict else a)
    return result, route


def rsk(w: Sequence[Any]) -> tuple[InsertionTableau, StandardTableau]:
    """
    Robinson-Schensted-Knuth correspondence by iterated row insertion.

    Args:
        w (Sequence): Pairwise distinct entries (plain numbers are wrapped with their index as tiebreak).

    Returns:
        tuple[InsertionTableau, StandardTableau]: The insertion tableau P(w) and the recording tableau Q(w).
    """
    p = InsertionTableau()
    q_rows: list[list[int]] = []
    for step, value in enumerate(w, start=1):
        x, y = p.insert(as_entry(value, step))[-1]
        if y == len(q_rows):
            q_rows.append([])
        q_rows[y].append(step)
        assert len(q_rows[y]) == x + 1
    return p, StandardTableau(q_rows)


def rsk_shape(w: Sequence[Any]) -> YoungDiagram:
    return rsk(w)[0].shape


def recording_tableau(values: Iterable[float]) -> StandardTableau:
    """Q(w) for a long sequence of plain floats, built on the insert_box path."""
    tableau = InsertionTableau(strict=False, check_invariants=False)
    q_rows: list[list[int]] = []
    for step, value in enumerate(values, start=1):
        _, y = tableau.insert_box(value)
        if y == len(q_rows):
            q_rows.append([])
        q_rows[y].append(step)
    return StandardTableau(q_rows)


def restrict_leq(q: StandardTableau, t: int) -> StandardTableau:
    """𝒯|_{≤t}: keep only the boxes with entries at most t."""
    if t < 0:
        raise InvalidParameterError(f"t must be non-negative, got {t}")
    return StandardTableau([[v for v in row if v <= t] for row in q.rows])


def ranks(w: Sequence[Any]) -> list[int]:
    """Relative order of a sequence as a permutation of 1..n (ties broken by position)."""
    order = sorted(range(len(w)), key=lambda i: (w[i], i))
    result = [0] * len(w)
    for rank, i in enumerate(order, start=1):
        result[i] = rank
    return result


def inverse_permutation(sigma: Sequence[int]) -> list[int]:
    inverse = [0] * len(sigma)
    for i, v in enumerate(sigma, start=1):
        inverse[v - 1] = i
    return inverse


def schuetzenberger_check(sigma: Sequence[int]) -> bool:
    """
    Check P(σ) = Q(σ⁻¹) entrywise for a permutation σ of 1..n.
    """
    if sorted(sigma) != list(range(1, len(sigma) + 1)):
        raise InvalidParameterError(f"{list(sigma)} is not a permutation of 1..{len(sigma)}")
    p, _ = rsk(sigma)
    _, q_inverse = rsk(inverse_permutation(sigma))
    return [[int(v) for v in row] for row in p.to_lists()] == q_inverse.rows


@singledispatch
def transpose(obj: Any) -> Any:
    """Exchange rows and columns of a diagram or a tableau."""
    raise TypeError(f"cannot transpose {type(obj).__name__}")


@transpose.register
def _(obj: YoungDiagram) -> YoungDiagram:
    return obj.transpose()


def _transpose_rows(rows: list[list[Any]]) -> list[list[Any]]:
    if not rows:
        return []
    return [[row[x] for row in rows if len(row) > x] for x in range(len(rows[0]))]


@transpose.register
def _(obj: InsertionTableau) -> InsertionTableau:
    return InsertionTableau(_transpose_rows(obj.rows), strict=obj.strict,
                            check_invariants=obj.check_invariants)


@transpose.register
def _(obj: StandardTableau) -> StandardTableau:
    return StandardTableau(_transpose_rows(obj.rows))


def partitions(n: int) -> list[YoungDiagram]:
    """All Young diagrams with n boxes, in reverse lexicographic order of rows."""
    def _parts(remaining: int, largest: int) -> Iterator[tuple[int, ...]]:
        if remaining == 0:
            yield ()
            return
        for first in range(min(remaining, largest), 0, -1):
            for rest in _parts(remaining - first, first):
                yield (first,) + rest
    return [YoungDiagram(p) for p in _parts(n, n)]


@lru_cache(maxsize=None)
def _dimension(rows: tuple[int, ...]) -> int:
    diagram = YoungDiagram(rows)
    columns = diagram.transpose()
    hooks = 1
    for x, y in diagram.boxes():
        hooks *= (diagram.row_length(y) - x) + (columns.row_length(x) - y) - 1
    return math.factorial(diagram.size) // hooks


def dimension(diagram: YoungDiagram) -> int:
    """Number of standard tableaux of the given shape (hook-length formula)."""
    return _dimension(diagram.rows)
