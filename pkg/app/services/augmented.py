"""
Augmented Young diagrams: a diagram together with a special box sitting at one
of its outer corners, the augmented Young graph and its extended version on
ℕ0 × 𝕐 in which the special box is remembered by its column only.
"""
import math
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Sequence

from app.core.exceptions import InvalidCornerError, InvalidPathError, InvalidTableauError
from app.services.tableau_core import Box, InsertionTableau, YoungDiagram, entry_value, transpose


@dataclass(frozen=True)
class AugmentedDiagram:
    """
    Pair Λ = (λ, □) of a Young diagram and a special box.

    Attributes:
        regular (YoungDiagram): The diagram λ.
        special (Box): The special box, an outer corner of λ.
    """
    regular: YoungDiagram
    special: Box

    def __post_init__(self):
        object.__setattr__(self, "special", (int(self.special[0]), int(self.special[1])))
        if not self.regular.is_outer_corner(self.special):
            raise InvalidCornerError(
                f"special box {self.special} is not an outer corner of {self.regular.rows}"
            )

    @property
    def x(self) -> int:
        return self.special[0]

    @property
    def y(self) -> int:
        return self.special[1]

    def full_shape(self) -> YoungDiagram:
        """λ together with the special box."""
        return self.regular.add_box(self.special)

    def transpose(self) -> "AugmentedDiagram":
        x, y = self.special
        return AugmentedDiagram(self.regular.transpose(), (y, x))

    def to_extended(self) -> "ExtendedNode":
        return ExtendedNode(self.x, self.regular)


@dataclass(frozen=True)
class ExtendedNode:
    """
    Node (x, λ) of the extended graph; x is a column and need not be a corner of λ.
    """
    x: int
    regular: YoungDiagram

    def __post_init__(self):
        if self.x < 0:
            raise InvalidCornerError(f"column must be non-negative, got {self.x}")


@transpose.register
def _(obj: AugmentedDiagram) -> AugmentedDiagram:
    return obj.transpose()


def special_after_step(special: Box, new_box: Box, row_length: Callable[[int], int]) -> Box:
    """
    Update rule of the special box when a box is added to the regular diagram.

    Args:
        special (Box): Current special box (x, y).
        new_box (Box): The box added to the regular diagram.
        row_length (Callable[[int], int]): Row lengths of the regular diagram.

    Returns:
        Box: The special box unchanged, or, when the new box lands on it,
        the outer corner of the row above.
    """
    if new_box != special:
        return special
    y = special[1] + 1
    return (row_length(y), y)


def augmented_shape(tableau: InsertionTableau) -> AugmentedDiagram:
    """
    sh*(𝒯): the shape of a tableau containing exactly one ∞, with the ∞ box as the special box.

    Raises:
        InvalidTableauError: If the tableau holds no ∞ entry or more than one.
    """
    positions = [
        (x, y)
        for y, row in enumerate(tableau.rows)
        for x, entry in enumerate(row)
        if entry_value(entry) == math.inf
    ]
    if len(positions) != 1:
        raise InvalidTableauError(f"expected exactly one ∞ entry, found {len(positions)}")
    x, y = positions[0]
    rows = [len(row) for row in tableau.rows]
    rows[y] -= 1
    return AugmentedDiagram(YoungDiagram(tuple(rows)), (x, y))


def step(node: AugmentedDiagram, new_box: Box) -> AugmentedDiagram:
    """
    The unique successor of Λ along λ ↗ λ ∪ {new_box}.

    Raises:
        InvalidCornerError: If `new_box` is not an outer corner of λ.
    """
    regular = node.regular.add_box(new_box)
    return AugmentedDiagram(regular, special_after_step(node.special, new_box, regular.row_length))


def is_edge(source: AugmentedDiagram, target: AugmentedDiagram) -> bool:
    """True iff source → target is an edge of the augmented Young graph."""
    try:
        new_box = source.regular.added_box(target.regular)
    except InvalidPathError:
        return False
    return special_after_step(source.special, new_box, target.regular.row_length) == target.special


def is_bump(source: AugmentedDiagram, target: AugmentedDiagram) -> bool:
    """True iff source → target is an edge along which the special box moves."""
    return is_edge(source, target) and source.special != target.special


def step_extended(node: ExtendedNode, new_box: Box) -> ExtendedNode:
    """
    One step in ℕ0 × 𝕐.

    When the new box lies in column x the column jumps to the longest row of
    the enlarged diagram not exceeding x (an empty row counts as 0); otherwise
    x is kept.

    Raises:
        InvalidCornerError: If `new_box` is not an outer corner of the regular diagram.
    """
    regular = node.regular.add_box(new_box)
    if new_box[0] != node.x:
        return ExtendedNode(node.x, regular)
    x_new = max((r for r in regular.rows if r <= node.x), default=0)
    return ExtendedNode(x_new, regular)


def _boxes_along(path: Sequence[YoungDiagram], head: YoungDiagram) -> Iterable[Box]:
    if not path:
        raise InvalidPathError("empty path")
    if path[0] != head:
        raise InvalidPathError(f"path starts at {path[0].rows}, expected {head.rows}")
    for smaller, larger in zip(path, path[1:]):
        yield smaller.added_box(larger)


def lift_path(start: AugmentedDiagram, path: Sequence[YoungDiagram]) -> list[AugmentedDiagram]:
    """
    Lift a growth path λ^{(m)} ↗ λ^{(m+1)} ↗ … to the augmented Young graph.

    Args:
        start (AugmentedDiagram): Initial node; its regular part must be the path head.
        path (Sequence[YoungDiagram]): Consecutive diagrams differing by one box.

    Returns:
        list[AugmentedDiagram]: The unique lifted path, of the same length as `path`.

    Raises:
        InvalidPathError: If `path` is not a path in the Young graph starting at start.regular.
    """
    lifted = [start]
    for box in _boxes_along(path, start.regular):
        lifted.append(step(lifted[-1], box))
    return lifted


def lift_extended_path(start: ExtendedNode, path: Sequence[YoungDiagram]) -> list[ExtendedNode]:
    lifted = [start]
    for box in _boxes_along(path, start.regular):
        lifted.append(step_extended(lifted[-1], box))
    return lifted


def count_bumps(lifted: Sequence[Any]) -> int:
    """Number of edges of a lifted path along which the special box (or column) changes."""
    def _marker(node: Any) -> Any:
        return node.special if isinstance(node, AugmentedDiagram) else node.x
    return sum(1 for a, b in zip(lifted, lifted[1:]) if _marker(a) != _marker(b))
