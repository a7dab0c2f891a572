import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from app.core.exceptions import InvalidCornerError, InvalidPathError, InvalidTableauError
from app.services.augmented import (
    AugmentedDiagram,
    ExtendedNode,
    augmented_shape,
    count_bumps,
    is_bump,
    is_edge,
    lift_extended_path,
    lift_path,
    step,
    step_extended,
)
from app.services.tableau_core import Entry, InsertionTableau, YoungDiagram, rsk, transpose

words = st.lists(st.floats(min_value=0, max_value=1, allow_nan=False), min_size=0, max_size=30, unique=True)


def growth_path(w):
    """Shapes λ^{(0)} ↗ λ^{(1)} ↗ … of the insertion tableaux of the prefixes of w."""
    tableau = InsertionTableau(strict=False)
    path = [tableau.shape]
    for value in w:
        tableau.insert_box(value)
        path.append(tableau.shape)
    return path


def with_infinity(w, m):
    """Insertion tableau of (w_1, …, w_m, ∞, w_{m+1}, …)."""
    return rsk(list(w[:m]) + [Entry.plus_infinity()] + list(w[m:]))[0]


# --- Augmented diagrams ---

def test_special_box_must_be_outer_corner():
    AugmentedDiagram(YoungDiagram((2, 1)), (2, 0))
    with pytest.raises(InvalidCornerError):
        AugmentedDiagram(YoungDiagram((2, 1)), (1, 0))
    with pytest.raises(InvalidCornerError):
        ExtendedNode(-1, YoungDiagram())


def test_full_shape_and_transpose():
    node = AugmentedDiagram(YoungDiagram((2, 1)), (1, 1))
    assert node.full_shape().rows == (2, 2)
    assert node.transpose() == AugmentedDiagram(YoungDiagram((2, 1)), (1, 1))
    node = AugmentedDiagram(YoungDiagram((2, 1)), (2, 0))
    assert transpose(node) == AugmentedDiagram(YoungDiagram((2, 1)), (0, 2))
    assert node.to_extended() == ExtendedNode(2, YoungDiagram((2, 1)))


def test_augmented_shape():
    single = InsertionTableau([[Entry.plus_infinity()]])
    assert augmented_shape(single) == AugmentedDiagram(YoungDiagram(), (0, 0))

    rows = [[Entry.finite(v) for v in row] for row in [[16, 37, 41, 82], [23, 53, 70], [74, 99]]]
    rows[0].append(Entry.plus_infinity())
    assert augmented_shape(InsertionTableau(rows)) == AugmentedDiagram(YoungDiagram((4, 3, 2)), (4, 0))

    with pytest.raises(InvalidTableauError):
        augmented_shape(InsertionTableau([[Entry.finite(1)]]))


# --- Edges of the augmented Young graph ---

def test_edge_examples():
    source = AugmentedDiagram(YoungDiagram((2, 1)), (2, 0))

    # новая клетка совпала со специальной: специальная поднимается на строку выше
    bumped = AugmentedDiagram(YoungDiagram((3, 1)), (1, 1))
    assert is_edge(source, bumped)
    assert is_bump(source, bumped)
    assert step(source, (2, 0)) == bumped

    # новая клетка в другом месте: специальная остаётся
    kept = AugmentedDiagram(YoungDiagram((2, 2)), (2, 0))
    assert is_edge(source, kept)
    assert not is_bump(source, kept)
    assert step(source, (1, 1)) == kept

    # правило нарушено
    assert not is_edge(source, AugmentedDiagram(YoungDiagram((3, 1)), (3, 0)))
    assert not is_edge(source, AugmentedDiagram(YoungDiagram((3, 2)), (3, 0)))


def test_step_rejects_invalid_corner():
    with pytest.raises(InvalidCornerError):
        step(AugmentedDiagram(YoungDiagram((2, 1)), (2, 0)), (0, 1))


def test_step_extended_examples():
    node = ExtendedNode(2, YoungDiagram((2, 2, 1)))
    assert step_extended(node, (2, 0)) == ExtendedNode(2, YoungDiagram((3, 2, 1)))
    assert step_extended(node, (1, 2)) == ExtendedNode(2, YoungDiagram((2, 2, 2)))
    with pytest.raises(InvalidCornerError):
        step_extended(node, (2, 1))


# --- Lifting ---

def test_lift_constant_column_growth():
    path = [YoungDiagram((1,)), YoungDiagram((1, 1)), YoungDiagram((1, 1, 1))]
    lifted = lift_path(AugmentedDiagram(path[0], (1, 0)), path)
    assert [node.special for node in lifted] == [(1, 0)] * 3
    assert count_bumps(lifted) == 0


def test_lift_growth_through_the_special_box():
    path = [YoungDiagram(), YoungDiagram((1,)), YoungDiagram((1, 1)), YoungDiagram((1, 1, 1))]
    lifted = lift_path(AugmentedDiagram(path[0], (0, 0)), path)
    assert [node.special for node in lifted] == [(0, 0), (0, 1), (0, 2), (0, 3)]
    assert count_bumps(lifted) == 3


def test_lift_rejects_non_paths():
    start = AugmentedDiagram(YoungDiagram((1,)), (1, 0))
    with pytest.raises(InvalidPathError):
        lift_path(start, [YoungDiagram((2,))])
    with pytest.raises(InvalidPathError):
        lift_path(start, [YoungDiagram((1,)), YoungDiagram((2, 1))])
    with pytest.raises(InvalidPathError):
        lift_path(start, [])


@given(words, st.integers(0, 30), st.integers(0, 40))
def test_lift_projects_to_the_path(w, m, corner_index):
    path = growth_path(w)[min(m, len(w)):]
    corners = path[0].outer_corners()
    start = AugmentedDiagram(path[0], corners[corner_index % len(corners)])
    lifted = lift_path(start, path)
    assert [node.regular for node in lifted] == path
    assert all(is_edge(a, b) for a, b in zip(lifted, lifted[1:]))
    # каждый сдвиг поднимает специальную клетку ровно на одну строку
    assert count_bumps(lifted) == lifted[-1].y - lifted[0].y


@given(words, st.integers(0, 30))
def test_extended_lift_agrees_with_augmented_lift(w, m):
    path = growth_path(w)
    m = min(m, len(w))
    head = path[m:]
    start = AugmentedDiagram(head[0], (head[0].row_length(0), 0))
    lifted = lift_path(start, head)
    extended = lift_extended_path(start.to_extended(), head)
    assert [node.x for node in extended] == [node.x for node in lifted]
    assert count_bumps(extended) <= count_bumps(lifted)


# --- Augmented shape of tableaux with ∞ ---

@given(words, st.integers(0, 30), st.floats(min_value=0, max_value=1, allow_nan=False))
def test_insertion_moves_infinity_like_a_step(w, m, x):
    assume(x not in w)
    m = min(m, len(w))
    tableau = with_infinity(w, m)
    regular, _ = rsk(w)
    before = augmented_shape(tableau)

    step_index = len(w) + 2
    tableau.insert(Entry.finite(x, step_index))
    new_box = regular.insert(Entry.finite(x, step_index))[-1]
    assert augmented_shape(tableau) == step(before, new_box)


@given(words, st.integers(0, 30))
def test_transpose_duality(w, m):
    m = min(m, len(w))
    direct = augmented_shape(with_infinity(w, m))
    reversed_w = list(reversed(w))
    mirrored = augmented_shape(with_infinity(reversed_w, len(w) - m))
    assert mirrored == direct.transpose()
