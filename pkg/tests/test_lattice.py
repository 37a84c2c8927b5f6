import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tripspan.errors import BudgetExceeded
from tripspan.lattice import (
    canonicalize,
    edge_boundary,
    edge_boundary_degree_sum,
    extremal_uniqueness,
    g_of_set,
    hexagon_ball,
    internal_edges,
    line_profile,
    min_boundary_brute,
    min_boundary_enumerate,
    point_set,
    spiral_family,
    symmetry_classes,
    translate,
    window_stable,
)

coords = st.integers(-6, 6)
point_sets = st.frozensets(st.tuples(coords, coords), min_size=1, max_size=50)
vectors = st.tuples(st.integers(-100, 100), st.integers(-100, 100))


def test_line_profile_examples():
    empty = line_profile([])
    assert (empty.rows, empty.cols, empty.diags) == (frozenset(), frozenset(), frozenset())
    one = line_profile([(0, 0)])
    assert (one.rows, one.cols, one.diags) == ({0}, {0}, {0})
    two = line_profile([(0, 0), (1, 0)])
    assert two.rows == {0} and two.cols == {0, 1} and two.diags == {0, 1}
    assert two.g == 5


def test_g_of_set_examples():
    assert g_of_set([(0, 0)]) == 3
    assert g_of_set([(0, 0), (1, 0), (0, 1)]) == 6
    assert g_of_set(hexagon_ball(1)) == 9


def test_difference_diagonals_not_counted():
    # (0,0) and (1,1) share the line x - y = 0, which is not a line family here
    assert g_of_set([(0, 0), (1, 1)]) == 6


def test_edge_boundary_examples():
    assert edge_boundary([(0, 0)]) == 6
    assert edge_boundary([(0, 0), (1, 0)]) == 10
    assert edge_boundary(hexagon_ball(1)) == 18
    assert internal_edges(hexagon_ball(1)) == 12


def test_hexagon_ball_examples():
    assert hexagon_ball(0) == {(0, 0)}
    assert len(hexagon_ball(1)) == 7
    assert (edge_boundary(hexagon_ball(2)), g_of_set(hexagon_ball(2))) == (30, 15)
    with pytest.raises(ValueError):
        hexagon_ball(-1)


@pytest.mark.parametrize("r", range(11))
def test_hexagon_equality(r):
    H = hexagon_ball(r)
    assert len(H) == 3 * r * r + 3 * r + 1
    assert edge_boundary(H) == 2 * g_of_set(H) == 6 * (2 * r + 1)


def test_canonicalize_examples():
    assert canonicalize([(5, 7)]) == {(0, 0)}
    assert canonicalize([(2, 3), (3, 3)]) == {(0, 0), (1, 0)}
    assert canonicalize([]) == frozenset()


@given(point_sets)
def test_canonicalize_idempotent(P):
    assert canonicalize(canonicalize(P)) == canonicalize(P)


@given(point_sets, vectors)
def test_translation_invariance(P, v):
    Q = translate(P, v)
    assert g_of_set(Q) == g_of_set(P)
    assert edge_boundary(Q) == edge_boundary(P)
    assert canonicalize(Q) == canonicalize(P)


@settings(max_examples=300)
@given(point_sets)
def test_boundary_at_least_twice_g(P):
    assert edge_boundary(P) >= 2 * g_of_set(P)


@given(point_sets)
def test_neighbour_scan_matches_degree_sum(P):
    assert edge_boundary(P) == edge_boundary_degree_sum(P) == 6 * len(P) - 2 * internal_edges(P)


def test_point_set_normalises():
    assert point_set([[1, 2], (1, 2)]) == {(1, 2)}


def test_spiral_examples():
    assert spiral_family(1) == [(0, 0)]
    seq = spiral_family(7)
    assert canonicalize(seq) == canonicalize(hexagon_ball(1))
    assert edge_boundary(seq[:3]) == 12
    with pytest.raises(ValueError):
        spiral_family(0)


def test_spiral_prefixes_nested_and_hexagonal():
    seq = spiral_family(61)
    assert len(set(seq)) == 61
    for r in range(5):
        n = 3 * r * r + 3 * r + 1
        assert canonicalize(seq[:n]) == canonicalize(hexagon_ball(r))


def test_spiral_prefix_boundary_tracks_hexagon_curve():
    seq = spiral_family(100)
    for k in range(1, 101):
        assert edge_boundary(seq[:k]) == 2 * math.ceil(math.sqrt(12 * k - 3))


MINIMA = {1: 6, 2: 10, 3: 12, 4: 14, 5: 16, 6: 18, 7: 18}


@pytest.mark.parametrize("k", range(1, 7))
def test_min_boundary_two_routes(k):
    a = min_boundary_brute(k, 3)
    b = min_boundary_enumerate(k, 3)
    assert a.minimum == b.minimum == MINIMA[k]
    assert a.witnesses == b.witnesses
    assert edge_boundary(spiral_family(k)) == MINIMA[k]


def test_min_boundary_small_examples():
    one = min_boundary_brute(1, 3)
    assert one.minimum == 6 and one.witnesses == {frozenset({(0, 0)})}
    tri = min_boundary_brute(3, 3)
    assert tri.minimum == 12
    assert canonicalize([(0, 0), (1, 0), (0, 1)]) in tri.witnesses


def test_k2_has_one_domino_per_direction():
    sets = extremal_uniqueness(2, 3)
    assert len(sets) == 3
    assert len(symmetry_classes(sets)) == 1


def test_k7_unique_hexagon():
    sets = extremal_uniqueness(7, 3)
    assert sets == [canonicalize(hexagon_ball(1))]


def test_window_stable_small():
    assert window_stable(5, 2)


def test_min_boundary_budget():
    with pytest.raises(BudgetExceeded):
        min_boundary_brute(7, 3, node_budget=100)


def test_min_boundary_workers_agree():
    a = min_boundary_brute(5, 3, workers=1)
    b = min_boundary_brute(5, 3, workers=3)
    assert (a.minimum, a.sorted_witnesses()) == (b.minimum, b.sorted_witnesses())
