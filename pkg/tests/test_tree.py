import threading
from fractions import Fraction
from itertools import combinations, islice

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from borelforge.exact_arith import TowerForm
from borelforge.thick_family import family_indices, marker_index, trimmed_member
from borelforge.tree import (
    SEPARATION,
    Branch,
    ChildRule,
    ConstructionTree,
    CoordinateGrid,
    SelectorExhausted,
    ball,
    child,
    decode_child_index,
    disjointness_certificate,
    encode_child_index,
    eval_coordinate,
    lazy_point,
    node_at,
    root,
    tuple_decode,
    tuple_encode,
)

small_paths = st.lists(st.integers(0, 12), max_size=3)


def brute_grid(j, n, r, exclude):
    """Every 2**-r grid point of the first r + 1 admissible intervals."""
    first = marker_index(j, n)
    idx = list(islice((a for a in family_indices(j) if a >= first), r + 1))
    out = set()
    left = 2 ** (2 ** first) - first
    for a in idx:
        t = 2 ** (2 ** a)
        for g in range(2 * a * 2 ** r + 1):
            q = t - a + Fraction(g, 2 ** r)
            if q == left:
                continue
            if exclude and left < q < left + SEPARATION:
                continue
            out.add(q)
    return out


# -- examples -----------------------------------------------------------------

def test_first_children_of_root():
    c0 = child(root(), 0)
    assert c0.prefix() == [Fraction(7, 2), 3, Fraction(7, 2), Fraction(507, 2)]
    assert (c0.level, c0.marker_coord) == (4, 1)
    c1 = child(root(), 1)
    assert c1.window == {0: Fraction(7, 2), 1: Fraction(7, 2)}
    assert (c1.level, c1.marker_coord) == (4, 2)


def test_certificate_for_first_siblings():
    cert = disjointness_certificate(root(), 0, 1)
    assert (cert.coordinate, cert.gap) == (1, Fraction(1, 2))
    with pytest.raises(ValueError):
        disjointness_certificate(root(), 2, 2)


def test_zero_branch_coordinates():
    assert eval_coordinate((), 0) == Fraction(7, 2)
    assert eval_coordinate((), 1) == 3
    assert eval_coordinate(Branch([0, 0]), 1) == 3


def test_branch_strips_trailing_zeros():
    assert Branch([1, 0, 0]) == Branch([1])
    assert Branch([1, 0, 2])[5] == 0
    assert Branch([1, 0, 2]).prefix(4) == (1, 0, 2, 0)
    with pytest.raises(ValueError):
        Branch([-1])


def test_grid_exhaustion_is_reported():
    grid = CoordinateGrid(0, 0, 1)
    with pytest.raises(SelectorExhausted):
        grid[len(grid)]


def test_many_root_children_build():
    for i in list(range(200)) + [5000, 123456]:
        c = child(root(), i)
        assert c.level > i


def test_concurrent_child_requests_share_one_node():
    tree = ConstructionTree()
    got = []

    def work():
        got.append(tree.child(tree.root(), 77))

    threads = [threading.Thread(target=work) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(node is got[0] for node in got)


# -- properties ---------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2), st.integers(0, 6), st.integers(1, 3), st.booleans())
def test_grid_matches_enumeration(j, n, r, exclude):
    grid = CoordinateGrid(j, n, r, exclude)
    values = [TowerForm.coerce(v).expand() for v in grid.values()]
    assert len(values) == len(set(values))
    assert set(values) == brute_grid(j, n, r, exclude)
    for c in (0, len(grid) // 2, len(grid) - 1):
        assert grid.index(grid[c]) == c


@given(st.integers(0, 10 ** 12))
def test_child_index_coding_round_trip(i):
    assert encode_child_index(decode_child_index(i)) == i


@given(st.lists(st.integers(0, 10 ** 6), min_size=1, max_size=5))
def test_tuple_coding_round_trip(items):
    assert tuple_decode(tuple_encode(items), len(items)) == tuple(items)


@settings(max_examples=60, deadline=None)
@given(small_paths, st.integers(0, 12))
def test_child_extends_parent_and_lies_in_thick_set(path, i):
    s = node_at(path)
    c = child(s, i)
    assert c.level > s.level + i
    assert c.prefix(s.level) == s.prefix()
    for n in range(s.level, c.level):
        v = c.value(n)
        if n == c.marker_coord:
            assert TowerForm.coerce(v) + Fraction(1, 2) > n
        else:
            assert trimmed_member(s.family, n, v)


@settings(max_examples=60, deadline=None)
@given(small_paths, st.integers(0, 30), st.integers(0, 30))
def test_siblings_are_separated(path, i, i2):
    if i == i2:
        return
    s = node_at(path)
    cert = disjointness_certificate(s, i, i2)
    assert TowerForm.coerce(cert.gap) >= SEPARATION
    a, b = child(s, i), child(s, i2)
    # a 1/4 gap beats the sum of two radii 2**-l with l >= 4
    assert not ball(a).contains(b.value) or cert.coordinate >= min(a.level, b.level)


@settings(max_examples=40, deadline=None)
@given(small_paths, st.integers(1, 3), st.data())
def test_density_each_grid_target_is_hit(path, r, data):
    s = node_at(path)
    grids = [CoordinateGrid(s.family, s.level + d, r, exclude_near_marker=True) for d in range(2)]
    pos = [data.draw(st.integers(0, min(g.size() - 1, 200))) for g in grids]
    i = encode_child_index(ChildRule(tuple_encode(pos), 2, r))
    c = ConstructionTree().node(list(path) + [i])
    assert [c.value(s.level + d) for d in range(2)] == [g[p] for g, p in zip(grids, pos)]


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 6), max_size=4), st.integers(0, 4))
def test_limit_point_lies_in_every_prefix_ball(stem, depth):
    b = Branch(stem)
    point = lazy_point(b)
    s = node_at(b.prefix(depth))
    assert ball(s).contains(point)
    assert all(point(k) == s.value(k) for k in range(s.level))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 5), max_size=3), st.lists(st.integers(0, 5), max_size=3))
def test_distinct_nodes_at_same_depth_have_disjoint_balls(p1, p2):
    n = max(len(p1), len(p2))
    p1, p2 = p1 + [0] * (n - len(p1)), p2 + [0] * (n - len(p2))
    if p1 == p2:
        return
    a, b = node_at(p1), node_at(p2)
    k = next(k for k in range(n) if p1[k] != p2[k])
    cert = disjointness_certificate(node_at(p1[:k]), p1[k], p2[k])
    assert abs(TowerForm.coerce(a.value(cert.coordinate)) - b.value(cert.coordinate)) >= SEPARATION


def test_eval_is_deterministic_across_trees():
    fresh = ConstructionTree()
    for path in ([], [0, 1], [3, 0, 2]):
        assert fresh.node(path).prefix() == node_at(path).prefix()
