import math

import numpy as np
import pytest
from scipy.sparse.csgraph import minimum_spanning_tree

from tetratsp.errors import SizeGuardError
from tetratsp.instances import build_modified, build_tetrahedron, from_points
from tetratsp.oracle import (
    OracleMethod,
    held_karp_opt,
    permutation_opt,
    random_tour,
    two_opt_improve,
    two_opt_result,
)
from tetratsp.subtour import solve_subtour_lp
from tetratsp.tours import Tour, closed_form_length, is_simple_polygon, tour_length
from tetratsp.tsplib import Metric


def _branch_and_bound(D):
    """Depth-first search over paths from vertex 0, pruned by the length so
    far plus a spanning tree of the unvisited vertices and both path ends."""
    n = len(D)
    best = [sum(D[i, (i + 1) % n] for i in range(n))]

    def bound(path, rest):
        if not rest:
            return 0.0
        nodes = [path[-1], *rest, 0]
        sub = D[np.ix_(nodes, nodes)].copy()
        sub[0, -1] = sub[-1, 0] = 0.0  # the two ends close through the rest
        return minimum_spanning_tree(sub).sum()

    def rec(path, rest, length):
        if not rest:
            best[0] = min(best[0], length + D[path[-1], 0])
            return
        if length + bound(path, rest) >= best[0] - 1e-12:
            return
        last = path[-1]
        for v in sorted(rest, key=lambda v: D[last, v]):
            rec(path + [v], rest - {v}, length + D[last, v])

    rec([0], set(range(1, n)), 0.0)
    return best[0]


def test_three_points_and_square():
    tri = from_points([(0, 0), (3, 0), (0, 4)])
    assert held_karp_opt(tri).length == 12.0
    assert permutation_opt(tri).length == 12.0
    sq = from_points([(0, 0), (1, 1), (0, 1), (1, 0)])
    r = held_karp_opt(sq)
    assert r.length == 4.0 and r.method is OracleMethod.HELD_KARP
    assert permutation_opt(sq).length == 4.0


def test_tetra_3_2_against_branch_and_bound():
    inst = build_tetrahedron(3, 2)
    assert len(inst) == 13
    hk = held_karp_opt(inst)
    assert hk.length == pytest.approx(_branch_and_bound(inst.distance_matrix), abs=1e-9)
    assert hk.length == pytest.approx(11.098076211353316, abs=1e-12)
    assert is_simple_polygon(hk.tour)


def test_held_karp_equals_permutation(rng):
    for _ in range(25):
        n = int(rng.integers(4, 11))
        inst = from_points(rng.random((n, 2)))
        hk, perm = held_karp_opt(inst), permutation_opt(inst)
        assert hk.length == perm.length
        assert perm.method is OracleMethod.PERMUTATION


def test_held_karp_against_branch_and_bound(rng):
    for _ in range(4):
        inst = from_points(rng.random((11, 2)))
        assert held_karp_opt(inst).length == pytest.approx(_branch_and_bound(inst.distance_matrix), abs=1e-9)


def test_collinear_points_give_twice_the_span():
    inst = from_points([(x, 0.0) for x in (0, 3, 1, 7, 2, 5)])
    assert held_karp_opt(inst).length == 14.0
    assert permutation_opt(inst).length == 14.0


def test_size_guards():
    with pytest.raises(SizeGuardError):
        held_karp_opt(from_points(np.zeros((21, 2)) + np.arange(21)[:, None]))
    with pytest.raises(SizeGuardError):
        permutation_opt(from_points(np.arange(22).reshape(11, 2)))


def test_euc2d_metric_on_oracles(rng):
    inst = from_points(rng.random((9, 2)))
    hk = held_karp_opt(inst, Metric.EUC2D)
    assert hk.length == int(hk.length)
    assert hk.length == permutation_opt(inst, Metric.EUC2D).length


def test_optimum_at_least_subtour_bound(rng):
    for _ in range(10):
        inst = from_points(rng.random((int(rng.integers(5, 13)), 2)))
        assert held_karp_opt(inst).length >= solve_subtour_lp(inst).objective - 1e-9


# -- 2-opt --------------------------------------------------------------------

def test_two_opt_fixes_a_bowtie():
    inst = from_points([(0, 0), (0, 1), (1, 1), (1, 0)])
    res = two_opt_result(Tour(inst, (0, 2, 1, 3)))
    assert res.length == 4.0 and res.method is OracleMethod.TWO_OPT


def test_two_opt_keeps_optimal_tour():
    pts = [(math.cos(t), math.sin(t)) for t in np.linspace(0, 2 * math.pi, 12, endpoint=False)]
    inst = from_points(pts)
    t = Tour(inst, tuple(range(12)))
    assert two_opt_improve(t).order == t.order


def test_two_opt_never_lengthens(rng):
    for _ in range(20):
        inst = from_points(rng.random((int(rng.integers(5, 60)), 2)))
        t = random_tour(inst, rng)
        improved = two_opt_improve(t)
        assert sorted(improved.order) == list(range(len(inst)))
        assert tour_length(improved) <= tour_length(t) + 1e-12


def test_two_opt_restarts_land_near_optimum(rng):
    inst = from_points(rng.random((9, 2)))
    opt = held_karp_opt(inst).length
    best = min(two_opt_result(random_tour(inst, rng)).length for _ in range(20))
    assert best >= opt - 1e-12
    assert best == pytest.approx(opt, rel=0.05)


def test_two_opt_does_not_beat_closed_form(rng):
    inst = build_modified(48, 24)
    closed = closed_form_length(inst)
    lengths = [two_opt_result(random_tour(inst, rng)).length for _ in range(100)]
    assert min(lengths) >= closed - 1e-9
