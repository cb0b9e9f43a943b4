import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hhskit.constructions import build_complexity_one, build_product, grid_tail_instance
from hhskit.convexity import (coarse_median, finite_hull, gate, gate_report, hq_profile, hull_properties,
                              hull_threshold, mu_convexity, pair_hull, product_region,
                              relative_hull, substructure, triples_constants)
from hhskit.metric import path_graph
from hhskit.verifier import constants_for, verify

import oracles
from conftest import small_tree


def tree_oracle(H):
    X = H.X
    adj = oracles.adjacency(X.n, X.edges.tolist())
    return adj, oracles.all_pairs(adj)


# quasiconvexity profiles

def test_profile_whole_space(prod):
    prof = hq_profile(prod, range(prod.X.n))
    assert prof.k(0) == 0
    assert all(v == 0 for v in prof.table.values())


def test_profile_fiber(grid_prod):
    fiber = [3 * 8 + j for j in range(8)]
    prof = hq_profile(grid_prod, fiber)
    assert prof.k(0) == 0
    for k, v in prof.table.items():
        assert v <= k


def test_profile_two_points_in_line():
    H = build_complexity_one(path_graph(21))
    prof = hq_profile(H, [0, 20])
    assert prof.k(0) == 10


def test_profile_rejects_empty(prod):
    with pytest.raises(ValueError):
        hq_profile(prod, [])


# gates

def test_gate_fixes_Y(prod):
    Y = list(range(0, 40))
    for y in (0, 17, 39):
        assert gate(prod, Y, y) == y


def test_gate_tree_subtree(tree20):
    adj, D = tree_oracle(tree20)
    # a subtree: the ball of radius 2 about vertex 0
    Y = [v for v in range(20) if D[0][v] <= 2]
    for x in range(20):
        assert gate(tree20, Y, x) == oracles.closest(lambda v: D[x][v], Y)


def test_gate_product_fiber(grid_prod):
    Y = [3 * 8 + j for j in range(8)]
    for x in range(64):
        assert gate(grid_prod, Y, x) == 3 * 8 + x % 8


def test_gate_idempotent(prod):
    rep = gate_report(prod, list(range(30, 70)))
    assert rep["idempotence_defect"] <= rep["max_snap"]


# substructures

def test_substructure_whole_space(prod):
    S = substructure(prod, range(prod.X.n))
    assert S.X.n == prod.X.n
    for u in range(prod.m):
        assert (S.pi[u] == prod.pi[u]).all()


def test_substructure_pair_hull_verifies(grid_prod):
    h = pair_hull(grid_prod, 9, 46, hull_threshold(grid_prod))
    assert verify(substructure(grid_prod, h.points)).passed


# product regions

def test_product_region_maximal(prod):
    reg = product_region(prod, prod.ids[prod.maximal])
    assert len(reg.P) == prod.X.n


def test_product_region_factor(grid_prod):
    reg = product_region(grid_prod, grid_prod.ids[0])
    assert len(reg.P) == 64
    assert len(reg.F) == 8 and len(reg.E) == 8


def test_product_region_complexity_one(tree_inst):
    reg = product_region(tree_inst, tree_inst.ids[tree_inst.maximal])
    assert len(reg.F) == tree_inst.X.n and len(reg.E) == 1


# finite hulls

def test_finite_hull_two_points_is_pair_hull(prod):
    t = hull_threshold(prod)
    assert (finite_hull(prod, [4, 99], t).points == pair_hull(prod, 4, 99, t).points).all()


def test_finite_hull_tree_tripod(tree20):
    t = hull_threshold(tree20)
    adj, D = tree_oracle(tree20)
    a, b, c = 0, 11, 19
    tripod = {v for v in range(20)
              if any(D[p][v] + D[v][q] == D[p][q] for p, q in ((a, b), (b, c), (a, c)))}
    want = [v for v in range(20) if min(D[v][w] for w in tripod) <= t]
    assert finite_hull(tree20, [a, b, c], t).points.tolist() == want


def test_finite_hull_single_point(tree20):
    t = hull_threshold(tree20)
    h = finite_hull(tree20, [5], t)
    _, D = tree_oracle(tree20)
    assert h.points.tolist() == [v for v in range(20) if D[5][v] <= t]


def test_finite_hull_size_limit(prod):
    with pytest.raises(ValueError):
        finite_hull(prod, range(7), hull_threshold(prod))


def test_hull_properties_finite(prod):
    rep = hull_properties(prod, n_sets=40, seed=1)
    assert rep["C"] >= 0 and rep["theta_pp"] >= rep["theta"]


# medians

def test_median_degenerate(prod):
    for x, z in ((0, 50), (13, 140)):
        m = coarse_median(prod, x, x, z)
        assert m.point == x


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.lists(st.integers(0, 19), min_size=3, max_size=3))
def test_tree_median_exact(seed, xyz):
    G = small_tree(20, seed)
    H = build_complexity_one(G)
    adj = oracles.adjacency(20, G.edges.tolist())
    m = coarse_median(H, *xyz)
    assert m.deviation == 0
    assert m.point == oracles.tree_median(adj, *xyz)


def test_product_median_componentwise(grid_prod):
    c = constants_for(grid_prod)
    rng = np.random.default_rng(0)
    for _ in range(30):
        x, y, z = (int(v) for v in rng.integers(64, size=3))
        m = coarse_median(grid_prod, x, y, z)
        i = sorted([x // 8, y // 8, z // 8])[1]
        j = sorted([x % 8, y % 8, z % 8])[1]
        assert m.deviation <= c.te(m.consistency)
        assert m.point == i * 8 + j
        assert m.consistency <= m.bound


def test_triples_stable_across_seeds(prod):
    a = triples_constants(prod, samples=40, seed=0)
    b = triples_constants(prod, samples=40, seed=1)
    assert a["kappa"] == b["kappa"] == 1
    assert a["degenerate_defect"] == 0


def test_mu_convexity_fiber(grid_prod):
    assert mu_convexity(grid_prod, [2 * 8 + j for j in range(8)], samples=50) == 0


# relative hulls

def test_relative_hull_needs_relative_mode(prod):
    with pytest.raises(ValueError):
        relative_hull(prod, 0, 1, 2)


def test_relative_hull_same_point():
    H = grid_tail_instance(4, 5, structured=False)
    rh = relative_hull(H, 0, 0, 1)
    assert 0 in rh.points
    assert verify(rh.instance).passed
