import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hhskit.constructions import build_bounded, build_complexity_one, build_product
from hhskit.convexity import hull_set, hull_threshold, pair_hull
from hhskit.metric import DiscretePath, cycle_graph, path_graph
from hhskit.paths import (PathError, active_subpath, audit_path, df_lower_certificate,
                          fit_df_constants, good_path, lower_bound_scale, monotonicity_defect,
                          proper_subsample, qg_constant, straight_path, threshold_sum,
                          upper_bound_check, upper_bound_r)

import oracles
from conftest import small_tree


def line(n):
    return build_complexity_one(path_graph(n))


# thresholded sums

def test_sum_same_point(prod):
    assert threshold_sum(prod, 5, 5, 1) == 0


def test_sum_complexity_one(tree_inst):
    X = tree_inst.X
    for x, y in ((0, 30), (3, 4), (10, 59)):
        d = X.d(x, y)
        for s in (1, 3, 6):
            assert threshold_sum(tree_inst, x, y, s) == (d if d >= s else 0)


def test_sum_product_is_coordinate_sum(grid_prod):
    for x, y in ((0, 63), (9, 50), (7, 56)):
        d0 = abs(x // 8 - y // 8)
        d1 = abs(x % 8 - y % 8)
        assert threshold_sum(grid_prod, x, y, 1) == d0 + d1


def test_sum_rejects_small_s(tree_inst):
    with pytest.raises(ValueError):
        threshold_sum(tree_inst, 0, 1, 0)


# distance formula fits

def test_fit_complexity_one_exact(tree_inst):
    fit = fit_df_constants(tree_inst, 1)
    assert fit.frontier["1"] == 0
    assert fit.gap == (0, 0)


def test_fit_product_s3(grid_prod):
    fit = fit_df_constants(grid_prod, 3)
    assert 0 <= fit.gap[0] and fit.gap[1] <= 4
    assert fit.frontier["1"] <= 4


def test_fit_bounded_empty_index():
    G = cycle_graph(9)
    fit = fit_df_constants(build_bounded(G), 2)
    assert fit.frontier["1"] == G.diameter()


def test_fit_frontier_monotone_in_s(prod):
    fit = fit_df_constants(prod, 4)
    for s in range(1, 4):
        for K, C in fit.per_s[s].items():
            assert C <= fit.per_s[s + 1][K]


def test_fit_frontier_decreases_in_K(prod):
    front = list(fit_df_constants(prod, 2).frontier.values())
    assert front == sorted(front, reverse=True)


def test_fit_json_shape(grid_prod):
    js = fit_df_constants(grid_prod, 2).to_json()
    assert set(js["frontier"]) == {"1", "1.25", "1.5", "2", "3", "5"}


# hulls of pairs

def test_tree_pair_hull_is_geodesic_neighbourhood(tree20):
    theta = hull_threshold(tree20)
    X = tree20.X
    adj = oracles.adjacency(X.n, X.edges.tolist())
    D = oracles.all_pairs(adj)
    for x, y in ((0, 19), (3, 11), (7, 7)):
        geo = oracles.all_geodesics(adj, D, x, y)[0]
        want = [p for p in range(X.n) if min(D[p][g] for g in geo) <= theta]
        h = pair_hull(tree20, x, y, theta)
        assert h.points.tolist() == want
        # identity on the hull, closest point of the geodesic elsewhere
        for p in range(X.n):
            want_p = p if p in want else oracles.closest(lambda v: D[p][v], geo)
            assert h(p) == want_p


def test_product_pair_hull_is_box(grid_prod):
    theta = hull_threshold(grid_prod)
    x, y = 1 * 8 + 2, 5 * 8 + 6
    pts = set(hull_set(grid_prod, [x, y], theta).tolist())
    box = {i * 8 + j for i in range(8) for j in range(8)
           if 1 - theta <= i <= 5 + theta and 2 - theta <= j <= 6 + theta}
    assert pts == box


def test_pair_hull_identity_on_hull(prod):
    theta = hull_threshold(prod)
    h = pair_hull(prod, 0, 100, theta)
    assert (h.retraction[h.points] == h.points).all()


def test_pair_hull_rejects_small_theta(prod):
    with pytest.raises(ValueError, match="threshold"):
        pair_hull(prod, 0, 1, hull_threshold(prod) - 1)


def test_nested_hulls(grid_prod, tree20):
    for H in (grid_prod, tree20):
        t0 = hull_threshold(H)
        theta = t0 + 2 * (0 + t0)
        rng = np.random.default_rng(2)
        for _ in range(15):
            x, y = (int(v) for v in rng.integers(H.X.n, size=2))
            big = set(hull_set(H, [x, y], theta).tolist())
            inner = hull_set(H, [x, y], t0)
            for a, b in rng.choice(inner, size=(4, 2)):
                assert set(hull_set(H, [int(a), int(b)], t0).tolist()) <= big


# good paths and audits

def test_good_path_trivial(prod):
    assert good_path(prod, 12, 12).steps == (12,)


def test_good_path_tree_is_geodesic(tree_inst):
    X = tree_inst.X
    for x, y in ((0, 59), (5, 33)):
        p = good_path(tree_inst, x, y)
        assert list(p.steps) == X.geodesic(x, y)


def test_good_path_product_staircase(grid_prod):
    p = good_path(grid_prod, 0, 63)
    a = audit_path(grid_prod, p)
    assert a.monotonicity == {0: 0, 1: 0}
    assert a.D == 1


def test_audit_geodesic(tree_inst):
    p = DiscretePath(tree_inst.X.geodesic(0, 40), tree_inst.X)
    a = audit_path(tree_inst, p)
    assert a.efficiency == 1.0 and a.D == 1
    assert set(a.monotonicity.values()) == {0}


def test_backtrack_depth():
    H = line(20)
    steps = list(range(0, 12)) + list(range(10, 6, -1)) + list(range(7, 20))
    p = DiscretePath(steps, H.X)
    assert audit_path(H, p).monotonicity[H.ids[H.maximal]] == 11 - 7
    assert monotonicity_defect(H.X, [[0], [5], [2], [9]]) == 3


def test_qg_constant_of_geodesic():
    G = path_graph(10)
    assert qg_constant(G, list(range(10))) == 1
    assert qg_constant(G, [0, 0, 0, 1]) >= 2


def test_backtracking_start_is_spliced():
    H = line(30)
    start = list(range(0, 20)) + list(range(19, 9, -1)) + list(range(11, 30))
    p = good_path(H, 0, 29, initial=start)
    assert p.info["splices"]
    # only backtracks deeper than the omen threshold 5KE are removed
    assert audit_path(H, p).monotonicity[H.ids[H.maximal]] <= 5
    assert monotonicity_defect(H.X, [[v] for v in start]) == 9


def test_initial_must_match_endpoints():
    H = line(10)
    with pytest.raises(ValueError):
        good_path(H, 0, 9, initial=[1, 2, 3])


def test_budget_error():
    H = line(30)
    start = list(range(0, 20)) + list(range(19, 9, -1)) + list(range(11, 30))
    with pytest.raises(PathError) as err:
        good_path(H, 0, 29, initial=start, budget=0)
    assert err.value.state["level"] == 1


def test_subpaths_keep_D(prod):
    rng = np.random.default_rng(4)
    for _ in range(5):
        x, y = (int(v) for v in rng.integers(prod.X.n, size=2))
        p = good_path(prod, x, y)
        D = audit_path(prod, p).D
        n = len(p.steps)
        for i in range(0, n, 3):
            for j in range(i, n, 4):
                assert audit_path(prod, p.subpath(i, j)).D <= D


def test_straight_path_in_hull(prod):
    theta = hull_threshold(prod)
    pts = set(hull_set(prod, [3, 120], theta).tolist())
    sp = straight_path(prod, 3, 120, theta)
    assert sp[0] == 3 and sp[-1] == 120
    assert set(sp) <= pts


def test_proper_subsample_spacing():
    G = path_graph(30)
    sub = proper_subsample(G, list(range(30)), 5, 1)
    assert sub[0] == 0 and sub[-1] == 29
    gaps = [G.d(a, b) for a, b in zip(sub, sub[1:])]
    assert all(5 <= g <= 6 for g in gaps[:-1])


def test_upper_bound_with_measured_r(prod):
    c_r = upper_bound_r(prod, 1, 1)
    assert c_r >= 1
    p = good_path(prod, 0, 143, r=c_r)
    assert upper_bound_check(prod, p.info["proper"], 1)["holds"]


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 5000), st.integers(0, 80), st.integers(0, 80))
def test_good_path_endpoints_and_steps(seed, a, b):
    H = build_product(build_complexity_one(small_tree(9, seed)),
                      build_complexity_one(small_tree(9, seed + 1)))
    p = good_path(H, a, b)
    assert p.steps[0] == a and p.steps[-1] == b
    assert p.info["K"] >= 1


# lower bound certificates

def test_certificate_empty_for_equal_points(tree_inst):
    cert = df_lower_certificate(tree_inst, 4, 4, 10)
    assert cert.relevant == [] and cert.n_doors == 0


def test_certificate_worked_example():
    H = line(51)
    cert = df_lower_certificate(H, 0, 50, 10)
    assert cert.total_checkpoints == 5
    assert cert.n_doors == 5
    assert cert.max_multiplicity == 1
    assert cert.certified


def test_certificate_no_transverse_clash(grid_prod):
    s0 = lower_bound_scale(grid_prod, 1)
    X = grid_prod.X
    for x in range(0, 64, 5):
        for y in range(0, 64, 7):
            cert = df_lower_certificate(grid_prod, x, y, s0)
            assert cert.transverse_clash == []


def test_lower_bound_scale(tree_inst):
    assert lower_bound_scale(tree_inst, 2) == 20


# active subpaths

def test_active_subpath_product(grid_prod):
    p = good_path(grid_prod, 0, 63)
    rep = active_subpath(grid_prod, p, grid_prod.ids[0])
    assert rep["nu"] == 0
    assert rep["start"] == 0 and rep["end"] == len(p.steps) - 1
