import numpy as np
import pytest

from hhskit.constructions import (CombinationError, build_bounded, build_complexity_one, build_product,
                                  build_relative, check_hieromorphism, combine_tree, cone_off,
                                  factor_inclusion, flip_tree_example, grid_tail, identity_hieromorphism,
                                  line_bundle, qi_constant, tree_hypotheses)
from hhskit.metric import cycle_graph, path_graph
from hhskit.verifier import verify

import oracles
from conftest import small_tree


def test_complexity_one_shape(tree_inst):
    assert tree_inst.m == 1 and tree_inst.complexity() == 1


def test_bounded_has_no_hyperbolic_domain():
    H = build_bounded(cycle_graph(6))
    assert H.m == 0
    assert verify(H).passed


def test_product_distances_add():
    A, B = small_tree(6, 1), small_tree(5, 2)
    P = build_product(build_complexity_one(A), build_complexity_one(B))
    adj = oracles.adjacency(P.X.n, P.X.edges.tolist())
    D = oracles.all_pairs(adj)
    for x in range(P.X.n):
        for y in range(P.X.n):
            assert D[x][y] == A.d(x // 5, y // 5) + B.d(x % 5, y % 5)


def test_product_relations(grid_prod):
    assert grid_prod.orth[0, 1]
    assert grid_prod.nest[0, grid_prod.maximal] and grid_prod.nest[1, grid_prod.maximal]
    assert grid_prod.max_orth_family() == 2
    # point domains U0, U1 and S are non-transverse to both factors
    assert grid_prod.chi() == 5


def test_product_verifies(grid_prod):
    assert verify(grid_prod).passed


def test_cone_off_distances():
    G = path_graph(10)
    C = cone_off(G, [np.arange(0, 8)])
    assert C.n == 11
    assert C.d(0, 7) == 2 and C.d(0, 9) == 4


def test_relative_grid_tail(grid_tail_inst):
    rep = verify(grid_tail_inst)
    assert rep.passed


def test_relative_unstructured_verifies():
    X, periph = grid_tail(4, 5)
    H = build_relative(X, periph)
    assert not all(H.hyperbolic)
    assert verify(H).passed


def test_line_bundle_shape():
    X, lines = line_bundle(3, 11, 2)
    assert X.n == 3 * 11 + 2
    assert X.d(int(lines[0][0]), int(lines[2][0])) == 5 + 2 + 2 + 5


def test_line_bundle_rejects_bad_sizes():
    with pytest.raises(ValueError):
        line_bundle(0)


# hieromorphisms

def test_identity_hieromorphism(prod):
    rep = check_hieromorphism(identity_hieromorphism(prod), profile=False)
    assert rep["passed"] and rep["full"]
    assert rep["rho_defect"] == 0
    assert set(rep["pi_defect"].values()) == {0}


def test_factor_inclusion():
    H0 = build_complexity_one(path_graph(5))
    H1 = build_complexity_one(path_graph(4))
    P = build_product(H0, H1)
    for side in (0, 1):
        rep = check_hieromorphism(factor_inclusion(H0, H1, P, side=side, basepoint=1))
        assert rep["passed"]
        assert rep["xi"] == 1
        assert rep["hq_profile"]["k0"] == 0


def test_qi_constant_of_doubling():
    A = path_graph(5)
    B = path_graph(9)
    assert qi_constant(A, B, np.arange(5) * 2) == 2


# combination

def test_flip_two_vertices_combines():
    T = flip_tree_example(2, sigma=20, fiber=6)
    H = combine_tree(T)
    assert H.X.n == 2 * 20 * 6
    assert verify(H).passed


def test_flip_supports_small():
    T = flip_tree_example(3, sigma=20, fiber=5)
    H = combine_tree(T)
    assert max(H.meta["support_diameters"]) <= 2


def test_flip_single_vertex_is_vertex_space():
    T = flip_tree_example(1, sigma=15, fiber=4)
    assert combine_tree(T) is T.vertex_instances[0]


def test_flip_argument_errors():
    with pytest.raises(ValueError):
        flip_tree_example(4, shape="path")
    with pytest.raises(ValueError):
        flip_tree_example(2, fiber=8, boundary=5)
    with pytest.raises(ValueError):
        flip_tree_example(2, shape="ring")
    with pytest.raises(ValueError):
        flip_tree_example(2, sigma=10, fiber=12)


def test_combination_rejects_non_injective_map():
    T = flip_tree_example(2, sigma=20, fiber=6)
    h = T.maps[(0, "+")]
    fd = h.f_dom.copy()
    fd[1] = fd[0]
    h.f_dom = fd
    with pytest.raises(CombinationError) as err:
        tree_hypotheses(T)
    assert err.value.hypothesis == "hieromorphism"
    assert err.value.witness["kind"] == "not_injective"


def test_hypothesis_reports_per_edge():
    T = flip_tree_example(3, sigma=20, fiber=5)
    reps = tree_hypotheses(T)
    assert set(reps) == {"0-", "0+", "1-", "1+"}
    assert all(r["full"] for r in reps.values())
