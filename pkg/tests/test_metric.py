import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hhskit.metric import (DiscretePath, GraphError, MetricGraph, QGFailure, cycle_graph,
                           delta_hyperbolicity, grid_graph, path_graph, quasiconvexity_constant,
                           random_tree, slim_delta_bruteforce, unparam_qg_constant)

import oracles


def random_connected(n, extra, seed):
    rng = np.random.default_rng(seed)
    edges = {(i, int(rng.integers(0, i))) for i in range(1, n)}
    for _ in range(extra):
        a, b = (int(v) for v in rng.integers(0, n, size=2))
        if a != b and (a, b) not in edges and (b, a) not in edges:
            edges.add((a, b))
    return MetricGraph(n, sorted(edges))


def test_path_ends():
    assert path_graph(5).d(0, 4) == 4


def test_grid_corners():
    assert grid_graph(10, 10).d(0, 99) == 18


def test_disconnected_names_components():
    with pytest.raises(GraphError, match="disconnected"):
        MetricGraph(4, [(0, 1), (2, 3)])


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 25), st.integers(0, 15), st.integers(0, 10_000))
def test_distances_match_bfs(n, extra, seed):
    G = random_connected(n, extra, seed)
    ref = oracles.all_pairs(oracles.adjacency(n, G.edges.tolist()))
    assert (G.dist == np.array(ref)).all()
    assert (G.dist == G.dist.T).all()
    assert (np.diag(G.dist) == 0).all()


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 12), st.integers(0, 10_000))
def test_triangle_inequality(n, seed):
    D = random_connected(n, 4, seed).dist
    assert (D[:, :, None] <= D[:, None, :] + D.T[None, :, :]).all()


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 40), st.integers(0, 10_000))
def test_trees_are_zero_hyperbolic(n, seed):
    assert delta_hyperbolicity(random_tree(n, np.random.default_rng(seed))) == 0


def test_single_vertex_delta():
    assert delta_hyperbolicity(MetricGraph(1, [])) == 0


def test_cycle12_delta_matches_oracle():
    G = cycle_graph(12)
    ref = oracles.slim_delta(oracles.adjacency(12, G.edges.tolist()))
    assert delta_hyperbolicity(G) == ref == 3
    assert slim_delta_bruteforce(G) == ref


@settings(max_examples=15, deadline=None)
@given(st.integers(3, 9), st.integers(0, 6), st.integers(0, 10_000))
def test_delta_matches_oracle(n, extra, seed):
    G = random_connected(n, extra, seed)
    assert delta_hyperbolicity(G) == oracles.slim_delta(oracles.adjacency(n, G.edges.tolist()))


def test_quasiconvexity_examples():
    G = cycle_graph(12)
    assert quasiconvexity_constant(G, range(12)) == 0
    assert quasiconvexity_constant(G, [4]) == 0
    adj = oracles.adjacency(12, G.edges.tolist())
    assert quasiconvexity_constant(G, [0, 6]) == oracles.quasiconvexity(adj, [0, 6]) == 3
    with pytest.raises(ValueError):
        quasiconvexity_constant(G, [])


@settings(max_examples=20, deadline=None)
@given(st.integers(3, 10), st.integers(0, 5), st.integers(0, 10_000), st.data())
def test_quasiconvexity_matches_oracle(n, extra, seed, data):
    G = random_connected(n, extra, seed)
    Y = data.draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=4, unique=True))
    adj = oracles.adjacency(n, G.edges.tolist())
    assert quasiconvexity_constant(G, Y) == oracles.quasiconvexity(adj, Y)


def test_qg_geodesic_is_one():
    G = path_graph(12)
    assert unparam_qg_constant(G, [[v] for v in range(12)]) == 1


def test_qg_constant_sequence_small():
    G = path_graph(5)
    assert unparam_qg_constant(G, [[2], [2], [2]]) == 1


def test_qg_backtrack_grows():
    G = path_graph(40)
    vals = []
    for b in (0, 3, 6, 10):
        seq = list(range(0, 20)) + list(range(18, 19 - b, -1)) + list(range(20 - b, 30))
        seq = [[v] for v in seq]
        vals.append(unparam_qg_constant(G, seq))
    assert vals == sorted(vals) and vals[-1] > vals[0]


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(0, 9), min_size=1, max_size=8))
def test_qg_search_matches_exhaustive(seq):
    G = path_graph(10)
    s = [[v] for v in seq]
    a = unparam_qg_constant(G, s, method="exhaustive")
    b = unparam_qg_constant(G, s, method="search")
    assert a == b


def test_qg_failure_is_value():
    G = path_graph(30)
    seq = [[0], [29], [0], [29], [0], [29]]
    out = unparam_qg_constant(G, seq, D_max=3)
    assert isinstance(out, QGFailure) and not out


def test_discrete_path_step_bound():
    G = path_graph(10)
    p = DiscretePath([0, 2, 3, 7], G)
    assert p.step_bound == 4 and len(p) == 3
    assert p.subpath(1, 2).steps == (2, 3)
