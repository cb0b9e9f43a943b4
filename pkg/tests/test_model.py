import numpy as np
import pytest

from hhskit.constructions import build_bounded, build_complexity_one
from hhskit.metric import path_graph
from hhskit.model import (InstanceError, check_tuple, instance_to_json, level, set_distance,
                          validate_instance)


def single_domain_raw(n=5):
    G = path_graph(n).to_json()
    return {"total_space": G, "domains": [{"id": 7, "name": "S", "graph": G, "hyperbolic": True}],
            "nesting": [], "orthogonality": [], "maximal": 7, "containers": [],
            "pi": {"7": [[v] for v in range(n)]}, "rho_set": [], "rho_map": []}


def test_complexity_one_valid():
    H = validate_instance(single_domain_raw())
    assert H.m == 1 and H.complexity() == 1 and H.ids == [7]


def test_empty_index_set_bounded():
    H = validate_instance({"total_space": path_graph(3).to_json(), "domains": [], "nesting": [],
                           "orthogonality": [], "maximal": None, "containers": [], "pi": {},
                           "rho_set": [], "rho_map": []})
    assert H.m == 0 and H.complexity() == 0


def test_orthogonal_comparable_pair_rejected(prod):
    raw = instance_to_json(prod)
    a, b = raw["nesting"][0]
    raw["orthogonality"].append([a, b])
    with pytest.raises(InstanceError) as exc:
        validate_instance(raw)
    assert any("orthogonal comparable pair" in e for e in exc.value.errors)


def test_errors_are_collected():
    raw = single_domain_raw()
    raw["pi"]["7"] = raw["pi"]["7"][:3]
    raw["nesting"] = [[7, 9]]
    with pytest.raises(InstanceError) as exc:
        validate_instance(raw)
    assert len(exc.value.errors) >= 1


def test_round_trip(prod):
    again = validate_instance(instance_to_json(prod))
    assert instance_to_json(again) == instance_to_json(prod)


def test_set_distance_examples():
    H = build_complexity_one(path_graph(9))
    assert set_distance(H, 0, [3], [3]) == 0
    assert set_distance(H, 0, [1], [6]) == 5
    ball = path_graph(9).ball(2, 1)
    assert set_distance(H, 0, ball, [7]) == min(abs(v - 7) for v in ball) == 4


def test_set_distance_empty_raises():
    H = build_complexity_one(path_graph(4))
    with pytest.raises(ValueError):
        set_distance(H, 0, [], [1])


def test_levels(prod):
    H = build_complexity_one(path_graph(4))
    assert level(H, 0) == 1
    top = prod.ids[prod.maximal]
    assert level(prod, top) == 3
    with pytest.raises(KeyError):
        level(prod, 999)


def test_level_families(prod):
    top = prod.maximal
    lev = prod.levels()
    for ell in range(3):
        fam = prod.level_family(top, ell)
        assert all(lev[top] - lev[u] == ell for u in fam)


def test_point_tuples_valid(prod):
    for x in range(prod.X.n):
        check_tuple(prod, prod.point_tuple(x))


def test_chains_and_orthogonal_families_bounded(prod):
    n = prod.complexity()
    assert prod.max_orth_family() <= n
    # the longest chain is the complexity by construction of levels
    assert int(prod.levels().max()) == n


def test_non_transverse_families_bounded_by_chi(prod):
    chi = prod.chi()
    nt = ~prod.trans
    rng = np.random.default_rng(0)
    for _ in range(200):
        fam = [int(u) for u in rng.permutation(prod.m)[:rng.integers(1, prod.m + 1)]]
        if all(nt[a, b] for a in fam for b in fam):
            assert len(fam) <= chi


def test_bounded_instance():
    H = build_bounded(path_graph(4))
    assert H.m == 0
