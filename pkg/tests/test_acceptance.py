"""Acceptance suite.

Each test records one PASS/FAIL line; the lines are printed together at the
end of the pytest run (see ``pytest_terminal_summary`` in conftest.py) and
also when this file is run directly with ``python tests/test_acceptance.py``.
"""

import json
import subprocess
import sys
import time
from itertools import combinations

import numpy as np
import pytest

from hhskit import io
from hhskit.constructions import (build_complexity_one, build_product, build_relative, combine_tree,
                                  flip_tree_example, grid_tail, line_bundle)
from hhskit.convexity import coarse_median, hull_properties, hull_threshold, relative_hull, triples_constants
from hhskit.metric import DiscretePath, path_graph, tree_median
from hhskit.paths import (audit_path, df_lower_certificate, fit_df_constants, good_path, lower_bound_scale,
                          proper_subsample, threshold_sum, upper_bound_check, upper_bound_r)
from hhskit.realization import (chain_coloring, consistency_threshold, realize_brute, realize_constructive,
                                realizers, relevance_poset, tuple_corpus, uniqueness_radius)
from hhskit.verifier import constants_for, verify

RESULTS: dict[int, str] = {}

SMALL = ["complexity1_tree.json", "tree20.json", "product_trees.json"]


def record(num, title, ok, detail):
    line = f"acceptance {num:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    RESULTS[num] = line
    print(line)
    return ok


def cli(*argv):
    return subprocess.run([sys.executable, "-m", "hhskit.cli", *argv], capture_output=True, text=True)


def test_complexity_one_exact(tmp_path):
    inst = tmp_path / "tree500.json"
    rep = tmp_path / "fit.json"
    assert cli("build", "complexity1", "--tree", "500", "--out", str(inst)).returncode == 0
    t = time.perf_counter()
    proc = cli("run", "df-fit", str(inst), "--s", "1", "--out", str(rep))
    elapsed = time.perf_counter() - t
    front = json.loads(rep.read_text())["result"]["frontier"] if proc.returncode == 0 else {}
    ok = proc.returncode == 0 and front.get("1") == 0 and elapsed < 10
    assert record(1, "complexity-one fit", ok, f"(K,C)=(1,{front.get('1')}) in {elapsed:.1f}s")


def test_product_distance_formula():
    P = path_graph(200)
    H = build_product(build_complexity_one(P), build_complexity_one(P))
    fit = fit_df_constants(H, 3)
    rep = verify(H)
    c = rep.constants
    lo, hi = fit.gap
    linear = all(v == 2 * k for k, v in c.theta_u.items())
    ok = 0 <= lo and hi <= 4 and rep.passed and c.kappa0 == 0 and linear
    assert record(2, "product distance formula", ok,
                  f"d-Σ_3 in [{lo},{hi}], verify={rep.passed}, κ0={c.kappa0}, θ_u=2κ on "
                  f"{len(c.theta_u)} values: {linear}")


def realization_instances():
    out = [(n, io.load_instance(n)) for n in SMALL + ["grid_tail.json"]]
    out.append(("flip2", combine_tree(io.load_bundle("flip2.bundle.json"))))
    return out


def test_realization():
    lines, ok = [], True
    for name, H in realization_instances():
        c = constants_for(H)
        corpus = tuple_corpus(H, 1000, 1, delta=c.delta)
        kappa = max(consistency_threshold(H, b) for _, b in corpus)
        te = c.te(kappa)
        radius = uniqueness_radius(c, te, kappa)
        worst_dev = worst_diam = worst_gap = 0
        for _, b in corpus:
            x, dev = realize_brute(H, b)
            worst_dev = max(worst_dev, dev)
            R = realizers(H, b, te)
            worst_diam = max(worst_diam, H.X.diam(R) if len(R) else 0)
            y, _, _ = realize_constructive(H, b, kappa, c.E, c.alpha)
            worst_gap = max(worst_gap, H.X.d(x, y))
        good = worst_dev <= te and worst_diam <= radius and worst_gap <= radius
        ok &= good
        lines.append(f"{name} κ={kappa} θ_e={te} dev≤{worst_dev} diam≤{worst_diam} "
                     f"constructive gap≤{worst_gap} radius={radius}")
    assert record(3, "realization (1000 tuples each)", ok, "; ".join(lines))


def test_hierarchy_paths():
    lines, ok = [], True
    rng = np.random.default_rng(0)
    for name in SMALL:
        H = io.load_instance(name)
        c = constants_for(H)
        n = H.X.n
        D = 1
        paths = {}
        for x in range(n):
            for y in range(x + 1, n):
                p = good_path(H, x, y)
                D = max(D, audit_path(H, p).D)
                paths[x, y] = p
        # subpath stability on sampled pairs
        keys = list(paths)
        pick = [keys[i] for i in rng.choice(len(keys), size=min(40, len(keys)), replace=False)]
        sub_D = 1
        for k in pick:
            p = paths[k]
            m = len(p.steps)
            for i in range(m):
                for j in range(i, m):
                    sub_D = max(sub_D, audit_path(H, p.subpath(i, j)).D)
        # upper bound at the default r, and the least r that works
        ub_fail = 0
        r_min = 1
        for (x, y), p in paths.items():
            K = max(1, p.info.get("K", 1) if p.info else 1)
            r = upper_bound_r(H, K, 1, c)
            proper = DiscretePath(proper_subsample(H.X, p.steps, r, K), H.X)
            ub_fail += not upper_bound_check(H, proper, 1)["holds"]
            while True:
                q = proper_subsample(H.X, p.steps, r_min, K)
                if len(q) - 1 <= threshold_sum(H, x, y, 1):
                    break
                r_min += 1
        good = sub_D <= D and ub_fail == 0
        ok &= good
        lines.append(f"{name} pairs={len(paths)} D={D} subpath D≤{sub_D} upper-bound failures={ub_fail} "
                     f"least r={r_min}")
    assert record(4, "hierarchy paths", ok, "; ".join(lines))


def test_lower_bound_certificates():
    lines, ok = [], True
    line51 = build_complexity_one(path_graph(51))
    ex = df_lower_certificate(line51, 0, 50, 10)
    example = (ex.total_checkpoints, ex.n_doors, ex.max_multiplicity) == (5, 5, 1)
    ok &= example
    lines.append(f"worked example {ex.total_checkpoints}/{ex.n_doors}/{ex.max_multiplicity}")
    grid = build_product(build_complexity_one(path_graph(30)), build_complexity_one(path_graph(30)))
    for name, H in [(n, io.load_instance(n)) for n in SMALL] + [("P30xP30", grid)]:
        c = constants_for(H)
        n = H.X.n
        pairs = [(x, y) for x in range(n) for y in range(x + 1, n)]
        if len(pairs) > 3000:
            rng = np.random.default_rng(1)
            pairs = [pairs[i] for i in rng.choice(len(pairs), size=3000, replace=False)]
        clashes = uncertified = nontrivial = 0
        for x, y in pairs:
            cert = df_lower_certificate(H, x, y, lower_bound_scale(H, 1, c), c)
            if not cert.admissible:
                cert = df_lower_certificate(H, x, y, lower_bound_scale(H, cert.K, c), c)
            clashes += bool(cert.transverse_clash)
            uncertified += not cert.certified
            nontrivial += cert.sigma > 0
        ok &= clashes == 0 and uncertified == 0
        lines.append(f"{name} pairs={len(pairs)} (Σ>0: {nontrivial}) clashes={clashes} "
                     f"uncertified={uncertified}")
    assert record(5, "lower-bound certificates", ok, "; ".join(lines))


def test_medians():
    lines, ok = [], True
    rng = np.random.default_rng(2)
    for name in ("complexity1_tree.json", "tree20.json"):
        H = io.load_instance(name)
        bad = 0
        for _ in range(500):
            x, y, z = (int(v) for v in rng.integers(H.X.n, size=3))
            m = coarse_median(H, x, y, z)
            bad += m.deviation != 0 or m.point != tree_median(H.X, x, y, z)
        ok &= bad == 0
        lines.append(f"{name} tree mismatches={bad}/500")
    grid = build_product(build_complexity_one(path_graph(12)), build_complexity_one(path_graph(12)))
    for name, H in (("product_trees", io.load_instance("product_trees.json")), ("P12xP12", grid)):
        c = constants_for(H)
        G0, G1 = H.graphs[0], H.graphs[1]
        bad = 0
        worst = 0
        for _ in range(500):
            x, y, z = (int(v) for v in rng.integers(H.X.n, size=3))
            m = coarse_median(H, x, y, z, c)
            m0 = tree_median(G0, *(int(H.pi[0][v, 0]) for v in (x, y, z)))
            m1 = tree_median(G1, *(int(H.pi[1][v, 0]) for v in (x, y, z)))
            want = int(np.flatnonzero((H.pi[0][:, 0] == m0) & (H.pi[1][:, 0] == m1))[0])
            worst = max(worst, m.deviation)
            bad += m.point != want or m.deviation > c.te(m.consistency)
        ok &= bad == 0
        lines.append(f"{name} componentwise mismatches={bad}/500 max dev={worst}")
    for name in SMALL + ["grid_tail.json"]:
        H = io.load_instance(name)
        runs = [triples_constants(H, 200, s) for s in range(3)]
        kap = {r["kappa"] for r in runs}
        h0 = {r["h0"] for r in runs}
        stable = len(kap) == 1 and len(h0) == 1
        ok &= stable
        lines.append(f"{name} triples κ={sorted(kap)} h(0)={sorted(h0)}")
    assert record(6, "coarse medians", ok, "; ".join(lines))


def test_hulls():
    lines, ok = [], True
    for name in SMALL + ["grid_tail.json"]:
        H = io.load_instance(name)
        rep = hull_properties(H, n_sets=200, max_size=4, seed=0)
        finite = all(np.isfinite([rep["C"], rep["theta_pp"]]))
        ok &= finite and rep["sets"] >= 200
        lines.append(f"{name} (K,C,θ'')=({rep['K']},{rep['C']},{rep['theta_pp']}) at θ={rep['theta']}")
    assert record(7, "hull properties (200 sets each)", ok, "; ".join(lines))


def test_combination():
    lines, ok = [], True
    for nv in (2, 3):
        t = time.perf_counter()
        H = combine_tree(flip_tree_example(nv, sigma=40, fiber=12))
        rep = verify(H)
        fit = fit_df_constants(H, 3)
        elapsed = time.perf_counter() - t
        sd = max(H.meta["support_diameters"])
        good = rep.passed and sd <= 2 and elapsed < 300
        ok &= good
        lines.append(f"{nv} vertices: n={H.X.n} verify={rep.passed} support diam={sd} "
                     f"C(K=1)={fit.frontier['1']} in {elapsed:.1f}s")
    assert record(8, "flip-tree combination", ok, "; ".join(lines))


def test_relative_mode():
    X, periph = grid_tail()
    H = build_relative(X, periph)
    rep = verify(H)
    theta = hull_threshold(H)
    rng = np.random.default_rng(3)
    passed = fitted = 0
    worst = 0
    for _ in range(60):
        x, y = (int(v) for v in rng.integers(X.n, size=2))
        rh = relative_hull(H, x, y, theta)
        passed += verify(rh.instance).passed
        fit = fit_df_constants(rh.instance, 2)
        fitted += 1
        worst = max(worst, fit.frontier["1"])
    ok = rep.passed and passed == 60 and fitted == 60
    assert record(9, "relative mode", ok,
                  f"grid-with-tail verify={rep.passed}; relative hulls verified {passed}/60, "
                  f"distance formula fitted {fitted}/60 with C(K=1)≤{worst} at θ={theta}")


def test_posets():
    from hhskit.realization import median_tuple, perturbed_tuple, point_tuple
    lines, ok = [], True
    for k in (2, 3):
        X, lines_ = line_bundle(k, 301, 2)
        H = build_relative(X, lines_)
        c = constants_for(H)
        rng = np.random.default_rng(k)
        n_posets = chains = 0
        max_colors = 0
        bad = 0
        chi = H.chi()
        for i in range(300):
            x = int(rng.integers(X.n))
            kind = i % 3
            if kind == 0:
                b = point_tuple(H, int(rng.integers(X.n)))
            elif kind == 1:
                b = median_tuple(H, *(int(v) for v in rng.integers(X.n, size=3)), c.delta)
            else:
                b = perturbed_tuple(H, int(rng.integers(X.n)), 2, rng)
            kappa = consistency_threshold(H, b)
            P = relevance_poset(H, x, b, 100 * max(kappa, c.E), kappa, c.E)
            n_posets += 1
            col = chain_coloring(P)
            ncol = len(set(col.values()))
            max_colors = max(max_colors, ncol)
            comp = P.comparable()
            chains += bool((comp & ~np.eye(len(P), dtype=bool)).any())
            shared = any(col[P.elements[a]] == col[P.elements[b_]] and not P.trans[a, b_]
                         for a, b_ in combinations(range(len(P)), 2))
            bad += not (P.is_antisymmetric() and P.is_transitive() and P.dichotomy_holds()
                        and ncol <= chi and not shared)
        ok &= bad == 0
        lines.append(f"{k} lines: posets={n_posets} with a comparable pair={chains} "
                     f"max colours={max_colors} χ={chi} violations={bad}")
    assert record(10, "relevance posets", ok, "; ".join(lines))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
