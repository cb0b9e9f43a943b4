"""Hierarchical quasiconvexity, gates, hulls, product regions and medians.

All realization steps here are brute force: a target tuple with one
vertex per domain is realized by the total-space vertex (among a candidate
set) minimising the largest coordinate deviation, ties to the smallest id.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .metric import MetricGraph, quasiconvexity_constant
from .model import HInstance, pad_sets, validate
from .realization import consistency_threshold, realize_brute


# ---------------------------------------------------------------- batched realization

def proj_rows(H: HInstance, u: int) -> np.ndarray:
    """R[c, z] = d_u(c, π_u z) for every vertex c of C u and z of X (cached)."""
    cache = H.meta.setdefault("_cache", {})
    key = ("proj_rows", u)
    if key not in cache:
        D = H.graphs[u].dist
        P = H.pi[u]
        R = D[:, P[:, 0]]
        for a in range(1, P.shape[1]):
            R = np.minimum(R, D[:, P[:, a]])
        cache[key] = R
    return cache[key]


def realize_targets(H: HInstance, targets: np.ndarray, cand=None, domains=None,
                    block: int = 2_000_000) -> tuple[np.ndarray, np.ndarray]:
    """Realize many single-vertex tuples at once.

    ``targets[q, u]`` is the C u vertex wanted for query q.  Returns the
    chosen candidate and its deviation for every query.
    """
    cand = np.arange(H.X.n) if cand is None else np.asarray(cand, dtype=np.int64)
    doms = [u for u in (range(H.m) if domains is None else domains) if not H.is_point(u)]
    q = targets.shape[0]
    best = np.zeros(q, dtype=np.int64)
    dev = np.zeros(q, dtype=np.int64)
    rows = max(1, block // max(len(cand), 1))
    for lo in range(0, q, rows):
        hi = min(q, lo + rows)
        acc = np.zeros((hi - lo, len(cand)), dtype=np.int64)
        for u in doms:
            R = proj_rows(H, u)
            np.maximum(acc, R[targets[lo:hi, u]][:, cand], out=acc)
        j = np.argmin(acc, axis=1)
        best[lo:hi] = cand[j]
        dev[lo:hi] = acc[np.arange(hi - lo), j]
    return best, dev


def coarse_lipschitz(G: MetricGraph, table: np.ndarray) -> int:
    """Largest image distance across an edge of G (so d(f x, f y) ≤ L·d(x, y))."""
    if len(G.edges) == 0:
        return 0
    a, b = table[G.edges[:, 0]], table[G.edges[:, 1]]
    out = 0
    for lo in range(0, len(a), 4096):
        blk = G.rows(a[lo:lo + 4096], b[lo:lo + 4096]).diagonal()
        out = max(out, int(blk.max()))
    return out


def _closest_in(H: HInstance, u: int, Y) -> np.ndarray:
    """For every vertex c of C u, the smallest-id nearest vertex of π_u(Y)."""
    PY = np.unique(H.pi[u][np.asarray(Y)])
    D = H.graphs[u].dist[:, PY]
    return PY[np.argmin(D, axis=1)]


def _nearest_vertex(G: MetricGraph, pts: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Smallest-id nearest vertex of Y for each point."""
    Y = np.sort(Y)
    out = np.empty(len(pts), dtype=np.int64)
    for lo in range(0, len(pts), 512):
        blk = G.rows(pts[lo:lo + 512], Y)
        out[lo:lo + 512] = Y[np.argmin(blk, axis=1)]
    return out


# ---------------------------------------------------------------- quasiconvexity

@dataclass
class HQProfile:
    qc: int
    table: dict[int, int]
    per_domain: dict[int, int] = field(default_factory=dict)

    def k(self, kappa: int) -> int:
        if kappa == 0:
            return max(self.qc, self.table.get(0, 0))
        keys = [k for k in self.table if k <= kappa]
        return self.table[max(keys)] if keys else 0

    def to_json(self) -> dict:
        return {"k0": self.k(0), "qc": self.qc, "table": {str(k): v for k, v in self.table.items()},
                "per_domain": {str(k): v for k, v in self.per_domain.items()}}


def _as_subset(H: HInstance, Y) -> np.ndarray:
    Y = np.unique(np.asarray(list(Y), dtype=np.int64))
    if len(Y) == 0:
        raise ValueError("subset must be nonempty")
    if Y.min() < 0 or Y.max() >= H.X.n:
        raise ValueError("subset has vertices outside the total space")
    return Y


def hq_profile(H: HInstance, Y, kmax: int | None = None) -> HQProfile:
    """Quasiconvexity of projections plus the realization-closedness table.

    ``table[κ]`` is the largest d_X(x, Y) over x whose every projection is
    within κ of π_U(Y).
    """
    Y = _as_subset(H, Y)
    per = {}
    need = np.zeros(H.X.n, dtype=np.int64)
    for u in range(H.m):
        if H.is_point(u):
            continue
        img = np.unique(H.pi[u][Y])
        per[H.ids[u]] = quasiconvexity_constant(H.graphs[u], img)
        np.maximum(need, H.dist_to_set(u, img), out=need)
    qc = max(per.values(), default=0)
    dY = H.X.dist_to_set(Y)
    top = int(need.max()) if kmax is None else kmax
    table = np.zeros(top + 1, dtype=np.int64)
    sel = need <= top
    np.maximum.at(table, need[sel], dY[sel])
    table = np.maximum.accumulate(table)
    return HQProfile(qc, {k: int(v) for k, v in enumerate(table)}, per)


# ---------------------------------------------------------------- gates

def gate_table(H: HInstance, Y, xs=None) -> tuple[np.ndarray, dict]:
    """Gate onto Y for each x in xs (default: all of X).

    The tuple of closest points of π_U(x) in π_U(Y) is realized over X and
    snapped to the nearest vertex of Y.
    """
    Y = _as_subset(H, Y)
    xs = np.arange(H.X.n) if xs is None else np.asarray(xs, dtype=np.int64)
    targets = np.zeros((len(xs), max(H.m, 1)), dtype=np.int64)
    for u in range(H.m):
        if H.is_point(u):
            continue
        cl = _closest_in(H, u, Y)
        targets[:, u] = cl[H.pi[u][xs, 0]]
    real, dev = realize_targets(H, targets[:, :H.m]) if H.m else (xs.copy(), np.zeros(len(xs), int))
    snapped = _nearest_vertex(H.X, real, Y)
    inY = np.isin(xs, Y)
    snap_dist = H.X.rows(real, snapped).diagonal() if len(xs) <= 4096 else \
        np.array([H.X.d(int(a), int(b)) for a, b in zip(real, snapped)])
    info = {"max_deviation": int(dev.max()) if len(dev) else 0,
            "max_snap": int(snap_dist.max()) if len(snap_dist) else 0,
            "identity_defect": int(max((H.X.d(int(x), int(g)) for x, g in zip(xs[inY], snapped[inY])),
                                       default=0))}
    return snapped, info


def gate(H: HInstance, Y, x: int) -> int:
    g, _ = gate_table(H, Y, [x])
    return int(g[0])


def gate_report(H: HInstance, Y) -> dict:
    """Gate over all of X with its coarse-Lipschitz constant and idempotence defect."""
    g, info = gate_table(H, Y)
    info["lipschitz"] = coarse_lipschitz(H.X, g)
    gg, _ = gate_table(H, Y, g)
    info["idempotence_defect"] = int(H.X.rows(g, gg).diagonal().max()) if H.X.n <= 4096 else \
        max(H.X.d(int(a), int(b)) for a, b in zip(g, gg))
    info["table"] = g
    return info


# ---------------------------------------------------------------- substructures

def _closest_sets(G: MetricGraph, S: np.ndarray) -> list[np.ndarray]:
    """For each vertex of G, all nearest vertices of S."""
    D = G.dist[:, S]
    m = D.min(axis=1, keepdims=True)
    return [S[row] for row in (D == m)]


def _repair(X: MetricGraph, Y: np.ndarray) -> np.ndarray:
    """Add lex geodesics between components of the induced subgraph until connected."""
    from scipy.sparse.csgraph import connected_components
    Y = np.unique(Y)
    while True:
        index = -np.ones(X.n, dtype=np.int64)
        index[Y] = np.arange(len(Y))
        e = X.edges
        keep = (index[e[:, 0]] >= 0) & (index[e[:, 1]] >= 0)
        from scipy.sparse import csr_matrix
        k = len(Y)
        ee = index[e[keep]]
        A = csr_matrix((np.ones(len(ee)), (ee[:, 0], ee[:, 1])), shape=(k, k))
        nc, lab = connected_components(A, directed=False)
        if nc == 1:
            return Y
        a = Y[lab == lab[0]]
        b = Y[lab != lab[0]]
        blk = X.rows(a, b)
        i, j = np.unravel_index(int(np.argmin(blk)), blk.shape)
        Y = np.union1d(Y, X.geodesic(int(a[i]), int(b[j])))


def substructure(H: HInstance, Y, repair: bool = True) -> HInstance:
    """Induced structure on Y, with projections post-composed with closest-point maps."""
    Y = _as_subset(H, Y)
    Y2 = _repair(H.X, Y) if repair else Y
    if not repair:
        from .metric import GraphError
        try:
            H.X.induced(Y2)
        except GraphError as exc:
            raise ValueError(f"subset is not connected: {exc}") from None
    G, vs = H.X.induced(Y2)
    r = []
    for u in range(H.m):
        img = np.unique(H.pi[u][vs])
        r.append(_closest_sets(H.graphs[u], img))

    def post(u, S):
        return np.unique(np.concatenate([r[u][int(s)] for s in np.unique(S)]))

    pi = [pad_sets([post(u, H.pi[u][y]) for y in vs]) for u in range(H.m)]
    rho_set = {k: post(k[1], v) for k, v in H.rho_set.items()}
    rho_map = {}
    for (w, v), tab in H.rho_map.items():
        rho_map[(w, v)] = pad_sets([post(v, row) for row in tab])
    meta = {"kind": "substructure", "parent": H.meta.get("kind"), "vertices": vs.tolist(),
            "added_for_connectivity": int(len(Y2) - len(Y))}
    S = HInstance(X=G, ids=list(H.ids), names=list(H.names), graphs=list(H.graphs),
                  nest=H.nest.copy(), orth=H.orth.copy(), maximal=H.maximal,
                  containers=dict(H.containers), pi=pi, rho_set=rho_set, rho_map=rho_map,
                  hyperbolic=list(H.hyperbolic), meta=meta)
    return validate(S)


# ---------------------------------------------------------------- product regions

@dataclass
class ProductRegion:
    U: int
    F: list[int]
    E: list[int]
    P: np.ndarray
    phi: dict[tuple[int, int], int]
    gate: np.ndarray
    threshold: int
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"U": self.U, "F": self.F, "E": self.E, "P": self.P.tolist(),
                "threshold": self.threshold, "notes": self.notes}


def _distinct_reps(H: HInstance, pts: np.ndarray, doms) -> list[int]:
    """Smallest-id representative of each distinct projection tuple on doms."""
    doms = [u for u in doms if not H.is_point(u)]
    if not doms:
        return [int(pts[0])]
    keys = np.stack([H.pi[u][pts, 0] for u in doms], axis=1)
    _, first = np.unique(keys, axis=0, return_index=True)
    return sorted(int(pts[i]) for i in first)


def product_region(H: HInstance, U_id: int, E: int | None = None, max_pairs: int = 4000,
                   seed: int = 0) -> ProductRegion:
    """P_U, the realized F_U × E_U, and the gate onto P_U."""
    from .realization import pr_cost
    U = H.index(U_id)
    if E is None:
        from .verifier import constants_for
        E = constants_for(H, seed).E
    cost = pr_cost(H, [U], None)
    thr = max(E, int(cost.min()))
    P = np.flatnonzero(cost <= thr)
    inside = H.nested_in(U)
    perp = np.flatnonzero(H.orth[U])
    F = _distinct_reps(H, P, inside)
    Ereps = _distinct_reps(H, P, perp) if len(perp) else [int(P[0])]
    notes = []
    pairs = [(f, e) for f in F for e in Ereps]
    if len(pairs) > max_pairs:
        rng = np.random.default_rng(seed)
        pick = np.sort(rng.choice(len(pairs), size=max_pairs, replace=False))
        pairs = [pairs[i] for i in pick]
        notes.append(f"phi sampled on {max_pairs} of {len(F) * len(Ereps)} pairs")
    above = [V for V in range(H.m) if H.proper_nest[U, V] or H.trans[U, V]]
    targets = np.zeros((len(pairs), H.m), dtype=np.int64)
    for q, (f, e) in enumerate(pairs):
        for u in inside:
            targets[q, u] = H.pi[u][f, 0]
        for u in perp:
            targets[q, u] = H.pi[u][e, 0]
        for V in above:
            targets[q, V] = int(H.rho_set[(U, V)].min())
    real, _ = realize_targets(H, targets) if len(pairs) else (np.zeros(0, int), None)
    phi = {(int(f), int(e)): int(x) for (f, e), x in zip(pairs, real)}
    g, _ = gate_table(H, P)
    return ProductRegion(H.ids[U], F, Ereps, P, phi, g, thr, notes)


# ---------------------------------------------------------------- hulls

def hull_mask(G: MetricGraph, pts) -> np.ndarray:
    """Union of the intervals between every pair of the given vertices."""
    pts = np.unique(np.asarray(pts, dtype=np.int64))
    D = G.dist
    mask = np.zeros(G.n, dtype=bool)
    mask[pts] = True
    for i, a in enumerate(pts):
        for b in pts[i + 1:]:
            mask |= D[a] + D[b] == D[a, b]
    return mask


def hull_threshold(H: HInstance, constants=None) -> int:
    if constants is None:
        from .verifier import constants_for
        constants = constants_for(H)
    return max(max(constants.theta_e.values(), default=0), 1)


def _hull_excess(H: HInstance, A) -> np.ndarray:
    """max_W d_W(π_W p, hull_W(π_W A)) for every p."""
    A = np.asarray(A, dtype=np.int64)
    ex = np.zeros(H.X.n, dtype=np.int64)
    for u in range(H.m):
        if H.is_point(u):
            continue
        mask = hull_mask(H.graphs[u], np.unique(H.pi[u][A]))
        np.maximum(ex, H.dist_to_set(u, np.flatnonzero(mask)), out=ex)
    return ex


def hull_set(H: HInstance, A, theta: int) -> np.ndarray:
    return np.flatnonzero(_hull_excess(H, A) <= theta)


@dataclass
class Hull:
    points: np.ndarray
    retraction: np.ndarray
    theta: int
    lipschitz: int
    max_deviation: int

    def __call__(self, p: int) -> int:
        return int(self.retraction[p])


def _check_theta(H: HInstance, theta: int, constants) -> None:
    t0 = hull_threshold(H, constants)
    if theta < t0:
        raise ValueError(f"theta={theta} is below the hull threshold {t0}")


def finite_hull(H: HInstance, A, theta: int, constants=None) -> Hull:
    """H_θ(A) with a retraction realizing closest-point tuples inside the hull."""
    A = np.unique(np.asarray(list(A), dtype=np.int64))
    if len(A) == 0 or len(A) > 6:
        raise ValueError("finite_hull needs 1 to 6 points")
    _check_theta(H, theta, constants)
    pts = hull_set(H, A, theta)
    targets = np.zeros((H.X.n, max(H.m, 1)), dtype=np.int64)
    for u in range(H.m):
        if H.is_point(u):
            continue
        G = H.graphs[u]
        hm = np.flatnonzero(hull_mask(G, np.unique(H.pi[u][A])))
        cl = hm[np.argmin(G.dist[:, hm], axis=1)]
        targets[:, u] = cl[H.pi[u][:, 0]]
    return _finish_hull(H, pts, targets, theta)


def _finish_hull(H: HInstance, pts, targets, theta) -> Hull:
    real, dev = realize_targets(H, targets[:, :H.m], cand=pts) if H.m else \
        (np.full(H.X.n, pts[0]), np.zeros(H.X.n, int))
    real[pts] = pts
    dev[pts] = 0
    return Hull(pts, real, theta, coarse_lipschitz(H.X, real), int(dev.max()))


def side_centers(G: MetricGraph, a: int, b: int) -> np.ndarray:
    """For each vertex c, a vertex on a geodesic [a, b] closest to both other sides.

    Among interval vertices the one minimising the larger distance to the
    intervals [a, c] and [b, c] is chosen, smallest id on ties.
    """
    D = G.dist
    I = np.flatnonzero(D[a] + D[b] == D[a, b])
    out = np.empty(G.n, dtype=np.int64)
    DI = D[I]
    for c in range(G.n):
        mac = D[a] + D[c] == D[a, c]
        mbc = D[b] + D[c] == D[b, c]
        far = np.maximum(DI[:, mac].min(axis=1), DI[:, mbc].min(axis=1))
        out[c] = I[int(np.argmin(far))]
    return out


def pair_hull(H: HInstance, x: int, y: int, theta: int, constants=None) -> Hull:
    """H_θ(x, y) with the triangle-center retraction."""
    _check_theta(H, theta, constants)
    pts = hull_set(H, [x, y], theta)
    targets = np.zeros((H.X.n, max(H.m, 1)), dtype=np.int64)
    for u in range(H.m):
        if H.is_point(u):
            continue
        P = H.pi[u]
        centers = side_centers(H.graphs[u], int(P[x].min()), int(P[y].min()))
        targets[:, u] = centers[P[:, 0]]
    return _finish_hull(H, pts, targets, theta)


def hausdorff(G: MetricGraph, A, B) -> int:
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    blk = G.rows(A, B)
    return int(max(blk.min(axis=1).max(), blk.min(axis=0).max()))


def hull_properties(H: HInstance, n_sets: int = 200, max_size: int = 4, seed: int = 0,
                    theta: int | None = None, theta2: int | None = None, K: int = 1) -> dict:
    """Measured constants for the four hull properties over a random corpus.

    (1) diam H_θ(A) ≤ K diam A + C; (2) A' ⊂ H_θ(A) ⇒ H_θ(A') ⊂ H_θ''(A);
    (3) Hausdorff stability under moving A; (4) H_θ vs H_θ' Hausdorff bound.
    """
    rng = np.random.default_rng(seed)
    t0 = hull_threshold(H)
    theta = t0 if theta is None else theta
    theta2 = 2 * theta if theta2 is None else theta2
    n = H.X.n
    C1 = C3 = C4 = 0
    tpp = theta
    for _ in range(n_sets):
        k = int(rng.integers(1, max_size + 1))
        A = np.unique(rng.integers(n, size=k))
        ex = _hull_excess(H, A)
        h = np.flatnonzero(ex <= theta)
        dA = H.X.diam(A)
        C1 = max(C1, H.X.diam(h) - K * dA)
        A2 = np.unique(rng.choice(h, size=min(len(h), k)))
        h2 = hull_set(H, A2, theta)
        tpp = max(tpp, int(ex[h2].max()))
        moved = np.array([int(rng.choice(H.X.ball(int(a), 2))) for a in A])
        hm = hull_set(H, moved, theta)
        C3 = max(C3, hausdorff(H.X, h, hm) - K * hausdorff(H.X, A, moved))
        h4 = np.flatnonzero(ex <= theta2)
        C4 = max(C4, hausdorff(H.X, h, h4))
    C = max(C1, C3, C4, 0)
    return {"theta": theta, "theta_prime": theta2, "K": K, "C": int(C), "theta_pp": int(tpp),
            "C_items": {"1": int(C1), "3": int(C3), "4": int(C4)}, "sets": n_sets}


# ---------------------------------------------------------------- medians

def median_targets(H: HInstance, x: int, y: int, z: int, delta: int) -> list[np.ndarray]:
    from .metric import triangle_center
    out = []
    for u in range(H.m):
        P = H.pi[u]
        out.append(np.array([triangle_center(H.graphs[u], int(P[x].min()), int(P[y].min()),
                                             int(P[z].min()), delta)]))
    return out


@dataclass
class MedianResult:
    point: int
    deviation: int
    consistency: int
    bound: int


def coarse_median(H: HInstance, x: int, y: int, z: int, constants=None) -> MedianResult:
    """Realize the tuple of δ-centers of the projected triangles."""
    if constants is None:
        from .verifier import constants_for
        constants = constants_for(H)
    if H.m == 0:
        return MedianResult(int(x), 0, 0, 0)
    b = median_targets(H, x, y, z, constants.delta)
    m, dev = realize_brute(H, b)
    return MedianResult(m, dev, consistency_threshold(H, b), 3 * constants.E + constants.delta)


def triples_constants(H: HInstance, samples: int = 200, seed: int = 0, constants=None) -> dict:
    """Measured (κ, h(0)) for d(μ(a,b,c), μ(a',b,c)) ≤ κ d(a,a') + h(0).

    κ is the largest jump over adjacent a, a'; h(0) the excess over κ·d on
    random pairs.  Also reports the degenerate-triple defect d(μ(a,a,b), a).
    """
    rng = np.random.default_rng(seed)
    n = H.X.n
    if constants is None:
        from .verifier import constants_for
        constants = constants_for(H)

    def mu(a, b, c):
        return coarse_median(H, a, b, c, constants).point

    jumps, far = [], []
    degenerate = 0
    for _ in range(samples):
        a, b, c = (int(v) for v in rng.integers(n, size=3))
        m0 = mu(a, b, c)
        nb = H.X.neighbors(a)
        a1 = int(nb[rng.integers(len(nb))]) if len(nb) else a
        jumps.append(H.X.d(m0, mu(a1, b, c)))
        a2 = int(rng.integers(n))
        far.append((H.X.d(a, a2), H.X.d(m0, mu(a2, b, c))))
        degenerate = max(degenerate, H.X.d(mu(a, a, b), a))
    kappa = max(1, max(jumps, default=0))
    h0 = max((dm - kappa * da for da, dm in far), default=0)
    return {"kappa": int(kappa), "h0": int(max(h0, 0)), "degenerate_defect": int(degenerate),
            "samples": samples}


def mu_convexity(H: HInstance, Y, samples: int = 200, seed: int = 0, constants=None) -> int:
    """Largest d_X(μ(y, y', x), Y) over sampled y, y' ∈ Y and x ∈ X."""
    Y = _as_subset(H, Y)
    rng = np.random.default_rng(seed)
    dY = H.X.dist_to_set(Y)
    best = 0
    for _ in range(samples):
        y, y2 = (int(v) for v in rng.choice(Y, size=2))
        x = int(rng.integers(H.X.n))
        best = max(best, int(dY[coarse_median(H, y, y2, x, constants).point]))
    return best


# ---------------------------------------------------------------- relative hulls

@dataclass
class RelativeHull:
    points: np.ndarray
    instance: HInstance
    gate: np.ndarray
    geodesics: dict[int, list[int]]
    theta: int


def relative_hull(H: HInstance, x: int, y: int, theta: int) -> RelativeHull:
    """M_θ(x, y) and its induced structure with C U replaced by γ_U."""
    if all(H.hyperbolic):
        raise ValueError("relative_hull needs an instance with non-hyperbolic minimal domains")
    from .metric import path_graph
    gam, rmap, graphs = {}, [], []
    near = np.zeros(H.X.n, dtype=np.int64)
    for u in range(H.m):
        G = H.graphs[u]
        a, b = int(H.pi[u][x].min()), int(H.pi[u][y].min())
        g = G.geodesic(a, b)
        gam[H.ids[u]] = g
        gv = np.asarray(g)
        if H.hyperbolic[u]:
            r = np.argmin(G.dist[:, gv], axis=1)
        else:
            r = np.minimum(G.dist[a], len(g) - 1)
        rmap.append(r)
        graphs.append(path_graph(len(g)))
        np.maximum(near, H.dist_to_set(u, gv), out=near)
    pts = np.flatnonzero(near <= theta)
    pts = np.union1d(pts, [x, y])
    pts = _repair(H.X, pts)
    targets = np.zeros((H.X.n, H.m), dtype=np.int64)
    for u in range(H.m):
        targets[:, u] = np.asarray(gam[H.ids[u]])[rmap[u][H.pi[u][:, 0]]]
    g, _ = realize_targets(H, targets, cand=pts)
    g[pts] = pts
    G, vs = H.X.induced(pts)
    pi = [pad_sets([rmap[u][H.pi[u][v]] for v in vs]) for u in range(H.m)]
    rho_set = {(a, c): np.unique(rmap[c][s]) for (a, c), s in H.rho_set.items()}
    rho_map = {}
    for (w, v), tab in H.rho_map.items():
        gw = np.asarray(gam[H.ids[w]])
        rho_map[(w, v)] = pad_sets([rmap[v][tab[p]] for p in gw])
    inst = HInstance(X=G, ids=list(H.ids), names=list(H.names), graphs=graphs, nest=H.nest.copy(),
                     orth=H.orth.copy(), maximal=H.maximal, containers=dict(H.containers), pi=pi,
                     rho_set=rho_set, rho_map=rho_map, hyperbolic=[True] * H.m,
                     meta={"kind": "relative_hull", "x": int(x), "y": int(y), "theta": int(theta),
                           "vertices": vs.tolist()})
    return RelativeHull(pts, validate(inst), g, gam, theta)
