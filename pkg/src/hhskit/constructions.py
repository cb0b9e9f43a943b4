"""Builders for hierarchical structures.

Complexity-one structures, products, coned-off relative structures,
hieromorphism checks, and the tree-of-structures combination together
with a toy flip-graph example generator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .metric import MetricGraph, product_graph
from .model import HInstance, derive_containers, pad_sets, validate

POINT = None  # placeholder so the lazy point graph below is created once


def point_graph() -> MetricGraph:
    global POINT
    if POINT is None:
        POINT = MetricGraph(1, [])
    return POINT


def _const(n: int, v: int = 0) -> np.ndarray:
    return np.full((n, 1), v, dtype=np.int64)


# ---------------------------------------------------------------- complexity one

def build_complexity_one(G: MetricGraph, name: str = "S") -> HInstance:
    """𝔖 = {S} with C S = G and π_S the identity."""
    H = HInstance(
        X=G, ids=[0], names=[name], graphs=[G],
        nest=np.ones((1, 1), dtype=bool), orth=np.zeros((1, 1), dtype=bool),
        maximal=0, containers={}, pi=[np.arange(G.n, dtype=np.int64)[:, None]],
        rho_set={}, rho_map={}, hyperbolic=[True], meta={"kind": "complexity1"},
    )
    return validate(H)


def build_bounded(G: MetricGraph) -> HInstance:
    """Empty index set (complexity zero)."""
    H = HInstance(X=G, ids=[], names=[], graphs=[], nest=np.zeros((0, 0), bool),
                  orth=np.zeros((0, 0), bool), maximal=None, containers={}, pi=[],
                  rho_set={}, rho_map={}, hyperbolic=[], meta={"kind": "bounded"})
    return validate(H)


# ---------------------------------------------------------------- products

def build_product(H0: HInstance, H1: HInstance) -> HInstance:
    """Product structure on X0 × X1 (vertex ``i * n1 + j``).

    New domains S, U0, U1 and one V_U per old domain all have point
    hyperbolic spaces.  Members of different factors are orthogonal,
    U0 ⊥ U1, and each factor's domains are orthogonal to the other U_i.
    """
    if H0.m == 0 or H1.m == 0:
        raise ValueError("product factors must have a nonempty index set")
    X = product_graph(H0.X, H1.X)
    n0, n1 = H0.X.n, H1.X.n
    m0, m1 = H0.m, H1.m
    old = [(0, u) for u in range(m0)] + [(1, u) for u in range(m1)]
    base = m0 + m1
    S, U0, U1 = base, base + 1, base + 2
    vdom = {k: base + 3 + k for k in range(len(old))}
    m = base + 3 + len(old)
    fac = (H0, H1)
    off = (0, m0)
    nest = np.eye(m, dtype=bool)
    orth = np.zeros((m, m), dtype=bool)
    for i in (0, 1):
        Hi = fac[i]
        sl = slice(off[i], off[i] + Hi.m)
        nest[sl, sl] = Hi.nest
        orth[sl, sl] = Hi.orth
    orth[:m0, m0:base] = True
    orth[m0:base, :m0] = True
    orth[U0, U1] = orth[U1, U0] = True
    orth[:m0, U1] = orth[U1, :m0] = True
    orth[m0:base, U0] = orth[U0, m0:base] = True
    nest[:m0, U0] = True
    nest[m0:base, U1] = True
    nest[:, S] = True
    internal = (H0.orth.any(), H1.orth.any())
    for k, (i, u) in enumerate(old):
        V = vdom[k]
        other = slice(off[1 - i], off[1 - i] + fac[1 - i].m)
        nest[other, V] = True
        perp = np.flatnonzero(fac[i].orth[u]) + off[i]
        nest[perp, V] = True
        if internal[i]:
            # the container for (S, u) must also hold U_{1-i}
            nest[(U1, U0)[i], V] = True
    # transitive closure (nested sets above are already closed, but be safe)
    while True:
        nxt = (nest.astype(np.int64) @ nest.astype(np.int64)) > 0
        if (nxt == nest).all():
            break
        nest = nxt
    graphs = [H0.graphs[u] for u in range(m0)] + [H1.graphs[u] for u in range(m1)]
    graphs += [point_graph()] * (m - base)
    I0 = np.repeat(np.arange(n0), n1)
    I1 = np.tile(np.arange(n1), n0)
    pi = [H0.pi[u][I0] for u in range(m0)] + [H1.pi[u][I1] for u in range(m1)]
    pi += [_const(X.n)] * (m - base)
    proper = nest.copy()
    np.fill_diagonal(proper, False)
    trans = ~(nest | nest.T | orth)
    np.fill_diagonal(trans, False)
    where = {off[0] + u: (0, u) for u in range(m0)}
    where.update({off[1] + u: (1, u) for u in range(m1)})

    def basepoint(v):
        i, u = where[v]
        return np.unique(fac[i].pi[u][0])

    rho_set, rho_map = {}, {}
    for a in range(m):
        for c in range(m):
            if not (proper[a, c] or trans[a, c]):
                continue
            if graphs[c].n == 1:
                rho_set[(a, c)] = np.array([0])
            elif a in where and where[a][0] == where[c][0]:
                i = where[a][0]
                rho_set[(a, c)] = fac[i].rho_set[(where[a][1], where[c][1])]
            else:
                rho_set[(a, c)] = basepoint(c)
    for w in range(m):
        for v in range(m):
            if not proper[v, w]:
                continue
            nw = graphs[w].n
            if graphs[v].n == 1:
                rho_map[(w, v)] = _const(nw)
            elif w in where and where[w][0] == where[v][0]:
                i = where[w][0]
                rho_map[(w, v)] = fac[i].rho_map[(where[w][1], where[v][1])]
            else:
                rho_map[(w, v)] = np.repeat(pad_sets([basepoint(v)]), nw, axis=0)
    names = [f"0:{n}" for n in H0.names] + [f"1:{n}" for n in H1.names] + ["S", "U0", "U1"]
    names += [f"V[{i}:{fac[i].names[u]}]" for i, u in old]
    H = HInstance(
        X=X, ids=list(range(m)), names=names, graphs=graphs, nest=nest, orth=orth, maximal=S,
        containers=derive_containers(nest, orth), pi=pi, rho_set=rho_set, rho_map=rho_map,
        hyperbolic=[True] * m,
        meta={"kind": "product", "factor_sizes": [n0, n1], "factor_domains": [m0, m1],
              "convention": "S0 ⊥ S1, U0 ⊥ U1, S_i ⊥ U_(1-i)"
                            + ("; U_(1-i) ⊑ V_U" if any(internal) else "")},
    )
    return validate(H)


# ---------------------------------------------------------------- relative structures

def cone_off(X: MetricGraph, peripherals) -> MetricGraph:
    """X plus one cone vertex per peripheral (vertex ``X.n + i``)."""
    edges = [tuple(e) for e in X.edges.tolist()]
    for i, P in enumerate(peripherals):
        edges.extend((X.n + i, int(p)) for p in P)
    return MetricGraph(X.n + len(peripherals), edges)


def _nearest_sets(X: MetricGraph, P: np.ndarray) -> list[np.ndarray]:
    D = X.rows(P)
    m = D.min(axis=0)
    return [P[D[:, x] == m[x]] for x in range(X.n)]


def _set_gate(X: MetricGraph, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Vertices of B realising d(A, B)."""
    dA = X.dist_to_set(A)[B]
    return B[dA == dA.min()]


def build_relative(X: MetricGraph, peripherals, structures=None) -> HInstance:
    """Structure relative to a family of disjoint connected peripherals.

    Without ``structures`` each peripheral is a ⊑-minimal domain whose space
    is the induced subgraph (hierarchical-space mode, not assumed
    hyperbolic).  With ``structures[i]`` an instance on the induced
    subgraph of peripheral i (vertices in sorted order), its domains replace
    the peripheral and projections are composed with the closest-point gate.
    """
    periph = [np.unique(np.asarray(list(P), dtype=np.int64)) for P in peripherals]
    seen = np.zeros(X.n, dtype=bool)
    for i, P in enumerate(periph):
        if len(P) == 0:
            raise ValueError(f"peripheral {i} is empty")
        if P.min() < 0 or P.max() >= X.n:
            raise ValueError(f"peripheral {i} has vertices outside the graph")
        if seen[P].any():
            raise ValueError(f"peripheral {i} overlaps an earlier peripheral")
        seen[P] = True
    k = len(periph)
    Ghat = cone_off(X, periph)
    sub = [X.induced(P)[0] for P in periph]
    local = []
    for P in periph:
        idx = -np.ones(X.n, dtype=np.int64)
        idx[P] = np.arange(len(P))
        local.append(idx)
    near = [_nearest_sets(X, P) for P in periph]
    gates = {(i, j): _set_gate(X, periph[i], periph[j]) for i in range(k) for j in range(k) if i != j}
    if structures is None:
        structures = [build_complexity_one(G, name=f"P{i}") for i, G in enumerate(sub)]
        mode = "hierarchical"
    else:
        if len(structures) != k:
            raise ValueError("one structure per peripheral is required")
        for i, Hs in enumerate(structures):
            if Hs.X.n != len(periph[i]) or not np.array_equal(Hs.X.edges, sub[i].edges):
                raise ValueError(f"structure {i} is not on the induced subgraph of its peripheral")
        mode = "hhs"
    owner, where = [], []
    for i, Hs in enumerate(structures):
        for u in range(Hs.m):
            owner.append(i)
            where.append(u)
    m = 1 + len(owner)
    nest = np.eye(m, dtype=bool)
    orth = np.zeros((m, m), dtype=bool)
    nest[:, 0] = True
    base = 1
    offs = []
    for Hs in structures:
        offs.append(base)
        sl = slice(base, base + Hs.m)
        nest[sl, sl] = Hs.nest
        orth[sl, sl] = Hs.orth
        base += Hs.m

    def proj(i, u, verts):
        """π^i_u applied to a set of X vertices of peripheral i."""
        return np.unique(structures[i].pi[u][local[i][np.asarray(verts)]])

    graphs = [Ghat] + [structures[i].graphs[u] for i, u in zip(owner, where)]
    pi = [np.arange(X.n, dtype=np.int64)[:, None]]
    for i, u in zip(owner, where):
        pi.append(pad_sets([proj(i, u, near[i][x]) for x in range(X.n)]))
    rho_set, rho_map = {}, {}
    for a in range(1, m):
        i, u = owner[a - 1], where[a - 1]
        rho_set[(a, 0)] = np.array([X.n + i])
        rows = []
        for p in range(Ghat.n):
            if p < X.n:
                rows.append(proj(i, u, near[i][p]))
            elif p - X.n == i:
                rows.append(proj(i, u, periph[i][:1]))
            else:
                rows.append(proj(i, u, gates[(p - X.n, i)]))
        rho_map[(0, a)] = pad_sets(rows)
        for c in range(1, m):
            j, v = owner[c - 1], where[c - 1]
            if a == c:
                continue
            if i == j:
                Hs = structures[i]
                if (u, v) in Hs.rho_set:
                    rho_set[(a, c)] = Hs.rho_set[(u, v)]
                if (u, v) in Hs.rho_map:
                    rho_map[(a, c)] = Hs.rho_map[(u, v)]
            else:
                rho_set[(a, c)] = proj(j, v, gates[(i, j)])
    names = ["S"] + [f"P{i}:{structures[i].names[u]}" if mode == "hhs" else f"P{i}"
                     for i, u in zip(owner, where)]
    hyper = [True] + ([structures[i].hyperbolic[u] for i, u in zip(owner, where)]
                      if mode == "hhs" else [False] * (m - 1))
    H = HInstance(X=X, ids=list(range(m)), names=names, graphs=graphs, nest=nest, orth=orth,
                  maximal=0, containers=derive_containers(nest, orth), pi=pi, rho_set=rho_set,
                  rho_map=rho_map, hyperbolic=hyper,
                  meta={"kind": "relative", "mode": mode,
                        "peripherals": [P.tolist() for P in periph],
                        "peripheral_domains": [[offs[i] + u for u in range(s.m)]
                                               for i, s in enumerate(structures)]})
    return validate(H)


# ---------------------------------------------------------------- generators

def grid_tail(size: int = 15, tail: int = 30) -> tuple[MetricGraph, list[np.ndarray]]:
    """Two size×size grids joined corner to corner by a path of ``tail`` edges."""
    from .metric import grid_graph
    g = grid_graph(size, size)
    s = size * size
    edges = [tuple(e) for e in g.edges.tolist()] + [(a + s, b + s) for a, b in g.edges.tolist()]
    inner = list(range(2 * s, 2 * s + tail - 1))
    chain = [s - 1] + inner + [s]
    edges += list(zip(chain[:-1], chain[1:]))
    X = MetricGraph(2 * s + tail - 1, edges, name="grid_tail")
    return X, [np.arange(s), np.arange(s, 2 * s)]


def grid_tail_instance(size: int = 15, tail: int = 30, structured: bool = True) -> HInstance:
    X, periph = grid_tail(size, tail)
    if not structured:
        return build_relative(X, periph)
    from .metric import path_graph
    grid = build_product(build_complexity_one(path_graph(size), "a"),
                         build_complexity_one(path_graph(size), "b"))
    return build_relative(X, periph, [grid, grid])


def line_bundle(k: int = 2, length: int = 301, bridge: int = 2) -> tuple[MetricGraph, list[np.ndarray]]:
    """k paths of ``length`` vertices; consecutive midpoints joined by ``bridge`` edges."""
    if k < 1 or length < 2 or bridge < 1:
        raise ValueError("need k ≥ 1, length ≥ 2, bridge ≥ 1")
    edges = []
    lines = []
    for i in range(k):
        vs = np.arange(i * length, (i + 1) * length)
        lines.append(vs)
        edges += list(zip(vs[:-1].tolist(), vs[1:].tolist()))
    nxt = k * length
    mid = length // 2
    for i in range(k - 1):
        inner = list(range(nxt, nxt + bridge - 1))
        nxt += bridge - 1
        chain = [int(lines[i][mid])] + inner + [int(lines[i + 1][mid])]
        edges += list(zip(chain[:-1], chain[1:]))
    return MetricGraph(nxt, edges, name="line_bundle"), lines


# ---------------------------------------------------------------- hieromorphisms

@dataclass
class Hieromorphism:
    """f: X → X′, f◇ on domain indices, and f*(U): C U → C f◇(U) as vertex arrays."""

    source: HInstance
    target: HInstance
    f: np.ndarray
    f_dom: np.ndarray
    f_star: dict[int, np.ndarray]

    def __post_init__(self):
        self.f = np.asarray(self.f, dtype=np.int64)
        self.f_dom = np.asarray(self.f_dom, dtype=np.int64)
        self.f_star = {int(k): np.asarray(v, dtype=np.int64) for k, v in self.f_star.items()}


def identity_hieromorphism(H: HInstance) -> Hieromorphism:
    return Hieromorphism(H, H, np.arange(H.X.n), np.arange(H.m),
                         {u: np.arange(H.graphs[u].n) for u in range(H.m)})


def factor_inclusion(H0: HInstance, H1: HInstance, P: HInstance, side: int = 0,
                     basepoint: int = 0) -> Hieromorphism:
    """X_side → X0 × X1 at the given basepoint of the other factor."""
    n1 = H1.X.n
    if side == 0:
        f = np.arange(H0.X.n) * n1 + basepoint
        src, off = H0, 0
    else:
        f = basepoint * n1 + np.arange(n1)
        src, off = H1, H0.m
    return Hieromorphism(src, P, f, np.arange(src.m) + off,
                         {u: np.arange(src.graphs[u].n) for u in range(src.m)})


def _hausdorff_rows(D: np.ndarray, left: np.ndarray, right: np.ndarray) -> int:
    """Largest row-wise Hausdorff distance between padded vertex-set tables."""
    blk = D[left[:, :, None], right[:, None, :]]
    return int(max(blk.min(axis=2).max(), blk.min(axis=1).max()))


def qi_constant(A: MetricGraph, B: MetricGraph, g: np.ndarray) -> int:
    """Smallest integer ξ making g a (ξ, ξ)-quasi-isometry A → B."""
    DA = A.dist
    DB = B.dist[np.ix_(g, g)]
    up = int(np.max(-(-DB // (DA + 1))))
    down = int(np.max(-(-DA // (DB + 1))))
    cover = int(B.dist_to_set(np.unique(g)).max())
    return max(1, up, down, cover)


def check_hieromorphism(h: Hieromorphism, profile: bool = True) -> dict:
    """Structural checks, diagram defects, QI constants, fullness and image convexity."""
    S, T = h.source, h.target
    fd = h.f_dom
    failures = []
    if len(np.unique(fd)) != len(fd):
        failures.append({"kind": "not_injective"})
    for rel, A, B in (("nest", S.nest, T.nest), ("orth", S.orth, T.orth), ("trans", S.trans, T.trans)):
        bad = A & ~B[np.ix_(fd, fd)]
        for u, v in zip(*np.nonzero(bad)):
            failures.append({"kind": f"{rel}_not_preserved", "U": S.ids[u], "V": S.ids[v]})
    for u in range(S.m):
        g = h.f_star.get(u)
        if g is None or len(g) != S.graphs[u].n or (len(g) and g.max() >= T.graphs[fd[u]].n):
            failures.append({"kind": "bad_f_star", "U": S.ids[u]})
    if failures:
        # metric checks are meaningless once the index map is broken
        return {"structural_failures": failures, "passed": False, "full": False,
                "fullness_witnesses": []}
    pi_def, qi, rho_def = {}, {}, 0
    for u in range(S.m):
        g = h.f_star[u]
        fu = fd[u]
        G = T.graphs[fu]
        img = g[S.pi[u]]
        tgt = T.pi[fu][h.f]
        D = G.dist
        worst = 0
        for a in range(img.shape[1]):
            for b in range(tgt.shape[1]):
                worst = max(worst, int(D[img[:, a], tgt[:, b]].max()))
        pi_def[S.ids[u]] = worst
        qi[S.ids[u]] = qi_constant(S.graphs[u], G, g)
    for (a, c), s in S.rho_set.items():
        if (fd[a], fd[c]) in T.rho_set:
            G = T.graphs[fd[c]]
            rho_def = max(rho_def, _hausdorff_rows(G.dist, h.f_star[c][s][None, :],
                                                   T.rho_set[(fd[a], fd[c])][None, :]))
    for (w, v), tab in S.rho_map.items():
        if (fd[w], fd[v]) in T.rho_map:
            right = T.rho_map[(fd[w], fd[v])][h.f_star[w]]
            rho_def = max(rho_def, _hausdorff_rows(T.graphs[fd[v]].dist, h.f_star[v][tab], right))
    full = []
    for u in range(S.m):
        below = np.flatnonzero(T.nest[:, fd[u]])
        pre = set(fd[np.flatnonzero(S.nest[:, u])].tolist())
        for v in below:
            if int(v) not in pre:
                full.append({"U": S.ids[u], "V'": T.ids[v]})
    rep = {"structural_failures": failures, "pi_defect": pi_def, "rho_defect": int(rho_def),
           "qi": qi, "xi": max(qi.values(), default=1), "full": not full, "fullness_witnesses": full}
    if profile:
        from .convexity import hq_profile
        rep["hq_profile"] = hq_profile(T, np.unique(h.f)).to_json()
    rep["passed"] = not failures
    return rep


# ---------------------------------------------------------------- trees of structures

@dataclass
class TreeOfHHS:
    n_vertices: int
    edges: list[tuple[int, int]]
    vertex_instances: list[HInstance]
    edge_instances: list[HInstance]
    maps: dict[tuple[int, str], Hieromorphism] = field(default_factory=dict)

    def tree(self) -> MetricGraph:
        return MetricGraph(self.n_vertices, self.edges)

    def end(self, e: int, side: str) -> int:
        return self.edges[e][0] if side == "-" else self.edges[e][1]


class CombinationError(ValueError):
    def __init__(self, hypothesis: str, witness: dict):
        super().__init__(f"hypothesis {hypothesis} fails: {witness}")
        self.hypothesis = hypothesis
        self.witness = witness


def _qinv(A: MetricGraph, B: MetricGraph, g: np.ndarray) -> np.ndarray:
    """Quasi-inverse of g: A → B sending b to the smallest a with g(a) nearest b."""
    D = B.dist[:, g]
    return np.argmin(D, axis=1)


def tree_hypotheses(T: TreeOfHHS, support_bound: int | None = None) -> dict:
    """Checks of the combination hypotheses; returns per-edge reports."""
    reports = {}
    for e in range(len(T.edges)):
        for side in "-+":
            h = T.maps[(e, side)]
            r = check_hieromorphism(h)
            reports[f"{e}{side}"] = r
            if r["structural_failures"]:
                raise CombinationError("hieromorphism", {"edge": e, "side": side,
                                                        **r["structural_failures"][0]})
            if not r["full"]:
                raise CombinationError("full", {"edge": e, "side": side, **r["fullness_witnesses"][0]})
            He = T.edge_instances[e]
            Hv = T.vertex_instances[T.end(e, side)]
            top = h.f_dom[He.maximal]
            for V in range(Hv.m):
                if Hv.orth[V, top]:
                    raise CombinationError("4", {"edge": e, "side": side, "V": Hv.ids[V],
                                                 "image_of_maximal": Hv.ids[top]})
    return reports


def combine_tree(T: TreeOfHHS, support_bound: int | None = None, check: bool = True) -> HInstance:
    """Assemble X(𝒯) and its combined structure."""
    if check:
        hyp = tree_hypotheses(T)
    else:
        hyp = {}
    nv = T.n_vertices
    Vs = T.vertex_instances
    tree = T.tree()
    if nv == 1:
        H = Vs[0]
        return H
    off = np.concatenate([[0], np.cumsum([H.X.n for H in Vs])])
    edges = set()
    for v, H in enumerate(Vs):
        for a, b in H.X.edges.tolist():
            edges.add((a + off[v], b + off[v]))
    for e, (lo, hi) in enumerate(T.edges):
        fm, fp = T.maps[(e, "-")].f, T.maps[(e, "+")].f
        for x in range(T.edge_instances[e].X.n):
            a, b = int(fm[x] + off[lo]), int(fp[x] + off[hi])
            edges.add((min(a, b), max(a, b)))
    X = MetricGraph(int(off[-1]), sorted(edges), name="tree_total")
    vert_of = np.repeat(np.arange(nv), [H.X.n for H in Vs])

    # equivalence classes
    nodes = [(v, u) for v in range(nv) for u in range(Vs[v].m)]
    nid = {p: i for i, p in enumerate(nodes)}
    parent = list(range(len(nodes)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for e, (lo, hi) in enumerate(T.edges):
        fm, fp = T.maps[(e, "-")].f_dom, T.maps[(e, "+")].f_dom
        for W in range(T.edge_instances[e].m):
            a, b = find(nid[(lo, int(fm[W]))]), find(nid[(hi, int(fp[W]))])
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict[int, list] = {}
    for i, p in enumerate(nodes):
        groups.setdefault(find(i), []).append(p)
    classes = sorted(groups.values(), key=lambda g: min(g))
    cls_of = {}
    for c, g in enumerate(classes):
        for p in g:
            cls_of[p] = c
    rep = [dict() for _ in classes]
    for c, g in enumerate(classes):
        for v, u in sorted(g):
            if v in rep[c]:
                u0 = rep[c][v]
                if Vs[v].nest[u0, u] or Vs[v].nest[u, u0]:
                    raise CombinationError("no_cycle", {"vertex": v, "U": Vs[v].ids[u0], "U'": Vs[v].ids[u]})
                continue
            rep[c][v] = u
    support = [sorted(r) for r in rep]
    TD = tree.dist
    sdiam = [int(TD[np.ix_(s, s)].max()) for s in support]
    if support_bound is not None:
        for c, d in enumerate(sdiam):
            if d > support_bound:
                raise CombinationError("3", {"class": c, "support": support[c], "diameter": d})
    fav = [s[0] for s in support]
    K = len(classes)
    m = K + 1
    Tidx = K
    nest = np.eye(m, dtype=bool)
    orth = np.zeros((m, m), dtype=bool)
    nest[:, Tidx] = True
    for v, H in enumerate(Vs):
        for a in range(H.m):
            for b in range(H.m):
                ca, cb = cls_of[(v, a)], cls_of[(v, b)]
                if H.nest[a, b]:
                    nest[ca, cb] = True
                if H.orth[a, b]:
                    orth[ca, cb] = True

    # vertex gates: gate_to[v][u] maps X_u into X_v
    from .convexity import gate_table
    nbr = {}
    for e, (lo, hi) in enumerate(T.edges):
        nbr[(lo, hi)] = (e, "-", "+")
        nbr[(hi, lo)] = (e, "+", "-")
    step = {}
    for (u, w), (e, su, sw) in nbr.items():
        hu, hw = T.maps[(e, su)], T.maps[(e, sw)]
        img = np.unique(hu.f)
        g, _ = gate_table(Vs[u], img)
        pre = _qinv(T.edge_instances[e].X, Vs[u].X, hu.f)
        step[(u, w)] = hw.f[pre[g]]
    paths = {}
    for a in range(nv):
        for b in range(nv):
            paths[(a, b)] = _tree_path(tree, a, b)
    gate_to = {}
    for v in range(nv):
        for u in range(nv):
            p = paths[(u, v)]
            tab = np.arange(Vs[u].X.n)
            for s, t in zip(p[:-1], p[1:]):
                tab = step[(s, t)][tab]
            gate_to[(v, u)] = tab

    def beta(v, u_dom, xs_global):
        xs_global = np.asarray(xs_global)
        out = []
        for x in xs_global:
            w = int(vert_of[x])
            loc = gate_to[(v, w)][x - off[w]]
            out.append(np.unique(Vs[v].pi[u_dom][loc]))
        return out

    # comparison maps cmp[c][v]: C rep_v → C fav
    def edge_between(s, t):
        e, ss, st = nbr[(s, t)]
        return e, T.maps[(e, ss)], T.maps[(e, st)]

    cmp = [dict() for _ in classes]
    for c in range(K):
        f0 = fav[c]
        for v in support[c]:
            p = paths[(v, f0)]
            u = rep[c][v]
            tab = np.arange(Vs[v].graphs[u].n)
            for s, t in zip(p[:-1], p[1:]):
                e, hs, ht = edge_between(s, t)
                He = T.edge_instances[e]
                us, ut = rep[c][s], rep[c][t]
                W = int(np.flatnonzero(hs.f_dom == us)[0])
                if ht.f_dom[W] != ut:
                    W2 = [w for w in range(He.m) if hs.f_dom[w] == us and ht.f_dom[w] == ut]
                    W = W2[0]
                back = _qinv(He.graphs[W], Vs[s].graphs[us], hs.f_star[W])
                tab = ht.f_star[W][back[tab]]
            cmp[c][v] = tab

    graphs = [Vs[fav[c]].graphs[rep[c][fav[c]]] for c in range(K)] + [tree]
    pi = []
    for c in range(K):
        v, u = fav[c], rep[c][fav[c]]
        rows = []
        for w in range(nv):
            loc = gate_to[(v, w)]
            rows.append(Vs[v].pi[u][loc])
        pi.append(pad_sets([r for blk in rows for r in blk]))
    pi.append(vert_of[:, None].astype(np.int64))
    proper = nest.copy()
    np.fill_diagonal(proper, False)
    trans = ~(nest | nest.T | orth)
    np.fill_diagonal(trans, False)
    rho_set, rho_map = {}, {}
    common = lambda a, b: [v for v in support[a] if v in rep[b]]
    for a in range(K):
        for b in range(K):
            if a == b:
                continue
            if proper[a, b]:
                vp = next(v for v in common(a, b) if Vs[v].nest[rep[a][v], rep[b][v]])
                Va, Wb = rep[a][vp], rep[b][vp]
                rho_set[(a, b)] = np.unique(cmp[b][vp][Vs[vp].rho_set[(Va, Wb)]])
                Gw = graphs[b]
                back = _qinv(Vs[vp].graphs[Wb], Gw, cmp[b][vp])
                tab = Vs[vp].rho_map[(Wb, Va)][back]
                rho_map[(b, a)] = pad_sets([np.unique(cmp[a][vp][row]) for row in tab])
            elif trans[a, b]:
                cv = [v for v in common(a, b) if (rep[a][v], rep[b][v]) in Vs[v].rho_set]
                if cv:
                    w = cv[0]
                    rho_set[(a, b)] = np.unique(cmp[b][w][Vs[w].rho_set[(rep[a][w], rep[b][w])]])
                else:
                    best = min((int(TD[s, t]), t, s) for s in support[b] for t in support[a])
                    _, t, s = best
                    nxt = paths[(s, t)][1]
                    e, hs, _ = edge_between(s, nxt)
                    Dm = int(hs.f_dom[T.edge_instances[e].maximal])
                    Vb = rep[b][s]
                    if (Dm, Vb) not in Vs[s].rho_set:
                        raise CombinationError("4", {"edge": e, "classes": [a, b]})
                    rho_set[(a, b)] = np.unique(cmp[b][s][Vs[s].rho_set[(Dm, Vb)]])
    for c in range(K):
        rho_set[(c, Tidx)] = np.asarray(support[c])
        rows = []
        for v in range(nv):
            if v in rep[c]:
                rows.append(pi[c][off[v]])
                continue
            s = min(support[c], key=lambda t: (int(TD[v, t]), t))
            prev = paths[(s, v)][1]
            e, hs, _ = edge_between(s, prev)
            D = cls_of[(s, int(hs.f_dom[T.edge_instances[e].maximal]))]
            if (D, c) not in rho_set:
                raise CombinationError("4", {"edge": e, "class": c, "vertex": v})
            rows.append(rho_set[(D, c)])
        rho_map[(Tidx, c)] = pad_sets(rows)
    names = [f"[{Vs[fav[c]].names[rep[c][fav[c]]]}@{fav[c]}]" for c in range(K)] + ["T"]
    hyper = [Vs[fav[c]].hyperbolic[rep[c][fav[c]]] for c in range(K)] + [True]
    H = HInstance(X=X, ids=list(range(m)), names=names, graphs=graphs, nest=nest, orth=orth,
                  maximal=Tidx, containers=derive_containers(nest, orth), pi=pi,
                  rho_set=rho_set, rho_map=rho_map, hyperbolic=hyper,
                  meta={"kind": "combined", "supports": support, "support_diameters": sdiam,
                        "favorites": fav, "vertex_offsets": off.tolist(),
                        "hypotheses": {k: {"full": r["full"], "xi": r["xi"],
                                           "k0": r["hq_profile"]["k0"]} for k, r in hyp.items()}})
    return validate(H)


def _tree_path(tree: MetricGraph, a: int, b: int) -> list[int]:
    return tree.geodesic(a, b)


# ---------------------------------------------------------------- flip example

def _sigma(n: int, paths: int, length: int, rng) -> tuple[MetricGraph, list[np.ndarray]]:
    """Random tree on n vertices containing ``paths`` disjoint boundary paths."""
    core = n - paths * length
    if core < 1:
        raise ValueError(f"Σ with {n} vertices cannot hold {paths} boundary paths of length {length}")
    from .metric import random_tree
    T = random_tree(core, rng)
    edges = [tuple(e) for e in T.edges.tolist()]
    bnd = []
    nxt = core
    for _ in range(paths):
        vs = np.arange(nxt, nxt + length)
        edges += list(zip(vs[:-1].tolist(), vs[1:].tolist()))
        edges.append((int(rng.integers(core)), int(vs[0])))
        bnd.append(vs)
        nxt += length
    return MetricGraph(n, edges, name="sigma"), bnd


PRODUCT_SWAP = np.array([1, 0, 2, 4, 3, 6, 5])


def flip_tree_example(n_vertices: int = 2, sigma: int = 40, fiber: int = 12, boundary: int | None = None,
                      shape: str = "path", seed: int = 0) -> TreeOfHHS:
    """Toy flip graph-manifold tree: vertex spaces Σ_v × R_v glued by swapping factors."""
    from .metric import path_graph
    if not 1 <= n_vertices <= 5:
        raise ValueError("the flip example supports 1 to 5 tree vertices")
    boundary = fiber if boundary is None else boundary
    if boundary < fiber:
        raise ValueError(f"boundary subpath ({boundary}) is shorter than the matched fiber ({fiber})")
    if shape == "path":
        if n_vertices > 3:
            raise ValueError("path-shaped flip trees have at most 3 vertices (supports of diameter ≤ 2)")
        tedges = [(i, i + 1) for i in range(n_vertices - 1)]
    elif shape == "star":
        tedges = [(0, i) for i in range(1, n_vertices)]
    else:
        raise ValueError(f"unknown tree shape {shape!r}")
    rng = np.random.default_rng(seed)
    deg = np.zeros(n_vertices, dtype=int)
    for a, b in tedges:
        deg[a] += 1
        deg[b] += 1
    R = path_graph(fiber)
    Vs, bnds = [], []
    for v in range(n_vertices):
        S, bnd = _sigma(sigma, max(int(deg[v]), 1), boundary, rng)
        bnds.append([b[:fiber] for b in bnd])
        Vs.append(build_product(build_complexity_one(S, "Sigma"), build_complexity_one(R, "R")))
    used = np.zeros(n_vertices, dtype=int)
    Es, maps = [], {}
    ident = np.arange(fiber)
    for e, (a, b) in enumerate(tedges):
        He = build_product(build_complexity_one(path_graph(fiber), "d0"), build_complexity_one(R, "R"))
        Es.append(He)
        ba = bnds[a][used[a]]
        bb = bnds[b][used[b]]
        used[a] += 1
        used[b] += 1
        A, Rr = np.divmod(np.arange(fiber * fiber), fiber)
        fm = ba[A] * fiber + Rr
        fp = bb[Rr] * fiber + A
        pt = np.zeros(1, dtype=np.int64)
        maps[(e, "-")] = Hieromorphism(He, Vs[a], fm, np.arange(7),
                                       {0: ba, 1: ident, **{k: pt for k in range(2, 7)}})
        maps[(e, "+")] = Hieromorphism(He, Vs[b], fp, PRODUCT_SWAP,
                                       {0: ident, 1: bb, **{k: pt for k in range(2, 7)}})
    return TreeOfHHS(n_vertices, tedges, Vs, Es, maps)
