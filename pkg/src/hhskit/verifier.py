"""Axiom checks for hierarchical structures, with measured constants.

Every check returns an :class:`AxiomResult`.  Constants are the smallest
integers for which the axiom holds on the given finite instance; an axiom
*fails* either structurally (relations) or when a measured constant exceeds
a bound declared in ``H.meta["declared"]``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np
from scipy.sparse.csgraph import shortest_path

from .metric import GEODESIC_CAP, delta_hyperbolicity
from .model import HInstance

PR_EXHAUSTIVE_LIMIT = 10**6
PAIR_BLOCK = 4_000_000
FIXED_CONSTANTS = {"pr_exhaustive_limit": PR_EXHAUSTIVE_LIMIT, "geodesic_cap": GEODESIC_CAP}


@dataclass
class AxiomResult:
    name: str
    passed: bool
    constants: dict[str, Any] = field(default_factory=dict)
    witnesses: list[dict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class ConstantsReport:
    delta: int = 0
    xi: int = 0
    K_lip: int = 1
    kappa0: int = 0
    kappa1: int = 0
    complexity_n: int = 0
    lam: int = 1
    E: int = 1
    alpha: int = 0
    theta_u: dict[int, int] = field(default_factory=dict)
    theta_e: dict[int, int] = field(default_factory=dict)
    chi: int = 0

    def to_json(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        d["theta_u"] = {str(k): v for k, v in self.theta_u.items()}
        d["theta_e"] = {str(k): v for k, v in self.theta_e.items()}
        return d

    def tu(self, kappa: int) -> int:
        """θ_u at κ, saturating beyond the measured range."""
        if not self.theta_u:
            return 0
        keys = sorted(self.theta_u)
        k = min(max(int(math.ceil(kappa)), keys[0]), keys[-1])
        return self.theta_u[k]

    def te(self, kappa: int) -> int:
        if not self.theta_e:
            return 0
        ok = [k for k in self.theta_e if k <= kappa]
        return self.theta_e[max(ok)] if ok else self.theta_e[min(self.theta_e)]


@dataclass
class VerificationReport:
    axioms: dict[str, AxiomResult]
    constants: ConstantsReport
    approximations: list[dict] = field(default_factory=list)
    seed: int = 0

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.axioms.values())

    def witnesses(self) -> list[dict]:
        out = []
        for name, a in self.axioms.items():
            if not a.passed:
                out.extend({"axiom": name, **w} for w in a.witnesses)
        return out

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "axioms": {k: v.to_json() for k, v in self.axioms.items()},
            "constants": self.constants.to_json(),
            "witnesses": self.witnesses(),
            "seed": self.seed,
            "approximations": self.approximations,
            "limits": FIXED_CONSTANTS,
        }


def _declared(H: HInstance, key: str):
    return H.meta.get("declared", {}).get(key)


def _bound_check(res: AxiomResult, H: HInstance, key: str, value: int, witness: dict | None):
    lim = _declared(H, key)
    if lim is not None and value > lim:
        res.passed = False
        w = {"constant": key, "measured": int(value), "declared": lim}
        if witness:
            w.update(witness)
        res.witnesses.append(w)


def _active(H: HInstance) -> list[int]:
    """Domains whose C U is not a single point."""
    return [u for u in range(H.m) if not H.is_point(u)]


def pair_blocks(n: int, triangle: bool = True):
    """Yield (xs, ys) index blocks covering ordered (or x<=y) pairs."""
    rows = max(1, PAIR_BLOCK // max(n, 1))
    for lo in range(0, n, rows):
        hi = min(n, lo + rows)
        xs = np.arange(lo, hi)
        ys = np.arange(lo if triangle else 0, n)
        yield xs, ys


# ---------------------------------------------------------------- relations

def verify_relations(H: HInstance) -> AxiomResult:
    res = AxiomResult("relations", True)
    m = H.m
    ids = H.ids
    if m == 0:
        res.constants["complexity_n"] = 0
        res.notes.append("empty index set")
        if H.X.n > 1 and _declared(H, "bounded_diameter") is not None:
            pass
        return res
    N, O = H.nest, H.orth
    tops = [u for u in range(m) if N[u].sum() == 1]
    if len(tops) != 1 or not N[:, tops[0]].all():
        res.passed = False
        res.witnesses.append({"kind": "maximum", "candidates": [ids[u] for u in tops]})
    NN = (N.astype(np.int64) @ N.astype(np.int64)) > 0
    if (NN & ~N).any():
        i, j = np.argwhere(NN & ~N)[0]
        res.passed = False
        res.witnesses.append({"kind": "transitivity", "pair": [ids[i], ids[j]]})
    # V ⊑ W and W ⊥ U imply V ⊥ U
    closure = (N.astype(np.int64) @ O.astype(np.int64)) > 0
    bad = closure & ~O
    for v, u in zip(*np.nonzero(bad)):
        w = int(np.flatnonzero(N[v] & O[:, u])[0])
        res.passed = False
        res.witnesses.append({"kind": "orthogonality_closure", "V": ids[v], "W": ids[w], "U": ids[u]})
    both = O & (N | N.T)
    for i, j in zip(*np.nonzero(np.triu(both))):
        res.passed = False
        res.witnesses.append({"kind": "orthogonal comparable pair", "pair": [ids[i], ids[j]]})
    found = {}
    for T in range(m):
        inT = N[:, T]
        for U in np.flatnonzero(inT):
            partners = np.flatnonzero(inT & O[:, U])
            if len(partners) == 0:
                continue
            cand = [W for W in np.flatnonzero(inT) if W != T and N[partners, W].all()]
            declared = H.containers.get((T, int(U)))
            if declared is not None and declared in cand:
                found[(T, int(U))] = declared
            elif cand:
                found[(T, int(U))] = int(cand[0])
                if declared is not None:
                    res.notes.append(f"declared container {ids[declared]} for ({ids[T]},{ids[U]}) "
                                     f"does not contain all partners; {ids[cand[0]]} does")
            else:
                res.passed = False
                W = declared
                if W is None:
                    others = [W for W in np.flatnonzero(inT) if W != T]
                    W = max(others, key=lambda w: N[partners, w].sum()) if others else None
                V = partners[0] if W is None else partners[~N[partners, W]][0]
                res.witnesses.append({"kind": "container", "T": ids[T], "U": ids[U], "V": ids[int(V)],
                                      "W": None if W is None else ids[int(W)]})
    n = H.complexity()
    res.constants["complexity_n"] = n
    res.constants["containers"] = {f"{ids[t]},{ids[u]}": ids[w] for (t, u), w in sorted(found.items())}
    width = H.max_orth_family()
    res.constants["orthogonal_width"] = width
    if width > n:
        res.passed = False
        res.witnesses.append({"kind": "orthogonal family exceeds complexity", "size": width, "n": n})
    return res


# ---------------------------------------------------------------- projections

def _pi_diam(H: HInstance, u: int) -> int:
    D = H.graphs[u].dist
    P = H.pi[u]
    w = P.shape[1]
    return max(int(D[P[:, a], P[:, b]].max()) for a in range(w) for b in range(w))


def verify_projection_bounds(H: HInstance) -> AxiomResult:
    res = AxiomResult("projections", True)
    xi, xi_w = 0, None
    for u in range(H.m):
        d = _pi_diam(H, u)
        if d > xi:
            xi, xi_w = d, {"domain": H.ids[u], "source": "pi"}
    for (i, j), s in H.rho_set.items():
        d = H.graphs[j].diam(s)
        if d > xi:
            xi, xi_w = d, {"domain": H.ids[j], "source": f"rho {H.ids[i]}->{H.ids[j]}"}
    e = H.X.edges
    move, move_w = 0, None
    for u in _active(H):
        if len(e) == 0:
            break
        D = H.graphs[u].dist
        P = H.pi[u]
        w = P.shape[1]
        best = None
        for a in range(w):
            for b in range(w):
                blk = D[P[e[:, 0], a], P[e[:, 1], b]]
                best = blk if best is None else np.minimum(best, blk)
        k = int(np.argmax(best))
        if best[k] > move:
            move, move_w = int(best[k]), {"domain": H.ids[u], "edge": e[k].tolist()}
    K = max(1, math.ceil(move / 2))
    res.constants.update(xi=xi, K_lip=K, max_adjacent_move=move)
    _bound_check(res, H, "xi", xi, xi_w)
    _bound_check(res, H, "K_lip", K, move_w)
    return res


# ---------------------------------------------------------------- consistency

def _diam_union_rows(D: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Row-wise diameter of the vertex sets given as columns of ``cols``."""
    out = np.zeros(len(cols), dtype=np.int64)
    for a in range(cols.shape[1]):
        for b in range(a + 1, cols.shape[1]):
            np.maximum(out, D[cols[:, a], cols[:, b]], out=out)
    return out


def nested_second_term(H: HInstance, v: int, w: int, bv_cols: np.ndarray, bw_cols: np.ndarray) -> np.ndarray:
    """diam_v(b_v ∪ ρ^w_v(b_w)) row-wise for padded coordinate arrays."""
    tab = H.rho_map[(w, v)]
    img = tab[bw_cols].reshape(len(bw_cols), -1)
    return _diam_union_rows(H.graphs[v].dist, np.concatenate([bv_cols, img], axis=1))


def verify_consistency(H: HInstance) -> AxiomResult:
    res = AxiomResult("consistency", True)
    trans = H.trans
    proper = H.proper_nest
    k0, w0 = 0, None
    for v, w in zip(*np.nonzero(np.triu(trans))):
        v, w = int(v), int(w)
        a = H.dist_to_set(w, H.rho_set[(v, w)])
        b = H.dist_to_set(v, H.rho_set[(w, v)])
        t = np.minimum(a, b)
        x = int(np.argmax(t))
        if t[x] > k0:
            k0, w0 = int(t[x]), {"kind": "transverse", "V": H.ids[v], "W": H.ids[w], "x": x}
    for v, w in zip(*np.nonzero(proper)):
        v, w = int(v), int(w)
        a = H.dist_to_set(w, H.rho_set[(v, w)])
        if a.max() == 0:
            continue
        b = nested_second_term(H, v, w, H.pi[v], H.pi[w])
        t = np.minimum(a, b)
        x = int(np.argmax(t))
        if t[x] > k0:
            k0, w0 = int(t[x]), {"kind": "nested", "V": H.ids[v], "W": H.ids[w], "x": x}
    # third clause: U ⊑ V and (V ⊊ W or (V ⋔ W and W not ⊥ U))
    for u, v in zip(*np.nonzero(proper)):
        u, v = int(u), int(v)
        for w in range(H.m):
            if not (proper[v, w] or (trans[v, w] and not H.orth[w, u])):
                continue
            d = H.dU(w, H.rho_set[(u, w)], H.rho_set[(v, w)])
            if d > k0:
                k0, w0 = d, {"kind": "rho", "U": H.ids[u], "V": H.ids[v], "W": H.ids[w]}
    k1, w1 = 0, None
    for u in range(H.m):
        above = np.flatnonzero(proper[u] | trans[u])
        for v in above:
            for w in above:
                v, w = int(v), int(w)
                if v == w:
                    continue
                if trans[v, w]:
                    t = min(H.dU(w, H.rho_set[(u, w)], H.rho_set[(v, w)]),
                            H.dU(v, H.rho_set[(u, v)], H.rho_set[(w, v)]))
                elif proper[v, w]:
                    first = H.dU(w, H.rho_set[(u, w)], H.rho_set[(v, w)])
                    img = H.rho_image(w, v, H.rho_set[(u, w)])
                    second = H.graphs[v].diam(np.union1d(H.rho_set[(u, v)], img))
                    t = min(first, second)
                else:
                    continue
                if t > k1:
                    k1, w1 = t, {"U": H.ids[u], "V": H.ids[v], "W": H.ids[w]}
    res.constants.update(kappa0=k0, kappa1=k1)
    if w0:
        res.constants["kappa0_witness"] = w0
    if w1:
        res.constants["kappa1_witness"] = w1
    _bound_check(res, H, "kappa0", k0, w0)
    _bound_check(res, H, "kappa1", k1, w1)
    return res


# ---------------------------------------------------------------- bounded geodesic image

def _avoid_pairs(G, forbidden: np.ndarray) -> np.ndarray:
    """Mask of vertex pairs joined by a geodesic of G missing ``forbidden``."""
    keep = np.flatnonzero(~forbidden)
    ok = np.zeros((G.n, G.n), dtype=bool)
    if len(keep) == 0:
        return ok
    sub = G.csr[keep][:, keep]
    d = shortest_path(sub, method="D", directed=False, unweighted=True)
    same = np.isfinite(d) & (d == G.dist[np.ix_(keep, keep)])
    ok[np.ix_(keep, keep)] = same
    return ok


def _maxdist_table(H: HInstance, w: int, v: int) -> np.ndarray:
    """max distance in C v between ρ^w_v(p) and ρ^w_v(q) for p, q in C w."""
    tab = H.rho_map[(w, v)]
    D = H.graphs[v].dist
    out = None
    for a in range(tab.shape[1]):
        for b in range(tab.shape[1]):
            blk = D[tab[:, a]][:, tab[:, b]]
            out = blk if out is None else np.maximum(out, blk)
    return out


def bgi_pair(H: HInstance, v: int, w: int) -> tuple[int, dict | None]:
    """Smallest E for which bounded geodesic image holds for v ⊊ w."""
    G = H.graphs[w]
    M = _maxdist_table(H, w, v)
    if M.max() == 0:
        return 0, None
    dr = G.dist_to_set(H.rho_set[(v, w)])
    for E in range(int(M.max()) + 1):
        ok = _avoid_pairs(G, dr <= E)
        viol = ok & (M > E)
        if not viol.any():
            return E, None
    return int(M.max()), None


def bgi_variant(H: HInstance, v: int, w: int, E: int, delta: int) -> int:
    """Largest d_v(x, y) over x, y whose projections to C w are joined by a
    geodesic staying (E + 2δ)-far from ρ^v_w."""
    G = H.graphs[w]
    dr = G.dist_to_set(H.rho_set[(v, w)])
    ok = _avoid_pairs(G, dr <= E + 2 * delta)
    if not ok.any() or H.is_point(v):
        return 0
    Pw = H.pi[w]
    worst = 0
    for xs, ys in pair_blocks(H.X.n):
        reach = None
        for a in range(Pw.shape[1]):
            for b in range(Pw.shape[1]):
                blk = ok[Pw[xs, a]][:, Pw[ys, b]]
                reach = blk if reach is None else (reach | blk)
        if not reach.any():
            continue
        dv = H.proj_dist(v, xs, ys)
        worst = max(worst, int(dv[reach].max()))
    return worst


def verify_bgi(H: HInstance, delta: int = 0) -> AxiomResult:
    res = AxiomResult("bounded_geodesic_image", True)
    E, wit = 0, None
    per = {}
    for v, w in zip(*np.nonzero(H.proper_nest)):
        v, w = int(v), int(w)
        if H.is_point(w):
            continue
        e, _ = bgi_pair(H, v, w)
        per[f"{H.ids[v]}<{H.ids[w]}"] = e
        if e > E:
            E, wit = e, {"V": H.ids[v], "W": H.ids[w]}
    variant = 0
    for v, w in zip(*np.nonzero(H.proper_nest)):
        v, w = int(v), int(w)
        if H.is_point(w) or H.is_point(v):
            continue
        variant = max(variant, bgi_variant(H, v, w, max(E, 1), delta))
    res.constants.update(E_bgi=E, per_pair=per, variant_max_dV=variant)
    _bound_check(res, H, "E_bgi", E, wit)
    lim = _declared(H, "E")
    if lim is not None and variant > lim:
        res.passed = False
        res.witnesses.append({"constant": "bgi_variant", "measured": variant, "declared": lim})
    return res


# ---------------------------------------------------------------- large links

def large_links_lambda(H: HInstance, E: int, witness: bool = False):
    """λ needed for the canonical witness family at threshold E.

    One pass over unordered pairs; for each W the family is the set of
    ⊑-maximal T ⊊ W with d_T(x, x') ≥ E.  Point domains W with the same set
    of non-point subdomains share one computation.
    """
    proper = H.proper_nest
    groups: dict = {}
    for W in range(H.m):
        subs = tuple(T for T in np.flatnonzero(proper[:, W]) if not H.is_point(T))
        if not subs:
            continue
        key = ("point", subs) if H.is_point(W) else ("space", W)
        groups.setdefault(key, (W, subs))
    if not groups:
        return 1, None
    active = sorted({T for _, subs in groups.values() for T in subs}
                    | {W for (kind, _), (W, _) in groups.items() if kind == "space"})
    drho = {}
    for (kind, _), (W, subs) in groups.items():
        if kind == "space":
            for T in subs:
                drho[(W, T)] = H.dist_to_set(W, H.rho_set[(T, W)])
    lam, wit = 1, None
    for xs, ys in pair_blocks(H.X.n):
        dist = {u: H.proj_dist(u, xs, ys) for u in active}
        large = {T: dist[T] >= E for T in active}
        for (kind, _), (W, subs) in groups.items():
            count = np.zeros((len(xs), len(ys)), dtype=np.int16)
            members = []
            for T in subs:
                member = large[T].copy()
                for S2 in subs:
                    if proper[T, S2]:
                        member &= ~large[S2]
                count += member
                members.append((T, member))
            if kind == "point":
                ratios = [count]
            else:
                dW = dist[W] + 1
                rx = np.zeros(count.shape, dtype=np.int64)
                ry = np.zeros(count.shape, dtype=np.int64)
                for T, member in members:
                    d = drho[(W, T)]
                    np.maximum(rx, np.where(member, d[xs][:, None], 0), out=rx)
                    np.maximum(ry, np.where(member, d[ys][None, :], 0), out=ry)
                ratios = [-(-np.maximum(count, rx) // dW), -(-np.maximum(count, ry) // dW)]
            for ratio in ratios:
                k = int(ratio.max())
                if k > lam:
                    lam = k
                    if witness:
                        i, j = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
                        wit = {"W": H.ids[W], "x": int(xs[i]), "x'": int(ys[j]),
                               "family_size": int(count[i, j])}
    return lam, wit


def verify_large_links(H: HInstance, E: int, E_min: int | None = None) -> AxiomResult:
    res = AxiomResult("large_links", True)
    lam, wit = large_links_lambda(H, E, witness=True)
    frontier = {}
    if E_min is not None:
        for e in range(max(1, E_min), E + 1):
            frontier[e] = lam if e == E else large_links_lambda(H, e)[0]
    res.constants.update(lam=lam, E=E, frontier={str(k): v for k, v in frontier.items()})
    _bound_check(res, H, "lambda", lam, wit)
    return res


# ---------------------------------------------------------------- partial realization

def fixed_pr_cost(H: HInstance, family) -> np.ndarray:
    """Largest of conditions (2) and (3) of partial realization, per x."""
    cost = np.zeros(H.X.n, dtype=np.int64)
    trans = H.trans
    for Vj in family:
        for V in range(H.m):
            if (H.proper_nest[Vj, V] or trans[Vj, V]) and not H.is_point(V):
                np.maximum(cost, H.dist_to_set(V, H.rho_set[(Vj, V)]), out=cost)
    return cost


def _family_alpha(H: HInstance, family, rng, budget: int, notes: list) -> tuple[int, dict | None]:
    fixed = fixed_pr_cost(H, family)
    imgs = [np.unique(H.pi[V]) for V in family]
    n_choices = math.prod(len(i) for i in imgs)
    # exact hits: x with zero fixed cost realizing a choice on the nose
    zero = np.flatnonzero(fixed == 0)
    if len(zero):
        hit = set()
        for x in zero:
            sets = [np.unique(H.pi[V][x]) for V in family]
            hit.update(_product(sets))
            if len(hit) == n_choices:
                break
        if len(hit) == n_choices:
            return 0, None
    dists = []
    for V, img in zip(family, imgs):
        # d_V(π_V x, p) for p in the image
        dists.append(np.stack([H.dist_to_set(V, [p]) for p in img]))
    if n_choices <= budget:
        choices = _product([np.arange(len(i)) for i in imgs])
        sampled = False
    else:
        idx = rng.choice(n_choices, size=budget, replace=False)
        idx.sort()
        shape = [len(i) for i in imgs]
        choices = [tuple(int(c) for c in np.unravel_index(k, shape)) for k in idx]
        sampled = True
        notes.append({"kind": "partial_realization_sampled", "family": [H.ids[v] for v in family],
                      "choices": n_choices, "sampled": budget})
    worst, wit = 0, None
    for ch in choices:
        cost = fixed.copy()
        for j, c in enumerate(ch):
            np.maximum(cost, dists[j][c], out=cost)
        best = int(cost.min())
        if best > worst:
            worst = best
            wit = {"family": [H.ids[v] for v in family],
                   "choice": [int(imgs[j][c]) for j, c in enumerate(ch)], "gap": best,
                   "sampled": sampled}
    return worst, wit


def _product(sets):
    out = [()]
    for s in sets:
        out = [o + (int(v),) for o in out for v in s]
    return out


def verify_partial_realization(H: HInstance, seed: int = 0, notes: list | None = None) -> AxiomResult:
    res = AxiomResult("partial_realization", True)
    notes = notes if notes is not None else []
    rng = np.random.default_rng(seed)
    fams = H.orth_families(max_size=max(H.complexity(), 1))
    sizes = [math.prod(len(np.unique(H.pi[v])) for v in f) for f in fams]
    total = sum(sizes)
    budget = PR_EXHAUSTIVE_LIMIT if total <= PR_EXHAUSTIVE_LIMIT else max(1, PR_EXHAUSTIVE_LIMIT // max(len(fams), 1))
    alpha, wit = 0, None
    for fam in fams:
        a, w = _family_alpha(H, fam, rng, budget, notes)
        if a > alpha:
            alpha, wit = a, w
    res.constants.update(alpha=alpha, families=len(fams), combinations=total,
                         exhaustive=total <= PR_EXHAUSTIVE_LIMIT)
    if wit:
        res.constants["alpha_witness"] = wit
    _bound_check(res, H, "alpha", alpha, wit)
    return res


# ---------------------------------------------------------------- uniqueness

def pair_profile(H: HInstance, active=None):
    """Occupancy grid over pairs: ``grid[k, d]`` is True when some pair has
    max_U d_U = k and d_X = d."""
    active = _active(H) if active is None else active
    n = H.X.n
    dmax = H.X.diameter()
    kmax = max((H.graphs[u].diameter() for u in active), default=0)
    grid = np.zeros((kmax + 1, dmax + 1), dtype=bool)
    for xs, ys in pair_blocks(n):
        dx = H.X.rows(xs, ys)
        key = np.zeros(dx.shape, dtype=np.int64)
        for u in active:
            np.maximum(key, H.proj_dist(u, xs, ys), out=key)
        code = key.ravel() * (dmax + 1) + dx.ravel()
        grid |= np.bincount(code, minlength=grid.size)[: grid.size].reshape(grid.shape) > 0
    return grid


def uniqueness_profile(H: HInstance) -> dict[int, int]:
    if H.m == 0:
        d = H.X.diameter()
        return {0: d}
    grid = pair_profile(H)
    best = np.where(grid, np.arange(grid.shape[1])[None, :], 0).max(axis=1)
    prof = np.maximum.accumulate(best)
    return {k: int(v) for k, v in enumerate(prof)}


def verify_uniqueness(H: HInstance) -> AxiomResult:
    res = AxiomResult("uniqueness", True)
    prof = uniqueness_profile(H)
    res.constants["theta_u"] = prof
    declared = _declared(H, "theta_u")
    if declared:
        for k, v in declared.items():
            if int(k) in prof and prof[int(k)] > v:
                res.passed = False
                res.witnesses.append({"constant": f"theta_u({k})", "measured": prof[int(k)], "declared": v})
    return res


# ---------------------------------------------------------------- hyperbolicity

def verify_hyperbolicity(H: HInstance, notes: list | None = None, seed: int = 0) -> AxiomResult:
    res = AxiomResult("hyperbolicity", True)
    per = {}
    delta = 0
    for u in range(H.m):
        if H.is_point(u):
            continue
        d = delta_hyperbolicity(H.graphs[u], notes=notes, seed=seed)
        per[str(H.ids[u])] = d
        if H.hyperbolic[u]:
            delta = max(delta, d)
    res.constants.update(delta=delta, per_domain=per)
    _bound_check(res, H, "delta", delta, None)
    return res


# ---------------------------------------------------------------- everything

def verify(H: HInstance, seed: int = 0, theta_e: bool = True, corpus_size: int = 60) -> VerificationReport:
    """Run every axiom check and assemble the constants report."""
    notes: list[dict] = []
    ax: dict[str, AxiomResult] = {}
    ax["relations"] = verify_relations(H)
    ax["hyperbolicity"] = verify_hyperbolicity(H, notes, seed)
    ax["projections"] = verify_projection_bounds(H)
    ax["consistency"] = verify_consistency(H)
    delta = ax["hyperbolicity"].constants["delta"]
    ax["bounded_geodesic_image"] = verify_bgi(H, delta)
    ax["partial_realization"] = verify_partial_realization(H, seed, notes)
    xi = ax["projections"].constants["xi"]
    K = ax["projections"].constants["K_lip"]
    k0 = ax["consistency"].constants["kappa0"]
    alpha = ax["partial_realization"].constants["alpha"]
    E_bgi = ax["bounded_geodesic_image"].constants["E_bgi"]
    E = max(1, delta, xi, k0, K, alpha, E_bgi)
    lim = _declared(H, "E")
    if lim is not None:
        E = max(E, lim) if lim >= max(1, xi, k0, E_bgi) else E
    ax["large_links"] = verify_large_links(H, E, E_min=max(1, xi, k0))
    ax["uniqueness"] = verify_uniqueness(H)
    C = ConstantsReport(
        delta=delta, xi=xi, K_lip=K, kappa0=k0,
        kappa1=ax["consistency"].constants["kappa1"],
        complexity_n=ax["relations"].constants["complexity_n"],
        lam=ax["large_links"].constants["lam"], E=E, alpha=alpha,
        theta_u=ax["uniqueness"].constants["theta_u"], chi=H.chi() if H.m else 0,
    )
    if theta_e and H.m and ax["relations"].passed:
        from .realization import measure_theta_e
        C.theta_e = measure_theta_e(H, C, seed=seed, size=corpus_size)
    return VerificationReport(ax, C, notes, seed)


def constants_for(H: HInstance, seed: int = 0, corpus_size: int = 60) -> ConstantsReport:
    """Constants report of H, cached on the instance."""
    key = ("constants", seed, corpus_size)
    cache = H.meta.setdefault("_cache", {})
    if key not in cache:
        cache[key] = verify(H, seed=seed, corpus_size=corpus_size)
    return cache[key].constants


def report_for(H: HInstance, seed: int = 0, corpus_size: int = 60) -> VerificationReport:
    constants_for(H, seed, corpus_size)
    return H.meta["_cache"][("constants", seed, corpus_size)]
