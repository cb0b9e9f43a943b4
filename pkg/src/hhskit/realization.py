"""Consistent tuples and their realization points.

Brute-force realization scans the whole total space.  The constructive
mode builds a totally orthogonal family level by level, extending it from
the ⪯-maximal large-deviation domains until every partial realization
point for the family is close to the tuple.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .metric import triangle_center
from .model import HInstance, Tuple


class RealizationError(RuntimeError):
    """Constructive realization ran over budget; carries the partial state."""

    def __init__(self, msg: str, state: dict):
        super().__init__(msg)
        self.state = state


def _as_sets(b) -> list[np.ndarray]:
    return [np.unique(np.asarray(s, dtype=np.int64).ravel()) for s in b]


# ---------------------------------------------------------------- consistency

def consistency_threshold(H: HInstance, b: Tuple) -> int:
    """Smallest κ for which b satisfies both consistency inequalities."""
    b = _as_sets(b)
    trans = H.trans
    proper = H.proper_nest
    k = 0
    for v, w in zip(*np.nonzero(np.triu(trans))):
        v, w = int(v), int(w)
        t = min(H.dU(w, b[w], H.rho_set[(v, w)]), H.dU(v, b[v], H.rho_set[(w, v)]))
        k = max(k, t)
    for v, w in zip(*np.nonzero(proper)):
        v, w = int(v), int(w)
        first = H.dU(w, b[w], H.rho_set[(v, w)])
        if first <= k:
            continue
        second = H.graphs[v].diam(np.union1d(b[v], H.rho_image(w, v, b[w])))
        k = max(k, min(first, second))
    return k


def deviation_vector(H: HInstance, b: Tuple, domains=None) -> np.ndarray:
    """max over the given domains of d_U(b_U, π_U x), for every x."""
    dev = np.zeros(H.X.n, dtype=np.int64)
    doms = range(H.m) if domains is None else domains
    for u in doms:
        if H.is_point(u):
            continue
        np.maximum(dev, H.dist_to_set(u, b[u]), out=dev)
    return dev


def realize_brute(H: HInstance, b: Tuple) -> tuple[int, int]:
    dev = deviation_vector(H, _as_sets(b))
    x = int(np.argmin(dev))
    return x, int(dev[x])


def realizers(H: HInstance, b: Tuple, tol: int) -> np.ndarray:
    """All x with deviation at most ``tol``."""
    return np.flatnonzero(deviation_vector(H, _as_sets(b)) <= tol)


# ---------------------------------------------------------------- partial realization points

def pr_cost(H: HInstance, family, b: Tuple | None) -> np.ndarray:
    """Per x, the smallest θ making x a θ-partial realization point for family."""
    cost = np.zeros(H.X.n, dtype=np.int64)
    trans = H.trans
    for Vj in family:
        if b is not None and not H.is_point(Vj):
            np.maximum(cost, H.dist_to_set(Vj, b[Vj]), out=cost)
        for V in range(H.m):
            if (H.proper_nest[Vj, V] or trans[Vj, V]) and not H.is_point(V):
                np.maximum(cost, H.dist_to_set(V, H.rho_set[(Vj, V)]), out=cost)
    return cost


def check_partial_realization_point(H: HInstance, family, b: Tuple, x: int) -> int:
    family = list(family)
    for i, u in enumerate(family):
        for v in family[i + 1:]:
            if not H.orth[u, v]:
                raise ValueError(f"family is not pairwise orthogonal: {H.ids[u]}, {H.ids[v]}")
    return int(pr_cost(H, family, _as_sets(b))[x])


# ---------------------------------------------------------------- relevance

@dataclass
class Poset:
    elements: list[int]
    leq: np.ndarray
    orth: np.ndarray
    trans: np.ndarray
    ids: list[int] = field(default_factory=list)

    def __len__(self):
        return len(self.elements)

    def comparable(self) -> np.ndarray:
        return self.leq | self.leq.T

    def is_antisymmetric(self) -> bool:
        both = self.leq & self.leq.T
        np.fill_diagonal(both, False)
        return not both.any()

    def is_transitive(self) -> bool:
        L = self.leq.astype(np.int64)
        return not (((L @ L) > 0) & ~self.leq).any()

    def dichotomy_holds(self) -> bool:
        ok = self.comparable() | self.orth
        np.fill_diagonal(ok, True)
        return bool(ok.all())

    def to_json(self) -> dict:
        return {"elements": self.ids,
                "order": [[self.ids[i], self.ids[j]] for i, j in zip(*np.nonzero(self.leq)) if i != j]}


def relevant(H: HInstance, x: int, b: Tuple, theta: int) -> list[int]:
    b = _as_sets(b)
    return [u for u in range(H.m)
            if not H.is_point(u) and H.dU(u, H.pi_set(u, x), b[u]) > theta]


def relevance_poset(H: HInstance, x: int, b: Tuple, theta: int, kappa: int, E: int,
                    selector="max") -> Poset:
    """The order ⪯ on a ⊑-incomparable subfamily of Rel(x, b, θ).

    ``selector`` is ``"max"`` for the ⊑-maximal relevant domains, or a pair
    ``(U, ell)`` selecting relevant domains of 𝔗_U^ell.
    """
    bound = 100 * max(kappa, E)
    if theta < bound:
        raise ValueError(f"theta must be at least 100*max(kappa, E) = {bound}")
    b = _as_sets(b)
    rel = relevant(H, x, b, theta)
    if selector == "max":
        chosen = [u for u in rel if not any(H.proper_nest[u, v] for v in rel)]
    else:
        U, ell = selector
        fam = set(H.level_family(U, ell).tolist())
        chosen = [u for u in rel if u in fam]
    return order_on(H, chosen, b, kappa)


def order_on(H: HInstance, chosen, b: Tuple, kappa: int) -> Poset:
    k = len(chosen)
    leq = np.eye(k, dtype=bool)
    trans = H.trans
    for i, u in enumerate(chosen):
        for j, v in enumerate(chosen):
            if i != j and trans[u, v] and H.dU(u, H.rho_set[(v, u)], b[u]) <= kappa:
                leq[i, j] = True
    sub = np.ix_(chosen, chosen)
    return Poset(list(chosen), leq, H.orth[sub].copy(), trans[sub].copy(),
                 [H.ids[u] for u in chosen])


def chain_coloring(P: Poset) -> dict[int, int]:
    """Minimum chain cover of a poset, as a colouring of its elements.

    Dilworth via maximum bipartite matching on the strict order (Kuhn's
    augmenting paths, tried in index order for determinism).
    """
    k = len(P)
    strict = P.leq.copy()
    np.fill_diagonal(strict, False)
    succ = [np.flatnonzero(strict[i]).tolist() for i in range(k)]
    match_right = [-1] * k
    match_left = [-1] * k

    def augment(u, seen):
        for v in succ[u]:
            if seen[v]:
                continue
            seen[v] = True
            if match_right[v] == -1 or augment(match_right[v], seen):
                match_right[v] = u
                match_left[u] = v
                return True
        return False

    for u in range(k):
        augment(u, [False] * k)
    color = {}
    c = 0
    for start in range(k):
        if match_right[start] != -1:
            continue
        node = start
        while node != -1:
            color[P.elements[node]] = c
            node = match_left[node]
        c += 1
    # a relation that is not antisymmetric can leave matched cycles behind
    for i in range(k):
        if P.elements[i] not in color:
            color[P.elements[i]] = c
            c += 1
    return color


def poset_width_bruteforce(P: Poset) -> int:
    """Largest antichain, by exhaustive search (test oracle)."""
    from itertools import combinations
    k = len(P)
    comp = P.comparable()
    for r in range(k, 0, -1):
        for sub in combinations(range(k), r):
            if not any(comp[i, j] for i, j in combinations(sub, 2)):
                return r
    return 0


# ---------------------------------------------------------------- constructive realization

@dataclass
class _Ctx:
    H: HInstance
    b: list
    kappa: int
    E: int
    alpha: int
    budget: int
    steps: int = 0
    trace: list = field(default_factory=list)
    cache: dict = field(default_factory=dict)
    scale: int = 1


def _pr_points(ctx: _Ctx, fam, extra=None) -> np.ndarray:
    """E-partial realization points for fam (threshold relaxed to the
    smallest achievable value when none exists)."""
    H = ctx.H
    cost = pr_cost(H, fam, ctx.b)
    if extra is not None:
        cost = np.maximum(cost, extra)
    thr = max(ctx.E, ctx.alpha, int(cost.min()))
    return np.flatnonzero(cost <= thr)


def _claim(ctx: _Ctx, V: int) -> list[int]:
    if V in ctx.cache:
        return ctx.cache[V]
    H = ctx.H
    lev = H.levels()
    if lev[V] == 1:
        ctx.cache[V] = [V]
        return [V]
    inside = [W for W in H.nested_in(V).tolist() if not H.is_point(W)]
    below = [W for W in inside if W != V]
    C = ctx.scale * ctx.E * max(ctx.kappa, 1) * max(ctx.alpha, 1)
    dV = H.dist_to_set(V, ctx.b[V]) if not H.is_point(V) else None
    U: list[int] = []
    while True:
        cand = _pr_points(ctx, U, dV)
        devs = np.zeros((len(below), len(cand)), dtype=np.int64)
        for i, W in enumerate(below):
            devs[i] = H.dist_to_set(W, ctx.b[W])[cand]
        bad = (devs > C).any(axis=0) if len(below) else np.zeros(len(cand), dtype=bool)
        if not bad.any():
            break
        ctx.steps += 1
        if ctx.steps > ctx.budget:
            raise RealizationError("constructive realization exceeded its iteration budget",
                                   {"V": H.ids[V], "family": [H.ids[u] for u in U], "C": C,
                                    "trace": ctx.trace})
        j = int(np.flatnonzero(bad)[0])
        x0 = int(cand[j])
        big = [W for i, W in enumerate(below) if devs[i, j] > C]
        vmax = [W for W in big if not any(H.proper_nest[W, W2] for W2 in big)]
        P = order_on(H, vmax, ctx.b, 10 * ctx.E * max(ctx.kappa, 1))
        maximal = [P.elements[i] for i in range(len(P))
                   if not any(P.leq[i, k] and i != k for k in range(len(P)))]
        chosen = []
        for W in sorted(maximal, key=lambda w: H.ids[w]):
            if all(H.orth[W, c] for c in chosen) and all(H.orth[W, u] for u in U):
                chosen.append(W)
        new = []
        for W in chosen:
            for u in _claim(ctx, W):
                if u not in U and u not in new and all(H.orth[u, t] for t in U + new):
                    new.append(u)
        ctx.trace.append({"V": H.ids[V], "x0": x0, "C": C, "Vmax": [H.ids[w] for w in vmax],
                          "added": [H.ids[u] for u in new]})
        if not new:
            break
        U.extend(new)
        C *= 10
    if not U:
        U = [V]
    ctx.cache[V] = U
    return U


def realize_constructive(H: HInstance, b: Tuple, kappa: int, E: int, alpha: int,
                         scale: int = 1) -> tuple[int, int, dict]:
    """Realization by induction on level; returns (x, deviation, trace).

    A domain is claimed once its deviation exceeds scale·E·κ·α; the
    asymptotic choice is scale=100, which claims nothing on small instances.
    """
    b = _as_sets(b)
    if H.m == 0:
        return 0, 0, {"family": []}
    ctx = _Ctx(H, b, kappa, max(E, 1), alpha, budget=max(1, H.complexity() * H.m), scale=scale)
    fam = _claim(ctx, H.maximal)
    cand = _pr_points(ctx, fam)
    dev = deviation_vector(H, b)
    x = int(cand[np.argmin(dev[cand])])
    return x, int(dev[x]), {"family": [H.ids[u] for u in fam], "trace": ctx.trace}


def realize(H: HInstance, b: Tuple, mode: str = "brute", constants=None, kappa: int | None = None):
    if mode == "brute":
        return realize_brute(H, b)
    if mode != "constructive":
        raise ValueError(f"unknown mode {mode!r}")
    if constants is None:
        from .verifier import constants_for
        constants = constants_for(H)
    k = consistency_threshold(H, b) if kappa is None else kappa
    x, dev, _ = realize_constructive(H, b, k, constants.E, constants.alpha)
    return x, dev


# ---------------------------------------------------------------- tuple corpus

def point_tuple(H: HInstance, x: int) -> list[np.ndarray]:
    return H.point_tuple(x)


def median_tuple(H: HInstance, x: int, y: int, z: int, delta: int) -> list[np.ndarray]:
    out = []
    for u in range(H.m):
        P = H.pi[u]
        out.append(np.array([triangle_center(H.graphs[u], int(P[x].min()), int(P[y].min()),
                                             int(P[z].min()), delta)]))
    return out


def perturbed_tuple(H: HInstance, x: int, radius: int, rng: np.random.Generator) -> list[np.ndarray]:
    out = []
    for u in range(H.m):
        G = H.graphs[u]
        ball = G.ball(int(H.pi[u][x].min()), radius)
        out.append(np.array([int(rng.choice(ball))]))
    return out


def tuple_corpus(H: HInstance, size: int, seed: int, delta: int = 0, radius: int = 2):
    """Labelled tuples: points, triangle-center tuples and perturbed points."""
    rng = np.random.default_rng(seed)
    n = H.X.n
    corpus = []
    for i in range(size):
        kind = ("point", "median", "perturbed")[i % 3]
        if kind == "point":
            b = point_tuple(H, int(rng.integers(n)))
        elif kind == "median":
            x, y, z = (int(v) for v in rng.integers(n, size=3))
            b = median_tuple(H, x, y, z, delta)
        else:
            b = perturbed_tuple(H, int(rng.integers(n)), int(rng.integers(1, radius + 1)), rng)
        corpus.append((kind, b))
    return corpus


def measure_theta_e(H: HInstance, constants, seed: int = 0, size: int = 60) -> dict[int, int]:
    """θ_e(κ): largest brute deviation over corpus tuples with consistency ≤ κ."""
    corpus = tuple_corpus(H, size, seed + 7919, delta=constants.delta)
    rows = []
    for _, b in corpus:
        k = consistency_threshold(H, b)
        _, dev = realize_brute(H, b)
        rows.append((k, dev))
    if not rows:
        return {0: 0}
    kmax = max(k for k, _ in rows)
    table = np.zeros(kmax + 1, dtype=np.int64)
    for k, dev in rows:
        table[k] = max(table[k], dev)
    table = np.maximum.accumulate(table)
    return {k: int(v) for k, v in enumerate(table)}


def uniqueness_radius(constants, theta_e: int, kappa: int, diam_b: int = 0) -> int:
    """θ_u(2θ_e + κ) with κ at least the coordinate diameter."""
    return constants.tu(2 * theta_e + max(kappa, diam_b))
