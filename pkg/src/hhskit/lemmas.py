"""Exhaustive checks of consequences of the axioms on finite instances.

Each function returns a list of violations (empty when the statement holds),
or a measured constant.
"""

from __future__ import annotations

import numpy as np

from .model import HInstance


def _transverse_pairs(H: HInstance):
    T = np.triu(H.trans)
    return [(int(v), int(w)) for v, w in zip(*np.nonzero(T))
            if not H.is_point(v) and not H.is_point(w)]


def _to_rho(H: HInstance, v: int, w: int) -> np.ndarray:
    """d_v(π_v x, ρ^w_v) for every x."""
    return H.dist_to_set(v, H.rho_set[(w, v)])


def pair_consistency(H: HInstance, E: int, limit: int = 20) -> list[dict]:
    """Large projections to transverse V, W order x and y oppositely.

    For x, y with d_V(x,y), d_W(x,y) > 10E, up to exchanging V and W,
    d_V(x, ρ^W_V) <= E and d_W(y, ρ^V_W) <= E.
    """
    from .verifier import pair_blocks
    bad = []
    for v, w in _transverse_pairs(H):
        aV = _to_rho(H, v, w) <= E
        aW = _to_rho(H, w, v) <= E
        for xs, ys in pair_blocks(H.X.n, triangle=False):
            big = (H.proj_dist(v, xs, ys) > 10 * E) & (H.proj_dist(w, xs, ys) > 10 * E)
            if not big.any():
                continue
            ok = (aV[xs][:, None] & aW[ys][None, :]) | (aW[xs][:, None] & aV[ys][None, :])
            for i, j in zip(*np.nonzero(big & ~ok)):
                bad.append({"x": int(xs[i]), "y": int(ys[j]), "V": H.ids[v], "W": H.ids[w]})
                if len(bad) >= limit:
                    return bad
    return bad


def not_far_from_both(H: HInstance, E: int, max_pairs: int = 2000, seed: int = 0,
                      limit: int = 20) -> list[dict]:
    """For x, y as above and every z, some U in {V, W} has d_U(z, {x, y}) <= 10E."""
    rng = np.random.default_rng(seed)
    bad = []
    for v, w in _transverse_pairs(H):
        xs, ys = _large_pairs(H, v, w, E)
        if len(xs) > max_pairs:
            pick = np.sort(rng.choice(len(xs), size=max_pairs, replace=False))
            xs, ys = xs[pick], ys[pick]
        for x, y in zip(xs.tolist(), ys.tolist()):
            nearV = np.minimum(*H.proj_dist(v, [x, y], np.arange(H.X.n)))
            nearW = np.minimum(*H.proj_dist(w, [x, y], np.arange(H.X.n)))
            far = np.flatnonzero((nearV > 10 * E) & (nearW > 10 * E))
            if len(far):
                bad.append({"x": x, "y": y, "z": int(far[0]), "V": H.ids[v], "W": H.ids[w]})
                if len(bad) >= limit:
                    return bad
    return bad


def _large_pairs(H, v, w, E):
    from .verifier import pair_blocks
    out_x, out_y = [], []
    for xs, ys in pair_blocks(H.X.n):
        big = (H.proj_dist(v, xs, ys) > 10 * E) & (H.proj_dist(w, xs, ys) > 10 * E)
        i, j = np.nonzero(big)
        out_x.append(xs[i])
        out_y.append(ys[j])
    return np.concatenate(out_x), np.concatenate(out_y)


def passing_up_N(H: HInstance, C: int, E: int) -> int:
    """Least N such that N distinct S_i ⊑ V with d_{S_i}(x,y) >= E force
    some S ⊑ V properly containing an S_i with d_S(x,y) >= C."""
    from .verifier import pair_blocks
    worst = 0
    active = [u for u in range(H.m) if not H.is_point(u)]
    pn = H.proper_nest
    for xs, ys in pair_blocks(H.X.n):
        big_E = np.zeros((H.m, len(xs), len(ys)), dtype=bool)
        big_C = np.zeros_like(big_E)
        for u in range(H.m):
            d = H.proj_dist(u, xs, ys) if u in active else np.zeros((len(xs), len(ys)), int)
            big_E[u] = d >= E
            big_C[u] = d >= C
        for V in range(H.m):
            inside = np.flatnonzero(H.nest[:, V])
            count = big_E[inside].sum(axis=0)
            good = np.zeros((len(xs), len(ys)), dtype=bool)
            for i in inside:
                above = [S for S in inside if pn[i, S]]
                if above:
                    good |= big_E[i] & big_C[above].any(axis=0)
            stuck = count[~good]
            if len(stuck):
                worst = max(worst, int(stuck.max()))
    return worst + 1


def transverse_far(H: HInstance, E: int) -> list[dict]:
    """U ⋔ V, W ⋔ V with ρ^U_V, ρ^W_V more than 10E apart and U, W
    ⊑-incomparable must be transverse (all image diameters > 10E)."""
    big = [u for u in range(H.m) if not H.is_point(u) and H.image_diameter(u) > 10 * E]
    bad = []
    for V in big:
        cands = [u for u in big if H.trans[u, V]]
        for i, U in enumerate(cands):
            for W in cands[i + 1:]:
                if H.nest[U, W] or H.nest[W, U]:
                    continue
                if H.dU(V, H.rho_set[(U, V)], H.rho_set[(W, V)]) > 10 * E and not H.trans[U, W]:
                    bad.append({"U": H.ids[U], "V": H.ids[V], "W": H.ids[W]})
    return bad
