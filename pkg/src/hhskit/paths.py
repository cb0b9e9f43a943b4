"""Hierarchy paths, path audits and the distance formula.

Thresholded sums use ``{{A}}_s = A if A >= s else 0`` summed over every
domain (point domains contribute nothing).  Good paths start from the
retraction of a geodesic into the pair hull and then remove omens level by
level, splicing in straight paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .convexity import hull_set, hull_threshold, realize_targets, side_centers
from .metric import DiscretePath, QGFailure, unparam_qg_constant
from .model import HInstance
from .realization import chain_coloring, order_on

K_GRID = (Fraction(1), Fraction(5, 4), Fraction(3, 2), Fraction(2), Fraction(3), Fraction(5))


class PathError(RuntimeError):
    def __init__(self, msg: str, state: dict):
        super().__init__(msg)
        self.state = state


def _active(H: HInstance) -> list[int]:
    return [u for u in range(H.m) if not H.is_point(u)]


# ---------------------------------------------------------------- thresholded sums

def threshold_sum(H: HInstance, x: int, y: int, s: int) -> int:
    if s < 1:
        raise ValueError("s must be at least 1")
    tot = 0
    for u in _active(H):
        d = int(H.proj_dist(u, [x], [y])[0, 0])
        if d >= s:
            tot += d
    return tot


def threshold_sums(H: HInstance, xs, ys, s_values) -> dict[int, np.ndarray]:
    """Blocks of Σ_s for every s in ``s_values`` at once."""
    out = {s: np.zeros((len(xs), len(ys)), dtype=np.int64) for s in s_values}
    for u in _active(H):
        du = H.proj_dist(u, xs, ys)
        for s in s_values:
            out[s] += np.where(du >= s, du, 0)
    return out


@dataclass
class DFFit:
    s: int
    frontier: dict[str, int]
    per_s: dict[int, dict[str, int]]
    s0: int
    gap: tuple[int, int]
    grid: np.ndarray = field(repr=False)

    def to_json(self) -> dict:
        return {"s": self.s, "frontier": self.frontier, "s0": self.s0,
                "per_s": {str(k): v for k, v in self.per_s.items()},
                "d_minus_sigma": list(self.gap)}

    def rows(self):
        """(Σ_s, d_X, count) occupancy rows for scatter side-files."""
        S, d = np.nonzero(self.grid)
        return [(int(a), int(b), int(self.grid[a, b])) for a, b in zip(S, d)]


def _k_label(K: Fraction) -> str:
    return str(float(K)).rstrip("0").rstrip(".")


def _frontier(grid: np.ndarray) -> dict[str, int]:
    S, d = np.nonzero(grid)
    out = {}
    for K in K_GRID:
        p, q = K.numerator, K.denominator
        if len(S) == 0:
            out[_k_label(K)] = 0
            continue
        # C >= S/K - d and C >= d - K S, both rounded up
        lo = -((d * p - S * q) // p)
        hi = -((S * p - d * q) // q)
        out[_k_label(K)] = int(max(0, lo.max(), hi.max()))
    return out


def fit_df_constants(H: HInstance, s: int) -> DFFit:
    """Distance formula frontier over every pair of vertices.

    For each K in the fixed grid, the least integer C with
    Σ/K - C <= d <= K Σ + C; the same frontier is reported for every
    s' <= s.
    """
    if s < 1:
        raise ValueError("s must be at least 1")
    from .verifier import pair_blocks
    svals = list(range(1, s + 1))
    smax = sum(H.graphs[u].diameter() for u in _active(H))
    dmax = H.X.diameter()
    width = dmax + 1
    grids = {t: np.zeros((smax + 1) * width, dtype=np.int64) for t in svals}
    gap = [None, None]
    for xs, ys in pair_blocks(H.X.n):
        dx = H.X.rows(xs, ys)
        sums = threshold_sums(H, xs, ys, svals)
        for t in svals:
            key = (sums[t] * width + dx).ravel()
            grids[t] += np.bincount(key, minlength=len(grids[t]))
        diff = dx - sums[s]
        lo, hi = int(diff.min()), int(diff.max())
        gap[0] = lo if gap[0] is None else min(gap[0], lo)
        gap[1] = hi if gap[1] is None else max(gap[1], hi)
    per_s = {}
    for t in svals:
        g = grids[t].reshape(smax + 1, width)
        grids[t] = g
        per_s[t] = _frontier(g)
    # every frontier is finite on a finite instance
    return DFFit(s, per_s[s], per_s, 1, (gap[0], gap[1]), grids[s])


# ---------------------------------------------------------------- straight paths

def straight_path(H: HInstance, a: int, b: int, theta: int) -> list[int]:
    """Retraction into H_θ(a, b) of the BFS geodesic from a to b, deduplicated."""
    geo = np.asarray(H.X.geodesic(a, b), dtype=np.int64)
    if a == b:
        return [int(a)]
    pts = hull_set(H, [a, b], theta)
    targets = np.zeros((len(geo), max(H.m, 1)), dtype=np.int64)
    for u in _active(H):
        P = H.pi[u]
        cen = _centers_for(H.graphs[u], int(P[a].min()), int(P[b].min()), P[geo, 0])
        targets[:, u] = cen
    if _active(H):
        real, _ = realize_targets(H, targets[:, :H.m], cand=pts)
    else:
        real = geo.copy()
    inhull = np.isin(geo, pts)
    real[inhull] = geo[inhull]
    real[0], real[-1] = a, b
    out = [int(real[0])]
    for v in real[1:]:
        if int(v) != out[-1]:
            out.append(int(v))
    return out


def _centers_for(G, a: int, b: int, cs) -> np.ndarray:
    D = G.dist
    I = np.flatnonzero(D[a] + D[b] == D[a, b])
    DI = D[I]
    out = np.empty(len(cs), dtype=np.int64)
    for k, c in enumerate(cs):
        mac = D[a] + D[c] == D[a, c]
        mbc = D[b] + D[c] == D[b, c]
        far = np.maximum(DI[:, mac].min(axis=1), DI[:, mbc].min(axis=1))
        out[k] = I[int(np.argmin(far))]
    return out


# ---------------------------------------------------------------- good paths

def _profile(H: HInstance, u: int, steps, x: int) -> np.ndarray:
    return H.proj_dist(u, [x], steps)[0]


def _first_omen(f: np.ndarray, thr: float):
    """Minimal t with f[t] > f[t'] + thr for some t' > t, and its maximal partner."""
    if len(f) < 2:
        return None
    suffix = np.minimum.accumulate(f[::-1])[::-1]
    hits = np.flatnonzero(f[:-1] > suffix[1:] + thr)
    if len(hits) == 0:
        return None
    t = int(hits[0])
    tp = int(np.flatnonzero(f[t + 1:] < f[t]).max()) + t + 1
    return t, tp


def proper_subsample(G, steps, r: int, K: int) -> list[int]:
    """(r, K)-proper subsequence: next index is the first one at distance in [r, r+K] or the end."""
    steps = list(steps)
    n = len(steps) - 1
    out = [0]
    i = 0
    while i < n:
        row = G.rows([steps[i]], steps[i + 1:])[0]
        ok = np.flatnonzero((row >= r) & (row <= r + K))
        j = i + 1 + int(ok[0]) if len(ok) else n
        out.append(j)
        i = j
    return [steps[j] for j in out]


def good_path(H: HInstance, x: int, y: int, r: int | None = None, constants=None,
              budget: int | None = None, initial=None) -> DiscretePath:
    """Discrete path from x to y with no omens left in any non-point domain.

    ``initial`` replaces the starting hull path (it must run from x to y).

    ``info`` records the discreteness constant K after each level, the
    splices made and, when ``r`` is given, the (r, K)-proper subsample.
    """
    from .verifier import constants_for
    c = constants_for(H) if constants is None else constants
    x, y = int(x), int(y)
    theta0 = hull_threshold(H, c)
    E = max(1, c.E)
    if initial is None:
        alpha = straight_path(H, x, y, theta0)
    else:
        alpha = [int(v) for v in initial]
        if alpha[0] != x or alpha[-1] != y:
            raise ValueError("initial path must run from x to y")
    p0 = DiscretePath(alpha, H.X)
    K = max(1, p0.step_bound)
    info = {"theta0": theta0, "E": E, "K0": K, "splices": [], "K_levels": {}}
    budget = budget if budget is not None else 4 * (H.X.n + len(alpha)) * max(H.m, 1)
    used = 0
    active = _active(H)
    levels = H.levels()
    yt = H.point_tuple(y)
    for ell in sorted({int(levels[u]) for u in active}):
        doms = [u for u in active if levels[u] == ell]
        P = order_on(H, doms, yt, E)
        colors = chain_coloring(P)
        for col in sorted(set(colors.values())):
            cls = sorted(u for u in doms if colors[u] == col)
            start = 0
            while True:
                hit = None
                for u in cls:
                    f = _profile(H, u, alpha, x)
                    sub = f[start:]
                    om = _first_omen(sub, 5 * K * E)
                    if om is not None and (hit is None or om[0] + start < hit[1]):
                        hit = (u, om[0] + start, om[1] + start)
                if hit is None:
                    break
                used += 1
                if used > budget:
                    raise PathError(f"iteration budget exceeded at level {ell}, colour {col}",
                                    {"level": ell, "color": col, "domains": [H.ids[u] for u in cls],
                                     "splices": len(info["splices"])})
                u, t, tp = hit
                seg = straight_path(H, alpha[t], alpha[tp], theta0)
                alpha = alpha[:t] + seg + alpha[tp + 1:]
                info["splices"].append({"level": ell, "color": col, "domain": H.ids[u],
                                        "t": t, "t_prime": tp, "length": len(seg) - 1})
                start = t
        K = max(5 * K * E, 2 * K * E + 12 * theta0)
        info["K_levels"][ell] = K
    # drop consecutive repeats introduced by splicing
    clean = [alpha[0]]
    for v in alpha[1:]:
        if v != clean[-1]:
            clean.append(v)
    path = DiscretePath(clean, H.X, info)
    info["K"] = max(1, path.step_bound)
    if r is not None:
        info["proper"] = DiscretePath(proper_subsample(H.X, clean, r, info["K"]), H.X)
        info["r"] = r
    return path


# ---------------------------------------------------------------- audits

def monotonicity_defect(G, seq) -> int:
    """Least L with d(s_0, s_j) >= d(s_0, s_i) - L whenever i < j."""
    seq = [np.atleast_1d(np.asarray(s, dtype=np.int64)) for s in seq]
    if len(seq) < 2:
        return 0
    dist = G.dist_to_set(seq[0])
    f = np.array([dist[s].min() for s in seq])
    run = np.maximum.accumulate(f)
    return int(max(0, (run[:-1] - f[1:]).max()))


def qg_constant(G, steps) -> int:
    """Least D with |i-j|/D - D <= d(a_i, a_j) <= D|i-j| + D."""
    s = np.asarray(steps, dtype=np.int64)
    k = len(s)
    if k < 2:
        return 1
    dd = G.rows(s, s)
    gap = np.abs(np.arange(k)[:, None] - np.arange(k)[None, :])
    D = 1
    while True:
        if not (np.any(dd > D * gap + D) or np.any(dd * D < gap - D * D)):
            return D
        D += 1


def _dedupe(seq):
    out = [seq[0]]
    for s in seq[1:]:
        if not np.array_equal(s, out[-1]):
            out.append(s)
    return out


@dataclass
class PathAudit:
    length: int
    efficiency: float
    monotonicity: dict[int, int]
    qg: dict[int, int]
    qg_X: int
    D: int

    def to_json(self) -> dict:
        return {"length": self.length, "efficiency": self.efficiency,
                "monotonicity": {str(k): v for k, v in self.monotonicity.items()},
                "qg": {str(k): v for k, v in self.qg.items()}, "qg_X": self.qg_X, "D": self.D}

    def rows(self):
        return [(k, self.monotonicity[k], self.qg[k]) for k in sorted(self.qg)]


def audit_path(H: HInstance, path: DiscretePath, D_max: int = 64) -> PathAudit:
    steps = list(path.steps)
    n = len(steps) - 1
    d = H.X.d(steps[0], steps[-1])
    eff = float(n / d) if d else (1.0 if n == 0 else float("inf"))
    mono, qg = {}, {}
    for u in _active(H):
        G = H.graphs[u]
        seq = [H.pi_set(u, v) for v in steps]
        mono[H.ids[u]] = monotonicity_defect(G, seq)
        # repeated consecutive entries can always be kept or skipped together
        q = unparam_qg_constant(G, _dedupe(seq), D_max=D_max)
        qg[H.ids[u]] = q.cap + 1 if isinstance(q, QGFailure) else int(q)
    qx = qg_constant(H.X, steps)
    D = max([1, qx, *qg.values()])
    return PathAudit(n, eff, mono, qg, qx, D)


# ---------------------------------------------------------------- upper bound

def upper_bound_r(H: HInstance, K: int, s: int, constants=None, scale: int = 100) -> int:
    """Least r such that d_X(a, b) >= r forces some d_W(a, b) >= scale*K*E*s."""
    from .verifier import constants_for
    c = constants_for(H) if constants is None else constants
    kappa = scale * K * max(1, c.E) * s
    return c.tu(kappa - 1) + 1


def upper_bound_check(H: HInstance, proper: DiscretePath, s: int) -> dict:
    x, y = proper.steps[0], proper.steps[-1]
    tot = threshold_sum(H, x, y, s)
    return {"length": len(proper), "sigma": tot, "holds": len(proper) - 1 <= tot}


# ---------------------------------------------------------------- lower bound

@dataclass
class LowerCertificate:
    x: int
    y: int
    s0: int
    K: int
    chi: int
    radius: int
    separation: int
    relevant: list[int]
    checkpoints: dict[int, list[int]]
    required: dict[int, int]
    doors: list[tuple[int, list[int]]]
    path_length: int
    d: int
    sigma: int
    transverse_clash: list = field(default_factory=list)
    E: int = 1

    @property
    def admissible(self) -> bool:
        return self.s0 >= 10 * self.K * self.E

    @property
    def n_doors(self) -> int:
        return len(self.doors)

    @property
    def total_checkpoints(self) -> int:
        return sum(len(v) for v in self.checkpoints.values())

    @property
    def max_multiplicity(self) -> int:
        return max((len(m) for _, m in self.doors), default=0)

    @property
    def enough_checkpoints(self) -> bool:
        return all(len(self.checkpoints[v]) >= self.required[v] for v in self.relevant)

    @property
    def certified(self) -> bool:
        c = self.total_checkpoints
        return (not self.transverse_clash and self.enough_checkpoints
                and self.max_multiplicity <= self.chi
                and self.path_length >= self.n_doors and self.n_doors * self.chi >= c
                and self.path_length <= self.K * self.d
                and 10 * self.chi * self.K * self.d >= self.sigma)

    def to_json(self) -> dict:
        return {"x": self.x, "y": self.y, "s0": self.s0, "K": self.K, "chi": self.chi,
                "radius": self.radius, "separation": self.separation,
                "relevant": self.relevant,
                "checkpoints": {str(k): v for k, v in self.checkpoints.items()},
                "required": {str(k): v for k, v in self.required.items()},
                "doors": [[j, m] for j, m in self.doors],
                "total_checkpoints": self.total_checkpoints,
                "max_multiplicity": self.max_multiplicity, "n_doors": self.n_doors,
                "admissible": self.admissible,
                "path_length": self.path_length, "d": self.d, "sigma": self.sigma,
                "transverse_clash": self.transverse_clash, "certified": self.certified}


def lower_bound_scale(H: HInstance, K: int, constants=None) -> int:
    """Smallest admissible s0 for the certificate, 10*K*E."""
    from .verifier import constants_for
    c = constants_for(H) if constants is None else constants
    return 10 * K * max(1, c.E)


def df_lower_certificate(H: HInstance, x: int, y: int, s0: int, constants=None) -> LowerCertificate:
    """Checkpoints and doors along the hull path from x to y.

    Lengths are measured in the unit u = s0/1000: checkpoint balls have
    radius floor(10u), centres at least 2*floor(10u) + ceil(10u) apart,
    and every ball stays more than 10u + 1 away from the endpoints.
    """
    from .verifier import constants_for
    c = constants_for(H) if constants is None else constants
    x, y = int(x), int(y)
    steps = straight_path(H, x, y, hull_threshold(H, c)) if x != y else [x]
    p = DiscretePath(steps, H.X)
    d = H.X.d(x, y)
    n = len(p)
    K = max(1, p.step_bound, math.ceil(n / d) if d else 1)
    u10 = 10 * s0 / 1000
    rad = int(math.floor(u10))
    sep = max(1, int(math.ceil(u10)))
    spacing = 2 * rad + sep
    rel = [u for u in _active(H) if int(H.proj_dist(u, [x], [y])[0, 0]) >= s0]
    cps, req = {}, {}
    for u in rel:
        G = H.graphs[u]
        ends = np.union1d(H.pi_set(u, x), H.pi_set(u, y))
        dend = G.dist_to_set(ends)
        need = math.ceil(int(H.proj_dist(u, [x], [y])[0, 0]) / 10)
        chosen: list[int] = []
        for v in steps:
            cen = int(H.pi_set(u, v).min())
            if dend[cen] - rad < u10 + 1:
                continue
            if chosen and G.rows([cen], chosen)[0].min() < spacing:
                continue
            chosen.append(cen)
            if len(chosen) >= need:
                break
        cps[H.ids[u]] = chosen
        req[H.ids[u]] = need
    # doors: first entry into a checkpoint ball, with multiplicity sets
    by_id = {H.ids[u]: u for u in rel}
    mult: dict[int, set] = {}
    for vid, centres in cps.items():
        u = by_id[vid]
        G = H.graphs[u]
        for cen in centres:
            inside = [bool((G.dist[cen][H.pi_set(u, v)] <= rad).any()) for v in steps]
            for j in range(1, len(steps)):
                if inside[j] and not inside[j - 1]:
                    mult.setdefault(j, set()).add(vid)
    doors = [(j, sorted(mult[j])) for j in sorted(mult)]
    clash = []
    for j, M in doors:
        for a in M:
            for b in M:
                if a < b and H.trans[by_id[a], by_id[b]]:
                    clash.append([j, a, b])
    sigma = threshold_sum(H, x, y, s0)
    return LowerCertificate(x, y, s0, K, H.chi(), rad, sep, [H.ids[u] for u in rel], cps,
                            req, doors, n, d, sigma, clash, max(1, c.E))


# ---------------------------------------------------------------- active subpaths

def active_subpath(H: HInstance, path: DiscretePath, V_id: int, region=None) -> dict:
    """Measured ν for the stretch of ``path`` spent near the product region of V.

    ν is the least radius whose neighbourhood of P_V contains one contiguous
    run of the path touching every index within that radius; the report
    includes how much the projections to domains nested in or orthogonal
    to V move before and after that run.
    """
    from .convexity import product_region
    V = H.index(V_id)
    reg = product_region(H, V_id) if region is None else region
    steps = np.asarray(path.steps)
    dP = H.X.dist_to_set(reg.P)[steps]
    nu = int(dP.min())
    while True:
        idx = np.flatnonzero(dP <= nu)
        i, j = int(idx[0]), int(idx[-1])
        if (dP[i:j + 1] <= nu).all():
            break
        nu += 1
    doms = [u for u in range(H.m) if (H.nest[u, V] or H.orth[u, V]) and not H.is_point(u)]
    off = 0
    for u in doms:
        G = H.graphs[u]
        for part in (steps[:i + 1], steps[j:]):
            off = max(off, G.diam(np.unique(H.pi[u][part])))
    return {"V": int(V_id), "nu": nu, "start": i, "end": j, "off_variation": int(off)}
