"""Finite unit-edge graph metrics.

Distances, geodesic enumeration, slim-triangle hyperbolicity,
quasiconvexity of vertex subsets and quasigeodesic quality of
sequences of bounded vertex sets.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

GEODESIC_CAP = 10_000
DENSE_LIMIT = 6_000
DELTA_EXACT_LIMIT = 700


class GraphError(ValueError):
    """Structural problem with a graph (disconnected, loops, ...)."""


class MetricGraph:
    """Connected simple graph with unit edges and an all-pairs distance table.

    Vertices are ``0..n-1``.  ``factors`` may hold two graphs whose
    Cartesian product this graph is (vertex ``i * n1 + j``); distances are
    then computed from the factors, which keeps very large products usable
    through :meth:`rows` without a dense table.
    """

    def __init__(self, n: int, edges, factors: tuple["MetricGraph", "MetricGraph"] | None = None,
                 name: str = ""):
        n = int(n)
        if n <= 0:
            raise GraphError("graph must be nonempty")
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if len(e):
            if e.min() < 0 or e.max() >= n:
                raise GraphError(f"edge endpoint out of range 0..{n - 1}")
            if np.any(e[:, 0] == e[:, 1]):
                v = int(e[e[:, 0] == e[:, 1]][0, 0])
                raise GraphError(f"loop at vertex {v}")
            e = np.sort(e, axis=1)
            uniq = np.unique(e, axis=0)
            if len(uniq) != len(e):
                raise GraphError("multi-edge in edge list")
            e = uniq
        self.n = n
        self.edges = e
        self.name = name
        self.factors = factors
        src = np.concatenate([e[:, 0], e[:, 1]])
        dst = np.concatenate([e[:, 1], e[:, 0]])
        self.csr = csr_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n, n))
        self.csr.sort_indices()
        ncomp, labels = connected_components(self.csr, directed=False)
        if ncomp > 1:
            a = int(np.flatnonzero(labels == labels[0])[0])
            b = int(np.flatnonzero(labels != labels[0])[0])
            raise GraphError(f"graph is disconnected: components containing {a} and {b}")
        self._dist: np.ndarray | None = None

    def __repr__(self):
        return f"MetricGraph(n={self.n}, m={len(self.edges)})"

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> np.ndarray:
        return self.csr.indices[self.csr.indptr[v]:self.csr.indptr[v + 1]]

    def is_tree(self) -> bool:
        return self.m == self.n - 1

    @property
    def dist(self) -> np.ndarray:
        if self._dist is None:
            if self.n > DENSE_LIMIT:
                raise MemoryError(f"{self.n} vertices: use rows() instead of a dense table")
            if self.factors is not None:
                self._dist = self.rows(np.arange(self.n))
            elif self.n == 1:
                self._dist = np.zeros((1, 1), dtype=np.int32)
            else:
                d = shortest_path(self.csr, method="D", directed=False, unweighted=True)
                self._dist = d.astype(np.int32)
        return self._dist

    def has_dense(self) -> bool:
        return self._dist is not None or self.n <= DENSE_LIMIT

    def rows(self, idx, cols=None) -> np.ndarray:
        """Distance block ``d(idx[i], cols[j])``."""
        idx = np.asarray(idx)
        if self._dist is not None or (self.factors is None and self.n <= DENSE_LIMIT):
            block = self.dist[idx]
            return block if cols is None else block[:, cols]
        if self.factors is None:
            d = shortest_path(self.csr, method="D", directed=False, unweighted=True, indices=idx)
            block = d.astype(np.int32)
            return block if cols is None else block[:, cols]
        g0, g1 = self.factors
        cols = np.arange(self.n) if cols is None else np.asarray(cols)
        i0, i1 = np.divmod(idx, g1.n)
        j0, j1 = np.divmod(cols, g1.n)
        return g0.dist[i0][:, j0] + g1.dist[i1][:, j1]

    def d(self, u: int, v: int) -> int:
        if self._dist is not None or self.factors is None:
            return int(self.dist[u, v])
        g0, g1 = self.factors
        (a0, a1), (b0, b1) = divmod(u, g1.n), divmod(v, g1.n)
        return int(g0.dist[a0, b0] + g1.dist[a1, b1])

    def diameter(self) -> int:
        if self.factors is not None and self._dist is None:
            return self.factors[0].diameter() + self.factors[1].diameter()
        return int(self.dist.max())

    def dist_to_set(self, S) -> np.ndarray:
        """Vector of distances from every vertex to the vertex set S."""
        S = np.unique(np.asarray(list(S) if not isinstance(S, np.ndarray) else S, dtype=np.int64))
        if len(S) == 0:
            raise ValueError("empty vertex set")
        return self.rows(S).min(axis=0)

    def set_distance(self, A, B) -> int:
        A = np.asarray(list(A), dtype=np.int64)
        B = np.asarray(list(B), dtype=np.int64)
        if len(A) == 0 or len(B) == 0:
            raise ValueError("set distance of an empty set")
        return int(self.rows(A, B).min())

    def diam(self, A) -> int:
        A = np.asarray(list(A), dtype=np.int64)
        if len(A) == 0:
            raise ValueError("diameter of an empty set")
        return int(self.rows(A, A).max())

    def ball(self, v: int, r: int) -> np.ndarray:
        return np.flatnonzero(self.rows([v])[0] <= r)

    def interval(self, a: int, b: int) -> np.ndarray:
        """Boolean mask of vertices lying on some geodesic from a to b."""
        D = self.dist
        return D[a] + D[b] == D[a, b]

    def closest(self, v: int, Y) -> int:
        """Smallest-id vertex of Y nearest to v."""
        Y = np.sort(np.asarray(list(Y), dtype=np.int64))
        row = self.rows([v], Y)[0]
        return int(Y[np.argmin(row)])

    def geodesic(self, a: int, b: int) -> list[int]:
        """Lexicographically smallest geodesic from a to b."""
        D = self.dist
        path = [a]
        cur = a
        while cur != b:
            nb = self.neighbors(cur)
            cur = int(nb[D[nb, b] == D[cur, b] - 1][0])
            path.append(cur)
        return path

    def geodesics(self, a: int, b: int, cap: int = GEODESIC_CAP) -> tuple[list[list[int]], bool]:
        """Geodesics from a to b in lexicographic order, at most ``cap`` of them.

        The flag is True when the enumeration was truncated.
        """
        D = self.dist
        out: list[list[int]] = []
        stack = [(a, [a])]
        while stack:
            cur, path = stack.pop()
            if cur == b:
                out.append(path)
                if len(out) >= cap:
                    return out, bool(stack)
                continue
            nb = self.neighbors(cur)
            nxt = nb[D[nb, b] == D[cur, b] - 1]
            for u in nxt[::-1]:
                stack.append((int(u), path + [int(u)]))
        return out, False

    def count_geodesics(self, a: int, b: int) -> int:
        D = self.dist
        order = np.flatnonzero(self.interval(a, b))
        order = order[np.argsort(D[a, order], kind="stable")]
        count = {a: 1}
        for v in order[1:]:
            v = int(v)
            nb = self.neighbors(v)
            count[v] = sum(count.get(int(u), 0) for u in nb if D[a, u] == D[a, v] - 1)
        return count[b]

    def induced(self, vertices) -> tuple["MetricGraph", np.ndarray]:
        """Induced subgraph on ``vertices`` (relabelled in sorted order)."""
        vs = np.unique(np.asarray(list(vertices), dtype=np.int64))
        index = -np.ones(self.n, dtype=np.int64)
        index[vs] = np.arange(len(vs))
        e = self.edges
        keep = (index[e[:, 0]] >= 0) & (index[e[:, 1]] >= 0)
        return MetricGraph(len(vs), index[e[keep]]), vs

    def to_json(self) -> dict:
        return {"n": self.n, "edges": self.edges.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "MetricGraph":
        return cls(data["n"], data.get("edges", []))


@dataclass
class DiscretePath:
    """Vertex sequence in a graph; ``step_bound`` is the largest jump."""

    steps: tuple[int, ...]
    graph: MetricGraph = field(repr=False)
    info: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.steps = tuple(int(s) for s in self.steps)
        if not self.steps:
            raise ValueError("empty path")

    @property
    def step_bound(self) -> int:
        if len(self.steps) < 2:
            return 0
        s = np.asarray(self.steps)
        return int(self.graph.rows(s[:-1], s[1:]).diagonal().max())

    def __len__(self):
        return len(self.steps) - 1

    def subpath(self, i: int, j: int) -> "DiscretePath":
        return DiscretePath(self.steps[i:j + 1], self.graph)


# ---------------------------------------------------------------- builders

def path_graph(n: int) -> MetricGraph:
    return MetricGraph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> MetricGraph:
    return MetricGraph(n, [(i, (i + 1) % n) for i in range(n)])


def grid_graph(rows: int, cols: int) -> MetricGraph:
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return MetricGraph(rows * cols, edges)


def random_tree(n: int, rng: np.random.Generator) -> MetricGraph:
    edges = [(i, int(rng.integers(0, i))) for i in range(1, n)]
    return MetricGraph(n, edges)


def product_graph(g0: MetricGraph, g1: MetricGraph) -> MetricGraph:
    """Cartesian product; vertex (i, j) has id ``i * g1.n + j``."""
    n1 = g1.n
    edges = []
    for a, b in g0.edges:
        j = np.arange(n1)
        edges.append(np.stack([a * n1 + j, b * n1 + j], axis=1))
    for a, b in g1.edges:
        i = np.arange(g0.n)
        edges.append(np.stack([i * n1 + a, i * n1 + b], axis=1))
    e = np.concatenate(edges) if edges else np.zeros((0, 2), dtype=np.int64)
    return MetricGraph(g0.n * n1, e, factors=(g0, g1))


def all_pairs_distances(G: MetricGraph) -> np.ndarray:
    return G.dist


# ---------------------------------------------------------------- hyperbolicity

def _directed_edges(G: MetricGraph) -> tuple[np.ndarray, np.ndarray]:
    e = G.edges
    return np.concatenate([e[:, 0], e[:, 1]]), np.concatenate([e[:, 1], e[:, 0]])


def farthest_geodesic_table(G: MetricGraph, a: int, src=None, dst=None) -> np.ndarray:
    """``B[b, p]`` = max over geodesics g from a to b of d(p, g).

    Dynamic programme over the BFS layers from a: a geodesic to b is a
    geodesic to a predecessor of b followed by one edge.
    """
    D = G.dist
    if src is None:
        src, dst = _directed_edges(G)
    la = D[a]
    B = np.empty((G.n, G.n), dtype=D.dtype)
    B[a] = D[a]
    pred = la[dst] == la[src] + 1
    s, t = src[pred], dst[pred]
    order = np.lexsort((t, la[t]))
    s, t = s[order], t[order]
    if len(t) == 0:
        return B
    layer_of_edge = la[t]
    bounds = np.flatnonzero(np.diff(layer_of_edge)) + 1
    for lo, hi in zip(np.r_[0, bounds], np.r_[bounds, len(t)]):
        ss, tt = s[lo:hi], t[lo:hi]
        starts = np.r_[0, np.flatnonzero(np.diff(tt)) + 1]
        red = np.maximum.reduceat(B[ss], starts, axis=0)
        vs = tt[starts]
        B[vs] = np.minimum(D[vs], red)
    return B


def delta_hyperbolicity(G: MetricGraph, exact_limit: int = DELTA_EXACT_LIMIT,
                        notes: list | None = None, seed: int = 0) -> int:
    """Smallest δ making every geodesic triangle δ-slim, over all geodesic choices."""
    if G.n <= 2 or G.is_tree():
        return 0
    D = G.dist
    src, dst = _directed_edges(G)
    if G.n > exact_limit:
        # sampled lower bound; recorded as an approximation
        rng = np.random.default_rng(seed)
        pairs = rng.integers(0, G.n, size=(400, 2))
        best = 0
        for x, y in pairs:
            Bx = farthest_geodesic_table(G, int(x), src, dst)
            By = farthest_geodesic_table(G, int(y), src, dst)
            P = np.flatnonzero(G.interval(int(x), int(y)))
            best = max(best, int(np.minimum(By[:, P], Bx[:, P]).max()))
        if notes is not None:
            notes.append({"kind": "delta_sampled", "n": G.n, "pairs": 400, "seed": seed})
        return best
    dtype = np.uint8 if D.max() < 255 else np.uint16
    tables = np.empty((G.n, G.n, G.n), dtype=dtype)
    for a in range(G.n):
        tables[a] = farthest_geodesic_table(G, a, src, dst)
    iu, ju = np.triu_indices(G.n, 1)
    dd = D[iu, ju]
    order = np.argsort(-dd, kind="stable")
    best = 0
    for k in order:
        if dd[k] // 2 <= best:
            break
        x, y = int(iu[k]), int(ju[k])
        P = np.flatnonzero(D[x] + D[y] == D[x, y])
        val = int(np.minimum(tables[y][:, P], tables[x][:, P]).max())
        best = max(best, val)
    return best


def slim_delta_bruteforce(G: MetricGraph) -> int:
    """Oracle: enumerate every triangle and every choice of its three sides."""
    D = G.dist
    best = 0
    geo = {}
    for a in range(G.n):
        for b in range(G.n):
            geo[a, b] = G.geodesics(a, b)[0]
    for x, y, z in itertools.combinations(range(G.n), 3):
        for s1 in geo[x, y]:
            for s2 in geo[y, z]:
                for s3 in geo[x, z]:
                    sides = (s1, s2, s3)
                    for i in range(3):
                        others = sides[(i + 1) % 3] + sides[(i + 2) % 3]
                        for p in sides[i]:
                            best = max(best, int(D[p, others].min()))
    return best


# ---------------------------------------------------------------- quasiconvexity

def quasiconvexity_constant(G: MetricGraph, Y) -> int:
    """max over pairs of Y of min over geodesics of the farthest excursion from Y."""
    Y = np.unique(np.asarray(list(Y), dtype=np.int64))
    if len(Y) == 0:
        raise ValueError("quasiconvexity of an empty set")
    if len(Y) == 1:
        return 0
    D = G.dist
    dY = D[Y].min(axis=0)
    src, dst = _directed_edges(G)
    best = 0
    for a in Y:
        la = D[a]
        val = np.full(G.n, np.iinfo(np.int64).max, dtype=np.int64)
        val[a] = dY[a]
        pred = la[dst] == la[src] + 1
        s, t = src[pred], dst[pred]
        order = np.lexsort((t, la[t]))
        s, t = s[order], t[order]
        if len(t):
            bounds = np.flatnonzero(np.diff(la[t])) + 1
            for lo, hi in zip(np.r_[0, bounds], np.r_[bounds, len(t)]):
                ss, tt = s[lo:hi], t[lo:hi]
                starts = np.r_[0, np.flatnonzero(np.diff(tt)) + 1]
                red = np.minimum.reduceat(val[ss], starts)
                vs = tt[starts]
                val[vs] = np.maximum(dY[vs], red)
        best = max(best, int(val[Y].max()))
    return best


# ---------------------------------------------------------------- quasigeodesics

@dataclass
class QGFailure:
    """Returned when no reparameterization is found below the cap."""

    cap: int

    def __bool__(self):
        return False


def _seq_tables(G: MetricGraph, seq) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    sets = [np.unique(np.asarray(list(s), dtype=np.int64)) for s in seq]
    if any(len(s) == 0 for s in sets):
        raise ValueError("empty set in sequence")
    allv = np.concatenate(sets)
    owner = np.concatenate([[i] * len(s) for i, s in enumerate(sets)])
    block = G.rows(allv, allv)
    k = len(sets)
    dmin = np.full((k, k), np.iinfo(np.int32).max, dtype=np.int64)
    dmax = np.zeros((k, k), dtype=np.int64)
    np.minimum.at(dmin, (owner[:, None], owner[None, :]), block)
    np.maximum.at(dmax, (owner[:, None], owner[None, :]), block)
    # seg[i, j]: diameter of the union of entries i..j
    seg = np.zeros((k, k), dtype=np.int64)
    seg[np.arange(k), np.arange(k)] = dmax.diagonal()
    for j in range(1, k):
        col = np.maximum.accumulate(dmax[j::-1, j])[::-1]
        seg[:j, j] = np.maximum(seg[:j, j - 1], col[:j])
        seg[j, :j] = seg[:j, j]
    return dmin, dmax, seg


def _qg_ok(idx, D: int, dmin, dmax, seg) -> bool:
    idx = np.asarray(idx)
    L = len(idx)
    if L > 1 and seg[idx[:-1], idx[1:]].max() > D:
        return False
    gap = np.abs(np.arange(L)[:, None] - np.arange(L)[None, :])
    if np.any(dmin[np.ix_(idx, idx)] * D < gap - D * D):
        return False
    return not np.any(dmax[np.ix_(idx, idx)] > D * gap + D)


def _qg_exhaustive(k: int, D: int, dmin, dmax, seg) -> bool:
    inner = list(range(1, k - 1))
    for r in range(len(inner) + 1):
        for chosen in itertools.combinations(inner, r):
            idx = [0, *chosen, k - 1] if k > 1 else [0]
            if _qg_ok(idx, D, dmin, dmax, seg):
                return True
    return False


def _qg_search(k: int, D: int, dmin, dmax, seg) -> bool:
    if k == 1:
        return _qg_ok([0], D, dmin, dmax, seg)
    hop = np.triu(seg <= D, 1)
    inf = np.iinfo(np.int32).max
    far = np.full(k, inf, dtype=np.int64)
    far[k - 1] = 0
    for i in range(k - 2, -1, -1):
        nxt = np.flatnonzero(hop[i])
        if len(nxt):
            far[i] = far[nxt].min() + 1
    if far[0] >= inf:
        return False
    for prefer_far in (True, False):
        idx = [0]
        i = 0
        while i != k - 1:
            nxt = np.flatnonzero(hop[i] & (far == far[i] - 1))
            i = int(nxt[-1] if prefer_far else nxt[0])
            idx.append(i)
        if _qg_ok(idx, D, dmin, dmax, seg):
            return True
    return False


def unparam_qg_constant(G: MetricGraph, seq: Sequence[Iterable[int]], D_max: int = 64,
                        method: str = "auto"):
    """Smallest D such that ``seq`` is a (D, D)-unparameterized quasigeodesic.

    The reparameterization must keep both endpoints, and every stretch of
    ``seq`` skipped between consecutive kept entries must have diameter at
    most D (so backtracks cannot be hidden by skipping them).  ``method`` is
    ``"exhaustive"`` (all subsequences), ``"search"`` (fewest-hop chains) or
    ``"auto"`` (exhaustive for at most 12 entries).  Returns a
    :class:`QGFailure` when no D up to ``D_max`` works.
    """
    seq = list(seq)
    if not seq:
        raise ValueError("empty sequence")
    dmin, dmax, seg = _seq_tables(G, seq)
    k = len(seq)
    if method == "auto":
        method = "exhaustive" if k <= 12 else "search"
    test = _qg_exhaustive if method == "exhaustive" else _qg_search
    for D in range(1, D_max + 1):
        if test(k, D, dmin, dmax, seg):
            return D
    return QGFailure(D_max)


def triangle_center(G: MetricGraph, a: int, b: int, c: int, delta: int) -> int:
    """Smallest-id vertex within ``delta`` of a geodesic on each side of (a, b, c).

    Falls back to the vertex minimising the largest side distance when no
    vertex is within ``delta`` of all three sides.
    """
    D = G.dist
    sides = [G.interval(a, b), G.interval(b, c), G.interval(a, c)]
    far = np.zeros(G.n, dtype=np.int64)
    for mask in sides:
        far = np.maximum(far, D[:, mask].min(axis=1))
    ok = np.flatnonzero(far <= delta)
    if len(ok):
        return int(ok[0])
    return int(np.argmin(far))


def tree_median(G: MetricGraph, a: int, b: int, c: int) -> int:
    """The unique vertex on all three geodesics of a tree triangle."""
    D = G.dist
    on_all = (D[a] + D[b] == D[a, b]) & (D[b] + D[c] == D[b, c]) & (D[a] + D[c] == D[a, c])
    return int(np.flatnonzero(on_all)[0])
