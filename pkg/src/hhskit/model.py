"""Hierarchical structures on finite graphs.

An :class:`HInstance` stores everything extensionally: relations as
boolean matrices, projections as padded integer tables, and relative
projections as sets or padded per-vertex tables.  Domains are addressed by
an internal dense index ``0..m-1`` ordered by external id.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .metric import GraphError, MetricGraph


class InstanceError(ValueError):
    """Raised by :func:`validate_instance` with every violated invariant."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors[:8]) + (" ..." if len(self.errors) > 8 else ""))


def pad_sets(sets, width: int | None = None) -> np.ndarray:
    """Pack a list of nonempty integer sets into a rectangle.

    Short rows are padded by repeating their first element, so min/max
    distance reductions over a row are unaffected by the padding.
    """
    rows = [np.unique(np.asarray(s, dtype=np.int64).ravel()) for s in sets]
    if any(len(r) == 0 for r in rows):
        raise ValueError("empty set")
    w = max((len(r) for r in rows), default=1) if width is None else width
    out = np.empty((len(rows), w), dtype=np.int64)
    for i, r in enumerate(rows):
        out[i, :len(r)] = r
        out[i, len(r):] = r[0]
    return out


def row_set(table: np.ndarray, i: int) -> np.ndarray:
    return np.unique(table[i])


@dataclass
class HInstance:
    """A hierarchical structure on a finite graph.

    ``nest[i, j]`` means domain i is nested in domain j (reflexive);
    ``orth`` is symmetric.  ``pi[u]`` has one row per vertex of ``X``.
    ``rho_set[(u, v)]`` is the set ρ^u_v in C v, defined when u is properly
    nested in v or transverse to it; ``rho_map[(w, v)]`` has one row per
    vertex of C w and is defined when v is properly nested in w.
    """

    X: MetricGraph
    ids: list[int]
    names: list[str]
    graphs: list[MetricGraph]
    nest: np.ndarray
    orth: np.ndarray
    maximal: int | None
    containers: dict[tuple[int, int], int]
    pi: list[np.ndarray]
    rho_set: dict[tuple[int, int], np.ndarray]
    rho_map: dict[tuple[int, int], np.ndarray]
    hyperbolic: list[bool]
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        m = len(self.ids)
        self.nest = np.asarray(self.nest, dtype=bool).reshape(m, m)
        self.orth = np.asarray(self.orth, dtype=bool).reshape(m, m)
        self._index = {d: i for i, d in enumerate(self.ids)}
        self._level: np.ndarray | None = None

    # ------------------------------------------------------------ relations
    @property
    def m(self) -> int:
        return len(self.ids)

    @property
    def trans(self) -> np.ndarray:
        t = ~(self.nest | self.nest.T | self.orth)
        np.fill_diagonal(t, False)
        return t

    @property
    def proper_nest(self) -> np.ndarray:
        p = self.nest.copy()
        np.fill_diagonal(p, False)
        return p

    def index(self, domain_id: int) -> int:
        try:
            return self._index[int(domain_id)]
        except KeyError:
            raise KeyError(f"unknown domain id {domain_id}") from None

    def nested_in(self, w: int) -> np.ndarray:
        """Indices of 𝔖_w (including w)."""
        return np.flatnonzero(self.nest[:, w])

    def is_point(self, u: int) -> bool:
        return self.graphs[u].n == 1

    def levels(self) -> np.ndarray:
        if self._level is None:
            lev = np.zeros(self.m, dtype=np.int64)
            below = self.proper_nest
            order = np.argsort(below.sum(axis=0), kind="stable")
            for u in order:
                subs = np.flatnonzero(below[:, u])
                lev[u] = 1 if len(subs) == 0 else 1 + lev[subs].max()
            self._level = lev
        return self._level

    def level(self, domain_id: int) -> int:
        return int(self.levels()[self.index(domain_id)])

    def level_family(self, u: int, ell: int, exact: bool = True) -> np.ndarray:
        """𝔗_u^ℓ (exact) or 𝔖_u^ℓ: domains in 𝔖_u whose level is ℓ below u."""
        lev = self.levels()
        inside = self.nest[:, u]
        gap = lev[u] - lev
        sel = inside & ((gap == ell) if exact else (gap <= ell))
        return np.flatnonzero(sel)

    def complexity(self) -> int:
        """Length of the longest ⊑-chain."""
        return int(self.levels().max()) if self.m else 0

    # ------------------------------------------------------------ distances
    def pi_set(self, u: int, x: int) -> np.ndarray:
        return np.unique(self.pi[u][x])

    def point_tuple(self, x: int) -> list[np.ndarray]:
        return [self.pi_set(u, x) for u in range(self.m)]

    def dU(self, u: int, A, B) -> int:
        """Minimum distance between vertex sets A and B of C u."""
        return self.graphs[u].set_distance(A, B)

    def proj_dist(self, u: int, xs, ys) -> np.ndarray:
        """Matrix of d_u(π_u x, π_u y) for x in xs, y in ys."""
        D = self.graphs[u].dist
        P = self.pi[u]
        xs = np.asarray(xs)
        ys = np.asarray(ys)
        if P.shape[1] == 1:
            return D[P[xs, 0]][:, P[ys, 0]]
        out = None
        for a in range(P.shape[1]):
            for b in range(P.shape[1]):
                blk = D[P[xs, a]][:, P[ys, b]]
                out = blk if out is None else np.minimum(out, blk)
        return out

    def dist_to_set(self, u: int, S) -> np.ndarray:
        """d_u(π_u x, S) for every x in X."""
        dS = self.graphs[u].dist_to_set(S)
        return dS[self.pi[u]].min(axis=1)

    def rho_image(self, w: int, v: int, points) -> np.ndarray:
        """ρ^w_v applied to a set of vertices of C w (v properly nested in w)."""
        tab = self.rho_map[(w, v)]
        return np.unique(tab[np.asarray(list(points), dtype=np.int64)])

    def image_diameter(self, u: int) -> int:
        img = np.unique(self.pi[u])
        return self.graphs[u].diam(img)

    # ------------------------------------------------------------ families
    def orth_families(self, max_size: int | None = None) -> list[tuple[int, ...]]:
        """All nonempty pairwise-orthogonal families, in lexicographic order."""
        out: list[tuple[int, ...]] = []
        cap = max_size or self.m

        def grow(fam, start):
            out.append(tuple(fam))
            if len(fam) >= cap:
                return
            for v in range(start, self.m):
                if all(self.orth[v, f] for f in fam):
                    grow(fam + [v], v + 1)

        for u in range(self.m):
            grow([u], u + 1)
        return out

    def max_orth_family(self, within=None) -> int:
        dom = range(self.m) if within is None else list(within)
        best = 0
        for fam in self.orth_families():
            if all(f in dom for f in fam):
                best = max(best, len(fam))
        return best

    def chi(self) -> int:
        """Largest family of pairwise non-transverse domains."""
        nt = ~self.trans
        best = 0
        # branch and bound over cliques of the non-transversality graph
        order = list(np.argsort(-nt.sum(axis=1), kind="stable"))

        def expand(clique, cand):
            nonlocal best
            if len(clique) > best:
                best = len(clique)
            if len(clique) + len(cand) <= best:
                return
            for i, v in enumerate(cand):
                rest = [w for w in cand[i + 1:] if nt[v, w]]
                expand(clique + [v], rest)

        expand([], order)
        return best

    def describe(self) -> dict:
        return {
            "n_vertices": self.X.n,
            "n_domains": self.m,
            "complexity": self.complexity(),
            "mode": "hhs" if all(self.hyperbolic) else "relative",
        }


# ---------------------------------------------------------------- validation

def check_instance(H: HInstance) -> list[str]:
    """Every violated structural invariant of H, as human-readable strings."""
    errs: list[str] = []
    m = H.m
    ids = H.ids
    if len(set(ids)) != m:
        errs.append("duplicate domain ids")
    if len(H.graphs) != m or len(H.pi) != m or len(H.names) != m or len(H.hyperbolic) != m:
        errs.append("per-domain lists have inconsistent lengths")
        return errs
    if m == 0:
        if H.maximal is not None:
            errs.append("maximal domain given for an empty index set")
        return errs
    N, O = H.nest, H.orth
    if not N.diagonal().all():
        errs.append("nesting is not reflexive")
    anti = N & N.T
    np.fill_diagonal(anti, False)
    for i, j in zip(*np.nonzero(np.triu(anti))):
        errs.append(f"nesting not antisymmetric: {ids[i]} and {ids[j]}")
    NN = (N.astype(np.int64) @ N.astype(np.int64)) > 0
    for i, j in zip(*np.nonzero(NN & ~N)):
        errs.append(f"nesting not transitive: {ids[i]} ⊑ ... ⊑ {ids[j]}")
        break
    tops = [u for u in range(m) if N[u].sum() == 1]
    if len(tops) != 1:
        errs.append(f"expected a unique ⊑-maximal domain, found {[ids[u] for u in tops]}")
    elif H.maximal is None or tops[0] != H.maximal:
        errs.append(f"declared maximal domain {None if H.maximal is None else ids[H.maximal]} "
                    f"is not the ⊑-maximum {ids[tops[0]]}")
    elif not N[:, H.maximal].all():
        errs.append("maximal domain does not contain every domain")
    if (O != O.T).any():
        i, j = np.argwhere(O != O.T)[0]
        errs.append(f"orthogonality not symmetric: {ids[i]}, {ids[j]}")
    if O.diagonal().any():
        errs.append(f"orthogonality not anti-reflexive at {ids[int(np.flatnonzero(O.diagonal())[0])]}")
    both = O & (N | N.T)
    for i, j in zip(*np.nonzero(np.triu(both))):
        errs.append(f"orthogonal comparable pair: {ids[i]}, {ids[j]}")
    for u, G in enumerate(H.graphs):
        P = H.pi[u]
        if P.shape[0] != H.X.n:
            errs.append(f"pi[{ids[u]}] has {P.shape[0]} rows, expected {H.X.n}")
            continue
        if P.min() < 0 or P.max() >= G.n:
            errs.append(f"pi[{ids[u]}] has vertices outside C {ids[u]}")
    proper = H.proper_nest
    trans = H.trans
    need_set = proper | trans
    for i in range(m):
        for j in range(m):
            key = (i, j)
            if need_set[i, j] and key not in H.rho_set:
                errs.append(f"missing rho_set from {ids[i]} to {ids[j]}")
            elif not need_set[i, j] and key in H.rho_set:
                errs.append(f"unexpected rho_set from {ids[i]} to {ids[j]}")
            elif key in H.rho_set:
                s = H.rho_set[key]
                if len(s) == 0 or s.min() < 0 or s.max() >= H.graphs[j].n:
                    errs.append(f"rho_set from {ids[i]} to {ids[j]} empty or out of range")
            if proper[j, i]:
                tab = H.rho_map.get(key)
                if tab is None:
                    errs.append(f"missing rho_map from {ids[i]} to {ids[j]}")
                elif tab.shape[0] != H.graphs[i].n or tab.min() < 0 or tab.max() >= H.graphs[j].n:
                    errs.append(f"rho_map from {ids[i]} to {ids[j]} has wrong shape or range")
            elif key in H.rho_map:
                errs.append(f"unexpected rho_map from {ids[i]} to {ids[j]}")
    minimal = ~proper.any(axis=0)
    for u in range(m):
        if not H.hyperbolic[u] and not minimal[u]:
            errs.append(f"domain {ids[u]} is not ⊑-minimal and must be flagged hyperbolic")
    xi = H.meta.get("declared", {}).get("xi")
    if xi is not None:
        for u in range(m):
            D = H.graphs[u].dist
            P = H.pi[u]
            w = P.shape[1]
            diam = max((int(D[P[:, a], P[:, b]].max()) for a in range(w) for b in range(w)), default=0)
            if diam > xi:
                errs.append(f"pi[{ids[u]}] has a set of diameter {diam} > declared xi {xi}")
    return errs


def validate(H: HInstance) -> HInstance:
    errs = check_instance(H)
    if errs:
        raise InstanceError(errs)
    return H


def validate_instance(raw: dict) -> HInstance:
    """Parse instance JSON data and check every structural invariant.

    Raises :class:`InstanceError` listing all problems found.
    """
    errs: list[str] = []
    if not isinstance(raw, dict):
        raise InstanceError(["instance must be a JSON object"])
    try:
        X = MetricGraph.from_json(raw["total_space"])
    except KeyError:
        raise InstanceError(["missing field total_space"]) from None
    except (GraphError, TypeError, ValueError) as exc:
        raise InstanceError([f"total_space: {exc}"]) from None
    doms = sorted(raw.get("domains", []), key=lambda d: d["id"])
    ids = [int(d["id"]) for d in doms]
    if len(set(ids)) != len(ids):
        raise InstanceError(["duplicate domain ids"])
    idx = {d: i for i, d in enumerate(ids)}
    m = len(ids)
    graphs = []
    for d in doms:
        try:
            graphs.append(MetricGraph.from_json(d["graph"]))
        except (GraphError, KeyError, TypeError, ValueError) as exc:
            errs.append(f"domain {d.get('id')}: graph {exc}")
    if errs:
        raise InstanceError(errs)

    def lookup(d, what):
        if int(d) not in idx:
            errs.append(f"{what} refers to unknown domain {d}")
            return None
        return idx[int(d)]

    nest = np.eye(m, dtype=bool)
    for a, b in raw.get("nesting", []):
        i, j = lookup(a, "nesting"), lookup(b, "nesting")
        if i is not None and j is not None:
            nest[i, j] = True
    orth = np.zeros((m, m), dtype=bool)
    for a, b in raw.get("orthogonality", []):
        i, j = lookup(a, "orthogonality"), lookup(b, "orthogonality")
        if i is not None and j is not None:
            orth[i, j] = orth[j, i] = True
    maximal = raw.get("maximal")
    maximal = lookup(maximal, "maximal") if maximal is not None else None
    containers = {}
    for t, u, w in raw.get("containers", []):
        ti, ui, wi = lookup(t, "container"), lookup(u, "container"), lookup(w, "container")
        if None not in (ti, ui, wi):
            containers[(ti, ui)] = wi
    pi_raw = raw.get("pi", {})
    pi = []
    for d in ids:
        rows = pi_raw.get(str(d))
        if rows is None:
            errs.append(f"missing pi for domain {d}")
            pi.append(np.zeros((X.n, 1), dtype=np.int64))
            continue
        if len(rows) != X.n:
            errs.append(f"pi[{d}] has {len(rows)} rows, expected {X.n}")
            pi.append(np.zeros((X.n, 1), dtype=np.int64))
            continue
        try:
            pi.append(pad_sets([r if isinstance(r, list) else [r] for r in rows]))
        except ValueError:
            errs.append(f"pi[{d}] contains an empty set")
            pi.append(np.zeros((X.n, 1), dtype=np.int64))
    rho_set = {}
    for entry in raw.get("rho_set", []):
        i, j = lookup(entry["from"], "rho_set"), lookup(entry["to"], "rho_set")
        if i is None or j is None:
            continue
        s = np.unique(np.asarray(entry["set"], dtype=np.int64))
        if len(s) == 0:
            errs.append(f"rho_set from {entry['from']} to {entry['to']} is empty")
            continue
        rho_set[(i, j)] = s
    rho_map = {}
    for entry in raw.get("rho_map", []):
        i, j = lookup(entry["from"], "rho_map"), lookup(entry["to"], "rho_map")
        if i is None or j is None:
            continue
        try:
            rho_map[(i, j)] = pad_sets([r if isinstance(r, list) else [r] for r in entry["map"]])
        except ValueError:
            errs.append(f"rho_map from {entry['from']} to {entry['to']} contains an empty set")
    if errs:
        raise InstanceError(errs)
    H = HInstance(
        X=X, ids=ids, names=[str(d.get("name", d["id"])) for d in doms], graphs=graphs,
        nest=nest, orth=orth, maximal=maximal, containers=containers, pi=pi,
        rho_set=rho_set, rho_map=rho_map,
        hyperbolic=[bool(d.get("hyperbolic", True)) for d in doms],
        meta=dict(raw.get("meta", {})),
    )
    return validate(H)


def instance_to_json(H: HInstance) -> dict:
    """Inverse of :func:`validate_instance`."""
    ids = H.ids

    def sets(table):
        return [np.unique(r).tolist() for r in table]

    out = {
        "total_space": H.X.to_json(),
        "domains": [{"id": ids[u], "name": H.names[u], "graph": H.graphs[u].to_json(),
                     "hyperbolic": bool(H.hyperbolic[u])} for u in range(H.m)],
        "nesting": [[ids[i], ids[j]] for i, j in zip(*np.nonzero(H.proper_nest))],
        "orthogonality": [[ids[i], ids[j]] for i, j in zip(*np.nonzero(np.triu(H.orth)))],
        "maximal": None if H.maximal is None else ids[H.maximal],
        "containers": [[ids[t], ids[u], ids[w]] for (t, u), w in sorted(H.containers.items())],
        "pi": {str(ids[u]): sets(H.pi[u]) for u in range(H.m)},
        "rho_set": [{"from": ids[i], "to": ids[j], "set": s.tolist()}
                    for (i, j), s in sorted(H.rho_set.items())],
        "rho_map": [{"from": ids[i], "to": ids[j], "map": sets(t)}
                    for (i, j), t in sorted(H.rho_map.items())],
    }
    meta = {k: v for k, v in H.meta.items() if not k.startswith("_")}
    if meta:
        out["meta"] = meta
    return out


def derive_containers(nest: np.ndarray, orth: np.ndarray) -> dict[tuple[int, int], int]:
    """For each (T, U) with orthogonal partners inside T, the first W ⊊ T
    (by index) containing all of them, when one exists."""
    m = len(nest)
    out = {}
    for T in range(m):
        inT = nest[:, T]
        for U in np.flatnonzero(inT):
            partners = np.flatnonzero(inT & orth[:, U])
            if len(partners) == 0:
                continue
            for W in np.flatnonzero(inT):
                if W != T and nest[partners, W].all():
                    out[(T, int(U))] = int(W)
                    break
    return out


def set_distance(H: HInstance, domain_id: int, A, B) -> int:
    return H.dU(H.index(domain_id), A, B)


def level(H: HInstance, domain_id: int) -> int:
    return H.level(domain_id)


# ---------------------------------------------------------------- tuples

Tuple = list  # list of np.ndarray, one vertex set per domain index


def tuple_diameter(H: HInstance, b: Tuple) -> int:
    return max((H.graphs[u].diam(b[u]) for u in range(H.m)), default=0)


def check_tuple(H: HInstance, b: Tuple, bound: int | None = None) -> None:
    if len(b) != H.m:
        raise ValueError(f"tuple has {len(b)} coordinates, expected {H.m}")
    for u in range(H.m):
        s = np.asarray(b[u])
        if len(s) == 0:
            raise ValueError(f"empty coordinate for domain {H.ids[u]}")
        if s.min() < 0 or s.max() >= H.graphs[u].n:
            raise ValueError(f"coordinate for domain {H.ids[u]} out of range")
        if bound is not None and H.graphs[u].diam(s) > bound:
            raise ValueError(f"coordinate for domain {H.ids[u]} exceeds diameter {bound}")
