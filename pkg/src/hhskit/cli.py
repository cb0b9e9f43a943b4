"""Command line interface: ``hhskit verify | run | build``.

Exit codes: 0 success, 1 a verification or combination check failed (the
report carries a witness), 2 bad input.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import io
from .model import InstanceError

TASKS = ("realize", "median", "path", "df-fit", "df-cert", "gate", "hull", "rel-hull", "poset")
KINDS = ("complexity1", "product", "relative", "combine", "flip-example")


class UsageError(Exception):
    pass


def _ints(text: str | None, what: str, count: int | None = None) -> list[int]:
    if text is None:
        raise UsageError(f"missing {what}")
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"{what} must be comma-separated integers, got {text!r}") from None
    if count is not None and len(vals) != count:
        raise UsageError(f"{what} needs {count} values, got {len(vals)}")
    return vals


def _vertex(H, v: int, what: str) -> int:
    if not 0 <= v < H.X.n:
        raise UsageError(f"{what}={v} is not a vertex (n={H.X.n})")
    return v


class Output:
    """Report destination plus the directory for CSV and figure side-files."""

    def __init__(self, args, stem: str):
        self.out = Path(args.out) if args.out else None
        side = args.csv_dir or (self.out.parent if self.out else None)
        self.dir = Path(side) if side else None
        self.stem = self.out.stem if self.out else stem
        self.figures = args.figures
        self.files: list[str] = []
        if self.figures and self.dir is None:
            raise UsageError("--figures needs --out or --csv-dir")

    def side(self, suffix: str) -> Path | None:
        if self.dir is None:
            return None
        self.dir.mkdir(parents=True, exist_ok=True)
        p = self.dir / f"{self.stem}.{suffix}"
        self.files.append(p.name)
        return p

    def csv(self, suffix: str, header, rows) -> None:
        p = self.side(suffix + ".csv")
        if p is not None:
            io.write_csv(p, header, rows)

    def emit(self, report: dict) -> None:
        if self.files:
            report["side_files"] = sorted(self.files)
        text = io.dumps(report)
        if self.out is None:
            sys.stdout.write(text)
        else:
            self.out.write_text(text)


# ---------------------------------------------------------------- verify

def cmd_verify(args) -> int:
    from .verifier import verify
    H = io.load_instance(args.instance)
    rep = verify(H, seed=args.seed, corpus_size=args.corpus_size)
    out = Output(args, "verify")
    data = rep.to_json()
    data["instance"] = Path(args.instance).name
    out.csv("theta_u", ["kappa", "theta_u"], sorted(rep.constants.theta_u.items()))
    out.emit(data)
    if not rep.passed:
        w = data["witnesses"][:1]
        print(f"verification failed: {w}", file=sys.stderr)
    return 0 if rep.passed else 1


# ---------------------------------------------------------------- run

def _path_job(payload):
    path, x, y, r = payload
    from .paths import audit_path, good_path
    H = io.load_instance(path)
    p = good_path(H, x, y, r=r)
    return p.steps, audit_path(H, p).to_json()


def task_path(H, args, out: Output) -> dict:
    from .paths import active_subpath, audit_path, good_path, proper_subsample
    from .verifier import constants_for
    c = constants_for(H, args.seed)
    if args.pairs:
        rng = np.random.default_rng(args.seed)
        pairs = [tuple(int(v) for v in rng.integers(H.X.n, size=2)) for _ in range(args.pairs)]
        jobs = [(str(io.resolve(args.instance)), x, y, args.r) for x, y in pairs]
        if args.jobs > 1:
            with ProcessPoolExecutor(args.jobs) as ex:
                results = list(ex.map(_path_job, jobs))
        else:
            results = [_path_job(j) for j in jobs]
        rows = [(x, y, len(s) - 1, a["efficiency"], a["D"]) for (x, y), (s, a) in zip(pairs, results)]
        out.csv("paths", ["x", "y", "length", "efficiency", "D"], rows)
        return {"pairs": len(pairs), "D": max(a["D"] for _, a in results),
                "audits": [{"x": x, "y": y, **a} for (x, y), (_, a) in zip(pairs, results)]}
    x = _vertex(H, args.source, "--from")
    y = _vertex(H, args.target, "--to")
    p = good_path(H, x, y, r=args.r, constants=c)
    audit = audit_path(H, p)
    res = {"path": list(p.steps), "audit": audit.to_json(), "K": p.info["K"],
           "splices": p.info["splices"], "theta0": p.info["theta0"]}
    if args.r is not None:
        res["proper"] = list(p.info["proper"].steps)
    out.csv("audit", ["domain", "monotonicity_defect", "qg_constant"], audit.rows())
    prof = {}
    for u in range(H.m):
        if not H.is_point(u):
            prof[H.ids[u]] = H.proj_dist(u, [x], list(p.steps))[0].tolist()
    out.csv("profile", ["step", "vertex", *prof],
            [(i, v, *(prof[k][i] for k in prof)) for i, v in enumerate(p.steps)])
    if out.figures:
        from .figures import path_profiles
        path_profiles(prof, out.side("profile.png"))
    if args.active:
        res["active"] = [active_subpath(H, p, v) for v in _ints(args.active, "--active")]
    return res


def task_df_fit(H, args, out: Output) -> dict:
    from .paths import fit_df_constants
    fit = fit_df_constants(H, args.s)
    rows = fit.rows()
    out.csv("df_scatter", ["sigma", "d", "count"], rows)
    if out.figures:
        from .figures import df_scatter
        df_scatter(rows, fit.frontier, out.side("df_scatter.png"), args.s)
    res = fit.to_json()
    res["table"] = [{"K": k, "C": v} for k, v in fit.frontier.items()]
    return res


def task_df_cert(H, args, out: Output) -> dict:
    from .paths import df_lower_certificate
    x = _vertex(H, args.source, "--from")
    y = _vertex(H, args.target, "--to")
    cert = df_lower_certificate(H, x, y, args.s0)
    out.csv("doors", ["index", "domains"], [(j, " ".join(map(str, m))) for j, m in cert.doors])
    return cert.to_json()


def task_realize(H, args, out: Output) -> dict:
    from .realization import median_tuple, perturbed_tuple, point_tuple, realize
    from .verifier import constants_for
    c = constants_for(H, args.seed)
    pts = _ints(args.points, "--points")
    for v in pts:
        _vertex(H, v, "--points")
    if len(pts) == 3:
        b = median_tuple(H, *pts, c.delta)
        kind = "median"
    elif len(pts) == 1 and args.radius:
        b = perturbed_tuple(H, pts[0], args.radius, np.random.default_rng(args.seed))
        kind = "perturbed"
    elif len(pts) == 1:
        b = point_tuple(H, pts[0])
        kind = "point"
    else:
        raise UsageError("--points takes one vertex (point tuple) or three (median tuple)")
    res = realize(H, b, mode=args.mode, constants=c)
    return {"tuple": kind, "tuple_values": {str(H.ids[u]): b[u].tolist() for u in range(H.m)},
            "mode": args.mode, "point": int(res[0]), "deviation": int(res[1])}


def task_median(H, args, out: Output) -> dict:
    from .convexity import coarse_median
    a, b, c = (_vertex(H, v, "--points") for v in _ints(args.points, "--points", 3))
    m = coarse_median(H, a, b, c)
    return {"points": [a, b, c], "median": m.point, "deviation": m.deviation,
            "consistency": m.consistency, "bound": m.bound}


def task_gate(H, args, out: Output) -> dict:
    from .convexity import gate_report, hq_profile
    Y = _ints(args.set, "--set")
    prof = hq_profile(H, Y)
    rep = gate_report(H, Y)
    table = rep.pop("table")
    out.csv("gate", ["x", "gate"], list(enumerate(np.asarray(table).tolist())))
    res = {"set": Y, "hq_profile": prof.to_json(), **rep}
    if args.source is not None:
        res["x"] = _vertex(H, args.source, "--from")
        res["gate"] = int(table[args.source])
    return res


def task_hull(H, args, out: Output) -> dict:
    from .convexity import finite_hull, hull_threshold, pair_hull
    A = _ints(args.set, "--set")
    theta = args.theta if args.theta is not None else hull_threshold(H)
    h = pair_hull(H, A[0], A[1], theta) if len(A) == 2 else finite_hull(H, A, theta)
    out.csv("retraction", ["x", "r"], list(enumerate(h.retraction.tolist())))
    return {"set": A, "theta": theta, "hull": h.points.tolist(), "lipschitz": h.lipschitz,
            "max_deviation": h.max_deviation}


def task_rel_hull(H, args, out: Output) -> dict:
    from .convexity import hull_threshold, relative_hull
    from .paths import fit_df_constants
    from .verifier import verify
    x = _vertex(H, args.source, "--from")
    y = _vertex(H, args.target, "--to")
    theta = args.theta if args.theta is not None else hull_threshold(H)
    R = relative_hull(H, x, y, theta)
    rep = verify(R.instance, seed=args.seed, corpus_size=args.corpus_size)
    res = {"points": R.points.tolist(), "theta": theta, "verified": rep.passed,
           "constants": rep.constants.to_json(), "witnesses": rep.witnesses()}
    if args.s:
        res["df"] = fit_df_constants(R.instance, args.s).to_json()
    return res


def task_poset(H, args, out: Output) -> dict:
    from .realization import chain_coloring, point_tuple, relevance_poset
    from .verifier import constants_for
    c = constants_for(H, args.seed)
    x = _vertex(H, args.source, "--from")
    y = _vertex(H, args.target, "--to")
    kappa = args.kappa if args.kappa is not None else max(c.kappa0, 1)
    theta = args.theta if args.theta is not None else 100 * max(kappa, c.E)
    try:
        P = relevance_poset(H, x, point_tuple(H, y), theta, kappa, c.E)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    col = chain_coloring(P)
    return {"theta": theta, "kappa": kappa, "poset": P.to_json(),
            "antisymmetric": P.is_antisymmetric(), "transitive": P.is_transitive(),
            "dichotomy": P.dichotomy_holds(),
            "coloring": {str(H.ids[u]): k for u, k in sorted(col.items())},
            "colors": len(set(col.values())), "chi": H.chi()}


RUNNERS = {"realize": task_realize, "median": task_median, "path": task_path,
           "df-fit": task_df_fit, "df-cert": task_df_cert, "gate": task_gate,
           "hull": task_hull, "rel-hull": task_rel_hull, "poset": task_poset}


def cmd_run(args) -> int:
    if args.task not in RUNNERS:
        raise UsageError(f"unknown task {args.task!r}; choose from {', '.join(TASKS)}")
    H = io.load_instance(args.instance)
    out = Output(args, args.task)
    res = RUNNERS[args.task](H, args, out)
    out.emit({"task": args.task, "instance": Path(args.instance).name, "result": res,
              "seed": args.seed, "approximations": []})
    return 0


# ---------------------------------------------------------------- build

def _graph_from(path):
    from .metric import MetricGraph
    raw = io.read_json(io.resolve(path))
    if "total_space" in raw:
        raw = raw["total_space"]
    try:
        return MetricGraph.from_json(raw)
    except (KeyError, ValueError, TypeError) as exc:
        raise InstanceError([f"{path}: {exc}"]) from None


def cmd_build(args) -> int:
    from . import constructions as C
    from .metric import path_graph, random_tree
    if args.kind not in KINDS:
        raise UsageError(f"unknown kind {args.kind!r}; choose from {', '.join(KINDS)}")
    if not args.out:
        raise UsageError("build needs --out")
    if args.kind == "complexity1":
        if args.graph:
            G = _graph_from(args.graph)
        elif args.tree:
            G = random_tree(args.tree, np.random.default_rng(args.seed))
        elif args.path:
            G = path_graph(args.path)
        else:
            raise UsageError("complexity1 needs --graph, --tree N or --path N")
        H = C.build_complexity_one(G)
    elif args.kind == "product":
        if not (args.a and args.b):
            raise UsageError("product needs --a and --b")
        H = C.build_product(io.load_instance(args.a), io.load_instance(args.b))
    elif args.kind == "relative":
        if not (args.base and args.peripherals):
            raise UsageError("relative needs --base and --peripherals")
        raw = io.read_json(io.resolve(args.base))
        X = _graph_from(args.base)
        known = raw.get("meta", {}).get("peripherals") or raw.get("peripherals") or []
        periph = []
        for name in args.peripherals.split(","):
            name = name.strip()
            if name.lower().startswith("p") and name[1:].isdigit() and 1 <= int(name[1:]) <= len(known):
                periph.append(known[int(name[1:]) - 1])
            else:
                raise UsageError(f"unknown peripheral {name!r}; the base lists p1..p{len(known)}")
        structs = None
        if args.structures:
            structs = [io.load_instance(p) for p in args.structures.split(",")]
            if len(structs) != len(periph):
                raise UsageError("--structures needs one instance per peripheral")
        try:
            H = C.build_relative(X, periph, structs)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    elif args.kind == "combine":
        if not args.bundle:
            raise UsageError("combine needs --bundle")
        T = io.load_bundle(args.bundle)
        H = C.combine_tree(T)
    else:
        try:
            T = C.flip_tree_example(args.vertices, args.sigma, args.fiber, args.boundary,
                                    args.shape, args.seed)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        H = C.combine_tree(T)
        bundle = args.bundle_out or str(Path(args.out).with_suffix("")) + ".bundle.json"
        io.write_json(io.bundle_to_json(T), bundle)
    io.save_instance(H, args.out)
    print(f"wrote {args.out} ({H.X.n} vertices, {H.m} domains)", file=sys.stderr)
    return 0


# ---------------------------------------------------------------- parser

def _common(p):
    p.add_argument("--out", help="report or instance file (default: stdout for reports)")
    p.add_argument("--csv-dir", help="directory for CSV side-files (default: next to --out)")
    p.add_argument("--figures", action="store_true", help="render PNGs next to the CSVs (needs matplotlib)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1, help="worker processes for multi-pair tasks")
    p.add_argument("--corpus-size", type=int, default=60, help="tuples used to measure theta_e")


def parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hhskit", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="check every axiom and measure constants")
    v.add_argument("instance")
    _common(v)
    r = sub.add_parser("run", help="run one task on an instance")
    r.add_argument("task", help=", ".join(TASKS))
    r.add_argument("instance")
    _common(r)
    r.add_argument("--s", type=int, default=1)
    r.add_argument("--s0", type=int, default=10)
    r.add_argument("--from", dest="source", type=int)
    r.add_argument("--to", dest="target", type=int)
    r.add_argument("--points")
    r.add_argument("--set")
    r.add_argument("--theta", type=int)
    r.add_argument("--kappa", type=int)
    r.add_argument("--r", type=int)
    r.add_argument("--radius", type=int, default=0)
    r.add_argument("--mode", choices=["brute", "constructive"], default="brute")
    r.add_argument("--pairs", type=int, default=0, help="path: audit this many random pairs")
    r.add_argument("--active", help="path: domain ids whose active subpaths are measured")
    b = sub.add_parser("build", help="write a validated instance")
    b.add_argument("kind", help=", ".join(KINDS))
    _common(b)
    b.add_argument("--graph")
    b.add_argument("--tree", type=int)
    b.add_argument("--path", type=int)
    b.add_argument("--a")
    b.add_argument("--b")
    b.add_argument("--base")
    b.add_argument("--peripherals")
    b.add_argument("--structures")
    b.add_argument("--bundle")
    b.add_argument("--bundle-out")
    b.add_argument("--vertices", type=int, default=2)
    b.add_argument("--sigma", type=int, default=40)
    b.add_argument("--fiber", type=int, default=12)
    b.add_argument("--boundary", type=int)
    b.add_argument("--shape", default="path", choices=["path", "star"])
    return ap


def main(argv=None) -> int:
    from .constructions import CombinationError
    ap = parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    handler = {"verify": cmd_verify, "run": cmd_run, "build": cmd_build}[args.command]
    try:
        return handler(args)
    except InstanceError as exc:
        for e in exc.errors:
            print(f"input error: {e}", file=sys.stderr)
        return 2
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CombinationError as exc:
        print(f"combination hypothesis {exc.hypothesis} failed: {exc.witness}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
