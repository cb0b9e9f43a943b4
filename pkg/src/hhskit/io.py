"""Instance, bundle and report files."""

from __future__ import annotations

import csv
import json
from importlib import resources
from pathlib import Path

import numpy as np

from .constructions import Hieromorphism, TreeOfHHS
from .metric import MetricGraph
from .model import HInstance, InstanceError, instance_to_json, validate_instance


def _default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def dumps(data) -> str:
    """Canonical JSON text: sorted keys, so equal data gives equal bytes."""
    return json.dumps(data, sort_keys=True, default=_default, indent=1) + "\n"


def write_json(data, path) -> None:
    Path(path).write_text(dumps(data))


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InstanceError([f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"]) from None
    except OSError as exc:
        raise InstanceError([f"{path}: {exc.strerror}"]) from None


def data_path(name: str) -> Path:
    """Path of a shipped example instance."""
    return Path(str(resources.files("hhskit") / "data" / name))


def resolve(path) -> Path:
    p = Path(path)
    if p.exists():
        return p
    shipped = data_path(p.name)
    return shipped if shipped.exists() else p


def load_instance(path) -> HInstance:
    raw = read_json(resolve(path))
    if isinstance(raw, dict) and "vertex_instances" in raw:
        raise InstanceError([f"{path}: this is a tree-of-structures bundle, not an instance"])
    return validate_instance(raw)


def save_instance(H: HInstance, path) -> None:
    write_json(instance_to_json(H), path)


# ---------------------------------------------------------------- bundles

def bundle_to_json(T: TreeOfHHS) -> dict:
    maps = []
    for (e, side), h in sorted(T.maps.items()):
        maps.append({
            "edge": e, "side": side, "f": h.f.tolist(),
            "f_dom": [[h.source.ids[u], h.target.ids[int(v)]] for u, v in enumerate(h.f_dom)],
            "f_star": {str(h.source.ids[u]): v.tolist() for u, v in sorted(h.f_star.items())},
        })
    return {
        "tree": {"n": T.n_vertices, "edges": [list(e) for e in T.edges]},
        "vertex_instances": {str(v): instance_to_json(H) for v, H in enumerate(T.vertex_instances)},
        "edge_instances": {str(e): instance_to_json(H) for e, H in enumerate(T.edge_instances)},
        "edge_maps": maps,
    }


def bundle_from_json(raw: dict) -> TreeOfHHS:
    errs = []
    for key in ("tree", "vertex_instances", "edge_instances", "edge_maps"):
        if key not in raw:
            errs.append(f"bundle is missing {key}")
    if errs:
        raise InstanceError(errs)
    tree = MetricGraph.from_json(raw["tree"])
    edges = [tuple(int(a) for a in e) for e in raw["tree"].get("edges", [])]
    if not tree.is_tree():
        raise InstanceError(["bundle tree is not a tree"])
    Vs = [validate_instance(raw["vertex_instances"][str(v)]) for v in range(tree.n)]
    Es = [validate_instance(raw["edge_instances"][str(e)]) for e in range(len(edges))]
    T = TreeOfHHS(tree.n, edges, Vs, Es)
    for item in raw["edge_maps"]:
        e, side = int(item["edge"]), item["side"]
        if side not in ("-", "+"):
            raise InstanceError([f"edge map side must be '-' or '+', got {side!r}"])
        src = Es[e]
        tgt = Vs[T.end(e, side)]
        pairs = dict((int(a), int(b)) for a, b in item["f_dom"])
        try:
            f_dom = [tgt.index(pairs[src.ids[u]]) for u in range(src.m)]
            f_star = {src.index(int(k)): v for k, v in item["f_star"].items()}
        except (KeyError, ValueError) as exc:
            raise InstanceError([f"edge {e}{side}: bad domain reference {exc}"]) from None
        T.maps[(e, side)] = Hieromorphism(src, tgt, item["f"], f_dom, f_star)
    missing = [f"{e}{s}" for e in range(len(edges)) for s in "-+" if (e, s) not in T.maps]
    if missing:
        raise InstanceError([f"missing edge maps: {', '.join(missing)}"])
    return T


def load_bundle(path) -> TreeOfHHS:
    return bundle_from_json(read_json(resolve(path)))


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
