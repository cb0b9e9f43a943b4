"""Regenerate the shipped example instances in src/hhskit/data."""

from pathlib import Path

import numpy as np

from hhskit import io
from hhskit.constructions import (build_complexity_one, build_product, flip_tree_example,
                                  grid_tail_instance)
from hhskit.metric import random_tree
from hhskit.model import instance_to_json, validate_instance

OUT = Path(__file__).resolve().parents[1] / "src" / "hhskit" / "data"


def drop_domains(raw: dict, keep: set[int]) -> dict:
    raw = dict(raw)
    raw["domains"] = [d for d in raw["domains"] if d["id"] in keep]
    raw["nesting"] = [p for p in raw["nesting"] if set(p) <= keep]
    raw["orthogonality"] = [p for p in raw["orthogonality"] if set(p) <= keep]
    raw["containers"] = [c for c in raw["containers"] if set(c) <= keep]
    raw["pi"] = {k: v for k, v in raw["pi"].items() if int(k) in keep}
    raw["rho_set"] = [r for r in raw["rho_set"] if r["from"] in keep and r["to"] in keep]
    raw["rho_map"] = [r for r in raw["rho_map"] if r["from"] in keep and r["to"] in keep]
    return raw


def broken_container() -> dict:
    """Factor A orthogonal to two transverse copies B, C of the other factor.

    No proper subdomain of the top contains both B and C, so the container
    axiom fails for (top, A).
    """
    small = build_product(build_complexity_one(random_tree(5, np.random.default_rng(3))),
                          build_complexity_one(random_tree(5, np.random.default_rng(4))))
    raw = instance_to_json(small)
    names = {d["name"]: d["id"] for d in raw["domains"]}
    top, A, B = names["S"], names["0:S"], names["1:S"]
    raw = drop_domains(raw, {top, A, B})
    C = max(names.values()) + 1
    dB = next(d for d in raw["domains"] if d["id"] == B)
    raw["domains"].append({**dB, "id": C, "name": "1:S'"})
    raw["nesting"].append([C, top])
    raw["orthogonality"].append([A, C])
    raw["pi"][str(C)] = raw["pi"][str(B)]
    raw["rho_set"] += [{**r, "from": C} for r in raw["rho_set"] if r["from"] == B and r["to"] == top]
    raw["rho_set"] += [{"from": B, "to": C, "set": [0]}, {"from": C, "to": B, "set": [0]}]
    raw["rho_map"] += [{**r, "to": C} for r in raw["rho_map"] if r["from"] == top and r["to"] == B]
    raw["containers"] = []
    raw["meta"] = {"kind": "broken_container"}
    validate_instance(raw)
    return raw


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    io.save_instance(build_complexity_one(random_tree(60, np.random.default_rng(0))),
                     OUT / "complexity1_tree.json")
    t20 = build_complexity_one(random_tree(20, np.random.default_rng(20)))
    io.save_instance(t20, OUT / "tree20.json")
    a = build_complexity_one(random_tree(12, np.random.default_rng(1)))
    b = build_complexity_one(random_tree(12, np.random.default_rng(2)))
    io.save_instance(build_product(a, b), OUT / "product_trees.json")
    io.write_json(broken_container(), OUT / "broken_container.json")
    io.save_instance(grid_tail_instance(), OUT / "grid_tail.json")
    io.write_json(io.bundle_to_json(flip_tree_example(2)), OUT / "flip2.bundle.json")


if __name__ == "__main__":
    main()
