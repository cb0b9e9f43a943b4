import json
import subprocess
import sys

import pytest

from hhskit import io
from hhskit.cli import main

SHIPPED = ["complexity1_tree.json", "tree20.json", "product_trees.json", "grid_tail.json"]


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_complexity_one(capsys):
    code, out, _ = run(["verify", "examples/complexity1_tree.json"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["passed"]
    assert rep["constants"]["complexity_n"] == 1


def test_verify_product_theta_u(capsys):
    code, out, _ = run(["verify", "product_trees.json"], capsys)
    rep = json.loads(out)
    assert code == 0
    tu = {int(k): v for k, v in rep["constants"]["theta_u"].items()}
    # 2κ until the factor diameters saturate it
    small = [k for k in tu if 2 * k < max(tu.values())]
    assert small and all(tu[k] == 2 * k for k in small)


def test_verify_broken_container(capsys):
    code, out, err = run(["verify", "broken_container.json"], capsys)
    rep = json.loads(out)
    assert code == 1
    w = rep["witnesses"][0]
    assert w["kind"] == "container"
    assert {"T", "U", "V", "W"} <= set(w)


def test_malformed_instance(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"total_space": {"n": 3, "edges": [[0, 5]]}}')
    code, _, err = run(["verify", str(bad)], capsys)
    assert code == 2 and "error" in err


def test_not_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(["verify", str(bad)], capsys)[0] == 2


def test_unknown_task(capsys):
    code, _, err = run(["run", "fly", "tree20.json"], capsys)
    assert code == 2 and "unknown task" in err


def test_bad_vertex(capsys):
    assert run(["run", "path", "tree20.json", "--from", "0", "--to", "999"], capsys)[0] == 2


def test_argparse_error(capsys):
    assert run(["verify"], capsys)[0] == 2


def test_df_fit_product(capsys):
    code, out, _ = run(["run", "df-fit", "product_trees.json", "--s", "3"], capsys)
    rep = json.loads(out)["result"]
    assert code == 0 and rep["frontier"]["1"] <= 4


def test_median_on_tree(capsys):
    from hhskit.metric import tree_median
    H = io.load_instance("tree20.json")
    code, out, _ = run(["run", "median", "tree20.json", "--points", "0,11,19"], capsys)
    rep = json.loads(out)["result"]
    assert code == 0 and rep["median"] == tree_median(H.X, 0, 11, 19)


def test_path_side_files(tmp_path, capsys):
    out = tmp_path / "p.json"
    code, _, _ = run(["run", "path", "product_trees.json", "--from", "0", "--to", "143",
                      "--out", str(out)], capsys)
    rep = json.loads(out.read_text())
    assert code == 0
    steps = rep["result"]["path"]
    assert steps[0] == 0 and steps[-1] == 143
    assert any(f.endswith(".csv") for f in rep["side_files"])
    for f in rep["side_files"]:
        assert (tmp_path / f).exists()


def test_every_task_runs(capsys):
    cases = [["realize", "product_trees.json", "--points", "7"],
             ["realize", "product_trees.json", "--points", "1,50,99", "--mode", "constructive"],
             ["df-cert", "complexity1_tree.json", "--from", "0", "--to", "40", "--s0", "10"],
             ["gate", "product_trees.json", "--set", "0,1,2,3", "--from", "100"],
             ["hull", "tree20.json", "--set", "0,19"],
             ["hull", "tree20.json", "--set", "0,11,19"],
             ["poset", "tree20.json", "--from", "0", "--to", "19"]]
    for argv in cases:
        code, out, err = run(["run", *argv], capsys)
        assert code == 0, (argv, err)
        assert json.loads(out)["task"] == argv[0]


def test_reports_byte_identical(tmp_path, capsys):
    (tmp_path / "1").mkdir()
    (tmp_path / "2").mkdir()
    a, b = tmp_path / "1" / "r.json", tmp_path / "2" / "r.json"
    for out in (a, b):
        assert main(["run", "path", "product_trees.json", "--pairs", "4", "--seed", "3",
                     "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()
    for out in (a, b):
        assert main(["verify", "product_trees.json", "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_pairs_parallel_matches_serial(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["run", "path", "tree20.json", "--pairs", "6", "--out", str(a)]) == 0
    assert main(["run", "path", "tree20.json", "--pairs", "6", "--jobs", "2", "--out", str(b)]) == 0
    ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
    assert ra["result"] == rb["result"]


@pytest.mark.parametrize("name", SHIPPED)
def test_roundtrip_shipped(name, tmp_path, capsys):
    H = io.load_instance(name)
    path = tmp_path / name
    io.save_instance(H, path)
    assert io.load_instance(path).X.n == H.X.n
    assert run(["verify", str(path)], capsys)[0] == 0


def test_build_product_then_verify(tmp_path, capsys):
    out = tmp_path / "p.json"
    assert run(["build", "product", "--a", "tree20.json", "--b", "tree20.json",
                "--out", str(out)], capsys)[0] == 0
    assert io.load_instance(out).X.n == 400
    assert run(["verify", str(out)], capsys)[0] == 0


def test_build_complexity_one_tree(tmp_path, capsys):
    out = tmp_path / "t.json"
    assert run(["build", "complexity1", "--tree", "50", "--out", str(out)], capsys)[0] == 0
    assert run(["verify", str(out)], capsys)[0] == 0


def test_build_relative(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, err = run(["build", "relative", "--base", "grid_tail.json", "--peripherals", "p1,p2",
                        "--out", str(out)], capsys)
    assert code == 0, err
    assert run(["verify", str(out)], capsys)[0] == 0


def test_build_relative_unknown_peripheral(tmp_path, capsys):
    code, _, err = run(["build", "relative", "--base", "grid_tail.json", "--peripherals", "p9",
                        "--out", str(tmp_path / "r.json")], capsys)
    assert code == 2 and "p9" in err


def test_build_flip_and_combine(tmp_path, capsys):
    out = tmp_path / "flip.json"
    code, _, err = run(["build", "flip-example", "--vertices", "2", "--sigma", "20", "--fiber", "6",
                        "--out", str(out)], capsys)
    assert code == 0, err
    bundle = tmp_path / "flip.bundle.json"
    assert bundle.exists()
    again = tmp_path / "again.json"
    assert run(["build", "combine", "--bundle", str(bundle), "--out", str(again)], capsys)[0] == 0
    assert again.read_bytes() == out.read_bytes()


def test_combine_failure_exit_code(tmp_path, capsys):
    raw = io.read_json(io.resolve("flip2.bundle.json"))
    m = raw["edge_maps"][0]
    m["f_dom"][1][1] = m["f_dom"][0][1]
    bad = tmp_path / "bad.bundle.json"
    io.write_json(raw, bad)
    code, _, err = run(["build", "combine", "--bundle", str(bad), "--out", str(tmp_path / "x.json")], capsys)
    assert code == 1 and "hieromorphism" in err


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "hhskit.cli", "verify", "tree20.json"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["passed"]
