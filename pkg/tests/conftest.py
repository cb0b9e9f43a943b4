import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hhskit import io  # noqa: E402
from hhskit.constructions import build_complexity_one, build_product  # noqa: E402
from hhskit.metric import path_graph, random_tree  # noqa: E402


@pytest.fixture(scope="session")
def tree_inst():
    return io.load_instance("complexity1_tree.json")


@pytest.fixture(scope="session")
def tree20():
    return io.load_instance("tree20.json")


@pytest.fixture(scope="session")
def prod():
    return io.load_instance("product_trees.json")


@pytest.fixture(scope="session")
def grid_prod():
    return build_product(build_complexity_one(path_graph(8)), build_complexity_one(path_graph(8)))


@pytest.fixture(scope="session")
def grid_tail_inst():
    return io.load_instance("grid_tail.json")


@pytest.fixture(scope="session")
def broken():
    return io.load_instance("broken_container.json")


def small_tree(n, seed):
    return random_tree(n, np.random.default_rng(seed))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance")
    for num in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[num])
