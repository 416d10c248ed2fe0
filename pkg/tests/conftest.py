import sys

import numpy as np
import pytest

from lchp.demand import zipf_popularity
from lchp.topology import build_lattice, build_regular_tree


@pytest.fixture(scope="session")
def pop100():
    return zipf_popularity(100, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def lattice7():
    return build_lattice(7)


@pytest.fixture(scope="session")
def tree_d4():
    return build_regular_tree(2, 4)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("tests.test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(results, key=lambda k: (int(k.split()[0][1:]), k)):
        ok, detail = results[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}: {detail}")
