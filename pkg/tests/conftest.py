import itertools

import numpy as np
import pytest

from fwsfm.functions import table_oracle


def all_permutation_vertices(oracle):
    """Every greedy vertex, built straight from the definition."""
    n = oracle.n
    out = []
    for perm in itertools.permutations(range(n)):
        q = np.zeros(n)
        for k, i in enumerate(perm):
            q[i] = oracle.eval(perm[: k + 1]) - oracle.eval(perm[:k])
        out.append(q)
    return np.array(out)


@pytest.fixture
def pair_oracle():
    # f({1}) = f({2}) = 1, f({1,2}) = 0
    return table_oracle([0, 1, 1, 0], 2)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[key])
