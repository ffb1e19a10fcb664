import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from graphpse.graph import build_graph

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def graphs(draw, min_nodes=1, max_nodes=9):
    n = draw(st.integers(min_nodes, max_nodes))
    pairs = list(itertools.combinations(range(n), 2))
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return build_graph(n, [e for e, k in zip(pairs, keep) if k])


@st.composite
def graphs_with_perm(draw, min_nodes=1, max_nodes=9):
    g = draw(graphs(min_nodes, max_nodes))
    perm = draw(st.permutations(list(range(g.num_nodes))))
    return g, list(perm)


def permute_rows(x, perm):
    """Rows of ``x`` moved so that row ``v`` lands at ``perm[v]``."""
    out = np.empty_like(x)
    out[np.asarray(perm, dtype=int)] = x
    return out


# acceptance summary -------------------------------------------------------

_LINES = []


@pytest.fixture
def criterion():
    def record(number, passed, detail):
        line = f"ACCEPTANCE {number}: {'PASS' if passed else 'FAIL'} - {detail}"
        print(line)
        _LINES.append(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
