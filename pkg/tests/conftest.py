import itertools

import numpy as np
import pytest

from gdbfm.graph import TannerGraph


@pytest.fixture(scope="session")
def reg3x6():
    from gdbfm.codes import builtin_code
    return builtin_code("reg3x6")


@pytest.fixture(scope="session")
def reg4x8():
    from gdbfm.codes import builtin_code
    return builtin_code("reg4x8")


@pytest.fixture(scope="session")
def toy_graph():
    """Small code with cycles; 10 variables, 5 checks."""
    check_lists = [
        [0, 1, 2, 3],
        [2, 3, 4, 5],
        [4, 5, 6, 7],
        [6, 7, 8, 9],
        [0, 1, 8, 9],
    ]
    return TannerGraph.from_check_lists(10, check_lists)


@pytest.fixture(scope="session")
def tree_graph():
    """Cycle-free code: every pair of checks shares at most one variable
    and the bipartite graph is a tree."""
    check_lists = [
        [0, 1, 2],
        [2, 3, 4],
        [4, 5, 6],
        [1, 7],
    ]
    return TannerGraph.from_check_lists(8, check_lists)


def enumerate_codewords(graph: TannerGraph) -> np.ndarray:
    """All bipolar codewords of a small code by exhaustive search."""
    from gdbfm.graph import is_codeword
    words = []
    for bits in itertools.product((1, -1), repeat=graph.N):
        x = np.array(bits, dtype=np.int8)
        if is_codeword(graph, x):
            words.append(x)
    return np.array(words)
