"""Built-in codes.

The two quasi-cyclic (3,6)- and (4,8)-regular rate-1/2 codes of length
1296 are embedded as literal base-matrix tables (z = 54).  A transcription
checksum plus the regularity invariants guard the tables.

Also provided: a small degree-3 fixture graph containing a (5,5)
trapping set, together with the received word that drives the plain GDBF
decoder into a period-2 cycle while momentum escapes it.
"""
from __future__ import annotations

import numpy as np

from .graph import BaseMatrix, TannerGraph, expand_base_matrix

_REG3X6_TEXT = """\
49 -1 -1 -1 -1 43 -1 -1 -1 -1 50 -1 -1 -1 -1  2 -1 27 -1 -1 -1 -1 -1 49
-1 -1 -1 10 41 -1 -1 -1 -1 52 -1 -1 32 -1 -1 -1 -1 -1 50 -1 50 -1 -1 -1
-1 -1 20 -1 -1 -1 -1 20 -1 -1 -1 51 -1 10 -1 -1 47 -1 -1 -1 -1 -1 33 -1
-1 24 -1 -1 -1 -1 22 -1 53 -1 -1 -1 -1 -1 31 -1 -1 -1 -1 18 -1 47 -1 -1
10 -1 -1 -1 15 -1 -1 -1 -1 -1  2 -1 -1 -1 -1 50 -1 13 -1 -1 -1 -1 -1 53
-1 -1 44 -1 -1  6 -1 -1 -1 -1 -1 29 -1 40 -1 -1 16 -1 -1 -1 13 -1 -1 -1
-1  2 -1 -1 -1 -1 -1 13 41 -1 -1 -1 -1 -1 42 -1 -1 -1 -1 48 -1 49 -1 -1
-1 -1 -1 36 -1 -1 24 -1 -1 50 -1 -1 12 -1 -1 -1 -1 -1 10 -1 -1 -1 48 -1
-1 -1 47 -1 50 -1 -1 -1 -1 -1  0 -1 -1 -1 -1  9 -1  7 -1 -1 -1 -1 -1 28
-1 24 -1 -1 -1 -1 -1 51 -1 38 -1 -1 -1 -1  6 -1 -1 -1 -1 23 -1 16 -1 -1
 6 -1 -1 -1 -1 -1  5 -1 -1 -1 -1 13 -1  3 -1 -1 29 -1 -1 -1 16 -1 -1 -1
-1 -1 -1 35 -1 16 -1 -1 37 -1 -1 -1  4 -1 -1 -1 -1 -1 24 -1 -1 -1 29 -1
"""

_REG4X8_TEXT = """\
11 -1 -1 -1 27 -1 -1 -1 33 16 -1 -1 -1 44 -1 -1 44 -1  8 -1 -1 -1 -1  0
-1 25 -1 -1 -1 31 29 -1 -1 -1 29 -1 -1 -1 36 -1 -1 34 -1 15 -1 -1 17 -1
-1 -1 44  4 -1 -1 -1 11 -1 -1 -1  2 50 -1 -1 52 -1 -1 -1 -1 30 33 -1 -1
27 -1 -1 -1 34 -1 20 -1 -1 20 -1 -1 -1 13 -1 -1 27 -1  4 -1 -1 -1 -1 27
-1 42 -1 22 -1 -1 -1 11 -1 -1 -1 44 -1 -1  4 14 -1 -1 -1 -1 45 17 -1 -1
-1 -1 24 -1 -1 10 -1 -1 10 -1 18 -1  2 -1 -1 -1 -1 19 -1 38 -1 -1 31 -1
-1 -1 40 -1 -1 35 -1 -1 31 19 -1 -1  3 -1 -1 42 -1 -1 -1 42 -1 -1 39 -1
-1 29 -1  0 -1 -1 -1 29 -1 -1  5 -1 -1 -1 47 -1 -1 28 -1 -1 28 41 -1 -1
 9 -1 -1 -1  7 -1 20 -1 -1 -1 -1  1 -1 19 -1 -1  5 -1 25 -1 -1 -1 -1 41
-1 -1 53 -1 -1  3 -1 -1 26 -1  3 -1 -1 -1 30 -1 -1  5 -1 35 -1 -1 44 -1
-1  4 -1 -1  4 -1 -1  5 -1 -1 -1 13 42 -1 -1 50 -1 -1 -1 -1 36 38 -1 -1
39 -1 -1 17 -1 -1 36 -1 -1 34 -1 -1 -1 46 -1 -1 12 -1  8 -1 -1 -1 -1 15
"""

_EXPANSION = 54

# Sum of the non-negative shift values in each table; guards transcription
# together with the per-row/per-column regularity checks.
_SHIFT_SUMS = {"reg3x6": 2013, "reg4x8": 2331}

BUILTIN_CODES = ("reg3x6", "reg4x8")


def _parse(text: str) -> np.ndarray:
    return np.array([[int(t) for t in line.split()]
                     for line in text.strip().splitlines()], dtype=np.int64)


def builtin_base_matrix(name: str) -> BaseMatrix:
    """Base matrix of a built-in code (``reg3x6`` or ``reg4x8``)."""
    if name == "reg3x6":
        entries, dv, dc = _parse(_REG3X6_TEXT), 3, 6
    elif name == "reg4x8":
        entries, dv, dc = _parse(_REG4X8_TEXT), 4, 8
    else:
        raise ValueError(f"unknown built-in code {name!r}; "
                         f"choose from {BUILTIN_CODES}")
    nonneg = entries >= 0
    assert (nonneg.sum(axis=1) == dc).all() and (nonneg.sum(axis=0) == dv).all()
    assert int(entries[nonneg].sum()) == _SHIFT_SUMS[name]
    return BaseMatrix(entries, _EXPANSION)


def builtin_code(name: str) -> TannerGraph:
    """Expanded Tanner graph of a built-in code (N=1296, M=648)."""
    return expand_base_matrix(builtin_base_matrix(name))


def code_rate(graph: TannerGraph) -> float:
    """Design rate 1 - M/N (assumes full-rank checks)."""
    return 1.0 - graph.M / graph.N


def trapping_set_instance():
    """Degree-3 fixture graph with a (5,5) trapping set and its error pattern.

    Returns ``(graph, y)`` where y is a hard-decision received word
    (all-+1 transmitted, bits 2, 4, 5 in error, 1-indexed: the pattern
    confines the decoder to the 5-variable subgraph).  Under GDBF with
    alpha=1 the state oscillates with period 2; a one-iteration momentum
    of value 3 yields the flip sequence {1,2,3,4}, {5}, {1,3} and
    convergence.
    """
    check_lists = [
        [0, 1],  # shared by x1, x2
        [1, 2],
        [1, 4],
        [0, 3],
        [2, 3],
        [3, 4],
        [0],     # degree-1 inside the fixture
        [2],
        [4],
    ]
    graph = TannerGraph.from_check_lists(5, check_lists)
    y = np.array([1.0, -1.0, 1.0, -1.0, -1.0])
    return graph, y
