"""Tanner graph construction, quasi-cyclic expansion and code primitives.

A code is represented by its bipartite (Tanner) graph: N variable nodes
(coded bits) and M check nodes (parity equations).  Words are bipolar,
i.e. vectors over {-1, +1}; a check is satisfied when the product of its
incident bits equals +1.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class GraphError(ValueError):
    """Raised for structurally invalid graphs or malformed code files."""


@dataclass(frozen=True)
class BaseMatrix:
    """Protograph of a quasi-cyclic code.

    ``entries[r][c]`` is -1 for an all-zero z-by-z block, or a shift
    b in [0, z-1] standing for the identity matrix circularly
    right-shifted by b positions.
    """

    entries: np.ndarray
    z: int

    def __post_init__(self):
        ent = np.asarray(self.entries, dtype=np.int64)
        object.__setattr__(self, "entries", ent)
        if ent.ndim != 2 or ent.shape[0] < 1 or ent.shape[1] < 1:
            raise GraphError("base matrix must be a non-empty 2-D grid")
        if self.z < 1:
            raise GraphError(f"expansion factor must be positive, got {self.z}")
        bad = (ent < -1) | (ent >= self.z)
        if bad.any():
            r, c = np.argwhere(bad)[0]
            raise GraphError(
                f"base entry {ent[r, c]} at ({r}, {c}) outside -1..{self.z - 1}"
            )

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def to_text(self) -> str:
        lines = [f"{self.rows} {self.cols} {self.z}"]
        for row in self.entries:
            lines.append(" ".join(str(int(v)) for v in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "BaseMatrix":
        tokens = text.split()
        if len(tokens) < 3:
            raise GraphError("base-matrix file too short")
        try:
            rows, cols, z = (int(t) for t in tokens[:3])
            values = [int(t) for t in tokens[3:]]
        except ValueError as exc:
            raise GraphError(f"malformed base-matrix file: {exc}") from None
        if len(values) != rows * cols:
            raise GraphError(
                f"expected {rows * cols} entries, found {len(values)}"
            )
        return cls(np.array(values, dtype=np.int64).reshape(rows, cols), z)


class TannerGraph:
    """Immutable sparse bipartite adjacency.

    Adjacency is stored CSR-style on both sides: ``var_adj[var_ptr[n] :
    var_ptr[n + 1]]`` lists the checks of variable n in ascending order,
    and symmetrically for checks.  Instances are safe to share across
    concurrent decoders.
    """

    def __init__(self, n_vars: int, n_checks: int, edges):
        edges = np.asarray(edges, dtype=np.int64)
        if edges.size == 0:
            edges = edges.reshape(0, 2)
        if edges.ndim != 2 or edges.shape[1] != 2:
            raise GraphError("edges must be (check, variable) pairs")
        if n_vars < 1 or n_checks < 1:
            raise GraphError("graph needs at least one node on each side")
        chk, var = edges[:, 0], edges[:, 1]
        if edges.size and (
            chk.min() < 0 or chk.max() >= n_checks or var.min() < 0 or var.max() >= n_vars
        ):
            raise GraphError("edge endpoint out of range")
        key = chk * n_vars + var
        if len(np.unique(key)) != len(key):
            raise GraphError("duplicate edges are not allowed")

        self.N = int(n_vars)
        self.M = int(n_checks)
        order = np.lexsort((var, chk))
        self.chk_adj = var[order].astype(np.int32)
        self.chk_ptr = np.zeros(self.M + 1, dtype=np.int32)
        np.cumsum(np.bincount(chk, minlength=self.M), out=self.chk_ptr[1:])
        order = np.lexsort((chk, var))
        self.var_adj = chk[order].astype(np.int32)
        self.var_ptr = np.zeros(self.N + 1, dtype=np.int32)
        np.cumsum(np.bincount(var, minlength=self.N), out=self.var_ptr[1:])

        self.var_deg = np.diff(self.var_ptr)
        self.chk_deg = np.diff(self.chk_ptr)
        if (self.var_deg == 0).any():
            idx = np.flatnonzero(self.var_deg == 0)
            raise GraphError(f"degree-0 variable nodes: {idx[:8].tolist()}")
        if (self.chk_deg == 0).any():
            idx = np.flatnonzero(self.chk_deg == 0)
            raise GraphError(f"degree-0 check nodes: {idx[:8].tolist()}")
        for a in (self.chk_adj, self.chk_ptr, self.var_adj, self.var_ptr,
                  self.var_deg, self.chk_deg):
            a.setflags(write=False)

    @property
    def n_edges(self) -> int:
        return len(self.var_adj)

    def var_neighbors(self, n: int) -> np.ndarray:
        return self.var_adj[self.var_ptr[n]:self.var_ptr[n + 1]]

    def chk_neighbors(self, m: int) -> np.ndarray:
        return self.chk_adj[self.chk_ptr[m]:self.chk_ptr[m + 1]]

    @classmethod
    def from_check_lists(cls, n_vars: int, check_lists) -> "TannerGraph":
        edges = [(m, n) for m, nbrs in enumerate(check_lists) for n in nbrs]
        return cls(n_vars, len(check_lists), edges)

    def __repr__(self):
        return f"TannerGraph(N={self.N}, M={self.M}, edges={self.n_edges})"


def expand_base_matrix(base: BaseMatrix) -> TannerGraph:
    """Expand a quasi-cyclic base matrix into its Tanner graph.

    A shift b >= 0 at base position (r, c) contributes the z edges
    (r*z + i, c*z + (i + b) mod z); -1 entries contribute nothing.
    """
    z = base.z
    rr, cc = np.nonzero(base.entries >= 0)
    shifts = base.entries[rr, cc]
    i = np.arange(z)
    chk = (rr[:, None] * z + i[None, :]).ravel()
    var = (cc[:, None] * z + (i[None, :] + shifts[:, None]) % z).ravel()
    return TannerGraph(base.cols * z, base.rows * z,
                       np.stack([chk, var], axis=1))


def bipolar(values) -> np.ndarray:
    """Validate and return a {-1,+1} word as int8."""
    x = np.asarray(values)
    if not np.isin(x, (-1, 1)).all():
        raise ValueError("bipolar word entries must be -1 or +1")
    return x.astype(np.int8)


def syndrome(graph: TannerGraph, x) -> np.ndarray:
    """Per-check products c_m over the incident bits of x; +1 = satisfied."""
    x = np.asarray(x)
    if len(x) != graph.N:
        raise ValueError(f"word length {len(x)} != N={graph.N}")
    vals = x.astype(np.int8)[graph.chk_adj]
    return np.multiply.reduceat(vals, graph.chk_ptr[:-1]).astype(np.int8)


def is_codeword(graph: TannerGraph, x) -> bool:
    """True iff every check is satisfied."""
    return bool((syndrome(graph, x) == 1).all())


def correlation(x, y) -> float:
    """Inner product of a bipolar word with a real received word."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    return float(np.dot(x, y))


# --- alist interchange format ---------------------------------------------

def save_alist(graph: TannerGraph, path) -> None:
    """Write the standard alist text format (1-indexed, unpadded)."""
    lines = [
        f"{graph.N} {graph.M}",
        f"{int(graph.var_deg.max())} {int(graph.chk_deg.max())}",
        " ".join(str(int(d)) for d in graph.var_deg),
        " ".join(str(int(d)) for d in graph.chk_deg),
    ]
    for n in range(graph.N):
        lines.append(" ".join(str(int(m) + 1) for m in graph.var_neighbors(n)))
    for m in range(graph.M):
        lines.append(" ".join(str(int(n) + 1) for n in graph.chk_neighbors(m)))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_alist(path) -> TannerGraph:
    """Read an alist file; zero-padded adjacency entries are ignored."""
    with open(path) as fh:
        rows = [line.split() for line in fh if line.strip()]
    try:
        n_vars, n_checks = int(rows[0][0]), int(rows[0][1])
        var_degs = [int(t) for t in rows[2]]
        chk_degs = [int(t) for t in rows[3]]
        if len(var_degs) != n_vars or len(chk_degs) != n_checks:
            raise GraphError("alist degree lists inconsistent with N/M")
        edges = []
        for n, row in enumerate(rows[4:4 + n_vars]):
            nbrs = [int(t) - 1 for t in row if int(t) != 0]
            if len(nbrs) != var_degs[n]:
                raise GraphError(f"variable {n} degree mismatch")
            edges.extend((m, n) for m in nbrs)
    except (IndexError, ValueError) as exc:
        raise GraphError(f"malformed alist file: {exc}") from None
    graph = TannerGraph(n_vars, n_checks, edges)
    if not np.array_equal(graph.chk_deg, np.asarray(chk_degs)):
        raise GraphError("alist check degrees disagree with adjacency")
    return graph
