"""Decode-kernel backend selection.

The compiled Cython kernel is used when available; otherwise the
pure-numpy loop from :mod:`gdbfm.decoder` serves as a drop-in fallback.
Both paths are bit-for-bit equivalent.  Set ``GDBFM_FORCE_PY=1`` in the
environment to force the fallback (used by the benchmark and tests).
"""
from __future__ import annotations

import os

import numpy as np

from . import decoder as _dec
from .graph import TannerGraph

try:
    from . import _kernel
except ImportError:          # pragma: no cover - build-dependent
    _kernel = None

_VARIANT_CODES = {"BF": 0, "GDBF": 1, "GDBF_WM": 1,
                  "PGDBF": 2, "PGDBF_WM": 2, "NGDBF": 3}


def compiled_available() -> bool:
    return _kernel is not None


def active_backend() -> str:
    if _kernel is None or os.environ.get("GDBFM_FORCE_PY"):
        return "python"
    return "compiled"


def run(graph: TannerGraph, y, config: _dec.GdbfConfig, gen=None,
        backend: str | None = None) -> _dec.DecodeOutcome:
    """Full decoding run on the selected backend."""
    backend = backend or active_backend()
    if backend == "python":
        return _dec.run_python(graph, y, config, gen)
    if _kernel is None:
        raise RuntimeError("compiled kernel not available")
    y = np.ascontiguousarray(y, dtype=np.float64)
    if len(y) != graph.N:
        raise ValueError(f"word length {len(y)} != N={graph.N}")
    x, success, iters, flips = _kernel.run(
        graph.chk_ptr, graph.chk_adj, graph.var_ptr, graph.var_adj,
        y, _VARIANT_CODES[config.variant], config.alpha, config.delta,
        config.p, config.rho_lookup(), config.L, config.ngdbf_sigma,
        config.max_iter, gen)
    return _dec.DecodeOutcome(x, success, iters, int(flips))
