"""Message-passing baseline decoders: BP, Min-Sum, 4-bit quantized Min-Sum.

All three run a flooded schedule on log-likelihood ratios (positive
favoring +1): every check node updates from the previous iteration's
variable messages, then every variable node updates.  Implementation is
fully vectorized on zero-padded (node, max-degree) message arrays.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .channel import ChannelSpec
from .decoder import DecodeOutcome
from .graph import TannerGraph

# Magnitude clamp applied to channel and exchanged LLRs in BP; keeps the
# tanh rule away from saturation.
LLR_CLAMP = 25.0

MP_VARIANTS = ("BP", "MS", "MS_Q4")


@dataclass(frozen=True)
class MpConfig:
    variant: str = "BP"
    iterations: int = 50
    quantizer_step: float | None = None   # MS_Q4 only; None = auto pre-scan

    def __post_init__(self):
        if self.variant not in MP_VARIANTS:
            raise ValueError(f"unknown MP variant {self.variant!r}")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.quantizer_step is not None and not self.quantizer_step > 0:
            raise ValueError("quantizer step must be positive")


def channel_llr(y, spec: ChannelSpec) -> np.ndarray:
    """Channel LLRs for a received word (positive favors +1)."""
    y = np.asarray(y, dtype=np.float64)
    if spec.kind == "bsc":
        eps = spec.bsc_epsilon
        return y * np.log((1.0 - eps) / eps)
    return 2.0 * y / spec.awgn_sigma**2


@lru_cache(maxsize=16)
def _layout(graph: TannerGraph):
    """Padded edge layout: (M, dc_max) and (N, dv_max) index maps."""
    n_edges = graph.n_edges
    dc_max = int(graph.chk_deg.max())
    dv_max = int(graph.var_deg.max())
    # edges numbered check-major, matching chk_adj order
    edge_var = graph.chk_adj.astype(np.int64)
    chk_edge = np.zeros((graph.M, dc_max), dtype=np.int64)
    chk_mask = np.zeros((graph.M, dc_max), dtype=bool)
    for m in range(graph.M):
        lo, hi = graph.chk_ptr[m], graph.chk_ptr[m + 1]
        chk_edge[m, :hi - lo] = np.arange(lo, hi)
        chk_mask[m, :hi - lo] = True
    var_edge = np.zeros((graph.N, dv_max), dtype=np.int64)
    var_mask = np.zeros((graph.N, dv_max), dtype=bool)
    by_var = [[] for _ in range(graph.N)]
    for e in range(n_edges):
        by_var[edge_var[e]].append(e)
    for n, es in enumerate(by_var):
        var_edge[n, :len(es)] = es
        var_mask[n, :len(es)] = True
    return edge_var, chk_edge, chk_mask, var_edge, var_mask


def quantizer_step_for(llr, config: MpConfig) -> float:
    """Effective 4-bit quantizer step: explicit, or max|llr|/4 from pre-scan."""
    if config.quantizer_step is not None:
        return config.quantizer_step
    peak = float(np.max(np.abs(llr))) if len(llr) else 0.0
    return peak / 4.0 if peak > 0 else 1.0


def _quantize4(msg: np.ndarray, step: float) -> np.ndarray:
    """Uniform symmetric saturating 4-bit grid: levels -7..7 times step."""
    return np.clip(np.rint(msg / step), -7, 7) * step


def _check_update_bp(v2c_pad: np.ndarray, mask: np.ndarray) -> np.ndarray:
    t = np.tanh(np.clip(v2c_pad, -LLR_CLAMP, LLR_CLAMP) / 2.0)
    t = np.where(mask, t, 1.0)
    # leave-one-out products via prefix/suffix scans along the degree axis
    fwd = np.cumprod(t, axis=1)
    bwd = np.cumprod(t[:, ::-1], axis=1)[:, ::-1]
    prefix = np.ones_like(t)
    prefix[:, 1:] = fwd[:, :-1]
    suffix = np.ones_like(t)
    suffix[:, :-1] = bwd[:, 1:]
    loo = prefix * suffix
    loo = np.clip(loo, -0.9999999999999998, 0.9999999999999998)
    return np.clip(2.0 * np.arctanh(loo), -LLR_CLAMP, LLR_CLAMP)


def _check_update_ms(v2c_pad: np.ndarray, mask: np.ndarray) -> np.ndarray:
    sign = np.where(v2c_pad >= 0, 1.0, -1.0)
    sign = np.where(mask, sign, 1.0)
    mag = np.where(mask, np.abs(v2c_pad), np.inf)
    total_sign = sign.prod(axis=1, keepdims=True)
    argmin = mag.argmin(axis=1)
    min1 = np.take_along_axis(mag, argmin[:, None], axis=1)
    mag2 = mag.copy()
    np.put_along_axis(mag2, argmin[:, None], np.inf, axis=1)
    min2 = mag2.min(axis=1, keepdims=True)
    loo_min = np.where(np.arange(mag.shape[1])[None, :] == argmin[:, None],
                       min2, min1)
    return total_sign * sign * loo_min


def decode_mp(graph: TannerGraph, llr, config: MpConfig,
              check_hook=None) -> DecodeOutcome:
    """Flooded-schedule MP decode from channel LLRs.

    ``check_hook(iteration, v2c_pad, c2v_pad, mask)`` is called after
    each check update (test instrumentation).
    """
    llr = np.asarray(llr, dtype=np.float64)
    if len(llr) != graph.N:
        raise ValueError(f"LLR length {len(llr)} != N={graph.N}")
    llr = np.clip(llr, -LLR_CLAMP, LLR_CLAMP)
    edge_var, chk_edge, chk_mask, var_edge, var_mask = _layout(graph)
    step = quantizer_step_for(llr, config) if config.variant == "MS_Q4" else None

    posterior = llr.copy()
    v2c = llr[edge_var]
    if step is not None:
        v2c = _quantize4(v2c, step)
    iterations = 0
    for it in range(config.iterations):
        x = np.where(posterior >= 0.0, 1, -1).astype(np.int8)
        prod = np.multiply.reduceat(x[graph.chk_adj], graph.chk_ptr[:-1])
        if (prod == 1).all():
            return DecodeOutcome(x, True, max(1, iterations), 0)

        v2c_pad = v2c[chk_edge]
        if config.variant == "BP":
            c2v_pad = _check_update_bp(v2c_pad, chk_mask)
        else:
            c2v_pad = _check_update_ms(v2c_pad, chk_mask)
            if step is not None:
                c2v_pad = _quantize4(c2v_pad, step)
        if check_hook is not None:
            check_hook(it, np.where(chk_mask, v2c_pad, 0.0),
                       np.where(chk_mask, c2v_pad, 0.0), chk_mask)
        c2v = np.zeros(graph.n_edges)
        c2v[chk_edge[chk_mask]] = c2v_pad[chk_mask]

        incoming = np.where(var_mask, c2v[var_edge], 0.0)
        posterior = llr + incoming.sum(axis=1)
        v2c_new = posterior[edge_var] - c2v
        if config.variant == "BP":
            v2c_new = np.clip(v2c_new, -LLR_CLAMP, LLR_CLAMP)
        if step is not None:
            v2c_new = _quantize4(v2c_new, step)
        v2c = v2c_new
        iterations += 1

    x = np.where(posterior >= 0.0, 1, -1).astype(np.int8)
    prod = np.multiply.reduceat(x[graph.chk_adj], graph.chk_ptr[:-1])
    success = bool((prod == 1).all())
    return DecodeOutcome(x, success, max(1, iterations), 0)


def posterior_llrs(graph: TannerGraph, llr, config: MpConfig) -> np.ndarray:
    """Posterior LLRs after the configured number of full iterations.

    Runs without early exit; used by the exact-marginalization oracle
    tests on cycle-free codes.
    """
    llr = np.asarray(llr, dtype=np.float64)
    llr = np.clip(llr, -LLR_CLAMP, LLR_CLAMP)
    edge_var, chk_edge, chk_mask, var_edge, var_mask = _layout(graph)
    v2c = llr[edge_var]
    posterior = llr.copy()
    for _ in range(config.iterations):
        v2c_pad = v2c[chk_edge]
        if config.variant == "BP":
            c2v_pad = _check_update_bp(v2c_pad, chk_mask)
        else:
            c2v_pad = _check_update_ms(v2c_pad, chk_mask)
        c2v = np.zeros(graph.n_edges)
        c2v[chk_edge[chk_mask]] = c2v_pad[chk_mask]
        incoming = np.where(var_mask, c2v[var_edge], 0.0)
        posterior = llr + incoming.sum(axis=1)
        v2c = np.clip(posterior[edge_var] - c2v, -LLR_CLAMP, LLR_CLAMP)
    return posterior
