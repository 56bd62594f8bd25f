"""Monte Carlo WER/BER estimation and offline momentum optimization.

Frames transmit the all-(+1) codeword; each trial owns RNG streams
derived from (global seed, point, decoder, trial index), so results are
bitwise reproducible for any worker count: batches have a fixed size and
are reduced in trial-index order, and the early-stop decision is taken
only at batch boundaries.
"""
from __future__ import annotations

import configparser
import io
import itertools
import math
import os
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__ as _pkg_version
from .channel import ChannelSpec, derive_stream, parse_point, transmit
from .codes import BUILTIN_CODES, builtin_code, code_rate
from .decoder import GdbfConfig, decode
from .graph import TannerGraph, load_alist
from .mp import MpConfig, channel_llr, decode_mp, quantizer_step_for


class PlanError(ValueError):
    """Raised for invalid simulation plans."""


@dataclass(frozen=True)
class SimPlan:
    code: str                                  # builtin name or alist path
    points: tuple                              # ChannelSpec...
    decoders: tuple                            # (name, GdbfConfig|MpConfig)...
    max_frames: int = 10_000
    target_errors: int = 100
    seed: int = 0
    workers: int | None = None                 # None = available cores
    batch_size: int = 500

    def __post_init__(self):
        if self.max_frames < 1:
            raise PlanError("max_frames must be >= 1")
        if self.target_errors < 1:
            raise PlanError("target_errors must be >= 1")
        if self.batch_size < 1:
            raise PlanError("batch_size must be >= 1")
        if not self.points:
            raise PlanError("plan needs at least one channel point")
        if not self.decoders:
            raise PlanError("plan needs at least one decoder")
        names = [name for name, _ in self.decoders]
        if len(set(names)) != len(names):
            raise PlanError(f"duplicate decoder names: {names}")
        for name, cfg in self.decoders:
            for spec in self.points:
                _check_compat(name, cfg, spec)

    def load_graph(self) -> TannerGraph:
        if self.code in BUILTIN_CODES:
            return builtin_code(self.code)
        return load_alist(self.code)


def _check_compat(name: str, cfg, spec: ChannelSpec) -> None:
    if isinstance(cfg, GdbfConfig):
        if cfg.variant == "NGDBF" and spec.hard_output:
            raise PlanError(
                f"decoder {name!r}: NGDBF needs a soft-output channel, "
                f"got {spec.label()}")
    elif not isinstance(cfg, MpConfig):
        raise PlanError(f"decoder {name!r}: unsupported config {type(cfg)}")


@dataclass
class SimResult:
    point: str
    decoder: str
    frames: int
    word_errors: int
    detected_failures: int
    undetected_errors: int
    bit_errors: int
    n_bits: int
    iters_sum: int
    iters_success_sum: int
    successes: int
    wall_clock: float = 0.0
    metadata: dict = field(default_factory=dict)

    @property
    def wer(self) -> float:
        return self.word_errors / self.frames

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.frames * self.n_bits)

    @property
    def wer_ci(self) -> tuple[float, float]:
        return wilson_interval(self.word_errors, self.frames)

    @property
    def avg_iters_all(self) -> float:
        return self.iters_sum / self.frames

    @property
    def avg_iters_success(self) -> float | None:
        if not self.successes:
            return None
        return self.iters_success_sum / self.successes


def wilson_interval(k: int, n: int, z: float = 1.959963984540054):
    """95% Wilson score interval for a binomial proportion."""
    if n == 0:
        return (0.0, 1.0)
    phat = k / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    # analytically exact at the boundaries; avoid rounding residue there
    lo = 0.0 if k == 0 else max(0.0, center - half)
    hi = 1.0 if k == n else min(1.0, center + half)
    return (lo, hi)


# --- per-batch worker ------------------------------------------------------

_WORKER_GRAPH: TannerGraph | None = None


def _init_worker(graph: TannerGraph):
    global _WORKER_GRAPH
    _WORKER_GRAPH = graph


def _decode_one(graph, y, spec, cfg, dec_stream):
    if isinstance(cfg, MpConfig):
        return decode_mp(graph, channel_llr(y, spec), cfg)
    return decode(graph, y, cfg, dec_stream)


def _run_batch(args):
    """Simulate trials [start, start+count) for one (point, decoder) cell."""
    seed, spec, dec_name, cfg, start, count, graph = args
    if graph is None:
        graph = _WORKER_GRAPH
    label = spec.label()
    x_tx = np.ones(graph.N)
    agg = np.zeros(7, dtype=np.int64)   # frames, werr, det, undet, biterr,
    for i in range(start, start + count):          # iters, iters_success
        chan = derive_stream(seed, "sim", label, dec_name, i, "chan")
        dec = derive_stream(seed, "sim", label, dec_name, i, "dec")
        y = transmit(x_tx, spec, chan)
        out = _decode_one(graph, y, spec, cfg, dec)
        wrong_bits = int((out.x_hat != 1).sum())
        agg[0] += 1
        if wrong_bits:
            agg[1] += 1
            if out.success:
                agg[3] += 1
            else:
                agg[2] += 1
            agg[4] += wrong_bits
        agg[5] += out.iterations_used
        if out.success and not wrong_bits:
            agg[6] += out.iterations_used
    return agg


def _batches(total: int, size: int):
    start = 0
    while start < total:
        yield start, min(size, total - start)
        start += size


def run_sweep(plan: SimPlan, graph: TannerGraph | None = None,
              progress=None) -> list[SimResult]:
    """Run the full (point x decoder) sweep of a plan.

    Identical plans produce identical results for any worker count:
    batches are a deterministic partition of the trial index range and
    the early-stop check runs only on the in-order prefix of batches.
    """
    if graph is None:
        graph = plan.load_graph()
    workers = plan.workers or os.cpu_count() or 1
    pool = None
    if workers > 1:
        import multiprocessing as mp
        ctx = mp.get_context("fork")
        pool = ctx.Pool(workers, initializer=_init_worker, initargs=(graph,))
    results = []
    try:
        for spec in plan.points:
            for dec_name, cfg in plan.decoders:
                t0 = time.monotonic()
                tasks = [(plan.seed, spec, dec_name, cfg, start, count,
                          None if pool else graph)
                         for start, count in _batches(plan.max_frames,
                                                      plan.batch_size)]
                agg = np.zeros(7, dtype=np.int64)
                if pool is not None:
                    it = pool.imap(_run_batch, tasks)
                else:
                    it = map(_run_batch, tasks)
                for batch in it:
                    agg += batch
                    if agg[1] >= plan.target_errors:
                        break
                meta = _decoder_metadata(cfg)
                if isinstance(cfg, MpConfig) and cfg.variant == "MS_Q4":
                    meta["quantizer_step"] = _point_quantizer_step(
                        graph, spec, cfg)
                results.append(SimResult(
                    point=spec.label(), decoder=dec_name,
                    frames=int(agg[0]), word_errors=int(agg[1]),
                    detected_failures=int(agg[2]),
                    undetected_errors=int(agg[3]),
                    bit_errors=int(agg[4]), n_bits=graph.N,
                    iters_sum=int(agg[5]), iters_success_sum=int(agg[6]),
                    successes=int(agg[0] - agg[2] - agg[3]),
                    wall_clock=time.monotonic() - t0, metadata=meta))
                if progress is not None:
                    progress(results[-1])
    finally:
        if pool is not None:
            pool.close()
            pool.join()
    return results


def _point_quantizer_step(graph, spec, cfg) -> float:
    ref_llr = channel_llr(np.ones(graph.N), spec)
    return quantizer_step_for(ref_llr, cfg)


def _decoder_metadata(cfg) -> dict:
    if isinstance(cfg, GdbfConfig):
        meta = {"variant": cfg.variant, "alpha": cfg.alpha,
                "delta": cfg.delta, "p": cfg.p,
                "rho": list(cfg.rho), "max_iter": cfg.max_iter}
        if cfg.variant == "NGDBF":
            meta["ngdbf_sigma"] = cfg.ngdbf_sigma
        return meta
    return {"variant": cfg.variant, "iterations": cfg.iterations}


# --- CSV output ------------------------------------------------------------

_CSV_COLUMNS = ("point", "decoder", "frames", "word_errors",
                "detected_failures", "undetected_errors", "bit_errors",
                "wer", "ber", "wer_ci_lo", "wer_ci_hi",
                "avg_iters_success", "avg_iters_all")


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def results_csv(plan: SimPlan, results: list[SimResult]) -> str:
    """Deterministic CSV: '#' metadata block, header, one row per cell.

    Wall-clock timing is deliberately not included so identical plans
    yield byte-identical files.
    """
    buf = io.StringIO()
    buf.write(f"# gdbfm {_pkg_version} simulation results\n")
    buf.write(f"# code = {plan.code}\n")
    buf.write(f"# seed = {plan.seed}\n")
    buf.write(f"# max_frames = {plan.max_frames}\n")
    buf.write(f"# target_errors = {plan.target_errors}\n")
    for name, _ in plan.decoders:
        meta = next(r.metadata for r in results if r.decoder == name)
        pairs = ", ".join(f"{k} = {_fmt(v)}" for k, v in meta.items()
                          if k != "quantizer_step")
        buf.write(f"# decoder {name}: {pairs}\n")
    for r in results:
        if "quantizer_step" in r.metadata:
            buf.write(f"# quantizer_step {r.decoder} @ {r.point}: "
                      f"{_fmt(r.metadata['quantizer_step'])}\n")
    buf.write(",".join(_CSV_COLUMNS) + "\n")
    for r in results:
        lo, hi = r.wer_ci
        row = (r.point, r.decoder, r.frames, r.word_errors,
               r.detected_failures, r.undetected_errors, r.bit_errors,
               r.wer, r.ber, lo, hi, r.avg_iters_success, r.avg_iters_all)
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


# --- plan files ------------------------------------------------------------

def parse_plan(text: str, overrides: dict | None = None) -> SimPlan:
    """Parse the key/value + sections plan format.

    ``[plan]`` holds code/points/max_frames/target_errors/seed/workers;
    each ``[decoder NAME]`` section holds one decoder config.  CLI
    overrides (already-typed values) replace file values.
    """
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise PlanError(f"malformed plan file: {exc}") from None
    if "plan" not in cp:
        raise PlanError("plan file needs a [plan] section")
    sec = dict(cp["plan"])
    overrides = overrides or {}
    for key in ("code", "points", "max_frames", "target_errors", "seed",
                "workers", "batch_size"):
        if overrides.get(key) is not None:
            sec[key] = overrides[key]

    def _get(key, conv, default=None, required=False):
        if key in sec and sec[key] is not None:
            v = sec[key]
            return v if not isinstance(v, str) else conv(v)
        if required:
            raise PlanError(f"plan is missing required key {key!r}")
        return default

    code = _get("code", str, required=True)
    rate = None
    try:
        rate = code_rate(builtin_code(code)) if code in BUILTIN_CODES else None
    except Exception:
        pass
    points_raw = _get("points", str, required=True)
    if isinstance(points_raw, str):
        tokens = points_raw.replace(",", " ").split()
        points = tuple(parse_point(t, rate) for t in tokens)
    else:
        points = tuple(points_raw)

    decoders = []
    for name in cp.sections():
        if not name.startswith("decoder "):
            continue
        decoders.append((name[len("decoder "):].strip(),
                         parse_decoder_section(dict(cp[name]))))
    if overrides.get("decoders") is not None:
        decoders = overrides["decoders"]
    return SimPlan(
        code=code, points=points, decoders=tuple(decoders),
        max_frames=_get("max_frames", int, 10_000),
        target_errors=_get("target_errors", int, 100),
        seed=_get("seed", int, required=True),
        workers=_get("workers", int),
        batch_size=_get("batch_size", int, 500))


def parse_rho(text: str) -> tuple:
    values = text.strip().strip("[]").replace(",", " ").split()
    return tuple(float(v) for v in values)


def parse_decoder_section(kv: dict):
    """Build a decoder config from plan-file keys (Table-style names)."""
    variant = kv.get("variant", "GDBF").upper().replace("-", "_")
    if variant in ("BP", "MS", "MS_Q4"):
        return MpConfig(
            variant=variant,
            iterations=int(kv.get("iterations", 50)),
            quantizer_step=(float(kv["quantizer_step"])
                            if "quantizer_step" in kv else None))
    try:
        return GdbfConfig(
            variant=variant,
            alpha=float(kv.get("alpha", 1.0)),
            delta=float(kv.get("delta", 0.0)),
            p=float(kv.get("p", 1.0)),
            rho=parse_rho(kv.get("rho", "")),
            max_iter=int(kv.get("max_iter", 300)),
            ngdbf_sigma=float(kv.get("ngdbf_sigma", 0.7)))
    except ValueError as exc:
        raise PlanError(f"bad decoder config: {exc}") from None


# --- momentum optimization -------------------------------------------------

@dataclass(frozen=True)
class CandidateRow:
    rho: tuple
    frames: int
    word_errors: int
    wer: float
    wer_ci: tuple
    stream_fingerprint: int      # audit: common-random-number discipline


@dataclass(frozen=True)
class OptimizeResult:
    best_rho: tuple
    table: tuple                 # CandidateRow, best first


def momentum_candidates(length: int, rho_max: float, step: float = 0.5):
    """All non-increasing positive momentum vectors on the step grid."""
    if length < 1:
        raise ValueError("momentum length must be >= 1")
    if not 0 < step <= rho_max:
        raise ValueError("need rho_max >= step > 0")
    levels = [round(step * k, 12) for k in range(int(rho_max / step), 0, -1)]
    if not levels:
        raise ValueError("empty momentum grid")
    return [tuple(c) for c in
            itertools.combinations_with_replacement(levels, length)]


def _wm_variant(variant: str) -> str:
    return {"GDBF": "GDBF_WM", "PGDBF": "PGDBF_WM",
            "GDBF_WM": "GDBF_WM", "PGDBF_WM": "PGDBF_WM"}.get(variant, variant)


def _eval_candidate(graph, spec, cfg, frames, seed, workers) -> tuple:
    """(word errors, stream fingerprint) under common random numbers."""
    if graph is None:
        graph = _WORKER_GRAPH
    label = spec.label()
    x_tx = np.ones(graph.N)
    errors = 0
    fp = 0
    for i in range(frames):
        chan = derive_stream(seed, "optmom", label, i, "chan")
        dec = derive_stream(seed, "optmom", label, i, "dec")
        fp = (fp * 1_000_003 + chan.stream_id) & ((1 << 64) - 1)
        y = transmit(x_tx, spec, chan)
        out = _decode_one(graph, y, spec, cfg, dec)
        if (out.x_hat != 1).any():
            errors += 1
    return errors, fp


def optimize_momentum(graph: TannerGraph, spec: ChannelSpec, length: int,
                      rho_max: float, base: GdbfConfig, frames: int,
                      seed: int, step: float = 0.5,
                      workers: int | None = None) -> OptimizeResult:
    """Exhaustive grid search for the best momentum vector.

    Every candidate is evaluated on the same channel realizations
    (common random numbers); ties break toward smaller sum(rho), then
    lexicographically.
    """
    cands = momentum_candidates(length, rho_max, step)
    variant = _wm_variant(base.variant)
    rows = []
    tasks = [replace(base, variant=variant, rho=rho) for rho in cands]
    workers = workers or os.cpu_count() or 1
    if workers > 1 and len(tasks) > 1:
        import multiprocessing as mp
        ctx = mp.get_context("fork")
        with ctx.Pool(workers, initializer=_init_worker,
                      initargs=(graph,)) as pool:
            outs = pool.starmap(
                _eval_candidate,
                [(None, spec, cfg, frames, seed, 1) for cfg in tasks])
    else:
        outs = [_eval_candidate(graph, spec, cfg, frames, seed, 1)
                for cfg in tasks]
    for rho, (errors, fp) in zip(cands, outs):
        lo, hi = wilson_interval(errors, frames)
        rows.append(CandidateRow(rho, frames, errors, errors / frames,
                                 (lo, hi), fp))
    if len({r.stream_fingerprint for r in rows}) != 1:
        raise RuntimeError("common-random-number audit failed")
    rows.sort(key=lambda r: (r.word_errors, sum(r.rho), r.rho))
    return OptimizeResult(rows[0].rho, tuple(rows))


def suggest_momentum_length(graph: TannerGraph, spec: ChannelSpec,
                            config: GdbfConfig, trials: int, seed: int,
                            cap: int = 10_000) -> int:
    """Momentum length suggestion: the rounded average loop length of the
    deterministic base decoder at a pilot channel point."""
    from .loops import loop_statistics
    (stats,) = loop_statistics(graph, [spec], trials, config, seed, cap)
    if not stats.loops:
        raise ValueError(
            f"no decoder loops observed at {spec.label()} over {trials} "
            f"trials; pick a noisier pilot point")
    return int(round(stats.avg_loop_length))
