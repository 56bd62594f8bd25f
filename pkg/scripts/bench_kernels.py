"""Benchmark the compiled decoder kernel against the numpy fallback.

Runs the same decoding workload through both backends, checks the
outputs are bitwise identical, and reports per-frame timing.

Usage: python scripts/bench_kernels.py [--frames N] [--code NAME]
"""
import argparse
import time

import numpy as np

from gdbfm import kernels
from gdbfm.channel import bsc, derive_stream, transmit
from gdbfm.codes import builtin_code
from gdbfm.decoder import GdbfConfig


def run_backend(graph, words, config, backend, seed):
    outs = []
    t0 = time.perf_counter()
    for i, y in enumerate(words):
        gen = derive_stream(seed, "bench", i).generator()
        outs.append(kernels.run(graph, y, config, gen, backend=backend))
    return time.perf_counter() - t0, outs


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--frames", type=int, default=200)
    ap.add_argument("--code", default="reg3x6")
    ap.add_argument("--epsilon", type=float, default=0.04)
    args = ap.parse_args()

    if not kernels.compiled_available():
        raise SystemExit("compiled kernel not available; nothing to compare")

    graph = builtin_code(args.code)
    spec = bsc(args.epsilon)
    x_tx = np.ones(graph.N)
    words = [transmit(x_tx, spec, derive_stream(99, "benchchan", i))
             for i in range(args.frames)]

    configs = {
        "GDBF": GdbfConfig(variant="GDBF", alpha=0.5),
        "PGDBF": GdbfConfig(variant="PGDBF", alpha=0.5, p=0.9),
        "GDBF_WM": GdbfConfig(variant="GDBF_WM", alpha=0.5, rho=(2, 2, 2, 1)),
        "PGDBF_WM": GdbfConfig(variant="PGDBF_WM", alpha=0.5, p=0.9,
                               rho=(2, 2, 2, 1)),
    }

    print(f"code={args.code} N={graph.N} frames={args.frames} "
          f"epsilon={args.epsilon}")
    print(f"{'decoder':<10} {'compiled':>12} {'python':>12} {'speedup':>9}")
    for name, cfg in configs.items():
        tc, outs_c = run_backend(graph, words, cfg, "compiled", seed=1)
        tp, outs_p = run_backend(graph, words, cfg, "python", seed=1)
        for oc, op in zip(outs_c, outs_p):
            assert np.array_equal(oc.x_hat, op.x_hat)
            assert oc.success == op.success
            assert oc.iterations_used == op.iterations_used
            assert oc.total_flips == op.total_flips
        print(f"{name:<10} {tc / args.frames * 1e3:>9.3f} ms "
              f"{tp / args.frames * 1e3:>9.3f} ms {tp / tc:>8.1f}x")
    print("outputs bitwise identical across backends")


if __name__ == "__main__":
    main()
