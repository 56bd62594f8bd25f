"""Command-line surface: decode, simulate, loopstats, optimize-momentum,
expand.

Exit codes: 0 success, 1 decode failure (decode subcommand only),
2 usage error, 3 I/O or validation error.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .channel import ChannelError, derive_stream, parse_point
from .codes import BUILTIN_CODES, builtin_base_matrix, builtin_code, code_rate
from .decoder import ConfigError, GdbfConfig, decode
from .graph import (BaseMatrix, GraphError, expand_base_matrix, load_alist,
                    save_alist)
from .loops import loop_statistics
from .mp import MpConfig, channel_llr, decode_mp
from .presets import BUILTIN_PLANS, FAMILIES, PRESETS, preset_config
from .sim import (PlanError, SimPlan, optimize_momentum, parse_plan,
                  parse_rho, results_csv, run_sweep, suggest_momentum_length)

_RANDOMIZED = {"PGDBF", "PGDBF_WM", "NGDBF"}


class _CliError(Exception):
    def __init__(self, message, code=3):
        super().__init__(message)
        self.code = code


def _load_graph(args):
    if getattr(args, "alist", None):
        return load_alist(args.alist), args.alist
    code = getattr(args, "code", None)
    if code in BUILTIN_CODES:
        return builtin_code(code), code
    if code:
        return load_alist(code), code
    raise _CliError("no code given: use --code NAME or --alist FILE")


def _decoder_config(args) -> GdbfConfig | MpConfig:
    if args.preset:
        return preset_config(args.preset, args.family or "gdbf",
                             max_iter=args.max_iter)
    variant = (args.variant or "GDBF").upper().replace("-", "_")
    if variant in ("BP", "MS", "MS_Q4"):
        return MpConfig(variant=variant, iterations=args.mp_iterations)
    return GdbfConfig(
        variant=variant, alpha=args.alpha, delta=args.delta, p=args.p,
        rho=parse_rho(args.rho) if args.rho else (),
        max_iter=args.max_iter, ngdbf_sigma=args.ngdbf_sigma)


def _add_decoder_flags(sp):
    sp.add_argument("--preset", choices=sorted(PRESETS),
                    help="published parameter row to draw from")
    sp.add_argument("--family", choices=FAMILIES,
                    help="decoder family for --preset")
    sp.add_argument("--variant",
                    help="explicit variant (BF/GDBF/PGDBF/NGDBF/GDBF_WM/"
                         "PGDBF_WM/BP/MS/MS_Q4)")
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--delta", type=float, default=0.0)
    sp.add_argument("--p", type=float, default=1.0)
    sp.add_argument("--rho", help="momentum vector, e.g. '[4,2,1]'")
    sp.add_argument("--max-iter", type=int, default=300)
    sp.add_argument("--ngdbf-sigma", type=float, default=0.7)
    sp.add_argument("--mp-iterations", type=int, default=50)


def _hex_word(x_hat: np.ndarray) -> str:
    bits = (np.asarray(x_hat) == -1).astype(np.uint8)
    return np.packbits(bits).tobytes().hex()


def _cmd_decode(args) -> int:
    graph, _ = _load_graph(args)
    try:
        y = np.loadtxt(args.word, dtype=np.float64).reshape(-1)
    except (OSError, ValueError) as exc:
        raise _CliError(f"cannot read received word: {exc}")
    if len(y) != graph.N:
        raise _CliError(f"word length {len(y)} != code length {graph.N}")
    cfg = _decoder_config(args)
    rng = None
    if isinstance(cfg, GdbfConfig):
        if cfg.variant in _RANDOMIZED:
            if args.seed is None:
                raise _CliError(
                    f"--seed is required for randomized variant {cfg.variant}",
                    code=2)
            rng = derive_stream(args.seed, "decode")
        out = decode(graph, y, cfg, rng)
    else:
        if args.channel is None:
            raise _CliError("MP decoding needs --channel to compute LLRs")
        spec = parse_point(args.channel, code_rate(graph))
        out = decode_mp(graph, channel_llr(y, spec), cfg)
    print(f"success {'true' if out.success else 'false'}")
    print(f"iterations {out.iterations_used}")
    print(f"word {_hex_word(out.x_hat)}")
    return 0 if out.success else 1


def _cmd_simulate(args) -> int:
    if args.builtin_plan:
        text = BUILTIN_PLANS.get(args.builtin_plan)
        if text is None:
            raise _CliError(f"unknown bundled plan {args.builtin_plan!r}; "
                            f"choose from {sorted(BUILTIN_PLANS)}")
    elif args.plan:
        try:
            with open(args.plan) as fh:
                text = fh.read()
        except OSError as exc:
            raise _CliError(f"cannot read plan: {exc}")
    else:
        raise _CliError("simulate needs --plan FILE or --builtin-plan NAME",
                        code=2)
    overrides = {"code": args.code, "points": args.points,
                 "max_frames": args.frames, "target_errors": args.target_errors,
                 "seed": args.seed, "workers": args.workers}
    plan = parse_plan(text, overrides)
    results = run_sweep(plan)
    csv = results_csv(plan, results)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(csv)
    else:
        sys.stdout.write(csv)
    return 0


def _cmd_loopstats(args) -> int:
    graph, _ = _load_graph(args)
    rate = code_rate(graph)
    points = [parse_point(t, rate) for t in args.points.replace(",", " ").split()]
    cfg = GdbfConfig(variant=(args.variant or "GDBF").upper().replace("-", "_"),
                     alpha=args.alpha, delta=args.delta,
                     rho=parse_rho(args.rho) if args.rho else (),
                     max_iter=args.cap)
    rows = loop_statistics(graph, points, args.trials, cfg, args.seed,
                           cap=args.cap)
    out = ["channel_point,trials,loop_fraction,avg_loop_start,avg_loop_length"]
    for r in rows:
        start = "" if r.avg_loop_start is None else f"{r.avg_loop_start:.10g}"
        length = "" if r.avg_loop_length is None else f"{r.avg_loop_length:.10g}"
        out.append(f"{r.point},{r.trials},{r.loop_fraction:.10g},"
                   f"{start},{length}")
    text = "\n".join(out) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_optimize_momentum(args) -> int:
    graph, _ = _load_graph(args)
    spec = parse_point(args.point, code_rate(graph))
    base = GdbfConfig(variant=(args.variant or "GDBF").upper().replace("-", "_"),
                      alpha=args.alpha, delta=args.delta, p=args.p,
                      max_iter=args.max_iter)
    length = args.length
    if length is None:
        length = suggest_momentum_length(graph, spec, base, args.pilot_trials,
                                         args.seed)
        print(f"# suggested momentum length from loop statistics: {length}")
    result = optimize_momentum(graph, spec, length, args.rho_max, base,
                               args.frames, args.seed, step=args.step,
                               workers=args.workers)
    print("rho,frames,word_errors,wer,wer_ci_lo,wer_ci_hi")
    for row in result.table:
        rho = " ".join(f"{v:g}" for v in row.rho)
        print(f"[{rho}],{row.frames},{row.word_errors},{row.wer:.10g},"
              f"{row.wer_ci[0]:.10g},{row.wer_ci[1]:.10g}")
    best = " ".join(f"{v:g}" for v in result.best_rho)
    print(f"best [{best}]")
    return 0


def _cmd_expand(args) -> int:
    if args.base in BUILTIN_CODES:
        base = builtin_base_matrix(args.base)
    else:
        try:
            with open(args.base) as fh:
                base = BaseMatrix.from_text(fh.read())
        except OSError as exc:
            raise _CliError(f"cannot read base matrix: {exc}")
    graph = expand_base_matrix(base)
    out = args.out or "code.alist"
    save_alist(graph, out)
    vdeg = np.bincount(graph.var_deg)
    cdeg = np.bincount(graph.chk_deg)
    print(f"N {graph.N}")
    print(f"M {graph.M}")
    print("variable degrees " + " ".join(
        f"{d}:{c}" for d, c in enumerate(vdeg) if c))
    print("check degrees " + " ".join(
        f"{d}:{c}" for d, c in enumerate(cdeg) if c))
    print(f"wrote {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gdbfm",
                                 description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("decode", help="decode a single received word")
    sp.add_argument("--code", help=f"built-in code {BUILTIN_CODES} or alist path")
    sp.add_argument("--alist", help="code as alist file")
    sp.add_argument("--word", required=True, help="received-word text file")
    sp.add_argument("--seed", type=int,
                    help="RNG seed (required for randomized decoders)")
    sp.add_argument("--channel", help="channel point for MP LLRs, e.g. bsc:0.04")
    _add_decoder_flags(sp)
    sp.set_defaults(func=_cmd_decode)

    sp = sub.add_parser("simulate", help="run a Monte Carlo WER/BER sweep")
    sp.add_argument("--plan", help="plan file")
    sp.add_argument("--builtin-plan", choices=sorted(BUILTIN_PLANS))
    sp.add_argument("--code")
    sp.add_argument("--points", help="override channel points")
    sp.add_argument("--frames", type=int, help="override max frames per point")
    sp.add_argument("--target-errors", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--out", help="CSV output path (default stdout)")
    sp.set_defaults(func=_cmd_simulate)

    sp = sub.add_parser("loopstats",
                        help="loop statistics of a deterministic decoder")
    sp.add_argument("--code")
    sp.add_argument("--alist")
    sp.add_argument("--points", required=True)
    sp.add_argument("--trials", type=int, default=2000)
    sp.add_argument("--variant", default="GDBF")
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--delta", type=float, default=0.0)
    sp.add_argument("--rho")
    sp.add_argument("--cap", type=int, default=10_000)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=_cmd_loopstats)

    sp = sub.add_parser("optimize-momentum",
                        help="grid-search momentum values at a pilot point")
    sp.add_argument("--code")
    sp.add_argument("--alist")
    sp.add_argument("--point", required=True)
    sp.add_argument("--length", type=int,
                    help="momentum length (default: from loop statistics)")
    sp.add_argument("--rho-max", type=float, default=4.0)
    sp.add_argument("--step", type=float, default=0.5)
    sp.add_argument("--frames", type=int, default=2000)
    sp.add_argument("--pilot-trials", type=int, default=2000)
    sp.add_argument("--variant", default="GDBF")
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--delta", type=float, default=0.0)
    sp.add_argument("--p", type=float, default=1.0)
    sp.add_argument("--max-iter", type=int, default=300)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--workers", type=int)
    sp.set_defaults(func=_cmd_optimize_momentum)

    sp = sub.add_parser("expand",
                        help="expand a base-matrix file to an alist code")
    sp.add_argument("base", help="base-matrix file or built-in code name")
    sp.add_argument("-o", "--out", help="output alist path")
    sp.set_defaults(func=_cmd_expand)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (GraphError, ChannelError, ConfigError, PlanError, ValueError,
            OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
