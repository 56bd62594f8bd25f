"""State-cycle detection for the deterministic bit-flipping decoders.

A deterministic decoder run either reaches a codeword or revisits a
previous state and then cycles forever.  This module detects such loops
by keeping a history of visited states and reports the loop starting
iteration and loop length, plus aggregate loop statistics over channel
realizations.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelSpec, derive_stream, transmit
from .decoder import GdbfConfig, MomentumState, hard_decision, step
from .graph import TannerGraph

_LOOPABLE = frozenset({"BF", "GDBF", "GDBF_WM"})


class StateHistory:
    """Map from state fingerprint to the first iteration it occurred at.

    The fingerprint is the packed state itself (bit-packed x plus the
    momentum counters), so hits are exact and collisions impossible.
    """

    def __init__(self):
        self._seen: dict[bytes, int] = {}

    @staticmethod
    def fingerprint(x: np.ndarray, state: MomentumState) -> bytes:
        return (np.packbits(x == -1).tobytes()
                + state.l.astype(np.uint8).tobytes())

    def record(self, x, state, iteration: int) -> int | None:
        """Record a state; returns the first-seen iteration on a revisit."""
        key = self.fingerprint(x, state)
        prev = self._seen.get(key)
        if prev is None:
            self._seen[key] = iteration
        return prev

    def __len__(self):
        return len(self._seen)


@dataclass(frozen=True)
class LoopReport:
    outcome: str                 # "Converged" | "Loop" | "CapReached"
    iterations_run: int
    loop_start: int | None = None
    loop_length: int | None = None


def run_until_loop(graph: TannerGraph, y, config: GdbfConfig,
                   cap: int = 10_000) -> LoopReport:
    """Iterate a deterministic decoder until convergence, a repeated
    state, or the iteration cap.

    States are indexed as in the decoder dynamics: state 0 is the
    initial hard decision, state ell the word after the ell-th flip
    phase.  A revisit at ell of the state first seen at ell1 reports
    loop_start = ell1 and loop_length = ell - ell1.
    """
    if config.variant not in _LOOPABLE or config.p < 1.0:
        raise ValueError(
            f"loop detection needs a deterministic decoder, got {config.variant}"
            f" with p={config.p}")
    y = np.asarray(y, dtype=np.float64)
    x = hard_decision(y)
    state = MomentumState.initial(graph.N, config)
    history = StateHistory()
    history.record(x, state, 0)
    phases = 0
    for _ in range(cap):
        x, state, flips, c = step(graph, x, y, config, state)
        if (c == 1).all():
            return LoopReport("Converged", max(1, phases))
        phases += 1
        first = history.record(x, state, phases)
        if first is not None:
            return LoopReport("Loop", phases, loop_start=first,
                              loop_length=phases - first)
    return LoopReport("CapReached", phases)


@dataclass(frozen=True)
class PointLoopStats:
    point: str
    trials: int
    loops: int
    converged: int
    cap_reached: int
    avg_loop_start: float | None
    avg_loop_length: float | None

    @property
    def loop_fraction(self) -> float:
        return self.loops / self.trials if self.trials else 0.0


def loop_statistics(graph: TannerGraph, points, trials: int,
                    config: GdbfConfig, seed: int,
                    cap: int = 10_000) -> list[PointLoopStats]:
    """Per channel point: loop fraction and average loop start/length.

    Averages cover only the trials that ended in a loop; points with no
    looping trial report absent averages.  All-(+1) transmission; trial
    i of a point draws from the stream (seed, "loopstats", point, i).
    """
    x_tx = np.ones(graph.N)
    rows = []
    for spec in points:
        label = spec.label()
        loops = converged = capped = 0
        start_sum = 0
        length_sum = 0
        for i in range(trials):
            stream = derive_stream(seed, "loopstats", label, i)
            y = transmit(x_tx, spec, stream)
            report = run_until_loop(graph, y, config, cap)
            if report.outcome == "Converged":
                converged += 1
            elif report.outcome == "CapReached":
                capped += 1
            else:
                loops += 1
                start_sum += report.loop_start
                length_sum += report.loop_length
        rows.append(PointLoopStats(
            point=label, trials=trials, loops=loops, converged=converged,
            cap_reached=capped,
            avg_loop_start=start_sum / loops if loops else None,
            avg_loop_length=length_sum / loops if loops else None))
    return rows
