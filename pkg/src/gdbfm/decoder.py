"""Bit-flipping decoder family: BF, GDBF, PGDBF, NGDBF, with momentum.

The decoders minimize the negated code energy by coordinate descent on
bipolar words: each iteration flips every bit whose local energy falls
at or below ``min(E) + delta``.  Momentum adds a positive penalty
``rho(l_n)`` to bits flipped within the last ``len(rho)`` iterations,
discouraging immediate flip-backs.

Two interchangeable execution paths exist for the full decoding run: a
compiled kernel (see :mod:`gdbfm.kernels`) and the pure-numpy loop in
this module.  Both consume random draws identically, so their outputs
are bit-for-bit equal.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .channel import RngStream
from .graph import TannerGraph, syndrome as graph_syndrome


class ConfigError(ValueError):
    """Raised for inconsistent decoder configurations."""


VARIANTS = ("BF", "GDBF", "PGDBF", "NGDBF", "GDBF_WM", "PGDBF_WM")
_DETERMINISTIC = frozenset({"BF", "GDBF", "GDBF_WM"})
_RANDOMIZED_FLIP = frozenset({"PGDBF", "PGDBF_WM"})
_MOMENTUM = frozenset({"GDBF_WM", "PGDBF_WM"})


@dataclass(frozen=True)
class GdbfConfig:
    """Decoder parameters mirroring the standard parameter table.

    ``rho`` is the momentum vector (non-increasing, positive); empty
    means no momentum.  ``p`` is the per-candidate bit-flip probability
    of the probabilistic variants.  ``ngdbf_sigma`` is the std of the
    additive Gaussian energy perturbation of NGDBF.
    """

    variant: str = "GDBF"
    alpha: float = 1.0
    delta: float = 0.0
    p: float = 1.0
    rho: tuple = ()
    max_iter: int = 300
    ngdbf_sigma: float = 0.7

    def __post_init__(self):
        object.__setattr__(self, "rho", tuple(float(r) for r in self.rho))
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown variant {self.variant!r}")
        if self.variant != "BF" and not self.alpha > 0:
            raise ConfigError(f"alpha must be positive, got {self.alpha}")
        if self.delta < 0:
            raise ConfigError(f"delta must be >= 0, got {self.delta}")
        if not 0.0 < self.p <= 1.0:
            raise ConfigError(f"flip probability {self.p} not in (0, 1]")
        if self.max_iter < 1:
            raise ConfigError("max_iter must be >= 1")
        if self.ngdbf_sigma < 0:
            raise ConfigError("ngdbf_sigma must be >= 0")
        rho = self.rho
        if any(r <= 0 for r in rho):
            raise ConfigError("momentum values must be strictly positive")
        if any(rho[i] < rho[i + 1] for i in range(len(rho) - 1)):
            raise ConfigError(f"momentum vector must be non-increasing: {rho}")
        if rho and self.variant in ("BF", "GDBF", "PGDBF"):
            raise ConfigError(
                f"variant {self.variant} takes no momentum; use {self.variant}_WM"
            )
        if rho and self.variant == "NGDBF":
            warnings.warn("NGDBF with momentum is experimental", stacklevel=2)
        if self.p < 1.0 and self.variant not in _RANDOMIZED_FLIP:
            raise ConfigError(f"variant {self.variant} requires p = 1")

    @property
    def L(self) -> int:
        return len(self.rho)

    @property
    def deterministic(self) -> bool:
        return self.variant in _DETERMINISTIC

    def rho_lookup(self) -> np.ndarray:
        """Momentum by counter value: index l in 1..L gives rho(l), L+1 gives 0."""
        return np.concatenate(([0.0], self.rho, [0.0]))


@dataclass
class MomentumState:
    """Per-bit iterations-since-last-flip counters, saturating at L+1."""

    l: np.ndarray

    @classmethod
    def initial(cls, n: int, config: GdbfConfig) -> "MomentumState":
        return cls(np.full(n, config.L + 1, dtype=np.int32))


@dataclass
class DecodeOutcome:
    x_hat: np.ndarray
    success: bool
    iterations_used: int
    total_flips: int
    trajectory: list | None = None


def hard_decision(y) -> np.ndarray:
    """Bipolar sign of a received word; sign(0) resolves to +1."""
    y = np.asarray(y, dtype=np.float64)
    return np.where(y >= 0.0, 1, -1).astype(np.int8)


def global_energy(graph: TannerGraph, x, y, alpha: float) -> float:
    """Decoding objective: alpha * correlation + sum of bipolar syndromes."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(x) != len(y) or len(x) != graph.N:
        raise ValueError("length mismatch")
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    return float(alpha * np.dot(x, y) + graph_syndrome(graph, x).sum())


def local_energies(graph: TannerGraph, x, y, c, alpha: float,
                   rho=(), l=None) -> np.ndarray:
    """Per-bit energies alpha*x*y + sum of incident syndromes + rho(l).

    ``c`` must be the syndrome of x.  With empty rho this is the plain
    momentum-free local energy.
    """
    x = np.asarray(x)
    y = np.asarray(y, dtype=np.float64)
    c = np.asarray(c)
    if len(x) != graph.N or len(y) != graph.N or len(c) != graph.M:
        raise ValueError("length mismatch")
    csum = np.add.reduceat(c[graph.var_adj].astype(np.float64),
                           graph.var_ptr[:-1])
    E = alpha * (x.astype(np.float64) * y) + csum
    rho = tuple(rho)
    if rho:
        if l is None:
            raise ValueError("momentum state required when rho is non-empty")
        lookup = np.concatenate(([0.0], rho, [0.0]))
        lv = l.l if isinstance(l, MomentumState) else np.asarray(l)
        E = E + lookup[np.minimum(lv, len(rho) + 1)]
    return E


def flip_candidates(E, delta: float) -> np.ndarray:
    """Indices with energy at or below min(E) + delta; never empty."""
    E = np.asarray(E, dtype=np.float64)
    if E.size == 0:
        raise ValueError("empty energy vector")
    if delta < 0:
        raise ValueError("delta must be >= 0")
    return np.flatnonzero(E <= E.min() + delta)


def step(graph: TannerGraph, x, y, config: GdbfConfig,
         state: MomentumState, gen=None):
    """One decoding iteration; returns (x', state', flip_set, syndrome).

    The syndrome is the one computed on entry (pre-flip); a satisfied
    syndrome short-circuits with an empty flip set and unchanged state.
    ``gen`` is a numpy Generator (required by randomized variants).
    """
    x = np.asarray(x, dtype=np.int8)
    y = np.asarray(y, dtype=np.float64)
    c = graph_syndrome(graph, x)
    if (c == 1).all():
        return x, state, np.empty(0, dtype=np.int64), c

    if config.variant == "BF":
        unsat = np.add.reduceat((c[graph.var_adj] == -1).astype(np.int64),
                                graph.var_ptr[:-1])
        flips = np.flatnonzero(2 * unsat > graph.var_deg)
        x2 = x.copy()
        x2[flips] = -x2[flips]
        return x2, state, flips, c

    l_new = np.minimum(state.l, config.L) + 1
    csum = np.add.reduceat(c[graph.var_adj].astype(np.float64),
                           graph.var_ptr[:-1])
    E = config.alpha * (x.astype(np.float64) * y) + csum
    E = E + config.rho_lookup()[l_new]
    if config.variant == "NGDBF" and config.ngdbf_sigma > 0.0:
        if gen is None:
            raise ValueError("NGDBF requires a random generator")
        E = E + config.ngdbf_sigma * gen.standard_normal(graph.N)

    candidates = np.flatnonzero(E <= E.min() + config.delta)
    if config.p < 1.0:
        if gen is None:
            raise ValueError(f"{config.variant} requires a random generator")
        draws = gen.random(len(candidates))
        flips = candidates[draws < config.p]
    else:
        flips = candidates
    x2 = x.copy()
    x2[flips] = -x2[flips]
    l_new[flips] = 0
    return x2, MomentumState(l_new), flips, c


def run_python(graph: TannerGraph, y, config: GdbfConfig, gen=None,
               record_trajectory: bool = False) -> DecodeOutcome:
    """Pure-numpy decoding loop; reference path for the compiled kernel."""
    y = np.asarray(y, dtype=np.float64)
    if len(y) != graph.N:
        raise ValueError(f"word length {len(y)} != N={graph.N}")
    x = hard_decision(y)
    state = MomentumState.initial(graph.N, config)
    trajectory = [] if record_trajectory else None
    total_flips = 0
    phases = 0
    for _ in range(config.max_iter):
        x, state, flips, c = step(graph, x, y, config, state, gen)
        if (c == 1).all():
            return DecodeOutcome(x, True, max(1, phases), total_flips,
                                 trajectory)
        phases += 1
        total_flips += len(flips)
        if trajectory is not None:
            trajectory.append(flips)
    success = bool((graph_syndrome(graph, x) == 1).all())
    return DecodeOutcome(x, success, config.max_iter if not success
                         else max(1, phases), total_flips, trajectory)


def decode(graph: TannerGraph, y, config: GdbfConfig,
           rng: RngStream | np.random.Generator | None = None,
           record_trajectory: bool = False) -> DecodeOutcome:
    """Full decoding run; dispatches to the fastest available kernel.

    ``rng`` may be an :class:`RngStream` or an already-built Generator;
    deterministic variants accept None.
    """
    if isinstance(rng, RngStream):
        gen = rng.generator()
    else:
        gen = rng
    if gen is None and not (config.deterministic
                            or (config.variant == "NGDBF"
                                and config.ngdbf_sigma == 0.0)):
        raise ValueError(f"variant {config.variant} requires an RNG")
    if record_trajectory:
        return run_python(graph, y, config, gen, record_trajectory=True)
    from . import kernels
    return kernels.run(graph, y, config, gen)
