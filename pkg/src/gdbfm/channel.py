"""BSC and AWGN channel simulation with reproducible counter-based RNG.

Every random draw is tied to an :class:`RngStream` identified by a
(seed, stream id) pair, backed by the counter-based Philox generator, so
that identical streams replay bit-for-bit on any platform and distinct
stream ids are statistically independent.  Gaussian samples come from
numpy's Generator (ziggurat method), which is pinned here as the
sampling method for all acceptance seeds.
"""
from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass

import numpy as np


class ChannelError(ValueError):
    """Raised for invalid channel specifications."""


@dataclass(frozen=True)
class ChannelSpec:
    """Either a BSC with crossover probability or an AWGN channel."""

    kind: str                      # "bsc" | "awgn"
    bsc_epsilon: float | None = None
    awgn_sigma: float | None = None

    def __post_init__(self):
        if self.kind == "bsc":
            eps = self.bsc_epsilon
            if eps is None or self.awgn_sigma is not None:
                raise ChannelError("BSC spec takes exactly bsc_epsilon")
            if not 0.0 < eps <= 0.5:
                raise ChannelError(f"crossover probability {eps} not in (0, 0.5]")
            if eps == 0.5:
                warnings.warn("BSC with epsilon = 0.5 is uninformative",
                              stacklevel=2)
        elif self.kind == "awgn":
            sigma = self.awgn_sigma
            if sigma is None or self.bsc_epsilon is not None:
                raise ChannelError("AWGN spec takes exactly awgn_sigma")
            if not sigma > 0.0:
                raise ChannelError(f"noise std {sigma} must be positive")
        else:
            raise ChannelError(f"unknown channel kind {self.kind!r}")

    @property
    def hard_output(self) -> bool:
        return self.kind == "bsc"

    def label(self) -> str:
        if self.kind == "bsc":
            return f"bsc:{self.bsc_epsilon:g}"
        return f"awgn-sigma:{self.awgn_sigma:g}"


def bsc(epsilon: float) -> ChannelSpec:
    return ChannelSpec("bsc", bsc_epsilon=epsilon)


def awgn(sigma: float) -> ChannelSpec:
    return ChannelSpec("awgn", awgn_sigma=sigma)


def ebn0_to_sigma(ebn0_db: float, rate: float) -> float:
    """Noise std for unit-energy bipolar signaling at a given Eb/N0."""
    if not 0.0 < rate < 1.0:
        raise ChannelError(f"code rate {rate} not in (0, 1)")
    return 1.0 / np.sqrt(2.0 * rate * 10.0 ** (ebn0_db / 10.0))


def parse_point(token: str, rate: float | None = None) -> ChannelSpec:
    """Parse a channel point like ``bsc:0.04``, ``awgn-sigma:0.8`` or
    ``awgn-ebn0:3.0`` (the last one needs the code rate)."""
    try:
        name, value = token.split(":")
        value = float(value)
    except ValueError:
        raise ChannelError(f"malformed channel point {token!r}") from None
    if name == "bsc":
        return bsc(value)
    if name == "awgn-sigma":
        return awgn(value)
    if name == "awgn-ebn0":
        if rate is None:
            raise ChannelError("awgn-ebn0 points require the code rate")
        return awgn(float(ebn0_to_sigma(value, rate)))
    raise ChannelError(f"unknown channel point kind {name!r}")


_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    """A (seed, stream id) pair naming one reproducible random stream."""

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed & _MASK64, self.stream_id & _MASK64],
                       dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


def derive_stream(seed: int, *parts) -> RngStream:
    """Derive an independent substream from a global seed and a label path.

    The stream id is the first 8 bytes of blake2b over the stringified
    parts, so any hashable label tuple maps to a stable id.
    """
    label = "/".join(str(p) for p in parts).encode()
    digest = hashlib.blake2b(label, digest_size=8).digest()
    return RngStream(seed, int.from_bytes(digest, "little"))


def transmit(x, spec: ChannelSpec, rng: RngStream | np.random.Generator):
    """Send a bipolar word through the channel; returns a float64 vector.

    BSC flips each symbol independently with probability epsilon (output
    stays in {-1, +1}); AWGN adds independent Gaussian noise.
    """
    x = np.asarray(x, dtype=np.float64)
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    if spec.kind == "bsc":
        flips = gen.random(len(x)) < spec.bsc_epsilon
        y = np.where(flips, -x, x)
    else:
        y = x + spec.awgn_sigma * gen.standard_normal(len(x))
    return y
