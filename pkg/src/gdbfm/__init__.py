"""Gradient descent bit-flipping LDPC decoding with momentum.

Library layout:

``graph`` / ``codes``
    Tanner graphs, quasi-cyclic expansion, alist I/O, built-in codes.
``channel``
    BSC/AWGN simulation with reproducible counter-based RNG streams.
``decoder`` / ``kernels``
    The BF/GDBF/PGDBF/NGDBF family with momentum; compiled hot kernel
    with a pure-numpy fallback selected at import.
``mp``
    Flooded BP / Min-Sum / 4-bit Min-Sum baselines.
``loops``
    State-cycle detection and loop statistics for deterministic runs.
``sim``
    Monte Carlo WER/BER sweeps and offline momentum optimization.
``cli``
    The ``gdbfm`` command-line tool.
"""

__version__ = "0.1.0"

from .channel import ChannelSpec, RngStream, awgn, bsc, derive_stream, transmit
from .codes import builtin_code, trapping_set_instance
from .decoder import DecodeOutcome, GdbfConfig, decode
from .graph import TannerGraph, correlation, is_codeword, syndrome
from .mp import MpConfig, channel_llr, decode_mp

__all__ = [
    "ChannelSpec", "RngStream", "awgn", "bsc", "derive_stream", "transmit",
    "builtin_code", "trapping_set_instance",
    "DecodeOutcome", "GdbfConfig", "decode",
    "TannerGraph", "correlation", "is_codeword", "syndrome",
    "MpConfig", "channel_llr", "decode_mp",
    "__version__",
]
