"""Counter-based SplitMix64 stream used for every ``rand([0,1])`` term.

Term ``n`` of the stream with key ``k`` is the ``(n+1)``-th output of the
standard SplitMix64 generator started from state ``k``::

    state = k + (n + 1) * 0x9E3779B97F4A7C15          (mod 2**64)
    z = (state ^ (state >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z = z ^ (z >> 31)
    u = (z >> 11) * 2**-53                            (in [0, 1))

The key is ``seed + stream * 0xD1B54A32D192ED03`` so independent streams can
share one seed.  Because each term depends only on its index, terms can be
evaluated in any order.
"""
from __future__ import annotations

import numpy as np

DEFAULT_SEED = 42

GOLDEN = 0x9E3779B97F4A7C15
STREAM_MUL = 0xD1B54A32D192ED03
_MASK = (1 << 64) - 1


def stream_key(seed: int, stream: int = 0) -> int:
    if seed < 0:
        raise ValueError("seed must be non-negative")
    return (seed + stream * STREAM_MUL) & _MASK


def splitmix64(state):
    """SplitMix64 finaliser applied elementwise to a uint64 array."""
    z = np.atleast_1d(np.asarray(state, dtype=np.uint64))
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def raw(seed: int, stream: int, index) -> np.ndarray:
    idx = np.atleast_1d(np.asarray(index, dtype=np.uint64))
    key = np.uint64(stream_key(seed, stream))
    with np.errstate(over="ignore"):
        state = key + (idx + np.uint64(1)) * np.uint64(GOLDEN)
        return splitmix64(state)


def uniform(seed: int, stream: int, index) -> np.ndarray:
    """Uniform doubles in [0, 1) for the given term indices."""
    z = raw(seed, stream, index)
    return (z >> np.uint64(11)).astype(np.float64) * 2.0**-53
