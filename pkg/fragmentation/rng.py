"""
Counter-based uniform variates.

Each draw is a pure function of (seed, stream, counters...), so a realized
environment or walk never depends on the order in which entries are evaluated,
how they are batched, or how many workers compute them.
"""

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_SHIFT30 = np.uint64(30)
_SHIFT27 = np.uint64(27)
_SHIFT31 = np.uint64(31)
_SHIFT12 = np.uint64(12)
_UNIT = 2.0 ** -52

ENVIRONMENT_STREAM = 1
WALK_STREAM = 2


def _mix64(z: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer."""
    z = (z ^ (z >> _SHIFT30)) * _MIX1
    z = (z ^ (z >> _SHIFT27)) * _MIX2
    return z ^ (z >> _SHIFT31)


def _as_words(value) -> np.ndarray:
    arr = np.asarray(value)
    if arr.dtype == object or arr.ndim == 0 and isinstance(value, int):
        return np.asarray(int(value) & _MASK64, dtype=np.uint64)
    return arr.astype(np.int64).astype(np.uint64)


def hash_counters(seed: int, *counters) -> np.ndarray:
    """
    Hash a seed and broadcastable integer counters to 64-bit words.

    Args:
        seed: Any Python integer; reduced modulo 2**64
        *counters: Nonnegative integers or integer arrays

    Returns:
        uint64 array with the broadcast shape of the counters
    """
    words = [_as_words(c) for c in counters]
    shape = np.broadcast_shapes(*(w.shape for w in words)) if words else ()
    with np.errstate(over="ignore"):
        state = np.full(shape, np.uint64(int(seed) & _MASK64), dtype=np.uint64)
        state = _mix64(state + _GOLDEN)
        for word in words:
            state = _mix64(state ^ _mix64(word * _GOLDEN + _GOLDEN))
    return state


def counter_uniforms(seed: int, *counters) -> np.ndarray:
    """
    Uniform variates strictly inside (0, 1), one per broadcast counter tuple.

    The top 52 bits of the hash are centred on a 2**-52 grid, so neither 0 nor
    1 can be produced.
    """
    words = hash_counters(seed, *counters)
    return ((words >> _SHIFT12).astype(np.float64) + 0.5) * _UNIT
