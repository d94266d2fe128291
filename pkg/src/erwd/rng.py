"""Seeded random number generation: PCG32 with splitmix64 stream derivation.

Every public API in this package takes an explicit integer seed.  Replica
streams (one per walk, per grid cell, per coupled run) are derived by
hashing (seed, index...) through splitmix64, so results are reproducible
and independent of scheduling or worker count.  The numba kernels in
``_kernels`` implement the identical generator; ``Pcg32`` is the pure
Python twin used by the slow reference paths and in equivalence tests.
"""

from __future__ import annotations

MASK64 = 0xFFFFFFFFFFFFFFFF
_STREAM_SALT = 0xA3EC647659359ACD
_INC_SALT = 0xDEADBEEFCAFEBABE


def splitmix64(x: int) -> int:
    """One splitmix64 output step for the 64-bit input ``x``."""
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, *indices: int) -> int:
    """Derive an independent 63-bit stream seed from a base seed and indices."""
    z = seed & MASK64
    for ix in indices:
        z = splitmix64(z ^ ((ix & MASK64) * _STREAM_SALT & MASK64))
    # keep within int64 range so numpy/numba uint64 conversions stay trivial
    return z & 0x7FFFFFFFFFFFFFFF


def stream_state(seed: int, stream: int) -> tuple[int, int]:
    """Initial (state, inc) pair of the PCG32 stream ``stream`` under ``seed``.

    Must match the derivation inside the numba kernels bit for bit.
    """
    s = splitmix64((seed & MASK64) ^ ((stream & MASK64) * _STREAM_SALT & MASK64))
    state = splitmix64(s)
    inc = splitmix64(s ^ _INC_SALT) | 1
    return state, inc


class Pcg32:
    """Minimal PCG32 (XSH-RR variant): 64-bit state, 32-bit output."""

    __slots__ = ("state", "inc")

    def __init__(self, seed: int, stream: int = 0):
        self.state, self.inc = stream_state(seed, stream)

    def next_uint32(self) -> int:
        old = self.state
        self.state = (old * 6364136223846793005 + self.inc) & MASK64
        xorshifted = ((old >> 18) ^ old) >> 27 & 0xFFFFFFFF
        rot = old >> 59
        return ((xorshifted >> rot) | (xorshifted << ((-rot) & 31))) & 0xFFFFFFFF

    def uniform(self) -> float:
        """A float in [0, 1) with 32 bits of resolution."""
        return self.next_uint32() / 4294967296.0
