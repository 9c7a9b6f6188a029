"""Counter-based random bit streams with exact bit accounting.

Each stream is a Philox generator keyed by ``(seed, stream_id)`` through
:class:`numpy.random.SeedSequence`, so any sample of any trial can be
regenerated independently of the others.
"""

from __future__ import annotations

from typing import Iterable, Union

import numpy as np

_MASK64 = (1 << 64) - 1

StreamId = Union[int, Iterable[int]]


def _spawn_key(stream_id: StreamId) -> tuple[int, ...]:
    if isinstance(stream_id, (int, np.integer)):
        return (int(stream_id) & _MASK64,)
    return tuple(int(s) & _MASK64 for s in stream_id)


class RandomStream:
    """Deterministic source of random bits.

    ``bit_counter`` is the number of bits handed out so far, including bits
    thrown away by rejection sampling.
    """

    def __init__(self, seed: int, stream_id: StreamId = 0):
        self.seed = int(seed) & _MASK64
        self.stream_id = _spawn_key(stream_id)
        ss = np.random.SeedSequence(self.seed, spawn_key=self.stream_id)
        self._bitgen = np.random.Philox(key=ss.generate_state(2, np.uint64))
        self._buffer = 0
        self._buffered = 0
        self.bit_counter = 0

    def __repr__(self):
        return (f"RandomStream(seed={self.seed}, stream_id={self.stream_id}, "
                f"bit_counter={self.bit_counter})")

    def _refill(self):
        self._buffer |= int(self._bitgen.random_raw()) << self._buffered
        self._buffered += 64

    def bits(self, k: int) -> int:
        """Return the next ``k`` bits as a non-negative integer."""
        if k < 0:
            raise ValueError("bit count must be non-negative")
        while self._buffered < k:
            self._refill()
        out = self._buffer & ((1 << k) - 1)
        self._buffer >>= k
        self._buffered -= k
        self.bit_counter += k
        return out

    def bit_array(self, k: int) -> np.ndarray:
        """Return the next ``k`` bits as a uint8 array of zeros and ones."""
        if k < 0:
            raise ValueError("bit count must be non-negative")
        take = min(k, self._buffered)
        head = self.bits(take)
        out = np.empty(k, dtype=np.uint8)
        out[:take] = [(head >> j) & 1 for j in range(take)]
        rest = k - take
        if rest:
            words = -(-rest // 64)
            raw = self._bitgen.random_raw(words).astype("<u8")
            unpacked = np.unpackbits(raw.view(np.uint8), bitorder="little")
            out[take:] = unpacked[:rest]
            spare = words * 64 - rest
            if spare:
                # keep the unused high bits of the last word for later draws
                self._buffer = int(raw[-1]) >> (64 - spare)
                self._buffered = spare
            self.bit_counter += rest
        return out

    def uniform_int(self, m: int) -> int:
        """Uniform integer in ``[0, m)`` by rejection on ceil(log2 m)-bit blocks."""
        if m < 1:
            raise ValueError("range must be positive")
        width = (m - 1).bit_length()
        while True:
            r = self.bits(width)
            if r < m:
                return r

    def uniform53(self) -> float:
        """Uniform double in ``(0, 1]`` built from 53 fresh bits."""
        return (self.bits(53) + 1) * 2.0**-53

    def uniforms53(self, k: int) -> np.ndarray:
        """Vectorised :meth:`uniform53`; consumes the same bits in the same order."""
        blocks = self.bit_array(53 * k).reshape(k, 53).astype(np.uint64)
        ints = blocks @ (np.uint64(1) << np.arange(53, dtype=np.uint64))
        return (ints + np.uint64(1)).astype(np.float64) * 2.0**-53

    def normals(self, k: int) -> np.ndarray:
        """``k`` standard normals via Box-Muller, two 53-bit uniforms per pair."""
        pairs = -(-k // 2)
        u = self.uniforms53(2 * pairs).reshape(pairs, 2)
        r = np.sqrt(-2.0 * np.log(u[:, 0]))
        theta = 2.0 * np.pi * u[:, 1]
        return np.column_stack([r * np.cos(theta), r * np.sin(theta)]).ravel()[:k]
