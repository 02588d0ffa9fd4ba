"""
Seeded random streams for reproducible stochastic runs.

Every run owns one stream built from ``numpy.random.Philox`` (a counter-based
generator) keyed by ``SeedSequence(entropy=seed, spawn_key=(stream,))``.
Uniform doubles are drawn in blocks, so a given (seed, stream) pair yields the
same sequence bit for bit on every platform.
"""
import math

import numpy as np

BLOCK_SIZE = 4096


class SeededStream:
    """Buffered uniform source with the few derived draws the simulators need."""

    def __init__(self, seed: int, stream: int = 0, block_size: int = BLOCK_SIZE):
        if seed < 0 or stream < 0:
            raise ValueError(f"Seeds and stream ids must be non-negative, got {seed}/{stream}")
        self._seed = int(seed)
        self._stream = int(stream)
        sequence = np.random.SeedSequence(entropy=self._seed, spawn_key=(self._stream,))
        self._generator = np.random.Generator(np.random.Philox(sequence))
        self._block_size = block_size
        self._buffer: list = []
        self._position = 0

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def stream(self) -> int:
        return self._stream

    def random(self) -> float:
        """Uniform draw on [0, 1)."""
        if self._position >= len(self._buffer):
            self._buffer = self._generator.random(self._block_size).tolist()
            self._position = 0
        value = self._buffer[self._position]
        self._position += 1
        return value

    def exponential(self, rate: float) -> float:
        """Waiting time of a Poisson clock with the given total rate."""
        return -math.log(1.0 - self.random()) / rate

    def randrange(self, k: int) -> int:
        """Uniform integer in [0, k)."""
        return min(int(self.random() * k), k - 1)

    def bernoulli(self, p: float) -> bool:
        return self.random() < p
