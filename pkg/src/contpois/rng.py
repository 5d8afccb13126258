"""Seedable, splittable uniform and gamma variate streams."""

from __future__ import annotations

import numpy as np

from .errors import DomainError

GENERATOR_NAME = "numpy.random.Philox keyed by numpy.random.SeedSequence(seed, spawn_key=(stream_id, ...))"
GAMMA_METHOD = "numpy Generator.standard_gamma: Marsaglia-Tsang for shape >= 1, Ahrens-Dieter GS rejection for shape < 1"

_U64 = 2**64


def _check_u64(name, value):
    if isinstance(value, bool) or int(value) != value or not 0 <= int(value) < _U64:
        raise DomainError(f"{name} must be an unsigned 64-bit integer, got {value!r}")
    return int(value)


class RandomStream:
    """A deterministic variate source identified by ``(seed, stream_id)``.

    Two streams built from the same identifiers produce the same sequence;
    different ``stream_id`` values (and different :meth:`substream` indices)
    are keyed independently.  A stream carries mutable generator state and
    must be used from a single execution context at a time.
    """

    def __init__(self, seed: int, stream_id: int = 0, *, path: tuple[int, ...] = ()):
        self.seed = _check_u64("seed", seed)
        self.stream_id = _check_u64("stream_id", stream_id)
        self.path = tuple(_check_u64("substream index", i) for i in path)
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id, *self.path))
        self._gen = np.random.Generator(np.random.Philox(seq))

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, stream_id={self.stream_id}, path={self.path})"

    def substream(self, index: int) -> "RandomStream":
        """Fresh stream keyed by this stream's identity plus ``index``."""
        return RandomStream(self.seed, self.stream_id, path=(*self.path, index))

    def uniform(self, size=None):
        """Uniform variates on [0, 1)."""
        return self._gen.random(size)

    def gamma(self, shape: float, rate: float = 1.0, size=None):
        """Gamma(shape, rate) variates (mean shape / rate)."""
        if not (shape > 0 and rate > 0):
            raise DomainError("gamma variates need shape > 0 and rate > 0")
        return self._gen.standard_gamma(shape, size) / rate
