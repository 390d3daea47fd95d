"""Portable seeded randomness.

All shuffling and sampling goes through Philox-4x64 (a counter-based
generator) keyed by ``(seed, stream)`` and consumed only through
``random_raw``, so results do not depend on numpy's ``Generator`` method
implementations, which are not stream-stable across numpy releases.

Stream assignment:

* stratified split, class ``c``      -> stream ``c``
* random forest tree ``t``           -> stream ``2**32 + t``
* contact-sheet sample selection     -> stream ``2**33``
"""
import numpy as np

_U64 = 1 << 64

SPLIT_STREAM = 0
FOREST_STREAM = 1 << 32
CONTACT_SHEET_STREAM = 1 << 33


class PortableRng:
    """Unbiased integer sampling on top of raw Philox output."""

    def __init__(self, seed: int, stream: int = 0):
        if not (0 <= seed < _U64 and 0 <= stream < _U64):
            raise ValueError("seed and stream must fit in an unsigned 64-bit integer")
        self.seed = seed
        self.stream = stream
        self._bits = np.random.Philox(key=np.array([seed, stream], dtype=np.uint64))

    def raw(self, size: int) -> np.ndarray:
        return np.asarray(self._bits.random_raw(size), dtype=np.uint64).reshape(size)

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` by rejection sampling."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = _U64 - (_U64 % n)
        while True:
            r = int(self._bits.random_raw())
            if r < limit:
                return r % n

    def integers(self, n: int, size: int) -> np.ndarray:
        """``size`` independent uniform draws from ``[0, n)``."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = np.uint64(_U64 - (_U64 % n)) if _U64 % n else None
        out = np.empty(size, dtype=np.int64)
        filled = 0
        while filled < size:
            r = self.raw(size - filled)
            if limit is not None:
                r = r[r < limit]
            take = r[: size - filled]
            out[filled : filled + len(take)] = (take % np.uint64(n)).astype(np.int64)
            filled += len(take)
        return out

    def shuffle(self, items: list) -> list:
        """Return a Fisher-Yates shuffled copy of ``items``."""
        out = list(items)
        for i in range(len(out) - 1, 0, -1):
            j = self.below(i + 1)
            out[i], out[j] = out[j], out[i]
        return out

    def sample_without_replacement(self, n: int, k: int) -> np.ndarray:
        """First ``k`` positions of a partial Fisher-Yates shuffle of ``range(n)``."""
        if not 0 <= k <= n:
            raise ValueError("need 0 <= k <= n")
        swapped: dict[int, int] = {}
        out = np.empty(k, dtype=np.int64)
        for i in range(k):
            j = i + self.below(n - i)
            vi = swapped.get(i, i)
            vj = swapped.get(j, j)
            out[i] = vj
            swapped[j] = vi
        return out
