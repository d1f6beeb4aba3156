"""Seeded, bit-accounted randomness.

Every random decision made by the sampler flows through a :class:`BitSource`,
so the number of raw uniform bits a run consumes can be reported exactly.
Probabilities are rational and realized by comparing a uniform integer with
an integer threshold; no floating point touches the sampling path.
"""

from __future__ import annotations

import random
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")

SEED_MASK = (1 << 64) - 1


class BitSource:
    """Deterministic stream of uniform bits with an exact consumption counter.

    Backed by the Mersenne Twister from :mod:`random`; cryptographic quality
    is not a goal, reproducibility is.
    """

    def __init__(self, seed: int = 0):
        if seed < 0 or seed > SEED_MASK:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {seed}")
        self.seed = seed
        self._gen = random.Random(seed)
        self.bits_consumed = 0

    def __repr__(self):
        return f"BitSource(seed={self.seed}, bits_consumed={self.bits_consumed})"

    def bits(self, count: int) -> int:
        """Return ``count`` fresh uniform bits packed into an int."""
        if count <= 0:
            return 0
        self.bits_consumed += count
        return self._gen.getrandbits(count)

    def uniform_int(self, m: int) -> int:
        """Uniform integer in ``[0, m)`` by rejection on ``ceil(log2 m)``-bit words."""
        if m < 1:
            raise ValueError(f"uniform_int needs m >= 1, got {m}")
        if m == 1:
            return 0
        width = (m - 1).bit_length()
        while True:
            r = self.bits(width)
            if r < m:
                return r

    def bernoulli_rational(self, num: int, den: int) -> bool:
        """True with probability exactly ``num / den``."""
        if den < 1 or num < 0 or num > den:
            raise ValueError(f"need 0 <= num <= den and den >= 1, got {num}/{den}")
        if num == 0:
            return False
        if num == den:
            return True
        return self.uniform_int(den) < num

    def choose_weighted(self, weights: Sequence[int]) -> int:
        """Index ``i`` with probability ``weights[i] / sum(weights)`` (nonnegative ints)."""
        total = sum(weights)
        if total <= 0:
            raise ValueError("weights must have a positive sum")
        r = self.uniform_int(total)
        for i, wt in enumerate(weights):
            if r < wt:
                return i
            r -= wt
        raise AssertionError("unreachable")

    def shuffled_prefix_search(
        self, items: Sequence[T], predicate: Callable[[T], bool]
    ) -> tuple[list[T], T | None]:
        """Visit ``items`` in uniformly random order until ``predicate`` holds.

        Incremental Fisher-Yates: only the visited prefix is shuffled, so the
        cost is proportional to the number of items looked at. Returns the
        items visited before the match and the match itself (``None`` when
        nothing matched, in which case every item was visited).
        """
        pool = list(items)
        n = len(pool)
        for i in range(n):
            j = i + self.uniform_int(n - i)
            pool[i], pool[j] = pool[j], pool[i]
            if predicate(pool[i]):
                return pool[:i], pool[i]
        return pool, None
