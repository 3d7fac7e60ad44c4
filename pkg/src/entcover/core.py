"""Ground sets, polymatroid oracles, covers, and the entropy objective.

Conventions used throughout the package:

* Elements of a ground set are the integers ``0 .. m-1``.
* Subsets are plain Python ints used as bitmasks (bit ``j`` set means
  element ``j`` is in the subset), which caps ``m`` at 63.
* A polymatroid is a function ``f`` on subsets that is normalized
  (``f(empty) == 0``), monotone and submodular, with nonnegative
  integer values.
* A cover of ``f`` is a nonnegative integer vector ``x`` of length
  ``m`` with ``sum(x) == f(U)`` and ``sum(x[j] for j in S) <= f(S)``
  for every subset ``S``.
* Entropy is measured in bits (base-2 logarithm), with the convention
  ``0 * log(0) == 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Tuple

LOG2E = math.log2(math.e)


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def iter_bits(mask: int):
    """Yield the element indices present in a subset bitmask."""
    j = 0
    while mask:
        if mask & 1:
            yield j
        mask >>= 1
        j += 1


@dataclass(frozen=True)
class GroundSet:
    """The set U of elements (players), identified by indices 0..m-1."""

    m: int
    labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self) -> None:
        if not 1 <= self.m <= 63:
            raise ValueError(f"ground set size must be in 1..63, got {self.m}")
        if self.labels is not None and len(self.labels) != self.m:
            raise ValueError("labels length must equal m")

    @property
    def universe(self) -> int:
        """Bitmask of the full ground set."""
        return (1 << self.m) - 1

    def __iter__(self):
        return iter(range(self.m))


class PolymatroidOracle:
    """Wraps a pure subset function f with memoization.

    The callable must be deterministic and side-effect-free; values are
    cached, so impure functions would give inconsistent reads.  The
    polymatroid axioms are NOT verified here — use
    :func:`check_polymatroid` for that (it is exponential in m).
    """

    def __init__(self, ground: GroundSet, fn: Callable[[int], int]) -> None:
        self.ground = ground
        self._fn = fn
        self._cache: dict[int, int] = {}

    @property
    def m(self) -> int:
        return self.ground.m

    def eval(self, mask: int) -> int:
        if mask >> self.ground.m:
            raise ValueError("subset mask outside the ground set")
        v = self._cache.get(mask)
        if v is None:
            v = self._fn(mask)
            self._cache[mask] = v
        return v

    def total(self) -> int:
        """f(U) — the amount every cover must allocate."""
        return self.eval(self.ground.universe)


@dataclass(frozen=True)
class Cover:
    """An integer allocation vector x with sum(x) = f(U)."""

    x: Tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.x)

    def __len__(self) -> int:
        return len(self.x)


@dataclass(frozen=True)
class Distribution:
    """Normalized allocation p = x / total; probabilities as exact rationals."""

    p: Tuple[Fraction, ...]

    @classmethod
    def from_cover(cls, cover: Cover) -> "Distribution":
        n = cover.total
        if n <= 0:
            raise ValueError("degenerate cover")
        return cls(tuple(Fraction(v, n) for v in cover.x))

    def as_floats(self) -> Tuple[float, ...]:
        return tuple(float(q) for q in self.p)


def entropy(cover: Cover) -> float:
    """Shannon entropy of the normalized cover, in bits.

    Zero entries contribute nothing (0*log 0 = 0).  Raises on an empty
    allocation, which has no associated distribution.
    """
    n = cover.total
    if n <= 0:
        raise ValueError("degenerate cover")
    # fsum: the result is independent of term order, so permuting the
    # cover permutes nothing
    return -math.fsum((v / n) * math.log2(v / n) for v in cover.x if v)


def weight_product(x: Sequence[int]) -> int:
    """The exact integer prod_j x_j^{x_j} (0^0 = 1).

    Entropy of a cover with total n equals log2(n) - log2(weight)/n, a
    strictly decreasing function of this weight; integer weights give
    exact entropy comparisons between covers with equal totals.
    """
    w = 1
    for v in x:
        if v:
            w *= v ** v
    return w


def entropy_from_weight(weight: int, n: int) -> float:
    if n <= 0:
        raise ValueError("degenerate cover")
    # log2 of a big int, without overflowing float conversion; clamp the
    # rounding noise of the subtraction (entropy is nonnegative)
    return max(0.0, math.log2(n) - _log2_bigint(weight) / n)


def _log2_bigint(w: int) -> float:
    if w <= 0:
        raise ValueError("weight must be positive")
    bits = w.bit_length()
    if bits <= 900:
        return math.log2(w)
    shift = bits - 900
    return math.log2(w >> shift) + shift


def validate_cover(oracle: PolymatroidOracle, cover: Cover) -> Tuple[bool, Optional[int]]:
    """Exhaustively check the cover constraints against the oracle.

    Returns ``(True, None)`` when valid, else ``(False, witness)`` where
    witness is the first violated subset in ascending bitmask order
    (the full universe for a totality violation, a singleton for a
    negative entry).  Cost is Theta(2^m), hence the size guard.
    """
    m = oracle.m
    if len(cover.x) != m:
        raise ValueError("cover length does not match ground set")
    if m > 24:
        raise ValueError("exhaustive validation infeasible")
    for j, v in enumerate(cover.x):
        if v < 0:
            return False, 1 << j
    if cover.total != oracle.total():
        return False, oracle.ground.universe
    # subset sums by DP over masks: sum[S] = sum[S minus lowest bit] + x[low]
    sums = [0] * (1 << m)
    for mask in range(1, 1 << m):
        low = mask & -mask
        sums[mask] = sums[mask ^ low] + cover.x[low.bit_length() - 1]
        if sums[mask] > oracle.eval(mask):
            return False, mask
    return True, None


def check_polymatroid(oracle: PolymatroidOracle) -> Tuple[bool, Optional[Tuple[int, int]]]:
    """Exhaustively verify normalization, monotonicity and submodularity.

    Uses the local characterizations (equivalent to the global ones):

    * monotone   iff f(S) <= f(S + i)           for all S, i not in S
    * submodular iff f(S+i) + f(S+j) >= f(S+i+j) + f(S)   for all S, i<j not in S

    Returns ``(True, None)`` or ``(False, (S, T))`` where (S, T) is a
    concrete counterexample pair: f(S) + f(T) < f(S|T) + f(S&T) for a
    submodularity failure, S ⊆ T with f(S) > f(T) for a monotonicity
    failure, (0, 0) for f(empty) != 0 or a non-integer/negative value.
    """
    m = oracle.m
    if m > 16:
        raise ValueError("ground set too large for exhaustive polymatroid check")
    if oracle.eval(0) != 0:
        return False, (0, 0)
    full = 1 << m
    vals = [0] * full
    for mask in range(full):
        v = oracle.eval(mask)
        if not isinstance(v, int) or v < 0:
            return False, (mask, mask)
        vals[mask] = v
    for mask in range(full):
        outside = [j for j in range(m) if not (mask >> j) & 1]
        for a in range(len(outside)):
            i = outside[a]
            if vals[mask] > vals[mask | (1 << i)]:
                return False, (mask, mask | (1 << i))
            for b in range(a + 1, len(outside)):
                j = outside[b]
                si, sj = mask | (1 << i), mask | (1 << j)
                if vals[si] + vals[sj] < vals[si | sj] + vals[mask]:
                    return False, (si, sj)
    return True, None
