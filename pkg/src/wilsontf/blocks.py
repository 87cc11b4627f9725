"""Greedy partition of a divergent non-negative series into consecutive
blocks with sums strictly inside (epsilon/3, epsilon).

The scan starts at the first index whose term drops below epsilon/3 and
cuts each block at the least index pushing its sum past epsilon/3; since
every appended term is below epsilon/3 the block sum stays below
2*epsilon/3 < epsilon.  The greedy form streams, needs no a-priori
knowledge of partial-sum levels, and keeps zero terms (they never affect
the bounds).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

__all__ = [
    "BlockPartition",
    "partition_series",
    "verify_partition",
    "harmonic_tail",
    "geometric",
    "random_divergent",
]


@dataclass(frozen=True)
class BlockPartition:
    """Cut indices m_0 < m_1 < ... < m_L; block l covers [m_{l-1}, m_l)."""

    cuts: tuple
    block_sums: tuple
    epsilon: float = 3.0

    def __post_init__(self):
        cuts = tuple(int(m) for m in self.cuts)
        if not all(b < a for b, a in zip(cuts, cuts[1:])):
            raise ValueError("cut indices must be strictly increasing")
        object.__setattr__(self, "cuts", cuts)
        object.__setattr__(self, "block_sums", tuple(float(v) for v in self.block_sums))
        if len(self.block_sums) != max(len(cuts) - 1, 0):
            raise ValueError("need one block sum per consecutive cut pair")

    @property
    def n_blocks(self) -> int:
        return len(self.block_sums)


def partition_series(
    a: Iterable[float], blocks_wanted: int, epsilon: float = 3.0
) -> BlockPartition:
    """Greedy minimal-cut partition with block sums in (eps/3, eps).

    Raises when the source is exhausted before producing the requested
    blocks (a summable or truncated series) or when a term >= eps/3
    appears after the scan start (the sequence is not small at this
    scale; the offending index is reported).
    """
    if blocks_wanted < 1:
        raise ValueError("blocks_wanted must be >= 1")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    threshold = epsilon / 3.0
    it: Iterator[float] = iter(a)
    start = None
    index = -1
    for index, term in enumerate(it):
        if term < 0:
            raise ValueError(f"negative term at index {index}")
        if term < threshold:
            start = index
            break
    if start is None:
        raise ValueError("source exhausted before any term fell below eps/3")

    cuts = [start]
    sums = []
    acc = float(term)
    pos = start
    while len(sums) < blocks_wanted:
        if acc > threshold:
            # minimal cut: the term just appended pushed past eps/3
            cuts.append(pos + 1)
            sums.append(acc)
            acc = 0.0
            if len(sums) == blocks_wanted:
                break
        try:
            pos, term = pos + 1, next(it)
        except StopIteration:
            raise ValueError(
                f"source exhausted after {len(sums)} of {blocks_wanted} blocks"
            ) from None
        if term < 0:
            raise ValueError(f"negative term at index {pos}")
        if term >= threshold:
            raise ValueError(
                f"term at index {pos} is >= eps/3 after the scan start"
            )
        acc += float(term)
    return BlockPartition(cuts=tuple(cuts), block_sums=tuple(sums), epsilon=epsilon)


def verify_partition(prefix, p: BlockPartition) -> bool:
    """Re-sum every block from a series prefix and check strict bounds."""
    if p.n_blocks == 0:
        return True
    arr = np.asarray(list(prefix), dtype=float)
    if p.cuts[-1] > len(arr):
        raise ValueError("prefix does not cover all cuts")
    lo, hi = p.epsilon / 3.0, p.epsilon
    for left, right, recorded in zip(p.cuts, p.cuts[1:], p.block_sums):
        total = float(arr[left:right].sum())
        if not (lo < total < hi):
            return False
        if abs(total - recorded) > 1e-9 * max(1.0, abs(recorded)):
            return False
    return True


def harmonic_tail(offset: int = 2) -> Iterator[float]:
    """a_n = 1/(n + offset): zero-convergent and divergent."""
    n = 0
    while True:
        yield 1.0 / (n + offset)
        n += 1


def geometric(c: float = 1.0, ratio: float = 0.5) -> Iterator[float]:
    """Summable control series c * ratio^n."""
    term = c
    while True:
        yield term
        term *= ratio


def random_divergent(seed: int, low: float = 0.5, high: float = 1.5) -> Iterator[float]:
    """a_n = u_n / (n+1) with u_n uniform in [low, high): divergent."""
    rng = np.random.default_rng(seed)
    n = 0
    while True:
        yield float(rng.uniform(low, high)) / (n + 1)
        n += 1
