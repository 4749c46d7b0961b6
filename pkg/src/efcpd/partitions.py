"""Set partitions of [n] = {1, ..., n} and the moves between them.

A partition is stored with its blocks ordered by least element, which gives
every state of a restricted chain a unique key.  Block indices in the
function signatures below are 0-based positions in that order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

ENUMERATION_CAP = 10

PartitionShape = tuple  # decreasing tuple of positive ints


@dataclass(frozen=True, order=True)
class SetPartition:
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen = [x for b in self.blocks for x in b]
        if any(len(b) == 0 for b in self.blocks):
            raise ValueError("empty block")
        if sorted(seen) != list(range(1, len(seen) + 1)):
            raise ValueError(f"blocks do not partition [n]: {self.blocks}")
        for b in self.blocks:
            if list(b) != sorted(b):
                raise ValueError(f"block {b} is not sorted")
        mins = [b[0] for b in self.blocks]
        if mins != sorted(mins):
            raise ValueError("blocks are not ordered by least element")

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]]) -> "SetPartition":
        """Canonicalize arbitrary blocks (drops empties, sorts)."""
        cleaned = [tuple(sorted(b)) for b in blocks]
        cleaned = [b for b in cleaned if b]
        cleaned.sort(key=lambda b: b[0])
        return cls(tuple(cleaned))

    @classmethod
    def from_rgs(cls, labels: Sequence[int]) -> "SetPartition":
        """Build from a restricted growth string (label of element i is its block)."""
        blocks: list[list[int]] = []
        for element, label in enumerate(labels, start=1):
            if label == len(blocks):
                blocks.append([element])
            elif 0 <= label < len(blocks):
                blocks[label].append(element)
            else:
                raise ValueError(f"not a restricted growth string: {labels}")
        return cls(tuple(tuple(b) for b in blocks))

    @classmethod
    def parse(cls, text: str) -> "SetPartition":
        """Parse the textual form ``"1 3|2"``."""
        blocks = [[int(tok) for tok in part.split()] for part in text.split("|")]
        return cls.from_blocks(blocks)

    @classmethod
    def singletons(cls, n: int) -> "SetPartition":
        return cls(tuple((i,) for i in range(1, n + 1)))

    @classmethod
    def single_block(cls, n: int) -> "SetPartition":
        return cls((tuple(range(1, n + 1)),))

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def __str__(self) -> str:
        return "|".join(" ".join(str(x) for x in b) for b in self.blocks)

    def rgs(self) -> tuple[int, ...]:
        labels = [0] * self.n
        for j, b in enumerate(self.blocks):
            for x in b:
                labels[x - 1] = j
        return tuple(labels)


def bell_number(n: int) -> int:
    """Bell numbers via the Bell triangle."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[0]


def _rgs_iter(n: int) -> Iterator[tuple[int, ...]]:
    labels = [0] * n

    def rec(i: int, top: int):
        if i == n:
            yield tuple(labels)
            return
        for lab in range(top + 2):
            labels[i] = lab
            yield from rec(i + 1, max(top, lab))

    if n == 0:
        return
    yield from rec(1, 0)


@lru_cache(maxsize=None)
def _enumerate_cached(n: int) -> tuple[SetPartition, ...]:
    return tuple(SetPartition.from_rgs(r) for r in _rgs_iter(n))


def enumerate_set_partitions(n: int, cap: int = ENUMERATION_CAP) -> tuple[SetPartition, ...]:
    """All partitions of [n] in lexicographic restricted-growth order."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n > cap:
        raise ValueError(f"n={n} exceeds the enumeration cap {cap} (Bell({n}) states)")
    return _enumerate_cached(n)


def restrict(pi: SetPartition, m: int) -> SetPartition:
    if not 1 <= m <= pi.n:
        raise ValueError(f"restriction size {m} outside [1, {pi.n}]")
    return SetPartition.from_blocks([x for x in b if x <= m] for b in pi.blocks)


def shape(pi: SetPartition) -> PartitionShape:
    return as_shape(len(b) for b in pi.blocks)


def as_shape(sizes: Iterable[int]) -> PartitionShape:
    out = tuple(sorted((int(s) for s in sizes), reverse=True))
    if not out or out[-1] < 1:
        raise ValueError(f"a shape needs at least one positive part: {out}")
    return out


def merge_blocks(gamma: SetPartition, indices: Iterable[int]) -> SetPartition:
    idx = set(indices)
    if len(idx) < 2:
        raise ValueError("a coagulation merges at least two blocks")
    if not all(0 <= i < len(gamma) for i in idx):
        raise IndexError(f"block index out of range in {sorted(idx)}")
    merged = [x for i in idx for x in gamma.blocks[i]]
    rest = [b for i, b in enumerate(gamma.blocks) if i not in idx]
    return SetPartition.from_blocks(rest + [merged])


def split_block(gamma: SetPartition, i: int, eta: SetPartition) -> SetPartition:
    block = gamma.blocks[i]
    if len(block) < 2:
        raise ValueError("cannot split a singleton block")
    if eta.n != len(block):
        raise ValueError(f"eta partitions [{eta.n}] but block {i} has {len(block)} elements")
    if len(eta) < 2:
        raise ValueError("eta must be a non-trivial partition")
    pieces = [[block[j - 1] for j in c] for c in eta.blocks]
    rest = [b for j, b in enumerate(gamma.blocks) if j != i]
    return SetPartition.from_blocks(rest + pieces)


def coag_transitions(gamma: SetPartition) -> list[tuple[SetPartition, frozenset[int]]]:
    out = []
    ell = len(gamma)
    for k in range(2, ell + 1):
        for subset in itertools.combinations(range(ell), k):
            out.append((merge_blocks(gamma, subset), frozenset(subset)))
    return out


def split_transitions(gamma: SetPartition, cap: int = ENUMERATION_CAP):
    """Every (target, block index, eta) reachable by splitting one block."""
    out = []
    for i, b in enumerate(gamma.blocks):
        if len(b) < 2:
            continue
        for eta in enumerate_set_partitions(len(b), cap):
            if len(eta) == 1:
                continue
            out.append((split_block(gamma, i, eta), i, eta))
    return out
