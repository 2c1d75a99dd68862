"""Move sets over permutations and the generator of initial solutions.

Both operators pick two positions i < j of the table: ``swap`` exchanges
the two entries, ``invert`` reverses the whole segment between them.
Either way the neighbourhood of a solution has ``k * (k - 1) / 2`` members
for a table of length k, and the enumeration order (ascending i, then
ascending j) is the tie-breaking order of the hill climber, so it must
never change.

Initial solutions for an experiment are consecutive permutations in
lexicographic order, starting from a seeded random permutation; purely
random starts would almost never produce connected optima networks.
"""

from __future__ import annotations

import enum
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

from .rng import shuffled_range
from .sbox import SBox


class MoveKind(enum.Enum):
    SWAP = "swap"
    INVERT = "invert"

    @classmethod
    def parse(cls, text: str) -> "MoveKind":
        for kind in cls:
            if kind.value == text:
                return kind
        raise ValueError(f"unknown operator {text!r} (expected swap or invert)")


@dataclass(frozen=True)
class Move:
    """One neighbourhood move; positions are 0-based with i < j."""

    kind: MoveKind
    i: int
    j: int

    def __post_init__(self):
        if self.i < 0 or self.j <= self.i:
            raise ValueError(f"move positions must satisfy 0 <= i < j, got ({self.i}, {self.j})")


def neighbourhood_size(n: int) -> int:
    """Number of moves for either operator on a 2^n-entry table."""
    size = 1 << n
    return size * (size - 1) // 2


def apply_move(sbox: SBox, move: Move) -> SBox:
    """Apply a move; the result is again a permutation."""
    if move.j >= sbox.size:
        raise ValueError(f"move position {move.j} out of range for table of {sbox.size}")
    table = list(sbox.table)
    if move.kind is MoveKind.SWAP:
        table[move.i], table[move.j] = table[move.j], table[move.i]
    else:
        table[move.i : move.j + 1] = table[move.i : move.j + 1][::-1]
    return SBox(n=sbox.n, table=tuple(table))


def enumerate_moves(n: int, kind: MoveKind) -> list[Move]:
    """All moves in the canonical tie-breaking order: ascending i, then j."""
    if n < 2:
        raise ValueError("need at least two bits to enumerate moves")
    size = 1 << n
    return [Move(kind, i, j) for i in range(size - 1) for j in range(i + 1, size)]


def lex_successor(perm: Sequence[int]) -> tuple[int, ...]:
    """Next permutation in lexicographic order; the last one wraps to the first.

    Entries are compared as plain integers (the classic pivot/successor/
    reverse-suffix step).
    """
    items = list(perm)
    k = len(items) - 2
    while k >= 0 and items[k] >= items[k + 1]:
        k -= 1
    if k < 0:
        return tuple(sorted(items))
    pivot = items[k]
    m = len(items) - 1
    while items[m] <= pivot:
        m -= 1
    items[k], items[m] = items[m], items[k]
    items[k + 1 :] = reversed(items[k + 1 :])
    return tuple(items)


def random_permutation(n: int, seed: int) -> SBox:
    """Uniform random S-box from a SplitMix64-driven Fisher-Yates shuffle.

    Identical (n, seed) gives an identical table on every platform.
    """
    return SBox(n=n, table=tuple(shuffled_range(1 << n, seed)))


def initial_solutions(n: int, seed: int, start: SBox | None = None) -> Iterator[SBox]:
    """Endless stream of starts: a seeded random permutation, then its
    lexicographic successors (wrapping around the full cycle)."""
    current = start if start is not None else random_permutation(n, seed)
    while True:
        yield current
        current = SBox(n=n, table=lex_successor(current.table))
