"""Greedy deterministic hill climbing with trajectory recording.

Each round scans the full neighbourhood of the current solution, keeps the
best strictly improving neighbour (first in enumeration order among equals)
and stops when no neighbour strictly improves.  With a fixed start, fitness
and operator the accepted chain is therefore a pure function, which is what
makes basins of attraction well defined.

The scan works on an incrementally maintained Walsh spectrum: a swap
candidate costs one sparse delta per affected row instead of a full
transform, and segment reversals rebuild rows worst-first with early
rejection.  The scan may be partitioned across threads; partial results
carry the chunk's best move index, and the reduction picks the best fitness
with the smallest index, so the chosen move never depends on the number of
workers.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .neighbourhood import MoveKind, neighbourhood_size
from .sbox import FitnessKind, FitnessValue, SBox, fitness_from_stats, sign_matrix


@dataclass(frozen=True)
class Trajectory:
    """Accepted-solution chain of one climb, the start first.

    ``merged_into`` is the packed key of an already archived solution the
    climb ran into; when it is None the last chain element is a fresh local
    optimum.
    """

    start: SBox
    chain: tuple[SBox, ...]
    fitness_kind: FitnessKind
    operator: MoveKind
    merged_into: bytes | None = None

    @property
    def terminal(self) -> SBox:
        return self.chain[-1]

    @property
    def is_new_optimum(self) -> bool:
        return self.merged_into is None

    def packed(self) -> bytes:
        """Canonical byte form, for replay and determinism checks."""
        head = b"%d:%s:%s:" % (self.start.n, self.fitness_kind.value.encode(), self.operator.value.encode())
        body = b"".join(s.packed() for s in self.chain)
        tail = self.merged_into if self.merged_into is not None else b""
        return head + body + b"|" + tail


class SolutionArchive:
    """Map from packed solution keys to basin ordinals.

    Reads may happen concurrently with climbs; inserts go through the single
    accumulator thread.  A lookup miss returns None.
    """

    def __init__(self):
        self._index: dict[bytes, int] = {}

    def __len__(self) -> int:
        return len(self._index)

    def __contains__(self, key: bytes) -> bool:
        return key in self._index

    def get(self, key: bytes) -> int | None:
        return self._index.get(key)

    def lookup(self, key: bytes) -> int:
        ordinal = self._index.get(key)
        if ordinal is None:
            raise KeyError("solution key missing from archive: corrupted persistence")
        return ordinal

    def insert(self, key: bytes, ordinal: int) -> None:
        self._index[key] = ordinal

    def items(self):
        return self._index.items()


class _SpectrumState:
    """Mutable working copy of a solution and its spectrum during one climb."""

    def __init__(self, sbox: SBox):
        self.n = sbox.n
        self.size = sbox.size
        self.table = sbox.as_array()
        self.H = sign_matrix(sbox.n)
        self.W = np.empty((self.size - 1, self.size), dtype=np.int32)
        _kernels.spectrum_fill(self.table, self.H, self.W)
        self.rowmax = np.empty(self.size - 1, dtype=np.int32)
        _kernels.row_abs_max(self.W, self.rowmax)
        g, c = _kernels.global_max_count(self.rowmax)
        self.g = int(g)
        self.c = int(c)

    def sbox(self) -> SBox:
        return SBox(n=self.n, table=tuple(int(v) for v in self.table))

    def fitness(self, kind: FitnessKind) -> FitnessValue:
        return fitness_from_stats(self.n, kind, self.g, self.c)

    def scan(
        self,
        operator: MoveKind,
        kind: FitnessKind,
        pool: ThreadPoolExecutor | None,
        workers: int = 1,
    ) -> tuple[int, int, int, int] | None:
        """Best strictly improving move, or None at a local optimum."""
        use_count = kind is FitnessKind.NL_F
        total = neighbourhood_size(self.n)
        if operator is MoveKind.SWAP:
            run = lambda lo, hi: _kernels.swap_scan(
                self.W, self.rowmax, self.table, self.H, self.g, self.c, use_count, lo, hi
            )
        else:
            run = lambda lo, hi: _kernels.invert_scan(
                self.rowmax, self.table, self.H, self.g, self.c, use_count, lo, hi
            )
        if pool is None or workers <= 1:
            besti, bestj, g, c = run(0, total)
        else:
            bounds = np.linspace(0, total, workers + 1).astype(int)
            futures = [pool.submit(run, int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:])]
            besti = bestj = -1
            g, c = self.g, self.c
            # Chunks cover ascending enumeration slots, so merging in chunk
            # order and replacing only on strict improvement keeps the first
            # of equally good moves, exactly like the sequential scan.
            for future in futures:
                fi, fj, fg, fc = future.result()
                if fi < 0:
                    continue
                if (fg < g) or (use_count and fg == g and fc < c):
                    besti, bestj, g, c = fi, fj, fg, fc
        if besti < 0:
            return None
        return besti, bestj, int(g), int(c)

    def apply(self, operator: MoveKind, i: int, j: int) -> None:
        if operator is MoveKind.SWAP:
            _kernels.swap_update(self.W, self.rowmax, self.table, self.H, i, j)
            self.table[i], self.table[j] = self.table[j], self.table[i]
        else:
            self.table[i : j + 1] = self.table[i : j + 1][::-1]
            _kernels.spectrum_fill(self.table, self.H, self.W)
            _kernels.row_abs_max(self.W, self.rowmax)
        g, c = _kernels.global_max_count(self.rowmax)
        self.g = int(g)
        self.c = int(c)


def _climb(
    start: SBox,
    fitness_kind: FitnessKind,
    operator: MoveKind,
    archive: SolutionArchive | None,
    workers: int,
) -> Trajectory:
    if archive is not None:
        hit = archive.get(start.packed())
        if hit is not None:
            return Trajectory(start, (start,), fitness_kind, operator, merged_into=start.packed())
    state = _SpectrumState(start)
    chain = [start]
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while True:
            found = state.scan(operator, fitness_kind, pool, workers)
            if found is None:
                break
            i, j, _, _ = found
            state.apply(operator, i, j)
            accepted = state.sbox()
            chain.append(accepted)
            if archive is not None and archive.get(accepted.packed()) is not None:
                return Trajectory(start, tuple(chain), fitness_kind, operator, merged_into=accepted.packed())
    finally:
        if pool is not None:
            pool.shutdown()
    return Trajectory(start, tuple(chain), fitness_kind, operator, merged_into=None)


def hill_climb(start: SBox, fitness_kind: FitnessKind, operator: MoveKind, workers: int = 1) -> Trajectory:
    """Run the greedy climber to a local optimum.

    Deterministic: the same start, fitness and operator give a byte-identical
    trajectory for any worker count.
    """
    return _climb(start, fitness_kind, operator, archive=None, workers=workers)


def hill_climb_memoized(
    start: SBox,
    archive: SolutionArchive,
    fitness_kind: FitnessKind,
    operator: MoveKind,
    workers: int = 1,
) -> Trajectory:
    """Climb, stopping early when an already archived solution is accepted.

    The climber is deterministic, so the truncated chain belongs to the same
    basin the archived solution was assigned to; the caller merges it there.
    """
    return _climb(start, fitness_kind, operator, archive=archive, workers=workers)


def is_local_optimum(sbox: SBox, fitness_kind: FitnessKind, operator: MoveKind) -> bool:
    """Full-neighbourhood check that no move strictly improves the fitness."""
    state = _SpectrumState(sbox)
    return state.scan(operator, fitness_kind, None) is None
