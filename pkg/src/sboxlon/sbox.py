"""Bijective S-boxes, Walsh spectra, nonlinearity and fitness.

An S-box on n bits is stored as a permutation of [0, 2^n - 1].  Its
cryptographic quality is read off the Walsh spectrum: for every nonzero
output mask v, row v holds the correlations of the component function
(the parity of ``v & F(x)``) with all linear functions ``w . x``.  The
nonlinearity is ``2^(n-1) - max|W| / 2`` over the whole spectrum.

Two fitness functions are provided for maximization: plain nonlinearity,
and nonlinearity plus ``1 / (number of components attaining the minimum)``.
The tie indicator lives in (0, 1] while nonlinearity moves in steps of two,
so the combined value still orders primarily by nonlinearity; values are
kept as exact rationals so comparisons never depend on rounding.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

import numpy as np

from . import _kernels

MIN_BITS = 3
MAX_BITS = 8

_SIGN_CACHE: dict[int, np.ndarray] = {}


def sign_matrix(n: int) -> np.ndarray:
    """(2^n, 2^n) int8 matrix of ``(-1)^popcount(a & b)``, cached per n."""
    H = _SIGN_CACHE.get(n)
    if H is None:
        size = 1 << n
        idx = np.arange(size, dtype=np.uint32)
        x = idx[:, None] & idx[None, :]
        x ^= x >> 4
        x ^= x >> 2
        x ^= x >> 1
        H = (1 - 2 * (x & 1).astype(np.int8)).astype(np.int8)
        H.setflags(write=False)
        _SIGN_CACHE[n] = H
    return H


@dataclass(frozen=True)
class SBox:
    """A bijective n-bit S-box held as an immutable permutation table."""

    n: int
    table: tuple[int, ...]

    def __post_init__(self):
        if not MIN_BITS <= self.n <= MAX_BITS:
            raise ValueError(f"bit width must be in [{MIN_BITS}, {MAX_BITS}], got {self.n}")
        size = 1 << self.n
        if len(self.table) != size:
            raise ValueError(f"table must have {size} entries, got {len(self.table)}")
        seen = [False] * size
        for value in self.table:
            if not 0 <= value < size or seen[value]:
                raise ValueError("table is not a permutation of [0, 2^n - 1]")
            seen[value] = True

    @classmethod
    def from_iterable(cls, values) -> "SBox":
        table = tuple(int(v) for v in values)
        n = max(len(table) - 1, 1).bit_length()
        if 1 << n != len(table):
            raise ValueError("table length must be a power of two")
        return cls(n=n, table=table)

    @property
    def size(self) -> int:
        return 1 << self.n

    def as_array(self) -> np.ndarray:
        return np.array(self.table, dtype=np.uint8)

    # Canonical encodings: one line of decimal integers, or the table packed
    # as 2^n bytes.  Both round-trip exactly.
    def to_text(self) -> str:
        return " ".join(str(v) for v in self.table)

    @classmethod
    def from_text(cls, text: str) -> "SBox":
        return cls.from_iterable(int(tok) for tok in text.split())

    def packed(self) -> bytes:
        return bytes(self.table)

    @classmethod
    def from_packed(cls, data: bytes) -> "SBox":
        return cls.from_iterable(data)


@dataclass(frozen=True)
class WalshSpectrum:
    """Spectrum of all 2^n - 1 components: row v - 1 is the transform of v.F."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        size = 1 << self.n
        if self.values.shape != (size - 1, size):
            raise ValueError(f"spectrum shape must be {(size - 1, size)}")
        self.values.setflags(write=False)

    def row(self, v: int) -> np.ndarray:
        if not 1 <= v < (1 << self.n):
            raise ValueError("component selector must be a nonzero n-bit mask")
        return self.values[v - 1]

    def max_abs(self) -> int:
        return int(np.max(np.abs(self.values)))

    def row_abs_max(self) -> np.ndarray:
        return np.max(np.abs(self.values), axis=1)


class FitnessKind(enum.Enum):
    NL = "NL"
    NL_F = "NL_f"

    @classmethod
    def parse(cls, text: str) -> "FitnessKind":
        for kind in cls:
            if kind.value == text:
                return kind
        raise ValueError(f"unknown fitness function {text!r} (expected NL or NL_f)")


@total_ordering
@dataclass(frozen=True)
class FitnessValue:
    """Exact fitness: nonlinearity, optionally plus the 1/c tie indicator."""

    kind: FitnessKind
    base_nonlinearity: int
    worst_count: int | None = None

    def __post_init__(self):
        if self.kind is FitnessKind.NL_F:
            if self.worst_count is None or self.worst_count < 1:
                raise ValueError("tie-indicator fitness requires a positive worst component count")

    @property
    def indicator(self) -> Fraction | None:
        if self.kind is FitnessKind.NL:
            return None
        return Fraction(1, self.worst_count)

    @property
    def value(self) -> Fraction:
        if self.kind is FitnessKind.NL:
            return Fraction(self.base_nonlinearity)
        return Fraction(self.base_nonlinearity) + Fraction(1, self.worst_count)

    def __eq__(self, other):
        if not isinstance(other, FitnessValue):
            return NotImplemented
        return self.value == other.value

    def __lt__(self, other):
        if not isinstance(other, FitnessValue):
            return NotImplemented
        return self.value < other.value

    def __hash__(self):
        return hash(self.value)


def component_truth_table(sbox: SBox, v: int) -> np.ndarray:
    """Truth table of the component v.F in natural input order, as 0/1 bytes."""
    if not 1 <= v < sbox.size:
        raise ValueError(f"component selector must be in [1, {sbox.size - 1}], got {v}")
    masked = np.bitwise_and(sbox.as_array(), np.uint8(v))
    bits = masked
    for shift in (4, 2, 1):
        bits = bits ^ (bits >> np.uint8(shift))
    return (bits & np.uint8(1)).astype(np.uint8)


def walsh_row(truth_table) -> np.ndarray:
    """Walsh transform of one Boolean truth table via the fast butterfly.

    Runs in O(2^n * n); the quadratic sum over all (mask, input) pairs is
    reserved for tests.
    """
    tt = np.asarray(truth_table)
    length = tt.shape[0]
    if length < 2 or length & (length - 1):
        raise ValueError("truth table length must be a power of two (>= 2)")
    signs = (1 - 2 * tt.astype(np.int32)).astype(np.int32)
    _kernels.fwht_inplace(signs)
    return signs


def full_spectrum(sbox: SBox) -> WalshSpectrum:
    """Walsh spectra of every component of the S-box."""
    size = sbox.size
    out = np.empty((size - 1, size), dtype=np.int32)
    _kernels.spectrum_fill(sbox.as_array(), sign_matrix(sbox.n), out)
    return WalshSpectrum(n=sbox.n, values=out)


def spectrum_update_swap(spectrum: WalshSpectrum, sbox_before: SBox, i: int, j: int) -> WalshSpectrum:
    """Exact spectrum after exchanging table[i] and table[j].

    Only the contributions of inputs i and j move, so the update touches
    each affected cell once (O(2^2n) total) instead of re-transforming.
    The caller guarantees ``spectrum`` matches ``sbox_before``.
    """
    size = sbox_before.size
    if not (0 <= i < size and 0 <= j < size):
        raise ValueError("swap positions out of range")
    if i == j:
        raise ValueError("swap positions must differ")
    values = spectrum.values.copy()
    rowmax = np.empty(size - 1, dtype=np.int32)
    _kernels.swap_update(values, rowmax, sbox_before.as_array(), sign_matrix(sbox_before.n), i, j)
    return WalshSpectrum(n=spectrum.n, values=values)


def component_nonlinearities(sbox: SBox) -> np.ndarray:
    """Nonlinearity of each component function, indexed by v - 1."""
    spectrum = full_spectrum(sbox)
    return (1 << (sbox.n - 1)) - spectrum.row_abs_max() // 2


def nonlinearity(sbox: SBox) -> int:
    """Minimum component nonlinearity, from the spectrum's largest magnitude."""
    return (1 << (sbox.n - 1)) - full_spectrum(sbox).max_abs() // 2


def scv_bound(n: int) -> int:
    """Upper bound on nonlinearity: odd n meets 2^(n-1) - 2^((n-1)/2); for
    even n the best known achievable value 2^(n-1) - 2^(n/2) is used."""
    if n < MIN_BITS:
        raise ValueError(f"bit width must be at least {MIN_BITS}")
    if n % 2:
        return (1 << (n - 1)) - (1 << ((n - 1) // 2))
    return (1 << (n - 1)) - (1 << (n // 2))


def fitness(sbox: SBox, kind: FitnessKind) -> FitnessValue:
    """Evaluate a fitness function on the S-box."""
    spectrum = full_spectrum(sbox)
    per_row_max = spectrum.row_abs_max()
    overall = int(per_row_max.max())
    base = (1 << (sbox.n - 1)) - overall // 2
    if kind is FitnessKind.NL:
        return FitnessValue(kind=kind, base_nonlinearity=base)
    worst = int(np.count_nonzero(per_row_max == overall))
    return FitnessValue(kind=kind, base_nonlinearity=base, worst_count=worst)


def fitness_from_stats(n: int, kind: FitnessKind, max_abs: int, worst_count: int) -> FitnessValue:
    """Fitness from cached spectrum statistics (max magnitude, multiplicity)."""
    base = (1 << (n - 1)) - max_abs // 2
    if kind is FitnessKind.NL:
        return FitnessValue(kind=kind, base_nonlinearity=base)
    return FitnessValue(kind=kind, base_nonlinearity=base, worst_count=worst_count)
