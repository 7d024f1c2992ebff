"""Bit-packed binary sequences and reference LABS objective evaluation.

A sequence of length ``n`` is stored as ``ceil(n / 8)`` bytes, position 1 in
the most significant bit of the first byte. Bit 0 encodes spin +1 and bit 1
encodes spin -1. Padding bits past ``n`` are always zero, so equal sequences
have equal byte strings and ``bytes`` ordering is lexicographic bit order.
"""

from __future__ import annotations

import string
from dataclasses import dataclass

import numpy as np

_HEX = set(string.hexdigits)


@dataclass(frozen=True)
class Sequence:
    n: int
    bits: bytes

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"sequence length must be >= 1, got {self.n}")
        if len(self.bits) != (self.n + 7) // 8:
            raise ValueError(f"expected {(self.n + 7) // 8} bytes for n={self.n}, got {len(self.bits)}")
        pad = 8 * len(self.bits) - self.n
        if pad and self.bits[-1] & ((1 << pad) - 1):
            raise ValueError("padding bits beyond n must be zero")

    @classmethod
    def from_spins(cls, spins) -> Sequence:
        s = np.asarray(spins)
        if s.ndim != 1 or s.size == 0:
            raise ValueError("spins must be a non-empty 1-D array")
        if not np.all((s == 1) | (s == -1)):
            raise ValueError("spins must be +1 or -1")
        return cls(int(s.size), np.packbits(s < 0).tobytes())

    @classmethod
    def from_bits(cls, bits) -> Sequence:
        """Build from a 0/1 array (0 -> +1, 1 -> -1)."""
        b = np.asarray(bits, dtype=np.uint8)
        if b.ndim != 1 or b.size == 0 or b.max() > 1:
            raise ValueError("bits must be a non-empty 1-D 0/1 array")
        return cls(int(b.size), np.packbits(b).tobytes())

    def bit_array(self) -> np.ndarray:
        return np.unpackbits(np.frombuffer(self.bits, dtype=np.uint8), count=self.n)

    @property
    def spins(self) -> np.ndarray:
        """Spins as a fresh int8 array (0-indexed)."""
        return (1 - 2 * self.bit_array().astype(np.int8)).astype(np.int8)

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> int:
        """Spin at 1-indexed position ``i``."""
        if not 1 <= i <= self.n:
            raise IndexError(f"position {i} outside 1..{self.n}")
        byte, off = divmod(i - 1, 8)
        return -1 if (self.bits[byte] >> (7 - off)) & 1 else 1

    def __str__(self) -> str:
        return "".join("+" if x > 0 else "-" for x in self.spins)


def random_sequence(n: int, rng: np.random.Generator) -> Sequence:
    return Sequence.from_bits(rng.integers(0, 2, size=n, dtype=np.uint8))


def flip(s: Sequence, j: int) -> Sequence:
    """Return ``s`` with the spin at 1-indexed position ``j`` negated."""
    if not 1 <= j <= s.n:
        raise IndexError(f"position {j} outside 1..{s.n}")
    b = bytearray(s.bits)
    byte, off = divmod(j - 1, 8)
    b[byte] ^= 0x80 >> off
    return Sequence(s.n, bytes(b))


def decode_hex(hex_str: str, n: int) -> Sequence:
    """Decode an uppercase/lowercase hex string, MSB first, zero padded at the end."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    hex_str = hex_str.strip()
    want = (n + 3) // 4
    if len(hex_str) != want:
        raise ValueError(f"n={n} needs {want} hex digits, got {len(hex_str)}")
    bad = set(hex_str) - _HEX
    if bad:
        raise ValueError(f"non-hex characters: {''.join(sorted(bad))}")
    raw = bytes.fromhex(hex_str + "0" * (want % 2))
    b = np.unpackbits(np.frombuffer(raw, dtype=np.uint8))
    if b[n:].any():
        raise ValueError("nonzero padding bits at the end of the hex string")
    return Sequence.from_bits(b[:n])


def encode_hex(s: Sequence) -> str:
    digits = (s.n + 3) // 4
    return s.bits.hex().upper()[:digits]


def autocorrelation(s: Sequence, k: int) -> int:
    """Aperiodic autocorrelation at distance ``k`` (1 <= k <= n-1)."""
    if not 1 <= k <= s.n - 1:
        raise ValueError(f"distance k={k} outside 1..{s.n - 1}")
    x = s.spins.astype(np.int64)
    return int(np.dot(x[:-k], x[k:]))


def correlations(s: Sequence) -> np.ndarray:
    """All aperiodic autocorrelations; index ``k-1`` holds the distance-``k`` value."""
    x = s.spins.astype(np.int64)
    return np.array([np.dot(x[:-k], x[k:]) for k in range(1, s.n)], dtype=np.int64)


def energy(s: Sequence) -> int:
    if s.n < 2:
        raise ValueError("energy is defined for n >= 2")
    c = correlations(s)
    return int(np.dot(c, c))


def merit_factor(s: Sequence, e: int | None = None) -> float:
    if e is None:
        e = energy(s)
    if e <= 0:
        raise ZeroDivisionError("merit factor undefined for zero energy")
    return s.n * s.n / (2.0 * e)


def complement(s: Sequence) -> Sequence:
    return Sequence.from_bits(1 - s.bit_array())


def reverse(s: Sequence) -> Sequence:
    return Sequence.from_bits(s.bit_array()[::-1])


def canonical(s: Sequence) -> Sequence:
    """Smallest bit pattern among the four complement/reversal images."""
    r = reverse(s)
    return min((s, complement(s), r, complement(r)), key=lambda x: x.bits)
