"""Exhaustive ground truth for small n, and checks of published sequences.

Enumeration fixes s_1 = +1 (complementation) and walks the other n-1 spins
in reflected Gray-code order, so each step is one ``apply_flip`` on a
correlation state. Sequences are carried as integer masks: bit ``p-1`` set
means spin ``-1`` at position ``p``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numba
import numpy as np

from . import seqcore, skewsym
from .deltastate import _apply_flip, _build, _neighbor_energy, row_offsets, table_nbytes
from .seqcore import Sequence

MAX_BRUTE_N = 30
MAX_CENSUS_N = 24


def _fresh_state(n):
    spins = np.ones(n, dtype=np.int8)
    off = row_offsets(n)
    table = np.zeros(table_nbytes(n), dtype=np.uint8)
    cvec = np.zeros(n - 1, dtype=np.int32)
    e = _build(spins, off, table, cvec)
    return spins, off, table, cvec, e


@numba.njit(nogil=True, cache=True)
def _trailing_zeros(g):
    tz = 0
    while not (g >> tz) & 1:
        tz += 1
    return tz


@numba.njit(nogil=True, cache=True)
def _brute(spins, off, table, cvec, e):
    n = spins.shape[0]
    best = e
    mask = np.int64(0)
    wit = [mask]
    for g in range(1, np.int64(1) << (n - 1)):
        p = 2 + _trailing_zeros(g)
        e, _ = _apply_flip(table, off, cvec, spins, n, p)
        mask ^= np.int64(1) << (p - 1)
        if e < best:
            best = e
            wit.clear()
            wit.append(mask)
        elif e == best:
            wit.append(mask)
    return best, wit


@numba.njit(nogil=True, cache=True)
def _gray_trace(spins, off, table, cvec, e, masks, energies):
    n = spins.shape[0]
    mask = np.int64(0)
    masks[0], energies[0] = mask, e
    for g in range(1, np.int64(1) << (n - 1)):
        p = 2 + _trailing_zeros(g)
        e, _ = _apply_flip(table, off, cvec, spins, n, p)
        mask ^= np.int64(1) << (p - 1)
        masks[g], energies[g] = mask, e


@numba.njit(nogil=True, cache=True)
def _census(spins, off, table, cvec, e):
    n = spins.shape[0]
    count = 0
    for g in range(0, np.int64(1) << (n - 1)):
        if g:
            e, _ = _apply_flip(table, off, cvec, spins, n, 2 + _trailing_zeros(g))
        strict = True
        for j in range(1, n + 1):
            ej, _ = _neighbor_energy(table, off, cvec, n, j)
            if ej <= e:
                strict = False
                break
        if strict:
            count += 1
    return count


def mask_to_sequence(mask: int, n: int) -> Sequence:
    bits = (np.int64(mask) >> np.arange(n, dtype=np.int64)) & 1
    return Sequence.from_bits(bits.astype(np.uint8))


def brute_force_optimum(n: int) -> tuple[int, list[Sequence]]:
    """Exact minimum energy and its witnesses, canonicalised and deduplicated."""
    if not 2 <= n <= MAX_BRUTE_N:
        raise ValueError(f"brute force limited to 2 <= n <= {MAX_BRUTE_N}, got {n}")
    best, masks = _brute(*_fresh_state(n))
    witnesses = {seqcore.canonical(mask_to_sequence(m, n)) for m in masks}
    return int(best), sorted(witnesses, key=lambda s: s.bits)


def gray_code_energies(n: int) -> tuple[np.ndarray, np.ndarray]:
    """(masks, energies) at every step of the s_1=+1 Gray walk."""
    if not 2 <= n <= 24:
        raise ValueError("gray trace limited to 2 <= n <= 24")
    size = 1 << (n - 1)
    masks = np.empty(size, dtype=np.int64)
    energies = np.empty(size, dtype=np.int64)
    _gray_trace(*_fresh_state(n), masks, energies)
    return masks, energies


def enumerate_local_optima(n: int) -> int:
    """Sequences whose energy is strictly below every single-flip neighbour."""
    if not 2 <= n <= MAX_CENSUS_N:
        raise ValueError(f"local-optima census limited to 2 <= n <= {MAX_CENSUS_N}, got {n}")
    # complementation maps local optima to local optima, so count half and double
    return 2 * int(_census(*_fresh_state(n)))


@dataclass
class PublishedEntry:
    n: int
    hex: str
    energy: int
    mf: float
    d: int | None = None


@dataclass
class EntryReport:
    entry: PublishedEntry
    energy: int | None = None
    mf: float | None = None
    d: int | None = None
    energy_ok: bool = False
    mf_ok: bool = False
    d_ok: bool | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None and self.energy_ok and self.mf_ok and self.d_ok is not False


@dataclass
class VerifyReport:
    entries: list[EntryReport]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.entries)

    @property
    def failures(self) -> list[EntryReport]:
        return [r for r in self.entries if not r.ok]


MF_TOL = 0.005


def verify_published(entries, check_d: bool = True, convention: str = "published",
                     budget: int | None = None) -> VerifyReport:
    """Recompute energy, merit factor and deviation for each published entry.

    Merit factors are published to two decimals and compare within 0.005;
    energy and deviation compare exactly. Decoding or budget errors fail the
    entry without aborting the batch.
    """
    reports = []
    for ent in entries:
        rep = EntryReport(ent)
        try:
            s = seqcore.decode_hex(ent.hex, ent.n)
            rep.energy = seqcore.energy(s)
            rep.mf = seqcore.merit_factor(s, rep.energy)
            rep.energy_ok = rep.energy == ent.energy
            rep.mf_ok = abs(rep.mf - ent.mf) <= MF_TOL + 1e-12
            if check_d and ent.d is not None:
                rep.d = skewsym.deviation(s, convention=convention, budget=budget)
                rep.d_ok = rep.d == ent.d
        except (ValueError, skewsym.BudgetExceeded) as exc:
            rep.error = f"{type(exc).__name__}: {exc}"
        reports.append(rep)
    return VerifyReport(reports)


def parse_table(text: str) -> list[PublishedEntry]:
    """Whitespace-separated records ``n hex E MF [d]``; ``#`` starts a comment."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) not in (4, 5):
            raise ValueError(f"line {lineno}: expected 'n hex E MF [d]', got {raw!r}")
        n, hx, e, mf = int(parts[0]), parts[1], int(parts[2]), float(parts[3])
        d = int(parts[4]) if len(parts) == 5 else None
        out.append(PublishedEntry(n, hx, e, mf, d))
    return out


def load_table(path: str | Path) -> list[PublishedEntry]:
    return parse_table(Path(path).read_text())


def data_path(name: str) -> Path:
    return Path(__file__).with_name("data") / name


def published_table() -> list[PublishedEntry]:
    """The shipped table of new sequences for 92 <= n <= 120."""
    return load_table(data_path("new_sequences.txt"))

