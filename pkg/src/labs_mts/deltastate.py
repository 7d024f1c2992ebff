"""Incremental correlation state for O(n) neighbour evaluation.

``table`` is the upper-left triangle of pairwise products ``s_i * s_{i+k}``
packed one bit per entry (bit 1 means product -1). Row ``k`` holds ``n - k``
entries and starts at flat bit ``row_offsets(n)[k]``; bits are packed MSB
first like :class:`~labs_mts.seqcore.Sequence`. ``cvec[k-1]`` is ``C_k``.

Flipping position ``j`` changes exactly two products per row, ``(k, j-k)``
and ``(k, j)`` when they exist, each moving ``C_k`` by ``-2 * product``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache

import numba
import numpy as np

from .seqcore import Sequence

_JIT = dict(nogil=True, cache=True)


@lru_cache(maxsize=None)
def row_offsets(n: int) -> np.ndarray:
    k = np.arange(n, dtype=np.int64)
    off = (k - 1) * n - (k - 1) * k // 2
    off[0] = -1
    off.flags.writeable = False
    return off


def table_nbytes(n: int) -> int:
    return (n * (n - 1) // 2 + 7) // 8


@numba.njit(**_JIT)
def _product(table, idx):
    return 1 - 2 * ((table[idx >> 3] >> (7 - (idx & 7))) & 1)


@numba.njit(**_JIT)
def _toggle(table, idx):
    table[idx >> 3] ^= np.uint8(0x80 >> (idx & 7))


@numba.njit(**_JIT)
def _neighbor_energy(table, off, cvec, n, j):
    e = 0
    reads = 0
    for k in range(1, n):
        c = np.int64(cvec[k - 1])
        if j - k >= 1:
            c -= 2 * _product(table, off[k] + j - k - 1)
            reads += 1
        if j + k <= n:
            c -= 2 * _product(table, off[k] + j - 1)
            reads += 1
        e += c * c
    return e, reads


@numba.njit(**_JIT)
def _scan_range(table, off, cvec, n, lo, hi, out):
    for j in range(lo, hi + 1):
        out[j - 1], _ = _neighbor_energy(table, off, cvec, n, j)


@numba.njit(**_JIT)
def _apply_flip(table, off, cvec, spins, n, j):
    e = 0
    touched = 0
    for k in range(1, n):
        c = np.int64(cvec[k - 1])
        if j - k >= 1:
            idx = off[k] + j - k - 1
            c -= 2 * _product(table, idx)
            _toggle(table, idx)
            touched += 1
        if j + k <= n:
            idx = off[k] + j - 1
            c -= 2 * _product(table, idx)
            _toggle(table, idx)
            touched += 1
        cvec[k - 1] = c
        e += c * c
    spins[j - 1] = -spins[j - 1]
    return e, touched


@numba.njit(**_JIT)
def _build(spins, off, table, cvec):
    n = spins.shape[0]
    table[:] = 0
    e = 0
    for k in range(1, n):
        c = 0
        for i in range(1, n - k + 1):
            p = spins[i - 1] * spins[i + k - 1]
            c += p
            if p < 0:
                _toggle(table, off[k] + i - 1)
        cvec[k - 1] = c
        e += c * c
    return e


@numba.njit(**_JIT)
def _pick(energies, expiry, t, n, rng, ties):
    """Argmin over positions with ``expiry < t``; uniform among ties.

    Returns (position, energy, fallback). Random position when nothing is admissible.
    """
    best = np.iinfo(np.int64).max
    count = 0
    for j in range(1, n + 1):
        if expiry[j - 1] < t:
            ej = energies[j - 1]
            if ej < best:
                best = ej
                count = 0
            if ej == best:
                ties[count] = j
                count += 1
    if count == 0:
        j = rng.integers(0, n) + 1
        return j, energies[j - 1], True
    if count == 1:
        return ties[0], best, False
    return ties[rng.integers(0, count)], best, False


@numba.njit(**_JIT)
def _tabu_loop(spins, table, off, cvec, e, rng, max_iter, min_tabu, max_tabu,
               best_spins, trace_pos, trace_e, trace_fb, trace_exp):
    """Fused tabu iterations on a prepared state; returns the best energy seen."""
    n = spins.shape[0]
    expiry = np.zeros(n, dtype=np.int64)
    energies = np.empty(n, dtype=np.int64)
    ties = np.empty(n, dtype=np.int64)
    best_e = e
    best_spins[:] = spins
    for t in range(1, max_iter + 1):
        _scan_range(table, off, cvec, n, 1, n, energies)
        j, _, fb = _pick(energies, expiry, t, n, rng, ties)
        e, _ = _apply_flip(table, off, cvec, spins, n, j)
        expiry[j - 1] = t + rng.integers(min_tabu, max_tabu + 1)
        trace_pos[t - 1] = j
        trace_e[t - 1] = e
        trace_fb[t - 1] = fb
        trace_exp[t - 1] = expiry[j - 1]
        if e < best_e:
            best_e = e
            best_spins[:] = spins
    return best_e


@lru_cache(maxsize=None)
def _executor(workers: int) -> ThreadPoolExecutor:
    return ThreadPoolExecutor(max_workers=workers, thread_name_prefix="scan")


class CorrelationState:
    """tableC/vectorC pair plus cached energy for one pivot sequence.

    ``reads`` counts table entries touched by neighbour evaluations and flips.
    """

    def __init__(self, spins: np.ndarray):
        self.spins = np.array(spins, dtype=np.int8)  # owned copy, never aliases the input
        self.n = int(self.spins.shape[0])
        if self.n < 2:
            raise ValueError("correlation state needs n >= 2")
        self.off = row_offsets(self.n)
        self.table = np.zeros(table_nbytes(self.n), dtype=np.uint8)
        self.cvec = np.zeros(self.n - 1, dtype=np.int32)
        self.e = int(_build(self.spins, self.off, self.table, self.cvec))
        self.reads = 0

    @property
    def pivot(self) -> Sequence:
        return Sequence.from_spins(self.spins)

    def _check(self, j: int) -> None:
        if not 1 <= j <= self.n:
            raise IndexError(f"position {j} outside 1..{self.n}")

    def product(self, k: int, i: int) -> int:
        """Stored sign of ``s_i * s_{i+k}``."""
        if not (1 <= k <= self.n - 1 and 1 <= i <= self.n - k):
            raise IndexError(f"table entry ({k}, {i}) out of range")
        return int(_product(self.table, int(self.off[k]) + i - 1))

    def neighbor_energy(self, j: int) -> int:
        self._check(j)
        e, reads = _neighbor_energy(self.table, self.off, self.cvec, self.n, j)
        self.reads += reads
        return int(e)

    def neighbor_energies(self, workers: int = 1) -> np.ndarray:
        """Energies of all ``n`` single-flip neighbours (index ``j-1``)."""
        out = np.empty(self.n, dtype=np.int64)
        if workers <= 1:
            _scan_range(self.table, self.off, self.cvec, self.n, 1, self.n, out)
        else:
            bounds = np.linspace(0, self.n, min(workers, self.n) + 1).astype(int)
            jobs = [
                _executor(workers).submit(_scan_range, self.table, self.off, self.cvec,
                                          self.n, int(lo) + 1, int(hi), out)
                for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo
            ]
            for job in jobs:
                job.result()
        self.reads += self.n * (self.n - 1)
        return out

    def apply_flip(self, j: int) -> None:
        self._check(j)
        e, touched = _apply_flip(self.table, self.off, self.cvec, self.spins, self.n, j)
        self.e = int(e)
        self.reads += touched

    def copy(self) -> CorrelationState:
        st = object.__new__(CorrelationState)
        st.spins, st.n, st.off = self.spins.copy(), self.n, self.off
        st.table, st.cvec, st.e, st.reads = self.table.copy(), self.cvec.copy(), self.e, 0
        return st

    def __eq__(self, other) -> bool:
        if not isinstance(other, CorrelationState):
            return NotImplemented
        return (self.n == other.n and self.e == other.e
                and np.array_equal(self.spins, other.spins)
                and np.array_equal(self.table, other.table)
                and np.array_equal(self.cvec, other.cvec))

    def __repr__(self) -> str:
        return f"CorrelationState(n={self.n}, e={self.e})"


def build_state(s: Sequence | np.ndarray) -> CorrelationState:
    spins = s.spins if isinstance(s, Sequence) else s
    return CorrelationState(spins)


def neighbor_energy(st: CorrelationState, j: int) -> int:
    return st.neighbor_energy(j)


def apply_flip(st: CorrelationState, j: int) -> None:
    st.apply_flip(j)


def scan_neighborhood(st: CorrelationState, admissible, rng: np.random.Generator,
                      workers: int = 1, fallback: bool = True) -> tuple[int, int]:
    """Best admissible single flip as ``(position, energy)``.

    ``admissible`` is a length-``n`` boolean mask (index ``j-1``), a predicate on
    1-indexed positions, or None for all positions. The full tie set is formed
    before one rng draw, so the outcome does not depend on ``workers``. With no
    admissible position, a uniformly random position is returned when
    ``fallback`` is set and ValueError is raised otherwise.
    """
    energies = st.neighbor_energies(workers)
    if admissible is None:
        mask = np.ones(st.n, dtype=bool)
    elif callable(admissible):
        mask = np.array([bool(admissible(j)) for j in range(1, st.n + 1)])
    else:
        mask = np.asarray(admissible, dtype=bool)
        if mask.shape != (st.n,):
            raise ValueError(f"admissible mask must have shape ({st.n},)")
    if not mask.any() and not fallback:
        raise ValueError("no admissible position")
    # same draw sequence as the fused kernel: expiry 0 < t=1 marks admissible
    expiry = np.where(mask, 0, 1).astype(np.int64)
    ties = np.empty(st.n, dtype=np.int64)
    j, e, _ = _pick(energies, expiry, 1, st.n, rng, ties)
    return int(j), int(e)
