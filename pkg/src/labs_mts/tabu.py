"""Tabu search over single-bit flips, driven by a :class:`CorrelationState`."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import TextIO

import numpy as np

from .deltastate import CorrelationState, _apply_flip, _pick, _tabu_loop
from .seqcore import Sequence


@dataclass(frozen=True)
class TabuParams:
    min_tabu_factor: float = 0.10
    max_tabu_factor: float = 0.12

    def __post_init__(self):
        if not 0 <= self.min_tabu_factor <= self.max_tabu_factor < 1:
            raise ValueError("need 0 <= min_tabu_factor <= max_tabu_factor < 1")

    def tenure_bounds(self, max_iter: int) -> tuple[int, int]:
        # exact decimal arithmetic: float 0.1 * 30 must floor to 3, not 2
        lo = math.floor(Fraction(str(self.min_tabu_factor)) * max_iter)
        hi = math.floor(Fraction(str(self.max_tabu_factor)) * max_iter)
        return lo, hi


@dataclass
class TabuTrace:
    """Per-iteration record of one tabu run.

    ``expiry[t-1]`` is the tabu expiry assigned to the position flipped at ``t``.
    """

    max_iter: int
    min_tabu: int
    max_tabu: int
    start_energy: int
    positions: np.ndarray
    energies: np.ndarray
    fallback: np.ndarray
    expiry: np.ndarray

    def lines(self):
        for t, (j, e, fb) in enumerate(zip(self.positions, self.energies, self.fallback), 1):
            yield f"{t} {int(j)} {int(e)}{' fallback' if fb else ''}"

    def write(self, fh: TextIO) -> None:
        for line in self.lines():
            fh.write(line + "\n")


@dataclass
class TabuResult:
    best: Sequence
    best_energy: int
    trace: TabuTrace


def sample_max_iter(n: int, rng: np.random.Generator) -> int:
    """Iteration budget: uniform integer on [0, n] plus floor(n/2)."""
    if n < 2:
        raise ValueError("tabu search needs n >= 2")
    return int(rng.integers(0, n + 1)) + n // 2


def _run(spins: np.ndarray, params: TabuParams, rng: np.random.Generator,
         scan_workers: int = 1):
    """Tabu search on raw spins; returns (best spins, best energy, trace)."""
    st = CorrelationState(spins)
    n = st.n
    max_iter = sample_max_iter(n, rng)
    lo, hi = params.tenure_bounds(max_iter)
    pos = np.zeros(max_iter, dtype=np.int64)
    ens = np.zeros(max_iter, dtype=np.int64)
    fbs = np.zeros(max_iter, dtype=np.bool_)
    exps = np.zeros(max_iter, dtype=np.int64)
    best = st.spins.copy()
    start = st.e
    if scan_workers <= 1:
        best_e = int(_tabu_loop(st.spins, st.table, st.off, st.cvec, st.e, rng,
                                max_iter, lo, hi, best, pos, ens, fbs, exps))
    else:
        expiry = np.zeros(n, dtype=np.int64)
        ties = np.empty(n, dtype=np.int64)
        best_e = st.e
        for t in range(1, max_iter + 1):
            energies = st.neighbor_energies(scan_workers)
            j, _, fb = _pick(energies, expiry, t, n, rng, ties)
            e, _ = _apply_flip(st.table, st.off, st.cvec, st.spins, n, j)
            expiry[j - 1] = t + rng.integers(lo, hi + 1)
            pos[t - 1], ens[t - 1], fbs[t - 1], exps[t - 1] = j, e, fb, expiry[j - 1]
            if e < best_e:
                best_e = int(e)
                best[:] = st.spins
    return best, best_e, TabuTrace(max_iter, lo, hi, start, pos, ens, fbs, exps)


def run_tabu(seq: Sequence, params: TabuParams | None = None,
             rng: np.random.Generator | None = None, scan_workers: int = 1) -> TabuResult:
    if seq.n < 2:
        raise ValueError("tabu search needs n >= 2")
    rng = np.random.default_rng() if rng is None else rng
    best, best_e, trace = _run(seq.spins, params or TabuParams(), rng, scan_workers)
    return TabuResult(Sequence.from_spins(best), best_e, trace)


def tabu_search(seq: Sequence, params: TabuParams | None = None,
                rng: np.random.Generator | None = None, scan_workers: int = 1,
                trace_file: TextIO | None = None) -> Sequence:
    """Lowest-energy sequence among ``seq`` and every pivot visited."""
    res = run_tabu(seq, params, rng, scan_workers)
    if trace_file is not None:
        res.trace.write(trace_file)
    return res.best
