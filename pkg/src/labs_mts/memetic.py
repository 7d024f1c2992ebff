"""Memetic evolutionary loop with tabu refinement of every child."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import tabu
from .deltastate import CorrelationState
from .seqcore import Sequence


@dataclass(frozen=True)
class MemeticParams:
    target_e: int
    K: int = 100
    p_comb: float = 0.9
    p_mutate: float | None = None  # None means 1/n
    max_wall_time: float | None = None
    max_iterations: int | None = None
    tabu: tabu.TabuParams = field(default_factory=tabu.TabuParams)

    def __post_init__(self):
        if self.K < 2:
            raise ValueError("population size K must be >= 2")
        if not 0 <= self.p_comb <= 1:
            raise ValueError("p_comb must lie in [0, 1]")
        if self.p_mutate is not None and not 0 < self.p_mutate <= 1:
            raise ValueError("p_mutate must lie in (0, 1]")

    def mutation_rate(self, n: int) -> float:
        return 1.0 / n if self.p_mutate is None else self.p_mutate


@dataclass
class RunResult:
    best_seq: Sequence
    best_e: int
    mf: float
    iterations: int
    wall_time: float
    seed: int | None
    replica_id: int
    reached_target: bool
    trace: list | None = None

    @property
    def n(self) -> int:
        return self.best_seq.n


@dataclass
class IterationRecord:
    iteration: int
    t_end: float
    child_e: int
    tabu_iters: int
    best_e: int


def _tournament(energies, rng) -> int:
    a, b = rng.integers(0, len(energies), size=2)
    if energies[a] == energies[b]:
        return int(a if rng.random() < 0.5 else b)
    return int(a if energies[a] < energies[b] else b)


def select_parents(energies, rng: np.random.Generator) -> tuple[int, int]:
    """Two independent binary tournaments on energy; indices may coincide."""
    if len(energies) < 2:
        raise ValueError("parent selection needs a population of at least 2")
    return _tournament(energies, rng), _tournament(energies, rng)


def _crossover(a: np.ndarray, b: np.ndarray, rng) -> np.ndarray:
    return np.where(rng.random(a.shape[0]) < 0.5, a, b)


def _mutate(x: np.ndarray, p: float, rng) -> np.ndarray:
    out = x.copy()
    out[rng.random(x.shape[0]) < p] *= -1
    return out


def combine(p1: Sequence, p2: Sequence, rng: np.random.Generator) -> Sequence:
    """Uniform crossover."""
    if p1.n != p2.n:
        raise ValueError(f"parent lengths differ: {p1.n} vs {p2.n}")
    return Sequence.from_spins(_crossover(p1.spins, p2.spins, rng))


def mutate(child: Sequence, p_mutate: float, rng: np.random.Generator) -> Sequence:
    if not 0 < p_mutate <= 1:
        raise ValueError("p_mutate must lie in (0, 1]")
    return Sequence.from_spins(_mutate(child.spins, p_mutate, rng))


def memetic_tabu(n: int, params: MemeticParams, rng: np.random.Generator | int | None = None,
                 stop=None, *, replica_id: int = 0, scan_workers: int = 1,
                 trace: bool = False) -> RunResult:
    """Run the memetic-tabu loop until the target, ``stop.is_set()``, or a budget.

    ``rng`` may be a Generator or an integer seed (recorded in the result).
    ``stop`` only needs an ``is_set()`` method and is polled once per iteration.
    """
    if n < 2:
        raise ValueError("memetic search needs n >= 2")
    seed = rng if isinstance(rng, (int, np.integer)) else None
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    t0 = time.perf_counter()
    deadline = None if params.max_wall_time is None else t0 + params.max_wall_time
    p_mut = params.mutation_rate(n)
    K = params.K

    pop = (1 - 2 * rng.integers(0, 2, size=(K, n))).astype(np.int8)
    energies = np.array([CorrelationState(p).e for p in pop], dtype=np.int64)
    b = int(np.argmin(energies))
    best, best_e = pop[b].copy(), int(energies[b])
    records = [] if trace else None

    it = 0
    while best_e > params.target_e:
        if stop is not None and stop.is_set():
            break
        if params.max_iterations is not None and it >= params.max_iterations:
            break
        if deadline is not None and time.perf_counter() >= deadline:
            break
        if rng.random() < params.p_comb:
            i, j = select_parents(energies, rng)
            child = _crossover(pop[i], pop[j], rng)
        else:
            child = pop[rng.integers(0, K)].copy()
        child = _mutate(child, p_mut, rng)
        child, child_e, tr = tabu._run(child, params.tabu, rng, scan_workers)
        if child_e < best_e:
            best, best_e = child.copy(), child_e
        victim = rng.integers(0, K)
        pop[victim], energies[victim] = child, child_e
        it += 1
        if records is not None:
            records.append(IterationRecord(it, time.perf_counter(), child_e, tr.max_iter, best_e))

    best_seq = Sequence.from_spins(best)
    return RunResult(
        best_seq=best_seq,
        best_e=best_e,
        mf=n * n / (2.0 * best_e) if best_e > 0 else float("inf"),
        iterations=it,
        wall_time=time.perf_counter() - t0,
        seed=None if seed is None else int(seed),
        replica_id=replica_id,
        reached_target=best_e <= params.target_e,
        trace=records,
    )
