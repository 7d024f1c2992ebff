"""Replica-level orchestration: independent searches sharing a stop flag.

Each replica is one :func:`memetic_tabu` run seeded with ``base_seed + r``.
The first replica to reach the target publishes its result and raises the
shared flag; the others notice it at their next iteration boundary. Replicas
run on threads (the search kernels release the GIL) or sequentially.
"""

from __future__ import annotations

import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .memetic import MemeticParams, RunResult, memetic_tabu
from .seqcore import Sequence


@dataclass(frozen=True)
class ParallelConfig:
    n: int
    target_e: int
    replicas: int = 1
    scan_workers: int = 1
    base_seed: int = 0
    max_wall_time: float | None = None
    K: int = 100
    p_comb: float = 0.9
    p_mutate: float | None = None
    max_iterations: int | None = None
    sequential: bool = False
    trace: bool = False

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if self.replicas < 1 or self.scan_workers < 1:
            raise ValueError("replicas and scan_workers must be >= 1")

    def memetic_params(self) -> MemeticParams:
        return MemeticParams(target_e=self.target_e, K=self.K, p_comb=self.p_comb,
                             p_mutate=self.p_mutate, max_wall_time=self.max_wall_time,
                             max_iterations=self.max_iterations)


@dataclass
class SharedState:
    """Termination flag plus best-result record shared by all replicas."""

    _flag: threading.Event = field(default_factory=threading.Event)
    _lock: threading.Lock = field(default_factory=threading.Lock)
    best_e: int | None = None
    best_seq: Sequence | None = None
    best_replica: int | None = None
    best_result: RunResult | None = None
    flag_time: float | None = None
    published: list[RunResult] = field(default_factory=list)

    @property
    def glf(self) -> bool:
        return self._flag.is_set()

    def is_set(self) -> bool:
        return self._flag.is_set()

    def set_flag(self) -> None:
        with self._lock:
            if not self._flag.is_set():
                self.flag_time = time.perf_counter()
                self._flag.set()

    def publish(self, res: RunResult) -> bool:
        """Record ``res``; it becomes the best only if strictly lower."""
        with self._lock:
            self.published.append(res)
            if self.best_e is None or res.best_e < self.best_e:
                self.best_e, self.best_seq = res.best_e, res.best_seq
                self.best_replica, self.best_result = res.replica_id, res
                return True
            return False


def suggested_scan_workers(n: int) -> int:
    """Smallest multiple of 32 strictly greater than ``n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 32 * (n // 32 + 1)


def suggested_replicas(hardware_units: int, max_per_unit: int, max_workers_per_unit: int,
                       workers_per_replica: int) -> int:
    if min(hardware_units, max_per_unit, max_workers_per_unit, workers_per_replica) < 1:
        raise ValueError("all inputs must be >= 1")
    per_unit = min(max_per_unit, max_workers_per_unit // workers_per_replica)
    if per_unit == 0:
        raise ValueError(f"{workers_per_replica} workers per replica exceed the "
                         f"{max_workers_per_unit} available per unit")
    return hardware_units * per_unit


def shared_footprint(n: int, K: int) -> int:
    """Bytes for packed population, packed triangle, and 16-bit vectorC/tabu list."""
    if n < 2 or K < 1:
        raise ValueError("need n >= 2 and K >= 1")
    population = math.ceil(K * n / 8)
    table = math.ceil(n * (n - 1) // 2 / 8)
    return population + table + 2 * (n - 1) + 2 * n


def _replica(cfg: ParallelConfig, r: int, shared: SharedState) -> RunResult:
    try:
        res = memetic_tabu(cfg.n, cfg.memetic_params(), cfg.base_seed + r, shared,
                           replica_id=r, scan_workers=cfg.scan_workers, trace=cfg.trace)
    except BaseException:
        shared.set_flag()
        raise
    shared.publish(res)
    if res.reached_target:
        shared.set_flag()
    return res


def run_replicas(cfg: ParallelConfig, shared: SharedState | None = None) -> RunResult:
    """Best result over ``cfg.replicas`` independent searches.

    A replica exception stops the others and is re-raised. On timeout the best
    result so far comes back with ``reached_target`` False.
    """
    shared = SharedState() if shared is None else shared
    t0 = time.perf_counter()
    if cfg.sequential or cfg.replicas == 1:
        for r in range(cfg.replicas):
            _replica(cfg, r, shared)
    else:
        with ThreadPoolExecutor(max_workers=cfg.replicas, thread_name_prefix="replica") as pool:
            futures = [pool.submit(_replica, cfg, r, shared) for r in range(cfg.replicas)]
            for fut in futures:
                fut.result()
    best = shared.best_result
    if cfg.replicas == 1:
        return best
    return RunResult(
        best_seq=best.best_seq,
        best_e=best.best_e,
        mf=best.mf,
        iterations=sum(r.iterations for r in shared.published),
        wall_time=time.perf_counter() - t0,
        seed=best.seed,
        replica_id=best.replica_id,
        reached_target=best.best_e <= cfg.target_e,
        trace=best.trace,
    )
