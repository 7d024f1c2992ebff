"""Time-to-solution sampling and exponential scaling fits.

Samples and fits are stored as JSON lines, one record per line, so long
benchmark runs can append safely. Timed-out samples are kept in the files
but excluded from medians and fits.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np
from scipy import stats

from .parallel import ParallelConfig, run_replicas

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TTSSample:
    n: int
    target_e: int
    runtime: float
    reached_target: bool
    seed: int
    replicas: int
    best_e: int | None = None

    def __post_init__(self):
        if self.runtime < 0:
            raise ValueError("runtime must be >= 0")


@dataclass(frozen=True)
class FitResult:
    a: float
    b: float
    a_ci: tuple[float, float]
    b_ci: tuple[float, float]
    n_min_fit: int
    n_max_fit: int
    points_used: int
    censored: int = 0

    def row(self) -> str:
        return (f"{self.n_min_fit:4d} {self.n_max_fit:4d} {self.points_used:3d}  "
                f"a={self.a:.3e} ({self.a_ci[0]:.3e}, {self.a_ci[1]:.3e})  "
                f"b={self.b:.4f} ({self.b_ci[0]:.4f}, {self.b_ci[1]:.4f})")


@dataclass(frozen=True)
class NSummary:
    n: int
    median: float | None
    q1: float | None
    q3: float | None
    solved: int
    censored: int

    @property
    def all_censored(self) -> bool:
        return self.solved == 0


def quartiles(values) -> tuple[float, float, float]:
    """(Q1, median, Q3) with linear interpolation between order statistics."""
    q1, med, q3 = np.percentile(np.asarray(values, dtype=float), [25, 50, 75])
    return float(q1), float(med), float(q3)


def summarize(samples: Iterable[TTSSample]) -> list[NSummary]:
    by_n: dict[int, list[TTSSample]] = {}
    for s in samples:
        by_n.setdefault(s.n, []).append(s)
    out = []
    for n in sorted(by_n):
        ok = [s.runtime for s in by_n[n] if s.reached_target]
        cens = len(by_n[n]) - len(ok)
        if ok:
            q1, med, q3 = quartiles(ok)
            out.append(NSummary(n, med, q1, q3, len(ok), cens))
        else:
            out.append(NSummary(n, None, None, None, 0, cens))
    return out


def derived_seed(base_seed: int, n: int, rep: int) -> int:
    return int(np.random.SeedSequence([base_seed, n, rep]).generate_state(1)[0])


def run_tts(n_range: Iterable[int], targets: dict[int, int], repetitions: int,
            template: ParallelConfig, out: str | Path | None = None) -> list[TTSSample]:
    """Time each (n, repetition) run of :func:`run_replicas` to its target.

    ``template`` supplies everything but ``n``, ``target_e`` and ``base_seed``.
    With ``out`` set, each sample is appended to that file as soon as it exists.
    """
    n_range = list(n_range)
    missing = [n for n in n_range if n not in targets]
    if missing:
        raise KeyError(f"no target energy for n={missing}")
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    samples = []
    for n in n_range:
        for rep in range(repetitions):
            seed = derived_seed(template.base_seed, n, rep)
            cfg = dataclasses.replace(template, n=n, target_e=targets[n], base_seed=seed)
            res = run_replicas(cfg)
            s = TTSSample(n, targets[n], res.wall_time, res.reached_target, seed,
                          cfg.replicas, res.best_e)
            samples.append(s)
            if out is not None:
                append_samples(out, [s])
        if not any(s.reached_target for s in samples if s.n == n):
            log.warning("n=%d: all %d repetitions timed out", n, repetitions)
    return samples


def fit_exponential(samples: Iterable[TTSSample], n_min_fit: int, n_max_fit: int,
                    confidence: float = 0.95) -> FitResult:
    """OLS of log(median runtime) on n within the window, as ``a * b**n``."""
    samples = list(samples)
    for s in samples:
        if s.reached_target and s.runtime <= 0:
            raise ValueError(f"non-positive runtime {s.runtime} at n={s.n}")
    window = [s for s in summarize(samples)
              if n_min_fit <= s.n <= n_max_fit and not s.all_censored]
    if len(window) < 3:
        raise ValueError(f"need >= 3 sizes with solved runs in [{n_min_fit}, {n_max_fit}], "
                         f"got {len(window)}")
    x = np.array([s.n for s in window], dtype=float)
    y = np.log([s.median for s in window])
    reg = stats.linregress(x, y)
    t = stats.t.ppf(0.5 + confidence / 2, len(x) - 2)
    slope_lo, slope_hi = reg.slope - t * reg.stderr, reg.slope + t * reg.stderr
    icpt_lo, icpt_hi = reg.intercept - t * reg.intercept_stderr, reg.intercept + t * reg.intercept_stderr
    censored = sum(1 for s in samples if n_min_fit <= s.n <= n_max_fit and not s.reached_target)
    return FitResult(
        a=math.exp(reg.intercept), b=math.exp(reg.slope),
        a_ci=(math.exp(icpt_lo), math.exp(icpt_hi)),
        b_ci=(math.exp(slope_lo), math.exp(slope_hi)),
        n_min_fit=n_min_fit, n_max_fit=n_max_fit,
        points_used=len(x), censored=censored,
    )


def fit_sweep(samples, n_min_values: Iterable[int], n_max_fit: int) -> list[FitResult]:
    """One fit per window start; windows with too few sizes are skipped."""
    samples = list(samples)
    fits = []
    for lo in n_min_values:
        try:
            fits.append(fit_exponential(samples, lo, n_max_fit))
        except ValueError:
            continue
    return fits


def append_samples(path: str | Path, samples: Iterable[TTSSample]) -> None:
    with open(path, "a") as fh:
        for s in samples:
            fh.write(json.dumps(dataclasses.asdict(s)) + "\n")


def write_samples(path: str | Path, samples: Iterable[TTSSample]) -> None:
    Path(path).write_text("")
    append_samples(path, samples)


def read_samples(path: str | Path) -> list[TTSSample]:
    out = []
    for line in Path(path).read_text().splitlines():
        if line.strip():
            out.append(TTSSample(**json.loads(line)))
    return out


def fit_record(fit: FitResult) -> str:
    return json.dumps(dataclasses.asdict(fit))


def load_targets(path: str | Path) -> dict[int, int]:
    """``n energy`` per line; ``#`` comments. Later lines override earlier ones."""
    targets = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        if len(line) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'n energy'")
        targets[int(line[0])] = int(line[1])
    return targets
