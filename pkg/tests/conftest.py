import itertools

import numpy as np
import pytest

from labs_mts.seqcore import Sequence

ACCEPTANCE_LINES: list[str] = []


def naive_energy(spins) -> int:
    """Plain double loop over Python ints, independent of the package."""
    s = [int(x) for x in spins]
    n = len(s)
    total = 0
    for k in range(1, n):
        c = 0
        for i in range(n - k):
            c += s[i] * s[i + k]
        total += c * c
    return total


def naive_flipped_energy(spins, j: int) -> int:
    s = [int(x) for x in spins]
    s[j - 1] = -s[j - 1]
    return naive_energy(s)


def all_spin_arrays(n: int):
    for bits in itertools.product((1, -1), repeat=n):
        yield np.array(bits, dtype=np.int8)


def naive_optimum(n: int) -> int:
    return min(naive_energy(s) for s in all_spin_arrays(n))


def naive_nns(spins) -> int:
    s = [int(x) for x in spins]
    m = (len(s) + 1) // 2
    return sum(abs(s[m + i - 1] - (-1) ** i * s[m - i - 1]) for i in range(1, m)) // 2


def naive_deviation(spins, convention: str = "published") -> int:
    """List-slicing reference for both d(S) conventions."""
    s = [int(x) for x in spins]
    n = len(s)
    literal = convention == "literal"
    best = None
    for r in range(n):
        x = s[r:] + s[:r]
        cands = []
        if n % 2:
            cands.append(x)
            if literal:
                for i in range(n + 1):
                    for xi in (-1, 1):
                        y = x[:i] + [xi] + x[i:]
                        cands += [y[:j] + y[j + 1:] for j in range(n + 1)]
        else:
            cands += [x[:i] + x[i + 1:] for i in range(n)]
            if literal:
                cands += [x[:i] + [xi] + x[i:] for i in range(n + 1) for xi in (-1, 1)]
        v = min(naive_nns(c) for c in cands)
        best = v if best is None else min(best, v)
    return best


def random_seq(n: int, rng) -> Sequence:
    return Sequence.from_spins(1 - 2 * rng.integers(0, 2, size=n))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def accept():
    """Record one pass/fail line for the acceptance summary."""
    def _record(number: int, ok: bool, detail: str):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
