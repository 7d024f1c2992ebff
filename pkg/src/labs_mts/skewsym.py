"""Distance of a sequence from skew-symmetry.

An odd-length sequence ``L = 2m - 1`` is skew-symmetric when
``s[m+i] == (-1)**i * s[m-i]`` for ``i = 1..m-1``; :func:`n_non_skew` counts
the pairs that break this. :func:`deviation` minimises that count over
cyclic rotations combined with single-element edits. Two edit sets are
supported:

``"published"`` (default)
    even n: one deletion; odd n: no edit. This reproduces every tabulated
    value for the new 92 <= n <= 120 sequences.
``"literal"``
    even n: one insertion or one deletion; odd n: no edit, or one insertion
    followed by one deletion (the parity-preserving reading). Never larger
    than ``"published"``, and smaller on several tabulated sequences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .seqcore import Sequence

CONVENTIONS = ("published", "literal")


class BudgetExceeded(RuntimeError):
    """Deviation search stopped before completion; ``upper_bound`` is the best seen."""

    def __init__(self, upper_bound: int, evaluated: int, budget: int):
        super().__init__(f"budget of {budget} candidates exceeded "
                         f"(evaluated {evaluated}, best so far {upper_bound})")
        self.upper_bound = upper_bound
        self.evaluated = evaluated
        self.budget = budget


@dataclass(frozen=True)
class EditOp:
    kind: str  # "rotate" | "insert" | "delete"
    position: int
    value: int = 0

    def __post_init__(self):
        if self.kind not in ("rotate", "insert", "delete"):
            raise ValueError(f"unknown edit kind {self.kind!r}")
        if self.kind == "insert" and self.value not in (-1, 1):
            raise ValueError("insert needs a spin value of +1 or -1")

    def apply(self, s: Sequence) -> Sequence:
        if self.kind == "rotate":
            return rot(s, self.position)
        if self.kind == "insert":
            return ins(s, self.position, self.value)
        return delete(s, self.position)


@numba.njit(nogil=True, cache=True)
def _nns(x, length, cap):
    m = (length + 1) // 2
    c = 0
    for i in range(1, m):
        want = x[m - i - 1] if i % 2 == 0 else -x[m - i - 1]
        if x[m + i - 1] != want:
            c += 1
            if c >= cap:
                return cap
    return c


@numba.njit(nogil=True, cache=True)
def _rotate_into(s, r, out):
    n = s.shape[0]
    for k in range(n):
        out[k] = s[(k + r) % n]


@numba.njit(nogil=True, cache=True)
def _insert_into(x, length, i, xi, out):
    for k in range(i):
        out[k] = x[k]
    out[i] = xi
    for k in range(i, length):
        out[k + 1] = x[k]


@numba.njit(nogil=True, cache=True)
def _delete_into(x, length, i, out):
    # i is 0-indexed here
    for k in range(i):
        out[k] = x[k]
    for k in range(i + 1, length):
        out[k - 1] = x[k]


@numba.njit(nogil=True, cache=True)
def _deviation(s, literal, budget):
    """Returns (best, evaluated, complete). ``budget < 0`` means unlimited."""
    n = s.shape[0]
    x = np.empty(n, dtype=np.int8)
    y = np.empty(n + 1, dtype=np.int8)
    z = np.empty(n + 1, dtype=np.int8)
    best = n
    evaluated = 0
    for r in range(n):
        _rotate_into(s, r, x)
        if n % 2 == 1:
            evaluated += 1
            best = min(best, _nns(x, n, best))
            if literal:
                for i in range(n + 1):
                    for xi in (-1, 1):
                        _insert_into(x, n, i, xi, y)
                        for j in range(n + 1):
                            if best == 0:
                                return 0, evaluated, True
                            _delete_into(y, n + 1, j, z)
                            evaluated += 1
                            best = min(best, _nns(z, n, best))
                    if 0 <= budget < evaluated and (r < n - 1 or i < n):
                        return best, evaluated, False
        else:
            for i in range(n):
                _delete_into(x, n, i, y)
                evaluated += 1
                best = min(best, _nns(y, n - 1, best))
            if literal:
                for i in range(n + 1):
                    for xi in (-1, 1):
                        _insert_into(x, n, i, xi, y)
                        evaluated += 1
                        best = min(best, _nns(y, n + 1, best))
        if best == 0:
            return 0, evaluated, True
        if 0 <= budget < evaluated and r < n - 1:
            return best, evaluated, False
    return best, evaluated, True


def _odd_spins(s: Sequence) -> np.ndarray:
    if s.n % 2 == 0 or s.n < 3:
        raise ValueError(f"skew-symmetry pairs need odd length >= 3, got {s.n}")
    return s.spins


def n_non_skew(s: Sequence) -> int:
    """Number of pairs violating skew-symmetry (odd length only)."""
    return int(_nns(_odd_spins(s), s.n, s.n))


def is_skew_symmetric(s: Sequence) -> bool:
    return n_non_skew(s) == 0


def random_skew_symmetric(m: int, rng: np.random.Generator) -> Sequence:
    """Uniform skew-symmetric sequence of length ``2m - 1`` (m >= 2)."""
    if m < 2:
        raise ValueError("m must be >= 2")
    x = np.empty(2 * m - 1, dtype=np.int8)
    x[:m] = 1 - 2 * rng.integers(0, 2, size=m)
    for i in range(1, m):
        x[m + i - 1] = x[m - i - 1] * (1 if i % 2 == 0 else -1)
    return Sequence.from_spins(x)


def rot(s: Sequence, i: int) -> Sequence:
    """Move the first ``i`` elements to the end."""
    if not 0 <= i <= s.n:
        raise ValueError(f"rotation {i} outside 0..{s.n}")
    return Sequence.from_spins(np.roll(s.spins, -i))


def ins(s: Sequence, i: int, xi: int) -> Sequence:
    """Insert spin ``xi`` after the first ``i`` elements."""
    if not 0 <= i <= s.n:
        raise ValueError(f"insertion index {i} outside 0..{s.n}")
    if xi not in (-1, 1):
        raise ValueError("inserted spin must be +1 or -1")
    return Sequence.from_spins(np.insert(s.spins, i, xi))


def delete(s: Sequence, i: int) -> Sequence:
    """Remove the element at 1-indexed position ``i``."""
    if s.n < 2:
        raise ValueError("cannot delete from a length-1 sequence")
    if not 1 <= i <= s.n:
        raise ValueError(f"deletion position {i} outside 1..{s.n}")
    return Sequence.from_spins(np.delete(s.spins, i - 1))


def deviation_search(s: Sequence, convention: str = "published",
                     budget: int | None = None) -> tuple[int, int, bool]:
    """(best, candidates evaluated, complete) without raising on budget."""
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {CONVENTIONS}, got {convention!r}")
    if s.n < 3:
        raise ValueError(f"deviation needs n >= 3, got {s.n}")
    best, evaluated, complete = _deviation(
        s.spins, convention == "literal", -1 if budget is None else int(budget))
    return int(best), int(evaluated), bool(complete)


def deviation(s: Sequence, convention: str = "published", budget: int | None = None) -> int:
    """Minimum non-skew pair count over rotations and the convention's edits.

    ``budget`` caps the number of candidate sequences scored; exceeding it
    raises :class:`BudgetExceeded` instead of returning a partial minimum.
    """
    best, evaluated, complete = deviation_search(s, convention, budget)
    if not complete:
        raise BudgetExceeded(best, evaluated, budget)
    return best

