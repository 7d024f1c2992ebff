import numpy as np
import pytest

from labs_mts import deltastate
from labs_mts.deltastate import apply_flip, build_state, neighbor_energy, scan_neighborhood
from labs_mts.seqcore import Sequence, energy, flip

from .conftest import naive_energy, naive_flipped_energy, random_seq


def check_invariants(st):
    s = [int(x) for x in st.spins]
    n = st.n
    for k in range(1, n):
        row = [st.product(k, i) for i in range(1, n - k + 1)]
        assert row == [s[i - 1] * s[i + k - 1] for i in range(1, n - k + 1)]
        assert st.cvec[k - 1] == sum(row)
    assert st.e == int(np.sum(st.cvec.astype(np.int64) ** 2))
    assert st.table.nbytes == (n * (n - 1) // 2 + 7) // 8


def test_build_all_ones():
    st = build_state(Sequence.from_spins([1] * 5))
    assert st.cvec.tolist() == [4, 3, 2, 1]
    assert st.e == 30
    check_invariants(st)


def test_build_table_sequence():
    from labs_mts.seqcore import decode_hex
    assert build_state(decode_hex("EE01C0E77667DD34DAE94B5", 92)).e == 490


def test_build_random_matches_naive(rng):
    for n in (2, 3, 9, 17, 64):
        s = random_seq(n, rng)
        st = build_state(s)
        assert st.e == naive_energy(s.spins) == energy(s)
        check_invariants(st)


def test_state_owns_its_spins():
    spins = np.ones(8, dtype=np.int8)
    st = build_state(spins)
    apply_flip(st, 3)
    assert spins.tolist() == [1] * 8
    assert st.e == naive_flipped_energy(spins, 3)


def test_build_rejects_short():
    with pytest.raises(ValueError):
        build_state(Sequence.from_spins([1]))


def test_table_size_exact():
    for n in (2, 5, 11, 16, 17, 187):
        st = build_state(Sequence.from_spins([1] * n))
        assert st.table.nbytes == -(-(n * (n - 1) // 2) // 8)


def test_neighbor_energy_all_ones_n4():
    st = build_state(Sequence.from_spins([1] * 4))
    # flipped sequence (-1,1,1,1) has C = (1, 0, -1)
    assert naive_flipped_energy([1, 1, 1, 1], 1) == 2
    assert neighbor_energy(st, 1) == 2
    assert st.e == 14


def test_neighbor_energy_exhaustive_n100(rng):
    s = random_seq(100, rng)
    st = build_state(s)
    before = st.copy()
    for j in range(1, 101):
        assert neighbor_energy(st, j) == naive_flipped_energy(s.spins, j)
    assert st == before


def test_neighbor_energy_range():
    st = build_state(Sequence.from_spins([1] * 4))
    for j in (0, 5):
        with pytest.raises(IndexError):
            neighbor_energy(st, j)


def test_flip_is_involution(rng):
    s = random_seq(40, rng)
    st = build_state(s)
    ref = st.copy()
    for j in (1, 17, 40):
        apply_flip(st, j)
        apply_flip(st, j)
        assert st == ref
    e0 = st.e
    apply_flip(st, 5)
    assert neighbor_energy(st, 5) == e0


def test_flip_matches_rebuild(rng):
    for _ in range(20):
        s = random_seq(96, rng)
        j = int(rng.integers(1, 97))
        st = build_state(s)
        apply_flip(st, j)
        assert st == build_state(flip(s, j))
        check_invariants(st)


def test_flip_all_ones_n4():
    st = build_state(Sequence.from_spins([1] * 4))
    apply_flip(st, 1)
    assert st.e == 2
    assert st.pivot.spins.tolist() == [-1, 1, 1, 1]


def test_interleaved_traces(rng):
    for _ in range(500):
        n = int(rng.integers(8, 129))
        spins = (1 - 2 * rng.integers(0, 2, size=n)).astype(np.int8)
        st = build_state(spins)
        ref = spins.copy()
        for _ in range(5):
            j = int(rng.integers(1, n + 1))
            assert neighbor_energy(st, j) == naive_flipped_energy(ref, j)
            apply_flip(st, j)
            ref[j - 1] *= -1
            assert st.e == naive_energy(ref)


def test_cost_counters():
    for n in (10, 50, 120):
        st = build_state(Sequence.from_spins([1] * n))
        for j in (1, n // 2, n):
            st.reads = 0
            st.neighbor_energy(j)
            assert st.reads == n - 1
            st.reads = 0
            st.apply_flip(j)
            assert st.reads == n - 1


def test_scan_four_way_tie():
    st = build_state(Sequence.from_spins([1] * 4))
    assert [naive_flipped_energy([1] * 4, j) for j in range(1, 5)] == [2, 2, 2, 2]
    seen = {}
    for seed in range(400):
        j, e = scan_neighborhood(st, None, np.random.default_rng(seed))
        assert e == 2
        seen[j] = seen.get(j, 0) + 1
    assert set(seen) == {1, 2, 3, 4}


def test_scan_single_admissible(rng):
    st = build_state(random_seq(20, rng))
    mask = np.zeros(20, dtype=bool)
    mask[6] = True
    assert scan_neighborhood(st, mask, rng)[0] == 7
    assert scan_neighborhood(st, lambda j: j == 13, rng)[0] == 13


def test_scan_random_mask_matches_bruteforce(rng):
    for _ in range(30):
        s = random_seq(64, rng)
        st = build_state(s)
        mask = rng.random(64) < 0.3
        mask[int(rng.integers(64))] = True
        want = min(naive_flipped_energy(s.spins, j) for j in range(1, 65) if mask[j - 1])
        j, e = scan_neighborhood(st, mask, rng)
        assert mask[j - 1]
        assert e == want == naive_flipped_energy(s.spins, j)


def test_scan_empty_admissible(rng):
    st = build_state(random_seq(10, rng))
    none = np.zeros(10, dtype=bool)
    j, _ = scan_neighborhood(st, none, rng)
    assert 1 <= j <= 10
    with pytest.raises(ValueError):
        scan_neighborhood(st, none, rng, fallback=False)


def test_tie_break_uniform():
    # n=4 all-ones: four-way tie, each position should get 25% +- 5 points
    st = build_state(Sequence.from_spins([1] * 4))
    rng = np.random.default_rng(7)
    counts = np.zeros(5)
    trials = 8000
    for _ in range(trials):
        counts[scan_neighborhood(st, None, rng)[0]] += 1
    assert np.all(np.abs(counts[1:] / trials - 0.25) <= 0.05)


def test_scan_worker_count_independent(rng):
    for _ in range(20):
        s = random_seq(int(rng.integers(8, 80)), rng)
        st = build_state(s)
        mask = rng.random(s.n) < 0.7
        seed = int(rng.integers(1 << 30))
        picks = {scan_neighborhood(st, mask, np.random.default_rng(seed), workers=w)
                 for w in (1, 2, 8)}
        assert len(picks) == 1
        assert np.array_equal(st.neighbor_energies(1), st.neighbor_energies(8))


def test_row_offsets():
    off = deltastate.row_offsets(6)
    # rows have 5,4,3,2,1 entries
    assert off[1:].tolist() == [0, 5, 9, 12, 14]
