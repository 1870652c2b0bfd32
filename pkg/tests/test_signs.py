from itertools import product

from hypothesis import given, strategies as st

from artifact import signs
from artifact.signs import Partition3, SplitIJ
import naive_signs as naive


def test_partition_and_split_counts():
    for k in range(6):
        parts = signs.enumerate_partitions(k)
        assert len(parts) == (k + 1) * (k + 2) // 2
        assert len(set(parts)) == len(parts)
        for p in parts:
            assert p.first + p.middle + p.last == tuple(range(k))
    for l in range(6):
        splits = signs.enumerate_splits(l)
        assert len(splits) == 2 ** l
        assert len({(s.I, s.J) for s in splits}) == 2 ** l


def test_bad_partition_rejected():
    import pytest
    with pytest.raises(ValueError):
        Partition3(2, 2, 1)
    with pytest.raises(ValueError):
        SplitIJ(2, (1, 0), ())


def test_epsilon_examples():
    assert signs.epsilon([], [], 3).sign == -1
    assert int(signs.epsilon([0], [], 2)) == 0
    assert int(signs.epsilon([1, 1], [2], 1)) == 1


def test_koszul_examples():
    assert signs.koszul_sign(SplitIJ(3, (0, 1, 2), ()), [1, 1, 1]).sign == 1
    assert signs.koszul_sign(SplitIJ(2, (1,), (0,)), [1, 1]).sign == -1
    for s in signs.enumerate_splits(4):
        assert signs.koszul_sign(s, [2, 0, 4, 2]).sign == 1


def test_delta_and_cyclic_examples():
    assert int(signs.delta_glue(1, 0, 1, 2)) == 1
    assert int(signs.delta_glue(0, 0, 0, 3)) == 1
    assert int(signs.cyclic_sign([0, 0])) == 1
    assert int(signs.cyclic_sign([1, 0, 1])) == 0
    assert int(signs.cyclic_sign([1, 3, 1])) == 0


def test_iota_examples():
    for gam in product(range(4), repeat=2):
        s = SplitIJ(2, (0, 1), ())
        assert int(signs.iota([1, 2], list(gam), Partition3(2, 0, 1), s)) == sum(gam) % 2
    for s in signs.enumerate_splits(2):
        p = Partition3(3, 2, 1)
        assert int(signs.iota([0, 1, 2], [2, 2], p, s)) == (1 + 2) % 2


def test_koszul_matches_permutation_oracle():
    # a shuffle sign equals the graded permutation sign of the reordering it undoes
    for l in range(6):
        for degs in product(range(3), repeat=l):
            for s in signs.enumerate_splits(l):
                perm = list(s.I) + list(s.J)
                assert signs.koszul_sign(s, degs).sign == naive.reorder_sign(degs, perm)
                assert signs.permutation_sign(perm, degs).sign == naive.reorder_sign(degs, perm)


@given(st.lists(st.integers(0, 5), max_size=6), st.data())
def test_permutation_sign_composes(degs, data):
    m = len(degs)
    p = data.draw(st.permutations(list(range(m))))
    q = data.draw(st.permutations(list(range(m))))
    # reorder by p, then reorder the result by q
    after_p = [degs[i] for i in p]
    composite = [p[i] for i in q]
    total = signs.permutation_sign(p, degs) + signs.permutation_sign(q, after_p)
    assert int(total) == int(signs.permutation_sign(composite, degs))


@given(st.lists(st.integers(0, 6), max_size=5), st.lists(st.integers(0, 6), max_size=4), st.integers(0, 5))
def test_epsilon_fuzz(alpha, gamma, n):
    assert signs.epsilon(alpha, gamma, n).sign == naive.epsilon(alpha, gamma, n)
    assert signs.epsilon([], gamma, n, k=-1).sign == naive.epsilon([], gamma, n, k=-1)


@given(st.integers(0, 6), st.integers(0, 6), st.integers(0, 6), st.integers(0, 6))
def test_delta_parity_of_n(k1, k2, i, n):
    assert int(signs.delta_glue(k1, k2, i, n) + signs.delta_glue(k1, k2, i, n + 1)) == 1


@given(st.lists(st.integers(0, 5), min_size=2, max_size=6))
def test_pairing_swap_and_prefix(degs):
    x, y = degs[0], degs[1]
    assert signs.pairing_swap_sign(x, y) == signs.pairing_swap_sign(y, x)
    assert int(signs.shifted_prefix(degs, len(degs))) == sum(d + 1 for d in degs) % 2


def test_isotopy_nu_is_a_parity():
    for degs in product(range(3), repeat=3):
        for k2 in range(3):
            for i in range(1, 4 - k2):
                assert int(signs.isotopy_nu(degs, k2, i)) in (0, 1)
