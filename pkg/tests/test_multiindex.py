import math

import pytest

from chaosfield.multiindex import MultiIndex, Truncation, enumerate_multiindices, index_map


def test_zero_and_eps():
    zero = MultiIndex.zero()
    assert zero.order() == 0
    assert zero.entries == ()
    e3 = MultiIndex.eps(3)
    assert e3.order() == 1
    assert e3.get(3) == 1
    assert e3.get(1) == 0


def test_from_dense_roundtrip():
    a = MultiIndex.from_dense([2, 0, 1])
    assert a.entries == ((1, 2), (3, 1))
    assert a.dense(4) == (2, 0, 1, 0)
    assert a.order() == 3
    assert a.max_support == 3


def test_factorial_log():
    a = MultiIndex.from_dense([3, 2])
    assert a.factorial_log() == pytest.approx(math.log(6) + math.log(2))
    assert a.factorial_sqrt_log() == pytest.approx(0.5 * (math.log(6) + math.log(2)))


def test_add_sub():
    a = MultiIndex.from_dense([1, 1])
    b = a.add_eps(1)
    assert b.dense(2) == (2, 1)
    assert b.sub_eps(1) == a
    assert a.sub_eps(3) is None
    c = a.add(MultiIndex.from_dense([0, 2, 1]))
    assert c.dense(3) == (1, 3, 1)


def test_truncation_size():
    trunc = Truncation(2, 2)
    assert trunc.size() == math.comb(4, 2)
    assert len(enumerate_multiindices(trunc)) == trunc.size()


def test_enumeration_order_small():
    # graded by order; within a grade the first mode carries weight first
    trunc = Truncation(2, 1)
    alphas = enumerate_multiindices(trunc)
    assert [a.dense(2) for a in alphas] == [(0, 0), (1, 0), (0, 1)]


def test_enumeration_grades_ascending():
    trunc = Truncation(3, 3)
    orders = [a.order() for a in enumerate_multiindices(trunc)]
    assert orders == sorted(orders)


def test_index_map_consistent():
    trunc = Truncation(3, 2)
    imap = index_map(trunc)
    for i, a in enumerate(enumerate_multiindices(trunc)):
        assert imap[a] == i


def test_contains():
    trunc = Truncation(2, 2)
    assert trunc.contains(MultiIndex.from_dense([1, 1]))
    assert not trunc.contains(MultiIndex.from_dense([2, 1]))
    assert not trunc.contains(MultiIndex.eps(3))
