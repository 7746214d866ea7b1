import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from digitforge.errors import BlockTooLong, EmptyWord, InsufficientDigits, ShapeBudgetExceeded
from digitforge.words import (BlockMatrix, DigitWord, block_count, complexity,
                              complexity_profile, from_digits, normality_report,
                              to_digits, value, value_mod)

from oracles import int_value, naive_block_count

W = DigitWord.from_str


def words(bases=(2, 3, 10), min_size=1, max_size=40):
    return st.sampled_from(bases).flatmap(
        lambda b: st.lists(st.integers(0, b - 1), min_size=min_size, max_size=max_size)
        .map(lambda ds: DigitWord(ds, b)))


def test_value_examples():
    assert value(W("523", 10)) == 523
    assert value(W("0101", 2)) == 5
    assert value(W("00", 10)) == 0
    with pytest.raises(EmptyWord):
        value(W("", 10))


def test_value_mod_examples():
    assert value_mod(W("98765", 10), 3) == 765
    assert value_mod(W("1111", 2), 2) == 3
    w = W("31415", 10)
    assert value_mod(w, len(w)) == value(w)
    with pytest.raises(BlockTooLong):
        value_mod(w, 6)


def test_large_base_storage():
    w = DigitWord([999, 0, 5], 1000)
    assert value(w) == 999_000_005
    assert str(w) == "999 0 5"
    assert w[1:] == DigitWord([0, 5], 1000)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 1000), st.integers(0, 10**400), st.integers(0, 5))
def test_digit_conversion_roundtrip(b, x, extra):
    n = 1
    while b**n <= x:
        n += 1
    ds = to_digits(x, b, n + extra)
    assert from_digits(ds, b) == x
    assert int_value(ds, b) == x


@given(words(), words())
def test_value_concatenation_law(u, v):
    if u.base != v.base:
        v = DigitWord([d % u.base for d in v], u.base)
    if len(u) == 0 or len(v) == 0:
        return
    assert value(u + v) == value(u) * u.base**len(v) + value(v)


def test_complexity_examples():
    assert complexity(W("00000", 2), 3) == 1
    assert complexity(W("01010", 2), 2) == 2
    assert complexity(W("0110", 2), 2) == 3
    with pytest.raises(BlockTooLong):
        complexity(W("01", 2), 3)


@given(words(min_size=1))
def test_complexity_bounds_and_profile(w):
    prof = complexity_profile(w, len(w))
    for n in range(1, len(w) + 1):
        c = complexity(w, n)
        assert prof[n - 1] == c
        assert c <= min(w.base**n, len(w) - n + 1)


@given(words(min_size=2), st.integers(0, 9))
def test_complexity_monotone_under_extension(w, d):
    longer = w + DigitWord([d % w.base], w.base)
    for n in range(1, len(w) + 1):
        assert complexity(longer, n) >= complexity(w, n)


def test_block_count_examples():
    assert block_count([W("01010", 2)], BlockMatrix.from_rows(["01"], 2), 4) == 2
    assert block_count([W("000", 2), W("000", 2)], BlockMatrix.from_rows(["0", "0"], 2), 3) == 3
    assert block_count([W("01010", 2)], BlockMatrix.from_rows(["11"], 2), 4) == 0
    with pytest.raises(InsufficientDigits):
        block_count([W("0101", 2)], BlockMatrix.from_rows(["01"], 2), 4)


def test_block_count_wide_pattern_path():
    rng = random.Random(5)
    row = [rng.randrange(2) for _ in range(400)]
    pat = row[100:180]  # 2^80 does not fit int64 codes
    rows = [DigitWord(row, 2)]
    D = BlockMatrix(2, (tuple(pat),))
    assert block_count(rows, D, 300) == naive_block_count([row], [pat], 300) >= 1
    big = [rng.randrange(1000) for _ in range(50)]
    D = BlockMatrix(1000, (tuple(big[10:20]),))
    assert block_count([DigitWord(big, 1000)], D, 41) == 1


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_block_counts_sum_to_N(data):
    b = data.draw(st.sampled_from([2, 3]))
    n = data.draw(st.integers(1, 2))
    m = data.draw(st.integers(1, 2))
    N = data.draw(st.integers(1, 30))
    rows = [DigitWord(data.draw(st.lists(st.integers(0, b - 1), min_size=N + m - 1,
                                         max_size=N + m - 1)), b) for _ in range(n)]
    total = 0
    for code in range(b**(n * m)):
        total += block_count(rows, BlockMatrix.from_code(code, b, n, m), N)
    assert total == N
    rep = normality_report(rows, m, N)
    assert [int(c) for c in rep.counts] == [
        block_count(rows, BlockMatrix.from_code(c, b, n, m), N) for c in range(b**(n * m))]


def test_normality_examples():
    rep = normality_report([W("0101010101", 10)], 1, 10)
    assert rep.frequency(0) == rep.frequency(1) == Fraction(1, 2)
    assert rep.max_deviation == Fraction(2, 5)
    assert sum(rep.frequencies()) == 1
    assert rep.prefix_len == 10
    const = normality_report([W("7777", 10)], 1, 4)
    assert sorted(const.frequencies()) == [0] * 9 + [1]
    zeros = normality_report([W("0" * 9, 2)], 2, 8)
    assert zeros.counts.tolist() == [8, 0, 0, 0]


def test_chi_square_value():
    rep = normality_report([W("0011", 2)], 1, 4)
    assert rep.chi_square == 0.0
    rep = normality_report([W("0001", 2)], 1, 4)
    # (3-2)^2/2 + (1-2)^2/2
    assert rep.chi_square == 1.0


def test_shape_budget():
    with pytest.raises(ShapeBudgetExceeded):
        normality_report([W("0" * 20, 10)], 7, 10)
    with pytest.raises(ShapeBudgetExceeded):
        normality_report([W("0" * 20, 10)], 2, 10, cap=50)
