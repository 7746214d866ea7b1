from fractions import Fraction
from math import isqrt

import pytest
from hypothesis import given, settings, strategies as st

from digitforge.algnum import (AlgebraicNumber, IntPolynomial, count_roots, digits,
                               floor_scaled, normalize_unit, refine, validate)
from digitforge.errors import (EndpointIsRoot, InvalidInterval, IrrationalRequired,
                               NotSquareFree, RationalRoot, RefinementBudgetExceeded,
                               RootCountNotOne)

from oracles import bisection_interval, long_division_digits, sqrt_frac_digits

X2M2 = IntPolynomial((-2, 0, 1))


def test_validate_examples():
    a = validate(X2M2, 1, 2)
    assert (a.lo, a.hi) == (1, 2)
    # Sturm sequence x^2-2, 2x, 2: variations at 0 are (-, 0, +) -> 1, at 3 -> 0
    assert count_roots(X2M2, Fraction(0), Fraction(3)) == 1
    validate(X2M2, 0, 3)
    with pytest.raises(NotSquareFree):
        validate(IntPolynomial((1, -2, 1)), 0, 2)


def test_validate_errors():
    with pytest.raises(RootCountNotOne):
        validate(X2M2, -3, 3)
    with pytest.raises(RootCountNotOne):
        validate(X2M2, 2, 3)
    with pytest.raises(EndpointIsRoot):
        validate(IntPolynomial((-1, 1)), 1, 2)
    with pytest.raises(InvalidInterval):
        validate(X2M2, 2, 1)
    # 2x - 1 has the rational root 1/2
    with pytest.raises(RationalRoot):
        validate(IntPolynomial((-1, 2)), 0, 1)
    # (2x-1)(x^2-2) isolated around 1/2
    with pytest.raises(RationalRoot):
        validate(IntPolynomial((2, -4, -1, 2)), 0, 1)


def test_normalize_unit():
    a = normalize_unit(validate(X2M2, 1, 2))
    assert a.poly.coeffs == (-1, 2, 1)
    assert 0 <= a.lo < a.hi <= 1
    b = validate(IntPolynomial((-1, 2, 1)), 0, 1)
    assert normalize_unit(b) is b
    with pytest.raises(IrrationalRequired):
        normalize_unit(AlgebraicNumber.from_rational(Fraction(1, 3)))


def test_normalize_negative_root():
    a = normalize_unit(validate(X2M2, -2, -1))  # -sqrt2 -> 2 - sqrt2 = 0.5857...
    assert str(digits(a, 10, 6)) == "585786"


def test_refine_matches_bisection_oracle(sqrt2m1):
    lo, hi = refine(sqrt2m1, Fraction(1, 100))
    assert hi - lo <= Fraction(1, 100)
    assert lo < Fraction(41421356, 10**8) < hi
    # same root, same nesting as a plain bisection from the same start
    olo, ohi = bisection_interval([-1, 2, 1], 0, 1, 40)
    lo, hi = refine(sqrt2m1, Fraction(1, 2**40))
    assert max(lo, olo) < min(hi, ohi)


def test_refine_unchanged_and_nested(sqrt2m1):
    before = (sqrt2m1.lo, sqrt2m1.hi)
    assert refine(sqrt2m1, 10) == before
    prev = before
    for k in range(1, 30):
        lo, hi = refine(sqrt2m1, Fraction(1, 2**k))
        assert prev[0] <= lo < hi <= prev[1]
        prev = (lo, hi)


def test_floor_scaled_examples(sqrt2m1):
    third = AlgebraicNumber.from_rational(Fraction(1, 3))
    assert floor_scaled(third, 10, 3) == 333
    assert floor_scaled(sqrt2m1, 10, 5) == isqrt(2 * 10**10) - 10**5 == 41421
    assert floor_scaled(sqrt2m1, 2, 4) == 6


def test_floor_sandwich(sqrt2m1):
    for d in (0, 1, 7, 50, 300):
        n = floor_scaled(sqrt2m1, 10, d)
        assert int(sqrt2m1.lo * 10**d) == int(sqrt2m1.hi * 10**d) == n


def test_refinement_budget():
    # a "root" whose value b^d * alpha is an integer: bisection cannot separate it
    a = validate(X2M2, 1, 2)
    a.poly = IntPolynomial((-1, 2))  # corrupt on purpose: root 1/2
    a.lo, a.hi = Fraction(0), Fraction(1)
    a._lo_sign = -1
    with pytest.raises((RefinementBudgetExceeded, RationalRoot)):
        floor_scaled(a, 10, 3)


def test_digits_examples(sqrt2m1):
    assert str(digits(AlgebraicNumber.from_rational(Fraction(1, 7)), 10, 12)) == "142857142857"
    assert str(digits(AlgebraicNumber.from_rational(Fraction(1, 2)), 2, 3)) == "100"
    assert str(digits(sqrt2m1, 10, 8)) == "41421356"


def test_digits_needs_unit_interval():
    with pytest.raises(ValueError):
        digits(validate(X2M2, 1, 2), 10, 4)


def test_digit_floor_coherence(sqrt3m1):
    w = digits(sqrt3m1, 7, 300)
    assert list(w) == sqrt_frac_digits(3, 7, 300)
    prev = 0
    for n in range(1, 301):
        cur = floor_scaled(sqrt3m1, 7, n)
        assert cur - 7 * prev == w[n - 1]
        prev = cur


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 10**6), st.data(), st.integers(2, 300))
def test_rational_digits_match_long_division(q, data, b):
    p = data.draw(st.integers(0, q - 1))
    a = AlgebraicNumber.from_rational(Fraction(p, q))
    assert list(digits(a, b, 60)) == long_division_digits(p, q, b, 60)


def test_shift_polynomial():
    p = IntPolynomial((5, -3, 0, 2))
    for t in (-3, 0, 4):
        s = p.shift(t)
        for x in range(-5, 6):
            assert s(x) == p(x + t)


def test_copy_is_independent(sqrt2m1):
    c = sqrt2m1.copy()
    refine(c, Fraction(1, 10**6))
    assert sqrt2m1.width > c.width
