import math
import random
from fractions import Fraction
from math import isqrt

import pytest
from hypothesis import given, settings, strategies as st

from digitforge.algnum import AlgebraicNumber, IntPolynomial, digits, validate
from digitforge.errors import EmptyArray, ShapeMismatch
from digitforge.gcdlab import (CoefficientArray, ExponentArray, ScanConfig, array_stats,
                               certificate_sample, eval_floor_sum, gcd_pow, grid_enumerator,
                               is_admissible, nonlinear_experiment, poly_floor_gcd,
                               poly_pair_gcd, scan)
from digitforge.constructors import certify, generate
from digitforge.words import DigitWord, value

E = lambda *rows: ExponentArray(rows)  # noqa: E731
C = lambda *rows: CoefficientArray(rows)  # noqa: E731
RAT = AlgebraicNumber.from_rational


def sqrt_floor(c, b, d):
    """[sqrt(c) * b^d] - [sqrt(c)] * b^d, i.e. floor of the fractional part scaled."""
    return isqrt(c * b**(2 * d)) - isqrt(c) * b**d


def test_array_stats_examples():
    assert array_stats(E((3, 7), (5,))) == (3, 4, 2)
    assert array_stats(E((5,))) == (5, math.inf, math.inf)
    assert array_stats(E((2, 4), (2, 6)))[2] == 0
    with pytest.raises(EmptyArray):
        E()


def test_is_admissible_examples():
    assert is_admissible(E((3, 7), (5,)), Fraction(7, 3))
    assert not is_admissible(E((3, 7), (5,)), 2)
    assert not is_admissible(E((7, 3)), 10)
    assert not is_admissible(E((3, 3)), 10)
    assert not is_admissible(E((0, 3)), 10)


def test_gcd_pow_examples():
    assert gcd_pow(24, 10, 3) == 8
    assert gcd_pow(0, 10, 3) == 1000
    assert gcd_pow(4000, 10, 3) == 1000
    assert gcd_pow(-4000, 10, 3) == 1000
    assert gcd_pow(7, 10, 0) == 1


@settings(max_examples=500, deadline=None)
@given(st.integers(-10**9, 10**9), st.integers(2, 100), st.integers(0, 20))
def test_gcd_pow_matches_naive(Q, b, m):
    assert gcd_pow(Q, b, m) == math.gcd(Q, b**m)


def test_eval_main6_and_main7(sqrt2m1):
    s = eval_floor_sum([sqrt2m1], C((1, -1)), E((4, 2)), "main6", 10)
    assert (s.Q, s.R, s.ratio) == (4142 - 41, 1, 0.0)
    s = eval_floor_sum([sqrt2m1], None, E((5,)), "main7", 10)
    assert (s.Q, s.R) == (41421, 1)
    for d in (1, 9, 33):
        s = eval_floor_sum([sqrt2m1], C((1,)), E((d,)), "main6", 10)
        assert s.Q == sqrt_floor(2, 10, d) and s.floor_D == d


def test_eval_main4_main5(sqrt2m1, sqrt3m1):
    # main4: [a*10^6 + b*10^3 + 1/2]; 40-digit truncations pin the floor
    s = eval_floor_sum([sqrt2m1, sqrt3m1], None, E((6,), (3,)), "main4", 10, P=Fraction(1, 2))
    approx = Fraction(sqrt_floor(2, 10, 40), 10**34) + Fraction(sqrt_floor(3, 10, 40), 10**37)
    assert math.floor(approx + Fraction(1, 2)) == math.floor(approx + Fraction(1, 2) + Fraction(1, 10**30))
    assert s.Q == math.floor(approx + Fraction(1, 2))
    s = eval_floor_sum([sqrt2m1, sqrt3m1], C((2, -1), (Fraction(1, 3),)), E((3, 5), (4,)),
                       "main5", 10)
    ulp = Fraction(1, 10**40)
    a = Fraction(sqrt_floor(2, 10, 40), 10**40)
    b = Fraction(sqrt_floor(3, 10, 40), 10**40)
    lower = 2 * a * 10**3 - (a + ulp) * 10**5 + b * 10**4 / 3
    upper = 2 * (a + ulp) * 10**3 - a * 10**5 + (b + ulp) * 10**4 / 3
    assert math.floor(lower) == math.floor(upper) == s.Q
    assert s.floor_D == 3


def test_shape_checks(sqrt2m1):
    with pytest.raises(ShapeMismatch):
        eval_floor_sum([sqrt2m1], C((1, -1)), E((4,)), "main6", 10)
    with pytest.raises(ShapeMismatch):
        eval_floor_sum([sqrt2m1], None, E((4, 5)), "main7", 10)
    with pytest.raises(ShapeMismatch):
        eval_floor_sum([sqrt2m1, sqrt2m1], C((1,)), E((4,)), "main5", 10)


def test_sample_divisibility_invariants(sqrt2m1):
    rng = random.Random(4)
    for _ in range(40):
        d1 = rng.randrange(1, 60)
        d2 = d1 + rng.randrange(1, 60)
        s = eval_floor_sum([sqrt2m1], C((1, -1)), E((d1, d2)), "main6", 10)
        assert 10**s.floor_D % s.R == 0
        assert s.Q == 0 or s.Q % s.R == 0
        assert 0 <= s.ratio <= 1


def test_scale_law(sqrt2m1):
    w = digits(sqrt2m1.copy(), 10, 120)
    for d, t in [(5, 3), (40, 17), (1, 60)]:
        s = eval_floor_sum([sqrt2m1], C((1, -10**t)), E((d + t, d)), "main6", 10)
        assert s.Q == value(w[d:d + t])


def test_certificate_bridge():
    for mode, s in [("F", None), ("G", 3), ("G", -1)]:
        w, steps = generate(DigitWord.from_str("2718", 10), mode, 400, s)
        for st_, cert in zip(steps, certify(steps, w)):
            sample = certificate_sample(cert, w)
            assert sample.R % 10**st_.congruence_modulus_exp == 0
            assert sample.ratio >= st_.congruence_modulus_exp / sample.floor_D - 1e-12


def test_grid_enumerator_admissible():
    cfg = ScanConfig(L=2, floor_range=(50, 120), gap_min=20)
    arrays = list(grid_enumerator((2,), cfg, t_step=7, g_step=3))
    assert arrays
    for D in arrays:
        f, gap, _ = array_stats(D)
        assert is_admissible(D, 2) and 50 <= f <= 120 and gap >= 20
    multi = list(grid_enumerator((1, 1, 1), cfg, t_step=10, g_step=5))
    assert all(is_admissible(D, 2) and array_stats(D)[2] >= 20 for D in multi)


def test_scan_small_and_empty(sqrt2m1):
    cfg = ScanConfig(L=2, epsilon=0.1, floor_range=(20, 40), gap_min=5)
    rep = scan([sqrt2m1], C((1, -1)), "main6", cfg, 10,
               grid_enumerator((2,), cfg, t_step=5, g_step=5))
    assert rep.samples and rep.max_ratio == max(s.ratio for _, s in rep.samples)
    assert rep.violations == [(D, s) for D, s in rep.samples if s.ratio >= 0.1]
    assert scan([sqrt2m1], C((1, -1)), "main6", cfg, 10, iter(())).samples == []


def test_scan_reports_violations_unclamped():
    # rational alpha = 1/2: [b^d/2] differences are highly divisible
    half = RAT(Fraction(1, 2))
    cfg = ScanConfig(L=3, epsilon=0.1, floor_range=(10, 12), gap_min=2)
    rep = scan([half], C((1, -1)), "main6", cfg, 10)
    assert rep.violations and rep.max_ratio > 0.5


def test_scan_perturbation(sqrt2m1, sqrt3m1):
    cfg = ScanConfig(floor_range=(10, 12), gap_min=3, perturbation=[0, Fraction(7, 2)])
    rep = scan([sqrt2m1, sqrt3m1], None, "main4", cfg, 10)
    D1, s1 = rep.samples[1]
    base = eval_floor_sum([sqrt2m1, sqrt3m1], None, D1, "main4", 10)
    assert s1.Q in (base.Q + 3, base.Q + 4)


def test_poly_gcd_examples():
    r2 = validate(IntPolynomial((-2, 0, 1)), 1, 2)
    s = poly_floor_gcd([RAT(0), RAT(1)], 10, 7)
    assert (s.Q, s.R, s.ratio) == (10**7, 10**7, 1.0)
    s = poly_floor_gcd([RAT(0), r2], 10, 2)
    assert (s.Q, s.R) == (141, 1)
    s = poly_floor_gcd([RAT(0), RAT(1), r2.copy()], 10, 2)
    assert (s.Q, s.R) == (14242, 2)


def test_poly_pair_gcd_examples():
    r2 = validate(IntPolynomial((-2, 0, 1)), 1, 2)
    r3 = validate(IntPolynomial((-3, 0, 1)), 1, 2)
    s = poly_pair_gcd([RAT(0), r2], [RAT(0), r3], 10, 2)
    assert (s.Q_f, s.Q_g, s.gcd) == (141, 173, 1)
    s = poly_pair_gcd([RAT(0), r2], [RAT(0), r2.copy()], 10, 5)
    assert s.gcd == s.Q_f == isqrt(2 * 10**10) and s.ratio >= 1
    # f(x) = 1/3 + 10^-9 x^2 floors to 0 at n = 2
    s = poly_pair_gcd([RAT(Fraction(1, 3)), RAT(0), RAT(Fraction(1, 10**9))],
                      [RAT(0), RAT(5)], 10, 2)
    assert s.Q_f == 0 and s.gcd == s.Q_g == 500


def test_nonlinear_examples(sqrt2m1):
    # floors from isqrt: [a 10^3] = 414, [a 10^2] = 41
    assert sqrt_floor(2, 10, 3) == 414 and sqrt_floor(2, 10, 2) == 41
    s = nonlinear_experiment("product", sqrt2m1, sqrt2m1.copy(), 1, 2, 10)
    assert (s.Q, s.R) == (414 * 41 + 1, 25)
    s = nonlinear_experiment("square_plus", sqrt2m1, sqrt2m1.copy(), 1, 2, 10)
    assert (s.Q, s.R) == (414**2 + 41, 1)
    s = nonlinear_experiment("nested", sqrt2m1, sqrt2m1.copy(), 0, 2, 10)
    # (sqrt2 - 1) * 1681 from a 40-digit isqrt lower bound
    assert math.floor(Fraction(sqrt_floor(2, 10, 40), 10**40) * 1681) == 696
    assert (s.Q, s.R) == (696, 4)
