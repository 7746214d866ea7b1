"""Exact real algebraic numbers: integer polynomial plus a rational
isolating interval, refined by bisection.  No floating point is used."""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .errors import (EndpointIsRoot, InputError, InsufficientDigits,
                     InvalidInterval, IrrationalRequired, NotSquareFree,
                     RationalRoot, RefinementBudgetExceeded, RootCountNotOne)
from .words import DigitWord, from_digits, to_digits

RationalLike = Union[int, Fraction]


@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial, constant term first."""

    coeffs: tuple

    def __post_init__(self):
        c = [int(x) for x in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        if len(c) < 2:
            raise InputError("polynomial must have degree >= 1")
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1]

    def eval_sign(self, x: RationalLike) -> int:
        """Sign of p(x) for rational x, by integer-only homogeneous Horner."""
        x = Fraction(x)
        n, d = x.numerator, x.denominator
        acc, dpow = self.coeffs[-1], 1
        for c in reversed(self.coeffs[:-1]):
            dpow *= d
            acc = acc * n + c * dpow
        return (acc > 0) - (acc < 0)

    def __call__(self, x: RationalLike) -> Fraction:
        x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> tuple:
        return tuple(i * c for i, c in enumerate(self.coeffs) if i)

    def shift(self, t: int) -> "IntPolynomial":
        """p(x + t), by repeated synthetic division."""
        c = list(self.coeffs)
        n = len(c)
        for i in range(n - 1):
            for j in range(n - 2, i - 1, -1):
                c[j] += t * c[j + 1]
        return IntPolynomial(tuple(c))

    def __str__(self):
        return format_polynomial(self.coeffs)


def format_polynomial(coeffs: Sequence[int]) -> str:
    """Canonical text, highest degree first, e.g. ``x^2+2*x-1``."""
    parts = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if i == 0:
            body = str(a)
        else:
            mono = "x" if i == 1 else "x^%d" % i
            body = mono if a == 1 else "%d*%s" % (a, mono)
        parts.append((sign, body))
    if not parts:
        return "0"
    first_sign, first = parts[0]
    text = ("-" if first_sign == "-" else "") + first
    return text + "".join(s + b for s, b in parts[1:])


# --- polynomial arithmetic over Q (coefficient lists, constant first) -------

def _strip(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _rem(a, b):
    a = [Fraction(x) for x in a]
    b = _strip(b)
    lb = Fraction(b[-1])
    while len(a) >= len(b) and a:
        q = a[-1] / lb
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] -= q * c
        a = _strip(a)
    return a


def sturm_sequence(poly: IntPolynomial) -> list:
    seq = [list(map(Fraction, poly.coeffs)), list(map(Fraction, poly.derivative()))]
    while True:
        r = _rem(seq[-2], seq[-1])
        if not r:
            return seq
        seq.append([-x for x in r])


def _eval_q(p, x):
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def sign_variations(seq, x: Fraction) -> int:
    signs = [s for s in ((v > 0) - (v < 0) for v in (_eval_q(p, x) for p in seq)) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(poly: IntPolynomial, lo: Fraction, hi: Fraction, seq=None) -> int:
    """Distinct real roots in (lo, hi] by Sturm's theorem."""
    seq = seq or sturm_sequence(poly)
    return sign_variations(seq, lo) - sign_variations(seq, hi)


def is_square_free(poly: IntPolynomial, seq=None) -> bool:
    # the last Sturm element is gcd(p, p') up to a constant
    seq = seq or sturm_sequence(poly)
    return len(seq[-1]) == 1


# --- algebraic numbers -----------------------------------------------------

class AlgebraicNumber:
    """A real algebraic number.

    Either an exact rational (``rational`` set, ``poly`` None) or the unique
    root of a square-free integer polynomial inside the open interval
    ``(lo, hi)``.  The interval is refined in place; instances are not
    thread-safe, use :meth:`copy` per worker.
    """

    def __init__(self, poly: Optional[IntPolynomial], lo: Fraction, hi: Fraction,
                 rational: Optional[Fraction] = None):
        self.poly = poly
        self.lo = Fraction(lo)
        self.hi = Fraction(hi)
        self.rational = rational
        self.spec_interval = (self.lo, self.hi)
        self._lo_sign = poly.eval_sign(self.lo) if poly is not None else 0

    @classmethod
    def from_rational(cls, r: RationalLike) -> "AlgebraicNumber":
        r = Fraction(r)
        return cls(None, r, r, rational=r)

    @property
    def is_rational(self) -> bool:
        return self.rational is not None

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def copy(self) -> "AlgebraicNumber":
        other = AlgebraicNumber.__new__(AlgebraicNumber)
        other.__dict__.update(self.__dict__)
        return other

    def bisect(self) -> None:
        mid = (self.lo + self.hi) / 2
        s = self.poly.eval_sign(mid)
        if s == 0:
            # only reachable for a rational root, which validate() rejects
            raise RationalRoot("hit an exact root at %s" % mid)
        if s == self._lo_sign:
            self.lo = mid
        else:
            self.hi = mid

    def refine(self, width: RationalLike) -> tuple:
        """Bisect until the interval width is at most ``width``."""
        width = Fraction(width)
        if width <= 0:
            raise InputError("width must be positive")
        if self.is_rational:
            return self.lo, self.hi
        while self.width > width:
            self.bisect()
        return self.lo, self.hi

    def floor_scaled(self, b: int, d: int) -> int:
        """Integer part of ``alpha * b**d``."""
        if b < 2 or d < 0:
            raise InputError("need b >= 2 and d >= 0")
        scale = b**d
        if self.is_rational:
            r = self.rational
            return (r.numerator * scale) // r.denominator
        cap = 64 + math.ceil(4 * d * math.log2(b))
        used = 0
        # width below 1/scale is necessary before the floors can agree
        target = Fraction(1, scale)
        while self.width > target and used < cap:
            self.bisect()
            used += 1
        while True:
            n_lo = math.floor(self.lo * scale)
            if n_lo == math.floor(self.hi * scale):
                return n_lo
            if used >= cap:
                raise RefinementBudgetExceeded(
                    "could not separate alpha*%d^%d from an integer in %d bisections"
                    % (b, d, cap))
            self.bisect()
            used += 1

    def __repr__(self):
        if self.is_rational:
            return "AlgebraicNumber(%s)" % self.rational
        return "AlgebraicNumber(%s in (%s, %s))" % (self.poly, self.lo, self.hi)


def _rational_root_in(poly: IntPolynomial, lo: Fraction, hi: Fraction):
    """A rational root of ``poly`` strictly inside (lo, hi), or None.

    Every rational root p/q (lowest terms) has q | leading coefficient, so it
    is a multiple of 1/|leading|; only those grid points need testing.
    """
    a = abs(poly.leading)
    first, last = math.floor(lo * a) + 1, math.ceil(hi * a) - 1
    if last - first > 4096:
        return "too-many"
    for m in range(first, last + 1):
        x = Fraction(m, a)
        if poly.eval_sign(x) == 0:
            return x
    return None


def validate(poly: IntPolynomial, lo: RationalLike, hi: RationalLike) -> AlgebraicNumber:
    lo, hi = Fraction(lo), Fraction(hi)
    if not lo < hi:
        raise InvalidInterval("need lo < hi, got (%s, %s)" % (lo, hi))
    if poly.eval_sign(lo) == 0 or poly.eval_sign(hi) == 0:
        raise EndpointIsRoot("interval endpoint is a root of %s" % poly)
    seq = sturm_sequence(poly)
    if not is_square_free(poly, seq):
        raise NotSquareFree("%s has a repeated factor" % poly)
    n = count_roots(poly, lo, hi, seq)
    if n != 1:
        raise RootCountNotOne("%s has %d roots in (%s, %s)" % (poly, n, lo, hi))
    alpha = AlgebraicNumber(poly, lo, hi)
    probe = alpha.copy()
    while True:
        r = _rational_root_in(poly, probe.lo, probe.hi)
        if r != "too-many":
            break
        probe.refine(probe.width / 4096)
    if r is not None:
        raise RationalRoot("the isolated root %s is rational" % r)
    return alpha


def normalize_unit(alpha: AlgebraicNumber) -> AlgebraicNumber:
    """``alpha - floor(alpha)`` as a root of the shifted polynomial in (0, 1)."""
    if alpha.is_rational:
        raise IrrationalRequired("normalize_unit needs an irrational root")
    t = alpha.floor_scaled(2, 0)
    if t == 0:
        return alpha
    return validate(alpha.poly.shift(t), alpha.lo - t, alpha.hi - t)


def refine(alpha: AlgebraicNumber, width: RationalLike) -> tuple:
    return alpha.refine(width)


def floor_scaled(alpha, b: int, d: int) -> int:
    return alpha.floor_scaled(b, d)


def digits(alpha, b: int, N: int) -> DigitWord:
    """First ``N`` base-``b`` digits of ``alpha`` in [0, 1).

    All digits come from the single integer ``floor(alpha * b**N)``, since
    ``floor(alpha*b**n) = floor(alpha*b**N) // b**(N-n)``.  For rationals this
    yields the terminating expansion (never trailing ``b-1`` runs).
    """
    if N < 1:
        raise InputError("N must be >= 1")
    if alpha.floor_scaled(b, 0) != 0:
        raise InputError("digits() needs 0 <= alpha < 1; normalize first")
    return DigitWord(to_digits(alpha.floor_scaled(b, N), b, N), b)


class DigitPrefixNumber:
    """The real number ``0.w_1 w_2 ...`` known only through a finite prefix.

    Answers ``floor_scaled(b, d)`` exactly for ``d <= len(word)``, which is
    enough to evaluate floor sums over constructed words.
    """

    def __init__(self, word: DigitWord):
        self.word = word

    is_rational = False

    def copy(self):
        return self

    def floor_scaled(self, b: int, d: int) -> int:
        if b != self.word.base:
            raise InputError("prefix number is base %d, asked base %d" % (self.word.base, b))
        if d > len(self.word):
            raise InsufficientDigits("floor at %d needs more than %d digits" % (d, len(self.word)))
        return from_digits(self.word.digits[:d], b) if d else 0
