"""Finite digit words, the word-value map, block complexity and
(joint) block-frequency statistics over finite prefixes."""

from array import array
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import (BaseMismatch, BlockTooLong, EmptyWord, InputError,
                     InsufficientDigits, ShapeBudgetExceeded)

DIGIT_CHARS = "0123456789abcdefghijklmnopqrstuvwxyz"
_CHAR_VALUE = {c: i for i, c in enumerate(DIGIT_CHARS)}
_SMALL = 48  # digits handled by the plain loop in to_digits/from_digits

DEFAULT_SHAPE_CAP = 10**6


@lru_cache(maxsize=512)
def _pow(b: int, e: int) -> int:
    return b**e


def to_digits(x: int, b: int, n: int) -> list[int]:
    """Big-endian base-``b`` digits of ``0 <= x < b**n``, left-padded to ``n``."""
    if x < 0:
        raise ValueError("negative value")
    if n <= _SMALL:
        out = [0] * n
        for i in range(n - 1, -1, -1):
            x, out[i] = divmod(x, b)
        if x:
            raise ValueError("value does not fit in %d digits" % n)
        return out
    h = n // 2
    hi, lo = divmod(x, _pow(b, h))
    return to_digits(hi, b, n - h) + to_digits(lo, b, h)


def from_digits(digits: Sequence[int], b: int) -> int:
    """Inverse of :func:`to_digits`; the last digit is the units digit."""
    n = len(digits)
    if n <= _SMALL:
        v = 0
        for d in digits:
            v = v * b + d
        return v
    h = n // 2
    return from_digits(digits[:n - h], b) * _pow(b, h) + from_digits(digits[n - h:], b)


class DigitWord:
    """Immutable word over ``{0, ..., base-1}``.

    Python indexing is 0-based: ``w[0]`` is the leftmost digit (a_1 in the
    usual 1-based notation). Digits are stored one byte each for
    ``base <= 256`` and as 32-bit unsigned integers otherwise.
    """

    __slots__ = ("base", "_d")

    def __init__(self, digits: Iterable[int], base: int):
        if base < 2:
            raise InputError("base must be >= 2, got %r" % (base,))
        self.base = base
        if base <= 256:
            d = digits if isinstance(digits, bytes) else bytes(bytearray(digits))
            if d and max(d) >= base:
                raise InputError("digit out of range for base %d" % base)
        else:
            d = array("I", digits)
            if d and max(d) >= base:
                raise InputError("digit out of range for base %d" % base)
        self._d = d

    @classmethod
    def from_str(cls, text: str, base: int) -> "DigitWord":
        if base > 36:
            return cls((int(t) for t in text.split()), base)
        try:
            return cls([_CHAR_VALUE[c] for c in text.lower()], base)
        except KeyError as exc:
            raise InputError("bad digit character %s" % exc) from None

    @property
    def digits(self):
        return self._d

    def to_numpy(self) -> np.ndarray:
        if isinstance(self._d, bytes):
            return np.frombuffer(self._d, dtype=np.uint8).astype(np.int64)
        return np.asarray(self._d, dtype=np.int64)

    def __len__(self):
        return len(self._d)

    def __iter__(self):
        return iter(self._d)

    def __getitem__(self, key):
        if isinstance(key, slice):
            return DigitWord(self._d[key], self.base)
        return self._d[key]

    def __add__(self, other: "DigitWord") -> "DigitWord":
        _check_same_base([self, other])
        return DigitWord(self._d + other._d, self.base)

    def __eq__(self, other):
        if not isinstance(other, DigitWord):
            return NotImplemented
        return self.base == other.base and self._d == other._d

    def __hash__(self):
        return hash((self.base, bytes(self._d)))

    def __str__(self):
        if self.base <= 36:
            return "".join(DIGIT_CHARS[d] for d in self._d)
        return " ".join(map(str, self._d))

    def __repr__(self):
        s = str(self)
        if len(s) > 40:
            s = s[:37] + "..."
        return "DigitWord(%r, base=%d)" % (s, self.base)


def _check_same_base(words):
    bases = {w.base for w in words}
    if len(bases) > 1:
        raise BaseMismatch("words mix bases %s" % sorted(bases))


def value(w: DigitWord) -> int:
    """sum s_i b^i where s_0 is the last symbol of ``w``."""
    if len(w) == 0:
        raise EmptyWord("value of the empty word")
    return from_digits(w.digits, w.base)


def value_mod(w: DigitWord, k: int) -> int:
    """``value(w) mod b**k``, read off the last ``k`` symbols."""
    if len(w) == 0:
        raise EmptyWord("value of the empty word")
    if not 1 <= k <= len(w):
        raise BlockTooLong("k=%d outside [1, %d]" % (k, len(w)))
    return from_digits(w.digits[len(w) - k:], w.base)


def complexity(w: DigitWord, n: int) -> int:
    """Number of distinct length-``n`` factors of the finite word ``w``."""
    if not 1 <= n <= len(w):
        raise BlockTooLong("block length %d outside [1, %d]" % (n, len(w)))
    d = w.digits
    return len({bytes(d[i:i + n]) for i in range(len(d) - n + 1)})


def complexity_profile(w: DigitWord, n_max: int) -> list[int]:
    """``[complexity(w, n) for n in 1..n_max]`` from one suffix array pass."""
    from .detectors import suffix_array, lcp_array

    if not 1 <= n_max <= len(w):
        raise BlockTooLong("block length %d outside [1, %d]" % (n_max, len(w)))
    s = w.to_numpy()
    T = len(s)
    sa = suffix_array(s)
    lcp = lcp_array(s, sa)
    out = []
    for n in range(1, n_max + 1):
        # a new distinct factor starts at every rank whose lcp with its
        # predecessor is < n, provided the suffix is long enough
        out.append(int(np.count_nonzero((lcp < n) & (sa <= T - n))))
    return out


@dataclass(frozen=True)
class BlockMatrix:
    """An ``rows x cols`` matrix of digits; window pattern for :func:`block_count`."""

    base: int
    entries: tuple

    def __post_init__(self):
        ent = tuple(tuple(int(x) for x in r) for r in self.entries)
        object.__setattr__(self, "entries", ent)
        if not ent or not ent[0]:
            raise InputError("empty block matrix")
        if any(len(r) != len(ent[0]) for r in ent):
            raise InputError("block matrix is not rectangular")
        if any(not 0 <= x < self.base for r in ent for x in r):
            raise InputError("matrix entry out of range for base %d" % self.base)

    @classmethod
    def from_rows(cls, rows: Sequence[str], base: int) -> "BlockMatrix":
        return cls(base, tuple(tuple(DigitWord.from_str(r, base)) for r in rows))

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    def code(self) -> int:
        """Integer index of this matrix in row-major base-b order."""
        return from_digits([x for r in self.entries for x in r], self.base)

    @classmethod
    def from_code(cls, code: int, base: int, rows: int, cols: int) -> "BlockMatrix":
        flat = to_digits(code, base, rows * cols)
        return cls(base, tuple(tuple(flat[i * cols:(i + 1) * cols]) for i in range(rows)))

    def __str__(self):
        return "/".join(str(DigitWord(r, self.base)) for r in self.entries)


def _check_rows(rows, n_rows, m, N):
    if not rows:
        raise InputError("no rows")
    _check_same_base(rows)
    if n_rows is not None and len(rows) != n_rows:
        raise InputError("matrix has %d rows but %d words given" % (n_rows, len(rows)))
    if N < 1 or m < 1:
        raise InputError("N and m must be positive")
    need = N + m - 1
    short = [len(r) for r in rows if len(r) < need]
    if short:
        raise InsufficientDigits("need %d digits per row, have %d" % (need, min(short)))


def _window_codes(row: np.ndarray, m: int, N: int, b: int) -> np.ndarray:
    codes = np.zeros(N, dtype=np.int64)
    for c in range(m):
        codes = codes * b + row[c:c + N]
    return codes


def block_count(rows: Sequence[DigitWord], D: BlockMatrix, N: int) -> int:
    """Number of columns ``i`` in 1..N whose ``rows(D) x cols(D)`` window equals ``D``."""
    _check_rows(rows, D.rows, D.cols, N)
    b, m = rows[0].base, D.cols
    if rows[0].base != D.base:
        raise BaseMismatch("matrix base %d, words base %d" % (D.base, rows[0].base))
    hit = np.ones(N, dtype=bool)
    if b**m < 2**62:
        for r, pattern in zip(rows, D.entries):
            target = from_digits(pattern, b)
            hit &= _window_codes(r.to_numpy(), m, N, b) == target
        return int(np.count_nonzero(hit))
    # patterns too wide for int64 codes: locate each row pattern directly
    for r, pattern in zip(rows, D.entries):
        row_hit = np.zeros(N, dtype=bool)
        if b <= 256:
            hay, needle = bytes(r.digits[:N + m - 1]), bytes(pattern)
        else:
            hay = np.asarray(r.digits[:N + m - 1], dtype=">u4").tobytes()
            needle = np.asarray(pattern, dtype=">u4").tobytes()
        step = 1 if b <= 256 else 4
        pos = hay.find(needle)
        while pos != -1:
            if pos % step == 0:
                row_hit[pos // step] = True
            pos = hay.find(needle, pos + 1)
        hit &= row_hit
    return int(np.count_nonzero(hit))


@dataclass
class NormalityReport:
    """Window counts of every ``n x m`` digit matrix over the first ``N`` columns.

    These are prefix statistics: ``prefix_len`` digits of each row were read.
    """

    base: int
    n_rows: int
    m: int
    N: int
    counts: np.ndarray

    @property
    def prefix_len(self) -> int:
        return self.N + self.m - 1

    @property
    def n_shapes(self) -> int:
        return len(self.counts)

    def frequency(self, code: int) -> Fraction:
        return Fraction(int(self.counts[code]), self.N)

    def frequencies(self) -> list[Fraction]:
        return [Fraction(int(c), self.N) for c in self.counts]

    @property
    def expected(self) -> Fraction:
        return Fraction(1, self.n_shapes)

    @property
    def max_deviation(self) -> Fraction:
        K, N = self.n_shapes, self.N
        extremes = (int(self.counts.max()), int(self.counts.min()))
        return max(Fraction(abs(c * K - N), N * K) for c in extremes)

    @property
    def chi_square(self) -> float:
        K, N = self.n_shapes, self.N
        sq = int(np.dot(self.counts.astype(object), self.counts.astype(object)))
        return float(Fraction(K * sq, N) - N)

    def matrix(self, code: int) -> BlockMatrix:
        return BlockMatrix.from_code(code, self.base, self.n_rows, self.m)


def normality_report(rows: Sequence[DigitWord], m: int, N: int,
                     cap: int = DEFAULT_SHAPE_CAP) -> NormalityReport:
    _check_rows(rows, None, m, N)
    b, n = rows[0].base, len(rows)
    K = b**(n * m)
    if K > cap:
        raise ShapeBudgetExceeded("%d^%d shapes exceed the cap %d" % (b, n * m, cap))
    width = b**m
    codes = np.zeros(N, dtype=np.int64)
    for r in rows:
        codes = codes * width + _window_codes(r.to_numpy(), m, N, b)
    counts = np.bincount(codes, minlength=K).astype(np.int64)
    return NormalityReport(b, n, m, N, counts)
