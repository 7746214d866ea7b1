"""Search digit words for long repetitions, shared blocks and linear
congruences between blocks, and re-verify any witness from scratch."""

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence

import numpy as np

from .errors import BaseMismatch, BudgetExceeded, IndexOutOfRange, InputError, RangeError
from .words import DigitWord, _check_same_base

DEFAULT_CANDIDATE_CAP = 10**8


@dataclass(frozen=True)
class RepetitionWitness:
    """``A B A' B`` is a prefix of the subject word."""

    a_len: int
    a2_len: int
    b_len: int

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.a_len + self.a2_len, self.b_len)


@dataclass(frozen=True)
class CommonBlockWitness:
    """``A B`` is a prefix of the first word and ``A' B`` of the second."""

    a_len: int
    a2_len: int
    b_len: int

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.a_len + self.a2_len, self.b_len)


@dataclass(frozen=True)
class CongruenceSpec:
    coefficients: tuple
    word_assignment: Optional[tuple] = None

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coefficients)
        if not coeffs or any(c == 0 for c in coeffs):
            raise InputError("coefficients must be a nonempty list of nonzero integers")
        object.__setattr__(self, "coefficients", coeffs)
        assign = self.word_assignment
        assign = (0,) * len(coeffs) if assign is None else tuple(int(j) for j in assign)
        if len(assign) != len(coeffs):
            raise InputError("word_assignment must give one word per coefficient")
        object.__setattr__(self, "word_assignment", assign)

    @property
    def m(self) -> int:
        return len(self.coefficients)


@dataclass(frozen=True)
class CongruenceWitness:
    """Blocks ``B^j`` of common length ``k`` with ``A^j B^j`` a prefix of
    word ``word_indices[j]`` and ``sum a_j value(B^j) = 0 (mod b^k)``."""

    block_len: int
    prefix_lens: tuple
    blocks: tuple
    coefficients: tuple = ()
    word_indices: tuple = ()

    @property
    def has_empty_prefix(self) -> bool:
        return any(p == 0 for p in self.prefix_lens)

    @property
    def ratio(self) -> Fraction:
        return Fraction(max(self.prefix_lens), self.block_len)


# --- suffix array ------------------------------------------------------------

def suffix_array(s: np.ndarray) -> np.ndarray:
    """Suffix array by prefix doubling (O(n log^2 n))."""
    n = len(s)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    rank = np.unique(np.asarray(s), return_inverse=True)[1].astype(np.int64)
    k = 1
    while True:
        second = np.full(n, -1, dtype=np.int64)
        if k < n:
            second[:n - k] = rank[k:]
        order = np.lexsort((second, rank))
        r, sd = rank[order], second[order]
        new = np.empty(n, dtype=np.int64)
        new[order] = np.concatenate(([0], np.cumsum((r[1:] != r[:-1]) | (sd[1:] != sd[:-1]))))
        rank = new
        if rank.max() == n - 1:
            return order.astype(np.int64)
        k *= 2


def lcp_array(s: np.ndarray, sa: np.ndarray) -> np.ndarray:
    """``lcp[r]`` = longest common prefix of suffixes ``sa[r-1]`` and ``sa[r]`` (Kasai)."""
    n = len(sa)
    lcp = [0] * n
    rank = [0] * n
    sal = sa.tolist()
    sl = s.tolist()
    for i, p in enumerate(sal):
        rank[p] = i
    h = 0
    for p in range(n):
        r = rank[p]
        if r == 0:
            h = 0
            continue
        q = sal[r - 1]
        while p + h < n and q + h < n and sl[p + h] == sl[q + h]:
            h += 1
        lcp[r] = h
        if h:
            h -= 1
    return np.asarray(lcp, dtype=np.int64)


def _group_labels(sa, lcp, k):
    """Label positions so that equal labels mean equal length-k blocks."""
    grp = np.cumsum(lcp < k) - 1
    lab = np.empty_like(grp)
    lab[sa] = grp
    return lab, int(grp[-1]) + 1


# --- repetition and common-block profiles ---------------------------------

def repetition_profile(w: DigitWord, k_min: int, k_max: int, allow_empty: bool = False) -> dict:
    """Best ``A B A' B`` prefix decomposition for each block length ``k``.

    Minimizes ``(|A| + |A'|) / k``; ties go to the smallest ``|A|``.
    """
    T = len(w)
    if not 1 <= k_min <= k_max or 2 * k_max + 2 > T:
        raise RangeError("need 1 <= k_min <= k_max and 2*k_max+2 <= %d" % T)
    lo = 0 if allow_empty else 1
    s = w.to_numpy()
    sa = suffix_array(s)
    lcp = lcp_array(s, sa)
    pos = np.arange(T, dtype=np.int64)
    out = {}
    for k in range(k_min, k_max + 1):
        lab, G = _group_labels(sa, lcp, k)
        first = np.full(G, T, dtype=np.int64)
        np.minimum.at(first, lab[lo:], pos[lo:])
        # second copy of B must start past A B plus a (possibly empty) A'
        ok = pos >= first[lab] + k + lo
        ok[T - k + 1:] = False
        js = np.flatnonzero(ok)
        if len(js) == 0:
            out[k] = None
            continue
        j = int(js[0])
        i = int(first[lab[j]])
        out[k] = RepetitionWitness(i, j - i - k, k)
    return out


def common_block_profile(w1: DigitWord, w2: DigitWord, k_min: int, k_max: int,
                         allow_empty: bool = False) -> dict:
    """Best ``A B`` / ``A' B`` prefix pair of two words for each ``k``."""
    if w1.base != w2.base:
        raise BaseMismatch("words have bases %d and %d" % (w1.base, w2.base))
    if not 1 <= k_min <= k_max or min(len(w1), len(w2)) < k_max + 1:
        raise RangeError("need 1 <= k_min <= k_max < min word length")
    lo = 0 if allow_empty else 1
    T1, T2 = len(w1), len(w2)
    s = np.concatenate((w1.to_numpy(), [w1.base], w2.to_numpy()))
    sa = suffix_array(s)
    lcp = lcp_array(s, sa)
    T = len(s)
    big = 2 * T + 2
    p1 = np.arange(lo, T1, dtype=np.int64)
    p2 = np.arange(T1 + 1 + lo, T, dtype=np.int64)
    out = {}
    for k in range(k_min, k_max + 1):
        lab, G = _group_labels(sa, lcp, k)
        m1 = np.full(G, big, dtype=np.int64)
        m2 = np.full(G, big, dtype=np.int64)
        # the unique separator keeps any lcp >= k block inside one word
        np.minimum.at(m1, lab[p1], p1)
        np.minimum.at(m2, lab[p2], p2 - (T1 + 1))
        valid = (m1 < big) & (m2 < big)
        if not valid.any():
            out[k] = None
            continue
        key = np.where(valid, (m1 + m2) * big + m1, np.iinfo(np.int64).max)
        g = int(np.argmin(key))
        out[k] = CommonBlockWitness(int(m1[g]), int(m2[g]), k)
    return out


# --- congruence search ---------------------------------------------------------

def _residues(w: DigitWord, k: int, count: int) -> list[int]:
    """value of w[p:p+k] mod b^k for p in 0..count-1, by rolling update."""
    b, M = w.base, w.base**k
    d = w.digits
    v = 0
    for x in d[:k]:
        v = v * b + x
    out = [v]
    for p in range(1, count):
        v = (v * b + d[p + k - 1]) % M
        out.append(v)
    return out


def _order_pairs(assign):
    return [(i, j) for i in range(len(assign)) for j in range(i + 1, len(assign))
            if assign[i] == assign[j]]


def congruence_search(words: Sequence[DigitWord], spec: CongruenceSpec, k: int,
                      max_prefix: int, allow_empty: bool = False,
                      cap: int = DEFAULT_CANDIDATE_CAP) -> list[CongruenceWitness]:
    """All congruence witnesses with every ``|A^j| <= max_prefix``.

    Blocks assigned to the same word must have strictly increasing prefix
    lengths in block order.  Meet-in-the-middle: the right half of the block
    tuple is bucketed by residue, the left half is streamed and joined.
    Results are sorted by ``sum |A^j|`` then by prefix lengths.
    """
    words = list(words)
    if not words:
        raise InputError("no words")
    _check_same_base(words)
    if k < 1 or max_prefix < 0:
        raise RangeError("need k >= 1 and max_prefix >= 0")
    assign = spec.word_assignment
    if max(assign) >= len(words) or min(assign) < 0:
        raise InputError("word assignment refers to a missing word")
    for j in set(assign):
        if max_prefix + k > len(words[j]):
            raise RangeError("word %d too short for max_prefix + k = %d" % (j, max_prefix + k))
    b = words[0].base
    M = b**k
    lo = 0 if allow_empty else 1
    m = spec.m
    res = {j: _residues(words[j], k, max_prefix + 1) for j in set(assign)}
    cand = [[(p, (a * res[j][p]) % M) for p in range(lo, max_prefix + 1)]
            for a, j in zip(spec.coefficients, assign)]
    pairs = _order_pairs(assign)

    def ordered(ps, offset=0):
        n = len(ps)
        return all(ps[i - offset] < ps[j - offset] for i, j in pairs
                   if offset <= i < offset + n and offset <= j < offset + n)

    budget = [0]

    def spend(n):
        budget[0] += n
        if budget[0] > cap:
            raise BudgetExceeded("candidate count exceeded the cap %d" % cap)

    h = (m + 1) // 2
    right = defaultdict(list)
    for combo in product(*cand[h:]):
        spend(1)
        ps = tuple(c[0] for c in combo)
        if ordered(ps, h):
            right[sum(c[1] for c in combo) % M].append(ps)
    found = []
    for combo in product(*cand[:h]):
        spend(1)
        ps = tuple(c[0] for c in combo)
        if not ordered(ps):
            continue
        need = (-sum(c[1] for c in combo)) % M
        for rest in right.get(need, ()):
            spend(1)
            full = ps + rest
            if ordered(full):
                found.append(full)
    found.sort(key=lambda ps: (sum(ps), ps))
    return [CongruenceWitness(k, ps, tuple(words[j][p:p + k] for p, j in zip(ps, assign)),
                              spec.coefficients, assign)
            for ps in found]


# --- verification ---------------------------------------------------------------

def _big_value(digits, b):
    # plain Horner loop, kept separate from words.value
    total = 0
    for d in digits:
        total = total * b + d
    return total


def verify_witness(words: Sequence[DigitWord], spec: Optional[CongruenceSpec], witness) -> bool:
    """Recheck every clause of ``witness`` against ``words`` from scratch."""
    words = list(words)
    if isinstance(witness, RepetitionWitness):
        w = words[0]
        i, k = witness.a_len, witness.b_len
        j = i + k + witness.a2_len
        if k < 1 or min(i, witness.a2_len) < 0:
            return False
        if j + k > len(w):
            raise IndexOutOfRange("decomposition longer than the word")
        return list(w.digits[i:i + k]) == list(w.digits[j:j + k])
    if isinstance(witness, CommonBlockWitness):
        w1, w2 = words[0], words[1]
        i, i2, k = witness.a_len, witness.a2_len, witness.b_len
        if i + k > len(w1) or i2 + k > len(w2):
            raise IndexOutOfRange("block past the end of a word")
        return k >= 1 and list(w1.digits[i:i + k]) == list(w2.digits[i2:i2 + k])
    if isinstance(witness, CongruenceWitness):
        coeffs = spec.coefficients if spec is not None else witness.coefficients
        assign = (spec.word_assignment if spec is not None else witness.word_indices) \
            or (0,) * len(coeffs)
        k = witness.block_len
        if not (len(coeffs) == len(assign) == len(witness.prefix_lens) == len(witness.blocks)):
            return False
        b = words[assign[0]].base
        total = 0
        for a, j, p, blk in zip(coeffs, assign, witness.prefix_lens, witness.blocks):
            if j >= len(words) or p < 0 or p + k > len(words[j]):
                raise IndexOutOfRange("block %d..%d outside word %d" % (p, p + k, j))
            src = list(words[j].digits[p:p + k])
            if len(blk) != k or list(blk.digits) != src:
                return False
            total += a * _big_value(src, b)
        return total % b**k == 0
    raise InputError("unknown witness type %r" % type(witness).__name__)


# --- family checks ---------------------------------------------------------------

@dataclass
class FamilyReport:
    condition: str
    count: int
    k_increasing: bool
    prefix_order: bool
    gaps_increasing: bool
    ratio_bounded: bool
    nonempty_prefixes: bool
    max_ratio: Optional[Fraction]
    notes: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return (self.k_increasing and self.prefix_order and self.gaps_increasing
                and self.ratio_bounded and self.nonempty_prefixes)


def _strictly_increasing(xs):
    return all(a < b for a, b in zip(xs, xs[1:]))


def check_family(witnesses: Sequence, condition: str, L) -> FamilyReport:
    """Which sequence-level clauses of a Condition a witness family satisfies."""
    L = Fraction(L)
    ws = list(witnesses)
    notes = []
    if condition in ("c1", "c2"):
        ks = [w.b_len for w in ws]
        ratios = [w.ratio for w in ws]
        nonempty = all(w.a_len >= 1 and w.a2_len >= 1 for w in ws)
        order = gaps = True
    elif condition in ("c3", "c5", "c9"):
        ks = [w.block_len for w in ws]
        ratios = [Fraction(max(w.prefix_lens), w.block_len) for w in ws]
        nonempty = all(p >= 1 for w in ws for p in w.prefix_lens)
        if condition == "c3":
            order = all(_strictly_increasing(list(w.prefix_lens)) for w in ws)
            m = len(ws[0].prefix_lens) if ws else 0
            gaps = all(_strictly_increasing([w.prefix_lens[j + 1] - w.prefix_lens[j] for w in ws])
                       for j in range(m - 1))
        elif condition == "c9":
            order = all(w.prefix_lens[0] < w.prefix_lens[1] for w in ws)
            gaps = _strictly_increasing([w.prefix_lens[1] - w.prefix_lens[0] for w in ws])
        else:
            order = gaps = True
    else:
        raise InputError("unknown condition %r" % condition)
    if not nonempty:
        notes.append("some prefix A is empty")
    return FamilyReport(condition, len(ws), _strictly_increasing(ks), order, gaps,
                        all(r <= L for r in ratios), nonempty,
                        max(ratios) if ratios else None, notes)
