"""Exponent arrays, gcd of floored power sums with powers of the base, and
the empirical sweeps over them."""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .algnum import DigitPrefixNumber
from .errors import EmptyArray, InputError, RefinementBudgetExceeded, ShapeMismatch
from .words import DigitWord, from_digits

VARIANTS = ("main4", "main5", "main6", "main7")


@dataclass(frozen=True)
class ExponentArray:
    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.rows)
        if not rows or any(len(r) == 0 for r in rows):
            raise EmptyArray("exponent array needs nonempty rows")
        object.__setattr__(self, "rows", rows)

    @property
    def shape(self) -> tuple:
        return tuple(len(r) for r in self.rows)

    def entries(self) -> list:
        return [d for r in self.rows for d in r]


@dataclass(frozen=True)
class CoefficientArray:
    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(Fraction(c) for c in r) for r in self.rows)
        if not rows or any(len(r) == 0 for r in rows):
            raise EmptyArray("coefficient array needs nonempty rows")
        if any(c == 0 for r in rows for c in r):
            raise InputError("coefficients must be nonzero")
        object.__setattr__(self, "rows", rows)

    @property
    def shape(self) -> tuple:
        return tuple(len(r) for r in self.rows)


@dataclass(frozen=True)
class GcdSample:
    floor_D: int
    Q: int
    R: int
    ratio: float


@dataclass(frozen=True)
class PairGcdSample:
    n: int
    Q_f: int
    Q_g: int
    gcd: int
    ratio: float


def array_stats(D: ExponentArray):
    """(min entry, min within-row step, min distance between distinct cells)."""
    flat = D.entries()
    if not flat:
        raise EmptyArray("empty array")
    steps = [r[j + 1] - r[j] for r in D.rows for j in range(len(r) - 1)]
    gap = min(steps) if steps else math.inf
    srt = sorted(flat)
    pair_gap = min((y - x for x, y in zip(srt, srt[1:])), default=math.inf)
    return min(flat), gap, pair_gap


def is_admissible(D: ExponentArray, L) -> bool:
    flat = D.entries()
    if not flat or any(not isinstance(d, int) or d < 1 for d in flat):
        return False
    if any(r[j] >= r[j + 1] for r in D.rows for j in range(len(r) - 1)):
        return False
    return max(flat) <= Fraction(L) * min(flat)


# --- gcd with a power of the base --------------------------------------------

def _prime_factors(n: int) -> dict:
    out = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _valuation(n: int, p: int, cap: int) -> int:
    """min(v_p(n), cap) for n != 0, removing p^(2^i) chunks at a time."""
    v = 0
    while v < cap and n % p == 0:
        step, pk = 1, p
        while v + 2 * step <= cap and n % (pk * pk) == 0:
            pk *= pk
            step *= 2
        n //= pk
        v += step
    return v


def gcd_pow(Q: int, b: int, m: int) -> int:
    """``gcd(Q, b**m)`` without forming ``b**m``; ``gcd(0, b**m) = b**m``."""
    if b < 2 or m < 0:
        raise InputError("need b >= 2, m >= 0")
    R = 1
    for p, e in _prime_factors(b).items():
        cap = m * e
        R *= p**(cap if Q == 0 else _valuation(abs(Q), p, cap))
    return R


def log_ratio(R: int, b: int, m: int) -> float:
    """log_b(R) / m, exact at the endpoints 0 and 1."""
    if R == 1 or m == 0:
        return 0.0
    fb = _prime_factors(b)
    rest = R
    full = True
    for p, e in fb.items():
        v = _valuation(rest, p, m * e + 1)
        if v != m * e:
            full = False
        rest //= p**v
    if full and rest == 1:
        return 1.0
    return math.log(R) / (m * math.log(b))


def _sample(Q: int, b: int, m: int) -> GcdSample:
    R = gcd_pow(Q, b, m)
    return GcdSample(m, Q, R, log_ratio(R, b, m))


# --- exact floors of linear combinations ------------------------------------

def _bounds(x):
    if isinstance(x, (int, Fraction)):
        return Fraction(x), Fraction(x)
    if x.is_rational:
        return x.rational, x.rational
    return x.lo, x.hi


def floor_linear_combination(terms, b: int, P=0) -> int:
    """Integer part of ``sum c * alpha * b**d + P`` over ``terms = [(alpha, c, d)]``.

    Each irrational alpha is bisected until the floor of the interval sum is
    settled.  ``alpha`` values are refined in place.
    """
    P = Fraction(P)
    terms = [(a, Fraction(c), d) for a, c, d in terms]
    roots = [a for a, _, _ in terms if not isinstance(a, (int, Fraction)) and not a.is_rational]
    dmax = max((d for _, _, d in terms), default=0)
    cmax = max((abs(c) for _, c, _ in terms), default=Fraction(1))
    cap = 64 + math.ceil(4 * dmax * math.log2(b)) + 4 * max(cmax.numerator.bit_length(), 1)
    for _ in range(cap + 1):
        lo = hi = P
        for a, c, d in terms:
            x, y = _bounds(a)
            s = c * b**d
            lo, hi = (lo + s * x, hi + s * y) if s > 0 else (lo + s * y, hi + s * x)
        f = math.floor(lo)
        # the true value is strictly inside (lo, hi) unless every term is rational
        if f == math.floor(hi) or not roots:
            return f
        for a in roots:
            a.bisect()
    raise RefinementBudgetExceeded("floor of the linear combination did not settle "
                                   "within %d bisections" % cap)


def _floored(alpha, b, d):
    return alpha.floor_scaled(b, d)


def eval_floor_sum(alphas: Sequence, C: Optional[CoefficientArray], D: ExponentArray,
                   variant: str, b: int, P=0) -> GcdSample:
    """One sample ``(floor(D), Q, gcd(Q, b^floor(D)), ratio)`` for one floor-sum variant.

    main4: Q = [sum alpha_i b^{d_i} + P]          (one entry per row, C unused)
    main5: Q = [sum_ij alpha_i c_ij b^{d_ij} + P]
    main6: Q = [sum_j c_j [alpha b^{d_j}]]        (one alpha, one row)
    main7: Q = sum_i [alpha_i b^{d_i}]            (one entry per row, C unused)
    """
    if variant not in VARIANTS:
        raise InputError("unknown variant %r" % variant)
    if variant in ("main4", "main7"):
        if C is not None:
            raise ShapeMismatch("%s takes no coefficient array" % variant)
        if any(len(r) != 1 for r in D.rows) or len(alphas) != len(D.rows):
            raise ShapeMismatch("%s needs one exponent per number" % variant)
    elif variant == "main5":
        if C is None or C.shape != D.shape or len(alphas) != len(D.rows):
            raise ShapeMismatch("main5 needs C and D of equal shape, one row per number")
    else:
        if C is None or len(alphas) != 1 or len(D.rows) != 1 or C.shape != D.shape:
            raise ShapeMismatch("main6 needs one number and single-row C, D of equal length")
    if variant != "main4" and variant != "main5" and P:
        raise InputError("%s floors each term; P is not used" % variant)
    floor_D = min(D.entries())
    if variant == "main4":
        Q = floor_linear_combination([(a, 1, r[0]) for a, r in zip(alphas, D.rows)], b, P)
    elif variant == "main5":
        terms = [(a, c, d) for a, cr, dr in zip(alphas, C.rows, D.rows) for c, d in zip(cr, dr)]
        Q = floor_linear_combination(terms, b, P)
    elif variant == "main6":
        a = alphas[0]
        total = sum(c * _floored(a, b, d) for c, d in zip(C.rows[0], D.rows[0]))
        Q = math.floor(total)
    else:
        Q = sum(_floored(a, b, r[0]) for a, r in zip(alphas, D.rows))
    return _sample(Q, b, floor_D)


def certificate_sample(witness, word: DigitWord) -> GcdSample:
    """main6 sample induced by a congruence witness on ``word``.

    ``d_j = |A^j B^j|`` and ``c_j = a_j``; the number is ``0.word`` read
    through its floors, so the congruence forces ``b^k | Q``.
    """
    D = ExponentArray(((tuple(p + witness.block_len for p in witness.prefix_lens)),))
    C = CoefficientArray((tuple(witness.coefficients),))
    return eval_floor_sum([DigitPrefixNumber(word)], C, D, "main6", word.base)


# --- scans ---------------------------------------------------------------------

@dataclass
class ScanConfig:
    L: Fraction = Fraction(2)
    epsilon: float = 0.1
    floor_range: tuple = (50, 400)
    gap_min: int = 20
    sample_budget: int = 10**4
    perturbation: Optional[Sequence] = None  # explicit table of P values, cycled

    def __post_init__(self):
        self.L = Fraction(self.L)
        if self.epsilon <= 0:
            raise InputError("epsilon must be positive")
        if self.L < 1:
            raise InputError("L must be >= 1")


@dataclass
class ScanReport:
    variant: str
    base: int
    epsilon: float
    samples: list = field(default_factory=list)     # (ExponentArray, GcdSample)

    @property
    def max_ratio(self) -> Optional[float]:
        return max((s.ratio for _, s in self.samples), default=None)

    @property
    def violations(self) -> list:
        return [(D, s) for D, s in self.samples if s.ratio >= self.epsilon]


def grid_enumerator(shape: Sequence[int], cfg: ScanConfig, t_step: int = 1,
                    g_step: int = 1) -> Iterator[ExponentArray]:
    """Arithmetic-progression arrays, deterministic order.

    Cells are filled row-major with ``t, t+g, t+2g, ...``, so the floor is
    ``t`` and both gap statistics equal ``g``.  Only L-admissible arrays with
    ``g >= gap_min`` and ``t`` in ``floor_range`` are produced.
    """
    n = sum(shape)
    t0, t1 = cfg.floor_range
    for t in range(t0, t1 + 1, t_step):
        g = cfg.gap_min
        while True:
            cells = [t + q * g for q in range(n)]
            rows, i = [], 0
            for a in shape:
                rows.append(tuple(cells[i:i + a]))
                i += a
            D = ExponentArray(tuple(rows))
            if not is_admissible(D, cfg.L):
                break
            yield D
            if n == 1:
                break
            g += g_step


def scan(alphas: Sequence, C: Optional[CoefficientArray], variant: str, cfg: ScanConfig,
         b: int, enumerator: Optional[Iterable[ExponentArray]] = None) -> ScanReport:
    """Evaluate ``eval_floor_sum`` over an array enumeration.

    Every sample is kept; those with ratio >= epsilon are listed as
    violations, never clamped or dropped.
    """
    if enumerator is None:
        shape = C.shape if C is not None else (1,) * len(alphas)
        enumerator = grid_enumerator(shape, cfg)
    alphas = [a.copy() if hasattr(a, "copy") else a for a in alphas]
    report = ScanReport(variant, b, cfg.epsilon)
    for idx, D in enumerate(enumerator):
        if idx >= cfg.sample_budget:
            break
        P = 0
        if cfg.perturbation and variant in ("main4", "main5"):
            P = cfg.perturbation[idx % len(cfg.perturbation)]
        report.samples.append((D, eval_floor_sum(alphas, C, D, variant, b, P)))
    return report


# --- polynomial and nonlinear experiments ----------------------------------------

def poly_floor(coeffs: Sequence, b: int, n: int) -> int:
    """``[f(b^n)]`` for ``f = sum a_i x^i`` with algebraic ``a_i``."""
    return floor_linear_combination([(a, 1, i * n) for i, a in enumerate(coeffs)], b)


def poly_floor_gcd(coeffs: Sequence, b: int, n: int) -> GcdSample:
    if len(coeffs) < 2:
        raise InputError("need a polynomial of degree >= 1")
    return _sample(poly_floor(coeffs, b, n), b, n)


def poly_pair_gcd(f_coeffs: Sequence, g_coeffs: Sequence, b: int, n: int) -> PairGcdSample:
    if len(f_coeffs) < 2 or len(g_coeffs) < 2:
        raise InputError("need polynomials of degree >= 1")
    qf, qg = poly_floor(f_coeffs, b, n), poly_floor(g_coeffs, b, n)
    g = math.gcd(qf, qg)
    if g == 0:
        ratio = math.inf
    elif g == 1:
        ratio = 0.0
    else:
        ratio = math.log(g) / (n * math.log(b))
    return PairGcdSample(n, qf, qg, g, ratio)


NONLINEAR_KINDS = ("product", "square_plus", "nested")


def nonlinear_value(kind: str, alpha, beta, k: int, m: int, b: int) -> int:
    if kind == "product":
        return alpha.floor_scaled(b, k + m) * beta.floor_scaled(b, m) + 1
    if kind == "square_plus":
        return alpha.floor_scaled(b, k + m)**2 + beta.floor_scaled(b, m)
    if kind == "nested":
        q = alpha.floor_scaled(b, m)
        return floor_linear_combination([(beta, q * q, 0)], b)
    raise InputError("unknown experiment kind %r" % kind)


def nonlinear_experiment(kind: str, alpha, beta, k: int, m: int, b: int) -> GcdSample:
    """gcd of a nonlinear floor expression with ``b^m``.

    product:     [alpha b^{k+m}] [beta b^m] + 1
    square_plus: [alpha b^{k+m}]^2 + [beta b^m]
    nested:      [beta [alpha b^m]^2]          (k unused)
    """
    return _sample(nonlinear_value(kind, alpha, beta, k, m, b), b, m)
