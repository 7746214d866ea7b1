"""The word operators f and g, the words F(a) and G(a) they converge to,
and exact congruence certificates for every construction step."""

from dataclasses import dataclass
from typing import Optional

from .detectors import CongruenceWitness
from .errors import InputError, LedgerMismatch, WordTooShort, ZeroMultiplier
from .words import DigitWord, from_digits, to_digits


@dataclass(frozen=True)
class ConstructionStep:
    iteration: int
    prefix_len_before: int
    appended_block: DigitWord
    congruence_modulus_exp: int
    mode: str = "f"
    s: Optional[int] = None


def _check(a: DigitWord):
    if len(a) < 2:
        raise WordTooShort("construction needs a word of length >= 2, got %d" % len(a))


def _f_block(a: DigitWord) -> DigitWord:
    h = len(a) // 2
    b, d = a.base, a.digits
    v = (from_digits(d[:h], b) + from_digits(d[h:2 * h], b)) % b**h
    return DigitWord(to_digits(v, b, h), b)


def _g_block(a: DigitWord, s: int) -> DigitWord:
    k = len(a)
    v = (s * from_digits(a.digits, a.base)) % a.base**k
    return DigitWord(to_digits(v, a.base, k), a.base)


def step_f(a: DigitWord) -> DigitWord:
    """``a`` followed by the ``[k/2]``-digit residue of its first two ``[k/2]``-blocks' sum."""
    _check(a)
    return a + _f_block(a)


def step_g(a: DigitWord, s: int) -> DigitWord:
    """``a`` followed by ``s * value(a) mod b**k`` written with ``k = |a|`` digits."""
    _check(a)
    if s == 0:
        raise ZeroMultiplier("s must be nonzero")
    return a + _g_block(a, s)


def generate(seed: DigitWord, mode: str, min_len: int, s: Optional[int] = None):
    """Iterate ``f`` (mode ``"F"``) or ``g`` (mode ``"G"``) until the word has
    at least ``min_len`` digits.  Returns ``(word, steps)``."""
    mode = mode.upper()
    _check(seed)
    if mode == "G":
        if s is None or s == 0:
            raise ZeroMultiplier("G mode needs a nonzero multiplier s")
    elif mode != "F":
        raise InputError("mode must be F or G, got %r" % mode)
    buf = bytearray(seed.digits) if seed.base <= 256 else list(seed.digits)
    steps = []
    while len(buf) < min_len:
        a = DigitWord(bytes(buf) if seed.base <= 256 else buf, seed.base)
        if mode == "F":
            blk, kappa = _f_block(a), len(a) // 2
        else:
            blk, kappa = _g_block(a, s), len(a)
        steps.append(ConstructionStep(len(steps) + 1, len(a), blk, kappa,
                                      mode.lower(), s if mode == "G" else None))
        buf.extend(blk.digits)
    word = DigitWord(bytes(buf) if seed.base <= 256 else buf, seed.base)
    return word, steps


def certify(steps, full_word: DigitWord) -> list[CongruenceWitness]:
    """One congruence witness per construction step.

    f-step on a length-k prefix: blocks (a1, a2, a3) at prefix lengths
    (0, h, k), h = [k/2], coefficients (1, 1, -1), modulus b^h.
    g-step: blocks (a, a4) at (0, k), coefficients (s, -1), modulus b^k.
    The first prefix is empty by construction; ``has_empty_prefix`` flags it.
    """
    out = []
    b = full_word.base
    for st in steps:
        k = st.prefix_len_before
        blk = st.appended_block
        if k + len(blk) > len(full_word) or full_word[k:k + len(blk)] != blk:
            raise LedgerMismatch("step %d block not found at position %d" % (st.iteration, k))
        if st.mode == "f":
            h = k // 2
            if st.congruence_modulus_exp != h or len(blk) != h:
                raise LedgerMismatch("step %d has inconsistent lengths" % st.iteration)
            ps, coeffs, kappa = (0, h, k), (1, 1, -1), h
        else:
            if st.congruence_modulus_exp != k or len(blk) != k:
                raise LedgerMismatch("step %d has inconsistent lengths" % st.iteration)
            ps, coeffs, kappa = (0, k), (st.s, -1), k
        blocks = tuple(full_word[p:p + kappa] for p in ps)
        total = sum(c * from_digits(B.digits, b) for c, B in zip(coeffs, blocks))
        if total % b**kappa:
            raise LedgerMismatch("step %d congruence fails" % st.iteration)
        out.append(CongruenceWitness(kappa, ps, blocks, coeffs, (0,) * len(ps)))
    return out
