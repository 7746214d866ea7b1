"""Command-line frontend: ``digitforge <subcommand> [flags]``.

Exit status is 0 on success, 1 for input errors and 2 when a refinement or
search budget is exhausted.  Diagnostics go to stderr as one line.
"""

import argparse
import os
import re
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .algnum import AlgebraicNumber, IntPolynomial, digits, format_polynomial, normalize_unit, validate
from .constructors import certify, generate
from .detectors import (CongruenceSpec, common_block_profile, congruence_search,
                        repetition_profile, verify_witness)
from .errors import BudgetError, DigitforgeError, InputError, ParseError
from .gcdlab import (CoefficientArray, ScanConfig, grid_enumerator, nonlinear_experiment,
                     poly_floor_gcd, poly_pair_gcd, scan)
from .report import Report, serialize
from .streamfile import DigitCache, format_stream, read_stream, write_stream
from .words import DigitWord, complexity_profile, normality_report, value, value_mod

CACHE_ENV = "DIGITFORGE_CACHE"

# --- parsing -------------------------------------------------------------------

_TERM = re.compile(r"([+-])(\d*)(\*?x(?:\^(\d+))?)?")


def parse_polynomial(text: str) -> IntPolynomial:
    """Integer polynomial in ``x``: ``x^2+2x-1``, ``3*x^3 - x + 7``."""
    s = text.replace(" ", "").replace("**", "^")
    if not s:
        raise ParseError("empty polynomial")
    if s[0] not in "+-":
        s = "+" + s
    coeffs = {}
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos or (not m.group(2) and not m.group(3)):
            raise ParseError("cannot parse polynomial %r near %r" % (text, s[pos:]))
        sign = -1 if m.group(1) == "-" else 1
        c = int(m.group(2)) if m.group(2) else 1
        if m.group(3):
            if m.group(3).startswith("*") and not m.group(2):
                raise ParseError("dangling '*' in %r" % text)
            e = int(m.group(4)) if m.group(4) else 1
        else:
            e = 0
        coeffs[e] = coeffs.get(e, 0) + sign * c
        pos = m.end()
    deg = max(coeffs)
    try:
        return IntPolynomial(tuple(coeffs.get(i, 0) for i in range(deg + 1)))
    except InputError as exc:
        raise ParseError("%s: %s" % (text, exc)) from None


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ParseError("not a rational number: %r" % text) from None


def parse_interval(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise ParseError("interval must be 'lo,hi', got %r" % text)
    return parse_rational(parts[0]), parse_rational(parts[1])


def parse_number(spec: str, interval=None, normalize=False):
    """Returns ``(AlgebraicNumber, canonical key)``.

    ``spec`` is a rational ``p/q``, a polynomial with a separate
    ``interval``, or ``poly@lo,hi``.
    """
    if "@" in spec:
        spec, interval = spec.split("@", 1)
    if interval is None:
        r = parse_rational(spec)
        return AlgebraicNumber.from_rational(r), "rational:%s" % r
    lo, hi = parse_interval(interval) if isinstance(interval, str) else interval
    poly = parse_polynomial(spec)
    alpha = validate(poly, lo, hi)
    key = "root:%s@%s,%s" % (format_polynomial(poly.coeffs), lo, hi)
    if normalize:
        alpha = normalize_unit(alpha)
        key += ":unit"
    return alpha, key


def parse_range(text: str):
    parts = text.split(":")
    try:
        if len(parts) == 1:
            a = b = int(parts[0])
        elif len(parts) == 2:
            a, b = int(parts[0]), int(parts[1])
        else:
            raise ValueError
    except ValueError:
        raise ParseError("range must be 'a:b', got %r" % text) from None
    if a > b:
        raise ParseError("empty range %r" % text)
    return a, b


def parse_int_list(text: str):
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise ParseError("expected comma-separated integers, got %r" % text) from None


def parse_coefficient_rows(text: str):
    try:
        return tuple(tuple(Fraction(t) for t in row.split(",")) for row in text.split(";"))
    except (ValueError, ZeroDivisionError):
        raise ParseError("bad coefficient array %r" % text) from None


def parse_number_list(text: str):
    return [parse_number(t.strip())[0] for t in text.split(";")]


# --- word sources ----------------------------------------------------------------

def _cache(args):
    root = os.environ.get(CACHE_ENV) or args.cache_dir
    return DigitCache(root) if root else None


def expand_spec(args, i=0) -> DigitWord:
    specs = args.spec or []
    if i >= len(specs):
        raise InputError("need --spec number %d (or --in)" % (i + 1))
    if args.digits is None:
        raise InputError("--digits is required with --spec")
    intervals = args.interval or []
    interval = intervals[i] if i < len(intervals) else None
    alpha, key = parse_number(specs[i], interval, args.normalize)
    cache = _cache(args)
    if cache is None:
        return digits(alpha, args.base, args.digits)
    return cache.get(key, args.base, args.digits, lambda n: digits(alpha.copy(), args.base, n))


def input_words(args, need=1):
    words = []
    for path in args.inputs or []:
        words.append(read_stream(path)[0])
    if getattr(args, "word", None):
        for text in args.word:
            words.append(DigitWord.from_str(text, args.base))
    i = 0
    while len(words) < need or (args.spec and i < len(args.spec)):
        if not args.spec or i >= len(args.spec):
            raise InputError("need %d input word(s); give --in, --word or --spec" % need)
        words.append(expand_spec(args, i))
        i += 1
    return words


# --- commands ------------------------------------------------------------------

def _params(args, *names):
    return {n: getattr(args, n) for n in names if getattr(args, n, None) is not None}


def cmd_expand(args):
    w = expand_spec(args)
    if args.out:
        write_stream(args.out, w, args.spec[0])
        return None
    return str(w) + "\n"


def cmd_value(args):
    w = input_words(args)[0]
    if args.k is not None:
        return Report("value", ["k", "value"], [{"k": args.k, "value": value_mod(w, args.k)}],
                      _params(args, "base", "k"))
    return Report("value", ["value"], [{"value": value(w)}], _params(args, "base"))


def cmd_complexity(args):
    w = input_words(args)[0]
    n0, n1 = parse_range(args.k_range or "1:10")
    n1 = min(n1, len(w))
    prof = complexity_profile(w, n1) if n1 >= 1 else []
    rows = [{"n": n, "complexity": prof[n - 1], "prefix_len": len(w)} for n in range(n0, n1 + 1)]
    return Report("complexity", ["n", "complexity", "prefix_len"], rows,
                  _params(args, "base", "k_range"))


def cmd_normality(args):
    rows_in = input_words(args)
    m = args.m
    N = args.N if args.N is not None else min(len(r) for r in rows_in) - m + 1
    rep = normality_report(rows_in, m, N)
    rows = [{"matrix": str(rep.matrix(c)), "count": int(rep.counts[c]),
             "frequency": rep.frequency(c)} for c in range(rep.n_shapes)]
    return Report("normality", ["matrix", "count", "frequency"], rows,
                  {"base": rep.base, "m": m, "N": N},
                  {"prefix_len": rep.prefix_len, "max_deviation": rep.max_deviation,
                   "chi_square": rep.chi_square, "rows_used": rep.n_rows})


def cmd_construct(args):
    if not args.seed:
        raise InputError("--seed is required")
    seed = DigitWord.from_str(args.seed, args.base)
    mode = "G" if args.mode == "g" else "F"
    word, steps = generate(seed, mode, args.digits or len(seed), args.s)
    certs = certify(steps, word)
    rows = []
    for st, c in zip(steps, certs):
        rows.append({"iteration": st.iteration, "prefix_len": st.prefix_len_before,
                     "k": c.block_len, "prefix_lens": list(c.prefix_lens),
                     "blocks": [str(b) for b in c.blocks],
                     "coefficients": list(c.coefficients),
                     "empty_prefix": c.has_empty_prefix,
                     "verified": verify_witness([word], None, c)})
    rep = Report("construct", ["iteration", "prefix_len", "k", "prefix_lens", "blocks",
                               "coefficients", "empty_prefix", "verified"], rows,
                 _params(args, "base", "seed", "mode", "s", "digits"), {"word": str(word)})
    if args.out:
        write_stream(args.out, word, "construct:%s:%s:%s" % (args.seed, args.mode, args.s))
        return rep
    rep.preamble = str(word) + "\n"
    return rep


def _profile_rows(prof):
    rows = []
    for k in sorted(prof):
        w = prof[k]
        rows.append({"k": k, "a_len": w and w.a_len, "a2_len": w and w.a2_len,
                     "ratio": w.ratio if w else None})
    return rows


def cmd_detect_rep(args):
    w = input_words(args)[0]
    k0, k1 = parse_range(args.k_range or "1:10")
    prof = repetition_profile(w, k0, k1, allow_empty=args.allow_empty)
    return Report("detect-rep", ["k", "a_len", "a2_len", "ratio"], _profile_rows(prof),
                  _params(args, "k_range", "allow_empty"), {"prefix_len": len(w)})


def cmd_detect_common(args):
    words = input_words(args, need=2)
    k0, k1 = parse_range(args.k_range or "1:10")
    prof = common_block_profile(words[0], words[1], k0, k1, allow_empty=args.allow_empty)
    return Report("detect-common", ["k", "a_len", "a2_len", "ratio"], _profile_rows(prof),
                  _params(args, "k_range", "allow_empty"))


def cmd_detect_cong(args):
    words = input_words(args)
    coeffs = parse_int_list(args.coeffs or "1,-1")
    assign = parse_int_list(args.assign) if args.assign else None
    spec = CongruenceSpec(coeffs, assign)
    k0, k1 = parse_range(args.k_range or "1:4")
    rows = []
    for k in range(k0, k1 + 1):
        max_prefix = args.max_prefix
        if max_prefix is None:
            max_prefix = min(len(words[j]) for j in set(spec.word_assignment)) - k
        for wit in congruence_search(words, spec, k, max_prefix, allow_empty=args.allow_empty):
            rows.append({"k": k, "prefix_lens": list(wit.prefix_lens),
                         "blocks": [str(b) for b in wit.blocks]})
    return Report("detect-cong", ["k", "prefix_lens", "blocks"], rows,
                  _params(args, "coeffs", "assign", "k_range", "max_prefix"))


def _fmt_array(D):
    return ";".join(",".join(map(str, r)) for r in D.rows)


def cmd_scan(args):
    alphas = [parse_number(s, (args.interval or [None] * len(args.spec))[i]
                           if args.interval and i < len(args.interval) else None,
                           args.normalize)[0]
              for i, s in enumerate(args.spec or [])]
    if not alphas:
        raise InputError("scan needs --spec")
    variant = args.variant
    C = None
    if variant in ("main5", "main6"):
        C = CoefficientArray(parse_coefficient_rows(args.coeffs or "1,-1"))
    f0, f1 = parse_range(args.floor_range)
    cfg = ScanConfig(L=Fraction(args.L), epsilon=args.epsilon, floor_range=(f0, f1),
                     gap_min=args.gap_min, sample_budget=args.budget)
    shape = C.shape if C is not None else (1,) * len(alphas)
    enum = grid_enumerator(shape, cfg, args.t_step, args.g_step)
    rep = scan(alphas, C, variant, cfg, args.base, enum)
    rows = [{"array": _fmt_array(D), "floor_D": s.floor_D, "Q": s.Q, "R": s.R,
             "ratio": s.ratio, "violation": s.ratio >= cfg.epsilon} for D, s in rep.samples]
    return Report("scan", ["array", "floor_D", "Q", "R", "ratio", "violation"], rows,
                  _params(args, "variant", "coeffs", "base", "L", "epsilon", "floor_range",
                          "gap_min", "budget", "t_step", "g_step"),
                  {"samples": len(rep.samples), "max_ratio": rep.max_ratio,
                   "violations": len(rep.violations)})


def cmd_poly_gcd(args):
    coeffs = parse_number_list(args.coeffs or "0;1")
    n0, n1 = parse_range(args.k_range or "1:20")
    rows = []
    for n in range(n0, n1 + 1):
        s = poly_floor_gcd(coeffs, args.base, n)
        rows.append({"n": n, "Q": s.Q, "R": s.R, "ratio": s.ratio,
                     "violation": s.ratio >= args.epsilon})
    return Report("poly-gcd", ["n", "Q", "R", "ratio", "violation"], rows,
                  _params(args, "coeffs", "base", "k_range", "epsilon"),
                  {"max_ratio": max((r["ratio"] for r in rows), default=None)})


def cmd_poly_pair_gcd(args):
    f = parse_number_list(args.coeffs or "0;1")
    g = parse_number_list(args.g_coeffs or "0;1")
    n0, n1 = parse_range(args.k_range or "1:20")
    rows = []
    for n in range(n0, n1 + 1):
        s = poly_pair_gcd(f, g, args.base, n)
        rows.append({"n": n, "Q_f": s.Q_f, "Q_g": s.Q_g, "gcd": s.gcd, "ratio": s.ratio,
                     "violation": s.ratio >= args.epsilon})
    return Report("poly-pair-gcd", ["n", "Q_f", "Q_g", "gcd", "ratio", "violation"], rows,
                  _params(args, "coeffs", "g_coeffs", "base", "k_range", "epsilon"))


def cmd_conj(args):
    specs = args.spec or []
    if not specs:
        raise InputError("conj needs --spec for alpha (and optionally a second for beta)")
    intervals = args.interval or []
    nums = [parse_number(s, intervals[i] if i < len(intervals) else None, args.normalize)[0]
            for i, s in enumerate(specs[:2])]
    alpha = nums[0]
    beta = nums[1] if len(nums) > 1 else nums[0].copy()
    m0, m1 = parse_range(args.k_range or "1:20")
    rows = []
    for m in range(m0, m1 + 1):
        s = nonlinear_experiment(args.kind, alpha, beta, args.k, m, args.base)
        rows.append({"kind": args.kind, "k": args.k, "m": m, "Q": s.Q, "R": s.R,
                     "ratio": s.ratio, "violation": s.ratio >= args.epsilon})
    return Report("conj", ["kind", "k", "m", "Q", "R", "ratio", "violation"], rows,
                  _params(args, "kind", "k", "base", "k_range", "epsilon"))


COMMANDS = {
    "expand": cmd_expand, "value": cmd_value, "complexity": cmd_complexity,
    "normality": cmd_normality, "construct": cmd_construct, "detect-rep": cmd_detect_rep,
    "detect-common": cmd_detect_common, "detect-cong": cmd_detect_cong, "scan": cmd_scan,
    "poly-gcd": cmd_poly_gcd, "poly-pair-gcd": cmd_poly_pair_gcd, "conj": cmd_conj,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--base", type=int, default=10)
    common.add_argument("--digits", type=int)
    common.add_argument("--spec", action="append",
                        help="rational p/q, polynomial in x (with --interval), or poly@lo,hi")
    common.add_argument("--interval", action="append", help="isolating interval lo,hi")
    common.add_argument("--normalize", action="store_true",
                        help="replace the root by its fractional part")
    common.add_argument("--in", dest="inputs", action="append", help="digit stream file")
    common.add_argument("--word", action="append", help="literal digit word")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out")
    common.add_argument("--cache-dir")
    common.add_argument("--k-range")
    common.add_argument("--epsilon", type=float, default=0.1)

    p = _Parser(prog="digitforge", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in ("expand", "complexity", "detect-rep", "detect-common"):
        sp = sub.add_parser(name, parents=[common])
        if name.startswith("detect"):
            sp.add_argument("--allow-empty", action="store_true")
    sp = sub.add_parser("value", parents=[common])
    sp.add_argument("--k", type=int)
    sp = sub.add_parser("normality", parents=[common])
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--N", type=int)
    sp = sub.add_parser("construct", parents=[common])
    sp.add_argument("--seed")
    sp.add_argument("--mode", choices=("f", "g"), default="f")
    sp.add_argument("--s", type=int)
    sp = sub.add_parser("detect-cong", parents=[common])
    sp.add_argument("--coeffs")
    sp.add_argument("--assign", help="word index per coefficient, e.g. 0,0,1")
    sp.add_argument("--max-prefix", type=int)
    sp.add_argument("--allow-empty", action="store_true")
    sp = sub.add_parser("scan", parents=[common])
    sp.add_argument("--variant", choices=("main4", "main5", "main6", "main7"), default="main6")
    sp.add_argument("--coeffs", help="coefficient array rows, e.g. '1,-1' or '1;2'")
    sp.add_argument("--L", default="2")
    sp.add_argument("--floor-range", default="50:400")
    sp.add_argument("--gap-min", type=int, default=20)
    sp.add_argument("--budget", type=int, default=10**4)
    sp.add_argument("--t-step", type=int, default=10)
    sp.add_argument("--g-step", type=int, default=10)
    sp = sub.add_parser("poly-gcd", parents=[common])
    sp.add_argument("--coeffs", help="a_0;a_1;...; each p/q or poly@lo,hi")
    sp = sub.add_parser("poly-pair-gcd", parents=[common])
    sp.add_argument("--coeffs", help="coefficients of f, a_0;a_1;...")
    sp.add_argument("--g-coeffs", help="coefficients of g")
    sp = sub.add_parser("conj", parents=[common])
    sp.add_argument("--kind", choices=("product", "square_plus", "nested"), default="product")
    sp.add_argument("--k", type=int, default=0)
    return p


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.base < 2:
            raise InputError("--base must be >= 2")
        result = COMMANDS[args.command](args)
        if isinstance(result, Report):
            text = getattr(result, "preamble", "") + serialize(result, args.format)
            if args.out and args.command != "construct":
                Path(args.out).write_text(text, encoding="utf-8", newline="")
            else:
                stdout.write(text)
        elif result:
            stdout.write(result)
        return 0
    except BudgetError as exc:
        stderr.write("digitforge: %s: %s\n" % (type(exc).__name__, exc))
        return 2
    except (InputError, DigitforgeError, OSError) as exc:
        stderr.write("digitforge: %s: %s\n" % (type(exc).__name__, exc))
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
