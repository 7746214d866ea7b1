"""Exact b-ary digit expansions of algebraic numbers, word constructions
and detectors for digit-pattern conditions, and gcd experiments."""

__version__ = "0.1.0"
