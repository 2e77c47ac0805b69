"""Rational serialization helpers."""
from __future__ import annotations

from fractions import Fraction


def fmt(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse(s) -> Fraction:
    return Fraction(s)
