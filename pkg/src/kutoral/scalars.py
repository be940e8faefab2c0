"""Exact arithmetic in the p-local integers Z_(p).

Elements are plain Python rationals (``int`` or ``fractions.Fraction``) whose
denominator is prime to ``p``.  Integers are kept as ``int`` wherever
possible since nearly every coefficient in this package is integral and
``int`` arithmetic is an order of magnitude faster than ``Fraction``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

LocalScalar = Union[int, Fraction]

INFINITY = math.inf


class NotLocalError(ValueError):
    """The value does not lie in Z_(p) (denominator divisible by p)."""


class NotAUnitError(ArithmeticError):
    """The value is not invertible in Z_(p)."""


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, math.isqrt(p) + 1))


def local(value, p: int) -> LocalScalar:
    """Canonical Z_(p) element from an int, Fraction, or ``(num, den)`` pair.

    Raises NotLocalError if the reduced denominator is divisible by p.
    """
    if isinstance(value, tuple):
        value = Fraction(int(value[0]), int(value[1]))
    elif isinstance(value, str):
        value = Fraction(value)
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return int(value.numerator)
        if value.denominator % p == 0:
            raise NotLocalError(f"{value} is not in Z_({p})")
        return value
    if isinstance(value, int):
        return int(value)
    raise TypeError(f"cannot build a local scalar from {type(value).__name__}")


def canon(value: LocalScalar) -> LocalScalar:
    """Collapse integral Fractions to ``int`` so equality stays structural."""
    if isinstance(value, Fraction) and value.denominator == 1:
        return int(value.numerator)
    return value


def int_valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def valuation(s: LocalScalar, p: int):
    """p-adic valuation of ``s``; ``math.inf`` for zero."""
    if s == 0:
        return INFINITY
    if isinstance(s, Fraction):
        if s.denominator % p == 0:
            raise NotLocalError(f"{s} is not in Z_({p})")
        return int_valuation(s.numerator, p)
    return int_valuation(s, p)


def unit_part(s: LocalScalar, p: int) -> LocalScalar:
    """The unit ``u`` with ``s = p**valuation(s) * u``."""
    if s == 0:
        raise ValueError("unit part of zero is undefined")
    v = valuation(s, p)
    return canon(Fraction(s) / p**v)


def invert_unit(s: LocalScalar, p: int) -> LocalScalar:
    if s == 0 or valuation(s, p) != 0:
        raise NotAUnitError(f"{s} is not a unit in Z_({p})")
    return canon(1 / Fraction(s))


def reduce_mod(s: LocalScalar, p: int, N: int) -> int:
    """Image of ``s`` under Z_(p) -> Z/p^N, as a residue in ``[0, p^N)``."""
    modulus = p**N
    if isinstance(s, Fraction):
        den = s.denominator
        if den % p == 0:
            raise NotLocalError(f"{s} is not in Z_({p})")
        return s.numerator * pow(den, -1, modulus) % modulus
    return s % modulus


def to_json(s: LocalScalar) -> dict:
    s = Fraction(s)
    return {"num": str(s.numerator), "den": str(s.denominator)}


def from_json(obj: dict, p: int) -> LocalScalar:
    return local((obj["num"], obj.get("den", "1")), p)
