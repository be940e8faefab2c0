from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from kutoral.scalars import (
    INFINITY,
    NotAUnitError,
    NotLocalError,
    canon,
    from_json,
    invert_unit,
    is_prime,
    local,
    reduce_mod,
    to_json,
    unit_part,
    valuation,
)


def test_primes():
    assert [q for q in range(20) if is_prime(q)] == [2, 3, 5, 7, 11, 13, 17, 19]


def test_local_parsing():
    assert local("3/5", 2) == Fraction(3, 5)
    assert local((6, 3), 2) == 2
    assert local(7, 3) == 7
    with pytest.raises(NotLocalError):
        local(Fraction(1, 4), 2)


def test_valuation_and_units():
    assert valuation(0, 2) == INFINITY
    assert valuation(Fraction(12, 5), 2) == 2
    assert unit_part(Fraction(12, 5), 2) == Fraction(3, 5)
    assert invert_unit(3, 2) == Fraction(1, 3)
    with pytest.raises(NotAUnitError):
        invert_unit(6, 3)


def test_reduce_mod_fraction():
    # 1/3 mod 4 is 3 since 3 * 3 = 9 = 1 mod 4
    assert reduce_mod(Fraction(1, 3), 2, 2) == 3


def test_canon_collapses_integral_fractions():
    assert canon(Fraction(8, 4)) == 2 and isinstance(canon(Fraction(8, 4)), int)


local_scalars = st.builds(
    lambda a, b: canon(Fraction(a, b)),
    st.integers(-10**6, 10**6),
    st.integers(1, 500).filter(lambda d: d % 3),
)


@given(local_scalars)
def test_json_round_trip(s):
    assert from_json(to_json(s), 3) == s


@given(local_scalars.filter(lambda s: s != 0), local_scalars.filter(lambda s: s != 0))
def test_valuation_is_additive(a, b):
    assert valuation(a * b, 3) == valuation(a, 3) + valuation(b, 3)


@given(local_scalars, st.integers(1, 6))
def test_reduce_mod_is_congruent(s, N):
    r = reduce_mod(s, 3, N)
    assert 0 <= r < 3**N
    assert valuation(Fraction(s) - r, 3) >= N
