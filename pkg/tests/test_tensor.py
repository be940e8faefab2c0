import random

import pytest
from hypothesis import given, settings, strategies as st

from kutoral.series import UsageError
from kutoral.solver import in_relation_span
from kutoral.tensor import (
    ModuleContext,
    TensorElement,
    ab_sums,
    apply_boundary,
    boundary_raw,
    canonical_form,
    filtration,
    flip_v_element,
    leading_terms,
    normal_form,
    normal_form_highest_first,
    relation,
    smith_shift,
)
from kutoral.verify import random_element

C222 = ModuleContext(2, 2, 2)


def test_context_validation():
    with pytest.raises(UsageError):
        ModuleContext(4, 2, 2)
    with pytest.raises(UsageError):
        ModuleContext(2, 3, 1)
    ModuleContext(2, 3, 1, validate=False)


def test_small_normal_forms():
    assert not normal_form(TensorElement.gen(1, 1, 4), C222)
    assert normal_form(TensorElement.gen(1, 2, 4), C222) == TensorElement.gen(1, 1, -6, 1)
    assert not normal_form(TensorElement.zero(), C222)


def test_boundary_of_13():
    assert apply_boundary(TensorElement.gen(1, 3), C222) == TensorElement.gen(1, 1, 18, 2)


def test_orders_stop_at_different_representatives():
    # 8[1,3] in the (2,2,2) module: top-down merging leaves 10 v^2[1,1]
    x = TensorElement.gen(1, 3, 8)
    a, b = normal_form(x, C222), normal_form_highest_first(x, C222)
    assert a == TensorElement.gen(1, 1, 18, 2)
    assert b == TensorElement.gen(1, 1, 10, 2)
    assert canonical_form(a, C222) == canonical_form(b, C222) == TensorElement.gen(1, 1, 2, 2)


def test_terms_out_of_range_vanish():
    assert not TensorElement.gen(0, 3) and not TensorElement.gen(2, 0) and not TensorElement.gen(1, 1, 1, -1)


def test_weight_and_json():
    x = TensorElement.gen(1, 2, 3, 4) + TensorElement.gen(2, 5, -1)
    assert x.weight() == 7
    assert TensorElement.from_json(x.to_json(), 2) == x
    with pytest.raises(UsageError):
        (x + TensorElement.gen(1, 1)).weight()


def test_filtration_and_leading_terms():
    x = TensorElement.gen(1, 3) + TensorElement.gen(2, 1, 1, 1)
    # filtrations: [1,3] -> 9 + 3*5 = 24, [2,1] -> 18 + 5 = 23
    assert filtration(x, C222) == 24
    assert leading_terms(x, C222) == TensorElement.gen(1, 3)


def test_ab_sums_examples():
    A, B = ab_sums(1, 3, C222)
    assert not A and B == TensorElement.gen(1, 1, 4, 2)
    A3, _ = ab_sums(1, 2, ModuleContext(3, 2, 2))
    assert A3 == TensorElement.gen(1, 1, 36, 1)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 4), st.integers(0, 4))
def test_smith_shift_commutes_with_boundary(seed, di, dj):
    rng = random.Random(seed)
    W = rng.randint(2 + di + dj, 9 + di + dj)
    x = random_element(C222, W, rng)
    lhs = boundary_raw(smith_shift(x, di, dj), C222)
    rhs = smith_shift(boundary_raw(x, C222), di, dj)
    assert in_relation_span(lhs - rhs, C222)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([(2, 2, 2), (3, 2, 2), (2, 3, 2)]))
def test_strategies_agree_in_module(seed, pnk):
    ctx = ModuleContext(*pnk)
    rng = random.Random(seed)
    x = random_element(ctx, rng.randint(2, 9), rng)
    a, b = normal_form(x, ctx), normal_form_highest_first(x, ctx)
    assert in_relation_span(a - b, ctx)
    assert canonical_form(a, ctx) == canonical_form(b, ctx) == canonical_form(x, ctx)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_relations_normalize_to_zero(seed):
    rng = random.Random(seed)
    i, j, m = rng.randint(1, 5), rng.randint(1, 8), rng.randint(0, 3)
    r = relation(m, i, j, C222).scale(rng.randint(-20, 20))
    assert not normal_form(r, C222)
    assert not canonical_form(r, C222)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([2, 3]))
def test_flip_v_is_module_isomorphism(seed, p):
    rng = random.Random(seed)
    u, s = ModuleContext(p, 2, 2), ModuleContext(p, 2, 2, "signed")
    x = random_element(u, rng.randint(2, 8), rng)
    assert flip_v_element(boundary_raw(x, u)) == boundary_raw(flip_v_element(x), s)
    i, j, m = rng.randint(1, 4), rng.randint(1, 6), rng.randint(0, 3)
    assert flip_v_element(relation(m, i, j, u)).scale((-1) ** m) == relation(m, i, j, s)
