from fractions import Fraction

import pytest
import sympy

from kutoral import families as F
from kutoral.series import UsageError
from kutoral.tensor import ModuleContext, TensorElement, canonical_form, normal_form
from kutoral.solver import in_relation_span

C2 = ModuleContext(2, 2, 2)


def test_cd_examples():
    assert F.cd(2, 0) == (1, 1)
    assert F.cd(4, 1) == (2, 1)
    assert F.cd(4, 2) == (0, 0)
    assert F.cd(1, 0) == (0, 0) and F.cd(5, -1) == (0, 0)


def test_ck_remark_clauses():
    for k in range(2, 21, 2):
        h = k // 2
        for t in range(h, k + 3):
            assert F.cd(k, t) == (0, 0)
        assert F.c_(k + 1, h) == F.d_(k, h - 1)
        assert F.d_(k + 1, h) == 0
        for t in range(h + 1, k + 3):
            assert F.cd(k + 1, t) == (0, 0)


def test_unit_constants():
    assert F.unit_constants(0, 0, 3)[0] == -1
    assert F.unit_constants(1, 0, 3)[1] == F.c_(3, 1) == 1
    assert F.unit_constants(2, 0, 3)[0] == -9
    assert F.u1(C2) == 3


def test_pik_examples():
    for k in range(3, 9):
        assert F.pik(0, k, 0) == 2
    assert F.pik(1, 7, 0) == 5
    for i in range(7):
        assert F.pi_coeff(i, i + 2, 9) == 1


def test_sigma_sums_k2_empty():
    _s1, s2, s3 = F.sigma_sums(1, 5, 2, C2)
    assert not s2 and not s3
    assert not F.sigma_sums(1, 1, 2, C2)[0]


def test_teoosa_small():
    lhs = TensorElement.gen(1, 3, 8)
    assert in_relation_span(lhs - F.teoosa_rhs(1, 3, 2, C2), C2)
    c3 = ModuleContext(3, 2, 2)
    assert in_relation_span(TensorElement.gen(1, 5, 27) - F.teoosa_rhs(1, 5, 2, c3), c3)
    assert not F.teoosa_rhs(1, 0, 2, C2)


def test_s_terms_example():
    c = ModuleContext(2, 2, 5)
    _sk, skn = F.s_terms(2, 9, 5, 0, c)
    assert skn == TensorElement.gen(2, 5, Fraction(2, 3**5), 4)
    assert F.f_index(-1, 1) == 3 and F.f_index(0, 1) == 4 and F.f_index(1, 1) == 5


def test_s_terms_range():
    with pytest.raises(UsageError):
        F.s_terms(1, 9, 5, 3, ModuleContext(2, 2, 5))


def test_q_poly_small():
    x1, x2 = sympy.symbols("x1 x2")
    assert F.q_poly(0, 2) == -1
    assert sympy.expand(F.q_poly(1, 5) - x1) == 0
    assert sympy.expand(F.q_poly(2, 5) - (x2 - x1**2)) == 0


@pytest.mark.parametrize("p", [2, 3, 5])
def test_q0_conv_sign(p):
    ctx = ModuleContext(p, 2, 2)
    for s in range(11):
        assert F.q_conv(0, s, ctx) == (-1) ** (s + 1)


def test_compositions():
    assert F.compositions(1, 1) == [(1,)]
    assert sorted(F.compositions(2, 3)) == [(1, 2), (2, 1)]
    assert F.compositions(4, 4) == [(1, 1, 1, 1)]
    assert all(max(c) <= 3 for c in F.compositions(2, 7, cap=3))


def test_part_ranges():
    F.part_rhs(1, 3, C2)
    with pytest.raises(UsageError):
        F.part_rhs(1, 4, C2)
    with pytest.raises(UsageError):
        F.relcp_rhs(1, 4, ModuleContext(3, 2, 2))


@pytest.mark.parametrize("p,n", [(3, 3), (3, 4)])
def test_part_equality(p, n):
    ctx = ModuleContext(p, 2, 2)
    for a in (1, 2):
        x = TensorElement.gen(a, n * ctx.g1, p * p) - F.part_rhs(a, n, ctx)
        assert in_relation_span(x, ctx)


def test_literal_correction_index_fails_at_p5():
    # the correction term written with w_{(t+1)p-1} breaks the n = p+1 case at p = 5
    ctx = ModuleContext(5, 2, 2)
    fixed = TensorElement.gen(1, 6 * ctx.g1, 25) - F.part_rhs(1, 6, ctx)
    assert in_relation_span(fixed, ctx)
    diffs = [
        (part, i)
        for part in range(1, ctx.p + 1)
        for i in range(0, ctx.p - 1)
        if F.q_hat0(part, i, ctx) != F.q_hat0_literal(part, i, ctx)
    ]
    assert diffs


@pytest.mark.parametrize("p,k", [(3, 3), (3, 4), (5, 3)])
def test_lemma_p_power(p, k):
    ctx = ModuleContext(p, 2, 2)
    for a in (1, 2, 3):
        x = TensorElement.gen(a, k * ctx.g1, p**k) - F.lemma_p_power_rhs(a, k, ctx)
        assert in_relation_span(x, ctx)
