import random

import pytest

from kutoral.solver import (
    Certificate,
    annihilator_staircase,
    brute_force_log_order,
    build_slice,
    crosscheck_modpN,
    elementary_divisors,
    in_relation_span,
    membership,
    slice_basis,
)
from kutoral.series import UsageError
from kutoral.tensor import ModuleContext, TensorElement
from kutoral.verify import random_element

C222 = ModuleContext(2, 2, 2)


def test_slice_basis():
    assert slice_basis(2) == [(0, 1, 1)]
    assert len(slice_basis(4)) == 6
    assert set(slice_basis(4)) == {(2, 1, 1), (1, 1, 2), (1, 2, 1), (0, 1, 3), (0, 2, 2), (0, 3, 1)}


def test_column_of_13_has_p_cubed():
    s = build_slice(C222, 4)
    col = s.boundary_cols[s.index[(0, 1, 3)]]
    assert col[s.index[(0, 1, 3)]] == 8


def test_membership_examples():
    r = membership(TensorElement.gen(1, 1, 2, 2), C222)
    assert r.inside and r.certificate.replay()
    assert r.certificate.expand() == TensorElement.gen(1, 1, 2, 2)
    assert not membership(TensorElement.gen(1, 1, 1, 2), C222)
    assert membership(TensorElement.zero(), C222)


def test_membership_rejects_mixed_weights():
    with pytest.raises(UsageError):
        membership(TensorElement.gen(1, 1) + TensorElement.gen(1, 2), C222)


def test_certificate_json_round_trip():
    cert = membership(TensorElement.gen(1, 1, 2, 2), C222).certificate
    again = Certificate.from_json(cert.to_json())
    assert again.replay()
    assert again.to_json() == cert.to_json()


def test_slice_w2_is_z4():
    coker, _ker = elementary_divisors(C222, 2)
    assert coker.exponents == [2] and coker.free_rank == 0
    assert coker.describe() == "Z/2^2"


def test_empty_slice():
    assert brute_force_log_order(C222, 1) == 0


@pytest.mark.parametrize("W", [2, 3, 4])
def test_orders_match_brute_force_small(W):
    coker, _ = elementary_divisors(C222, W)
    assert coker.log_order == brute_force_log_order(C222, W)


def test_divisors_independent_of_basis_order(monkeypatch):
    import kutoral.solver as S

    base = elementary_divisors(C222, 5)[0].exponents
    monkeypatch.setattr(S, "slice_basis", lambda W: list(reversed(slice_basis(W))))
    S.build_slice.cache_clear() if hasattr(S.build_slice, "cache_clear") else None
    assert sorted(elementary_divisors(C222, 5)[0].exponents) == sorted(base)


def test_crosscheck_examples():
    assert crosscheck_modpN(TensorElement.gen(1, 1, 2, 2), C222, 8) == "inside"
    assert crosscheck_modpN(TensorElement.gen(1, 1, 1, 2), C222, 8) == "outside"
    assert crosscheck_modpN(TensorElement.zero(), C222) == "inside"


def test_staircase_p2_k2():
    st = annihilator_staircase(C222)
    assert (st.m0, st.m1, st.p2) == (6, 2, True)
    assert st.monotone
    assert all(c.replay() for c in st.certificates.values())


def test_relation_span_random():
    rng = random.Random(3)
    from kutoral.tensor import relation

    for _ in range(20):
        x = relation(rng.randint(0, 3), rng.randint(1, 4), rng.randint(1, 6), C222).scale(rng.randint(1, 9))
        assert in_relation_span(x, C222)
    assert not in_relation_span(TensorElement.gen(1, 1, 2), C222)
