"""Acceptance criteria 1-11, each with its wall-clock limit."""

import random
import time

import pytest

from kutoral import families as F
from kutoral import verify as V
from kutoral.series import compose, m_series, series_as_xv
from kutoral.solver import (
    Certificate,
    annihilator_staircase,
    brute_force_log_order,
    crosscheck_modpN,
    elementary_divisors,
    in_relation_span,
    membership,
)
from kutoral.tensor import (
    ModuleContext,
    TensorElement,
    apply_boundary,
    boundary_raw,
    normal_form,
    normal_form_highest_first,
    smith_shift,
)


def run_criterion(acceptance, number, limit, body):
    t0 = time.perf_counter()
    ok, detail = body()
    dt = time.perf_counter() - t0
    in_time = dt < limit
    acceptance(number, ok and in_time, f"{detail} [{dt:.2f}s, limit {limit}s]")
    assert ok, detail
    assert in_time, f"took {dt:.1f}s, limit {limit}s"


def test_criterion_01_staircase_p2_k2(acceptance):
    def body():
        st = annihilator_staircase(ModuleContext(2, 2, 2))
        ok = st.m0 == 6 and st.p2 and st.m1 in (1, 2) and all(c.replay() for c in st.certificates.values())
        return ok, f"m0={st.m0} p2={st.p2} m1={st.m1} (realized)"

    run_criterion(acceptance, 1, 30, body)


def test_criterion_02_staircases(acceptance):
    def body():
        a = annihilator_staircase(ModuleContext(3, 2, 2))
        b = annihilator_staircase(ModuleContext(2, 2, 3))
        return a.m0 == 16 and b.m0 == 8, f"p=3,k=2: m0={a.m0}; p=2,k=3: m0={b.m0}"

    run_criterion(acceptance, 2, 300, body)


def test_criterion_03_differential(acceptance):
    def body():
        d = apply_boundary(TensorElement.gen(1, 3), ModuleContext(2, 2, 2))
        return d == TensorElement.gen(1, 1, 18, 2), f"d[1,3] = {d!r}"

    run_criterion(acceptance, 3, 1, body)


def test_criterion_04_minimality(acceptance):
    def body():
        ctx = ModuleContext(2, 2, 2)
        v5 = membership(TensorElement.gen(1, 1, 1, 5), ctx).inside
        pv = membership(TensorElement.gen(1, 1, 2, 1), ctx).inside
        return not v5 and not pv, f"v^5[1,1] inside={v5}; 2v[1,1] inside={pv}"

    run_criterion(acceptance, 4, 30, body)


def test_criterion_05_lemma_suite(acceptance):
    def body():
        reports = [V.verify_lemma_torsion(p, n, 4 if n == 2 else 3, 5) for p in (2, 3) for n in (2, 3)]
        bad = [r.params for r in reports if not r.passed]
        return not bad, f"{sum(r.payload.get('checked', 0) for r in reports)} instances, failures: {bad}"

    run_criterion(acceptance, 5, 120, body)


def test_criterion_06_teoosa_suite(acceptance):
    def body():
        reports = [V.verify_teoosa(p, k, 3) for p in (2, 3) for k in range(2, 6)]
        bad = [r.params for r in reports if not r.passed]
        return not bad, f"{sum(r.payload.get('checked', 0) for r in reports)} instances, failures: {bad}"

    run_criterion(acceptance, 6, 600, body)


def test_criterion_07_sdif(acceptance):
    def body():
        reports = [V.verify_sdif(2, k, n) for k in (5, 6, 7) for n in range(0, k - 4)]
        bad = [r.params for r in reports if not r.passed]
        return not bad, f"{len(reports)} (k, n) cases, failures: {bad}"

    run_criterion(acceptance, 7, 600, body)


def test_criterion_08_part_relcp(acceptance):
    def body():
        reports = [V.verify_part(3, [3, 4]), V.verify_relcp(3, [5, 6]), V.verify_part(5, [3], a_max=1)]
        bad = [(r.claim, r.params) for r in reports if not r.passed]
        return not bad, f"part p=3, relcp p=3, part p=5 smoke; failures: {bad}"

    run_criterion(acceptance, 8, 900, body)


def test_criterion_09_cp(acceptance):
    def body():
        bad, replayed = [], 0
        for p in (2, 3):
            for k in (2, 3):
                r = V.verify_cp(p, k, mode="multiples")
                if not r.passed:
                    bad.append((p, k))
                    continue
                for entry in r.payload["completions"].values():
                    cert = Certificate.from_json(entry["certificate"])
                    replayed += 1
                    if not cert.replay():
                        bad.append((p, k, "replay"))
        return not bad, f"{replayed} certificates replayed, failures: {bad}"

    run_criterion(acceptance, 9, 600, body)


def _random_element(ctx, W, rng):
    return V.random_element(ctx, W, rng)


def test_criterion_10_properties(acceptance):
    def body():
        problems = []
        if not V.verify_ck(20).passed:
            problems.append("ck")
        for p in (2, 3, 5):
            ctx = ModuleContext(p, 2, 2)
            if any(F.q_conv(0, s, ctx) != (-1) ** (s + 1) for s in range(11)):
                problems.append(f"q0 p={p}")
        rng = random.Random(2024)
        c = ModuleContext(2, 2, 2)
        for _ in range(200):
            di, dj = rng.randint(0, 3), rng.randint(0, 3)
            x = _random_element(c, rng.randint(2 + di + dj, 9 + di + dj), rng)
            diff = boundary_raw(smith_shift(x, di, dj), c) - smith_shift(boundary_raw(x, c), di, dj)
            if not in_relation_span(diff, c):
                problems.append("smith shift")
                break
        for _ in range(200):
            ctx = rng.choice([ModuleContext(2, 2, 2), ModuleContext(3, 2, 2), ModuleContext(2, 3, 2)])
            x = _random_element(ctx, rng.randint(2, 9), rng)
            if not in_relation_span(normal_form(x, ctx) - normal_form_highest_first(x, ctx), ctx):
                problems.append("strategies")
                break
        agreements = inconclusive = 0
        for ctx in (ModuleContext(2, 2, 2), ModuleContext(3, 2, 2), ModuleContext(2, 2, 3)):
            for q in range(50):
                W = rng.randint(3, 8)
                x = _random_element(ctx, W, rng)
                if q % 2:
                    # half the queries are boundaries, so both answers occur
                    x = boundary_raw(x, ctx) + V.random_relation_combo(ctx, W, rng)
                exact = membership(x, ctx).inside
                other = crosscheck_modpN(x, ctx)
                if other == "inconclusive":
                    inconclusive += 1
                elif (other == "inside") != exact:
                    problems.append(f"modpN {ctx}")
                else:
                    agreements += 1
        for p in (2, 3, 5):
            for conv in ("unsigned", "signed"):
                lhs = compose(m_series(p, 1, conv), series_as_xv(m_series(p, 1, conv)), p * p)
                if lhs != series_as_xv(m_series(p, 2, conv)):
                    problems.append(f"[p^2] p={p} {conv}")
        return not problems, f"modpN agreements {agreements}, inconclusive {inconclusive}; problems: {problems}"

    run_criterion(acceptance, 10, 300, body)


def test_criterion_11_slices(acceptance):
    def body():
        ctx = ModuleContext(2, 2, 2)
        w2 = elementary_divisors(ctx, 2)[0]
        rows = []
        for W in range(2, 7):
            exact = elementary_divisors(ctx, W)[0].log_order
            brute = brute_force_log_order(ctx, W)
            rows.append((W, exact, brute))
        ok = w2.describe() == "Z/2^2" and all(e == b for _, e, b in rows)
        return ok, f"W=2: {w2.describe()}; (W, log order, brute force) = {rows}"

    run_criterion(acceptance, 11, 120, body)
