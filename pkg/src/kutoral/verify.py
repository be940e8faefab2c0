"""One checkable procedure per claim about the tensor module.

Every ``verify_*`` function returns a :class:`VerificationReport`.  Failing
reports carry a concrete witness (a serialized element) and passing reports
carry certificates where the claim is a membership statement, so results can
be replayed without re-solving.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from . import families as fam
from .scalars import valuation
from .series import UsageError, g
from .solver import Certificate, annihilator_staircase, in_relation_span, membership
from .tensor import (
    ModuleContext,
    TensorElement,
    ab_total,
    apply_boundary,
    boundary_raw,
    canonical_form,
    normal_form,
    normal_form_highest_first,
    relation,
    flip_v_element,
    smith_shift,
)

PASS, FAIL, UNSUPPORTED = "pass", "fail", "unsupported-range"

CLAIMS = (
    "lemma-torsion",
    "teoosa",
    "ck",
    "sdif",
    "sumas",
    "nuevo",
    "nuevo2",
    "dife",
    "cp",
    "part",
    "relcp",
    "diagonal",
    "ann",
    "nf-unique",
)


@dataclass
class VerificationReport:
    claim: str
    params: Dict
    verdict: str
    payload: Dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_json(self, timing: bool = True) -> dict:
        out = {"claim": self.claim, "params": self.params, "verdict": self.verdict, "payload": self.payload}
        if timing:
            out["seconds"] = round(self.seconds, 3)
        return out


def _timed(claim: str, params: Dict, body: Callable[[], Tuple[str, Dict]]) -> VerificationReport:
    start = time.perf_counter()
    verdict, payload = body()
    return VerificationReport(claim, params, verdict, payload, time.perf_counter() - start)


def _ctx2(p: int, k: int = 2, convention: str = "unsigned") -> ModuleContext:
    return ModuleContext(p, 2, k, convention)


def _witness(x: TensorElement, **info) -> Dict:
    return {"witness": x.to_json(), **info}


# ---------------------------------------------------------------------------
# Identities checked by normal form


def verify_lemma_torsion(p: int, n: int, k_max: int, a_max: int, b_extra: int = 0) -> VerificationReport:
    """p^{n+k}[a,b] = 0 for 1 <= b <= (k+1) g_1.

    ``b_extra`` > 0 probes indices past the stated range; those are never
    asserted and turn the verdict into unsupported-range.
    """
    params = {"p": p, "n": n, "k_max": k_max, "a_max": a_max}

    def body():
        if n < 2:
            return UNSUPPORTED, {"reason": "needs n >= 2"}
        ctx = ModuleContext(p, n, n, validate=False)
        g1 = ctx.g1
        checked = 0
        for k in range(k_max + 1):
            for a in range(1, a_max + 1):
                for b in range(1, (k + 1) * g1 + 1):
                    x = TensorElement.gen(a, b, p ** (n + k))
                    r = normal_form(x, ctx)
                    checked += 1
                    if r:
                        return FAIL, _witness(x, k=k, a=a, b=b, normal_form=r.to_json())
        if b_extra:
            return UNSUPPORTED, {"checked": checked, "reason": "b beyond (k+1) g_1 is outside the claim"}
        return PASS, {"checked": checked}

    return _timed("lemma-torsion", params, body)


def verify_teoosa(p: int, k: int, a_max: int = 3, b_max: Optional[int] = None, convention: str = "unsigned") -> VerificationReport:
    params = {"p": p, "k": k, "a_max": a_max, "b_max": b_max, "convention": convention}

    def body():
        if k < 2:
            return UNSUPPORTED, {"reason": "needs k >= 2"}
        ctx = _ctx2(p, 2, convention)
        # the displayed families are unsigned; v -> -v transports them
        base = _ctx2(p, 2)
        top = b_max if b_max is not None else (k + 2) * ctx.g1 + ctx.g2
        checked = 0
        for a in range(1, a_max + 1):
            for b in range(-1, top + 1):
                rhs = fam.teoosa_rhs(a, b, k, base)
                if convention == "signed":
                    rhs = flip_v_element(rhs)
                x = TensorElement.gen(a, b, p ** (k + 1)) - rhs
                r = normal_form(x, ctx)
                checked += 1
                if r:
                    return FAIL, _witness(x, a=a, b=b, normal_form=r.to_json())
        return PASS, {"checked": checked}

    return _timed("teoosa", params, body)


def verify_ck(k_max: int = 20) -> VerificationReport:
    """All clauses of the vanishing remark on c_k, d_k for even k."""

    def body():
        checked = 0
        for k in range(2, k_max + 1, 2):
            h = k // 2
            clauses = [
                all(fam.c_(k, t) == 0 and fam.d_(k, t) == 0 for t in range(h, k + 3)),
                fam.c_(k + 1, h) == fam.d_(k, h - 1),
                fam.d_(k + 1, h) == 0,
                all(fam.c_(k + 1, t) == 0 and fam.d_(k + 1, t) == 0 for t in range(h + 1, k + 4)),
            ]
            checked += len(clauses)
            if not all(clauses):
                return FAIL, {"k": k, "clauses": clauses}
        return PASS, {"checked": checked}

    return _timed("ck", {"k_max": k_max}, body)


def sdif_sigma(a: int, b: int, k: int, n: int, ctx: ModuleContext) -> TensorElement:
    """The catch-all A/B part in the expansion of S_k - p^{k+1} S_{k,n}.

    It consists of the A/B sums of p^{k+2}[a,b] together with those of every
    p^{k+1}-multiplied monomial c v^e [a,b'], i.e. c v^e times the A/B sums
    of p^{k+1}[a,b'].
    """
    S, Sn = fam.s_terms(a, b, k, n, ctx)
    p = ctx.p
    multiplied = (S - TensorElement.gen(a, b, p ** (k + 2))).scale(Fraction(1, p ** (k + 1))) - Sn
    out = sum(fam.sigma_sums(a, b, k + 1, ctx), TensorElement.zero())
    for (i, j, m), c in multiplied.items():
        out = out + sum(fam.sigma_sums(i, j, k, ctx), TensorElement.zero()).vmul(m).scale(c)
    return out


def verify_sdif(p: int, k: int, n: int, a_max: int = 2, b_max: Optional[int] = None) -> VerificationReport:
    """Residual of the S-term expansion is made of A/B sums only.

    R = S_k - p^{k+1} S_{k,n} - (explicit family) is compared with the
    A/B sums generated by the expansion; the check passes when they agree in
    the module, which is stronger than a term-by-term shape test.
    """
    params = {"p": p, "k": k, "n": n, "a_max": a_max, "b_max": b_max}

    def body():
        if not 0 <= n <= k - 5:
            return UNSUPPORTED, {"reason": "needs 0 <= n <= k - 5"}
        ctx = _ctx2(p)
        top = b_max if b_max is not None else sdif_exponents_top(k, n, ctx)
        checked = nonzero = 0
        for a in range(1, a_max + 1):
            for b in range(1, top + 1):
                S, Sn = fam.s_terms(a, b, k, n, ctx)
                residual = S - Sn.scale(p ** (k + 1)) - fam.sdif_rhs(a, b, k, n, ctx)
                r = normal_form(residual - sdif_sigma(a, b, k, n, ctx), ctx)
                checked += 1
                if normal_form(residual, ctx):
                    nonzero += 1
                if r:
                    return FAIL, _witness(residual, a=a, b=b, unexplained=r.to_json())
        return PASS, {"checked": checked, "nonzero_residuals": nonzero}

    return _timed("sdif", params, body)


def sdif_exponents_top(k: int, n: int, ctx: ModuleContext) -> int:
    """A b-range reaching past every exponent that occurs in the expansion."""
    f, h1, h2 = fam.sdif_exponents(k, k // 2, n, ctx)
    return max(f, h1 + h2) + ctx.g2 + 2


def verify_sumas(p: int, k: int, a: int, b: int) -> VerificationReport:
    """The second and third A/B sums are built from Smith shifts of (A+B)^{[a,b]}."""
    params = {"p": p, "k": k, "a": a, "b": b}

    def body():
        ctx = _ctx2(p)
        base = ab_total(a, b, ctx)
        shifts = set(range(0, k * ctx.g1 + 1, ctx.g1))
        shifts |= {r * ctx.g2 + t * ctx.g1 for r in range(0, k) for t in range(0, k)}
        for s in sorted(shifts):
            if ab_total(a, b - s, ctx) != smith_shift(base, 0, s):
                return FAIL, {"shift": s}
        return PASS, {"shifts": len(shifts)}

    return _timed("sumas", params, body)


def verify_part(p: int, n_values: Sequence[int], a_max: int = 3) -> VerificationReport:
    params = {"p": p, "n_values": list(n_values), "a_max": a_max}
    return _timed("part", params, lambda: _p2_expansion(p, n_values, a_max, fam.part_rhs, lambda n: 3 <= n <= p + 1))


def verify_relcp(p: int, n_values: Sequence[int], a_max: int = 3) -> VerificationReport:
    params = {"p": p, "n_values": list(n_values), "a_max": a_max}
    return _timed("relcp", params, lambda: _p2_expansion(p, n_values, a_max, fam.relcp_rhs, lambda n: n >= p + 2))


def _p2_expansion(p, n_values, a_max, rhs, in_range):
    if not all(in_range(n) for n in n_values):
        return UNSUPPORTED, {"reason": "n outside the stated range"}
    ctx = _ctx2(p)
    checked = 0
    for n in n_values:
        for a in range(1, a_max + 1):
            x = TensorElement.gen(a, n * ctx.g1, p * p) - rhs(a, n, ctx)
            r = normal_form(x, ctx)
            checked += 1
            if r:
                return FAIL, _witness(x, n=n, a=a, normal_form=r.to_json())
    return PASS, {"checked": checked}


# ---------------------------------------------------------------------------
# Membership claims


def leading_term_check(x: TensorElement, lead: Tuple[int, int, int], ctx: ModuleContext, scale=1) -> Tuple[bool, bool, Optional[Certificate]]:
    """Is ``x`` a boundary whose leading preimage term is ``scale`` (up to a unit) times ``lead``?

    ``lead`` is a monomial (m, i, j).  Returns (reachable with scale*lead
    plus strictly lower filtration, reachable with p*scale*lead plus lower,
    certificate of the first query).  The claim holds iff (True, False).
    """
    F = ctx.filtration_of(lead[1], lead[2])

    def low(g_):
        return ctx.filtration_of(g_[1], g_[2]) < F

    first = membership(x, ctx, low, [(lead, scale)])
    second = membership(x, ctx, low, [(lead, scale * ctx.p)])
    return first.inside, second.inside, first.certificate


def verify_nuevo(p: int, k: int) -> VerificationReport:
    def body():
        ctx = _ctx2(p, k)
        g1 = ctx.g1
        checked = 0
        for a in range(1, ctx.g2 + 1):
            for b in range(1, g1 * g1 + 1):
                x = TensorElement.gen(a, b, p, k * g1)
                ok, too_strong, _cert = leading_term_check(x, (0, a, b + k * g1), ctx)
                checked += 1
                if not ok or too_strong:
                    return FAIL, _witness(x, a=a, b=b, reachable=ok, reachable_with_p=too_strong)
        return PASS, {"checked": checked}

    return _timed("nuevo", {"p": p, "k": k}, body)


def verify_nuevo2(p: int, k: int) -> VerificationReport:
    def body():
        ctx = _ctx2(p, k)
        g1 = ctx.g1
        x = TensorElement.gen(p, g1 * g1 + 1, p, k * g1)
        lead = (0, p, g1 * g1 + k * g1 + 1)
        ok, too_strong, cert = leading_term_check(x, lead, ctx)
        # the companion generator named alongside the leading one
        companion = (0, 1, g1 * g1 + (k + 1) * g1 + 1)
        F2 = ctx.filtration_of(companion[1], companion[2])
        pair = membership(x, ctx, lambda g_: ctx.filtration_of(g_[1], g_[2]) < F2, [(lead, 1), (companion, 1)])
        payload = {"reachable": ok, "reachable_with_p": too_strong, "pair_below_companion": pair.inside}
        if ok and not too_strong:
            payload["certificate"] = cert.to_json()
            return PASS, payload
        return FAIL, {**_witness(x), **payload}

    return _timed("nuevo2", {"p": p, "k": k}, body)


def verify_dife(p: int, k: int) -> VerificationReport:
    def body():
        ctx = _ctx2(p, k)
        g1 = ctx.g1
        payload: Dict = {}
        # a) d([1, k g_1 + 1]) = unit * p v^{k g_1} [1, 1]
        d = apply_boundary(TensorElement.gen(1, k * g1 + 1), ctx)
        canon_d = canonical_form(d, ctx)
        keys = list(canon_d.keys())
        a_ok = keys == [(1, 1, k * g1)] and valuation(canon_d.coeff(1, 1, k * g1), p) == 1
        payload["a"] = {"normal_form": d.to_json(), "pass": a_ok}
        # b) v^{(kp+2) g_1}[1,1] with leading preimage p [p, (pk+1) g_1 + 1]
        m0 = (k * p + 2) * g1
        x = TensorElement.gen(1, 1, 1, m0)
        ok, too_strong, cert = leading_term_check(x, (0, p, (p * k + 1) * g1 + 1), ctx, scale=p)
        b_ok = ok and not too_strong
        payload["b"] = {"reachable": ok, "reachable_with_p2": too_strong, "pass": b_ok}
        if cert is not None:
            payload["b"]["certificate"] = cert.to_json()
        # minimality
        below_v = membership(TensorElement.gen(1, 1, 1, m0 - 1), ctx).inside
        below_pv = membership(TensorElement.gen(1, 1, p, k * g1 - 1), ctx).inside
        payload["minimality"] = {"v_below_inside": below_v, "pv_below_inside": below_pv}
        min_ok = not below_v and not below_pv
        # for k >= 6 the S-term expansion that leads to b) must hold as well
        seed_ok = True
        if k >= 6:
            n = k - 5
            f, _h1, _h2 = fam.sdif_exponents(k, 0, n, ctx)
            b = f + g1 * g1 + 1
            S, Sn = fam.s_terms(p, b, k, n, ctx)
            residual = S - Sn.scale(p ** (k + 1)) - fam.sdif_rhs(p, b, k, n, ctx)
            seed_ok = not normal_form(residual - sdif_sigma(p, b, k, n, ctx), ctx)
            payload["s_term_seed"] = {"b": b, "pass": seed_ok}
        verdict = PASS if a_ok and b_ok and min_ok and seed_ok else FAIL
        if verdict == FAIL and not a_ok:
            payload.update(_witness(d))
        elif verdict == FAIL:
            payload.update(_witness(x))
        return verdict, payload

    return _timed("dife", {"p": p, "k": k}, body)


def cp_a_values(ctx: ModuleContext, mode: str, count: int = 3) -> List[int]:
    """``multiples``: a = g_1, 2g_1, ...; ``all``: a = 1, 2, ..., count*g_1."""
    if mode == "multiples":
        return [t * ctx.g1 for t in range(1, count + 1)]
    if mode == "all":
        return list(range(1, count * ctx.g1 + 1))
    raise UsageError(f"unknown a-range {mode!r}")


def verify_cp(p: int, k: int, a_values: Optional[Iterable[int]] = None, mode: str = "multiples") -> VerificationReport:
    """d([a, k g_1]) lies in d(lower filtration) + relations, i.e. a cycle completion exists."""
    params = {"p": p, "k": k, "mode": mode}

    def body():
        ctx = _ctx2(p, k)
        avals = list(a_values) if a_values is not None else cp_a_values(ctx, mode)
        params["a_values"] = avals
        completions = {}
        for a in avals:
            gen = TensorElement.gen(a, k * ctx.g1)
            F = ctx.filtration_of(a, k * ctx.g1)
            target = boundary_raw(gen, ctx)
            res = membership(target, ctx, lambda g_: ctx.filtration_of(g_[1], g_[2]) < F)
            if not res.inside:
                return FAIL, _witness(target, a=a)
            cert = res.certificate
            cycle = gen - cert.preimage()
            if not (cert.replay() and in_relation_span(boundary_raw(cycle, ctx), ctx)):
                return FAIL, _witness(cycle, a=a, reason="completion is not a cycle")
            completions[str(a)] = {"cycle": cycle.to_json(), "certificate": cert.to_json()}
        return PASS, {"completions": completions}

    return _timed("cp", params, body)


def verify_diagonal(p: int, e: int) -> VerificationReport:
    """The e families of differentials p^t[g_t+1, g_{t+1}+1] -> p^{e-t-1} v^{g_t+g_{t+1}}[1,1]."""

    def body():
        if e < 2:
            return UNSUPPORTED, {"reason": "needs e >= 2"}
        ctx = ModuleContext(p, e, e - 1)
        table = []
        ok = True
        for t in range(e):
            x = TensorElement.gen(1, 1, p ** (e - t - 1), g(p, t) + g(p, t + 1))
            inside = membership(x, ctx).inside
            lead_ok, too_strong, _ = leading_term_check(x, (0, g(p, t) + 1, g(p, t + 1) + 1), ctx, scale=p**t)
            row = {"t": t, "inside": inside, "leading_p_power_t": lead_ok and not too_strong}
            ok = ok and inside and row["leading_p_power_t"]
            table.append(row)
        return (PASS if ok else FAIL), {"table": table}

    return _timed("diagonal", {"p": p, "e": e}, body)


def verify_ann(p: int, k: int, v_max: Optional[int] = None) -> VerificationReport:
    def body():
        ctx = _ctx2(p, k)
        st = annihilator_staircase(ctx, v_max)
        g1 = ctx.g1
        variant = {k * g1: "k*g1 (theorem)", (k - 1) * g1: "(k-1)*g1 (introduction)"}.get(st.m1, "neither")
        payload = st.to_json()
        payload["m1_variant"] = variant
        payload["monotone"] = st.monotone
        if st.m0 is None:
            return "inconclusive", payload
        ok = st.p2 and st.m0 == (k * p + 2) * g1 and variant != "neither" and st.monotone
        return (PASS if ok else FAIL), payload

    return _timed("ann", {"p": p, "k": k, "vmax": v_max}, body)


# ---------------------------------------------------------------------------
# Normal-form uniqueness


def random_element(ctx: ModuleContext, W: int, rng: random.Random, terms: int = 4, fractions: bool = True) -> TensorElement:
    """Random homogeneous element of weight W with p-local coefficients."""
    out = []
    for _ in range(terms):
        i = rng.randint(1, W - 1)
        j = rng.randint(1, W - i)
        m = W - i - j
        c = rng.randint(-60, 60)
        if fractions and rng.random() < 0.3:
            den = rng.choice([d for d in range(2, 12) if d % ctx.p])
            c = Fraction(c, den)
        out.append(((i, j, m), c))
    return TensorElement(out)


def random_relation_combo(ctx: ModuleContext, W: int, rng: random.Random, terms: int = 3) -> TensorElement:
    acc = TensorElement.zero()
    for _ in range(terms):
        i = rng.randint(1, W - 1)
        j = rng.randint(1, W - i)
        acc = acc + relation(W - i - j, i, j, ctx).scale(rng.randint(-9, 9))
    return acc


def verify_nf_uniqueness(ctx: ModuleContext, sample_count: int = 200, seed: int = 0, w_max: int = 9) -> VerificationReport:
    """Both rewriting orders agree in the module, and canonical forms separate classes.

    Literal agreement of the two orders is not expected (they can stop at
    different representatives); the count of such cases is reported.
    """
    params = {"p": ctx.p, "n": ctx.n, "k": ctx.k, "samples": sample_count, "seed": seed}

    def body():
        rng = random.Random(seed)
        literal_differences = same_checked = diff_checked = 0
        for _ in range(sample_count):
            W = rng.randint(2, w_max)
            x = random_element(ctx, W, rng)
            a, b = normal_form(x, ctx), normal_form_highest_first(x, ctx)
            if a != b:
                literal_differences += 1
            if not in_relation_span(a - b, ctx) or not in_relation_span(x - a, ctx):
                return FAIL, _witness(x, reason="orders disagree in the module")
            # y in the same class
            y = x + random_relation_combo(ctx, W, rng)
            same_checked += 1
            if canonical_form(x, ctx) != canonical_form(y, ctx) or normal_form(x - y, ctx):
                return FAIL, _witness(x, other=y.to_json(), reason="equal classes separated")
            # z usually in a different class
            z = x + random_element(ctx, W, rng, terms=1, fractions=False)
            same = in_relation_span(x - z, ctx)
            diff_checked += 1
            if (canonical_form(x, ctx) == canonical_form(z, ctx)) != same:
                return FAIL, _witness(x, other=z.to_json(), reason="canonical form disagrees with solver")
        return PASS, {"literal_differences": literal_differences, "same_class_checked": same_checked, "other_checked": diff_checked}

    return _timed("nf-unique", params, body)


# ---------------------------------------------------------------------------
# Replay and grids


def replay_certificates(obj) -> VerificationReport:
    """Re-validate certificates (a single one, a list, or any nested JSON holding them)."""

    def collect(node, acc):
        if isinstance(node, dict):
            if {"ctx", "target", "boundary", "relations"} <= node.keys():
                acc.append(node)
            else:
                for v in node.values():
                    collect(v, acc)
        elif isinstance(node, list):
            for v in node:
                collect(v, acc)
        return acc

    def body():
        certs = collect(obj, [])
        if not certs:
            return FAIL, {"reason": "no certificates found"}
        for idx, c in enumerate(certs):
            if not Certificate.from_json(c).replay():
                return FAIL, {"index": idx, "reason": "replay mismatch", "witness": c["target"]}
        return PASS, {"replayed": len(certs)}

    return _timed("replay", {}, body)


def default_tasks(claim: str, p: int, k: int, n: int = 2) -> List[Tuple[Callable, tuple]]:
    """Desk-scale grid for one claim at the given (p, k)."""
    if claim == "lemma-torsion":
        return [(verify_lemma_torsion, (p, n, 4 if n == 2 else 3, 5))]
    if claim == "teoosa":
        return [(verify_teoosa, (p, k))]
    if claim == "ck":
        return [(verify_ck, (20,))]
    if claim == "sdif":
        return [(verify_sdif, (p, kk, nn)) for kk in (5, 6, 7) for nn in range(0, kk - 4)]
    if claim == "sumas":
        return [(verify_sumas, (p, k, 2, 3 * (k + 2) * (p - 1)))]
    if claim in ("nuevo", "nuevo2", "dife", "diagonal", "ann"):
        fn = {"nuevo": verify_nuevo, "nuevo2": verify_nuevo2, "dife": verify_dife, "ann": verify_ann, "diagonal": verify_diagonal}[claim]
        return [(fn, (p, k if claim != "diagonal" else max(k, 2)))]
    if claim == "cp":
        return [(verify_cp, (p, k, None, "multiples")), (verify_cp, (p, k, None, "all"))]
    if claim == "part":
        return [(verify_part, (p, list(range(3, p + 2))))]
    if claim == "relcp":
        return [(verify_relcp, (p, [p + 2, p + 3]))]
    if claim == "nf-unique":
        return [(_nf_task, (p, n, k))]
    raise UsageError(f"unknown claim {claim!r}")


def _nf_task(p: int, n: int, k: int, samples: int = 200, seed: int = 0) -> VerificationReport:
    return verify_nf_uniqueness(ModuleContext(p, n, max(k, n - 1)), samples, seed)


def _run(task):
    fn, args = task
    return fn(*args)


def run_tasks(tasks: Sequence[Tuple[Callable, tuple]], jobs: int = 1) -> List[VerificationReport]:
    """Run independent verification tasks, optionally in worker processes.

    Results come back in task order whatever the pool does.
    """
    tasks = list(tasks)
    if jobs <= 1 or len(tasks) <= 1:
        return [_run(t) for t in tasks]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run, tasks))


def reports_json(reports: Sequence[VerificationReport], timing: bool = False) -> str:
    return json.dumps([r.to_json(timing) for r in reports], sort_keys=True, indent=2)
