"""Recursive scalar families and the composite expressions built from them.

Everything is evaluated at concrete integers; memo tables are plain
``lru_cache`` dictionaries.  Expressions producing module elements drop
terms with nonpositive indices or negative v-exponents.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Tuple

from .scalars import LocalScalar, canon, invert_unit, unit_part
from .series import UsageError
from .tensor import ModuleContext, TensorElement, ab_total, term


# ---------------------------------------------------------------------------
# c_k(t), d_k(t)


@lru_cache(maxsize=None)
def cd(k: int, t: int) -> Tuple[int, int]:
    """(c_k(t), d_k(t))."""
    if t < 0 or k < 2:
        return 0, 0
    if t == 0:
        return 1, 1
    if k == 2:
        return 0, 0
    c_prev, d_prev = cd(k - 1, t)
    return cd(k - 1, t - 1)[1] + c_prev, c_prev


def c_(k: int, t: int) -> int:
    return cd(k, t)[0]


def d_(k: int, t: int) -> int:
    return cd(k, t)[1]


def d_pair(k: int, t: int) -> int:
    """d_{k,k-1}(t) = d_k(t) + d_{k-1}(t)."""
    return d_(k, t) + d_(k - 1, t)


def u1(ctx: ModuleContext) -> LocalScalar:
    """Unit part of the g_1-th coefficient of the [p^2]-series."""
    return unit_part(ctx.square_series[ctx.g1], ctx.p)


def upow(u: LocalScalar, e: int, p: int) -> LocalScalar:
    if e >= 0:
        return canon(Fraction(u) ** e)
    return canon(Fraction(invert_unit(u, p)) ** (-e))


def unit_constants(t: int, r: int, u: LocalScalar) -> Tuple[LocalScalar, int, LocalScalar]:
    """(c_t, c_t', c_{r,t})."""
    ct = (-1) ** (t + 1) * u**t
    ct_prime = (-1) ** (t + 1) * c_(2 * t + 1, t)
    crt = (-1) ** (t + r + 1) * u**t * c_(t + 2 * r + 1, r)
    return canon(ct), ct_prime, canon(crt)


# ---------------------------------------------------------------------------
# p_i^k(t) and its coefficients pi_{i,l}


@lru_cache(maxsize=None)
def pi_coeff(i: int, l: int, k: int) -> int:
    """Coefficient of d_{k-l+1}(t) in p_i^k(t), 1 <= l <= i + 2."""
    if not 1 <= l <= i + 2:
        return 0
    if i == 0:
        return 1
    if l <= 2:
        return pik(i - 1, k, 0)
    return pi_coeff(i, l - 1, k) - pi_coeff(i - 1, l - 2, k)


@lru_cache(maxsize=None)
def pik(i: int, k: int, t: int) -> int:
    """p_i^k(t) = sum_l pi_{i,l} d_{k-l+1}(t)."""
    if i < 0:
        raise UsageError("p_i^k needs i >= 0")
    return sum(pi_coeff(i, l, k) * d_(k - l + 1, t) for l in range(1, i + 3))


# ---------------------------------------------------------------------------
# Sums of A/B terms and the expansion of p^{k+1}[a,b]


def _pw(p: int, e: int) -> int:
    if e < 0:
        raise ValueError("negative power of p")
    return p**e


def sigma_sums(a: int, b: int, k: int, ctx: ModuleContext) -> Tuple[TensorElement, TensorElement, TensorElement]:
    if ctx.n != 2 or k < 2:
        raise UsageError("sigma sums need n = 2 and k >= 2")
    p, g1, g2 = ctx.p, ctx.g1, ctx.g2
    u = u1(ctx)
    s1 = TensorElement.zero()
    for t in range(0, k):
        ct = unit_constants(t, 0, u)[0]
        s1 = s1 + ab_total(a, b - t * g1, ctx).vmul(t * g1).scale(ct * _pw(p, k - t - 1))
    s2 = TensorElement.zero()
    for t in range(1, (k - 1) // 2 + 1):
        ctp = unit_constants(t, 0, u)[1]
        s2 = s2 + ab_total(a, b - t * g2, ctx).vmul(t * g2).scale(ctp * _pw(p, k - 2 * t - 1))
    s3 = TensorElement.zero()
    for r in range(1, (k - 2) // 2 + 1):
        for t in range(1, k - 1 - 2 * r + 1):
            crt = unit_constants(t, r, u)[2]
            s3 = s3 + ab_total(a, b - r * g2 - t * g1, ctx).vmul(r * g2 + t * g1).scale(crt * _pw(p, k - 2 * r - t - 1))
    return s1, s2, s3


def teoosa_rhs(a: int, b: int, k: int, ctx: ModuleContext) -> TensorElement:
    """Right-hand side of the expansion of p^{k+1}[a, b] in F (x) ku_*(Z/p^2)."""
    if ctx.n != 2 or k < 2:
        raise UsageError("the expansion needs n = 2 and k >= 2")
    p, g1, g2 = ctx.p, ctx.g1, ctx.g2
    u = u1(ctx)
    sign = (-1) ** k
    out = term(sign * upow(u, k, p) * p, k * g1, a, b - k * g1)
    out = out + term(sign * upow(u, k - 1, p), (k - 1) * g1 + g2, a, b - (k - 1) * g1 - g2)
    for t in range(1, k // 2 + 1):
        s = (-1) ** (k + t)
        ck, dk = cd(k + 1, t)
        if ck:
            e = (k - 2 * t) * g1 + t * g2
            out = out + term(ck * s * upow(u, k - 2 * t, p) * p, e, a, b - e)
        if dk and k - 2 * t - 1 >= 0:
            e = (k - 2 * t - 1) * g1 + (t + 1) * g2
            out = out + term(dk * s * upow(u, k - 2 * t - 1, p), e, a, b - e)
    s1, s2, s3 = sigma_sums(a, b, k, ctx)
    return out + s1 + s2 + s3


# ---------------------------------------------------------------------------
# S-terms


def f_index(i: int, g1: int) -> int:
    """f_i = (i + 3) g_1 + 1."""
    return (i + 3) * g1 + 1


def s_terms(a: int, b: int, k: int, n: int, ctx: ModuleContext) -> Tuple[TensorElement, TensorElement]:
    """(S_k^{[a,b]}, S_{k,n}^{[a,b]}) as raw elements."""
    if ctx.n != 2:
        raise UsageError("S-terms need n = 2")
    if not 0 <= n <= k - 3:
        raise UsageError("S_{k,n} needs 0 <= n <= k - 3")
    p, g1 = ctx.p, ctx.g1
    u = u1(ctx)
    fm1 = f_index(-1, g1)
    inner = (
        term(u, g1, a, b - g1)
        - term(upow(u, -1, p), p * g1, a, b - p * g1)
        - term(upow(u, -3, p), fm1 * g1, a, b - fm1 * g1)
    )
    S = term(p ** (k + 2), 0, a, b) + inner.scale(p ** (k + 1))
    Sn = TensorElement.zero()
    for i in range(n + 1):
        e = f_index(i, g1) * g1
        Sn = Sn + term(pik(i, k, 0) * upow(u, -(2 * i + 5), p), e, a, b - e)
    return S, Sn


def sdif_exponents(k: int, t: int, n: int, ctx: ModuleContext) -> Tuple[int, int, int]:
    """(f(k,t,n), h_1(k,t), h_2(t,n))."""
    g1, g2 = ctx.g1, ctx.g2
    f = (k + (t + n + 4) * g1 + 1) * g1
    h1 = (k - 2 * t - 3) * g1
    h2 = (t + 2) * g2 + f_index(n, g1) * g1
    return f, h1, h2


def sdif_rhs(a: int, b: int, k: int, n: int, ctx: ModuleContext) -> TensorElement:
    """Explicit double family in the expansion of S_k - p^{k+1} S_{k,n}."""
    if ctx.n != 2:
        raise UsageError("needs n = 2")
    if not 0 <= n <= k - 5:
        raise UsageError("needs 0 <= n <= k - 5")
    p = ctx.p
    u = u1(ctx)
    out = TensorElement.zero()
    for t in range(0, k // 2 - 1 + 1):
        s = (-1) ** (k + t)
        f, h1, h2 = sdif_exponents(k, t, n, ctx)
        out = out + term(s * pik(n + 1, k, t) * upow(u, k - (2 * n + 2 * t + 7), p) * p, f, a, b - f)
        if h1 >= 0:
            out = out + term(s * pik(n + 1, k - 1, t) * upow(u, k - (2 * n + 2 * t + 8), p), h1 + h2, a, b - h1 - h2)
    return out


# ---------------------------------------------------------------------------
# q-polynomials


def q_poly(k: int, p: int):
    """q_k(x_1, ..., x_k) as a sympy expression (q_0 = -1)."""
    import sympy

    if not 0 <= k <= p * p - 1:
        raise UsageError("q_k needs 0 <= k <= g_2")
    xs = sympy.symbols(f"x1:{k + 1}") if k else ()
    q = [sympy.Integer(-1)]
    for m in range(1, k + 1):
        top = m - 1 if m <= p - 2 else p - 2
        q.append(sympy.expand(-sum(xs[m - i - 1] * q[i] for i in range(top + 1))))
    return q[k]


def w_units(ctx: ModuleContext) -> List[LocalScalar]:
    """w_i: unit parts of the coefficients of the [p^2]-series, 0 <= i <= g_2."""
    return [unit_part(c, ctx.p) for c in ctx.square_series]


@lru_cache(maxsize=None)
def _q0_table(p: int, convention: str) -> Tuple[LocalScalar, ...]:
    ctx = ModuleContext(p, 2, 1, convention, validate=False)
    w = w_units(ctx)
    q: List[LocalScalar] = [-1]
    for m in range(1, p * p):
        top = m - 1 if m <= p - 2 else p - 2
        q.append(canon(-sum(w[m - i] * q[i] for i in range(0, top + 1))))
    return tuple(q)


def q_value(i: int, ctx: ModuleContext) -> LocalScalar:
    """q_i(w_1, ..., w_i), 0 <= i <= g_2."""
    return _q0_table(ctx.p, ctx.convention)[i]


def q0_eval(i: int, ctx: ModuleContext) -> LocalScalar:
    """q_i^{[0]}; zero outside 0 <= i <= p - 2."""
    if not 0 <= i <= ctx.p - 2:
        return 0
    return q_value(i, ctx)


@lru_cache(maxsize=None)
def _q_conv(i: int, s: int, p: int, convention: str) -> LocalScalar:
    ctx = ModuleContext(p, 2, 1, convention, validate=False)
    if s == 0:
        return q0_eval(i, ctx)
    return canon(sum(q0_eval(i - k, ctx) * _q_conv(k, s - 1, p, convention) for k in range(0, min(i, p - 2) + 1)))


def q_conv(i: int, s: int, ctx: ModuleContext) -> LocalScalar:
    """q_i^{[s]}: s-fold convolution of q^{[0]} with itself, window 0..p-2."""
    if s < 0:
        raise UsageError("s must be >= 0")
    if not 0 <= i <= ctx.p - 2:
        return 0
    return _q_conv(i, s, ctx.p, ctx.convention)


def lemma_p_power_rhs(a: int, k: int, ctx: ModuleContext) -> TensorElement:
    """sum_i u_1^{k-1} q_i^{[k-2]} p v^{(k-1)g_1+i}[a, g_1 - i]."""
    p, g1 = ctx.p, ctx.g1
    u = u1(ctx)
    out = TensorElement.zero()
    for i in range(p - 1):
        out = out + term(upow(u, k - 1, p) * q_conv(i, k - 2, ctx) * p, (k - 1) * g1 + i, a, g1 - i)
    return out


# ---------------------------------------------------------------------------
# hat-q families and compositions


def compositions(s: int, r: int, cap: int | None = None) -> List[Tuple[int, ...]]:
    """Ordered s-tuples of positive integers summing to r, entries <= cap."""
    if s <= 0:
        return [()] if r == 0 and s == 0 else []
    hi = r - (s - 1)
    if cap is not None:
        hi = min(hi, cap)
    out = []
    for first in range(1, hi + 1):
        out.extend((first,) + rest for rest in compositions(s - 1, r - first, cap))
    return out


def q_bar(m: int, ctx: ModuleContext) -> LocalScalar:
    """q^{[0]} indexed by the residue of m mod p; zero for residue p - 1."""
    k = m % ctx.p
    return 0 if k == ctx.p - 1 else q0_eval(k, ctx)


def q_hat0(part: int, i: int, ctx: ModuleContext) -> LocalScalar:
    """hat-q^{[0]}_{part*g_1 + i}, 1 <= part <= p + 1, 0 <= i <= p - 2."""
    p, g1 = ctx.p, ctx.g1
    if not 0 <= i <= p - 2:
        return 0
    w = w_units(ctx)
    if part == p + 1:
        return canon(sum(q0_eval(k, ctx) * w[ctx.g2 - k + i] for k in range(i + 1, p - 1)))
    if not 1 <= part <= p:
        raise UsageError(f"hat-q^[0] undefined for part {part}")
    # The correction removes the one summand whose w-index is = -1 mod p.
    # That index is (t+1)p - 1 only when i >= t; for i < t it is tp - 1.
    t = part - 1
    k = (i - t) % p
    acc = sum(q0_eval(m, ctx) * w[part * g1 + i - m] for m in range(p - 1))
    return canon(acc - q_bar(i - t, ctx) * w[part * g1 + i - k])


def q_hat0_literal(part: int, i: int, ctx: ModuleContext) -> LocalScalar:
    """hat-q^{[0]} with the correction always taken at w_{part*p - 1}."""
    p, g1 = ctx.p, ctx.g1
    w = w_units(ctx)
    acc = sum(q0_eval(m, ctx) * w[part * g1 + i - m] for m in range(p - 1))
    return canon(acc - q_bar(i - part + 1, ctx) * w[part * p - 1])


def q_hat(iota: Tuple[int, ...], i: int, ctx: ModuleContext) -> LocalScalar:
    """hat-q^{[s]}_{iota + i} for iota of length s >= 1.

    The s-fold product of the hat-q^{[0]} of each part with one q^{[0]},
    taken as a convolution in the offset; 0 <= i <= (s + 1)(p - 2).
    """
    return _q_hat(tuple(iota), i, ctx.p, ctx.convention)


@lru_cache(maxsize=None)
def _q_hat(iota, i, p, convention):
    ctx = ModuleContext(p, 2, 1, convention, validate=False)
    if not iota:
        return q0_eval(i, ctx)
    if i < 0 or i > (len(iota) + 1) * (p - 2):
        return 0
    head, rest = iota[0], iota[1:]
    return canon(sum(q_hat0(head, t, ctx) * _q_hat(rest, i - t, p, convention) for t in range(min(i, p - 2) + 1)))


def _w(ctx: ModuleContext, idx: int) -> LocalScalar:
    return w_units(ctx)[idx]


def _h_rows(a: int, n: int, ctx: ModuleContext, cap, kmax_first: int) -> TensorElement:
    """First row plus the H-indexed rows shared by both p^2[a, n g_1] expansions."""
    p, g1 = ctx.p, ctx.g1
    out = TensorElement.zero()
    for k in range(1, kmax_first + 1):
        for i in range(p - 1):
            e = k * p + i - 1
            out = out + term(_w(ctx, k * p - 1) * q0_eval(i, ctx) * p, e, a, n * g1 - e)
    for j in range(1, n - 1):
        s = n - j - 1
        nj = (n - j) * (p - 2)
        for t in range(1, j + 1):
            r = n - t - 1
            for iota in compositions(s, r, cap):
                for k in range(1, min(t, p - 1) + 1):
                    wk = _w(ctx, k * p - 1)
                    for i in range(nj + 1):
                        c = q_hat(iota, i, ctx)
                        if not c:
                            continue
                        e = r * g1 + k * p + i - 1
                        out = out + term(wk * c * p, e, a, n * g1 - e)
    return out


def part_rhs(a: int, n: int, ctx: ModuleContext) -> TensorElement:
    """Expansion of p^2[a, n g_1] for 3 <= n <= p + 1."""
    if ctx.n != 2:
        raise UsageError("needs n = 2")
    if not 3 <= n <= ctx.p + 1:
        raise UsageError("needs 3 <= n <= p + 1")
    return _h_rows(a, n, ctx, None, n - 1)


def relcp_rhs(a: int, n: int, ctx: ModuleContext) -> TensorElement:
    """Expansion of p^2[a, n g_1] for n >= p + 2.

    Compositions have entries <= p + 1; the rows led by the unit
    coefficient u_2 = w_{g_2} of v^{g_2} carry no factor p.
    """
    if ctx.n != 2:
        raise UsageError("needs n = 2")
    p, g1, g2 = ctx.p, ctx.g1, ctx.g2
    if n < p + 2:
        raise UsageError("needs n >= p + 2")
    out = _h_rows(a, n, ctx, p + 1, p - 1)
    u2 = _w(ctx, g2)
    for i in range(p - 1):
        out = out + term(u2 * q0_eval(i, ctx), g2 + i, a, n * g1 - g2 - i)
    for j in range(1, n - p - 1):
        nj = (n - j) * (p - 2)
        for t in range(1, j + 1):
            r = n - p - t - 1
            for iota in compositions(n - p - j - 1, r, p + 1):
                for i in range(nj + 1):
                    c = q_hat(iota, i, ctx)
                    if c:
                        e = r * g1 + g2 + i
                        out = out + term(u2 * c, e, a, n * g1 - e)
    return out
