"""Exact linear algebra on weight slices of F (x) ku_*(Z/p^n).

A slice of weight W is spanned by the monomials v^m [i, j] with
m + i + j = W.  Its presentation has two column families: boundary images
d_{k+1}(v^m [i, j]) and relations v^m * sum_t a_{t,n} [i, j - t].  Both are
expanded raw, so nothing here relies on normal forms.

For fixed (W, i) the relation block is a triangular Toeplitz matrix in j
whose symbol is f(x) = sum_t c_t x^t with c_0 = p^n.  Its inverse is the
Toeplitz matrix of 1/f, so p^E kills the slice of the relation quotient as
soon as p^E clears every denominator of 1/f mod x^{W-1}.  Hence the slice
is a finite p-group and elimination modulo p^E is exact.  Certificates
found mod p^E are lifted to exact ones by solving the relation block
over Z_(p) and are replayed by direct expansion before being returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .scalars import LocalScalar, canon, from_json, local, reduce_mod, to_json, valuation
from .series import UsageError
from .tensor import ModuleContext, TensorElement, boundary_raw, relation

Mono = Tuple[int, int, int]  # (m, i, j)


def slice_basis(W: int) -> List[Mono]:
    """All (m, i, j) with m + i + j = W, i, j >= 1, m >= 0, ordered by (i, j)."""
    return [(W - i - j, i, j) for i in range(1, W) for j in range(1, W - i + 1)]


@lru_cache(maxsize=None)
def _inverse_symbol(p: int, n: int, convention: str, length: int) -> Tuple[Fraction, ...]:
    ctx = ModuleContext(p, n, max(n - 1, 0), convention, validate=False)
    c = ctx.relation_series.coeffs
    b: List[Fraction] = []
    for t in range(length):
        acc = Fraction(1 if t == 0 else 0)
        for s in range(1, min(t, len(c) - 1) + 1):
            acc -= c[s] * b[t - s]
        b.append(acc / c[0])
    return tuple(b)


def relation_exponent(ctx: ModuleContext, W: int) -> int:
    """Smallest E with p^E * (weight-W slice) inside the relation span."""
    length = max(W - 1, 1)
    b = _inverse_symbol(ctx.p, ctx.n, ctx.convention, length)
    return max(_denominator_power(x, ctx.p) for x in b)


def _denominator_power(x: Fraction, p: int) -> int:
    d, e = x.denominator, 0
    while d % p == 0:
        d //= p
        e += 1
    return e


def solve_relations(z: Dict[Mono, LocalScalar], ctx: ModuleContext) -> Optional[Dict[Mono, LocalScalar]]:
    """Exact coefficients r with sum r_g * relation(g) == z, or None if z is
    not in the Z_(p)-span of the relations.

    The relation matrix of a slice is square and invertible over Q, so the
    rational solution is unique and membership is just p-integrality.
    """
    p = ctx.p
    coeffs = ctx.relation_series.coeffs
    c0 = Fraction(coeffs[0])
    by_block: Dict[Tuple[int, int], Dict[int, LocalScalar]] = {}
    for (m, i, j), val in z.items():
        if val:
            by_block.setdefault((m + j, i), {})[j] = val
    out: Dict[Mono, LocalScalar] = {}
    for (s, i), col in by_block.items():
        # relation at (s-j, i, j) hits row j - t with coefficient c_t
        r: Dict[int, Fraction] = {}
        for j in range(max(col), 0, -1):
            acc = Fraction(col.get(j, 0))
            for t in range(1, min(len(coeffs), s - j + 1)):
                rj = r.get(j + t)
                if rj:
                    acc -= coeffs[t] * rj
            if acc:
                rj = acc / c0
                if rj.denominator % p == 0:
                    return None
                r[j] = rj
        for j, val in r.items():
            out[(s - j, i, j)] = canon(val)
    return out


@dataclass
class SliceSystem:
    """Monomial basis of one weight slice with boundary and relation columns."""

    ctx: ModuleContext
    W: int
    basis: List[Mono]
    index: Dict[Mono, int]
    boundary_cols: List[Dict[int, int]]
    relation_cols: List[Dict[int, int]]
    exponent: int

    def domain(self) -> List[Mono]:
        return self.basis

    def column_matrix(self, boundary: Sequence[int], extra: Sequence[Dict[int, int]] = (), targets: Sequence[Dict[int, int]] = ()) -> np.ndarray:
        cols = [self.boundary_cols[c] for c in boundary] + list(extra) + self.relation_cols + list(targets)
        A = np.zeros((len(self.basis), len(cols)), dtype=object)
        for c, col in enumerate(cols):
            for r, val in col.items():
                A[r, c] = val
        return A

    def vector(self, x: TensorElement) -> Dict[int, LocalScalar]:
        out: Dict[int, LocalScalar] = {}
        for (i, j, m), c in x.items():
            key = (m, i, j)
            if key not in self.index:
                raise UsageError(f"term v^{m}[{i},{j}] does not have weight {self.W}")
            out[self.index[key]] = c
        return out


def _column(x: TensorElement, index: Dict[Mono, int]) -> Dict[int, int]:
    return {index[(m, i, j)]: c for (i, j, m), c in x.items()}


@lru_cache(maxsize=64)
def build_slice(ctx: ModuleContext, W: int) -> SliceSystem:
    if W < 2:
        return SliceSystem(ctx, W, [], {}, [], [], 0)
    basis = slice_basis(W)
    index = {b: r for r, b in enumerate(basis)}
    bcols = [_column(boundary_raw(TensorElement.gen(i, j, 1, m), ctx), index) for (m, i, j) in basis]
    rcols = [_column(relation(m, i, j, ctx), index) for (m, i, j) in basis]
    return SliceSystem(ctx, W, basis, index, bcols, rcols, relation_exponent(ctx, W))


# ---------------------------------------------------------------------------
# Certificates


@dataclass
class Certificate:
    """x = d(sum_g y_g g) + sum_g r_g relation(g), all coefficients in Z_(p)."""

    ctx: ModuleContext
    target: TensorElement
    boundary: Dict[Mono, LocalScalar]
    relations: Dict[Mono, LocalScalar]

    def preimage(self) -> TensorElement:
        return TensorElement([((i, j, m), c) for (m, i, j), c in self.boundary.items()])

    def expand(self) -> TensorElement:
        acc = boundary_raw(self.preimage(), self.ctx)
        for (m, i, j), r in self.relations.items():
            acc = acc + relation(m, i, j, self.ctx).scale(r)
        return acc

    def replay(self) -> bool:
        """Exact re-expansion check, no solving involved."""
        for c in list(self.boundary.values()) + list(self.relations.values()):
            if valuation(c, self.ctx.p) < 0:
                return False
        return self.expand() == self.target

    def to_json(self) -> dict:
        def entries(d):
            return [{"m": m, "i": i, "j": j, **to_json(c)} for (m, i, j), c in sorted(d.items())]

        return {
            "ctx": self.ctx.to_json(),
            "target": self.target.to_json(),
            "boundary": entries(self.boundary),
            "relations": entries(self.relations),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Certificate":
        c = obj["ctx"]
        ctx = ModuleContext(int(c["p"]), int(c["n"]), int(c["k"]), c.get("convention", "unsigned"), validate=False)

        def entries(lst):
            return {(int(e["m"]), int(e["i"]), int(e["j"])): from_json(e, ctx.p) for e in lst}

        return cls(ctx, TensorElement.from_json(obj["target"], ctx.p), entries(obj["boundary"]), entries(obj["relations"]))


@dataclass
class Membership:
    inside: bool
    certificate: Optional[Certificate] = None

    def __bool__(self):
        return self.inside


def _lift(system: SliceSystem, x: TensorElement, y: Dict[Mono, int], r_mod: Dict[Mono, int]) -> Certificate:
    ctx = system.ctx
    pre = TensorElement([((i, j, m), c) for (m, i, j), c in y.items()])
    acc = boundary_raw(pre, ctx)
    for (m, i, j), r in r_mod.items():
        acc = acc + relation(m, i, j, ctx).scale(r)
    residual = x - acc
    fix = solve_relations({(m, i, j): c for (i, j, m), c in residual.items()}, ctx)
    if fix is None:
        raise AssertionError("residual left the relation span; exponent bound is wrong")
    rel = dict(r_mod)
    for g_, c in fix.items():
        rel[g_] = canon(rel.get(g_, 0) + c)
    rel = {g_: c for g_, c in rel.items() if c != 0}
    cert = Certificate(ctx, x, {g_: c for g_, c in y.items() if c}, rel)
    if not cert.replay():
        raise AssertionError("certificate failed exact replay")
    return cert


def membership(
    x: TensorElement,
    ctx: ModuleContext,
    domain: Optional[Callable[[Mono], bool]] = None,
    extra: Iterable[Tuple[Mono, LocalScalar]] = (),
) -> Membership:
    """Decide whether ``x`` lies in Im d_{k+1} (modulo the relations).

    ``domain`` optionally restricts the boundary preimage to generators
    satisfying a predicate; ``extra`` adjoins scaled generators
    ``(g, s)`` contributing d(s * g) as additional columns.  These are used
    for filtration-restricted questions.
    """
    if not x:
        return Membership(True, Certificate(ctx, x, {}, {}))
    W = x.weight()
    system = build_slice(ctx, W)
    p = ctx.p
    for c in x._t.values():
        if valuation(c, p) < 0:
            raise UsageError("coefficients must be p-local")
    N = max(system.exponent, 1)
    bdom = [c for c, g_ in enumerate(system.basis) if domain is None or domain(g_)]
    extra = list(extra)
    extra_cols = [{r: val * s for r, val in system.boundary_cols[system.index[g_]].items()} for g_, s in extra]
    target = {r: reduce_mod(c, p, N) for r, c in system.vector(x).items()}
    extra_cols = [{r: reduce_mod(val, p, N) for r, val in col.items()} for col in extra_cols]
    A = system.column_matrix(bdom, extra_cols, [target])
    ncp = A.shape[1] - 1
    work, pivots = kernels.echelon(A, ncp, p, N)
    sol = kernels.back_substitute(work, pivots, ncp, p, N)
    if sol is None:
        return Membership(False)
    y: Dict[Mono, LocalScalar] = {}
    r_mod: Dict[Mono, int] = {}
    nb, ne = len(bdom), len(extra)
    for col, val in sol.items():
        if not val:
            continue
        if col < nb:
            g_ = system.basis[bdom[col]]
            y[g_] = y.get(g_, 0) + val
        elif col < nb + ne:
            g_, s = extra[col - nb]
            y[g_] = canon(y.get(g_, 0) + val * s)
        else:
            r_mod[system.basis[col - nb - ne]] = val
    return Membership(True, _lift(system, x, y, r_mod))


def in_relation_span(x: TensorElement, ctx: ModuleContext) -> bool:
    """x == 0 in the module, decided by exact triangular solve (no rewriting)."""
    z = {(m, i, j): c for (i, j, m), c in x.items()}
    return solve_relations(z, ctx) is not None


# ---------------------------------------------------------------------------
# Slice invariants


@dataclass
class SliceGroup:
    """Finite abelian p-group given by its elementary divisor exponents."""

    p: int
    exponents: List[int]
    free_rank: int = 0

    @property
    def log_order(self) -> int:
        return sum(self.exponents)

    def describe(self) -> str:
        if not self.exponents and not self.free_rank:
            return "0"
        parts = [f"Z/{self.p}^{e}" if e > 1 else f"Z/{self.p}" for e in self.exponents]
        parts += ["Z_(p)"] * self.free_rank
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {"p": self.p, "exponents": self.exponents, "free_rank": self.free_rank, "log_order": self.log_order}


def _invariants(A: np.ndarray, p: int, N: int) -> List[int]:
    work, pivots = kernels.echelon(A, A.shape[1], p, N)
    rows = A.shape[0]
    exps = [v for _r, _c, v in pivots if v > 0] + [N] * (rows - len(pivots))
    return sorted(exps)


def elementary_divisors(ctx: ModuleContext, W: int) -> Tuple[SliceGroup, SliceGroup]:
    """Cokernel of d_{k+1} on the weight-W slice, and its kernel.

    For an endomorphism of a finite group the kernel is Pontryagin dual to
    the cokernel of the transposed map, which is again a slice presentation
    (transposed boundary and relation blocks).
    """
    if W < 2:
        return SliceGroup(ctx.p, []), SliceGroup(ctx.p, [])
    system = build_slice(ctx, W)
    N = max(system.exponent, 1)
    A = system.column_matrix(range(len(system.basis)))
    coker = SliceGroup(ctx.p, _invariants(A, ctx.p, N))
    size = len(system.basis)
    D, R = A[:, :size], A[:, size:]
    AT = np.concatenate([D.T, R.T], axis=1)
    ker = SliceGroup(ctx.p, _invariants(AT, ctx.p, N))
    return coker, ker


# ---------------------------------------------------------------------------
# Annihilator of the toral class


@dataclass
class Staircase:
    p: int
    k: int
    v_max: int
    m0: Optional[int]
    m1: Optional[int]
    p2: bool
    inside_v: List[bool] = field(default_factory=list)
    inside_pv: List[bool] = field(default_factory=list)
    certificates: Dict[str, Certificate] = field(default_factory=dict)

    @property
    def monotone(self) -> bool:
        def mono(seq):
            return all(not a or b for a, b in zip(seq, seq[1:]))

        return mono(self.inside_v) and mono(self.inside_pv)

    def to_json(self, with_certificates: bool = True) -> dict:
        out = {
            "p": self.p,
            "k": self.k,
            "vmax": self.v_max,
            "m0": self.m0 if self.m0 is not None else f"not found <= {self.v_max}",
            "m1": self.m1 if self.m1 is not None else f"not found <= {self.v_max}",
            "p2": self.p2,
        }
        if with_certificates:
            out["certificates"] = {name: c.to_json() for name, c in sorted(self.certificates.items())}
        return out


def default_vmax(ctx: ModuleContext) -> int:
    return (ctx.k * ctx.p + 2) * ctx.g1 + 2 * ctx.g1


def annihilator_staircase(ctx: ModuleContext, v_max: Optional[int] = None) -> Staircase:
    """Minimal m with v^m [1,1], resp. p v^m [1,1], in Im d + relations."""
    if v_max is None:
        v_max = default_vmax(ctx)
    p = ctx.p
    p2 = membership(TensorElement.gen(1, 1, p * p), ctx)
    inside_v, inside_pv = [], []
    certs: Dict[str, Certificate] = {}
    if p2.inside:
        certs["p2"] = p2.certificate
    for m in range(v_max + 1):
        a = membership(TensorElement.gen(1, 1, 1, m), ctx)
        b = membership(TensorElement.gen(1, 1, p, m), ctx)
        inside_v.append(a.inside)
        inside_pv.append(b.inside)
        if a.inside and "m0" not in certs:
            certs["m0"] = a.certificate
        if b.inside and "m1" not in certs:
            certs["m1"] = b.certificate
    m0 = inside_v.index(True) if True in inside_v else None
    m1 = inside_pv.index(True) if True in inside_pv else None
    return Staircase(p, ctx.k, v_max, m0, m1, p2.inside, inside_v, inside_pv, certs)


# ---------------------------------------------------------------------------
# Independent oracles


def crosscheck_modpN(x: TensorElement, ctx: ModuleContext, N: Optional[int] = None) -> str:
    """Membership decided in Z/p^N with the int64 kernel.

    Relation columns come first here (the exact path puts boundary columns
    first), so pivots and certificates differ between the two routes.
    Returns "inside", "outside" or "inconclusive": a solution mod p^N only
    proves membership when p^N kills the slice, which is checked against
    the relation exponent; a failure mod p^N is always conclusive.
    """
    if N is None:
        N = ctx.n + ctx.k + 4
    if not x:
        return "inside"
    W = x.weight()
    system = build_slice(ctx, W)
    p = ctx.p
    size = len(system.basis)
    A = np.zeros((size, 2 * size + 1), dtype=object)
    for c, col in enumerate(system.relation_cols + system.boundary_cols):
        for r, val in col.items():
            A[r, c] = val
    for r, c in system.vector(x).items():
        A[r, 2 * size] = reduce_mod(c, p, N)
    work, pivots = kernels.echelon(A, 2 * size, p, N)
    sol = kernels.back_substitute(work, pivots, 2 * size, p, N)
    if sol is None:
        return "outside"
    return "inside" if N >= system.exponent else "inconclusive"


def brute_force_log_order(ctx: ModuleContext, W: int, N: Optional[int] = None) -> int:
    """log_p of the order of the cokernel slice, by enumeration.

    Counts y in (Z/p^N)^basis with y . column == 0 (mod p^N) for every
    boundary and relation column; this is |Hom(coker, Z/p^N)|, which equals
    the group order once p^N kills the group.  Variables are visited in
    (j, i) order so each column closes at its own diagonal variable.
    """
    if W < 2:
        return 0
    system = build_slice(ctx, W)
    p = ctx.p
    if N is None:
        N = max(system.exponent, 1)
    M = p**N
    order = sorted(range(len(system.basis)), key=lambda r: (system.basis[r][2], system.basis[r][1]))
    cols = [(system.relation_cols[r], system.boundary_cols[r], r) for r in order]
    y = [0] * len(system.basis)

    def count(depth: int) -> int:
        if depth == len(cols):
            return 1
        rel, bd, r = cols[depth]
        s1 = sum(c * y[q] for q, c in rel.items() if q != r) % M
        s2 = sum(c * y[q] for q, c in bd.items() if q != r) % M
        d1, d2 = rel[r], bd[r]
        # d1 = p^n exactly: y is fixed mod p^(N-n), leaving p^n lifts
        if s1 % d1:
            return 0
        base = (-s1 // d1) % (M // d1)
        total = 0
        for lift in range(d1):
            val = base + lift * (M // d1)
            if (s2 + d2 * val) % M == 0:
                y[r] = val
                total += count(depth + 1)
        y[r] = 0
        return total

    n_solutions = count(0)
    return round(math.log(n_solutions, p))
