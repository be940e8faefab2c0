"""The module F (x) ku_*(Z/p^n): elements c v^m [i, j] = c v^m alpha_i (x) e_j.

The second factor carries, for every j >= 1, the relation

    sum_{t=0}^{p^n - 1} a_{t,n} e_{j-t} = 0        (e_h = 0 for h <= 0)

where a_{t,n} = c_t v^t are the [p^n]-series coefficients.  Since c_0 = p^n
this lets any coefficient divisible by p^n be pushed to strictly smaller
e-index, which is what ``normal_form`` does.

Weight ``m + i + j`` is preserved by the boundary and by the relations, so
every computation splits into finite weight slices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, Iterator, Tuple

from .scalars import LocalScalar, canon, from_json, reduce_mod, to_json, valuation
from .series import PSeries, UsageError, check_convention, check_prime, g, m_series

Key = Tuple[int, int, int]  # (i, j, m)


@dataclass(frozen=True)
class ModuleContext:
    """Parameters of F (x) ku_*(Z/p^n) together with the boundary d_{k+1}."""

    p: int
    n: int = 2
    k: int = 2
    convention: str = "unsigned"
    validate: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        check_prime(self.p)
        check_convention(self.convention)
        if self.validate:
            if self.n < 2:
                raise UsageError("n must be >= 2")
            if self.k < self.n - 1:
                raise UsageError("k must be >= n - 1")
        elif self.n < 1 or self.k < 0:
            raise UsageError("n must be >= 1 and k >= 0")

    def g(self, i: int) -> int:
        return g(self.p, i)

    @property
    def g1(self) -> int:
        return self.p - 1

    @property
    def g2(self) -> int:
        return self.p**2 - 1

    @cached_property
    def relation_series(self) -> PSeries:
        """[p^n]-series: drives the relations of the second factor."""
        return m_series(self.p, self.n, self.convention)

    @cached_property
    def boundary_series(self) -> PSeries:
        """[p^{k+1}]-series: drives d_{k+1}."""
        return m_series(self.p, self.k + 1, self.convention)

    @cached_property
    def square_series(self) -> PSeries:
        """[p^2]-series, used by the A/B sums and the named units."""
        return m_series(self.p, 2, self.convention)

    @property
    def pn(self) -> int:
        return self.p**self.n

    def filtration_of(self, i: int, j: int) -> int:
        return i * (self.p ** (self.k + 1) + 1) + j * (self.p**self.k + 1)

    def to_json(self) -> dict:
        return {"p": self.p, "n": self.n, "k": self.k, "convention": self.convention}


class TensorElement:
    """Immutable finite sum of terms c v^m [i, j] with i, j >= 1, m >= 0.

    Stored internally as ``{(i, j, m): c}``.  Terms with a nonpositive
    index or negative v-exponent are silently dropped on construction.
    """

    __slots__ = ("_t", "_hash")

    def __init__(self, terms: Dict[Key, LocalScalar] | Iterable[Tuple[Key, LocalScalar]] = ()):
        items = terms.items() if isinstance(terms, dict) else terms
        acc: Dict[Key, LocalScalar] = {}
        for (i, j, m), c in items:
            if i <= 0 or j <= 0 or m < 0 or c == 0:
                continue
            key = (i, j, m)
            acc[key] = acc.get(key, 0) + c
        self._t = {key: canon(c) for key, c in acc.items() if c != 0}
        self._hash = None

    @classmethod
    def _raw(cls, terms: Dict[Key, LocalScalar]) -> "TensorElement":
        obj = cls.__new__(cls)
        obj._t = terms
        obj._hash = None
        return obj

    @classmethod
    def gen(cls, i: int, j: int, coeff: LocalScalar = 1, m: int = 0) -> "TensorElement":
        """The element coeff * v^m [i, j] (zero when out of range)."""
        return cls([((i, j, m), coeff)])

    zero = classmethod(lambda cls: cls._raw({}))

    # -- container protocol -------------------------------------------------
    def items(self) -> Iterator[Tuple[Key, LocalScalar]]:
        return iter(sorted(self._t.items()))

    def coeff(self, i: int, j: int, m: int) -> LocalScalar:
        return self._t.get((i, j, m), 0)

    def keys(self):
        return self._t.keys()

    def __len__(self):
        return len(self._t)

    def __bool__(self):
        return bool(self._t)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self._t
        return isinstance(other, TensorElement) and self._t == other._t

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._t.items()))
        return self._hash

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other: "TensorElement") -> "TensorElement":
        out = dict(self._t)
        for key, c in other._t.items():
            s = out.get(key, 0) + c
            if s == 0:
                out.pop(key, None)
            else:
                out[key] = canon(s)
        return TensorElement._raw(out)

    def __neg__(self) -> "TensorElement":
        return TensorElement._raw({key: -c for key, c in self._t.items()})

    def __sub__(self, other: "TensorElement") -> "TensorElement":
        return self + (-other)

    def scale(self, s: LocalScalar) -> "TensorElement":
        if s == 0:
            return TensorElement.zero()
        return TensorElement._raw({key: canon(c * s) for key, c in self._t.items()})

    def __mul__(self, s):
        return self.scale(s)

    __rmul__ = __mul__

    def vmul(self, e: int) -> "TensorElement":
        """Multiply by v^e; negative e drops terms whose exponent goes below 0."""
        return TensorElement._raw({(i, j, m + e): c for (i, j, m), c in self._t.items() if m + e >= 0})

    # -- grading ------------------------------------------------------------
    def weights(self) -> set:
        return {i + j + m for (i, j, m) in self._t}

    def weight(self) -> int:
        ws = self.weights()
        if len(ws) != 1:
            raise UsageError(f"element is not weight-homogeneous (weights {sorted(ws)})")
        return ws.pop()

    # -- serialization ------------------------------------------------------
    def to_json(self) -> dict:
        grouped: Dict[Tuple[int, int], list] = {}
        for (i, j, m), c in sorted(self._t.items()):
            grouped.setdefault((i, j), []).append({"v": m, **to_json(c)})
        return {"terms": [{"i": i, "j": j, "poly": poly} for (i, j), poly in sorted(grouped.items())]}

    @classmethod
    def from_json(cls, obj: dict, p: int) -> "TensorElement":
        terms = []
        for term in obj.get("terms", []):
            for mono in term["poly"]:
                terms.append(((int(term["i"]), int(term["j"]), int(mono["v"])), from_json(mono, p)))
        return cls(terms)

    def __repr__(self):
        if not self._t:
            return "0"
        parts = []
        for (i, j, m), c in sorted(self._t.items()):
            vpart = "" if m == 0 else ("v" if m == 1 else f"v^{m}")
            parts.append(f"{c}{'*' if vpart else ''}{vpart}[{i},{j}]")
        return " + ".join(parts)


def term(coeff: LocalScalar, m: int, i: int, j: int) -> TensorElement:
    """coeff * v^m [i, j] with v^m = 0 for m < 0 and [i, j] = 0 off-range."""
    return TensorElement.gen(i, j, coeff, m)


def _series_terms(series: PSeries, start: int, limit: int):
    # (t, c_t) for start <= t < min(len, limit)
    coeffs = series.coeffs
    for t in range(start, min(len(coeffs), limit)):
        c = coeffs[t]
        if c:
            yield t, c


# ---------------------------------------------------------------------------
# Relations and normal forms


def relation(m: int, i: int, j: int, ctx: ModuleContext) -> TensorElement:
    """The raw relation v^m * sum_t a_{t,n} [i, j - t] (zero in the module)."""
    return TensorElement([((i, j - t, m + t), c) for t, c in _series_terms(ctx.relation_series, 0, j)])


def _rewrite(terms: Dict[Key, LocalScalar], key: Key, q: LocalScalar, coeffs) -> None:
    # replace q * p^n [i, j] by -q * sum_{t>=1} c_t v^t [i, j - t]
    i, j, m = key
    for t in range(1, min(len(coeffs), j)):
        c = coeffs[t]
        if c:
            k2 = (i, j - t, m + t)
            s = terms.get(k2, 0) - q * c
            if s == 0:
                terms.pop(k2, None)
            else:
                terms[k2] = s


def normal_form(x: TensorElement, ctx: ModuleContext) -> TensorElement:
    """Rewrite coefficients of valuation >= n until none is left.

    One sweep from the top e-index down.  At each index the incoming
    contributions that are already multiples of p^n are rewritten as they
    arrive, before merging with the others; the merged remainder is
    rewritten only if it is itself a multiple of p^n.  Different orders can
    end in different (module-equal) representatives; use ``canonical_form``
    when a unique representative is needed.  The zero test is order
    independent: a nonzero element whose coefficients all have valuation
    < n is never a combination of relations.
    """
    p, n, pn = ctx.p, ctx.n, ctx.pn
    coeffs = ctx.relation_series.coeffs
    # (j) -> {(i, m): [reducible part, remainder]}
    pending: Dict[int, Dict[Tuple[int, int], list]] = {}

    def add(i, j, m, c):
        slot = pending.setdefault(j, {}).setdefault((i, m), [0, 0])
        slot[0 if valuation(c, p) >= n else 1] += c

    for (i, j, m), c in x._t.items():
        add(i, j, m, c)
    out: Dict[Key, LocalScalar] = {}
    while pending:
        j = max(pending)
        for (i, m), (red, rest) in sorted(pending.pop(j).items()):
            if rest != 0 and valuation(rest, p) >= n:
                red, rest = red + rest, 0
            if rest != 0:
                out[(i, j, m)] = rest
            if red == 0:
                continue
            q = canon(Fraction(red) / pn)
            for t in range(1, min(len(coeffs), j)):
                ct = coeffs[t]
                if ct:
                    add(i, j - t, m + t, -q * ct)
    return TensorElement({key: canon(c) for key, c in out.items()})


def normal_form_highest_first(x: TensorElement, ctx: ModuleContext) -> TensorElement:
    """Same rewrite system, sweeping e-indices from the top down.

    Each index is visited once, so contributions merge before they are
    inspected.  Kept to compare reduction orders.
    """
    p, pn = ctx.p, ctx.pn
    coeffs = ctx.relation_series.coeffs
    terms = dict(x._t)
    top = max((k[1] for k in terms), default=0)
    for j in range(top, 0, -1):
        for key in sorted(k for k in terms if k[1] == j):
            c = terms[key]
            if valuation(c, p) < ctx.n:
                continue
            del terms[key]
            _rewrite(terms, key, canon(Fraction(c) / pn), coeffs)
    return TensorElement({key: canon(c) for key, c in terms.items()})


def canonical_form(x: TensorElement, ctx: ModuleContext) -> TensorElement:
    """Unique representative: every coefficient reduced to a residue in [0, p^n).

    Two elements are equal in the module iff their canonical forms coincide.
    """
    pn = ctx.pn
    coeffs = ctx.relation_series.coeffs
    terms = dict(x._t)
    js = sorted({k[1] for k in terms}, reverse=True)
    for j in range(js[0] if js else 0, 0, -1):
        for key in sorted(k for k in list(terms) if k[1] == j):
            c = terms[key]
            r = reduce_mod(c, ctx.p, ctx.n)
            if r == c:
                continue
            q = canon(Fraction(c - r) / pn)
            if r:
                terms[key] = r
            else:
                del terms[key]
            _rewrite(terms, key, q, coeffs)
    return TensorElement(terms)


def equal_in_module(x: TensorElement, y: TensorElement, ctx: ModuleContext) -> bool:
    return not normal_form(x - y, ctx)


# ---------------------------------------------------------------------------
# Boundary, Smith morphisms, filtration


def boundary_raw(x: TensorElement, ctx: ModuleContext) -> TensorElement:
    """Linear extension of [i, j] -> sum_t a_{t,k+1} [i - t, j], no reduction."""
    coeffs = ctx.boundary_series.coeffs
    out: Dict[Key, LocalScalar] = {}
    for (i, j, m), c in x._t.items():
        for t in range(min(len(coeffs), i)):
            b = coeffs[t]
            if b:
                key = (i - t, j, m + t)
                out[key] = out.get(key, 0) + c * b
    return TensorElement(out)


def apply_boundary(x: TensorElement, ctx: ModuleContext) -> TensorElement:
    """d_{k+1}(x) in normal form."""
    return normal_form(boundary_raw(x, ctx), ctx)


def flip_v_element(x: TensorElement) -> TensorElement:
    """v -> -v; carries the unsigned module isomorphically onto the signed one."""
    return TensorElement._raw({(i, j, m): (-c if m % 2 else c) for (i, j, m), c in x._t.items()})


def smith_shift(x: TensorElement, di: int, dj: int) -> TensorElement:
    """phi_{di,dj}: [a, b] -> [a - di, b - dj], dropping nonpositive indices."""
    if di < 0 or dj < 0:
        raise UsageError("Smith shifts are non-negative")
    return TensorElement([((i - di, j - dj, m), c) for (i, j, m), c in x._t.items()])


def filtration(x: TensorElement, ctx: ModuleContext) -> int:
    if not x:
        raise ValueError("filtration of zero is undefined")
    return max(ctx.filtration_of(i, j) for (i, j, _m) in x.keys())


def leading_terms(x: TensorElement, ctx: ModuleContext) -> TensorElement:
    top = filtration(x, ctx)
    return TensorElement([(key, c) for key, c in x._t.items() if ctx.filtration_of(key[0], key[1]) == top])


def weight(m: int, i: int, j: int) -> int:
    return m + i + j


# ---------------------------------------------------------------------------
# The A/B sums built from the [p^2]-series


def ab_sums(a: int, b: int, ctx: ModuleContext) -> Tuple[TensorElement, TensorElement]:
    """A^{[a,b]} (t = 1..p-2) and B^{[a,b]} (t = p..p^2-2) of the [p^2]-series."""
    if ctx.n != 2:
        raise UsageError("A/B sums are defined for n = 2")
    p = ctx.p
    coeffs = ctx.square_series.coeffs
    A = TensorElement([((a, b - t, t), coeffs[t]) for t in range(1, p - 1)])
    B = TensorElement([((a, b - t, t), coeffs[t]) for t in range(p, p * p - 1)])
    return A, B


def ab_total(a: int, b: int, ctx: ModuleContext) -> TensorElement:
    A, B = ab_sums(a, b, ctx)
    return A + B
