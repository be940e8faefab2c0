"""The coefficient ring ku_* = Z_(p)[v], the multiplicative formal group law
and its [m]-series.

Two sign conventions are supported.  ``unsigned`` is the law x + y + vxy,
whose [p^n]-series has coefficients C(p^n, t+1) v^t; ``signed`` is
x + y - vxy, whose coefficients pick up a factor (-1)^t.  The two are
exchanged by the ring automorphism v -> -v.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Dict, Iterable, Tuple

from .scalars import LocalScalar, canon, from_json, is_prime, to_json, unit_part, valuation

CONVENTIONS = ("unsigned", "signed")


class UsageError(ValueError):
    """Bad parameters (composite prime, out-of-range index, ...)."""


def check_prime(p: int) -> None:
    if not is_prime(p):
        raise UsageError(f"p = {p} is not prime")


def check_convention(convention: str) -> None:
    if convention not in CONVENTIONS:
        raise UsageError(f"unknown convention {convention!r}")


def g(p: int, i: int) -> int:
    """g_i = p^i - 1."""
    return p**i - 1


class KuPoly:
    """Finitely supported map v-exponent -> Z_(p) scalar, zeros dropped."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Dict[int, LocalScalar] | Iterable[Tuple[int, LocalScalar]] = ()):
        items = coeffs.items() if isinstance(coeffs, dict) else coeffs
        c: Dict[int, LocalScalar] = {}
        for e, s in items:
            if e < 0:
                raise ValueError("negative v-exponent")
            c[e] = c.get(e, 0) + s
        self._c = {e: canon(s) for e, s in c.items() if s != 0}

    @classmethod
    def monomial(cls, coeff: LocalScalar, exponent: int) -> "KuPoly":
        return cls({exponent: coeff})

    def items(self):
        return sorted(self._c.items())

    def __getitem__(self, e: int) -> LocalScalar:
        return self._c.get(e, 0)

    def __bool__(self):
        return bool(self._c)

    def __eq__(self, other):
        return isinstance(other, KuPoly) and self._c == other._c

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __add__(self, other: "KuPoly") -> "KuPoly":
        return KuPoly(list(self._c.items()) + list(other._c.items()))

    def __neg__(self) -> "KuPoly":
        return KuPoly({e: -s for e, s in self._c.items()})

    def __sub__(self, other: "KuPoly") -> "KuPoly":
        return self + (-other)

    def __mul__(self, other) -> "KuPoly":
        if not isinstance(other, KuPoly):
            return KuPoly({e: s * other for e, s in self._c.items()})
        out: Dict[int, LocalScalar] = {}
        for e1, s1 in self._c.items():
            for e2, s2 in other._c.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + s1 * s2
        return KuPoly(out)

    __rmul__ = __mul__

    def __repr__(self):
        if not self._c:
            return "KuPoly(0)"
        return "KuPoly(" + " + ".join(f"{s}*v^{e}" for e, s in self.items()) + ")"


@dataclass(frozen=True)
class PSeries:
    """Coefficients of the [p^n]-series: a_t = coeffs[t] * v^t, 0 <= t < p^n."""

    p: int
    n: int
    convention: str
    coeffs: Tuple[int, ...]

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, t: int) -> int:
        return self.coeffs[t]

    def as_kupolys(self):
        return [KuPoly.monomial(c, t) for t, c in enumerate(self.coeffs)]

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "convention": self.convention,
            "coeffs": [{"v": t, **to_json(c)} for t, c in enumerate(self.coeffs)],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PSeries":
        p = int(obj["p"])
        coeffs = [None] * len(obj["coeffs"])
        for entry in obj["coeffs"]:
            coeffs[int(entry["v"])] = from_json(entry, p)
        return cls(p, int(obj["n"]), obj["convention"], tuple(coeffs))


@lru_cache(maxsize=None)
def m_series(p: int, n: int, convention: str = "unsigned") -> PSeries:
    """The [p^n]-series by closed-form binomial expansion."""
    check_prime(p)
    check_convention(convention)
    if n < 1:
        raise UsageError("n must be >= 1")
    m = p**n
    sign = -1 if convention == "signed" else 1
    coeffs = tuple(comb(m, t + 1) * sign**t for t in range(m))
    return PSeries(p, n, convention, coeffs)


def named_coefficient(p: int, n: int, t: int, convention: str = "unsigned") -> Tuple[LocalScalar, int, int]:
    """Factor a_t = unit * p^p_power * v^t with ``unit`` a p-local unit."""
    series = m_series(p, n, convention)
    if not 0 <= t < len(series):
        raise UsageError(f"t = {t} out of range for the [{p}^{n}]-series")
    c = series[t]
    return unit_part(c, p), valuation(c, p), t


def kummer_carries(p: int, a: int, b: int) -> int:
    """Number of carries when adding ``a`` and ``b`` in base ``p``."""
    carries = carry = 0
    while a or b or carry:
        s = a % p + b % p + carry
        carry = 1 if s >= p else 0
        carries += carry
        a //= p
        b //= p
    return carries


# ---------------------------------------------------------------------------
# Truncated bivariate series in (x, v); only used to cross-check m_series.

XVPoly = Dict[Tuple[int, int], int]


def _xv_add(f: XVPoly, g_: XVPoly) -> XVPoly:
    out = dict(f)
    for k, c in g_.items():
        out[k] = out.get(k, 0) + c
    return {k: c for k, c in out.items() if c}


def _xv_mul(f: XVPoly, g_: XVPoly, order: int) -> XVPoly:
    out: XVPoly = {}
    for (x1, v1), c1 in f.items():
        for (x2, v2), c2 in g_.items():
            if x1 + x2 <= order:
                key = (x1 + x2, v1 + v2)
                out[key] = out.get(key, 0) + c1 * c2
    return {k: c for k, c in out.items() if c}


def truncate(f: XVPoly, order: int) -> XVPoly:
    return {k: c for k, c in f.items() if k[0] <= order and c}


def fgl_add(f: XVPoly, g_: XVPoly, convention: str = "unsigned", order: int = 64) -> XVPoly:
    """F(f, g) = f + g +/- v f g, truncated at x-degree ``order``."""
    if order < 1:
        raise UsageError("truncation order must be >= 1")
    check_convention(convention)
    sign = 1 if convention == "unsigned" else -1
    vfg = {(x, e + 1): sign * c for (x, e), c in _xv_mul(f, g_, order).items()}
    return truncate(_xv_add(_xv_add(f, g_), vfg), order)


def iterate_series(m: int, convention: str = "unsigned", order: int = 64) -> XVPoly:
    """[m](x) by m-fold formal addition (slow oracle)."""
    x = {(1, 0): 1}
    acc: XVPoly = {}
    for _ in range(m):
        acc = fgl_add(x, acc, convention, order)
    return acc


def series_as_xv(series: PSeries) -> XVPoly:
    return {(t + 1, t): c for t, c in enumerate(series.coeffs) if c}


def compose(outer: PSeries, inner: XVPoly, order: int) -> XVPoly:
    """outer(inner(x)) truncated at x-degree ``order``."""
    out: XVPoly = {}
    power = {(0, 0): 1}
    for t, c in enumerate(outer.coeffs):
        power = _xv_mul(power, inner, order)
        if not power:
            break
        term = {(x, e + t): c * k for (x, e), k in power.items()}
        out = _xv_add(out, term)
    return truncate(out, order)


def flip_v(series: PSeries) -> PSeries:
    """Apply v -> -v, exchanging the two conventions."""
    other = "signed" if series.convention == "unsigned" else "unsigned"
    return PSeries(series.p, series.n, other, tuple((-1) ** t * c for t, c in enumerate(series.coeffs)))
