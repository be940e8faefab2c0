"""Row echelon form over Z/p^N with minimal-valuation pivoting.

Z/p^N is a local principal ideal ring, so choosing as pivot an entry of
globally minimal p-valuation keeps every elimination step exact: all other
entries of the pivot column are divisible by the pivot's p-power.  The
pivot valuations are then exactly the elementary divisors of the matrix.

Two interchangeable backends are provided:

* ``numba``: compiled loops on int64 (requires modulus < 2**31 so that
  products fit in 63 bits);
* ``numpy``: vectorized row updates; also used with ``dtype=object`` for
  moduli too large for int64.

Set ``KUTORAL_BACKEND=numpy`` to disable numba.
"""

from __future__ import annotations

import os
from typing import List, Tuple

import numpy as np

INT64_SAFE_MODULUS = 2**31

try:  # pragma: no cover - exercised implicitly
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False


def backend() -> str:
    """Active backend name, honoring the ``KUTORAL_BACKEND`` environment flag."""
    requested = os.environ.get("KUTORAL_BACKEND", "numba").lower()
    if requested == "numba" and HAVE_NUMBA:
        return "numba"
    return "numpy"


Pivot = Tuple[int, int, int]  # (row, column, valuation)


def echelon_numpy(A: np.ndarray, ncp: int, p: int, N: int) -> List[Pivot]:
    """In-place echelon form of ``A`` mod p^N; only the first ``ncp`` columns may pivot.

    Works for int64 arrays (modulus < 2**31) and object arrays alike.
    """
    M = p**N
    rows = A.shape[0]
    if A.dtype != object:
        A %= M
    else:
        A[...] = A % M
    done = np.zeros(rows, dtype=bool)
    pivots: List[Pivot] = []
    v, pv = 0, 1
    while v < N:
        rem = np.flatnonzero(~done)
        if rem.size == 0:
            break
        sub = A[rem, :ncp]
        hits = np.flatnonzero(((sub % (pv * p)) != 0).ravel())
        if hits.size == 0:
            v += 1
            pv *= p
            continue
        flat = int(hits[0])
        r, c = int(rem[flat // ncp]), flat % ncp
        u = int(A[r, c]) // pv
        uinv = pow(u % M, -1, M)
        done[r] = True
        others = rem[rem != r]
        col = A[others, c]
        nz = others[col != 0]
        if nz.size:
            if A.dtype == object:
                f = (A[nz, c] // pv * uinv) % M
                A[nz] = (A[nz] - np.outer(f, A[r])) % M
            else:
                f = ((A[nz, c] // pv) % M * uinv) % M
                A[nz] = (A[nz] - np.outer(f, A[r]) % M) % M
        pivots.append((r, c, v))
    return pivots


if HAVE_NUMBA:

    @njit(cache=True)
    def _modinv(a, m):
        a = a % m
        r0, r1 = m, a
        s0, s1 = 0, 1
        while r1 != 0:
            q = r0 // r1
            r0, r1 = r1, r0 - q * r1
            s0, s1 = s1, s0 - q * s1
        return s0 % m

    @njit(cache=True)
    def _echelon_nb(A, ncp, p, N, M):
        rows, cols = A.shape
        for r in range(rows):
            for c in range(cols):
                A[r, c] = A[r, c] % M
        done = np.zeros(rows, np.bool_)
        out = np.empty((rows, 3), np.int64)
        npiv = 0
        v = 0
        pv = 1
        while v < N:
            pv1 = pv * p
            pr = -1
            pc = -1
            for r in range(rows):
                if done[r]:
                    continue
                for c in range(ncp):
                    a = A[r, c]
                    if a != 0 and a % pv1 != 0:
                        pr = r
                        pc = c
                        break
                if pr >= 0:
                    break
            if pr < 0:
                v += 1
                pv = pv1
                continue
            uinv = _modinv(A[pr, pc] // pv, M)
            done[pr] = True
            for r in range(rows):
                if done[r]:
                    continue
                e = A[r, pc]
                if e == 0:
                    continue
                f = ((e // pv) % M) * uinv % M
                for c in range(cols):
                    a = A[pr, c]
                    if a != 0:
                        A[r, c] = (A[r, c] - f * a % M) % M
            out[npiv, 0] = pr
            out[npiv, 1] = pc
            out[npiv, 2] = v
            npiv += 1
        return out[:npiv]


def echelon(A: np.ndarray, ncp: int, p: int, N: int, force: str | None = None) -> Tuple[np.ndarray, List[Pivot]]:
    """Echelon form of an integer matrix mod p^N (copying the input).

    Returns the reduced matrix (int64 or object) and the pivot list.
    """
    M = p**N
    which = force or backend()
    if M < INT64_SAFE_MODULUS:
        work = np.array(A, dtype=np.int64) if A.dtype != object else np.array([[int(a) % M for a in row] for row in A], dtype=np.int64).reshape(A.shape)
        if which == "numba" and HAVE_NUMBA:
            piv = _echelon_nb(work, ncp, p, N, M)
            return work, [tuple(int(x) for x in row) for row in piv]
        return work, echelon_numpy(work, ncp, p, N)
    work = np.array(A, dtype=object)
    return work, echelon_numpy(work, ncp, p, N)


def back_substitute(A: np.ndarray, pivots: List[Pivot], rhs_col: int, p: int, N: int):
    """Solve the pivot system for one right-hand column of an echelon matrix.

    Returns ``None`` if unsolvable, else ``{column: value mod p^N}``.
    """
    M = p**N
    pivot_rows = {r for r, _c, _v in pivots}
    for r in range(A.shape[0]):
        if r not in pivot_rows and int(A[r, rhs_col]) % M:
            return None
    for r, _c, v in pivots:
        if int(A[r, rhs_col]) % p**v:
            return None
    y = {}
    for r, c, v in reversed(pivots):
        acc = int(A[r, rhs_col])
        for c2, val in y.items():
            a = int(A[r, c2])
            if a:
                acc -= a * val
        acc %= M
        pv = p**v
        u = int(A[r, c]) // pv
        y[c] = (acc // pv) * pow(u % M, -1, M) % M
    return y
