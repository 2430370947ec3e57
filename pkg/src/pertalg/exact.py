"""Exact dense linear algebra over the rationals on numpy object arrays."""
from __future__ import annotations

from fractions import Fraction
from math import gcd

import numpy as np

from .algebra import NotInvertibleError


def matrix(rows, shape: tuple[int, int] | None = None) -> np.ndarray:
    if shape is not None and (shape[0] == 0 or shape[1] == 0):
        return np.zeros(shape, dtype=object)
    a = np.array([[Fraction(v) for v in r] for r in rows], dtype=object)
    if shape is not None:
        a = a.reshape(shape)
    return a


def zeros(m: int, n: int) -> np.ndarray:
    a = np.empty((m, n), dtype=object)
    a.fill(Fraction(0))
    return a


def eye(n: int) -> np.ndarray:
    a = zeros(n, n)
    for i in range(n):
        a[i, i] = Fraction(1)
    return a


def _integral(a: np.ndarray) -> tuple[np.ndarray, int]:
    den = 1
    for v in a.flat:
        q = v.denominator
        if q != 1:
            den = den * q // gcd(den, q)
    if den == 1:
        return np.array([[v.numerator for v in r] for r in a], dtype=object).reshape(a.shape), 1
    return np.array([[v.numerator * (den // v.denominator) for v in r] for r in a],
                    dtype=object).reshape(a.shape), den


def mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[1] == 0 or a.shape[0] == 0 or b.shape[1] == 0:
        return zeros(a.shape[0], b.shape[1])
    # integer matmul on a common denominator is much cheaper than Fraction arithmetic
    ia, da = _integral(a)
    ib, db = _integral(b)
    prod = ia.dot(ib)
    den = da * db
    out = np.empty(prod.shape, dtype=object)
    for idx, v in np.ndenumerate(prod):
        out[idx] = Fraction(v, den) if den != 1 else Fraction(v)
    return out


def is_zero(a: np.ndarray) -> bool:
    return not any(v != 0 for v in a.flat)


def rref(a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns (leftmost pivots first)."""
    r = a.copy()
    m, n = r.shape
    pivots: list[int] = []
    row = 0
    for col in range(n):
        if row >= m:
            break
        p = next((i for i in range(row, m) if r[i, col] != 0), None)
        if p is None:
            continue
        if p != row:
            r[[row, p]] = r[[p, row]]
        piv = r[row, col]
        r[row] = [v / piv for v in r[row]]
        for i in range(m):
            if i != row and r[i, col] != 0:
                f = r[i, col]
                r[i] = [u - f * v for u, v in zip(r[i], r[row])]
        pivots.append(col)
        row += 1
    return r, pivots


def rank(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    return len(rref(a)[1])


def nullspace(a: np.ndarray) -> np.ndarray:
    """Columns form a basis of the kernel, one per free column."""
    m, n = a.shape
    if m == 0:
        return eye(n)
    r, pivots = rref(a)
    free = [j for j in range(n) if j not in pivots]
    basis = zeros(n, len(free))
    for k, j in enumerate(free):
        basis[j, k] = Fraction(1)
        for i, pc in enumerate(pivots):
            basis[pc, k] = -r[i, j]
    return basis


def inverse(a: np.ndarray) -> np.ndarray:
    n, m = a.shape
    if n != m:
        raise NotInvertibleError(f"non-square matrix of shape {a.shape}")
    if n == 0:
        return zeros(0, 0)
    r, pivots = rref(np.hstack([a, eye(n)]))
    if pivots[:n] != list(range(n)):
        raise NotInvertibleError("matrix is singular (determinant 0)")
    return r[:, n:]


def left_inverse(b: np.ndarray) -> np.ndarray:
    """Some L with L b = 1 for b of full column rank."""
    n, k = b.shape
    if k == 0:
        return zeros(0, n)
    bt = b.T
    return mul(inverse(mul(bt, b)), bt)


def first_nonzero(a: np.ndarray) -> tuple[int, int, Fraction] | None:
    for (i, j), v in np.ndenumerate(a):
        if v != 0:
            return i, j, v
    return None
