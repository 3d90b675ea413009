"""Exact rational linear algebra on object arrays of ``Fraction``."""

from __future__ import annotations

from fractions import Fraction

import numpy as np


class SingularMatrixError(ValueError):
    pass


def frac_array(rows) -> np.ndarray:
    arr = np.array(rows, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, x in np.ndenumerate(arr):
        if isinstance(x, float):
            raise TypeError("floats are not accepted in exact linear algebra")
        out[idx] = Fraction(x)
    return out


def identity(n: int) -> np.ndarray:
    return frac_array([[int(i == j) for j in range(n)] for i in range(n)])


def zeros(shape) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    out.fill(Fraction(0))
    return out


def is_zero(a) -> bool:
    return all(x == 0 for x in np.asarray(a, dtype=object).flat)


def rref(a):
    """Reduced row echelon form. Returns ``(R, pivot_columns)``."""
    R = [list(map(Fraction, row)) for row in np.asarray(a, dtype=object)]
    rows = len(R)
    cols = len(R[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if R[i][c] != 0), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        piv = R[r][c]
        R[r] = [x / piv for x in R[r]]
        for i in range(rows):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return frac_array(R) if R else zeros((0, cols)), pivots


def nullspace(a) -> list[np.ndarray]:
    """Basis of the right nullspace, one vector per free column (in column order)."""
    a = np.asarray(a, dtype=object)
    cols = a.shape[1]
    R, pivots = rref(a)
    basis = []
    for free in (c for c in range(cols) if c not in pivots):
        vec = zeros(cols)
        vec[free] = Fraction(1)
        for row, pc in enumerate(pivots):
            vec[pc] = -R[row][free]
        basis.append(vec)
    return basis


def solve(a, b):
    """One exact solution of ``a x = b`` with free variables set to zero, or None."""
    a = np.asarray(a, dtype=object)
    b = np.asarray(b, dtype=object).reshape(-1, 1)
    aug = np.concatenate([a, b], axis=1)
    R, pivots = rref(aug)
    cols = a.shape[1]
    if cols in pivots:
        return None
    x = zeros(cols)
    for row, pc in enumerate(pivots):
        x[pc] = R[row][cols]
    return x


def inverse(a) -> np.ndarray:
    a = np.asarray(a, dtype=object)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    R, pivots = rref(np.concatenate([a, identity(n)], axis=1))
    if pivots[:n] != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return R[:, n:]


def trace(a) -> Fraction:
    return sum((a[i, i] for i in range(a.shape[0])), Fraction(0))


def bracket(x, y):
    return x @ y - y @ x


def fmt(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
