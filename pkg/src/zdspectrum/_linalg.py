"""Dense linear algebra in two numeric modes.

Exact mode works on nested lists of ints/Fractions with fraction-free
elimination; float mode defers to LAPACK through numpy.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def det_exact(rows) -> Fraction:
    """Determinant by Bareiss elimination; every intermediate stays exact."""
    a = [[Fraction(x) for x in row] for row in rows]
    n = len(a)
    if n == 0:
        return Fraction(1)
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) / prev
        prev = akk
    return sign * a[n - 1][n - 1]


def solve_exact(rows, rhs) -> list:
    """Solve ``A x = rhs`` by Gauss-Jordan elimination over the rationals."""
    n = len(rows)
    a = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(rows, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise np.linalg.LinAlgError("singular matrix")
        a[col], a[pivot] = a[pivot], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


def det(rows, exact: bool):
    if exact:
        return det_exact(rows)
    return float(np.linalg.det(np.asarray(rows, dtype=float)))


def solve(rows, rhs, exact: bool):
    if exact:
        return solve_exact(rows, rhs)
    return np.linalg.solve(np.asarray(rows, dtype=float), np.asarray(rhs, dtype=float))
