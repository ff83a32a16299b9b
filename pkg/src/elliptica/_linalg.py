"""Small dense determinants over duck-typed complex scalars.

The matrices arising from nonintersecting path families never exceed a
handful of rows, so a plain Gaussian elimination with partial pivoting
is both sufficient and transparent. Entries may be built-in complex
numbers or any type supporting +, -, *, /, and abs (mpmath works).
"""

from __future__ import annotations


def det(rows):
    """Determinant of a square matrix given as a nested sequence."""
    a = [list(r) for r in rows]
    n = len(a)
    for r in a:
        if len(r) != n:
            raise ValueError("matrix must be square")
    if n == 0:
        return 1.0 + 0j
    sign = 1
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(a[r][col]))
        if abs(a[pivot][col]) == 0:
            return a[pivot][col]
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            sign = -sign
        inv = 1 / a[col][col]
        for r in range(col + 1, n):
            factor = a[r][col] * inv
            for c in range(col + 1, n):
                a[r][c] = a[r][c] - factor * a[col][c]
    result = a[0][0]
    for i in range(1, n):
        result = result * a[i][i]
    return -result if sign < 0 else result
