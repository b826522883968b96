"""Exact rational/integer linear algebra used throughout the library.

Matrices are tuples of tuples of Fractions (or ints where noted). Nothing
here is numerical: every routine returns exact results.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = tuple[tuple[Fraction, ...], ...]


def mat(rows: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    bt = list(zip(*b))
    return tuple(
        tuple(sum((a[i][t] * bt[j][t] for t in range(k)), Fraction(0)) for j in range(m))
        for i in range(n)
    )


def mat_vec(a: Matrix, v: Sequence[Fraction]) -> tuple[Fraction, ...]:
    return tuple(sum((row[j] * v[j] for j in range(len(v))), Fraction(0)) for row in a)


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a)) if a else ()


def det(a: Matrix) -> Fraction:
    """Determinant by fraction-free-ish Gaussian elimination."""
    n = len(a)
    m = [list(row) for row in a]
    sign = 1
    result = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            sign = -sign
        p = m[col][col]
        result *= p
        for r in range(col + 1, n):
            if m[r][col] != 0:
                f = m[r][col] / p
                for c in range(col, n):
                    m[r][c] -= f * m[col][c]
    return result * sign


def mat_inv(a: Matrix) -> Matrix:
    n = len(a)
    m = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            raise ValueError("matrix is singular")
        m[col], m[pivot] = m[pivot], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return tuple(tuple(row[n:]) for row in m)


def solve(a: Matrix, b: Sequence[Fraction]) -> tuple[Fraction, ...] | None:
    """One solution of a x = b, or None if inconsistent.

    Free variables are set to zero.
    """
    n, m = len(a), len(a[0]) if a else 0
    rows = [list(a[i]) + [Fraction(b[i])] for i in range(n)]
    pivots: list[tuple[int, int]] = []
    r = 0
    for c in range(m):
        pivot = next((i for i in range(r, n) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        p = rows[r][c]
        rows[r] = [x / p for x in rows[r]]
        for i in range(n):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append((r, c))
        r += 1
        if r == n:
            break
    for i in range(r, n):
        if rows[i][m] != 0:
            return None
    x = [Fraction(0)] * m
    for i, c in pivots:
        x[c] = rows[i][m]
    return tuple(x)


def rank(a: Matrix) -> int:
    n, m = len(a), len(a[0]) if a else 0
    rows = [list(r) for r in a]
    rk = 0
    for c in range(m):
        pivot = next((i for i in range(rk, n) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[rk], rows[pivot] = rows[pivot], rows[rk]
        p = rows[rk][c]
        for i in range(rk + 1, n):
            if rows[i][c] != 0:
                f = rows[i][c] / p
                for j in range(c, m):
                    rows[i][j] -= f * rows[rk][j]
        rk += 1
    return rk


def nullspace(a: Matrix) -> list[tuple[Fraction, ...]]:
    """Basis of the rational kernel of a."""
    n, m = len(a), len(a[0]) if a else 0
    rows = [list(r) for r in a]
    pivots: list[int] = []
    r = 0
    for c in range(m):
        pivot = next((i for i in range(r, n) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        p = rows[r][c]
        rows[r] = [x / p for x in rows[r]]
        for i in range(n):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    basis = []
    free = [c for c in range(m) if c not in pivots]
    for fc in free:
        v = [Fraction(0)] * m
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][fc]
        basis.append(tuple(v))
    return basis


def integer_kernel_basis(a: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Basis of the integer kernel {v in Z^m : a v = 0} (saturated)."""
    basis = nullspace(mat(a))
    out = []
    for v in basis:
        den = 1
        for x in v:
            den = den * x.denominator // _gcd(den, x.denominator)
        w = [int(x * den) for x in v]
        g = 0
        for x in w:
            g = _gcd(g, abs(x))
        if g > 1:
            w = [x // g for x in w]
        out.append(tuple(w))
    return out


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a if a else 1


def is_integral_matrix(a: Matrix) -> bool:
    return all(x.denominator == 1 for row in a for x in row)


def smith_normal_form(a: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Return (U, D, V) with U a V = D diagonal, U and V unimodular, d1 | d2 | ..."""
    m = [list(map(int, row)) for row in a]
    nr = len(m)
    nc = len(m[0]) if m else 0
    u = [[int(i == j) for j in range(nr)] for i in range(nr)]
    v = [[int(i == j) for j in range(nc)] for i in range(nc)]

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in m:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, c):
        m[dst] = [x + c * y for x, y in zip(m[dst], m[src])]
        u[dst] = [x + c * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, c):
        for row in m:
            row[dst] += c * row[src]
        for row in v:
            row[dst] += c * row[src]

    def clear_position(t: int) -> None:
        """Diagonalize the block corner at (t, t)."""
        while True:
            pivot = None
            for i in range(t, nr):
                for j in range(t, nc):
                    if m[i][j] != 0 and (pivot is None or abs(m[i][j]) < abs(m[pivot[0]][pivot[1]])):
                        pivot = (i, j)
            if pivot is None:
                return
            swap_rows(t, pivot[0])
            swap_cols(t, pivot[1])
            reduced = True
            for i in range(t + 1, nr):
                if m[i][t]:
                    add_row(t, i, -(m[i][t] // m[t][t]))
                    if m[i][t]:
                        reduced = False
            for j in range(t + 1, nc):
                if m[t][j]:
                    add_col(t, j, -(m[t][j] // m[t][t]))
                    if m[t][j]:
                        reduced = False
            if reduced and all(m[i][t] == 0 for i in range(t + 1, nr)) and all(
                m[t][j] == 0 for j in range(t + 1, nc)
            ):
                return

    t = 0
    while t < min(nr, nc):
        clear_position(t)
        if m[t][t] == 0:
            break
        t += 1

    # Enforce the divisibility chain d1 | d2 | ... by folding offenders back in.
    k = min(nr, nc)
    again = True
    while again:
        again = False
        for i in range(k - 1):
            if m[i][i] and m[i + 1][i + 1] and m[i + 1][i + 1] % m[i][i] != 0:
                add_col(i + 1, i, 1)
                clear_position(i)
                for j in range(i + 1, min(nr, nc)):
                    clear_position(j)
                again = True
                break
    for i in range(k):
        if m[i][i] < 0:
            m[i] = [-x for x in m[i]]
            u[i] = [-x for x in u[i]]
    return u, m, v
