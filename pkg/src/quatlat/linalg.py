"""Exact integer and rational linear algebra.

Matrices are plain lists of rows.  Integer matrices hold Python ints,
rational ones hold :class:`fractions.Fraction`.  Nothing here uses floating
point; every routine returns exact results.

HNF convention: row style, upper echelon.  Pivots are positive and the
entries above each pivot lie in ``[0, pivot)``.  With that convention two
integer row bases span the same lattice iff their HNFs agree.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

Matrix = list  # list of rows


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(r: int, c: int) -> list[list[int]]:
    return [[0] * c for _ in range(r)]


def copy(m: Sequence[Sequence]) -> list[list]:
    return [list(row) for row in m]


def transpose(m: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*m)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def vecmat(v: Sequence, m: Sequence[Sequence]) -> list:
    return [sum(x * y for x, y in zip(v, col)) for col in zip(*m)]


def dot(u: Sequence, v: Sequence):
    return sum(x * y for x, y in zip(u, v))


def scale(m: Sequence[Sequence], c) -> list[list]:
    return [[c * x for x in row] for row in m]


def to_fractions(m: Sequence[Sequence]) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in m]


def is_integral(m: Sequence[Sequence]) -> bool:
    return all(Fraction(x).denominator == 1 for row in m for x in row)


def to_int(m: Sequence[Sequence]) -> list[list[int]]:
    out = []
    for row in m:
        r = []
        for x in row:
            x = Fraction(x)
            if x.denominator != 1:
                raise ValueError(f"non-integral entry {x}")
            r.append(x.numerator)
        out.append(r)
    return out


def common_denominator(m: Sequence[Sequence]) -> int:
    den = 1
    for row in m:
        for x in row:
            den = lcm(den, Fraction(x).denominator)
    return den


def is_symmetric(m: Sequence[Sequence]) -> bool:
    n = len(m)
    return all(len(row) == n for row in m) and all(
        m[i][j] == m[j][i] for i in range(n) for j in range(i + 1, n)
    )


# ---------------------------------------------------------------------------
# Hermite normal form


def hnf(m: Sequence[Sequence[int]], transform: bool = True):
    """Row Hermite normal form.

    Returns ``(h, u)`` with ``u`` unimodular and ``u * m == h``.  ``h`` keeps
    the shape of ``m``; zero rows collect at the bottom.  With
    ``transform=False`` the second item is ``None``.
    """
    a = [[int(x) for x in row] for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    u = identity(rows) if transform else None
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        while True:
            nz = [i for i in range(r, rows) if a[i][c]]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(a[i][c]))
            if piv != r:
                a[piv], a[r] = a[r], a[piv]
                if u is not None:
                    u[piv], u[r] = u[r], u[piv]
            p = a[r][c]
            clean = True
            for i in range(r + 1, rows):
                x = a[i][c]
                if x:
                    q = x // p
                    if q:
                        ai, ar = a[i], a[r]
                        for k in range(c, cols):
                            ai[k] -= q * ar[k]
                        if u is not None:
                            ui, ur = u[i], u[r]
                            for k in range(rows):
                                ui[k] -= q * ur[k]
                    if a[i][c]:
                        clean = False
            if clean:
                break
        if a[r][c] == 0:
            continue
        if a[r][c] < 0:
            a[r] = [-x for x in a[r]]
            if u is not None:
                u[r] = [-x for x in u[r]]
        p = a[r][c]
        for i in range(r):
            q = a[i][c] // p
            if q:
                ai, ar = a[i], a[r]
                for k in range(c, cols):
                    ai[k] -= q * ar[k]
                if u is not None:
                    ui, ur = u[i], u[r]
                    for k in range(rows):
                        ui[k] -= q * ur[k]
        r += 1
    return a, u


def hnf_basis(m: Sequence[Sequence[int]]) -> list[list[int]]:
    """Nonzero rows of the HNF: a canonical basis of the row lattice."""
    h, _ = hnf(m, transform=False)
    return [row for row in h if any(row)]


# ---------------------------------------------------------------------------
# Smith normal form


def snf(m: Sequence[Sequence[int]]):
    """Smith normal form.

    Returns ``(d, u, v)`` with ``u * m * v`` diagonal, diagonal ``d`` made of
    non-negative integers with ``d[i] | d[i+1]``, and ``u``, ``v`` unimodular.
    """
    a = [[int(x) for x in row] for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    u = identity(rows)
    v = identity(cols)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row dst -= q * row src
        a[dst] = [x - q * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x - q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):  # col dst -= q * col src
        for row in a:
            row[dst] -= q * row[src]
        for row in v:
            row[dst] -= q * row[src]

    for t in range(min(rows, cols)):
        while True:
            entries = [
                (abs(a[i][j]), i, j)
                for i in range(t, rows)
                for j in range(t, cols)
                if a[i][j]
            ]
            if not entries:
                break
            _, i, j = min(entries)
            swap_rows(t, i)
            swap_cols(t, j)
            p = a[t][t]
            dirty = False
            for i in range(t + 1, rows):
                if a[i][t]:
                    add_row(i, t, a[i][t] // p)
                    if a[i][t]:
                        dirty = True
            for j in range(t + 1, cols):
                if a[t][j]:
                    add_col(j, t, a[t][j] // p)
                    if a[t][j]:
                        dirty = True
            if dirty:
                continue
            bad = next(
                (
                    i
                    for i in range(t + 1, rows)
                    for j in range(t + 1, cols)
                    if a[i][j] % p
                ),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, -1)
        if rows and cols and t < rows and t < cols and a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
    d = [a[i][i] for i in range(min(rows, cols))]
    return d, u, v


# ---------------------------------------------------------------------------
# Determinants and inverses


def det(m: Sequence[Sequence]) -> Fraction:
    """Exact determinant of a square matrix with int or Fraction entries."""
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("determinant of a non-square matrix")
    if all(isinstance(x, int) for row in m for x in row):
        return Fraction(_bareiss(m))
    a = to_fractions(m)
    result = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c]), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[piv], a[c] = a[c], a[piv]
            result = -result
        p = a[c][c]
        result *= p
        for r in range(c + 1, n):
            f = a[r][c] / p
            if f:
                ar, ac = a[r], a[c]
                for k in range(c, n):
                    ar[k] -= f * ac[k]
    return result


def _bareiss(m: Sequence[Sequence[int]]) -> int:
    a = [list(row) for row in m]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            piv = next((r for r in range(k + 1, n) if a[r][k]), None)
            if piv is None:
                return 0
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        akk = a[k][k]
        for i in range(k + 1, n):
            ai, ak = a[i], a[k]
            aik = ai[k]
            for j in range(k + 1, n):
                ai[j] = (ai[j] * akk - aik * ak[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def det_sym(g: Sequence[Sequence]) -> Fraction:
    """Determinant of a symmetric (Gram) matrix."""
    if not is_symmetric(g):
        raise ValueError("matrix is not symmetric")
    return det(g)


def inverse(m: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c]), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[c], a[piv] = a[piv], a[c]
        p = a[c][c]
        a[c] = [x / p for x in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]


def solve_left(b: Sequence[Sequence], v: Sequence):
    """Coordinates ``x`` with ``x * b == v`` for a square invertible ``b``."""
    return vecmat(v, inverse(b))


def rank(m: Sequence[Sequence]) -> int:
    a = to_fractions(m)
    rows = len(a)
    cols = len(a[0]) if rows else 0
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, rows):
            if a[i][c]:
                f = a[i][c] / a[r][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
    return r


# ---------------------------------------------------------------------------
# Kernels


def kernel_mod(m: Sequence[Sequence[int]], n: int) -> list[list[int]]:
    """HNF basis of ``{x in Z^r : x * m == 0 (mod n)}``; rows of ``m`` index x."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    big = [list(map(int, m[i])) + identity(rows)[i] for i in range(rows)]
    big += [[n * int(i == j) for j in range(cols)] + [0] * rows for i in range(cols)]
    h = hnf_basis(big)
    ker = [row[cols:] for row in h if not any(row[:cols])]
    return hnf_basis(ker)


def integer_kernel(m: Sequence[Sequence[int]]) -> list[list[int]]:
    """HNF basis of ``{x in Z^r : x * m == 0}``."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    big = [list(map(int, m[i])) + identity(rows)[i] for i in range(rows)]
    h, _ = hnf(big, transform=False)
    ker = [row[cols:] for row in h if not any(row[:cols]) and any(row[cols:])]
    return hnf_basis(ker) if ker else []


# ---------------------------------------------------------------------------
# Rational lattices given by row bases


def lattice_basis(rows: Sequence[Sequence]) -> list[list[Fraction]]:
    """Canonical (HNF) basis of the Z-span of rational row vectors."""
    den = common_denominator(rows)
    ints = [[int(Fraction(x) * den) for x in row] for row in rows]
    return [[Fraction(x, den) for x in row] for row in hnf_basis(ints)]


def lattice_sum(*bases: Sequence[Sequence]) -> list[list[Fraction]]:
    rows = [row for b in bases for row in b]
    return lattice_basis(rows)


def lattice_intersection(b1: Sequence[Sequence], b2: Sequence[Sequence]) -> list[list[Fraction]]:
    """Basis of the intersection of two rational lattices in the same space."""
    n = len(b1[0])
    den = lcm(common_denominator(b1), common_denominator(b2))
    r1 = [[int(Fraction(x) * den) for x in row] for row in b1]
    r2 = [[int(Fraction(x) * den) for x in row] for row in b2]
    big = [row + row for row in r1] + [row + [0] * n for row in r2]
    h, _ = hnf(big, transform=False)
    inter = [row[n:] for row in h if not any(row[:n]) and any(row[n:])]
    return [[Fraction(x, den) for x in row] for row in hnf_basis(inter)]


def lattice_contains(basis: Sequence[Sequence], v: Sequence) -> bool:
    """Membership of ``v`` in the full-rank lattice spanned by ``basis``."""
    return all(Fraction(x).denominator == 1 for x in solve_left(basis, v))


def lattice_index(sub: Sequence[Sequence], sup: Sequence[Sequence]) -> Fraction:
    """``[sup : sub]`` for full-rank square bases (a Fraction if not nested)."""
    return abs(det(sub) / det(sup))
