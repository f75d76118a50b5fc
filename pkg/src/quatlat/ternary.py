"""Ternary lattices attached to maximal orders.

``L(O)`` is the trace-zero part of a maximal order under ``tr(x̄y)``; the
transform ``M(L; d)`` exchanges the determinant ``2d^2`` genus with the
determinant ``2d`` genus.  Class enumeration works on reduced even Gram
matrices and removes duplicates by isometry testing.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from sympy import factorint, isprime, legendre_symbol

from . import linalg as la
from .errors import CheckFailed, EmbeddingNotFound, NotMaximal
from .lattice import (
    ZLattice,
    dual,
    gauss_sum,
    is_anisotropic,
    is_isometric,
    lll,
    minimum,
    residue,
    short_vectors_gram,
    theta_counts,
)
from .quat import (
    Order,
    QuatElement,
    QuaternionAlgebra,
    algebra_from_pair,
    different,
    enumerate_by_norm,
    is_maximal,
    maximalize,
    order_from_basis,
    order_generated_by,
    right_principal,
)

MILGRAM_RANK3 = cmath.exp(3j * math.pi / 4)


@dataclass
class TernaryLattice:
    """A rank-3 even lattice with a note on where it came from.

    ``embedding`` lists the basis as trace-zero quaternions when the lattice
    sits inside an order.
    """

    lattice: ZLattice
    provenance: str = "enumerated"
    embedding: list[QuatElement] | None = None

    @classmethod
    def from_gram(cls, gram, provenance: str = "enumerated") -> "TernaryLattice":
        return cls(ZLattice(gram=gram), provenance)

    @property
    def gram(self):
        return self.lattice.gram

    def det(self) -> Fraction:
        return self.lattice.det()

    def int_gram(self) -> list[list[int]]:
        return la.to_int(self.gram)

    def minimum(self) -> Fraction:
        return minimum(self.lattice)


@dataclass(frozen=True)
class GenusSymbol:
    p: int
    e_p: int
    e_p_prime: int


@dataclass(frozen=True)
class TableRow:
    d: int
    t: int
    t_dnp: int


def _legendre(x: Fraction, p: int) -> int:
    x = Fraction(x)
    return legendre_symbol((x.numerator * x.denominator) % p, p)


def is_admissible(d: int) -> bool:
    """Squarefree with an odd number of prime factors."""
    if d < 2:
        return False
    f = factorint(d)
    return all(e == 1 for e in f.values()) and len(f) % 2 == 1


def admissible_values(d_max: int) -> list[int]:
    return [d for d in range(2, d_max + 1) if is_admissible(d)]


# ---------------------------------------------------------------------------
# Lattices from orders and the M-transform


def trace_zero_lattice(o: Order) -> TernaryLattice:
    if not is_maximal(o):
        raise NotMaximal("trace-zero lattice is taken in maximal orders")
    col = [[int(b.trace())] for b in o.basis]
    ker = la.integer_kernel(col)
    rows = [la.vecmat(k, o.coords) for k in ker]
    lat = ZLattice(basis=rows, ambient=o.algebra.trace_form())
    d = o.algebra.discriminant
    if lat.det() != 2 * d * d:
        raise CheckFailed("trace-zero lattice has the wrong determinant", "det L(O) = 2d^2")
    emb = [o.algebra.elt(*r) for r in lat.basis]
    return TernaryLattice(lat, "from_order", emb)


def m_transform(tl: TernaryLattice, d: int) -> TernaryLattice:
    """``sqrt(d) * {x in d^-1 L cap L^# : d x.x even}``."""
    lat = tl.lattice
    if not lat.is_even():
        raise CheckFailed("M-transform needs an even lattice", "M(L; d)")
    inter = la.lattice_intersection(la.scale(lat.basis, Fraction(1, d)), dual(lat).basis)
    lam = lat.from_ambient(inter)
    parity = [[int(d * lam.gram[i][i]) % 2] for i in range(lam.rank)]
    even = la.kernel_mod(parity, 2)
    out = lam.with_basis(even).rescaled(d).normalized()
    emb = None
    if tl.embedding is not None and out.scale == 1:
        alg = tl.embedding[0].alg
        emb = [alg.elt(*r) for r in out.basis]
    return TernaryLattice(out, "transform", emb)


# ---------------------------------------------------------------------------
# Local invariants


def _diagonalize_at(gram, p: int) -> list[Fraction]:
    """Diagonal entries of a p-adic diagonalization (p odd), as rationals."""
    g = la.to_fractions(gram)
    out = []

    def val(x: Fraction) -> int:
        if x == 0:
            return 10 ** 9
        e, num, den = 0, x.numerator, x.denominator
        while num % p == 0:
            num //= p
            e += 1
        while den % p == 0:
            den //= p
            e -= 1
        return e

    while g:
        n = len(g)
        best = min(((val(g[i][j]), i, j) for i in range(n) for j in range(n)), default=None)
        v, i, j = best
        if i != j:
            if val(g[i][i]) > v and val(g[j][j]) > v:
                # e_i + e_j has value 2 g_ij + g_ii + g_jj of valuation v
                for k in range(n):
                    g[i][k] += g[j][k]
                for k in range(n):
                    g[k][i] += g[k][j]
            elif val(g[j][j]) == v:
                i = j
        if val(g[i][i]) != v:
            raise CheckFailed("p-adic pivot failed", "p-adic diagonalization")
        piv = g[i][i]
        out.append(piv)
        rest = [k for k in range(n) if k != i]
        g = [[g[r][c] - g[r][i] * g[i][c] / piv for c in rest] for r in rest]
    return out


def genus_symbols(tl: TernaryLattice, p: int) -> GenusSymbol:
    """``(e_p, e'_p)`` for a rank-3 lattice of determinant ``2d`` with ``p || d``."""
    diag = _diagonalize_at(tl.gram, p)
    units = [x for x in diag if x.numerator % p and x.denominator % p]
    other = [x for x in diag if not (x.numerator % p and x.denominator % p)]
    if len(units) != 2 or len(other) != 1:
        raise CheckFailed(f"unexpected p-adic Jordan type at p = {p}", "p-adic symbol")
    e = _legendre(units[0] * units[1], p)
    e2 = _legendre(other[0] / p, p)
    d2 = tl.det()
    if e * e2 != _legendre(d2 / p, p):
        raise CheckFailed("e_p e'_p differs from (2d/p | p)", "2d/p = e_p e'_p")
    return GenusSymbol(p, e, e2)


def _odd_primes(d: int) -> list[int]:
    return [p for p in sorted(factorint(d)) if p != 2]


def in_S_by_symbols(tl: TernaryLattice, d: int) -> bool:
    for p in _odd_primes(d):
        if genus_symbols(tl, p).e_p != -legendre_symbol(-1 % p, p):
            return False
    return True


def in_S_by_residue(tl: TernaryLattice, d: int) -> bool:
    res = residue(tl.lattice)
    for p in _odd_primes(d):
        part = res.primary_part(p)
        if part.invariant_factors != (p,):
            return False
        a = part.q_values[0] * p
        if a.denominator != 1 or a.numerator % p == 0:
            return False
        if _legendre(a, p) != -_legendre(Fraction(-d, p), p):
            return False
    return True


def in_S(tl: TernaryLattice, d: int) -> bool:
    if tl.det() != 2 * d or not tl.lattice.is_even():
        return False
    a, b = in_S_by_symbols(tl, d), in_S_by_residue(tl, d)
    if a != b:
        raise CheckFailed("genus tests disagree", "S(d) membership")
    return a


def in_R(tl: TernaryLattice, d: int) -> bool:
    if tl.det() != 2 * d * d or not tl.lattice.is_even():
        return False
    res = residue(tl.lattice)
    return all(is_anisotropic(res.primary_part(p)) for p in _odd_primes(d))


def gauss_factorization(tl: TernaryLattice) -> tuple[complex, complex]:
    """``gamma(res M)`` and the product of the gammas of its primary parts."""
    res = residue(tl.lattice)
    whole = gauss_sum(res)
    prod = 1 + 0j
    for p in res.primes():
        prod *= gauss_sum(res.primary_part(p))
    return whole, prod


# ---------------------------------------------------------------------------
# Class enumeration


def reduced_even_grams(det: int) -> list[list[list[int]]]:
    """Even positive ternary Grams of the given determinant in a reduced box.

    Every class has a member with ``a <= b <= c``, ``|2r| <= a``,
    ``|2s| <= a``, ``|2t| <= b``, ``r, s >= 0`` and ``abc <= 2 det``.
    """
    out = []
    a = 2
    while a ** 3 <= 2 * det:
        b = a
        while a * b * b <= 2 * det:
            for r in range(0, a // 2 + 1):
                m = a * b - r * r
                for s in range(0, a // 2 + 1):
                    for t in range(-(b // 2), b // 2 + 1):
                        num = det - 2 * r * s * t + a * t * t + b * s * s
                        if num % m:
                            continue
                        c = num // m
                        if c < b or c % 2 or a * b * c > 2 * det:
                            continue
                        out.append([[a, r, s], [r, b, t], [s, t, c]])
            b += 2
        a += 2
    return out


def _gram_key(g) -> tuple:
    return (g[0][0], g[1][1], g[2][2], g[0][1], g[0][2], g[1][2])


def classify(grams: Sequence) -> list[list[list[int]]]:
    """One Gram per isometry class, the smallest in key order."""
    reps: list[tuple[tuple, ZLattice, list]] = []
    for g in sorted(grams, key=_gram_key):
        lat = ZLattice(gram=g)
        inv = tuple(sorted(theta_counts(lat, 8).items()))
        if any(inv == i and is_isometric(lat, l2) is not None for i, l2, _ in reps):
            continue
        reps.append((inv, lat, g))
    return [g for _, _, g in reps]


@lru_cache(maxsize=None)
def _enumerate_S_cached(d: int) -> tuple:
    grams = [g for g in reduced_even_grams(2 * d)
             if in_S(TernaryLattice.from_gram(g), d)]
    return tuple(tuple(map(tuple, g)) for g in classify(grams))


def enumerate_S(d: int) -> list[TernaryLattice]:
    if not is_admissible(d):
        raise ValueError(f"{d} is not squarefree with an odd number of prime factors")
    return [TernaryLattice.from_gram([list(r) for r in g]) for g in _enumerate_S_cached(d)]


def enumerate_R(d: int) -> list[TernaryLattice]:
    if not is_admissible(d):
        raise ValueError(f"{d} is not squarefree with an odd number of prime factors")
    grams = [g for g in reduced_even_grams(2 * d * d)
             if in_R(TernaryLattice.from_gram(g), d)]
    return [TernaryLattice.from_gram(g) for g in classify(grams)]


def represents_one(tl: TernaryLattice) -> bool:
    return tl.minimum() == 2


def table_row(d: int) -> TableRow:
    classes = enumerate_S(d)
    dnp = sum(1 for c in classes if not represents_one(c))
    row = TableRow(d, len(classes), dnp)
    if not 0 <= row.t_dnp < row.t:
        raise CheckFailed(f"t_dnp >= t at d = {d}", "principal class exists")
    return row


def table(d_max: int, jobs: int = 1) -> list[TableRow]:
    ds = admissible_values(d_max)
    if jobs > 1 and len(ds) > 1:
        from multiprocessing import Pool

        with Pool(jobs) as pool:
            return pool.map(table_row, ds)
    return [table_row(d) for d in ds]


# ---------------------------------------------------------------------------
# Binary class numbers


def class_number(disc: int) -> int:
    """Reduced primitive positive definite binary forms of discriminant ``disc``."""
    if disc >= 0 or disc % 4 not in (0, 1):
        return 0
    n = 0
    a = 1
    while 3 * a * a <= -disc:
        for b in range(-a + 1, a + 1):
            num = b * b - disc
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if b < 0 and a == c:
                continue
            if math.gcd(math.gcd(a, abs(b)), c) != 1:
                continue
            n += 1
        a += 1
    return n


def deuring_check(p: int, row: TableRow | None = None) -> bool:
    """``t(p) - t_dnp(p) == (h(-p) + h(-4p)) / 2`` for an odd prime ``p``."""
    if p == 2 or not isprime(p):
        raise ValueError("Deuring check needs an odd prime")
    row = row or table_row(p)
    return 2 * (row.t - row.t_dnp) == class_number(-p) + class_number(-4 * p)


# ---------------------------------------------------------------------------
# Orders from ternary lattices


@lru_cache(maxsize=None)
def standard_algebra(d: int) -> QuaternionAlgebra:
    """A definite algebra of discriminant ``d`` with small ``|a| <= |b|``."""
    for s in itertools.count(2):
        for a in range(1, s // 2 + 1):
            b = s - a
            alg = algebra_from_pair(-a, -b)
            if alg.discriminant == d:
                return alg


@lru_cache(maxsize=None)
def standard_maximal_order(d: int) -> Order:
    alg = standard_algebra(d)
    return maximalize(order_from_basis(alg, [alg.one, alg.i, alg.j, alg.k]))


def _third_vector(gt, v1, v2, g13, g23, g33):
    """Integer vectors ``v3`` with the prescribed products, given ``v1, v2``."""
    def ip(x, y):
        return sum(gt[i][j] * x[i] * y[j] for i in range(3) for j in range(3))

    a11, a12, a22 = ip(v1, v1), ip(v1, v2), ip(v2, v2)
    det2 = a11 * a22 - a12 * a12
    if det2 == 0:
        return []
    alpha = (g13 * a22 - g23 * a12) / det2
    beta = (g23 * a11 - g13 * a12) / det2
    base = [alpha * x + beta * y for x, y in zip(v1, v2)]
    cols = la.transpose([la.vecmat(v1, gt), la.vecmat(v2, gt)])
    den = la.common_denominator(cols)
    w = la.integer_kernel([[int(x * den) for x in row] for row in cols])
    if len(w) != 1:
        return []
    w = w[0]
    rest = Fraction(g33) - ip(base, base)
    ww = ip(w, w)
    g2 = rest / ww
    if g2 < 0:
        return []
    rn, rd = math.isqrt(g2.numerator), math.isqrt(g2.denominator)
    if rn * rn != g2.numerator or rd * rd != g2.denominator:
        return []
    gamma = Fraction(rn, rd)
    out = []
    for sgn in ((1, -1) if gamma else (1,)):
        v3 = [x + sgn * gamma * y for x, y in zip(base, w)]
        if all(Fraction(x).denominator == 1 for x in v3):
            out.append([int(x) for x in v3])
    return out


def embed_ternary(tl: TernaryLattice, d: int, max_denominator: int = 24) -> list[QuatElement]:
    """Trace-zero quaternions with Gram matrix ``tl.gram``.

    Searched inside ``(1/N) L(O0)`` for ``N = 1, 2, ...`` where ``O0`` is the
    standard maximal order of discriminant ``d``.
    """
    red, tr = lll(tl.gram)
    g = la.to_int(red)
    o0 = standard_maximal_order(d)
    t0 = trace_zero_lattice(o0)
    for n in range(1, max_denominator + 1):
        gt = [[x / (n * n) for x in row] for row in t0.gram]
        cands = short_vectors_gram(gt, g[1][1], with_norms=True)
        v1s = [v for nv, v in cands if nv == g[0][0]]
        v2s = [v for nv, v in cands if nv == g[1][1]]
        seen = set()
        for v1 in v1s:
            if tuple(-x for x in v1) in seen:
                continue
            seen.add(tuple(v1))
            for v2 in v2s:
                if sum(gt[i][j] * v1[i] * v2[j] for i in range(3) for j in range(3)) != g[0][1]:
                    continue
                for v3 in _third_vector(gt, v1, v2, g[0][2], g[1][2], g[2][2]):
                    eps = [la.vecmat([Fraction(c, n) for c in v], t0.lattice.basis)
                           for v in (v1, v2, v3)]
                    back = la.matmul(la.inverse(tr), eps)
                    return [o0.algebra.elt(*r) for r in back]
    raise EmbeddingNotFound(f"no embedding with denominator <= {max_denominator}")


def order_from_ternary(tl: TernaryLattice, d: int, max_denominator: int = 24) -> Order:
    """A maximal order ``O`` with ``L(O)`` isometric to ``tl`` (in R(d))."""
    if not in_R(tl, d):
        raise CheckFailed("lattice is not in R(d)", "order from ternary lattice")
    eps = embed_ternary(tl, d, max_denominator)
    o1 = order_generated_by(eps[0].alg, eps)
    o = maximalize(o1)
    lo = trace_zero_lattice(o)
    if is_isometric(lo.lattice, tl.lattice) is None:
        raise CheckFailed("L(O) is not isometric to the input", "L(O) = L")
    return o


# ---------------------------------------------------------------------------
# Principal different criteria


@dataclass
class Theorem25Report:
    principal_different: bool
    element_of_norm_d: bool
    square_minus_d: bool
    special_vector: bool
    m_minimum_two: bool

    def values(self) -> list[bool]:
        return [self.principal_different, self.element_of_norm_d, self.square_minus_d,
                self.special_vector, self.m_minimum_two]

    @property
    def agree(self) -> bool:
        return len(set(self.values())) == 1


def theorem25_report(o: Order) -> Theorem25Report:
    """Five equivalent conditions for a principal different, all evaluated."""
    if not is_maximal(o):
        raise NotMaximal("criteria apply to maximal orders")
    d = o.algebra.discriminant
    m = different(o)
    norm_d = enumerate_by_norm(o, d)
    p1 = any(right_principal(o, x) == m for x in norm_d)
    p2 = bool(norm_d)
    p3 = any(x.trace() == 0 for x in norm_d)
    lo = trace_zero_lattice(o)
    g = lo.gram
    p4 = False
    for nv, v in short_vectors_gram(g, 2 * d, with_norms=True):
        if nv != 2 * d:
            continue
        prods = la.vecmat(v, g)
        if all(Fraction(x) % d == 0 for x in prods):
            p4 = True
            break
    mo = m_transform(lo, d)
    p5 = mo.minimum() == 2
    rep = Theorem25Report(p1, p2, p3, p4, p5)
    if not rep.agree:
        raise CheckFailed(f"criteria disagree: {rep.values()}", "principal different criteria")
    return rep
