"""Euclidean Z-lattices given by rational Gram matrices.

A :class:`ZLattice` is a basis (rows of rational coordinates) inside a fixed
ambient space with its own Gram matrix.  Keeping the ambient coordinates
around lets sums, intersections and equality of lattices be computed with
HNF.  An optional ``scale`` multiplies the ambient inner product; it is how
irrational homotheties such as ``x -> x / sqrt(d)`` stay exact.

Discriminant forms are handled by :class:`QeModule`, a finite abelian group
presented by invariant factors together with a Q/Z-valued quadratic form.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from . import linalg as la
from .errors import NotEven, NotIsotropic, RankUnsupported
from sympy import factorint

# ---------------------------------------------------------------------------
# Reduction and enumeration on bare Gram matrices


def _gram_fractions(gram) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in gram]


def cholesky_q(gram) -> list[list[Fraction]] | None:
    """Rational Cholesky in Fincke-Pohst form.

    Returns ``q`` with ``x G x^T = sum_i q[i][i] (x_i + sum_{j>i} q[i][j] x_j)^2``
    or ``None`` when ``gram`` is not positive definite.
    """
    n = len(gram)
    q = _gram_fractions(gram)
    for i in range(n):
        if q[i][i] <= 0:
            return None
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] -= q[k][i] * q[i][l]
    return q


def is_positive_definite(gram) -> bool:
    return la.is_symmetric(gram) and cholesky_q(gram) is not None


def lll(gram, delta: Fraction = Fraction(99, 100)):
    """Exact LLL reduction of a positive definite Gram matrix.

    Returns ``(reduced, t)`` with ``t`` unimodular and
    ``t * gram * t^T == reduced``.
    """
    g = _gram_fractions(gram)
    n = len(g)
    t = la.identity(n)

    def gso():
        mu = [[Fraction(0)] * n for _ in range(n)]
        bb = [Fraction(0)] * n
        for i in range(n):
            for j in range(i):
                s = g[i][j] - sum(mu[j][k] * mu[i][k] * bb[k] for k in range(j))
                mu[i][j] = s / bb[j]
            bb[i] = g[i][i] - sum(mu[i][k] ** 2 * bb[k] for k in range(i))
        return mu, bb

    def sub(k, j, q):  # b_k -= q b_j
        t[k] = [x - q * y for x, y in zip(t[k], t[j])]
        g[k] = [x - q * y for x, y in zip(g[k], g[j])]
        for row in g:
            row[k] -= q * row[j]

    def swap(k):
        t[k], t[k - 1] = t[k - 1], t[k]
        g[k], g[k - 1] = g[k - 1], g[k]
        for row in g:
            row[k], row[k - 1] = row[k - 1], row[k]

    k = 1
    mu, bb = gso()
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                sub(k, j, q)
                mu, bb = gso()
        if bb[k] >= (delta - mu[k][k - 1] ** 2) * bb[k - 1]:
            k += 1
        else:
            swap(k)
            mu, bb = gso()
            k = max(k - 1, 1)
    return g, t


def _fincke_pohst(gram, bound) -> list[tuple[Fraction, tuple[int, ...]]]:
    n = len(gram)
    q = cholesky_q(gram)
    if q is None:
        raise ValueError("Gram matrix is not positive definite")
    bound = Fraction(bound)
    out: list[tuple[Fraction, tuple[int, ...]]] = []
    x = [0] * n

    def rec(i: int, rem: Fraction) -> None:
        c = sum((q[i][j] * x[j] for j in range(i + 1, n) if x[j]), Fraction(0))
        qi = q[i][i]
        s = math.sqrt(float(rem / qi))
        cf = float(c)
        lo = math.floor(-cf - s) - 1
        hi = math.ceil(-cf + s) + 1
        for xi in range(lo, hi + 1):
            u = xi + c
            val = qi * u * u
            if val <= rem:
                x[i] = xi
                if i == 0:
                    if any(x):
                        out.append((bound - rem + val, tuple(x)))
                else:
                    rec(i - 1, rem - val)
        x[i] = 0

    if n:
        rec(n - 1, bound)
    return out


def fincke_pohst(gram, bound) -> list[tuple[int, ...]]:
    """All nonzero integer ``x`` with ``x G x^T <= bound``, exact and complete."""
    return [v for _, v in _fincke_pohst(gram, bound)]


def qform(gram, x) -> Fraction:
    """``x G x^T`` computed over the integers after clearing denominators."""
    den = la.common_denominator(gram)
    n = len(x)
    tot = 0
    for i in range(n):
        if x[i]:
            row = gram[i]
            tot += x[i] * sum(int(row[j] * den) * x[j] for j in range(n) if x[j])
    return Fraction(tot, den)


def short_vectors_gram(gram, bound, reduce: bool = True, with_norms: bool = False):
    """Nonzero vectors of norm ``<= bound`` in coordinates of the given basis.

    With ``reduce`` the basis is LLL-reduced first (a pre-conditioner only;
    the enumeration itself is exact either way).  Output is sorted by norm
    then lexicographically; ``with_norms`` yields ``(norm, vector)`` pairs.
    """
    gram = _gram_fractions(gram)
    if reduce and len(gram) > 1:
        red, t = lll(gram)
        pairs = [(nv, tuple(la.vecmat(y, t))) for nv, y in _fincke_pohst(red, bound)]
    else:
        pairs = _fincke_pohst(gram, bound)
    pairs.sort()
    return pairs if with_norms else [v for _, v in pairs]


# ---------------------------------------------------------------------------
# Lattices


class ZLattice:
    """A positive definite Z-lattice.

    ``basis`` rows are coordinates in an ambient space whose inner product
    has Gram matrix ``ambient`` multiplied by ``scale``.  The lattice Gram
    matrix is ``scale * basis * ambient * basis^T``.
    """

    __slots__ = ("gram", "basis", "ambient", "scale", "_den", "_igram")

    def __init__(self, gram=None, basis=None, ambient=None, scale=1):
        if gram is None and basis is None:
            raise ValueError("need a Gram matrix or a basis")
        self.scale = Fraction(scale)
        if basis is None:
            if ambient is not None:
                raise ValueError("ambient given without basis")
            gram = _gram_fractions(gram)
            n = len(gram)
            self.basis = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
            self.ambient = [[x / self.scale for x in row] for row in gram]
        else:
            self.basis = la.to_fractions(basis)
            if ambient is None:
                raise ValueError("basis given without ambient Gram")
            self.ambient = _gram_fractions(ambient)
        computed = la.scale(
            la.matmul(la.matmul(self.basis, self.ambient), la.transpose(self.basis)),
            self.scale,
        )
        if gram is not None and _gram_fractions(gram) != computed:
            raise ValueError("Gram matrix inconsistent with basis")
        self.gram = computed
        if not la.is_symmetric(self.gram):
            raise ValueError("Gram matrix is not symmetric")
        if cholesky_q(self.gram) is None:
            raise ValueError("Gram matrix is not positive definite")

    # -- basic invariants --------------------------------------------------
    @property
    def rank(self) -> int:
        return len(self.gram)

    def det(self) -> Fraction:
        return la.det(self.gram)

    def is_integral(self) -> bool:
        return la.is_integral(self.gram)

    def is_even(self) -> bool:
        return self.is_integral() and all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    def is_unimodular(self) -> bool:
        return self.is_integral() and abs(self.det()) == 1

    def norm(self, x: Sequence) -> Fraction:
        if not hasattr(self, "_igram"):
            self._den = la.common_denominator(self.gram)
            self._igram = [[int(v * self._den) for v in row] for row in self.gram]
        n = len(x)
        tot = 0
        for i in range(n):
            if x[i]:
                row = self._igram[i]
                tot += x[i] * sum(row[j] * x[j] for j in range(n) if x[j])
        return Fraction(tot, self._den)

    def inner(self, x: Sequence, y: Sequence) -> Fraction:
        return sum(
            (self.gram[i][j] * x[i] * y[j] for i in range(self.rank) for j in range(self.rank)),
            Fraction(0),
        )

    def ambient_coords(self, x: Sequence) -> list[Fraction]:
        return la.vecmat(x, self.basis)

    def coords_of(self, v: Sequence) -> list[Fraction]:
        """Lattice coordinates of an ambient vector (full rank only)."""
        return la.solve_left(self.basis, v)

    def contains(self, v: Sequence) -> bool:
        return la.lattice_contains(self.basis, v)

    # -- constructions -----------------------------------------------------
    def with_basis(self, rows: Sequence[Sequence]) -> "ZLattice":
        """The lattice spanned by ``rows`` (given in this lattice's coordinates)."""
        return ZLattice(basis=la.matmul(la.to_fractions(rows), self.basis),
                        ambient=self.ambient, scale=self.scale)

    def from_ambient(self, rows: Sequence[Sequence]) -> "ZLattice":
        return ZLattice(basis=la.lattice_basis(rows), ambient=self.ambient, scale=self.scale)

    def rescaled(self, c) -> "ZLattice":
        """The lattice ``sqrt(c) L`` with the same coordinates."""
        return ZLattice(basis=self.basis, ambient=self.ambient, scale=self.scale * Fraction(c))

    def normalized(self) -> "ZLattice":
        """Fold the scale into the coordinates when it is a rational square."""
        s = self.scale
        rn, rd = math.isqrt(s.numerator), math.isqrt(s.denominator)
        if rn * rn != s.numerator or rd * rd != s.denominator:
            return self
        r = Fraction(rn, rd)
        return ZLattice(basis=la.scale(self.basis, r), ambient=self.ambient, scale=1)

    def canonical_basis(self) -> list[list[Fraction]]:
        return la.lattice_basis(self.basis)

    def same_as(self, other: "ZLattice") -> bool:
        """Equality as subsets of the same ambient space."""
        a, b = self.normalized(), other.normalized()
        return (a.ambient == b.ambient and a.scale == b.scale
                and a.canonical_basis() == b.canonical_basis())

    def reduced(self) -> "ZLattice":
        _, t = lll(self.gram)
        return self.with_basis(t)

    # -- enumeration -------------------------------------------------------
    def __repr__(self) -> str:
        return f"ZLattice(rank={self.rank}, det={self.det()})"


def dual(lat: ZLattice) -> ZLattice:
    """The dual lattice, expressed in the same ambient coordinates."""
    ginv = la.inverse(lat.gram)
    return ZLattice(basis=la.matmul(ginv, lat.basis), ambient=lat.ambient, scale=lat.scale)


def shortest_vectors(lat: ZLattice, bound) -> tuple[Fraction | None, list[tuple[int, ...]]]:
    """Minimum and the complete list of nonzero vectors with ``x.x <= bound``.

    The minimum is that of the whole lattice when some vector lies under the
    bound, otherwise ``None``.
    """
    pairs = short_vectors_gram(lat.gram, bound, with_norms=True)
    if not pairs:
        return None, []
    return pairs[0][0], [v for _, v in pairs]


def minimum(lat: ZLattice) -> Fraction:
    red, _ = lll(lat.gram)
    bound = min(red[i][i] for i in range(len(red)))
    m, _ = shortest_vectors(lat, bound)
    return m


def roots(lat: ZLattice) -> list[tuple[int, ...]]:
    """Vectors of norm exactly 2."""
    return [v for n, v in short_vectors_gram(lat.gram, 2, with_norms=True) if n == 2]


def theta_counts(lat: ZLattice, bound) -> dict[Fraction, int]:
    counts: dict[Fraction, int] = {}
    for n, _ in short_vectors_gram(lat.gram, bound, with_norms=True):
        counts[n] = counts.get(n, 0) + 1
    return counts


# ---------------------------------------------------------------------------
# Finite quadratic modules


def _mod1(x) -> Fraction:
    x = Fraction(x)
    return x - math.floor(x)


@dataclass
class QeModule:
    """Finite abelian group ``prod Z/d_i`` with a quadratic form into Q/Z.

    Elements are tuples of residues modulo the invariant factors.  The form
    is pinned down by its values on generators and the bilinear matrix.
    ``generator_lift`` optionally records lattice coordinates of generator
    lifts when the module is the residue of a lattice.
    """

    invariant_factors: tuple[int, ...]
    q_values: tuple[Fraction, ...]
    bilinear: tuple[tuple[Fraction, ...], ...]
    generator_lift: list[list[Fraction]] | None = None
    _reduce_data: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        self.invariant_factors = tuple(int(d) for d in self.invariant_factors)
        self.q_values = tuple(_mod1(x) for x in self.q_values)
        self.bilinear = tuple(tuple(_mod1(x) for x in row) for row in self.bilinear)

    @property
    def order(self) -> int:
        return math.prod(self.invariant_factors)

    def elements(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(range(d) for d in self.invariant_factors))

    def q(self, x: Sequence[int]) -> Fraction:
        n = len(self.invariant_factors)
        s = Fraction(0)
        for i in range(n):
            if x[i]:
                s += x[i] * x[i] * self.q_values[i]
                for j in range(i + 1, n):
                    if x[j]:
                        s += x[i] * x[j] * self.bilinear[i][j]
        return _mod1(s)

    def b(self, x: Sequence[int], y: Sequence[int]) -> Fraction:
        n = len(self.invariant_factors)
        return _mod1(sum((x[i] * y[j] * self.bilinear[i][j]
                          for i in range(n) for j in range(n)), Fraction(0)))

    def add(self, x, y) -> tuple[int, ...]:
        return tuple((a + b) % d for a, b, d in zip(x, y, self.invariant_factors))

    def mul(self, m: int, x) -> tuple[int, ...]:
        return tuple((m * a) % d for a, d in zip(x, self.invariant_factors))

    @property
    def zero(self) -> tuple[int, ...]:
        return tuple(0 for _ in self.invariant_factors)

    def element_order(self, x) -> int:
        o = 1
        for a, d in zip(x, self.invariant_factors):
            o = math.lcm(o, d // math.gcd(a, d))
        return o

    # -- structure ---------------------------------------------------------
    def primary_part(self, p: int) -> "QeModule":
        """The p-primary component, with its own cyclic generators."""
        facs, mults = [], []
        for i, d in enumerate(self.invariant_factors):
            e = 0
            while d % p == 0:
                d //= p
                e += 1
            if e:
                facs.append(p ** e)
                mults.append((i, self.invariant_factors[i] // p ** e))
        qv = [m * m * self.q_values[i] for i, m in mults]
        bl = [[mi * mj * self.bilinear[i][j] for j, mj in mults] for i, mi in mults]
        lift = None
        if self.generator_lift is not None:
            lift = [[m * x for x in self.generator_lift[i]] for i, m in mults]
        return QeModule(tuple(facs), tuple(qv), tuple(tuple(r) for r in bl), lift)

    def primes(self) -> list[int]:
        return sorted(factorint(self.order)) if self.order > 1 else []

    def primary_embedding(self, p: int, x: Sequence[int]) -> tuple[int, ...]:
        """Image in this module of an element of ``primary_part(p)``."""
        out = [0] * len(self.invariant_factors)
        k = 0
        for i, d in enumerate(self.invariant_factors):
            e = 0
            dd = d
            while dd % p == 0:
                dd //= p
                e += 1
            if e:
                out[i] = (x[k] * (d // p ** e)) % d
                k += 1
        return tuple(out)

    def is_nondegenerate(self) -> bool:
        for x in self.elements():
            if any(x) and all(self.b(x, e) == 0 for e in self._unit_vectors()):
                return False
        return True

    def _unit_vectors(self):
        n = len(self.invariant_factors)
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]

    def lift(self, x: Sequence[int]) -> list[Fraction]:
        if self.generator_lift is None:
            raise ValueError("module carries no lattice lift")
        n = len(self.generator_lift[0]) if self.generator_lift else 0
        out = [Fraction(0)] * n
        for c, g in zip(x, self.generator_lift):
            if c:
                out = [a + c * b for a, b in zip(out, g)]
        return out

    def reduce(self, y: Sequence) -> tuple[int, ...]:
        """Residue class of a dual-lattice vector given in lattice coordinates."""
        if self._reduce_data is None:
            raise ValueError("module carries no reduction map")
        gram, v, idx = self._reduce_data
        w = la.vecmat(la.vecmat(y, gram), v)
        out = []
        for i, d in zip(idx, self.invariant_factors):
            c = Fraction(w[i])
            if c.denominator != 1:
                raise ValueError("vector is not in the dual lattice")
            out.append(c.numerator % d)
        return tuple(out)

    def span(self, gens: Iterable[Sequence[int]]) -> set[tuple[int, ...]]:
        gens = [tuple(g) for g in gens]
        seen = {self.zero}
        frontier = [self.zero]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.add(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return seen


def residue(lat: ZLattice) -> QeModule:
    """The discriminant module ``L^# / L`` with ``q(x) = x.x / 2 mod 1``."""
    if not lat.is_even():
        raise NotEven("residue needs an even lattice")
    g = la.to_int(lat.gram)
    d, _, v = snf(g)
    vinv = la.inverse(v)
    ginv = la.inverse(g)
    idx = [i for i, di in enumerate(d) if di != 1]
    facs = tuple(d[i] for i in idx)
    lifts = [la.vecmat(vinv[i], ginv) for i in idx]
    gf = lat.gram
    qv = tuple(qform(gf, y) / 2 for y in lifts)
    bl = tuple(tuple(lat.inner(a, b) for b in lifts) for a in lifts)
    return QeModule(facs, qv, bl, lifts, (gf, v, idx))


def snf(m):
    return la.snf(m)


def is_anisotropic(v: QeModule) -> bool:
    """True iff ``q`` vanishes only at 0, checked prime by prime."""
    for p in v.primes():
        part = v.primary_part(p)
        for x in part.elements():
            if any(x) and part.q(x) == 0:
                return False
    return True


def gauss_sum(v: QeModule) -> complex:
    """``|V|^(-1/2) * sum exp(2 pi i q(x))`` by direct summation."""
    total = 0j
    for x in v.elements():
        total += cmath.exp(2j * math.pi * float(v.q(x)))
    return total / math.sqrt(v.order)


@dataclass
class SubgroupSpec:
    """A subgroup of a :class:`QeModule` given by generators."""

    generators: list[tuple[int, ...]]

    def elements(self, module: QeModule) -> set[tuple[int, ...]]:
        return module.span(self.generators)


def is_isotropic(module: QeModule, sub: SubgroupSpec) -> bool:
    return all(module.q(x) == 0 for x in sub.elements(module))


def glue(lat: ZLattice, sub: SubgroupSpec, module: QeModule | None = None) -> ZLattice:
    """The even overlattice ``pr^{-1}(I)`` attached to an isotropic subgroup."""
    if module is None:
        module = residue(lat)
    elems = sub.elements(module)
    if any(module.q(x) != 0 for x in elems):
        raise NotIsotropic("glue subgroup is not isotropic")
    rows = [[Fraction(int(i == j)) for j in range(lat.rank)] for i in range(lat.rank)]
    rows += [module.lift(g) for g in sub.generators]
    coords = la.lattice_basis(rows)
    out = lat.with_basis(coords)
    if out.det() * len(elems) ** 2 != lat.det():
        raise NotIsotropic("glued lattice has unexpected determinant")
    return out


# ---------------------------------------------------------------------------
# Isometry testing in small rank


def is_isometric(l1: ZLattice, l2: ZLattice, max_rank: int = 4):
    """An integer matrix ``x`` with ``x G2 x^T == G1``, or ``None``.

    Backtracking over images of an LLL-reduced basis of ``l1``; candidate
    images are short vectors of ``l2`` ordered by norm then lexicographically.
    """
    n = l1.rank
    if n != l2.rank or n > max_rank:
        raise RankUnsupported(f"isometry search supports equal rank <= {max_rank}")
    if l1.det() != l2.det():
        return None
    g1, t1 = lll(l1.gram)
    g2 = l2.gram
    bound = max(g1[i][i] for i in range(n))
    by_norm: dict[Fraction, list[tuple[int, ...]]] = {}
    for nv, v in short_vectors_gram(g2, bound, with_norms=True):
        by_norm.setdefault(nv, []).append(v)
    pools = [by_norm.get(g1[i][i], []) for i in range(n)]
    if any(not p for p in pools):
        return None

    def ip(a, b):
        return sum(g2[i][j] * a[i] * b[j] for i in range(n) for j in range(n))

    chosen: list[tuple[int, ...]] = []

    def rec(i: int):
        if i == n:
            return True
        for v in pools[i]:
            if all(ip(chosen[j], v) == g1[j][i] for j in range(i)):
                chosen.append(v)
                if rec(i + 1):
                    return True
                chosen.pop()
        return False

    if not rec(0):
        return None
    x = la.matmul(la.inverse(t1), chosen)
    return la.to_int(x)
