"""Definite quaternion algebras over Q, their orders, ideals and differents.

Elements are written in the basis ``1, i, j, k = ij`` with ``i^2 = a``,
``j^2 = b``.  The Euclidean structure on every order is ``(x, y) -> tr(x̄y)``,
so the norm form is half the Gram quadratic form.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from sympy import factorint, jacobi_symbol

from . import linalg as la
from .errors import (
    CheckFailed,
    IndefiniteAlgebra,
    NoUnit,
    NotClosed,
    NotIntegral,
    NotMaximal,
    NotPrincipal,
)
from .lattice import ZLattice, short_vectors_gram

INFINITY = "infinity"

# ---------------------------------------------------------------------------
# Hilbert symbols


def _square_free_int(x: Fraction) -> int:
    """An integer in the same square class as the nonzero rational ``x``."""
    x = Fraction(x)
    return x.numerator * x.denominator


def _split(x: int, p: int) -> tuple[int, int]:
    e = 0
    while x % p == 0:
        x //= p
        e += 1
    return e, x


def hilbert_symbol(a, b, p) -> int:
    """Local Hilbert symbol ``(a, b)_p`` for nonzero rationals ``a``, ``b``.

    ``p`` is a prime or the string ``"infinity"``.
    """
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol needs nonzero arguments")
    if p == INFINITY or p == math.inf:
        return -1 if a < 0 and b < 0 else 1
    p = int(p)
    A, B = _square_free_int(a), _square_free_int(b)
    alpha, u = _split(A, p)
    beta, v = _split(B, p)
    if p == 2:
        def eps(z):
            return ((z - 1) // 2) % 2

        def omega(z):
            return ((z * z - 1) // 8) % 2

        e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u)
        return -1 if e % 2 else 1
    sign = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
    lu = jacobi_symbol(u % p, p)
    lv = jacobi_symbol(v % p, p)
    return sign * lu ** beta * lv ** alpha


# ---------------------------------------------------------------------------
# Algebras and elements


@dataclass(frozen=True)
class QuaternionAlgebra:
    """The definite algebra ``(a, b | Q)``."""

    a: Fraction
    b: Fraction
    ramified_primes: tuple[int, ...] = field(init=False, compare=False)
    discriminant: int = field(init=False, compare=False)

    def __post_init__(self):
        a, b = Fraction(self.a), Fraction(self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if a >= 0 or b >= 0:
            raise IndefiniteAlgebra(f"({a}, {b}) is not definite")
        candidates = {2}
        for z in (a.numerator, a.denominator, b.numerator, b.denominator):
            candidates.update(factorint(abs(z)))
        ram = tuple(sorted(p for p in candidates if hilbert_symbol(a, b, p) == -1))
        if len(ram) % 2 == 0:
            raise CheckFailed("Hilbert product formula violated", "Hilbert reciprocity")
        object.__setattr__(self, "ramified_primes", ram)
        object.__setattr__(self, "discriminant", math.prod(ram))

    def elt(self, *coeffs) -> "QuatElement":
        if len(coeffs) == 1 and isinstance(coeffs[0], (tuple, list)):
            coeffs = tuple(coeffs[0])
        c = tuple(Fraction(x) for x in coeffs) + (Fraction(0),) * (4 - len(coeffs))
        return QuatElement(self, c)

    @property
    def one(self) -> "QuatElement":
        return self.elt(1)

    @property
    def i(self) -> "QuatElement":
        return self.elt(0, 1)

    @property
    def j(self) -> "QuatElement":
        return self.elt(0, 0, 1)

    @property
    def k(self) -> "QuatElement":
        return self.elt(0, 0, 0, 1)

    def trace_form(self) -> list[list[Fraction]]:
        """Gram of ``tr(x̄y)`` on the standard basis."""
        a, b = self.a, self.b
        return _diag([2, -2 * a, -2 * b, 2 * a * b])

    def __str__(self) -> str:
        return f"({self.a}, {self.b} | Q)"


def _diag(vals) -> list[list[Fraction]]:
    n = len(vals)
    return [[Fraction(vals[i]) if i == j else Fraction(0) for j in range(n)] for i in range(n)]


def algebra_from_pair(a, b) -> QuaternionAlgebra:
    return QuaternionAlgebra(Fraction(a), Fraction(b))


@dataclass(frozen=True)
class QuatElement:
    alg: QuaternionAlgebra
    c: tuple[Fraction, Fraction, Fraction, Fraction]

    def _coerce(self, other) -> "QuatElement":
        if isinstance(other, QuatElement):
            return other
        return self.alg.elt(other)

    def __add__(self, other):
        o = self._coerce(other)
        return QuatElement(self.alg, tuple(x + y for x, y in zip(self.c, o.c)))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return QuatElement(self.alg, tuple(x - y for x, y in zip(self.c, o.c)))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return QuatElement(self.alg, tuple(-x for x in self.c))

    def __mul__(self, other):
        if not isinstance(other, QuatElement):
            s = Fraction(other)
            return QuatElement(self.alg, tuple(s * x for x in self.c))
        a, b = self.alg.a, self.alg.b
        x0, x1, x2, x3 = self.c
        y0, y1, y2, y3 = other.c
        return QuatElement(self.alg, (
            x0 * y0 + a * x1 * y1 + b * x2 * y2 - a * b * x3 * y3,
            x0 * y1 + x1 * y0 - b * x2 * y3 + b * x3 * y2,
            x0 * y2 + x2 * y0 + a * x1 * y3 - a * x3 * y1,
            x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1,
        ))

    def __rmul__(self, other):
        s = Fraction(other)
        return QuatElement(self.alg, tuple(s * x for x in self.c))

    def __truediv__(self, other):
        if isinstance(other, QuatElement):
            return self * other.inverse()
        s = Fraction(other)
        return QuatElement(self.alg, tuple(x / s for x in self.c))

    def conj(self) -> "QuatElement":
        x0, x1, x2, x3 = self.c
        return QuatElement(self.alg, (x0, -x1, -x2, -x3))

    def trace(self) -> Fraction:
        return 2 * self.c[0]

    def norm(self) -> Fraction:
        a, b = self.alg.a, self.alg.b
        x0, x1, x2, x3 = self.c
        return x0 * x0 - a * x1 * x1 - b * x2 * x2 + a * b * x3 * x3

    def inverse(self) -> "QuatElement":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("zero quaternion")
        return self.conj() / n

    def is_zero(self) -> bool:
        return not any(self.c)

    def __str__(self) -> str:
        den = la.common_denominator([self.c])
        nums = [int(x * den) for x in self.c]
        parts = []
        for n, s in zip(nums, ("", "i", "j", "k")):
            if n == 0:
                continue
            mag = abs(n)
            body = (str(mag) if (mag != 1 or not s) else "") + s
            parts.append(("-" if n < 0 else "+") + body)
        if not parts:
            return "0"
        text = "".join(parts).lstrip("+")
        if den == 1:
            return text
        return f"({text})/{den}"


def trace_norm(x: QuatElement) -> tuple[Fraction, Fraction]:
    return x.trace(), x.norm()


# ---------------------------------------------------------------------------
# Orders


class Order:
    """A Z-order of rank 4, given by a basis of quaternions.

    ``coords`` holds the basis as rows of standard coordinates.  Instances
    are validated on construction and treated as immutable.
    """

    def __init__(self, alg: QuaternionAlgebra, basis: Sequence[QuatElement], name: str = ""):
        self.algebra = alg
        self.name = name
        self.basis = tuple(basis)
        if len(self.basis) != 4:
            raise ValueError("an order basis has 4 elements")
        self.coords = [list(x.c) for x in self.basis]
        if la.rank(self.coords) != 4:
            raise ValueError("order basis does not have rank 4")
        self._inv = la.inverse(self.coords)
        if not self.contains(alg.one):
            raise NoUnit("1 is not in the lattice")
        for x in self.basis:
            t, n = trace_norm(x)
            if t.denominator != 1 or n.denominator != 1:
                raise NotIntegral(f"basis element {x} is not integral")
        self.mult = [[None] * 4 for _ in range(4)]
        for r, x in enumerate(self.basis):
            for s, y in enumerate(self.basis):
                cz = self.coords_of(x * y)
                if any(z.denominator != 1 for z in cz):
                    raise NotClosed(f"product {x}*{y} leaves the lattice")
                self.mult[r][s] = [int(z) for z in cz]
        self.gram = la.to_int(la.matmul(la.matmul(self.coords, alg.trace_form()),
                                         la.transpose(self.coords)))
        dg = int(la.det(self.gram))
        root = math.isqrt(dg)
        if root * root != dg:
            raise CheckFailed("Gram determinant is not a square", "reduced discriminant")
        self.reduced_discriminant = root

    # -- coordinates -------------------------------------------------------
    def coords_of(self, x: QuatElement) -> list[Fraction]:
        return la.vecmat(x.c, self._inv)

    def contains(self, x: QuatElement) -> bool:
        return all(z.denominator == 1 for z in self.coords_of(x))

    def element(self, v: Sequence) -> QuatElement:
        return self.algebra.elt(*la.vecmat(v, self.coords))

    def right_matrix(self, x: QuatElement) -> list[list[Fraction]]:
        """Rows: order coordinates of ``b_i * x``."""
        return [self.coords_of(b * x) for b in self.basis]

    def left_matrix(self, x: QuatElement) -> list[list[Fraction]]:
        """Rows: order coordinates of ``x * b_i``."""
        return [self.coords_of(x * b) for b in self.basis]

    def trace_matrix(self) -> list[list[int]]:
        """``tr(b_r b_s)``."""
        return [[int((x * y).trace()) for y in self.basis] for x in self.basis]

    def norm_lattice(self) -> ZLattice:
        """The order as a Euclidean lattice under ``tr(x̄y)``."""
        return ZLattice(basis=self.coords, ambient=self.algebra.trace_form())

    def canonical_coords(self) -> list[list[Fraction]]:
        return la.lattice_basis(self.coords)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Order) and self.algebra == other.algebra
                and self.canonical_coords() == other.canonical_coords())

    def __hash__(self) -> int:
        return hash(tuple(tuple(r) for r in self.canonical_coords()))

    def __repr__(self) -> str:
        tag = f" {self.name}" if self.name else ""
        return f"<Order{tag} in {self.algebra}, disc {self.reduced_discriminant}>"


def order_from_basis(alg: QuaternionAlgebra, basis: Sequence[QuatElement], name: str = "") -> Order:
    return Order(alg, basis, name)


def order_generated_by(alg: QuaternionAlgebra, elems: Iterable[QuatElement]) -> Order:
    """The smallest order containing ``elems``.

    Raises :class:`NotIntegral` when the generated ring is not a lattice.
    """
    rows = [list(alg.one.c)] + [list(x.c) for x in elems]
    form = alg.trace_form()
    basis = la.lattice_basis(rows)
    while True:
        g = la.matmul(la.matmul(basis, form), la.transpose(basis))
        if not la.is_integral(g):
            raise NotIntegral("generated ring is not integral")
        elems_ = [alg.elt(*r) for r in basis]
        prods = [list((x * y).c) for x in elems_ for y in elems_]
        new = la.lattice_basis(basis + prods)
        if new == basis:
            if len(basis) != 4:
                raise ValueError("generators do not span the algebra")
            return Order(alg, elems_)
        basis = new


def is_maximal(o: Order) -> bool:
    return o.reduced_discriminant == o.algebra.discriminant


def maximalize(o: Order) -> Order:
    """A maximal order containing ``o``.

    At a prime ``p`` where ``o`` is not maximal, elements ``x/p`` with ``x``
    running over ``o/po`` in lexicographic order are tried; the first one
    whose generated ring is an order gives a strictly larger order.
    """
    alg = o.algebra
    cur = o
    while cur.reduced_discriminant != alg.discriminant:
        excess = cur.reduced_discriminant // alg.discriminant
        p = min(factorint(excess))
        nxt = None
        for v in itertools.product(range(p), repeat=4):
            if not any(v):
                continue
            y = cur.element(v) / p
            t, n = trace_norm(y)
            if t.denominator != 1 or n.denominator != 1:
                continue
            try:
                cand = order_generated_by(alg, list(cur.basis) + [y])
            except NotIntegral:
                continue
            nxt = cand
            break
        if nxt is None:
            raise CheckFailed(f"no overorder found at p = {p}", "maximal order discriminant")
        cur = nxt
    return Order(alg, cur.basis, o.name)


# ---------------------------------------------------------------------------
# Sublattices and ideals


class Sublattice:
    """A full-rank sublattice of an order, in order coordinates (integer HNF)."""

    def __init__(self, order: Order, rows: Sequence[Sequence[int]]):
        self.order = order
        h = la.hnf_basis([[int(x) for x in r] for r in rows])
        if len(h) != 4:
            raise ValueError("sublattice is not of full rank")
        self.hnf = h
        self.basis = tuple(order.element(r) for r in h)

    @classmethod
    def from_elements(cls, order: Order, elems: Iterable[QuatElement]) -> "Sublattice":
        rows = []
        for x in elems:
            c = order.coords_of(x)
            if any(z.denominator != 1 for z in c):
                raise ValueError(f"{x} is not in the order")
            rows.append([int(z) for z in c])
        return cls(order, rows)

    def index(self) -> int:
        return abs(int(la.det(self.hnf)))

    def contains(self, x: QuatElement) -> bool:
        c = self.order.coords_of(x)
        return la.lattice_contains(self.hnf, c)

    def is_right_ideal(self) -> bool:
        return all(self.contains(x * b) for x in self.basis for b in self.order.basis)

    def is_left_ideal(self) -> bool:
        return all(self.contains(b * x) for x in self.basis for b in self.order.basis)

    def is_two_sided(self) -> bool:
        return self.is_left_ideal() and self.is_right_ideal()

    def __eq__(self, other) -> bool:
        return isinstance(other, Sublattice) and self.order == other.order and self.hnf == other.hnf

    def __hash__(self) -> int:
        return hash(tuple(map(tuple, self.hnf)))

    def __repr__(self) -> str:
        return f"<Sublattice index {self.index()}>"


def right_principal(o: Order, x: QuatElement) -> Sublattice:
    """``x O``."""
    return Sublattice.from_elements(o, [x * b for b in o.basis])


def left_principal(o: Order, x: QuatElement) -> Sublattice:
    """``O x``."""
    return Sublattice.from_elements(o, [b * x for b in o.basis])


def different(o: Order) -> Sublattice:
    """``{x in O : tr(xO) in D Z}`` for a maximal order."""
    if not is_maximal(o):
        raise NotMaximal("the different is computed for maximal orders only")
    d = o.algebra.discriminant
    rows = la.kernel_mod(o.trace_matrix(), d)
    m = Sublattice(o, rows)
    if m.index() != d * d:
        raise CheckFailed("different has the wrong index", "index of the different is D^2")
    return m


# ---------------------------------------------------------------------------
# Enumeration


def _elem_key(x: QuatElement):
    nz = sum(1 for z in x.c if z)
    return (nz, tuple(-z for z in x.c))


def enumerate_by_norm(o: Order, n: int, trace_zero: bool = False) -> list[QuatElement]:
    """All ``x`` in ``o`` with ``n(x) = n`` (and ``tr(x) = 0`` if asked).

    Exhaustive.  Output is sorted by order coordinates.
    """
    n = Fraction(n)
    if n < 0:
        return []
    if n == 0:
        return [o.algebra.elt(0)]
    vecs = short_vectors_gram(o.gram, 2 * n)
    out = []
    for v in sorted(vecs):
        x = o.element(v)
        if x.norm() != n:
            continue
        if trace_zero and x.trace() != 0:
            continue
        out.append(x)
    return out


def unit_group(o: Order) -> list[QuatElement]:
    return enumerate_by_norm(o, 1)


def principal_different_witness(o: Order) -> QuatElement | None:
    """Some ``x`` in ``o`` with ``x^2 = -D``, or ``None``.

    When found, ``xO`` is checked to equal the different.
    """
    d = o.algebra.discriminant
    cands = sorted(enumerate_by_norm(o, d, trace_zero=True), key=_elem_key)
    if not cands:
        return None
    x = cands[0]
    if right_principal(o, x) != different(o):
        raise CheckFailed("witness does not generate the different", "principal different")
    return x


def find_pi_lambda(o: Order) -> tuple[QuatElement, QuatElement]:
    """A generator ``pi`` of the different and ``lambda`` with ``n(lambda) = -1 mod D``.

    Among candidates, fewer nonzero coordinates wins, then the larger
    coordinate vector in lexicographic order.  ``lambda`` of norm ``D - 1``
    is preferred; otherwise the smallest admissible norm is used.
    """
    d = o.algebra.discriminant
    m = different(o)
    pis = sorted(enumerate_by_norm(o, d), key=_elem_key)
    pi = None
    for x in pis:
        if right_principal(o, x) == m and left_principal(o, x) == m:
            pi = x
            break
    if pi is None:
        raise NotPrincipal("the different is not principal")
    target = d - 1
    while True:
        lams = enumerate_by_norm(o, target) if target > 0 else []
        if lams:
            return pi, sorted(lams, key=_elem_key)[0]
        target += d
