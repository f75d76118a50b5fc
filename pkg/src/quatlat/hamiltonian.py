"""O-lattices in H x H, E8 constructions and Hamiltonian binary forms.

Both factors of ``H x H`` are coordinatized by the order basis, so a vector
is a row of 8 rationals.  The second factor may carry a scale ``s2``: the
vector ``(x, y)`` then stands for ``(x, y / sqrt(1/s2))``.  With ``s2 = 1/D``
this realizes ``N = M / sqrt(D)`` exactly.  The Euclidean product is
``tr(x̄x') + s2 tr(ȳy')`` and the quaternionic Hermitian product is
``h(w', w) = x̄x' + s2 ȳy'`` where ``w = (x, y)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from sympy import factorint

from . import linalg as la
from .errors import BadLambda, BadPi, CheckFailed, GlueNotFound, NoObasis, NotPrincipal
from .lattice import (
    QeModule,
    SubgroupSpec,
    ZLattice,
    glue,
    residue,
    short_vectors_gram,
)
from .quat import (
    Order,
    QuatElement,
    different,
    find_pi_lambda,
    is_maximal,
    right_principal,
)

BLICHFELDT_NOTE = "certified modulo gamma_8 = 2 (Blichfeldt)"


def _block_diag(a, b):
    n, m = len(a), len(b)
    out = [[Fraction(0)] * (n + m) for _ in range(n + m)]
    for r in range(n):
        for c in range(n):
            out[r][c] = Fraction(a[r][c])
    for r in range(m):
        for c in range(m):
            out[n + r][n + c] = Fraction(b[r][c])
    return out


class OLattice:
    """A rank-8 Z-lattice in ``H x H`` stable under right multiplication by ``order``.

    ``lattice.basis`` rows are ambient coordinates (order coordinates of the
    two components).  ``action[i]`` has as rows the lattice coordinates of
    ``w_r * b_i``.  ``obasis`` optionally holds lattice coordinates of
    ``(e1, e2)`` with ``lattice = e1 O + e2 O``.
    """

    def __init__(self, order: Order, basis: Sequence[Sequence], s2=1, obasis=None):
        self.order = order
        self.s2 = Fraction(s2)
        g = [[Fraction(x) for x in row] for row in order.gram]
        self.ambient = _block_diag(g, la.scale(g, self.s2))
        self.lattice = ZLattice(basis=basis, ambient=self.ambient)
        binv = la.inverse(self.lattice.basis)
        self.action = []
        for b in order.basis:
            r = la.to_fractions(order.right_matrix(b))
            amb = _block_diag(r, r)
            a = la.matmul(la.matmul(self.lattice.basis, amb), binv)
            if not la.is_integral(a):
                raise CheckFailed("lattice is not stable under the order", "O-module structure")
            self.action.append(la.to_int(a))
        gl = self.lattice.gram
        for b, a in zip(order.basis, self.action):
            lhs = la.matmul(la.matmul(a, gl), la.transpose(a))
            if lhs != la.scale(gl, b.norm()):
                raise CheckFailed("right multiplication is not a similitude", "similitude n(x)")
        self.obasis = None
        if obasis is not None:
            self.set_obasis(*obasis)

    # -- coordinates -------------------------------------------------------
    @property
    def gram(self):
        return self.lattice.gram

    def pair(self, v: Sequence) -> tuple[QuatElement, QuatElement]:
        """The two quaternion components of a lattice vector (coordinates)."""
        amb = la.vecmat(v, self.lattice.basis)
        return self.order.element(amb[:4]), self.order.element(amb[4:])

    def coords_of_pair(self, x: QuatElement, y: QuatElement) -> list[Fraction]:
        amb = self.order.coords_of(x) + self.order.coords_of(y)
        return la.solve_left(self.lattice.basis, amb)

    def act(self, v: Sequence, x_coords: Sequence[int]) -> list:
        """``v * x`` for ``x`` given by order coordinates."""
        out = [0] * 8
        for c, a in zip(x_coords, self.action):
            if c:
                out = [o + c * t for o, t in zip(out, la.vecmat(v, a))]
        return out

    def hermitian(self, w1: Sequence, w2: Sequence) -> QuatElement:
        """``h(w1, w2)``: conj of ``w2`` components times ``w1`` components."""
        x1, y1 = self.pair(w1)
        x2, y2 = self.pair(w2)
        return x2.conj() * x1 + (y2.conj() * y1) * self.s2

    def f0(self, v: Sequence) -> Fraction:
        return self.lattice.norm(v) / 2

    def span_matrix(self, e1: Sequence, e2: Sequence) -> list[list]:
        rows = []
        for e in (e1, e2):
            for i in range(4):
                rows.append(self.act(e, [int(i == k) for k in range(4)]))
        return rows

    def is_obasis(self, e1: Sequence, e2: Sequence) -> bool:
        return abs(la.det(self.span_matrix(e1, e2))) == 1

    def set_obasis(self, e1: Sequence, e2: Sequence) -> None:
        e1 = [Fraction(x) for x in e1]
        e2 = [Fraction(x) for x in e2]
        if not (la.is_integral([e1, e2]) and self.is_obasis(e1, e2)):
            raise NoObasis("given pair is not an O-basis")
        self.obasis = (tuple(int(x) for x in e1), tuple(int(x) for x in e2))

    def same_as(self, other: "OLattice") -> bool:
        return self.lattice.same_as(other.lattice)

    def __repr__(self) -> str:
        return f"<OLattice over {self.order!r}, det {self.lattice.det()}>"


# ---------------------------------------------------------------------------
# Hamiltonian binary forms


@dataclass(frozen=True)
class HamiltonianBinaryForm:
    """``(u, v) -> a n(u) + tr(ū b v) + c n(v)``."""

    a: Fraction
    b: QuatElement
    c: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "c", Fraction(self.c))
        if self.a <= 0 or self.c <= 0 or self.discriminant() >= 0:
            raise ValueError("form is not positive definite")

    def discriminant(self) -> Fraction:
        return self.b.norm() - self.a * self.c

    def __call__(self, u: QuatElement, v: QuatElement) -> Fraction:
        return self.a * u.norm() + (u.conj() * self.b * v).trace() + self.c * v.norm()

    def gram(self, o: Order) -> list[list[Fraction]]:
        """Gram of ``2f`` on the Z-basis ``(b_r, 0), (0, b_s)`` of ``O x O``."""
        g = o.gram
        cross = [[(x.conj() * self.b * y).trace() for y in o.basis] for x in o.basis]
        out = [[Fraction(0)] * 8 for _ in range(8)]
        for r in range(4):
            for s in range(4):
                out[r][s] = self.a * g[r][s]
                out[4 + r][4 + s] = self.c * g[r][s]
                out[r][4 + s] = cross[r][s]
                out[4 + s][r] = cross[r][s]
        return out


def form_from_obasis(lam: OLattice) -> HamiltonianBinaryForm:
    if lam.obasis is None:
        raise NoObasis("lattice has no O-basis")
    e1, e2 = lam.obasis
    return HamiltonianBinaryForm(lam.f0(e1), lam.hermitian(e1, e2), lam.f0(e2))


def form_minimum(f: HamiltonianBinaryForm, o: Order) -> Fraction:
    """Exact minimum of ``f`` over ``O x O`` minus zero."""
    g = f.gram(o)
    # 1 lies in O, so f(1, 0) = a and f(0, 1) = c bound the minimum
    bound = min([2 * f.a, 2 * f.c] + [g[i][i] for i in range(8)])
    norm, _ = short_vectors_gram(g, bound, with_norms=True)[0]
    return Fraction(norm) / 2


# ---------------------------------------------------------------------------
# Construction by congruence


def build_lambda_lattice(o: Order, pi: QuatElement, lam: QuatElement) -> OLattice:
    """``{(pi^-1 u, pi^-1 v) : lam u = v mod pi O}`` with its O-basis."""
    d = o.algebra.discriminant
    if not o.contains(pi) or pi.norm() != d or right_principal(o, pi) != different(o):
        raise BadPi(f"{pi} does not generate the different")
    if not o.contains(lam) or (lam.norm() + 1) % d:
        raise BadLambda(f"n({lam}) is not -1 mod {d}")
    pinv = pi.inverse()
    rows = []
    for b in o.basis:
        rows.append(o.coords_of(pinv * b) + o.coords_of(pinv * lam * b))
    for b in o.basis:
        rows.append([Fraction(0)] * 4 + o.coords_of(b))
    out = OLattice(o, rows)
    one = o.algebra.one
    e1 = out.coords_of_pair(pinv, pinv * lam)
    e2 = out.coords_of_pair(one * 0, one)
    out.set_obasis(e1, e2)
    if la.lattice_index(la.identity(8), out.lattice.basis) != d * d:
        raise CheckFailed("O x O has the wrong index", "index D^2")
    return out


# ---------------------------------------------------------------------------
# Construction by glueing


def _module_action(module: QeModule, lat: ZLattice, actions) -> list[list[list[int]]]:
    """Matrices of the induced action on residue coordinates."""
    mats = []
    n = len(module.invariant_factors)
    for a in actions:
        rows = []
        for k in range(n):
            g = [int(t == k) for t in range(n)]
            rows.append(list(module.reduce(la.vecmat(module.lift(g), a))))
        mats.append(rows)
    return mats


def _apply(module: QeModule, mat, x):
    out = [0] * len(x)
    for c, row in zip(x, mat):
        if c:
            out = [o + c * r for o, r in zip(out, row)]
    return tuple(o % d for o, d in zip(out, module.invariant_factors))


def _orbit_subgroup(module: QeModule, mats, z) -> set:
    gens = [_apply(module, m, z) for m in mats]
    return module.span(gens), gens


def find_glue_subgroup(module: QeModule, mats, p: int):
    """First isotropic O-stable subgroup of order ``p^2`` in the p-part."""
    part = module.primary_part(p)
    for x in part.elements():
        if not any(x):
            continue
        z = module.primary_embedding(p, x)
        if module.q(z) != 0:
            continue
        span, gens = _orbit_subgroup(module, mats, z)
        if len(span) == p * p and all(module.q(y) == 0 for y in span):
            return gens
    raise GlueNotFound(f"no isotropic O-stable subgroup at p = {p}")


def find_obasis(lam: OLattice, max_f0: int = 4):
    """Search ``(e1, e2)`` among short vectors, roots first.

    ``e1`` runs over roots, those on the first factor first; ``e2`` runs
    over vectors with ``f0 <= 1``, then ``<= 2``, up to ``max_f0``.
    """
    roots = roots_of(lam)
    e1_cands = sorted(roots, key=lambda v: (not lam.pair(v)[1].is_zero(), v))
    tried = 0
    for f in range(1, max_f0 + 1):
        vecs = [v for n, v in short_vectors_gram(lam.gram, 2 * f, with_norms=True) if n > 2 * tried]
        for e1 in e1_cands:
            for e2 in vecs:
                if lam.is_obasis(e1, e2):
                    return e1, e2
        tried = f
    raise NoObasis("no O-basis among short vectors")


def build_glue_lattice(o: Order) -> OLattice:
    """An E8-isometric O-lattice containing ``O x N`` with index ``D^2``."""
    if not is_maximal(o):
        raise CheckFailed("order is not maximal", "glue construction")
    d = o.algebra.discriminant
    m = different(o)
    rows = [[Fraction(int(r == c)) for c in range(8)] for r in range(4)]
    rows += [[Fraction(0)] * 4 + [Fraction(x) for x in h] for h in m.hnf]
    base = OLattice(o, rows, s2=Fraction(1, d))
    lat = base.lattice
    if not lat.is_even():
        raise CheckFailed("O x N is not even", "O x N even")
    module = residue(lat)
    mats = _module_action(module, lat, base.action)
    gens = []
    for p in factorint(d):
        gens += find_glue_subgroup(module, mats, p)
    glued = glue(lat, SubgroupSpec(gens), module)
    out = OLattice(o, glued.basis, s2=Fraction(1, d))
    if la.lattice_index(lat.basis, out.lattice.basis) != d * d:
        raise CheckFailed("glue index differs from D^2", "index D^2")
    out.set_obasis(*find_obasis(out))
    return out


# ---------------------------------------------------------------------------
# Root pairs and orbit identities


def roots_of(lam: OLattice) -> list[tuple[int, ...]]:
    return [v for n, v in short_vectors_gram(lam.gram, 2, with_norms=True) if n == 2]


def _hermitian_tables(lam: OLattice):
    basis = [[int(r == c) for c in range(8)] for r in range(8)]
    return [[lam.hermitian(u, v).c for v in basis] for u in basis]


def count_root_pairs(lam: OLattice, target: QuatElement) -> int:
    """Ordered pairs of roots ``(alpha, beta)`` with ``h(alpha, beta) = target``."""
    if target.norm() > 1:
        return 0
    roots = np.array(roots_of(lam), dtype=np.int64)
    tab = _hermitian_tables(lam)
    den = la.common_denominator([[x for r in tab for e in r for x in e]])
    hits = None
    for comp in range(4):
        hc = np.array([[int(tab[r][s][comp] * den) for s in range(8)] for r in range(8)],
                      dtype=np.int64)
        vals = roots @ hc @ roots.T
        t = target.c[comp] * den
        ok = vals == int(t) if t.denominator == 1 else np.zeros_like(vals, dtype=bool)
        hits = ok if hits is None else hits & ok
    return int(hits.sum())


@dataclass
class OrbitReport:
    p: int
    n: int
    m: int
    unitary_orders: list[int]
    r_values: list[int]
    r_sum: int
    expected_sum: int
    identities_ok: bool


def orbit_constants(p: int) -> tuple[int, int]:
    """``(n, m)`` with ``24 = (p - 1) p^n m`` and ``p`` prime to ``m``."""
    q, rem = divmod(24, p - 1)
    if rem:
        raise ValueError(f"p - 1 = {p - 1} does not divide 24")
    n = 0
    while q % p == 0:
        q //= p
        n += 1
    return n, q


def orbit_report(p: int, lattices) -> OrbitReport:
    """Group orders and orbit sizes for representatives of the orbits.

    ``lattices`` is one O-lattice or a list of them, each with an O-basis of
    roots.  Raises :class:`CheckFailed` when an identity fails.
    """
    if isinstance(lattices, OLattice):
        lattices = [lattices]
    n, m = orbit_constants(p)
    orders, rs = [], []
    for lam in lattices:
        if lam.obasis is None:
            raise NoObasis("orbit report needs an O-basis")
        e1, e2 = lam.obasis
        if lam.f0(e1) != 1 or lam.f0(e2) != 1:
            raise CheckFailed("O-basis is not made of roots", "unitary group order")
        u = count_root_pairs(lam, lam.hermitian(e1, e2))
        r, rem = divmod(240 * p ** n, u)
        if rem:
            raise CheckFailed(f"240 p^n / |U| is not an integer ({u})", "240 = r |U| / p^n")
        orders.append(u)
        rs.append(r)
    expected = (p + 1) // m if (p + 1) % m == 0 else None
    ok = expected is not None and sum(rs) == expected
    return OrbitReport(p, n, m, orders, rs, sum(rs), expected, ok)


# ---------------------------------------------------------------------------
# gamma_2 reports


@dataclass
class E8Report:
    discriminant: int
    construction: str
    minimum: Fraction
    root_count: int
    det: Fraction
    is_even: bool
    obasis_found: bool
    form_a: Fraction
    form_b: str
    form_c: Fraction
    form_minimum: Fraction
    form_delta: Fraction
    gamma2: str
    upper_bound: str = BLICHFELDT_NOTE
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def e8_checks(lam: OLattice) -> dict:
    lat = lam.lattice
    pairs = short_vectors_gram(lat.gram, 2, with_norms=True)
    return {
        "even": lat.is_even(),
        "det_1": lat.det() == 1,
        "min_2": bool(pairs) and pairs[0][0] == 2,
        "roots_240": sum(1 for n, _ in pairs if n == 2) == 240,
        "obasis": lam.obasis is not None,
    }


def e8_report(lam: OLattice, construction: str) -> E8Report:
    d = lam.order.algebra.discriminant
    checks = e8_checks(lam)
    f = form_from_obasis(lam)
    fmin = form_minimum(f, lam.order)
    delta = f.discriminant()
    checks["form_delta"] = delta == Fraction(-1, d)
    checks["form_min_1"] = fmin == 1
    checks["gamma_squared"] = fmin * fmin / (-delta) == d
    return E8Report(
        discriminant=d,
        construction=construction,
        minimum=Fraction(2) if checks["min_2"] else Fraction(-1),
        root_count=len(roots_of(lam)),
        det=lam.lattice.det(),
        is_even=checks["even"],
        obasis_found=checks["obasis"],
        form_a=f.a,
        form_b=str(f.b),
        form_c=f.c,
        form_minimum=fmin,
        form_delta=delta,
        gamma2=f"sqrt({d})",
        checks=checks,
    )


def verify_gamma2(o: Order, route: str = "both", lam: QuatElement | None = None) -> list[E8Report]:
    """E8 witnesses for ``gamma_2(O) = sqrt(D)``.

    ``route`` is ``"glue"``, ``"lambda"`` or ``"both"``; the congruence route
    is skipped for ``"both"`` when the different is not principal.
    """
    if not is_maximal(o):
        raise CheckFailed("order is not maximal", "gamma_2")
    out = []
    if route in ("lambda", "both"):
        try:
            pi, lam0 = find_pi_lambda(o)
        except NotPrincipal:
            if route == "lambda":
                raise
            pi = None
        if pi is not None:
            out.append(e8_report(build_lambda_lattice(o, pi, lam or lam0), "lambda"))
    if route in ("glue", "both"):
        out.append(e8_report(build_glue_lattice(o), "glue"))
    return out
