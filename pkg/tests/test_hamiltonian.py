import itertools
import math
from fractions import Fraction

import pytest

from quatlat import linalg as la
from quatlat.errors import BadLambda, BadPi, NotPrincipal
from quatlat.hamiltonian import (
    HamiltonianBinaryForm,
    build_glue_lattice,
    build_lambda_lattice,
    count_root_pairs,
    e8_checks,
    e8_report,
    form_from_obasis,
    form_minimum,
    orbit_constants,
    orbit_report,
    roots_of,
    verify_gamma2,
)
from quatlat.quat import different, find_pi_lambda
from quatlat.ternary import enumerate_S, m_transform, order_from_ternary

LAMBDA_PRESETS = ["hurwitz", "d3", "d5", "d7", "d13"]
ALL_PRESETS = ["hurwitz", "d3", "d5", "d7", "d11-a", "d11-b", "d13"]

_GLUE = {}


def glue_lattice(presets, name):
    if name not in _GLUE:
        _GLUE[name] = build_glue_lattice(presets[name].order)
    return _GLUE[name]


def product_sublattice_index(lam):
    """``[lam : O x N]`` where ``N`` is the scaled different."""
    o = lam.order
    rows = [[int(i == j) for j in range(4)] + [0] * 4 for i in range(4)]
    rows += [[0] * 4 + list(r) for r in different(o).hnf]
    for r in rows:
        assert la.lattice_contains(lam.lattice.basis, r)
    sub = la.matmul(la.matmul(rows, lam.ambient), la.transpose(rows))
    ratio = la.det(sub) / lam.lattice.det()
    root = math.isqrt(int(ratio))
    assert ratio.denominator == 1 and root * root == ratio
    return root


@pytest.mark.parametrize("name", LAMBDA_PRESETS)
def test_lambda_route_is_e8(presets, name):
    p = presets[name]
    pi, lam0 = find_pi_lambda(p.order)
    for lam in [lam0] + list(p.lambdas.values()):
        L = build_lambda_lattice(p.order, pi, lam)
        assert all(e8_checks(L).values())
        assert L.is_obasis(*L.obasis)


@pytest.mark.parametrize("name", ALL_PRESETS)
def test_glue_route_is_e8(presets, name):
    L = glue_lattice(presets, name)
    assert all(e8_checks(L).values())
    d = presets[name].order.algebra.discriminant
    assert product_sublattice_index(L) == d * d


@pytest.mark.parametrize("name", ALL_PRESETS)
def test_extremal_form(presets, name):
    o = presets[name].order
    d = o.algebra.discriminant
    for rep in verify_gamma2(o, "both"):
        assert rep.ok, rep.checks
        assert rep.form_minimum == 1
        assert rep.form_delta == Fraction(-1, d)
        assert rep.form_minimum ** 2 / -rep.form_delta == d


def test_form_values_match_gram(presets):
    o = presets["d13"].order
    L = glue_lattice(presets, "d13")
    f = form_from_obasis(L)
    g = f.gram(o)
    for c in ([1, 0, 0, 0, 0, 0, 0, 0], [0, 1, -1, 0, 2, 0, 1, 0], [1, 1, 1, 1, -1, -1, 0, 3]):
        u, v = o.element(c[:4]), o.element(c[4:])
        assert f(u, v) == sum(g[r][s] * c[r] * c[s] for r in range(8) for s in range(8)) / 2


def test_form_minimum_brute_force(presets):
    o = presets["hurwitz"].order
    alg = o.algebra
    f = HamiltonianBinaryForm(2, alg.elt(Fraction(1, 2), Fraction(1, 2)), 3)
    best = min(
        f(o.element(c[:4]), o.element(c[4:]))
        for c in itertools.product(range(-1, 2), repeat=8) if any(c)
    )
    assert form_minimum(f, o) == best


def test_indefinite_form_rejected(presets):
    alg = presets["hurwitz"].order.algebra
    with pytest.raises(ValueError):
        HamiltonianBinaryForm(1, alg.elt(2), 1)


def test_bad_pi_and_lambda(presets):
    o = presets["d13"].order
    alg = o.algebra
    with pytest.raises(BadPi):
        build_lambda_lattice(o, alg.elt(1, 1), alg.elt(1))
    with pytest.raises(BadLambda):
        build_lambda_lattice(o, alg.j, alg.elt(1))


@pytest.mark.parametrize("p,n,m", [(2, 3, 3), (3, 1, 4), (5, 0, 6), (7, 0, 4), (13, 0, 2)])
def test_orbit_constants(p, n, m):
    assert orbit_constants(p) == (n, m)
    assert 24 == (p - 1) * p ** n * m


def test_thirteen_orbit_split(presets):
    p = presets["d13"]
    lats = [build_lambda_lattice(p.order, p.pi, p.lambdas[k]) for k in ("l1", "l2")]
    rep = orbit_report(13, lats)
    assert rep.unitary_orders == [48, 120]
    assert rep.r_values == [5, 2] and rep.r_sum == 7 == rep.expected_sum
    assert rep.identities_ok


@pytest.mark.parametrize("name", ["hurwitz", "d3", "d5", "d7"])
def test_single_orbit_identity_small_discriminant(presets, name):
    o = presets[name].order
    pi, lam = find_pi_lambda(o)
    L = build_lambda_lattice(o, pi, lam)
    rep = orbit_report(o.algebra.discriminant, L)
    assert rep.identities_ok and rep.r_sum == rep.expected_sum


def test_count_root_pairs_brute_force(presets):
    p = presets["d13"]
    L = build_lambda_lattice(p.order, p.pi, p.lambdas["l1"])
    e1, e2 = L.obasis
    target = L.hermitian(e1, e2)
    rs = roots_of(L)
    comps = [L.pair(r) for r in rs]
    count = 0
    for x1, y1 in comps:
        for x2, y2 in comps:
            if x2.conj() * x1 + (y2.conj() * y1) * L.s2 == target:
                count += 1
    assert count == count_root_pairs(L, target) == 48


def test_lambda_route_needs_principal_different():
    tl = enumerate_S(37)[1]
    o = order_from_ternary(m_transform(tl, 37), 37)
    with pytest.raises(NotPrincipal):
        find_pi_lambda(o)
    reps = verify_gamma2(o, "both")
    assert [r.construction for r in reps] == ["glue"] and reps[0].ok


def test_e8_report_fields(presets):
    p = presets["hurwitz"]
    pi, lam = find_pi_lambda(p.order)
    r = e8_report(build_lambda_lattice(p.order, pi, lam), "lambda")
    assert (r.minimum, r.root_count, r.det, r.is_even, r.obasis_found) == (2, 240, 1, True, True)
    assert r.gamma2 == "sqrt(2)" and "Blichfeldt" in r.upper_bound
