import cmath
import csv
import math
from fractions import Fraction
from pathlib import Path

import pytest
from sympy import isprime

from quatlat.errors import CheckFailed
from quatlat.lattice import is_anisotropic, is_isometric, residue
from quatlat.quat import is_maximal, unit_group
from quatlat.ternary import (
    TernaryLattice,
    admissible_values,
    class_number,
    deuring_check,
    enumerate_R,
    enumerate_S,
    gauss_factorization,
    genus_symbols,
    in_R,
    in_S,
    in_S_by_residue,
    in_S_by_symbols,
    is_admissible,
    m_transform,
    order_from_ternary,
    reduced_even_grams,
    represents_one,
    table,
    table_row,
    theorem25_report,
    trace_zero_lattice,
)

GOLDEN = Path(__file__).parent / "data" / "table_d100.csv"
PRESETS = ["hurwitz", "d3", "d5", "d7", "d11-a", "d11-b", "d13"]


def golden_rows():
    with open(GOLDEN, newline="") as fh:
        return [tuple(int(r[k]) for k in ("d", "t", "t_dnp")) for r in csv.DictReader(fh)]


def test_admissible():
    assert admissible_values(31) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 30, 31]
    assert not is_admissible(1) and not is_admissible(6) and not is_admissible(12)
    assert is_admissible(42) and is_admissible(105)


@pytest.mark.parametrize("disc,h", [
    (-3, 1), (-4, 1), (-7, 1), (-8, 1), (-11, 1), (-12, 1), (-15, 2), (-16, 1), (-20, 2),
    (-23, 3), (-24, 2), (-28, 1), (-31, 3), (-39, 4), (-44, 3), (-47, 5), (-56, 4), (-71, 7),
    (-84, 4), (-148, 2), (-163, 1), (-268, 3), (-5, 0), (4, 0),
])
def test_class_number(disc, h):
    assert class_number(disc) == h


def test_reduced_grams_are_even_with_right_det():
    for det in (4, 6, 10, 22, 74):
        for g in reduced_even_grams(det):
            tl = TernaryLattice.from_gram(g)
            assert tl.det() == det and tl.lattice.is_even()
            a, b, c = g[0][0], g[1][1], g[2][2]
            assert a <= b <= c


def test_table_matches_golden():
    rows = table(100)
    assert [(r.d, r.t, r.t_dnp) for r in rows] == golden_rows()


def test_table_parallel_is_identical():
    assert table(42, jobs=2) == table(42, jobs=1)


def test_first_non_principal_cases():
    rows = {d: (t, n) for d, t, n in golden_rows()}
    assert min(d for d, (t, n) in rows.items() if n >= 1) == 37
    assert min(d for d, (t, n) in rows.items() if n >= 2) == 67
    assert table_row(37).t_dnp == 1 and table_row(67).t_dnp == 2


@pytest.mark.parametrize("p", [p for p in admissible_values(100) if p > 2 and isprime(p)])
def test_deuring(p):
    assert deuring_check(p)


def test_deuring_rejects_non_prime():
    with pytest.raises(ValueError):
        deuring_check(30)


@pytest.mark.parametrize("d", admissible_values(30))
def test_S_R_bijection_and_involution(d):
    S = enumerate_S(d)
    R = enumerate_R(d)
    assert len(S) == len(R)
    for tl in S:
        assert in_S_by_symbols(tl, d) == in_S_by_residue(tl, d) is True
        img = m_transform(tl, d)
        assert in_R(img, d)
        assert m_transform(img, d).lattice.same_as(tl.lattice)
        assert sum(is_isometric(img.lattice, r.lattice) is not None for r in R) == 1
    for r in R:
        assert in_S(m_transform(r, d), d)


@pytest.mark.parametrize("d", admissible_values(30))
def test_residue_shape_of_S_members(d):
    for tl in enumerate_S(d):
        v = residue(tl.lattice)
        assert v.order == 2 * d
        v2 = v.primary_part(2)
        if d % 2 == 0:
            assert v2.invariant_factors == (4,)
            assert v2.q((1,)).denominator == 8
        else:
            assert v2.invariant_factors == (2,)
            assert v2.q((1,)) in (Fraction(1, 4), Fraction(3, 4))
        assert is_anisotropic(v)
        whole, prod = gauss_factorization(tl)
        assert abs(whole - cmath.exp(3j * math.pi / 4)) < 1e-9
        assert abs(whole - prod) < 1e-9


def test_genus_symbols_are_signs():
    for tl in enumerate_S(30):
        for p in (3, 5):
            s = genus_symbols(tl, p)
            assert s.p == p and s.e_p in (1, -1) and s.e_p_prime in (1, -1)


@pytest.mark.parametrize("name", PRESETS)
def test_trace_zero_lattice_of_presets(presets, name):
    o = presets[name].order
    d = o.algebra.discriminant
    lo = trace_zero_lattice(o)
    assert lo.det() == 2 * d * d and in_R(lo, d)
    m = m_transform(lo, d)
    assert in_S(m, d)
    assert m_transform(m, d).lattice.same_as(lo.lattice)


def test_orders_from_ternary_at_eleven():
    orders = [order_from_ternary(m_transform(tl, 11), 11) for tl in enumerate_S(11)]
    assert all(is_maximal(o) and o.algebra.discriminant == 11 for o in orders)
    assert sorted(len(unit_group(o)) for o in orders) == [4, 6]


def test_order_from_ternary_requires_R():
    with pytest.raises(CheckFailed):
        order_from_ternary(enumerate_S(11)[0], 11)


@pytest.mark.parametrize("name", PRESETS)
def test_principal_different_criteria_on_presets(presets, name):
    rep = theorem25_report(presets[name].order)
    assert rep.agree and all(rep.values())


def test_principal_different_criteria_non_representing_class():
    classes = enumerate_S(37)
    idx = [i for i, tl in enumerate(classes) if not represents_one(tl)]
    assert len(idx) == 1
    o = order_from_ternary(m_transform(classes[idx[0]], 37), 37)
    rep = theorem25_report(o)
    assert rep.agree and not any(rep.values())


def test_non_admissible_rejected():
    with pytest.raises(ValueError):
        enumerate_S(6)
    with pytest.raises(ValueError):
        enumerate_R(4)
