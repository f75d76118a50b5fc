"""Property suites: similitude of right multiplication, conjugation as an
anti-involution, and exhaustive enumeration against a box search.

Runnable on their own with ``pytest tests/test_properties.py``.
"""

import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quatlat import linalg as la
from quatlat.catalog import load_preset
from quatlat.hamiltonian import build_glue_lattice, build_lambda_lattice
from quatlat.lattice import short_vectors_gram
from quatlat.quat import algebra_from_pair

RANDOM_LATTICE_CASES = 120

small = st.integers(min_value=-3, max_value=3)
ocoords = st.tuples(small, small, small, small)
lat_vec = st.tuples(*[small] * 8)

_LATTICES = {}


def o_lattice(name: str, route: str):
    key = (name, route)
    if key not in _LATTICES:
        p = load_preset(name)
        if route == "lambda":
            _LATTICES[key] = build_lambda_lattice(p.order, p.pi, next(iter(p.lambdas.values())))
        else:
            _LATTICES[key] = build_glue_lattice(p.order)
    return _LATTICES[key]


CASES = st.sampled_from([("hurwitz", "lambda"), ("d13", "lambda"), ("d5", "glue"), ("d11-b", "glue")])


@settings(max_examples=60, deadline=None)
@given(CASES, ocoords)
def test_similitude(case, c):
    """Right multiplication by x scales the Gram matrix by n(x)."""
    lam = o_lattice(*case)
    x = lam.order.element(c)
    a = [[sum(ci * m[r][s] for ci, m in zip(c, lam.action)) for s in range(8)] for r in range(8)]
    g = lam.gram
    assert la.matmul(la.matmul(a, g), la.transpose(a)) == la.scale(g, x.norm())


@settings(max_examples=60, deadline=None)
@given(CASES, lat_vec, lat_vec, ocoords)
def test_hermitian_form_identities(case, v, w, c):
    lam = o_lattice(*case)
    x = lam.order.element(c)
    h = lam.hermitian(v, w)
    assert lam.hermitian(w, v) == h.conj()
    assert lam.hermitian(lam.act(v, c), w) == h * x
    assert lam.hermitian(v, lam.act(w, c)) == x.conj() * h
    assert lam.lattice.inner(v, w) == h.trace()
    assert lam.f0(v) == lam.hermitian(v, v).c[0]


rat = st.fractions(min_value=-6, max_value=6, max_denominator=6)
elt = st.tuples(rat, rat, rat, rat)
ab = st.tuples(st.integers(-15, -1), st.integers(-15, -1))


@settings(max_examples=150, deadline=None)
@given(ab, elt, elt, rat)
def test_conjugation_is_an_anti_involution(pair, x, y, q):
    alg = algebra_from_pair(*pair)
    x, y = alg.elt(*x), alg.elt(*y)
    assert (x * y).conj() == y.conj() * x.conj()
    assert x.conj().conj() == x
    assert (x + y).conj() == x.conj() + y.conj()
    assert (x * q).conj() == x.conj() * q
    assert x.conj().norm() == x.norm()
    assert (x * y).trace() == (y * x).trace()
    assert (x * y).norm() == x.norm() * y.norm()


def _random_gram(rng: random.Random, n: int):
    while True:
        basis = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)]
        if la.det(basis) == 0:
            continue
        weights = [Fraction(rng.randint(1, 4), rng.choice([1, 1, 2, 3])) for _ in range(n)]
        amb = [[weights[i] if i == j else Fraction(0) for j in range(n)] for i in range(n)]
        return la.matmul(la.matmul(basis, amb), la.transpose(basis))


def _box_search(gram, bound):
    n = len(gram)
    ginv = la.inverse(gram)
    # |x_i| <= sqrt(bound * (G^-1)_ii) for every x with x G x^T <= bound
    radius = [math.isqrt(math.floor(bound * ginv[i][i])) + 1 for i in range(n)]
    den = la.common_denominator(gram + [[bound]])
    gi = np.array([[int(x * den) for x in row] for row in gram], dtype=np.int64)
    bi = int(bound * den)
    tails = list(itertools.product(*(range(-r, r + 1) for r in radius[1:])))
    rest = np.array(tails, dtype=np.int64).reshape(len(tails), n - 1)
    out = set()
    for x0 in range(-radius[0], radius[0] + 1):
        xs = np.hstack([np.full((len(rest), 1), x0, dtype=np.int64), rest])
        vals = np.einsum("ij,jk,ik->i", xs, gi, xs)
        for k in np.nonzero((vals <= bi) & xs.any(axis=1))[0]:
            out.add((Fraction(int(vals[k]), den), tuple(int(t) for t in xs[k])))
    return out


@pytest.mark.parametrize("seed", range(RANDOM_LATTICE_CASES))
def test_enumeration_matches_box_search(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    gram = _random_gram(rng, n)
    diag = min(gram[i][i] for i in range(n))
    bound = diag * Fraction(rng.randint(2, 6), 4)
    expected = _box_search(gram, bound)
    for reduce in (True, False):
        got = short_vectors_gram(gram, bound, reduce=reduce, with_norms=True)
        assert len(got) == len(set(got))
        assert {(Fraction(v), tuple(x)) for v, x in got} == expected
