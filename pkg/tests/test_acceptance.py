"""Acceptance criteria, one test each.

Every test records a ``PASS`` or ``FAIL`` line; the lines are printed in the
pytest terminal summary, and also when this file is run as a script.
"""

import cmath
import contextlib
import io
import math
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

from sympy import isprime

from quatlat import linalg as la
from quatlat.catalog import load_preset, preset_names
from quatlat.cli import main
from quatlat.hamiltonian import (
    build_glue_lattice,
    build_lambda_lattice,
    count_root_pairs,
    e8_checks,
    e8_report,
    orbit_report,
)
from quatlat.quat import (
    different,
    enumerate_by_norm,
    find_pi_lambda,
    principal_different_witness,
    unit_group,
)
from quatlat.ternary import (
    admissible_values,
    class_number,
    enumerate_R,
    enumerate_S,
    gauss_factorization,
    m_transform,
    order_from_ternary,
    represents_one,
    table,
    theorem25_report,
    trace_zero_lattice,
)

from test_properties import RANDOM_LATTICE_CASES

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # running as a script outside pytest
    ACCEPTANCE_LINES = {}

HERE = Path(__file__).parent
GOLDEN = HERE / "data" / "table_d100.csv"
E8_KEYS = ("even", "det_1", "min_2", "roots_240", "obasis")

TITLES = {
    1: "E8 by congruence (lambda route), D in {2,3,5,7,13}",
    2: "E8 by glue, all presets, index D^2",
    3: "extremal form: min 1 and discriminant -1/D",
    4: "D = 13 orbit split 48 / 120, r = 5 + 2 = 7",
    5: "unit counts 24, 12, 6, 4, 2 and 56 elements of norm 12",
    6: "table --dmax 100 byte-exact",
    7: "Deuring class-number cross-check",
    8: "Gauss sums equal exp(3 i pi / 4) and factorize",
    9: "M-transform involution and |R(d)| = |S(d)|",
    10: "five principal-different criteria agree",
    11: "property suites run standalone",
}


def record(n: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {n:2d}: {TITLES[n]} ({detail})"
    ACCEPTANCE_LINES[n] = line
    print(line)


def checked(n):
    """Run the body, record the line, then assert."""
    def wrap(fn):
        def test():
            try:
                ok, detail = fn()
            except Exception as exc:  # recorded as a failure, then re-raised
                record(n, False, f"{type(exc).__name__}: {exc}")
                raise
            record(n, ok, detail)
            assert ok, detail
        test.__name__ = fn.__name__
        return test
    return wrap


LAMBDA_PRESETS = {2: "hurwitz", 3: "d3", 5: "d5", 7: "d7", 13: "d13"}


def _preset_by_disc(d):
    p = load_preset(LAMBDA_PRESETS[d])
    assert p.order.algebra.discriminant == d
    return p


@checked(1)
def test_criterion_01_lambda_route():
    worst, bad = 0.0, []
    for d in (2, 3, 5, 7, 13):
        o = _preset_by_disc(d).order
        start = time.perf_counter()
        pi, lam = find_pi_lambda(o)
        L = build_lambda_lattice(o, pi, lam)
        checks = e8_checks(L)
        elapsed = time.perf_counter() - start
        worst = max(worst, elapsed)
        if not all(checks[k] for k in E8_KEYS) or elapsed >= 1:
            bad.append(d)
    return not bad, f"failing D: {bad}, slowest {worst:.2f}s"


def _index_over_product(L):
    rows = [[int(i == j) for j in range(4)] + [0] * 4 for i in range(4)]
    rows += [[0] * 4 + list(r) for r in different(L.order).hnf]
    if not all(la.lattice_contains(L.lattice.basis, r) for r in rows):
        return None
    ratio = la.det(la.matmul(la.matmul(rows, L.ambient), la.transpose(rows))) / L.lattice.det()
    root = math.isqrt(int(ratio))
    return root if root * root == ratio else None


@checked(2)
def test_criterion_02_glue_route():
    worst, bad = 0.0, []
    for name in preset_names():
        o = load_preset(name).order
        d = o.algebra.discriminant
        start = time.perf_counter()
        L = build_glue_lattice(o)
        checks = e8_checks(L)
        elapsed = time.perf_counter() - start
        worst = max(worst, elapsed)
        if not all(checks[k] for k in E8_KEYS) or _index_over_product(L) != d * d or elapsed >= 10:
            bad.append(name)
    return not bad, f"failing presets: {bad}, slowest {worst:.2f}s"


@checked(3)
def test_criterion_03_gamma2_witness():
    bad = []
    for name in preset_names():
        o = load_preset(name).order
        d = o.algebra.discriminant
        if principal_different_witness(o) is None:
            continue
        pi, lam = find_pi_lambda(o)
        for rep in (e8_report(build_lambda_lattice(o, pi, lam), "lambda"),
                    e8_report(build_glue_lattice(o), "glue")):
            if rep.form_minimum != 1 or rep.form_delta != Fraction(-1, d):
                bad.append((name, rep.construction))
    return not bad, f"failing: {bad}"


@checked(4)
def test_criterion_04_orbit_split():
    p = load_preset("d13")
    start = time.perf_counter()
    lats = [build_lambda_lattice(p.order, p.pi, p.lambdas[k]) for k in ("l1", "l2")]
    counts = [count_root_pairs(L, L.hermitian(*L.obasis)) for L in lats]
    rep = orbit_report(13, lats)
    elapsed = time.perf_counter() - start
    ok = (counts == [48, 120] and rep.r_values == [5, 2] and rep.r_sum == 7
          and rep.identities_ok and elapsed < 30)
    return ok, f"|U| = {counts}, r = {rep.r_values}, {elapsed:.2f}s"


@checked(5)
def test_criterion_05_unit_counts():
    got = [len(unit_group(_preset_by_disc(d).order)) for d in (2, 3, 5, 7, 13)]
    n12 = len(enumerate_by_norm(load_preset("d13").order, 12))
    return got == [24, 12, 6, 4, 2] and n12 == 56, f"units {got}, norm 12: {n12}"


@checked(6)
def test_criterion_06_table():
    buf = io.StringIO()
    start = time.perf_counter()
    with contextlib.redirect_stdout(buf):
        code = main(["table", "--dmax", "100", "--jobs", "1"])
    elapsed = time.perf_counter() - start
    out = buf.getvalue().encode()
    rows = out.decode().splitlines()[1:]
    ok = code == 0 and out == GOLDEN.read_bytes() and len(rows) == 30 and elapsed < 300
    return ok, f"{len(rows)} rows, exit {code}, {elapsed:.2f}s"


@checked(7)
def test_criterion_07_deuring():
    rows = table(100)
    primes = [r for r in rows if r.d > 2 and isprime(r.d)]
    bad = [r.d for r in primes if 2 * (r.t - r.t_dnp) != class_number(-r.d) + class_number(-4 * r.d)]
    return not bad and len(primes) == 24, f"{len(primes)} odd prime rows, failing {bad}"


@checked(8)
def test_criterion_08_gauss_sums():
    target = cmath.exp(3j * math.pi / 4)
    n, worst = 0, 0.0
    for d in admissible_values(100):
        for tl in enumerate_S(d) + enumerate_R(d):
            whole, prod = gauss_factorization(tl)
            worst = max(worst, abs(whole - target), abs(whole - prod))
            n += 1
    return worst < 1e-9, f"{n} lattices, max deviation {worst:.1e}"


@checked(9)
def test_criterion_09_involution_bijection():
    bad, n = [], 0
    for name in preset_names():
        o = load_preset(name).order
        d = o.algebra.discriminant
        lo = trace_zero_lattice(o)
        n += 1
        if not m_transform(m_transform(lo, d), d).lattice.same_as(lo.lattice):
            bad.append(name)
    for d in admissible_values(30):
        S = enumerate_S(d)
        for tl in S:
            n += 1
            if not m_transform(m_transform(tl, d), d).lattice.same_as(tl.lattice):
                bad.append((d, tl.int_gram()))
        if len(S) != len(enumerate_R(d)):
            bad.append(("count", d))
    return not bad, f"{n} lattices, failing {bad}"


@checked(10)
def test_criterion_10_principal_different():
    bad, n = [], 0
    for name in preset_names():
        n += 1
        if not theorem25_report(load_preset(name).order).agree:
            bad.append(name)
    non_principal_37 = None
    for d in admissible_values(37):
        for idx, tl in enumerate(enumerate_S(d)):
            o = order_from_ternary(m_transform(tl, d), d)
            rep = theorem25_report(o)
            n += 1
            if not rep.agree or rep.principal_different != represents_one(tl):
                bad.append((d, idx))
            if d == 37 and not represents_one(tl):
                non_principal_37 = not rep.principal_different
    ok = not bad and non_principal_37 is True
    return ok, f"{n} orders, failing {bad}, d = 37 non-principal: {non_principal_37}"


@checked(11)
def test_criterion_11_property_suites():
    res = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", str(HERE / "test_properties.py")],
        capture_output=True, text=True, cwd=HERE.parent,
    )
    tail = res.stdout.strip().splitlines()[-1] if res.stdout.strip() else res.stderr[-200:]
    return res.returncode == 0 and RANDOM_LATTICE_CASES >= 100, tail


if __name__ == "__main__":
    failed = 0
    for n, fn in sorted((int(k.split("_")[2]), v) for k, v in dict(globals()).items()
                        if k.startswith("test_criterion_")):
        try:
            fn()
        except Exception:
            failed += 1
    sys.exit(1 if failed else 0)
