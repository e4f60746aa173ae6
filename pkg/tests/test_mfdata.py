import random
from fractions import Fraction
from itertools import product
from math import factorial

import pytest

from conftest import fixture_path
from mfhiggs import linalg as la
from mfhiggs.cli import random_lifting
from mfhiggs.errors import IncompatibleRings, InvalidLifting, WeightOverflow
from mfhiggs.fixture import load
from mfhiggs.mfdata import (
    FilteredDeRhamChart,
    FrobeniusLifting,
    build_sum,
    build_sym2,
    build_tensor,
    gr_fil,
    restrict,
    transport_frobenius,
    validate,
)
from mfhiggs.poly import ChartRing

MF_FIXTURES = ["unit_root", "tate", "kummer_p5", "kummer_p7", "sym2_p5", "dim2",
               "kummer_cover_p5", "kummer_sum_p5", "kummer_tensor_p5"]


def mat(ring, rows):
    return [[ring.coerce(x) for x in row] for row in rows]


def kummer(m=2, p=5):
    r = ChartRing(p, m, ("t",), ("t",))
    return FilteredDeRhamChart(r, (0, 1), [["0", "t^-1"], ["0", "0"]], [f"t^{p}"],
                               [["1", "0"], ["0", str(p)]])


def tate(m=3):
    r = ChartRing(5, m, ("t",), ("t",))
    return FilteredDeRhamChart(r, (1,), [["0"]], ["t^5"], [["5"]])


def test_kummer_validates():
    rep = validate(kummer())
    assert rep.passed
    assert [c.check for c in rep] == ["frobenius_lifting", "griffiths_transversality", "integrability",
                                      "divisibility", "horizontality", "strong_divisibility"]


def test_identity_phi_breaks_divisibility_at_e1():
    rep = validate(kummer().replace(Phi=[["1", "0"], ["0", "1"]]))
    c = rep.get("divisibility")
    assert c.status == "fail" and c.witness["column"] == 1


def test_dim2_integrability_failure():
    r = ChartRing(5, 2, ("t1", "t2"))
    c = FilteredDeRhamChart(r, (0, 1), ([["0", "1"], ["0", "0"]], [["0", "t1"], ["0", "0"]]),
                            ["t1^5", "t2^5"], [["1", "0"], ["0", "5"]])
    rep = validate(c)
    assert rep.get("integrability").status == "fail"


def test_gr_fil_examples(sym2):
    h = gr_fil(kummer())
    r0 = h.ring
    assert h.theta[0] == mat(r0, [["0", "t^-1"], ["0", "0"]])
    assert la.is_zero(gr_fil(tate(2)).theta[0])
    hs = gr_fil(sym2)
    # basis e1^2, e1e0, e0^2
    assert hs.theta[0] == mat(hs.ring, [["0", "0", "0"], ["2*t^-1", "0", "0"], ["0", "t^-1", "0"]])


def test_transport_kummer():
    c = kummer()
    c2 = transport_frobenius(c, FrobeniusLifting(c.ring, ["t^5 + 5*t^6"]))
    assert c2.Phi == mat(c.ring, [["1", "5*t"], ["0", "5"]])
    assert validate(c2).passed
    assert transport_frobenius(c, c.F).Phi == c.Phi
    back = transport_frobenius(c2, c.F)
    assert back.Phi == c.Phi


def test_transport_rejects_non_congruent_lifting():
    c = kummer()
    with pytest.raises(InvalidLifting):
        transport_frobenius(c, FrobeniusLifting(c.ring, ["t^5 + t^6"]))


def naive_transport(chart, lifting, extra=6):
    """Taylor sum over every |j| <= n + m + extra with rational coefficients."""
    r = chart.ring
    q = r.q
    z = lifting.difference(chart.F)
    w = [x.exact_div_pow(1)._lift(r) for x in z]
    total = la.identity(r, chart.rank)
    bound = chart.n + r.m + extra
    for j in product(range(bound + 1), repeat=r.dim):
        J = sum(j)
        if J == 0 or J > bound:
            continue
        N = la.identity(r, chart.rank)
        for l, e in enumerate(j):
            for _ in range(e):
                N = chart.nabla(l, N)
        c = Fraction(r.p ** J)
        for e in j:
            c /= factorial(e)
        coeff = r.const(c.numerator * pow(c.denominator, -1, q))
        for l, e in enumerate(j):
            coeff = coeff * w[l] ** e
        total = la.add(total, la.scale(coeff, chart.F.pullback_matrix(N)))
    return la.mul(chart.Phi, total)


@pytest.mark.parametrize("name", ["kummer_p5", "sym2_p5", "dim2", "kummer_tensor_p5"])
def test_transport_truncation_matches_long_sum(name):
    c = load(fixture_path(name + ".json")).chart()
    rng = random.Random(1)
    for _ in range(3):
        F = random_lifting(rng, c.ring)
        assert transport_frobenius(c, F).Phi == naive_transport(c, F)


@pytest.mark.parametrize("name", MF_FIXTURES)
def test_random_transport_validates_and_keeps_grading(name):
    doc = load(fixture_path(name + ".json"))
    rng = random.Random(name)
    for c in doc.charts.values():
        h = gr_fil(c)
        for _ in range(50):
            c2 = transport_frobenius(c, random_lifting(rng, c.ring))
            assert validate(c2).passed
            assert gr_fil(c2).theta == h.theta


def test_transport_round_trip_random():
    c = kummer(3)
    rng = random.Random(7)
    for _ in range(10):
        F = random_lifting(rng, c.ring)
        G = random_lifting(rng, c.ring)
        there = transport_frobenius(transport_frobenius(c, F), G)
        assert there.Phi == transport_frobenius(c, G).Phi


def test_sum_and_tensor_with_tate():
    k, t = kummer(3), tate()
    s = build_sum(k, t)
    assert s.rank == 3 and validate(s).passed
    x = build_tensor(k, t)
    assert x.fil == (1, 2)
    assert x.Phi == mat(k.ring, [["5", "0"], ["0", "25"]])
    assert validate(x).passed
    with pytest.raises(IncompatibleRings):
        build_sum(kummer(2), tate(3))


def test_tensor_weight_overflow():
    c = kummer(3)
    with pytest.raises(WeightOverflow):
        build_tensor(build_tensor(c, c), build_tensor(c, c))


def test_sym2_data(sym2):
    r = sym2.ring
    assert sym2.fil == (2, 1, 0)
    assert sym2.Phi == mat(r, [["25", "0", "0"], ["0", "5", "0"], ["0", "0", "1"]])
    assert sym2.A[0] == mat(r, [["0", "0", "0"], ["2*t^-1", "0", "0"], ["0", "t^-1", "0"]])
    assert validate(build_sym2(kummer(3))).passed


def test_tensor_associative_on_rank_one():
    r = ChartRing(5, 3, ("t",), ("t",))
    # d + k dt/t needs Phi = t^(4k) for horizontality at p = 5
    a = FilteredDeRhamChart(r, (0,), [["t^-1"]], ["t^5"], [["t^4"]])
    b = FilteredDeRhamChart(r, (1,), [["0"]], ["t^5"], [["5"]])
    c = FilteredDeRhamChart(r, (0,), [["2*t^-1"]], ["t^5"], [["t^8"]])
    for x in (a, b, c):
        assert validate(x).passed, [y.check for y in validate(x) if not y.ok]
    left = build_tensor(build_tensor(a, b), c)
    right = build_tensor(a, build_tensor(b, c))
    assert left.A == right.A and left.Phi == right.Phi and left.fil == right.fil


def test_restrict():
    c = kummer()
    finer = c.ring.localize(denominators=("t - 1",))
    c2 = restrict(c, finer)
    assert validate(c2).passed
    finest = finer.localize(denominators=("t + 1",))
    assert restrict(c2, finest).Phi == restrict(c, finest).Phi
    with pytest.raises(IncompatibleRings):
        restrict(c, ChartRing(7, 2, ("t",), ("t",)))
