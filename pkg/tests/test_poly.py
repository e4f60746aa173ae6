import pytest
from hypothesis import given, strategies as st

from mfhiggs.errors import NegativeExponentOnUninverted, NonInvertibleImage, PolySyntaxError, ZeroElement
from mfhiggs.mfdata import FrobeniusLifting
from mfhiggs.poly import ChartRing

Z25 = ChartRing(5, 2, ("t",))
Z25L = ChartRing(5, 2, ("t",), ("t",))
Z25D = ChartRing(5, 2, ("t",), ("t",), ("t - 1",))
F5L = ChartRing(5, 1, ("t",), ("t",))
F5D = ChartRing(5, 1, ("t",), ("t",), ("t - 1",))


def test_parse_examples():
    x = Z25.parse("2*t^3 - 1")
    assert x.num == {(3,): 2, (0,): 24}
    with pytest.raises(NegativeExponentOnUninverted):
        Z25.parse("t^-1")
    assert Z25L.parse("t^-1") == Z25L.monomial((-1,))


def test_parse_error_reports_position():
    with pytest.raises(PolySyntaxError) as info:
        Z25.parse("3*t^ + 1")
    assert info.value.pos == 5


def test_partial_examples():
    assert Z25.parse("t^5").partial() == Z25.parse("5*t^4")
    assert Z25L.parse("t^-1").partial() == Z25L.parse("24*t^-2")
    assert Z25.const(7).partial().is_zero()


def test_substitute_examples():
    t5 = Z25L.parse("t^5")
    assert Z25L.parse("t^-1").substitute([t5]) == Z25L.parse("t^-5")
    assert Z25L.parse("t^-1").substitute([Z25L.parse("t^5 + 5*t^6")]) == Z25L.parse("t^-5 - 5*t^-4")
    assert Z25L.parse("t^2").substitute([t5]) == Z25L.parse("t^10")
    with pytest.raises(NonInvertibleImage):
        Z25L.parse("t^-1").substitute([Z25L.parse("t - 1")])


def test_unit_check_examples():
    ok, inv = F5L.parse("3*t^2").unit_check()
    assert ok and inv == F5L.parse("2*t^-2")
    assert not F5L.parse("t - 1").is_unit()
    assert F5D.parse("t - 1").is_unit()
    with pytest.raises(ZeroElement):
        F5L.zero.unit_check()


def test_ord_at_examples():
    f = F5L.parse("t^3 + t^4")
    assert f.ord_at("t") == 3
    assert f.ord_at("inf") == -4
    assert F5L.const(2).ord_at("t") == 0


def test_two_variable_ring():
    r = ChartRing(5, 2, ("t1", "t2"), ("t1",))
    x = r.parse("t1^-1*t2 + 3")
    assert x.partial(1) == r.parse("t1^-1")
    assert x.partial(0) == r.parse("-t1^-2*t2")
    assert r.parse("t1^-2").is_unit()
    assert not r.parse("t2").is_unit()


# -- properties ---------------------------------------------------------------

def laurent(ring, lo=-4, hi=6, den=0):
    terms = st.dictionaries(st.integers(lo, hi), st.integers(0, ring.q - 1), max_size=5)

    def build(d, k):
        x = ring.zero
        for e, c in d.items():
            x = x + ring.monomial((e,), c)
        if den and k:
            x = x * ring.parse("t - 1").inverse() ** k
        return x

    return st.builds(build, terms, st.integers(0, den))


elements = laurent(Z25D, den=2)
liftings = st.lists(st.integers(-3, 6), max_size=4).map(
    lambda es: FrobeniusLifting(Z25D, [Z25D.parse("t^5") + sum((Z25D.monomial((e,), 5) for e in es), Z25D.zero)]))


@given(elements)
def test_render_parse_round_trip(x):
    assert Z25D.parse(x.render()) == x


@given(elements, elements)
def test_leibniz(f, g):
    assert (f * g).partial() == f.partial() * g + f * g.partial()


@given(elements, elements, liftings)
def test_substitution_is_a_homomorphism(f, g, F):
    img = F.images
    assert (f * g).substitute(img) == f.substitute(img) * g.substitute(img)
    assert (f + g).substitute(img) == f.substitute(img) + g.substitute(img)


@given(elements, liftings)
def test_frobenius_congruence(f, F):
    assert F.check() is F
    assert F.pullback(f).mod_p() == f.mod_p().frobenius()


@given(laurent(F5D, den=2))
def test_unit_inverse_is_exact(f):
    if f.is_zero():
        return
    ok, inv = f.unit_check()
    if ok:
        assert f * inv == F5D.one


@given(laurent(Z25L), laurent(Z25L))
def test_ring_axioms(a, b):
    assert a + b == b + a
    assert a * b == b * a
    assert (a - b) + b == a


@given(laurent(F5L, lo=0, hi=8))
def test_frobenius_root_inverts_frobenius(f):
    assert f.frobenius().frobenius_root() == f
