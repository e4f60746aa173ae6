import random
from itertools import product

import pytest
from hypothesis import given, strategies as st

from mfhiggs.errors import AmbientMismatch, NotAUnit, UnsupportedDimension
from mfhiggs.poly import ChartRing
from mfhiggs.submodule import Submodule, line_degree

F5 = ChartRing(5, 1, ("t",))
F5L = ChartRing(5, 1, ("t",), ("t",))
F3 = ChartRing(3, 1, ("t",))
F3D = ChartRing(3, 1, ("t",), (), ("t - 1",))


def vec(ring, *xs):
    return [ring.coerce(x) for x in xs]


def sub(ring, *gens):
    r = len(gens[0]) if gens else 0
    return Submodule(ring, r, [vec(ring, *g) for g in gens])


def test_membership_examples():
    assert sub(F5, ("1", "0")).contains(vec(F5, "t", "0"))
    assert not sub(F5, ("t", "0")).contains(vec(F5, "1", "0"))


def test_membership_witness():
    M = sub(F5, ("t", "1"), ("1", "t^2"))
    v = vec(F5, "t^2 + 1", "t + t^2")
    ok, c = M.membership(v)
    assert ok
    combo = [c[0] * a + c[1] * b for a, b in zip(M.generators[0], M.generators[1])]
    assert combo == v


def test_intersection_example():
    M = sub(F5, ("1", "0"), ("0", "t"))
    N = sub(F5, ("0", "1"))
    assert M.intersect(N) == sub(F5, ("0", "t"))


def test_saturation_examples():
    assert sub(F5, ("t", "0")).saturate() == sub(F5, ("1", "0"))
    S = sub(F5, ("1", "t"))
    assert S.saturate() == S
    assert sub(F5, ("t", "t^2")).saturate() == sub(F5, ("1", "t"))


def test_graded_parts_examples():
    levels = (0, 1)
    G0 = sub(F5L, ("1", "0"))
    assert [p.rank for p in G0.graded_parts(levels)] == [1, 0]
    assert G0.is_subsystem_of_hodge(levels)
    mixed = sub(F5L, ("1", "1"))
    assert [p.rank for p in mixed.graded_parts(levels)] == [0, 0]
    assert not mixed.is_subsystem_of_hodge(levels)
    assert Submodule.ambient(F5L, 2).is_subsystem_of_hodge(levels)


def test_theta_stability_examples():
    theta = [vec(F5L, "0", "t^-1"), vec(F5L, "0", "0")]
    assert sub(F5L, ("1", "0")).is_theta_stable(theta)
    assert not sub(F5L, ("0", "1")).is_theta_stable(theta)
    assert Submodule.ambient(F5L, 2).is_theta_stable(theta)


def test_degree_examples():
    assert line_degree(F5L.parse("t^-1")) == 1
    assert line_degree(F5L.parse("t^-1").frobenius()) == 5
    assert line_degree(F5L.parse("3*t^2")) == -2
    with pytest.raises(NotAUnit):
        line_degree(F5L.parse("t + 1"))


def test_localized_ring_units_are_pivot_free():
    # in F_3[t, 1/(t-1)] the generator (t - 1) spans everything
    assert sub(F3D, ("t - 1",)) == Submodule.ambient(F3D, 1)


def test_errors():
    with pytest.raises(AmbientMismatch):
        sub(F5, ("1", "0")).sum(sub(F5, ("1",)))
    with pytest.raises(UnsupportedDimension):
        Submodule(ChartRing(5, 1, ("a", "b")), 1, [])


# -- randomized oracles ---------------------------------------------------------

def polys(ring, deg=2):
    return st.lists(st.integers(0, ring.p - 1), min_size=deg + 1, max_size=deg + 1).map(
        lambda cs: ring.from_dense(0, cs))


def modules(ring, rank, gens=2, deg=2):
    return st.lists(st.lists(polys(ring, deg), min_size=rank, max_size=rank), min_size=1, max_size=gens).map(
        lambda g: Submodule(ring, rank, g))


def all_polys(ring, deg):
    return [ring.from_dense(0, list(cs)) for cs in product(range(ring.p), repeat=deg + 1)]


SMALL = all_polys(F3, 1)


def brute_span(M):
    """All combinations with coefficients of degree <= 1 over F_3."""
    out = []
    for cs in product(SMALL, repeat=len(M.generators)):
        v = [F3.zero] * M.ambient_rank
        for c, g in zip(cs, M.generators):
            v = [a + c * b for a, b in zip(v, g)]
        out.append(v)
    return out


@given(modules(F3, 2), st.randoms(use_true_random=False))
def test_normal_form_is_canonical(M, rnd):
    gens = list(M.generators)
    rnd.shuffle(gens)
    # random elementary column operations keep the span
    if len(gens) > 1:
        c = F3.from_dense(0, [rnd.randrange(3), rnd.randrange(3)])
        gens[0] = tuple(a + c * b for a, b in zip(gens[0], gens[1]))
    N = Submodule(F3, 2, gens + [tuple(F3.zero for _ in range(2))])
    assert M.normal_form() == N.normal_form()


@given(modules(F3, 2), modules(F3, 2))
def test_membership_against_brute_force(M, N):
    S = M + N
    for v in brute_span(M)[:40]:
        ok, c = M.membership(v)
        assert ok
        combo = [F3.zero] * 2
        for x, g in zip(c, M.generators):
            combo = [a + x * b for a, b in zip(combo, g)]
        assert combo == v
        assert S.contains(v)


@given(modules(F3, 2, gens=2, deg=1), modules(F3, 2, gens=2, deg=1))
def test_intersection_against_brute_force(M, N):
    I = M.intersect(N)
    assert M.contains_module(I) and N.contains_module(I)
    for v in brute_span(M):
        if N.contains(v):
            assert I.contains(v)


@given(modules(F3, 3, gens=2), modules(F3, 3, gens=2))
def test_lattice_laws(M, N):
    assert (M + N).contains_module(M)
    assert M.intersect(M + N) == M
    assert M + M.intersect(N) == M
    assert M.intersect(N) == N.intersect(M)
    assert M + N == N + M


@given(modules(F3, 3, gens=2))
def test_saturation_properties(M):
    S = M.saturate()
    assert S.contains_module(M)
    assert S.rank == M.rank
    assert S.saturate() == S
    # every element of S becomes an element of M after clearing a scalar
    for g in S.basis():
        assert (M + Submodule(F3, 3, [g])).rank == M.rank


@given(st.integers(-6, 6), st.integers(-6, 6), st.integers(1, 4), st.integers(1, 4))
def test_degree_is_additive(a, b, c, d):
    g = F5L.monomial((a,), c)
    h = F5L.monomial((b,), d)
    assert line_degree(g * h) == line_degree(g) + line_degree(h)


def test_membership_random_rank3():
    rng = random.Random(3)
    for _ in range(20):
        gens = [[F3.from_dense(0, [rng.randrange(3) for _ in range(3)]) for _ in range(3)]
                for _ in range(2)]
        M = Submodule(F3, 3, gens)
        target = [F3.from_dense(0, [rng.randrange(3) for _ in range(4)]) for _ in range(3)]
        found = any(v == target for v in brute_span(M))
        if found:
            assert M.contains(target)
