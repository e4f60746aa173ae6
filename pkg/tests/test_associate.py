import random

import pytest

from conftest import fixture_path
from mfhiggs import linalg as la
from mfhiggs.associate import (
    associate_subsheaf,
    change_of_frobenius_residual,
    glue_associated,
    horizontality_certificate,
    lifting_independent,
    per_level_residual,
    phi_div,
    phi_tilde,
)
from mfhiggs.cli import random_lifting, random_section
from mfhiggs.corpus import kummer, tate
from mfhiggs.errors import GluingMismatch, StrongDivisibilityFailure, ThetaUnstable
from mfhiggs.fixture import load
from mfhiggs.mfdata import FrobeniusLifting, build_sum, build_tensor, gr_fil, transport_frobenius
from mfhiggs.submodule import Submodule

ALT = "t^5 + 5*t^6"


def vec(ring, *xs):
    return [ring.coerce(x) for x in xs]


def sub(ring, *gens):
    return Submodule(ring, len(gens[0]), [vec(ring, *g) for g in gens])


def test_phi_div_examples(kum5, sym2):
    r0 = kum5.ring.mod_p()
    assert phi_div(kum5, 1) == [vec(r0, "0", "0"), vec(r0, "0", "1")]
    assert phi_div(kum5, 0) == [vec(r0, "1", "0"), vec(r0, "0", "0")]
    assert phi_div(sym2, 2)[0][0] == sym2.ring.mod_p().one


def test_phi_div_is_well_defined(sym2):
    # F-images of Fil^(i+1) and of p*Fil^i vanish after dividing by p^i
    rng = random.Random(0)
    r = sym2.ring
    for i in range(sym2.n + 1):
        for _ in range(10):
            v = random_section(rng, r, sym2.rank)
            deeper = [x if sym2.fil[a] >= i + 1 else r.zero for a, x in enumerate(v)]
            scaled = [r.const(r.p) * x if sym2.fil[a] >= i else r.zero for a, x in enumerate(v)]
            for w in (deeper, scaled):
                img = la.matvec(sym2.Phi, [sym2.F.pullback(x) for x in w])
                assert all(x.exact_div_pow(i).mod_p().is_zero() for x in img)


def test_phi_tilde_examples(kum5):
    r0 = kum5.ring.mod_p()
    assert phi_tilde(kum5).matrix == la.identity(r0, 2)
    moved = transport_frobenius(kum5, FrobeniusLifting(kum5.ring, [ALT]))
    assert phi_tilde(moved).matrix == [vec(r0, "1", "t"), vec(r0, "0", "1")]
    unit = load(fixture_path("unit_root.json")).chart()
    assert phi_tilde(unit).matrix == [vec(unit.ring.mod_p(), "1")]


def test_phi_tilde_requires_strong_divisibility():
    bad = load(fixture_path("negative", "bad_strong_divisibility.json")).chart()
    with pytest.raises(StrongDivisibilityFailure):
        phi_tilde(bad)


def test_associate_examples(kum5):
    r0 = kum5.ring.mod_p()
    cert = associate_subsheaf(kum5, sub(r0, ("1", "0")))
    assert cert.S == sub(r0, ("1", "0"))
    assert cert.verify()
    assert associate_subsheaf(kum5, Submodule.ambient(r0, 2)).S == Submodule.ambient(r0, 2)
    with pytest.raises(ThetaUnstable):
        associate_subsheaf(kum5, sub(r0, ("0", "1")))


def test_residual_examples(kum5):
    r0 = kum5.ring.mod_p()
    diff, corr = change_of_frobenius_residual(kum5, vec(r0, "0", "1"), [ALT])
    assert diff == corr == vec(r0, "-t", "0")
    moved = transport_frobenius(kum5, FrobeniusLifting(kum5.ring, [ALT]))
    assert phi_tilde(moved).apply(vec(r0, "0", "1")) == vec(r0, "t", "1")
    diff, corr = change_of_frobenius_residual(kum5, vec(r0, "1", "0"), [ALT])
    assert la.is_zero_vec(diff) and la.is_zero_vec(corr)


def test_residual_vanishes_without_higgs_field():
    c = load(fixture_path("tate.json")).chart()
    rng = random.Random(2)
    for _ in range(5):
        e = random_section(rng, c.ring.mod_p(), 1)
        diff, corr = change_of_frobenius_residual(c, e, random_lifting(rng, c.ring))
        assert la.is_zero_vec(diff) and la.is_zero_vec(corr)


def test_horizontality_examples(kum5):
    r0 = kum5.ring.mod_p()
    E = Submodule.ambient(r0, 2)
    w = horizontality_certificate(kum5, E, E)
    assert w[1]["image"] == vec(r0, "t^-1", "0")
    moved = transport_frobenius(kum5, FrobeniusLifting(kum5.ring, [ALT]))
    S = associate_subsheaf(moved, E).S
    w = horizontality_certificate(moved, S, E)
    # Phi~' e1 = e1 + t e0 has nabla = (1 + t^-1) e0
    assert w[1]["image"] == vec(r0, "1 + t^-1", "0")


@pytest.mark.parametrize("name", ["kummer_p5", "kummer_p7", "sym2_p5", "dim2", "kummer_sum_p5",
                                  "kummer_tensor_p5", "tate", "unit_root"])
def test_residual_identity_random(name):
    doc = load(fixture_path(name + ".json"))
    c = doc.chart()
    rng = random.Random(name)
    r0 = c.ring.mod_p()
    for _ in range(8):
        F = random_lifting(rng, c.ring)
        e = random_section(rng, r0, c.rank, degree=4)
        diff, corr = change_of_frobenius_residual(c, e, F)
        assert diff == corr
        i = rng.randrange(c.n + 1)
        ei = [x if c.fil[a] == i else r0.zero for a, x in enumerate(e)]
        diff, corr = per_level_residual(c, ei, i, F)
        assert diff == corr


def stable_subs(doc):
    for name, per in doc.submodules.items():
        if doc.spaces.get(name) != "higgs":
            continue
        for cid, G in per.items():
            c = doc.charts[cid]
            if G.is_theta_stable(gr_fil(c).theta):
                yield name, cid, G


@pytest.mark.parametrize("name", ["kummer_p5", "kummer_p7", "sym2_p5", "kummer_sum_p5",
                                  "kummer_tensor_p5", "tate", "unit_root", "kummer_cover_p5"])
def test_lifting_independence_random(name):
    doc = load(fixture_path(name + ".json"))
    rng = random.Random(name)
    for _, cid, G in stable_subs(doc):
        c = doc.charts[cid]
        for _ in range(5):
            assert lifting_independent(c, G, random_lifting(rng, c.ring))


def test_glue_cover():
    doc = load(fixture_path("kummer_cover_p5.json"))
    subs = doc.submodule("G0")
    out = glue_associated(doc.glued, subs)
    assert all(e["equal"] for e in out["overlaps"])
    r0 = doc.chart("U").ring.mod_p()
    assert out["S"]["U"] == sub(r0, ("1", "0"))
    full = glue_associated(doc.glued, doc.submodule("E"))
    assert full["S"]["V"].rank == 2


def test_glue_corrupted_s():
    doc = load(fixture_path("kummer_cover_p5.json"))
    rv = doc.chart("V").ring.mod_p()
    with pytest.raises(GluingMismatch) as info:
        glue_associated(doc.glued, doc.submodule("G0"), override={"V": sub(rv, ("0", "1"))})
    assert info.value.forms["equal"] is False


def kron_vec(u, v):
    return [a * b for a in u for b in v]


def direct_sum(M, N):
    r = M.ambient_rank + N.ambient_rank
    z1, z2 = [M.ring.zero] * N.ambient_rank, [M.ring.zero] * M.ambient_rank
    return Submodule(M.ring, r, [list(g) + z1 for g in M.basis()] + [z2 + list(h) for h in N.basis()])


def test_functoriality_sum():
    k, t = kummer(5, 3), tate(5, 3, ("t",))
    s = build_sum(k, t)
    r0 = k.ring.mod_p()
    for G1 in (sub(r0, ("1", "0")), Submodule.ambient(r0, 2)):
        for G2 in (Submodule.ambient(r0, 1), Submodule.zero_module(r0, 1)):
            left = associate_subsheaf(s, direct_sum(G1, G2)).S
            right = direct_sum(associate_subsheaf(k, G1).S, associate_subsheaf(t, G2).S)
            assert left == right


def test_functoriality_tensor():
    k = kummer(5, 3)
    x = build_tensor(k, k)
    r0 = k.ring.mod_p()
    options = (sub(r0, ("1", "0")), Submodule.ambient(r0, 2))
    for G1 in options:
        for G2 in options:
            G = Submodule(r0, 4, [kron_vec(a, b) for a in G1.basis() for b in G2.basis()])
            left = associate_subsheaf(x, G).S
            S1, S2 = associate_subsheaf(k, G1).S, associate_subsheaf(k, G2).S
            right = Submodule(r0, 4, [kron_vec(a, b) for a in S1.basis() for b in S2.basis()])
            assert left == right


def test_saturate_option(kum5):
    r0 = kum5.ring.mod_p()
    G = sub(r0, ("t - 1", "0"))
    assert associate_subsheaf(kum5, G).S == sub(r0, ("t^5 - 1", "0"))
    assert associate_subsheaf(kum5, G, saturate=True).S == sub(r0, ("1", "0"))
