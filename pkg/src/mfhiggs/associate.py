"""The de Rham subsheaf associated to a theta-stable Higgs subsheaf.

For a chart of weight n, ``Phi/[p^i]`` divides the level-i columns of the
Frobenius matrix by p^i and reduces mod p.  Summed over the levels these give
``Phi~``, an isomorphism from the Frobenius pullback of the graded module to
the de Rham module mod p.  The associated subsheaf of G is ``Phi~(F*G)``.

Frobenius pullback of mod-p data is the substitution t -> t^p.
"""

from dataclasses import dataclass, field
from itertools import product

from . import linalg as la
from .errors import (
    GluingMismatch,
    HorizontalityViolation,
    PrecisionTooLow,
    StrongDivisibilityFailure,
    ThetaUnstable,
    UnsupportedDimension,
)
from .mfdata import FrobeniusLifting, gr_fil, require_valid, transport_frobenius
from .padic import factorial_inverse
from .submodule import Submodule


def frob_vec(v):
    return [x.frobenius() for x in v]


def phi_div(chart, i):
    """Phi/[p^i] on the level-i columns, reduced mod p; other columns are zero."""
    r = chart.ring
    if i >= r.m:
        raise PrecisionTooLow(f"dividing by p^{i} needs precision > {i}, ring has {r.m}")
    r0 = r.mod_p()
    out = la.zeros(r0, chart.rank)
    for a in chart.level_indices(i):
        for b in range(chart.rank):
            out[b][a] = chart.Phi[b][a].exact_div_pow(i).mod_p()
    return out


@dataclass
class PhiTilde:
    chart: object
    matrix: list
    det_inverse: object

    def apply(self, v):
        """Phi~ applied to the Frobenius pullback of a vector of E_0."""
        return la.matvec(self.matrix, frob_vec(v))

    def inverse_matrix(self):
        return la.scale(self.det_inverse, la.adjugate(self.matrix))


def phi_tilde(chart):
    require_valid(chart)
    M = la.zeros(chart.ring.mod_p(), chart.rank)
    for i in range(chart.n + 1):
        M = la.add(M, phi_div(chart, i))
    d = la.det(M)
    if d.is_zero() or not d.is_unit():
        raise StrongDivisibilityFailure(f"det Phi~ = {d.render()} is not a unit")
    return PhiTilde(chart, M, d.inverse())


@dataclass
class AssociationCertificate:
    G: Submodule
    S: Submodule
    lifting: FrobeniusLifting
    horizontality: list = field(default_factory=list)
    stability: list = field(default_factory=list)
    independence: dict = None

    def verify(self):
        """Re-check every stored membership witness."""
        for w in self.horizontality + self.stability:
            combo = [self.S.ring.zero] * self.S.ambient_rank
            for c, g in zip(w["coefficients"], self.S.generators):
                combo = [a + c * b for a, b in zip(combo, g)]
            if combo != w["image"]:
                return False
        return True


def _require_dim1(chart):
    if chart.ring.dim != 1:
        raise UnsupportedDimension("subsheaf computations need a one-variable chart")


def associated_module(chart, G, pt=None):
    pt = pt or phi_tilde(chart)
    return Submodule(chart.ring, chart.rank, [pt.apply(list(g)) for g in G.generators])


def associate_subsheaf(chart, G, compare=None, saturate=False):
    """S(G) = Phi~(F*G) with horizontality and, optionally, lifting-independence witnesses."""
    _require_dim1(chart)
    higgs = gr_fil(chart)
    if not G.is_theta_stable(higgs.theta):
        raise ThetaUnstable("G is not stable under the Higgs field")
    pt = phi_tilde(chart)
    S = associated_module(chart, G, pt)
    if saturate:
        S = S.saturate()
    cert = AssociationCertificate(G, S, chart.F)
    cert.horizontality = horizontality_certificate(chart, S, G, pt=pt, higgs=higgs)
    cert.stability = connection_stability(chart, S)
    if compare is not None:
        other = transport_frobenius(chart, compare)
        S2 = associated_module(other, G)
        if saturate:
            S2 = S2.saturate()
        cert.independence = {
            "lifting": other.F.render(),
            "equal": S.equals(S2),
            "normal_form": S.render(),
            "other_normal_form": S2.render(),
        }
    return cert


def horizontality_certificate(chart, S, G, pt=None, higgs=None):
    """Check nabla(Phi~ F*g) = sum_l Phi~ F*(theta_l g) * f_lk and membership in S.

    ``f_lk`` is (d F(t_l) / d t_k) / p mod p.  Raises HorizontalityViolation
    when the identity or the membership fails.
    """
    pt = pt or phi_tilde(chart)
    higgs = higgs or gr_fil(chart)
    r0 = pt.matrix[0][0].ring
    A0 = chart.mod_p_connection()
    f = chart.F.derivative_over_p()
    out = []
    for gi, g in enumerate(G.generators):
        g = list(g)
        v = pt.apply(g)
        for k in range(r0.dim):
            lhs = la.vadd([x.partial(k) for x in v], la.matvec(A0[k], v))
            rhs = [r0.zero] * len(v)
            for l in range(r0.dim):
                if f[l][k].is_zero():
                    continue
                rhs = la.vadd(rhs, la.vscale(f[l][k], pt.apply(higgs.apply(l, g))))
            if lhs != rhs:
                raise HorizontalityViolation(
                    f"generator {gi}: nabla side {[x.render() for x in lhs]} "
                    f"differs from Higgs side {[x.render() for x in rhs]}")
            ok, coeffs = S.membership(lhs) if S is not None else (True, None)
            if not ok:
                raise HorizontalityViolation(f"nabla of generator {gi} leaves S")
            out.append({"generator": gi, "variable": r0.vars[k], "image": lhs,
                        "coefficients": coeffs})
    return out


def connection_stability(chart, S):
    """Membership witnesses for nabla of each normal-form generator of S."""
    A0 = chart.mod_p_connection()
    out = []
    for si, s in enumerate(S.basis()):
        for k in range(len(A0)):
            img = la.vadd([x.partial(k) for x in s], la.matvec(A0[k], s))
            ok, coeffs = S.membership(img)
            if not ok:
                raise HorizontalityViolation(f"nabla of S-generator {si} leaves S")
            out.append({"generator": si, "variable": chart.ring.vars[k], "image": img,
                        "coefficients": coeffs})
    return out


# ---------------------------------------------------------------------------
# change of Frobenius lifting

def _as_lifting(chart, lifting):
    if isinstance(lifting, FrobeniusLifting):
        return lifting
    return FrobeniusLifting(chart.ring, lifting)


def _z_over_p(chart, other):
    """(F(t_l) - F'(t_l)) / p reduced mod p."""
    return [z.exact_div_pow(1).mod_p() for z in chart.F.difference(other.F)]


def _indices(dim, lo, hi):
    for j in product(range(hi + 1), repeat=dim):
        if lo <= sum(j) <= hi:
            yield j


def _coefficient(zp, j, p):
    c = zp[0].ring.const(factorial_inverse(j, p).value)
    for l, e in enumerate(j):
        if e:
            c = c * zp[l] ** e
    return c


def change_of_frobenius_residual(chart, e, lifting):
    """The Higgs-field correction between Phi~_F and Phi~_F' on a section e of E_0.

    Returns ``(difference, correction)`` where ``difference`` is
    ``Phi~_F(F*e) - Phi~_F'(F*e)`` and ``correction`` is
    ``sum_{1<=|j|<=n} Phi~_F'(F*(theta^j e)) (z/p)^j / j!`` with ``z = F - F'``.
    """
    return residuals(chart, lifting, [e])[0]


def residuals(chart, lifting, sections):
    """``change_of_frobenius_residual`` for many sections, transporting once."""
    lifting = _as_lifting(chart, lifting)
    other = transport_frobenius(chart, lifting)
    higgs = gr_fil(chart)
    r0 = chart.ring.mod_p()
    pt, pt2 = phi_tilde(chart), phi_tilde(other)
    zp = _z_over_p(chart, other)
    terms = []
    for j in _indices(r0.dim, 1, chart.n):
        terms.append((j, _coefficient(zp, j, r0.p)))
    out = []
    for e in sections:
        e = [r0.coerce(x) if not hasattr(x, "ring") else x for x in e]
        difference = la.vsub(pt.apply(e), pt2.apply(e))
        correction = [r0.zero] * chart.rank
        for j, c in terms:
            img = higgs.apply_multi(j, e)
            if la.is_zero_vec(img):
                continue
            correction = la.vadd(correction, la.vscale(c, pt2.apply(img)))
        out.append((difference, correction))
    return out


def per_level_residual(chart, e, i, lifting):
    """Single-level form: Phi/[p^i] difference against the truncated correction.

    ``e`` is supported on the level-i basis vectors.  Returns
    ``(difference, correction)`` which agree exactly.
    """
    lifting = _as_lifting(chart, lifting)
    other = transport_frobenius(chart, lifting)
    higgs = gr_fil(chart)
    r0 = chart.ring.mod_p()
    e = [r0.coerce(x) if not hasattr(x, "ring") else x for x in e]
    if any(not x.is_zero() and chart.fil[a] != i for a, x in enumerate(e)):
        raise ValueError(f"section is not supported on level {i}")
    fe = frob_vec(e)
    difference = la.vsub(la.matvec(phi_div(chart, i), fe), la.matvec(phi_div(other, i), fe))
    zp = _z_over_p(chart, other)
    correction = [r0.zero] * chart.rank
    for j in _indices(r0.dim, 1, i):
        img = higgs.apply_multi(j, e)
        if la.is_zero_vec(img):
            continue
        term = la.matvec(phi_div(other, i - sum(j)), frob_vec(img))
        correction = la.vadd(correction, la.vscale(_coefficient(zp, j, r0.p), term))
    return difference, correction


def lifting_independent(chart, G, lifting):
    """True when S(G) computed with F and with the lifting agree."""
    other = transport_frobenius(chart, _as_lifting(chart, lifting))
    return associated_module(chart, G).equals(associated_module(other, G))


# ---------------------------------------------------------------------------
# gluing

def glue_associated(glued, subs, saturate=False, override=None):
    """Compute S on every chart and compare across each overlap.

    ``subs`` maps chart ids to submodules of the graded module on that chart.
    ``override`` replaces the computed S on the named charts, which is how a
    corrupted input is fed in.  Returns a dict with the per-chart S and
    per-overlap comparisons; raises GluingMismatch on the first disagreement.
    """
    S = {}
    for cid, chart in glued.charts.items():
        S[cid] = associate_subsheaf(chart, subs[cid], saturate=saturate).S
    S.update(override or {})
    comparisons = []
    for ov in glued.overlaps:
        u, v = ov.charts
        ring0 = ov.ring.mod_p()
        T = la.matmap(lambda x: x.mod_p(), ov.transition)
        from_u = Submodule(ring0, S[u].ambient_rank,
                           [la.matvec(T, [glued.to_overlap(x, u, ov).mod_p() for x in g])
                            for g in S[u].basis()])
        from_v = Submodule(ring0, S[v].ambient_rank,
                           [[glued.to_overlap(x, v, ov).mod_p() for x in g] for g in S[v].basis()])
        same = from_u.equals(from_v)
        entry = {"overlap": [u, v], "equal": same,
                 "from_" + u: from_u.render(), "from_" + v: from_v.render()}
        comparisons.append(entry)
        if not same:
            raise GluingMismatch(f"associated subsheaves differ on the overlap of {u} and {v}",
                                 forms=entry)
    return {"S": S, "overlaps": comparisons}
