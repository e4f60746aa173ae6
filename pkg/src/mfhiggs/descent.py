"""p-curvature, conjugate filtration, Cartier descent and exponential twisting.

All objects here live modulo p.  A mod-p connection is given by its matrices
``A_l`` in the convention ``nabla v = dv + sum_l A_l v dt_l``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import factorial

from . import linalg as la
from .associate import associate_subsheaf, phi_tilde
from .errors import (
    DegreeBoundExceeded,
    DescentFailure,
    InvalidInput,
    MissingLifting,
    NilpotencyTooDeep,
    NotHorizontal,
    NotPCurvatureZero,
    UnsupportedDimension,
)
from .glue import GluedObject
from .mfdata import FilteredDeRhamChart, FrobeniusLifting, HiggsChart, gr_fil, require_valid
from .report import ValidationReport
from .poly import RingElement, _mul_dicts
from .submodule import Submodule, line_degree


def _mod_p_matrices(conn):
    if isinstance(conn, FilteredDeRhamChart):
        return conn.mod_p_connection()
    out = []
    for M in conn:
        out.append(la.matmap(lambda x: x.mod_p() if x.ring.m > 1 else x, M))
    return tuple(out)


def apply_nabla(A, l, v):
    return la.vadd([x.partial(l) for x in v], la.matvec(A[l], v))


@dataclass
class PCurvature:
    ring: object
    A: tuple
    psi: tuple

    def apply(self, l, v):
        return la.matvec(self.psi[l], v)

    def is_zero(self):
        return all(la.is_zero(M) for M in self.psi)

    def linearity_holds(self, f, v, l=0):
        """psi(f v) == f psi(v), computed by iterating nabla p times on f v."""
        w = [f * x for x in v]
        for _ in range(self.ring.p):
            w = apply_nabla(self.A, l, w)
        return w == la.vscale(f, self.apply(l, v))

    def commute(self):
        return all(la.equal(la.mul(a, b), la.mul(b, a)) for a in self.psi for b in self.psi)

    def nilpotent(self, k):
        """psi^k == 0 for every psi_l and all products of length k."""
        ring = self.ring
        r = len(self.A[0])
        for word in product(range(len(self.psi)), repeat=k):
            M = la.identity(ring, r)
            for l in word:
                M = la.mul(self.psi[l], M)
            if not la.is_zero(M):
                return False
        return True


def p_curvature(conn):
    """The p-th iterates of nabla along each coordinate vector field."""
    A = _mod_p_matrices(conn)
    ring = A[0][0][0].ring
    r = len(A[0])
    psi = []
    for l in range(ring.dim):
        N = la.identity(ring, r)
        for _ in range(ring.p):
            N = la.add(la.matmap(lambda x: x.partial(l), N), la.mul(A[l], N))
        psi.append(N)
    return PCurvature(ring, A, tuple(psi))


# ---------------------------------------------------------------------------
# conjugate filtration

@dataclass
class ConjugateFiltration:
    steps: list
    horizontal: list = field(default_factory=list)

    def __getitem__(self, q):
        if q >= len(self.steps):
            return self.steps[-1]
        return self.steps[q]

    def ranks(self):
        return [s.rank for s in self.steps]


def is_horizontal(chart, W):
    A0 = chart.mod_p_connection()
    for w in W.basis():
        for l in range(len(A0)):
            if not W.contains(apply_nabla(A0, l, w)):
                return False
    return True


def conjugate_filtration(chart):
    """F_con^q spanned by the Phi~ columns of level at most n - q, q = 0..n+1."""
    pt = phi_tilde(chart)
    steps = []
    for q in range(chart.n + 2):
        cols = [la.column(pt.matrix, a) for a in range(chart.rank) if chart.fil[a] <= chart.n - q]
        steps.append(Submodule(chart.ring, chart.rank, cols))
    return ConjugateFiltration(steps, [is_horizontal(chart, s) for s in steps])


def filtration_identity(chart, G):
    """S(G^{<=i}) == S(G) cap F_con^{n-i} for each i; returns the list of verdicts."""
    fcon = conjugate_filtration(chart)
    S = associate_subsheaf(chart, G).S
    out = []
    for i in range(chart.n + 1):
        Gi = G.level_truncation(chart.fil, i)
        Si = associate_subsheaf(chart, Gi).S
        out.append(Si.equals(S.intersect(fcon[chart.n - i])))
    return out


# ---------------------------------------------------------------------------
# Cartier descent of flat modules

def _nullspace_mod_p(rows, ncols, p):
    """Basis of the F_p-nullspace of a matrix given as dict rows {col: value}."""
    pivots = {}
    reduced = []
    for row in rows:
        row = {c: v % p for c, v in row.items() if v % p}
        for pc, prow in reduced:
            if pc in row:
                f = row[pc]
                for c, v in prow.items():
                    row[c] = (row.get(c, 0) - f * v) % p
                row = {c: v for c, v in row.items() if v}
        if not row:
            continue
        pc = min(row)
        inv = pow(row[pc], -1, p)
        row = {c: v * inv % p for c, v in row.items()}
        for k, (qc, qrow) in enumerate(reduced):
            if pc in qrow:
                f = qrow[pc]
                for c, v in row.items():
                    qrow[c] = (qrow.get(c, 0) - f * v) % p
                reduced[k] = (qc, {c: v for c, v in qrow.items() if v})
        reduced.append((pc, row))
        pivots[pc] = row
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = {fc: 1}
        for pc, prow in reduced:
            if fc in prow:
                vec[pc] = (-prow[fc]) % p
        basis.append(vec)
    return basis


def _common_numerators(vectors, ring):
    """Multiply every entry by one unit so that all become polynomials; return dicts."""
    shift = 0
    dens = [0] * len(ring.denominators)
    for v in vectors:
        for x in v:
            for e in x.num:
                shift = max(shift, -e[0])
            dens = [max(a, b) for a, b in zip(dens, x.den)]
    out = []
    for v in vectors:
        row = []
        for x in v:
            num = {}
            for (e,), c in x.num.items():
                num[(e + shift,)] = c
            poly = {(0,): 1}
            for k, b in enumerate(dens):
                extra = b - x.den[k]
                if extra:
                    poly = _mul_dicts(poly, ring._den_pow(k, extra), ring.q)
            row.append(_mul_dicts(num, poly, ring.q))
        out.append(row)
    return out


def _split_frobenius(x):
    """x = sum_{c<p} t^c * F(y_c); returns the list of y_c."""
    r = x.ring
    p = r.p
    num = dict(x.num)
    den = list(x.den)
    for k, b in enumerate(den):
        if b % p:
            extra = p - b % p
            num = _mul_dicts(num, r._den_pow(k, extra), r.q)
            den[k] = b + extra
    parts = [dict() for _ in range(p)]
    for (e,), c in num.items():
        parts[e % p][((e - e % p) // p,)] = c
    return [RingElement(r, part, tuple(b // p for b in den), _check=False) for part in parts]


def _join_frobenius(parts):
    r = parts[0].ring
    out = r.zero
    for c, y in enumerate(parts):
        if not y.is_zero():
            out = out + r.monomial((c,)) * y.frobenius()
    return out


@dataclass
class FlatDescent:
    basis: list          # basis of W used for coordinates
    flat: list           # flat sections, in ambient coordinates
    coordinates: list    # flat sections in the W basis
    degree_bound: int

    def roots(self):
        """Frobenius roots of the flat sections when their entries are p-th powers."""
        return [[x.frobenius_root() for x in v] for v in self.flat]


def _max_degree(vectors):
    d = 0
    for v in vectors:
        for x in v:
            for (e,) in x.num:
                d = max(d, abs(e))
            d = max(d, sum(b * (len(dd) - 1) for b, dd in zip(x.den, x.ring.denominators)))
    return d


def cartier_descend_flat(A, W, degree_bound=None):
    """Flat sections generating W over the ring, for a connection with zero p-curvature.

    ``A`` holds the ambient mod-p connection matrices and ``W`` is a
    horizontal submodule.  The flat sections are searched among vectors whose
    W-coordinates are ``N / Q`` with ``Q = t^D * prod d_k^D`` (over the
    inverted factors) and ``deg N <= deg Q + D``.
    """
    A = _mod_p_matrices(A)
    ring = W.ring
    if ring.dim != 1:
        raise UnsupportedDimension("Cartier descent is implemented on one-variable charts")
    basis = W.basis()
    r = len(basis)
    if r == 0:
        return FlatDescent([], [], [], 0)
    # connection on W in its basis
    cols = []
    Wsub = Submodule(ring, W.ambient_rank, basis)
    for w in basis:
        ok, coeffs = Wsub.membership(apply_nabla(A, 0, w))
        if not ok:
            raise NotHorizontal("W is not stable under the connection")
        cols.append(coeffs)
    AW = la.from_columns(cols)
    if not p_curvature((AW,)).is_zero():
        raise NotPCurvatureZero("p-curvature of the connection on W does not vanish")
    D = degree_bound if degree_bound is not None else _max_degree(basis + AW) + ring.p
    p = ring.p
    lo = -D if ring.inverted[0] else 0
    qdeg = D * sum(len(d) - 1 for d in ring.denominators)
    hi = qdeg + D
    Qinv = ring.one
    for k in range(len(ring.denominators)):
        Qinv = Qinv * ring._den_element(k)
    Qinv = Qinv.inverse() ** D if ring.denominators else ring.one
    monos = [(a, e) for a in range(r) for e in range(lo, hi + 1)]
    images = []
    for a, e in monos:
        y = [ring.zero] * r
        y[a] = ring.monomial((e,)) * Qinv
        images.append(apply_nabla((AW,), 0, y))
    nums = _common_numerators(images, ring)
    # equations: one per (row, exponent)
    eqs = {}
    for j, img in enumerate(nums):
        for b, poly in enumerate(img):
            for ex, c in poly.items():
                eqs.setdefault((b, ex), {})[j] = c
    null = _nullspace_mod_p(list(eqs.values()), len(monos), p)
    sols = []
    for vec in null:
        y = [ring.zero] * r
        for j, c in vec.items():
            a, e = monos[j]
            y[a] = y[a] + ring.monomial((e,), c) * Qinv
        sols.append(y)
    if not sols:
        raise DegreeBoundExceeded(f"no flat sections found with degree bound {D}; raise the bound")
    # the flat sections form a module over the p-th power ring: reduce there
    split = [[part for x in y for part in _split_frobenius(x)] for y in sols]
    red = Submodule(ring, r * p, split).basis()
    coords = []
    for vec in red:
        coords.append([_join_frobenius(vec[a * p:(a + 1) * p]) for a in range(r)])
    if len(coords) != r:
        raise DegreeBoundExceeded(f"found {len(coords)} independent flat sections, need {r}; raise the bound")
    d = la.det(la.from_columns(coords))
    if d.is_zero() or not d.is_unit():
        raise DegreeBoundExceeded(f"flat sections found with bound {D} do not generate; raise the bound")
    flat = []
    for y in coords:
        v = [ring.zero] * W.ambient_rank
        for c, w in zip(y, basis):
            v = la.vadd(v, la.vscale(c, w))
        flat.append(v)
    return FlatDescent(basis, flat, coords, D)


def cartier_katz_descent(chart, W, degree_bound=None):
    """The Higgs subsheaf of E_0 whose associated subsheaf is the horizontal W."""
    require_valid(chart)
    if chart.ring.dim != 1:
        raise UnsupportedDimension("descent is implemented on one-variable charts")
    if not is_horizontal(chart, W):
        raise NotHorizontal("W is not stable under the connection")
    ring0 = W.ring
    n, rank = chart.n, chart.rank
    pt = phi_tilde(chart)
    inv = pt.inverse_matrix()
    fcon = conjugate_filtration(chart)
    gens = []
    for q in range(n + 1):
        level = n - q
        piece = W.intersect(fcon[q])
        for w in piece.basis():
            x = la.matvec(inv, w)
            gens.append([c if chart.fil[a] == level else ring0.zero for a, c in enumerate(x)])
    V = Submodule(ring0, rank, gens)
    zero = (la.zeros(ring0, rank),)
    try:
        desc = cartier_descend_flat(zero, V, degree_bound)
    except NotHorizontal as exc:
        raise DescentFailure(f"graded pieces are not stable under the canonical connection: {exc}") from None
    try:
        roots = desc.roots()
    except ValueError as exc:
        raise DescentFailure(str(exc)) from None
    G = Submodule(ring0, rank, roots)
    if not G.is_theta_stable(gr_fil(chart).theta):
        raise DescentFailure("descended module is not stable under the Higgs field")
    return G


def roundtrip_check(chart, G):
    """Associate then descend; the result must be G again."""
    rep = ValidationReport()
    sub = G.is_subsystem_of_hodge(chart.fil)
    rep.add("subsystem_of_hodge", sub)
    if not sub:
        return rep, None
    S = associate_subsheaf(chart, G).S
    back = cartier_katz_descent(chart, S)
    same = back.equals(G)
    rep.add("roundtrip", same, None if same else {"descended": back.render(), "expected": G.render()})
    rep.add("theta_agreement", back.is_theta_stable(gr_fil(chart).theta))
    return rep, back


# ---------------------------------------------------------------------------
# exponential twisting

def _higgs_charts(higgs):
    if isinstance(higgs, HiggsChart):
        return GluedObject({higgs.name or "U": higgs}, [])
    if isinstance(higgs, GluedObject):
        return higgs
    raise InvalidInput("expected a Higgs chart or a glued Higgs object")


def _nilpotency(theta, p):
    ring = theta[0][0][0].ring
    r = len(theta[0])
    for word in product(range(len(theta)), repeat=p - 1):
        M = la.identity(ring, r)
        for l in word:
            M = la.mul(theta[l], M)
        if not la.is_zero(M):
            return False
    return True


def truncated_exp(X, ring):
    """sum_{k<p} X^k / k! for a matrix with X^(p-1) = 0."""
    p = ring.p
    r = len(X)
    out = la.identity(ring, r)
    term = la.identity(ring, r)
    for k in range(1, p):
        term = la.mul(term, X)
        if la.is_zero(term):
            break
        out = la.add(out, la.scale(ring.const(pow(factorial(k), -1, p)), term))
    return out


@dataclass
class TwistedBundle:
    glued: object
    liftings: dict
    connections: dict
    transitions: list
    checks: ValidationReport


def _lifting_for(cid, chart, liftings):
    if cid not in liftings:
        raise MissingLifting(f"no Frobenius lifting given for chart {cid!r}")
    L = liftings[cid]
    if isinstance(L, FrobeniusLifting):
        return L.check()
    ring2 = chart.ring.with_precision(2)
    return FrobeniusLifting(ring2, L).check()


def inverse_cartier_exponential_twisting(higgs, liftings):
    """Flat bundle F*E with nabla_can + (dF/p) F*theta, glued by exponential twists."""
    glued = _higgs_charts(higgs)
    if isinstance(liftings, (list, tuple, str, FrobeniusLifting)):
        liftings = {cid: liftings for cid in glued.charts}
    lifts, conns = {}, {}
    for cid, h in glued.charts.items():
        p = h.ring.p
        if not _nilpotency(h.theta, p):
            raise NilpotencyTooDeep(f"theta^{p - 1} does not vanish on chart {cid!r}")
        F = _lifting_for(cid, h, liftings)
        lifts[cid] = F
        f = F.derivative_over_p()
        r0 = h.ring
        ft = [la.matmap(lambda x: x.frobenius(), T) for T in h.theta]
        A = []
        for k in range(r0.dim):
            M = la.zeros(r0, h.rank)
            for l in range(r0.dim):
                M = la.add(M, la.scale(f[l][k].restrict(r0) if f[l][k].ring != r0 else f[l][k], ft[l]))
            A.append(M)
        conns[cid] = tuple(A)
    rep = ValidationReport()
    for cid, A in conns.items():
        ok = True
        for k in range(len(A)):
            for l in range(k + 1, len(A)):
                curv = la.add(la.sub(la.matmap(lambda x: x.partial(k), A[l]),
                                     la.matmap(lambda x: x.partial(l), A[k])),
                              la.sub(la.mul(A[k], A[l]), la.mul(A[l], A[k])))
                ok = ok and la.is_zero(curv)
        rep.add(f"integrability[{cid}]", ok)
        rep.add(f"p_curvature_nilpotent[{cid}]", p_curvature(A).nilpotent(len(A[0])))
    transitions = []
    for ov in glued.overlaps:
        u, v = ov.charts
        ring0 = ov.ring.mod_p()
        hu = glued.charts[u]
        Fu = glued.lifting_on_overlap(u, ov, lifts[u]).images[0]
        Fv = glued.lifting_on_overlap(v, ov, lifts[v]).images[0]
        h = (Fu - Fv).exact_div_pow(1).mod_p()
        theta_u = glued.connection_on_overlap(u, ov, hu.theta)
        X = la.scale(h, la.matmap(lambda x: x.frobenius(), theta_u))
        M = la.matmap(lambda x: x.mod_p().frobenius(), ov.transition)
        T = la.mul(M, truncated_exp(X, ring0))
        Au = glued.connection_on_overlap(u, ov, conns[u])
        Av = glued.connection_on_overlap(v, ov, conns[v])
        lhs = la.mul(T, Au)
        rhs = la.add(la.matmap(lambda x: x.partial(0), T), la.mul(Av, T))
        rep.add(f"transition_compatible[{u}|{v}]", la.equal(lhs, rhs))
        transitions.append({"charts": (u, v), "h": h, "exponent": X, "matrix": T,
                            "base": M})
    return TwistedBundle(glued, lifts, conns, transitions, rep)


def determinant_formula_check(higgs, liftings):
    """det of the twisted transition equals F#(det M); degrees multiply by p."""
    glued = _higgs_charts(higgs)
    if glued.cover != "projective-line":
        raise InvalidInput("the determinant formula is checked on projective-line covers")
    tw = inverse_cartier_exponential_twisting(glued, liftings)
    tr = tw.transitions[0]
    p = glued.overlaps[0].ring.p
    det_twisted = la.det(tr["matrix"])
    det_base = la.det(la.matmap(lambda x: x.mod_p(), glued.overlaps[0].transition))
    rep = ValidationReport()
    same = det_twisted == det_base.frobenius()
    rep.add("det_twisted_equals_frobenius_det", same,
            None if same else {"twisted": det_twisted.render(), "expected": det_base.frobenius().render()})
    deg_g = line_degree(det_base)
    deg_c = line_degree(det_twisted)
    rep.add("degree_multiplies_by_p", deg_c == p * deg_g, {"deg_G": deg_g, "deg_twisted": deg_c})
    for c in tw.checks:
        rep.checks.append(c)
    rank = glued.rank
    return rep, {"deg_det_G": deg_g, "deg_det_twisted": deg_c, "p": p,
                 "slope_G": str(Fraction(deg_g, rank)), "slope_twisted": str(Fraction(deg_c, rank))}
