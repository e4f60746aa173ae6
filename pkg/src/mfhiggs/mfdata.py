"""Local objects of the Faltings category MF^nabla_[0,n] and mod-p Higgs data.

Conventions, fixed once for the whole package:

* A vector is the column of coordinates in the chart basis e_0..e_{r-1}.
* Connection: ``nabla(v) = dv + sum_l A_l v dt_l``, so column ``a`` of
  ``A_l`` holds the coordinates of ``nabla_{d/dt_l} e_a``.
* Frobenius: column ``a`` of ``Phi`` holds the coordinates of
  ``Phi(F^* e_a)``, and ``Phi(F^*(c e_a)) = F#(c) Phi(F^* e_a)``.
* ``fil[a]`` is the filtration level of e_a; Fil^i is spanned by the e_a
  with ``fil[a] >= i``.
"""

from dataclasses import dataclass

from . import linalg as la
from .errors import (
    IncompatibleRings,
    InvalidInput,
    InvalidLifting,
    NotDivisible,
    PrecisionTooLow,
    StrongDivisibilityFailure,
    WeightOverflow,
)
from .padic import taylor_coefficient
from .poly import ChartRing, RingElement
from .report import ERROR, ValidationReport


def _elem(ring, x):
    return ring.coerce(x)


def _matrix(ring, rows):
    return [[_elem(ring, x) for x in row] for row in rows]


class FrobeniusLifting:
    """Ring endomorphism t_l -> F(t_l) of a chart ring, congruent to t_l^p mod p."""

    def __init__(self, ring, images):
        if isinstance(images, (str, RingElement)):
            images = [images]
        images = [_elem(ring, x) for x in images]
        if len(images) != ring.dim:
            raise InvalidLifting(f"need {ring.dim} images, got {len(images)}")
        self.ring = ring
        self.images = tuple(images)
        self._cache = {}

    @classmethod
    def standard(cls, ring):
        return cls(ring, [ring.var(l) ** ring.p for l in range(ring.dim)])

    def __eq__(self, other):
        return isinstance(other, FrobeniusLifting) and self.ring == other.ring and self.images == other.images

    def __hash__(self):
        return hash((self.ring, self.images))

    def render(self):
        return [x.render() for x in self.images]

    def __repr__(self):
        return f"FrobeniusLifting({self.render()})"

    def congruence_failures(self):
        p = self.ring.p
        return [l for l, x in enumerate(self.images)
                if not (x - self.ring.var(l) ** p).mod_p().is_zero()]

    def unit_failures(self):
        """Inverted elements whose image is not a unit."""
        bad = []
        r = self.ring
        for l, inv in enumerate(r.inverted):
            if inv and not self.images[l].is_unit():
                bad.append(r.vars[l])
        for k, d in enumerate(r.denominators):
            val = r._den_element(k).substitute(self.images)
            if not val.is_unit():
                bad.append(r.render_dense(d))
        return bad

    def check(self):
        if self.ring.m < 2:
            raise InvalidLifting("Frobenius liftings need precision >= 2")
        bad = self.congruence_failures()
        if bad:
            raise InvalidLifting(f"F({self.ring.vars[bad[0]]}) is not congruent to {self.ring.vars[bad[0]]}^p mod p")
        bad = self.unit_failures()
        if bad:
            raise InvalidLifting(f"F maps the inverted element {bad[0]} to a non-unit")
        return self

    def pullback(self, f):
        hit = self._cache.get(f)
        if hit is None:
            hit = f.substitute(self.images)
            self._cache[f] = hit
        return hit

    def pullback_matrix(self, M):
        return la.matmap(self.pullback, M)

    def restrict(self, ring):
        return FrobeniusLifting(ring, [x.restrict(ring) for x in self.images])

    def difference(self, other):
        """z_l = F(t_l) - F'(t_l)."""
        return [a - b for a, b in zip(self.images, other.images)]

    def derivative_over_p(self):
        """Matrix f[l][k] = (d F(t_l) / d t_k) / p reduced mod p."""
        return [[x.partial(k).exact_div_pow(1).mod_p() for k in range(self.ring.dim)]
                for x in self.images]


@dataclass(eq=False)
class FilteredDeRhamChart:
    """The local quadruple (H, Fil, nabla, Phi_F) on a free module."""

    ring: ChartRing
    fil: tuple
    A: tuple
    F: FrobeniusLifting
    Phi: list
    n: int = None
    name: str = ""

    def __post_init__(self):
        r = self.ring
        self.fil = tuple(int(x) for x in self.fil)
        rank = len(self.fil)
        if self.n is None:
            self.n = max(self.fil) if self.fil else 0
        if not 0 <= self.n <= r.p - 2:
            raise WeightOverflow(f"weight n={self.n} must satisfy 0 <= n <= p-2 = {r.p - 2}")
        if any(not 0 <= x <= self.n for x in self.fil):
            raise InvalidInput(f"filtration levels {self.fil} must lie in [0, {self.n}]")
        if r.m < self.n + 1:
            raise PrecisionTooLow(f"precision m={r.m} must be at least n+1={self.n + 1}")
        if not isinstance(self.F, FrobeniusLifting):
            self.F = FrobeniusLifting(r, self.F)
        if self.F.ring != r:
            raise IncompatibleRings("lifting lives on a different ring")
        A = self.A
        if A and isinstance(A[0][0], (str, int, RingElement)):
            A = [A]
        self.A = tuple(_matrix(r, M) for M in A)
        if len(self.A) != r.dim:
            raise InvalidInput(f"need one connection matrix per variable ({r.dim})")
        self.Phi = _matrix(r, self.Phi)
        for M in self.A + (self.Phi,):
            if la.shape(M) != (rank, rank):
                raise InvalidInput(f"matrices must be {rank}x{rank}")

    @property
    def rank(self):
        return len(self.fil)

    @property
    def p(self):
        return self.ring.p

    def level_indices(self, i):
        return [a for a, f in enumerate(self.fil) if f == i]

    def nabla(self, l, X):
        """Apply nabla_{d/dt_l} to a matrix whose columns are sections."""
        return la.add(la.matmap(lambda x: x.partial(l), X), la.mul(self.A[l], X))

    def nabla_vec(self, l, v):
        return la.vadd([x.partial(l) for x in v], la.matvec(self.A[l], v))

    def pullback_connection(self, k):
        """Matrix of (F^*nabla)_{d/dt_k} on the basis e_a (x) 1."""
        r = self.ring
        out = la.zeros(r, self.rank)
        for l in range(r.dim):
            dF = self.F.images[l].partial(k)
            if dF.is_zero():
                continue
            out = la.add(out, la.scale(dF, self.F.pullback_matrix(self.A[l])))
        return out

    def mod_p_connection(self):
        return tuple(la.matmap(lambda x: x.mod_p(), M) for M in self.A)

    def replace(self, **kw):
        data = dict(ring=self.ring, fil=self.fil, A=self.A, F=self.F, Phi=self.Phi, n=self.n, name=self.name)
        data.update(kw)
        return FilteredDeRhamChart(**data)


def _entry_witness(label, M, i, j):
    return {"matrix": label, "entry": [i, j], "value": M[i][j].render()}


def validate(chart):
    """Check the lifting congruence and the five axioms; never raises on failure."""
    r = chart.ring
    rep = ValidationReport()
    rank = chart.rank

    bad = chart.F.congruence_failures()
    units = [] if bad else chart.F.unit_failures()
    if bad:
        rep.add("frobenius_lifting", False, {"variable": r.vars[bad[0]],
                                             "image": chart.F.images[bad[0]].render()})
    elif units:
        rep.add("frobenius_lifting", False, {"non_unit_image_of": units[0]})
    else:
        rep.add("frobenius_lifting", True)

    witness = None
    for l, M in enumerate(chart.A):
        for b in range(rank):
            for a in range(rank):
                if chart.fil[b] < chart.fil[a] - 1 and not M[b][a].is_zero():
                    witness = witness or _entry_witness(f"A_{l + 1}", M, b, a)
    rep.add("griffiths_transversality", witness is None, witness)

    witness = None
    for k in range(r.dim):
        for l in range(k + 1, r.dim):
            Ak, Al = chart.A[k], chart.A[l]
            curv = la.add(la.sub(la.matmap(lambda x: x.partial(k), Al),
                                 la.matmap(lambda x: x.partial(l), Ak)),
                          la.sub(la.mul(Ak, Al), la.mul(Al, Ak)))
            pos = la.first_difference(curv, la.zeros(r, rank))
            if pos and witness is None:
                witness = _entry_witness(f"curvature_{k + 1}{l + 1}", curv, *pos)
    rep.add("integrability", witness is None, witness)

    witness = None
    for a in range(rank):
        d = r.p ** chart.fil[a]
        for b in range(rank):
            if any(c % d for c in chart.Phi[b][a].num.values()):
                witness = witness or {"column": a, "row": b, "level": chart.fil[a],
                                      "value": chart.Phi[b][a].render()}
    divisible = witness is None
    rep.add("divisibility", divisible, witness)

    witness = None
    for k in range(r.dim):
        lhs = la.add(la.matmap(lambda x: x.partial(k), chart.Phi), la.mul(chart.A[k], chart.Phi))
        rhs = la.mul(chart.Phi, chart.pullback_connection(k))
        pos = la.first_difference(lhs, rhs)
        if pos and witness is None:
            i, j = pos
            witness = {"variable": r.vars[k], "entry": [i, j],
                       "lhs": lhs[i][j].render(), "rhs": rhs[i][j].render()}
    rep.add("horizontality", witness is None, witness)

    if not divisible:
        rep.add("strong_divisibility", False, "not evaluated: divisibility failed", status=ERROR)
    else:
        d = la.det(divided_frobenius(chart)).mod_p()
        ok = not d.is_zero() and d.is_unit()
        rep.add("strong_divisibility", ok, None if ok else {"det_phi_tilde": d.render()})
    return rep


def divided_frobenius(chart):
    """Phi with column a divided by p^fil(a), reduced mod p."""
    cols = []
    for a in range(chart.rank):
        cols.append([chart.Phi[b][a].exact_div_pow(chart.fil[a]).mod_p() for b in range(chart.rank)])
    return la.from_columns(cols)


def require_valid(chart):
    rep = validate(chart)
    if not rep.passed:
        failures = rep.failures()
        if failures == ["strong_divisibility"]:
            raise StrongDivisibilityFailure(f"chart {chart.name or ''}: det Phi~ is not a unit")
        raise InvalidInput(f"chart {chart.name or ''} fails validation: {failures}")
    return rep


@dataclass(eq=False)
class HiggsChart:
    """Graded Higgs data (E, theta) over a mod-p chart ring."""

    ring: ChartRing
    levels: tuple
    theta: tuple
    name: str = ""

    def __post_init__(self):
        self.levels = tuple(int(x) for x in self.levels)
        T = self.theta
        if T and isinstance(T[0][0], (str, int, RingElement)):
            T = [T]
        self.theta = tuple(_matrix(self.ring, M) for M in T)
        if len(self.theta) != self.ring.dim:
            raise InvalidInput("need one Higgs matrix per variable")

    @property
    def rank(self):
        return len(self.levels)

    def apply(self, l, v):
        return la.matvec(self.theta[l], v)

    def apply_multi(self, j, v):
        """theta^j (v) for a multi-index j."""
        for l, e in enumerate(j):
            for _ in range(e):
                v = self.apply(l, v)
        return v

    def level_part(self, v, i):
        z = self.ring.zero
        return [x if self.levels[a] == i else z for a, x in enumerate(v)]

    def validate(self):
        rep = ValidationReport()
        witness = None
        for l, M in enumerate(self.theta):
            for b in range(self.rank):
                for a in range(self.rank):
                    if not M[b][a].is_zero() and self.levels[b] != self.levels[a] - 1:
                        witness = witness or _entry_witness(f"theta_{l + 1}", M, b, a)
        rep.add("lowers_level_by_one", witness is None, witness)
        witness = None
        for k in range(len(self.theta)):
            for l in range(k + 1, len(self.theta)):
                pos = la.first_difference(la.mul(self.theta[k], self.theta[l]),
                                          la.mul(self.theta[l], self.theta[k]))
                if pos and witness is None:
                    witness = {"pair": [k + 1, l + 1], "entry": list(pos)}
        rep.add("theta_wedge_theta", witness is None, witness)
        return rep


def gr_fil(chart):
    """The associated graded Higgs bundle, reduced mod p."""
    require_valid(chart)
    r0 = chart.ring.mod_p()
    thetas = []
    for M in chart.A:
        T = la.zeros(r0, chart.rank)
        for b in range(chart.rank):
            for a in range(chart.rank):
                if chart.fil[b] == chart.fil[a] - 1:
                    T[b][a] = M[b][a].mod_p()
        thetas.append(T)
    return HiggsChart(r0, chart.fil, tuple(thetas), name=chart.name)


# ---------------------------------------------------------------------------
# Taylor transport between Frobenius liftings

def _multi_indices(dim, total):
    if dim == 1:
        yield (total,)
        return
    for a in range(total + 1):
        yield (a, total - a)


def taylor_indices(p, m, dim):
    """All multi-indices j != 0 whose term p^|j|/j! survives modulo p^m."""
    out = []
    J = 1
    # ord_p(J!) <= (J-1)/(p-1) bounds the shift from below by an increasing function of J
    while J - (J - 1) / (p - 1) < m:
        for j in _multi_indices(dim, J):
            if taylor_coefficient(j, p, m)[0] < m:
                out.append(j)
        J += 1
    return out


def nabla_iterates(chart, indices):
    """Coordinate matrices of nabla^j = nabla_1^{j_1} nabla_2^{j_2} for each j."""
    r = chart.ring
    cache = {(0,) * r.dim: la.identity(r, chart.rank)}

    def get(j):
        if j in cache:
            return cache[j]
        l = max(i for i, e in enumerate(j) if e)
        prev = list(j)
        prev[l] -= 1
        cache[j] = chart.nabla(l, get(tuple(prev)))
        return cache[j]

    return {j: get(j) for j in indices}


def transport_frobenius(chart, lifting):
    """The same (H, Fil, nabla) with the relative Frobenius for another lifting.

    ``Phi_{F'} = Phi_F o alpha`` with
    ``alpha(e (x) 1) = sum_j nabla^j(e) (x) z^j / j!`` and ``z = F' - F``.
    Terms whose coefficient p^|j|/j! vanishes modulo p^m are dropped.
    """
    r = chart.ring
    if not isinstance(lifting, FrobeniusLifting):
        lifting = FrobeniusLifting(r, lifting)
    if lifting.ring != r:
        raise IncompatibleRings("lifting lives on a different ring")
    lifting.check()
    if lifting == chart.F:
        return chart.replace(Phi=[list(row) for row in chart.Phi])
    z = lifting.difference(chart.F)
    try:
        w = [x.exact_div_pow(1)._lift(r) for x in z]
    except NotDivisible:
        raise InvalidLifting("liftings are not congruent mod p") from None
    indices = taylor_indices(r.p, r.m, r.dim)
    iterates = nabla_iterates(chart, indices)
    total = la.identity(r, chart.rank)
    for j in indices:
        shift, unit = taylor_coefficient(j, r.p, r.m)
        coeff = r.const(r.p ** shift * unit)
        for l, e in enumerate(j):
            if e:
                coeff = coeff * w[l] ** e
        if coeff.is_zero():
            continue
        total = la.add(total, la.scale(coeff, chart.F.pullback_matrix(iterates[j])))
    return chart.replace(F=lifting, Phi=la.mul(chart.Phi, total))


# ---------------------------------------------------------------------------
# builders

def _same_base(a, b):
    if a.ring != b.ring:
        raise IncompatibleRings("charts live on different rings")
    if a.F != b.F:
        raise IncompatibleRings("charts use different Frobenius liftings")


def build_sum(a, b, name=None):
    _same_base(a, b)
    r = a.ring
    return FilteredDeRhamChart(
        ring=r, fil=a.fil + b.fil,
        A=tuple(la.block_diag(x, y, r) for x, y in zip(a.A, b.A)),
        F=a.F, Phi=la.block_diag(a.Phi, b.Phi, r), n=max(a.n, b.n),
        name=name or f"({a.name}+{b.name})")


def _check_weight(r, n):
    if n > r.p - 2:
        raise WeightOverflow(f"weight {n} exceeds p-2 = {r.p - 2}")
    if r.m < n + 1:
        raise PrecisionTooLow(f"weight {n} needs precision >= {n + 1}, ring has {r.m}")


def build_tensor(a, b, name=None):
    """Tensor product; basis e_i (x) f_j sits at index i * rank(b) + j."""
    _same_base(a, b)
    r = a.ring
    n = a.n + b.n
    _check_weight(r, n)
    ia, ib = la.identity(r, a.rank), la.identity(r, b.rank)
    A = tuple(la.add(la.kron(x, ib), la.kron(ia, y)) for x, y in zip(a.A, b.A))
    fil = tuple(fa + fb for fa in a.fil for fb in b.fil)
    return FilteredDeRhamChart(ring=r, fil=fil, A=A, F=a.F, Phi=la.kron(a.Phi, b.Phi), n=n,
                               name=name or f"({a.name}*{b.name})")


def sym2_basis(rank):
    """Index pairs (i, j), i >= j, in descending order."""
    return [(i, j) for i in range(rank - 1, -1, -1) for j in range(i, -1, -1)]


def _sym_product(u, v, basis, ring):
    out = []
    for i, j in basis:
        if i == j:
            out.append(u[i] * v[i])
        else:
            out.append(u[i] * v[j] + u[j] * v[i])
    return out


def build_sym2(a, name=None):
    """Second symmetric power, on the quotient basis e_i e_j (i >= j)."""
    r = a.ring
    n = 2 * a.n
    _check_weight(r, n)
    basis = sym2_basis(a.rank)
    units = la.identity(r, a.rank)
    A = []
    for M in a.A:
        cols = []
        for i, j in basis:
            x = _sym_product(la.column(M, i), units[j], basis, r)
            y = _sym_product(units[i], la.column(M, j), basis, r)
            cols.append(la.vadd(x, y))
        A.append(la.from_columns(cols))
    cols = [_sym_product(la.column(a.Phi, i), la.column(a.Phi, j), basis, r) for i, j in basis]
    fil = tuple(a.fil[i] + a.fil[j] for i, j in basis)
    return FilteredDeRhamChart(ring=r, fil=fil, A=tuple(A), F=a.F, Phi=la.from_columns(cols), n=n,
                               name=name or f"Sym2({a.name})")


def restrict(chart, ring):
    """Restriction to a chart ring inverting more elements."""
    if not ring.contains_ring(chart.ring):
        raise IncompatibleRings(f"{chart.ring!r} does not embed in {ring!r}")
    f = lambda x: x.restrict(ring)
    return FilteredDeRhamChart(ring=ring, fil=chart.fil, A=tuple(la.matmap(f, M) for M in chart.A),
                               F=chart.F.restrict(ring), Phi=la.matmap(f, chart.Phi), n=chart.n,
                               name=chart.name)
