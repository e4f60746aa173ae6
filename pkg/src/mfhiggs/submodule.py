"""Finitely generated submodules of R^r for a one-variable mod-p chart ring R.

R = F_p[t][1/S] is a principal ideal domain.  Every nonzero element factors
as a unit times a monic polynomial coprime to S, and that polynomial plays the
role of a Euclidean norm.  Submodules are stored by generators (columns) and
compared through a column Hermite normal form:

* pivots sit in strictly increasing rows, entries above a pivot vanish;
* each pivot is a monic polynomial coprime to the inverted set;
* every entry in a pivot row to the left of the pivot is a polynomial of
  smaller degree than the pivot.

Two generator sets span the same submodule iff their normal forms coincide.
"""

from . import linalg as la
from .errors import AmbientMismatch, NotAUnit, NotDivisible, UnsupportedDimension, ZeroElement
from .poly import _ddivmod, _dmul, dense_gcdex


def _inv_mod(a, pi, p):
    g, x, _ = dense_gcdex(a, pi, p)
    if g != [1]:
        raise NotDivisible("element is not invertible modulo the pivot")
    return _ddivmod(x, pi, p)[1]


def residue(x, pi):
    """Canonical representative of x modulo the monic polynomial ``pi``.

    ``pi`` must be coprime to every inverted element.  The result is a
    polynomial of degree below ``deg pi``.
    """
    r = x.ring
    p = r.p
    if x.is_zero() or len(pi) == 1:
        return r.zero
    s, dense = x._dense()
    acc = _ddivmod(dense, pi, p)[1]
    if s > 0:
        acc = _ddivmod(_dmul(acc, [0] * s + [1], p), pi, p)[1]
    elif s < 0:
        tinv = _inv_mod([0, 1], pi, p)
        for _ in range(-s):
            acc = _ddivmod(_dmul(acc, tinv, p), pi, p)[1]
    for k, b in enumerate(x.den):
        if b:
            dinv = _inv_mod(r._dens[k], pi, p)
            for _ in range(b):
                acc = _ddivmod(_dmul(acc, dinv, p), pi, p)[1]
    return r.from_dense(0, acc)


def _norm(x):
    return len(x.unit_factorization()[1]) - 1


def _col_axpy(cols, j, q, i):
    """cols[j] -= q * cols[i]."""
    if q.is_zero():
        return
    cols[j] = [a - q * b for a, b in zip(cols[j], cols[i])]


def echelon(ring, columns, nrows):
    """Column Hermite form of the given columns with transform tracking.

    Returns ``(hnf, pivots, transform, kernel)``: ``hnf`` lists the nonzero
    normal-form columns, ``pivots`` their pivot rows, ``transform`` the
    coefficient vectors expressing each hnf column in the input columns, and
    ``kernel`` a basis of the relations among the input columns.
    """
    k = len(columns)
    one, zero = ring.one, ring.zero
    cols = []
    for j, c in enumerate(columns):
        if len(c) != nrows:
            raise AmbientMismatch(f"column of length {len(c)} in a rank-{nrows} module")
        cols.append(list(c) + [one if i == j else zero for i in range(k)])
    pivots, polys = [], []
    c = 0
    for i in range(nrows):
        if c == k:
            break
        while True:
            live = [j for j in range(c, k) if not cols[j][i].is_zero()]
            if len(live) <= 1:
                break
            best = min(live, key=lambda j: (_norm(cols[j][i]), j))
            b = cols[best][i]
            u, pi = b.unit_factorization()
            for j in live:
                if j == best:
                    continue
                e = cols[j][i]
                rem = residue(e, pi)
                _col_axpy(cols, j, (e - rem).divide(b), best)
        if not live:
            continue
        j = live[0]
        cols[c], cols[j] = cols[j], cols[c]
        u, pi = cols[c][i].unit_factorization()
        uinv = u.inverse()
        cols[c] = [uinv * x for x in cols[c]]
        piv = cols[c][i]
        for prev in range(c):
            e = cols[prev][i]
            if e.is_zero():
                continue
            rem = residue(e, pi)
            _col_axpy(cols, prev, (e - rem).divide(piv), c)
        pivots.append(i)
        polys.append(pi)
        c += 1
    hnf = [col[:nrows] for col in cols[:c]]
    transform = [col[nrows:] for col in cols[:c]]
    kernel = [col[nrows:] for col in cols[c:]]
    return hnf, pivots, transform, kernel


class Submodule:
    """Submodule of R^r spanned by the given generator columns."""

    def __init__(self, ring, ambient_rank, generators=()):
        if ring.dim != 1:
            raise UnsupportedDimension("submodule algebra needs a one-variable chart ring")
        if ring.m != 1:
            ring = ring.mod_p()
        self.ring = ring
        self.ambient_rank = ambient_rank
        gens = []
        for g in generators:
            if len(g) != ambient_rank:
                raise AmbientMismatch(f"generator of length {len(g)} in rank {ambient_rank}")
            gens.append(tuple(self._coerce(x) for x in g))
        self.generators = gens
        self._nf = None

    def _coerce(self, x):
        if isinstance(x, (int, str)):
            return self.ring.coerce(x)
        if x.ring != self.ring:
            x = x.mod_p() if x.ring.m > 1 else x
            if x.ring != self.ring:
                x = x.restrict(self.ring)
        return x

    @classmethod
    def ambient(cls, ring, r):
        return cls(ring, r, la.identity(ring.mod_p(), r))

    @classmethod
    def zero_module(cls, ring, r):
        return cls(ring, r, [])

    @classmethod
    def from_matrix(cls, ring, M):
        """Column span of a matrix."""
        rows = len(M)
        return cls(ring, rows, [la.column(M, j) for j in range(len(M[0]) if M else 0)])

    def _check(self, other):
        if self.ring != other.ring or self.ambient_rank != other.ambient_rank:
            raise AmbientMismatch("submodules live in different ambient modules")

    # -- normal form ---------------------------------------------------------
    def _echelon(self):
        if self._nf is None:
            self._nf = echelon(self.ring, self.generators, self.ambient_rank)
        return self._nf

    def normal_form(self):
        return tuple(tuple(col) for col in self._echelon()[0])

    @property
    def rank(self):
        return len(self._echelon()[0])

    @property
    def pivots(self):
        return self._echelon()[1]

    def basis(self):
        return [list(col) for col in self._echelon()[0]]

    def render(self):
        return [[x.render() for x in col] for col in self.normal_form()]

    def __repr__(self):
        return f"Submodule(rank {self.rank} in R^{self.ambient_rank}: {self.render()})"

    def equals(self, other):
        self._check(other)
        return self.normal_form() == other.normal_form()

    def __eq__(self, other):
        if not isinstance(other, Submodule):
            return NotImplemented
        return self.ring == other.ring and self.ambient_rank == other.ambient_rank \
            and self.normal_form() == other.normal_form()

    def __hash__(self):
        return hash((self.ring, self.ambient_rank, self.normal_form()))

    # -- membership ------------------------------------------------------------
    def membership(self, v):
        """(True, coefficients over the generators) or (False, None)."""
        if len(v) != self.ambient_rank:
            raise AmbientMismatch("vector has the wrong length")
        v = [self._coerce(x) for x in v]
        hnf, pivots, transform, _ = self._echelon()
        coeffs = []
        for col, i in zip(hnf, pivots):
            e = v[i]
            if e.is_zero():
                coeffs.append(self.ring.zero)
                continue
            try:
                q = e.divide(col[i])
            except NotDivisible:
                return False, None
            coeffs.append(q)
            v = [a - q * b for a, b in zip(v, col)]
        if not la.is_zero_vec(v):
            return False, None
        k = len(self.generators)
        out = [self.ring.zero] * k
        for q, tcol in zip(coeffs, transform):
            if not q.is_zero():
                out = [a + q * b for a, b in zip(out, tcol)]
        return True, out

    def contains(self, v):
        return self.membership(v)[0]

    def __contains__(self, v):
        return self.contains(v)

    def contains_module(self, other):
        self._check(other)
        return all(self.contains(g) for g in other.generators)

    # -- lattice operations ----------------------------------------------------------
    def sum(self, other):
        self._check(other)
        return Submodule(self.ring, self.ambient_rank, self.basis() + other.basis())

    __add__ = sum

    def intersect(self, other):
        self._check(other)
        A, B = self.basis(), other.basis()
        if not A or not B:
            return Submodule.zero_module(self.ring, self.ambient_rank)
        cols = A + [[-x for x in b] for b in B]
        rel = echelon(self.ring, cols, self.ambient_rank)[3]
        gens = []
        for y in rel:
            v = [self.ring.zero] * self.ambient_rank
            for c, a in zip(y[:len(A)], A):
                if not c.is_zero():
                    v = [x + c * z for x, z in zip(v, a)]
            gens.append(v)
        return Submodule(self.ring, self.ambient_rank, gens)

    def saturate(self):
        """Smallest submodule containing this one with torsion-free quotient."""
        r = self.ambient_rank
        gens = self.basis()
        if not gens:
            return Submodule.zero_module(self.ring, r)
        # annihilator: y with y . g = 0 for every generator g
        rows = [list(g) for g in gens]
        ann = kernel(self.ring, rows, r)
        if not ann.generators:
            return Submodule.ambient(self.ring, r)
        return kernel(self.ring, ann.basis(), r)

    def is_saturated(self):
        return self.equals(self.saturate())

    def image(self, M):
        """Submodule spanned by M applied to the generators."""
        return Submodule(self.ring, len(M), [la.matvec(M, list(g)) for g in self.basis()])

    def restrict(self, ring):
        return Submodule(ring, self.ambient_rank,
                         [[x.restrict(ring.mod_p()) for x in g] for g in self.generators])

    def frobenius_pullback(self):
        """F*G on mod-p data: substitute t -> t^p in every generator."""
        return Submodule(self.ring, self.ambient_rank,
                         [[x.frobenius() for x in g] for g in self.generators])

    # -- gradings ---------------------------------------------------------------------
    def graded_parts(self, levels):
        """G intersected with each graded piece E^i, for i = 0..max(levels)."""
        if len(levels) != self.ambient_rank:
            raise AmbientMismatch("one level per basis vector is needed")
        parts = []
        for i in range(max(levels) + 1 if levels else 0):
            unit = [[self.ring.one if j == a else self.ring.zero for j in range(self.ambient_rank)]
                    for a, lv in enumerate(levels) if lv == i]
            parts.append(self.intersect(Submodule(self.ring, self.ambient_rank, unit)))
        return parts

    def is_subsystem_of_hodge(self, levels):
        total = Submodule.zero_module(self.ring, self.ambient_rank)
        for part in self.graded_parts(levels):
            total = total.sum(part)
        return total.equals(self)

    def is_theta_stable(self, thetas):
        """True when every Higgs matrix maps every generator back into G."""
        if thetas and not isinstance(thetas[0][0], (list, tuple)):
            thetas = [thetas]
        for T in thetas:
            T = la.matmap(self._coerce, T)
            for g in self.generators:
                if not self.contains(la.matvec(T, list(g))):
                    return False
        return True

    def level_truncation(self, levels, i):
        """G^{<=i}: the sum of the graded parts of level at most i."""
        total = Submodule.zero_module(self.ring, self.ambient_rank)
        for lv, part in enumerate(self.graded_parts(levels)):
            if lv <= i:
                total = total.sum(part)
        return total


def kernel(ring, rows, ncols):
    """Kernel of the matrix with the given rows, as a submodule of R^ncols."""
    ring = ring.mod_p() if ring.m > 1 else ring
    if not rows:
        return Submodule.ambient(ring, ncols)
    columns = [[row[j] for row in rows] for j in range(ncols)]
    rel = echelon(ring, columns, len(rows))[3]
    return Submodule(ring, ncols, rel)


def solve(M, v):
    """Some x with M x = v, or None; M is a matrix over a mod-p chart ring."""
    ring = v[0].ring
    sub = Submodule.from_matrix(ring, M)
    ok, coeffs = sub.membership(v)
    return coeffs if ok else None


def line_degree(g, cover_vars=("t", "s")):
    """Degree of a line bundle on P^1 glued by the overlap unit g = c * t^k.

    The transition convention is x_V = g * x_U with U the t-chart; the
    degree is -k, so the transition t^-1 describes O(1).
    """
    g = g.mod_p() if g.ring.m > 1 else g
    if g.is_zero():
        raise ZeroElement("zero transition")
    if len(g.num) != 1 or any(g.den):
        raise NotAUnit(f"transition {g.render()} is not of the form c*t^k")
    (e,), = g.num.keys()
    return -e
