"""Charts glued along overlaps, and degrees on two-chart projective lines.

An overlap lists two chart ids ``(U, V)``, a ring for the intersection
written in U's variable, the coordinate change expressing V's variable in
that ring, and a transition matrix ``T`` taking U-coordinates to
V-coordinates: ``x_V = T x_U``.

Coordinate changes are the identity or ``s = t^e`` with ``e = +1`` or
``-1``, which covers the standard cover of the projective line.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg as la
from .errors import InvalidInput
from .mfdata import FilteredDeRhamChart, FrobeniusLifting, HiggsChart, transport_frobenius
from .report import ValidationReport
from .submodule import line_degree


@dataclass
class Overlap:
    charts: tuple
    ring: object
    change: object = None
    transition: list = None

    def __post_init__(self):
        self.charts = tuple(self.charts)
        if self.change is not None:
            x = self.ring.coerce(self.change) if isinstance(self.change, str) else self.change
            if len(x.num) != 1 or any(x.den):
                raise InvalidInput("coordinate changes must be monomials t^e")
            (e,), c = next(iter(x.num.items()))
            if e not in (1, -1) or c != 1:
                raise InvalidInput("coordinate changes must be t or t^-1")
            self.change = None if e == 1 else x
        self.transition = [[self.ring.coerce(x) for x in row] for row in self.transition]

    @property
    def exponent(self):
        return 1 if self.change is None else -1

    def change_image(self, ring):
        """V's variable as an element of ``ring`` (a precision variant of the overlap ring)."""
        if self.change is None:
            return ring.var(0)
        return ring.monomial((-1,))


@dataclass
class GluedObject:
    charts: dict
    overlaps: list = field(default_factory=list)
    cover: str = None

    def __post_init__(self):
        for ov in self.overlaps:
            for cid in ov.charts:
                if cid not in self.charts:
                    raise InvalidInput(f"overlap refers to unknown chart {cid!r}")
        if self.cover == "projective-line" and (len(self.charts) != 2 or len(self.overlaps) != 1):
            raise InvalidInput("a projective-line cover has two charts and one overlap")

    @property
    def kind(self):
        first = next(iter(self.charts.values()))
        return "higgs" if isinstance(first, HiggsChart) else "mf"

    @property
    def rank(self):
        return next(iter(self.charts.values())).rank

    def ring_for(self, ov, m):
        return ov.ring.with_precision(m)

    def to_overlap(self, x, cid, ov):
        """Image of an element of chart ``cid`` in the overlap ring (same precision)."""
        target = self.ring_for(ov, x.ring.m)
        if cid == ov.charts[0] or ov.change is None:
            if x.ring.vars != target.vars:
                return x.substitute([target.var(0)])
            return x.restrict(target)
        return x.substitute([ov.change_image(target)])

    def matrix_to_overlap(self, M, cid, ov):
        return la.matmap(lambda x: self.to_overlap(x, cid, ov), M)

    def _dvar(self, cid, ov, m):
        """d(chart variable)/dt on the overlap."""
        if cid == ov.charts[0] or ov.change is None:
            return self.ring_for(ov, m).one
        return ov.change_image(self.ring_for(ov, m)).partial(0)

    def connection_on_overlap(self, cid, ov, matrices):
        m = matrices[0][0][0].ring.m
        dv = self._dvar(cid, ov, m)
        return la.scale(dv, self.matrix_to_overlap(matrices[0], cid, ov))

    def lifting_on_overlap(self, cid, ov, lifting):
        """F(t) for the lifting of chart ``cid`` written in the overlap variable."""
        img = self.to_overlap(lifting.images[0], cid, ov)
        if cid != ov.charts[0] and ov.exponent == -1:
            img = img.inverse()
        return FrobeniusLifting(self.ring_for(ov, img.ring.m), [img])

    def chart_on_overlap(self, cid, ov):
        """An MF chart restricted to the overlap and written in its variable."""
        c = self.charts[cid]
        ring = self.ring_for(ov, c.ring.m)
        return FilteredDeRhamChart(
            ring=ring, fil=c.fil, A=(self.connection_on_overlap(cid, ov, c.A),),
            F=self.lifting_on_overlap(cid, ov, c.F),
            Phi=self.matrix_to_overlap(c.Phi, cid, ov), n=c.n, name=c.name)

    def validate(self):
        """Transition invertibility and compatibility of all chart data on overlaps."""
        rep = ValidationReport()
        for ov in self.overlaps:
            u, v = ov.charts
            tag = f"{u}|{v}"
            T = ov.transition
            d = la.det(T)
            ok = not d.is_zero() and d.is_unit()
            rep.add(f"transition_invertible[{tag}]", ok, None if ok else {"det": d.render()})
            if self.kind == "mf":
                self._validate_mf(rep, ov, tag)
            else:
                self._validate_higgs(rep, ov, tag)
        if len(self.charts) > 2:
            rep.add("cocycle", *self._cocycle())
        return rep

    def _validate_mf(self, rep, ov, tag):
        u, v = ov.charts
        cu, cv = self.chart_on_overlap(u, ov), self.chart_on_overlap(v, ov)
        T = ov.transition
        lhs = la.mul(T, cu.A[0])
        rhs = la.add(la.matmap(lambda x: x.partial(0), T), la.mul(cv.A[0], T))
        pos = la.first_difference(lhs, rhs)
        rep.add(f"connection_compatible[{tag}]", pos is None, None if pos is None else {"entry": list(pos)})
        bad = [(b, a) for b in range(cv.rank) for a in range(cu.rank)
               if cv.fil[b] < cu.fil[a] and not T[b][a].is_zero()]
        rep.add(f"filtration_compatible[{tag}]", not bad, {"entry": list(bad[0])} if bad else None)
        cv2 = transport_frobenius(cv, cu.F)
        lhs = la.mul(T, cu.Phi)
        rhs = la.mul(cv2.Phi, cu.F.pullback_matrix(T))
        pos = la.first_difference(lhs, rhs)
        rep.add(f"frobenius_compatible[{tag}]", pos is None, None if pos is None else {"entry": list(pos)})

    def _validate_higgs(self, rep, ov, tag):
        u, v = ov.charts
        hu, hv = self.charts[u], self.charts[v]
        T = la.matmap(lambda x: x.mod_p(), ov.transition)
        tu = self.connection_on_overlap(u, ov, hu.theta)
        tv = self.connection_on_overlap(v, ov, hv.theta)
        pos = la.first_difference(la.mul(T, tu), la.mul(tv, T))
        rep.add(f"higgs_compatible[{tag}]", pos is None, None if pos is None else {"entry": list(pos)})
        bad = [(b, a) for b in range(hv.rank) for a in range(hu.rank)
               if hv.levels[b] != hu.levels[a] and not T[b][a].is_zero()]
        rep.add(f"grading_compatible[{tag}]", not bad, {"entry": list(bad[0])} if bad else None)

    def _cocycle(self):
        # only triple overlaps sharing a ring and the identity change are compared
        by_pair = {frozenset(ov.charts): ov for ov in self.overlaps}
        ids = list(self.charts)
        for i in range(len(ids)):
            for j in range(i + 1, len(ids)):
                for k in range(j + 1, len(ids)):
                    a, b, c = ids[i], ids[j], ids[k]
                    trio = [by_pair.get(frozenset(x)) for x in ((a, b), (b, c), (a, c))]
                    if None in trio or len({ov.ring for ov in trio}) != 1:
                        continue
                    if any(ov.change is not None for ov in trio):
                        continue
                    tab, tbc, tac = [self._oriented(ov, x, y) for ov, (x, y)
                                     in zip(trio, ((a, b), (b, c), (a, c)))]
                    if not la.equal(la.mul(tbc, tab), tac):
                        return False, {"charts": [a, b, c]}
        return True, None

    def _oriented(self, ov, x, y):
        if ov.charts == (x, y):
            return ov.transition
        return la.inverse(ov.transition)

    # -- degrees ------------------------------------------------------------------
    def determinant_transition(self):
        if self.cover != "projective-line":
            raise InvalidInput("degrees are defined for projective-line covers")
        return la.det(self.overlaps[0].transition)

    def degree(self):
        """Degree of the determinant line bundle on the projective line."""
        return line_degree(self.determinant_transition())

    def slope(self):
        return Fraction(self.degree(), self.rank)

