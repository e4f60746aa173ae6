"""Sparse Laurent polynomials over Z/p^m on chart rings.

A chart ring is ``Z/p^m[t_1, ..., t_d]`` (d = 1 or 2) with some variables
inverted and, in one variable, a finite list of monic irreducible
denominators inverted as well (``Z/p^m[t, 1/t, 1/(t-1)]`` and so on).

Elements are stored as ``N / prod(d_k^b_k)`` where ``N`` is a sparse
Laurent polynomial ``{exponent tuple: coefficient}`` and ``b`` is a tuple of
denominator multiplicities.  The representation is canonical: whenever
``b_k > 0`` the denominator ``d_k`` does not divide ``N``.  Because the
denominators are monic and pairwise coprime modulo p, this makes equality a
plain structural comparison.

Text grammar (see ``docs/grammar.md``)::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := atom ['^' ['-'] INT]
    atom   := INT | VAR | '(' expr ')'
"""

import re

from .errors import (
    DenominatorCapExceeded,
    IncompatibleRings,
    NegativeExponentOnUninverted,
    NonInvertibleImage,
    NotAUnit,
    NotDivisible,
    PolySyntaxError,
    PrecisionExhausted,
    UnsupportedDimension,
    ZeroElement,
)
from .padic import PadicScalar, check_prime

DEFAULT_DENOMINATOR_CAP = 64


# ---------------------------------------------------------------------------
# dense univariate helpers (ascending coefficient lists modulo q)

def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _dmul(a, b, q):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([c % q for c in out])


def _dsub(a, b, q):
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % q for i in range(n)]
    return _trim(out)


def _ddivmod(a, d, q):
    """Divide ``a`` by the monic ``d``; returns (quotient, remainder)."""
    a = [c % q for c in a]
    _trim(a)
    dd = len(d) - 1
    if len(a) <= dd:
        return [], a
    quo = [0] * (len(a) - dd)
    for i in range(len(a) - 1, dd - 1, -1):
        c = a[i]
        if c:
            quo[i - dd] = c
            for j in range(dd + 1):
                a[i - dd + j] = (a[i - dd + j] - c * d[j]) % q
    return _trim(quo), _trim(a[:dd])


def _dmonic(a, p):
    inv = pow(a[-1], -1, p)
    return [c * inv % p for c in a]


def dense_gcdex(a, b, p):
    """Extended gcd over F_p: (g, x, y) with x*a + y*b = g, g monic."""
    a = _trim([c % p for c in a])
    b = _trim([c % p for c in b])
    r0, r1 = a, b
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while r1:
        inv = pow(r1[-1], -1, p)
        quo = []
        rem = list(r0)
        dd = len(r1) - 1
        if len(rem) > dd:
            quo = [0] * (len(rem) - dd)
            for i in range(len(rem) - 1, dd - 1, -1):
                c = rem[i] * inv % p
                if c:
                    quo[i - dd] = c
                    for j in range(dd + 1):
                        rem[i - dd + j] = (rem[i - dd + j] - c * r1[j]) % p
            _trim(quo)
            rem = _trim(rem[:dd])
        r0, r1 = r1, rem
        s0, s1 = s1, _dsub(s0, _dmul(quo, s1, p), p)
        t0, t1 = t1, _dsub(t0, _dmul(quo, t1, p), p)
    if not r0:
        return [], [], []
    inv = pow(r0[-1], -1, p)
    return ([c * inv % p for c in r0], [c * inv % p for c in s0], [c * inv % p for c in t0])


def _dpowmod(base, e, mod, p):
    result = [1]
    base = _ddivmod(base, mod, p)[1]
    while e:
        if e & 1:
            result = _ddivmod(_dmul(result, base, p), mod, p)[1]
        base = _ddivmod(_dmul(base, base, p), mod, p)[1]
        e >>= 1
    return result


def _prime_factors(n):
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible_mod_p(f, p):
    """Rabin's test for a monic polynomial over F_p."""
    f = _trim([c % p for c in f])
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    x = [0, 1]
    if _dsub(_dpowmod(x, p ** n, f, p), x, p):
        return False
    for r in _prime_factors(n):
        h = _dsub(_dpowmod(x, p ** (n // r), f, p), x, p)
        g = dense_gcdex(f, h, p)[0] if h else f
        if len(g) > 1:
            return False
    return True


def _symmetric(c, q):
    c %= q
    return c - q if c > q // 2 else c


# ---------------------------------------------------------------------------

class ChartRing:
    """Coordinate ring of a small affine chart, truncated at precision m."""

    __slots__ = ("p", "m", "q", "vars", "inverted", "denominators", "cap",
                 "_dens", "_key", "_den_pow_cache")

    def __init__(self, p, m, vars=("t",), inverted=(), denominators=(),
                 cap=DEFAULT_DENOMINATOR_CAP):
        check_prime(p)
        if m < 1:
            raise ValueError("precision must be >= 1")
        if isinstance(vars, str):
            vars = (vars,)
        vars = tuple(vars)
        if len(vars) not in (1, 2) or len(set(vars)) != len(vars):
            raise UnsupportedDimension(f"chart rings have 1 or 2 distinct variables, got {vars}")
        for v in vars:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", v):
                raise ValueError(f"bad variable name {v!r}")
        self.p, self.m, self.q = p, m, p ** m
        self.vars = vars
        if isinstance(inverted, str):
            inverted = (inverted,)
        inv = set(inverted)
        unknown = inv - set(vars)
        if unknown:
            raise ValueError(f"cannot invert unknown variables {sorted(unknown)}")
        dens = []
        for d in denominators:
            if isinstance(d, str):
                plain = ChartRing(p, m, vars, ())
                e = plain.parse(d)
                if len(vars) != 1:
                    raise UnsupportedDimension("polynomial denominators need a one-variable ring")
                s, dense = e._dense()
                if s != 0 and len(dense) == 1 and dense[0] == 1:
                    inv.add(vars[0])
                    continue
                if s != 0:
                    raise ValueError(f"denominator {d!r} must be coprime to {vars[0]}")
                d = dense
            else:
                if len(vars) != 1:
                    raise UnsupportedDimension("polynomial denominators need a one-variable ring")
                d = list(d)
            d = [_symmetric(c, self.q) for c in d]
            _trim(d)
            if len(d) == 2 and d[0] % self.q == 0 and d[1] % self.q == 1:
                inv.add(vars[0])
                continue
            if len(d) < 2 or d[-1] % self.q != 1:
                raise ValueError(f"denominator {d} must be monic and nonconstant")
            if d[0] % p == 0:
                raise ValueError(f"denominator {d} must be coprime to {vars[0]}")
            if not is_irreducible_mod_p(d, p):
                raise ValueError(f"denominator {d} is not irreducible mod {p}")
            dens.append(tuple(d))
        for i in range(len(dens)):
            for j in range(i):
                if len(dense_gcdex(list(dens[i]), list(dens[j]), p)[0]) > 1:
                    raise ValueError("denominators must be pairwise coprime mod p")
        if len(set(tuple(c % self.q for c in d) for d in dens)) != len(dens):
            raise ValueError("repeated denominator")
        self.inverted = tuple(v in inv for v in vars)
        self.denominators = tuple(dens)
        self.cap = cap
        self._dens = [[c % self.q for c in d] for d in dens]
        self._key = (p, m, vars, self.inverted,
                     tuple(tuple(c % self.q for c in d) for d in dens))
        self._den_pow_cache = {}

    # -- identity --------------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, ChartRing) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    @property
    def dim(self):
        return len(self.vars)

    def __repr__(self):
        parts = []
        for v, i in zip(self.vars, self.inverted):
            parts.append(v)
            if i:
                parts.append(f"1/{v}")
        parts += [f"1/({self.render_dense(d)})" for d in self.denominators]
        return f"Z/{self.p}^{self.m}[{', '.join(parts)}]"

    def render_dense(self, d):
        return self.from_dense(0, list(d)).render()

    def with_precision(self, m):
        return ChartRing(self.p, m, self.vars,
                         [v for v, i in zip(self.vars, self.inverted) if i],
                         self.denominators, self.cap)

    def mod_p(self):
        return self.with_precision(1)

    def localize(self, inverted=(), denominators=()):
        """A ring inverting everything this one does plus the extras."""
        inv = [v for v, i in zip(self.vars, self.inverted) if i] + list(inverted)
        dens = list(self.denominators)
        extra = ChartRing(self.p, self.m, self.vars, (), denominators).denominators if denominators else ()
        for d in extra:
            if tuple(c % self.q for c in d) not in self._key[4]:
                dens.append(d)
        return ChartRing(self.p, self.m, self.vars, sorted(set(inv), key=self.vars.index), dens, self.cap)

    def contains_ring(self, other):
        """True when ``other`` embeds in ``self`` by the identity on variables."""
        if (self.p, self.m, self.vars) != (other.p, other.m, other.vars):
            return False
        if any(b and not a for a, b in zip(self.inverted, other.inverted)):
            return False
        mine = set(self._key[4])
        return all(d in mine for d in other._key[4])

    def describe(self):
        return {
            "vars": list(self.vars),
            "inverted": [v for v, i in zip(self.vars, self.inverted) if i],
            "denominators": [self.render_dense(d) for d in self.denominators],
        }

    # -- constructors ----------------------------------------------------
    @property
    def zero(self):
        return RingElement(self, {})

    @property
    def one(self):
        return self.const(1)

    def const(self, c):
        if isinstance(c, PadicScalar):
            if c.p != self.p or c.m < self.m:
                raise IncompatibleRings("scalar does not live at this precision")
            c = c.value
        return RingElement(self, {(0,) * self.dim: c})

    def var(self, name=0):
        i = self.vars.index(name) if isinstance(name, str) else name
        e = [0] * self.dim
        e[i] = 1
        return RingElement(self, {tuple(e): 1})

    def monomial(self, exps, c=1):
        if isinstance(exps, int):
            exps = (exps,)
        return RingElement(self, {tuple(exps): c})

    def from_dense(self, shift, coeffs):
        return RingElement(self, {(shift + i,): c for i, c in enumerate(coeffs) if c})

    def parse(self, text):
        return _Parser(self, text).parse()

    def coerce(self, x):
        if isinstance(x, RingElement):
            if x.ring != self:
                raise IncompatibleRings(f"{x.ring!r} is not {self!r}")
            return x
        if isinstance(x, (int, PadicScalar)):
            return self.const(x)
        if isinstance(x, str):
            return self.parse(x)
        raise TypeError(f"cannot coerce {type(x).__name__} into {self!r}")

    # -- internals -------------------------------------------------------
    def _den_pow(self, k, e):
        key = (k, e)
        hit = self._den_pow_cache.get(key)
        if hit is None:
            dense = [1]
            for _ in range(e):
                dense = _dmul(dense, self._dens[k], self.q)
            hit = {(i,): c for i, c in enumerate(dense) if c}
            self._den_pow_cache[key] = hit
        return hit

    def _den_element(self, k):
        return self.from_dense(0, self._dens[k])


def _mul_dicts(a, b, q):
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, 0) + ca * cb
    return {e: c % q for e, c in out.items() if c % q}


def _add_dicts(a, b, q, sign=1):
    out = dict(a)
    for e, c in b.items():
        out[e] = (out.get(e, 0) + sign * c) % q
    return {e: c for e, c in out.items() if c}


class RingElement:
    """Immutable element of a :class:`ChartRing`."""

    __slots__ = ("ring", "num", "den", "_hash")

    def __init__(self, ring, num, den=None, _check=True):
        q = ring.q
        num = {tuple(e): c % q for e, c in num.items() if c % q}
        if den is None:
            den = (0,) * len(ring.denominators)
        den = tuple(den)
        if len(den) != len(ring.denominators):
            raise ValueError("denominator multiplicities do not match the ring")
        if _check:
            for e in num:
                if len(e) != ring.dim:
                    raise ValueError(f"exponent {e} has the wrong length")
                for x, inv, v in zip(e, ring.inverted, ring.vars):
                    if x < 0 and not inv:
                        raise NegativeExponentOnUninverted(f"{v}^{x} in a ring where {v} is not inverted")
        if not num:
            den = (0,) * len(den)
        elif any(den):
            num, den = _cancel(ring, num, den)
        if any(b > ring.cap for b in den):
            raise DenominatorCapExceeded(f"denominator multiplicity {max(den)} exceeds cap {ring.cap}")
        self.ring = ring
        self.num = num
        self.den = den
        self._hash = None

    # -- basic predicates -------------------------------------------------
    def is_zero(self):
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def is_constant(self):
        return not any(self.den) and all(not any(e) for e in self.num)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("not a constant")
        return self.num.get((0,) * self.ring.dim, 0)

    def is_polynomial(self):
        return not any(self.den) and all(x >= 0 for e in self.num for x in e)

    @property
    def precision(self):
        return self.ring.m

    def coefficients(self):
        """Numerator coefficients as :class:`PadicScalar` values."""
        r = self.ring
        return {e: PadicScalar(r.p, r.m, c) for e, c in self.num.items()}

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.const(other)
        if not isinstance(other, RingElement):
            return NotImplemented
        return self.ring == other.ring and self.den == other.den and self.num == other.num

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, self.den, frozenset(self.num.items())))
        return self._hash

    # -- arithmetic ---------------------------------------------------------
    def _other(self, other):
        if isinstance(other, RingElement):
            if other.ring != self.ring:
                raise IncompatibleRings(f"{other.ring!r} vs {self.ring!r}")
            return other
        if isinstance(other, (int, PadicScalar)):
            return self.ring.const(other)
        return NotImplemented

    def _common(self, other):
        if self.den == other.den:
            return self.num, other.num, self.den
        r = self.ring
        den = tuple(max(a, b) for a, b in zip(self.den, other.den))
        a, b = self.num, other.num
        for k, (x, y, z) in enumerate(zip(self.den, other.den, den)):
            if z > x:
                a = _mul_dicts(a, r._den_pow(k, z - x), r.q)
            if z > y:
                b = _mul_dicts(b, r._den_pow(k, z - y), r.q)
        return a, b, den

    def __add__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        a, b, den = self._common(other)
        return RingElement(self.ring, _add_dicts(a, b, self.ring.q), den, _check=False)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        a, b, den = self._common(other)
        return RingElement(self.ring, _add_dicts(a, b, self.ring.q, -1), den, _check=False)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return RingElement(self.ring, {e: -c for e, c in self.num.items()}, self.den, _check=False)

    def __mul__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        if other.is_constant():
            c = other.constant_value()
            return RingElement(self.ring, {e: c * x for e, x in self.num.items()}, self.den, _check=False)
        if self.is_constant():
            return other * self
        num = _mul_dicts(self.num, other.num, self.ring.q)
        den = tuple(a + b for a, b in zip(self.den, other.den))
        return RingElement(self.ring, num, den, _check=False)

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.ring.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def scale(self, c):
        return RingElement(self.ring, {e: c * x for e, x in self.num.items()}, self.den, _check=False)

    # -- precision ------------------------------------------------------------
    def reduce(self, m):
        """Reduction to precision ``m <= self.precision``."""
        if m > self.ring.m:
            raise PrecisionExhausted(f"cannot promote precision {self.ring.m} to {m}")
        if m == self.ring.m:
            return self
        return RingElement(self.ring.with_precision(m), self.num, self.den, _check=False)

    def mod_p(self):
        return self.reduce(1)

    def exact_div_pow(self, i):
        """The element y at precision m - i with p^i * y == self."""
        r = self.ring
        if i < 0:
            raise ValueError("i must be >= 0")
        if i >= r.m:
            raise PrecisionExhausted(f"dividing by p^{i} exhausts precision {r.m}")
        if i == 0:
            return self
        d = r.p ** i
        if any(c % d for c in self.num.values()):
            raise NotDivisible(f"{r.p}^{i} does not divide {self.render()}")
        return RingElement(r.with_precision(r.m - i), {e: c // d for e, c in self.num.items()},
                           self.den, _check=False)

    def _lift(self, ring):
        """Same representatives read in a ring of higher precision (internal)."""
        return RingElement(ring, self.num, self.den, _check=False)

    def restrict(self, ring):
        """Image under the inclusion into a ring inverting more elements."""
        if ring == self.ring:
            return self
        if not ring.contains_ring(self.ring):
            raise IncompatibleRings(f"{self.ring!r} does not embed in {ring!r}")
        keys = ring._key[4]
        index = [keys.index(d) for d in self.ring._key[4]]
        den = [0] * len(keys)
        for k, b in zip(index, self.den):
            den[k] = b
        return RingElement(ring, self.num, den, _check=False)

    # -- calculus -------------------------------------------------------------
    def partial(self, var=0):
        """Partial derivative with respect to ``var`` (name or index)."""
        r = self.ring
        l = r.vars.index(var) if isinstance(var, str) else var
        q = r.q

        def d_num(num):
            out = {}
            for e, c in num.items():
                if e[l]:
                    f = list(e)
                    f[l] -= 1
                    out[tuple(f)] = c * e[l]
            return out

        if not any(self.den):
            return RingElement(r, d_num(self.num), self.den, _check=False)
        ks = [k for k, b in enumerate(self.den) if b]
        dens = {k: {(i,): c for i, c in enumerate(r._dens[k]) if c} for k in ks}
        prod_all = {(0,): 1}
        for k in ks:
            prod_all = _mul_dicts(prod_all, dens[k], q)
        total = _mul_dicts(d_num(self.num), prod_all, q)
        for k in ks:
            rest = {(0,): self.den[k]}
            for j in ks:
                if j != k:
                    rest = _mul_dicts(rest, dens[j], q)
            term = _mul_dicts(_mul_dicts(self.num, d_num(dens[k]), q), rest, q)
            total = _add_dicts(total, term, q, -1)
        den = tuple(b + (1 if b else 0) for b in self.den)
        return RingElement(r, total, den, _check=False)

    # -- substitution -----------------------------------------------------------
    def substitute(self, images):
        """Ring homomorphism sending variable l to ``images[l]``.

        ``images`` is a sequence (or a name-keyed dict) of elements of a common
        target ring whose precision does not exceed this ring's.
        """
        r = self.ring
        if isinstance(images, dict):
            images = [images[v] for v in r.vars]
        images = list(images)
        if len(images) != r.dim:
            raise ValueError("need one image per variable")
        target = images[0].ring
        if any(x.ring != target for x in images):
            raise IncompatibleRings("images must share a ring")
        if target.p != r.p or target.m > r.m:
            raise IncompatibleRings("substitution cannot raise precision")
        if self.is_zero():
            return target.zero
        pos = [{0: target.one, 1: x} for x in images]
        neg = [None] * r.dim

        def power(l, e):
            if e >= 0:
                table = pos[l]
            else:
                if neg[l] is None:
                    try:
                        inv = images[l].inverse()
                    except (NotAUnit, ZeroElement):
                        raise NonInvertibleImage(f"image of {r.vars[l]} is not a unit") from None
                    neg[l] = {0: target.one, 1: inv}
                table, e = neg[l], -e
            if e not in table:
                table[e] = table[e - 1] * table[1] if e - 1 in table else _fast_pow(table[1], e)
            return table[e]

        acc = {}
        q = target.q
        for e, c in self.num.items():
            term = target.one
            for l, x in enumerate(e):
                if x:
                    term = term * power(l, x)
            term = term.scale(c % q)
            acc.setdefault(term.den, []).append(term)
        result = target.zero
        for terms in acc.values():
            num = {}
            for t in terms:
                for ex, c in t.num.items():
                    num[ex] = num.get(ex, 0) + c
            result = result + RingElement(target, num, terms[0].den, _check=False)
        for k, b in enumerate(self.den):
            if b:
                val = target.zero
                for c in reversed(r._dens[k]):
                    val = val * images[0] + (c % q)
                try:
                    inv = val.inverse()
                except (NotAUnit, ZeroElement):
                    raise NonInvertibleImage(f"image of denominator {r.render_dense(r.denominators[k])} is not a unit") from None
                result = result * inv ** b
        return result

    def frobenius(self):
        """Absolute Frobenius t -> t^p of a precision-1 element (F_p coefficients)."""
        r = self.ring
        if r.m != 1:
            raise ValueError("absolute Frobenius is only taken modulo p")
        num = {tuple(x * r.p for x in e): c for e, c in self.num.items()}
        return RingElement(r, num, tuple(b * r.p for b in self.den), _check=False)

    def frobenius_root(self):
        """Inverse of :meth:`frobenius` on elements killed by every derivation."""
        r = self.ring
        if r.m != 1:
            raise ValueError("Frobenius roots are only taken modulo p")
        p = r.p
        num = self.num
        den = list(self.den)
        for k, b in enumerate(den):
            if b % p:
                extra = p - b % p
                num = _mul_dicts(num, r._den_pow(k, extra), r.q)
                den[k] = b + extra
        if any(x % p for e in num for x in e):
            raise ValueError(f"{self.render()} is not a p-th power")
        return RingElement(r, {tuple(x // p for x in e): c for e, c in num.items()},
                           tuple(b // p for b in den), _check=False)

    # -- units --------------------------------------------------------------------
    def _dense(self):
        """(shift, ascending list) of a one-variable numerator."""
        if self.ring.dim != 1:
            raise UnsupportedDimension("dense form needs a one-variable ring")
        if not self.num:
            return 0, []
        exps = [e[0] for e in self.num]
        s = min(exps)
        dense = [0] * (max(exps) - s + 1)
        for e, c in self.num.items():
            dense[e[0] - s] = c
        return s, dense

    def unit_factorization(self):
        """Modulo p: (unit u, monic poly part) with self = u * poly, or None when not 1-dim.

        ``poly`` is returned as a dense coefficient list over F_p, coprime to
        every inverted element; it is ``[1]`` exactly when self is a unit.
        """
        r = self.ring
        if r.m != 1:
            return self.mod_p().unit_factorization()
        if self.is_zero():
            raise ZeroElement("zero has no unit factorization")
        p = r.p
        if r.dim == 1:
            s, dense = self._dense()
            shift = 0
            if r.inverted[0]:
                shift = s
            elif s > 0:
                dense = [0] * s + dense
            mult = []
            for d in r._dens:
                e = 0
                while True:
                    quo, rem = _ddivmod(dense, d, p)
                    if rem:
                        break
                    dense, e = quo, e + 1
                mult.append(e)
            c = dense[-1]
            poly = _dmonic(dense, p)
            # u = c * t^shift * prod d^mult / prod d^den
            unit_num = {(shift,): c}
            for k, e in enumerate(mult):
                if e:
                    unit_num = _mul_dicts(unit_num, r._den_pow(k, e), p)
            unit = RingElement(r, unit_num, self.den, _check=False)
            return unit, poly
        # two variables: units of the Laurent ring are monomials
        if len(self.num) == 1:
            (e, c), = self.num.items()
            if all(x == 0 or inv for x, inv in zip(e, r.inverted)):
                return self, [1]
        return None

    def unit_check(self):
        """(True, inverse) if this element is a unit, else (False, None)."""
        r = self.ring
        if self.is_zero():
            raise ZeroElement("zero is not a unit")
        f0 = self.mod_p()
        fac = f0.unit_factorization()
        if fac is None or len(fac[1]) != 1:
            return False, None
        unit = fac[0]
        r0 = f0.ring
        if r0.dim == 1:
            inv0 = _invert_unit_mod_p(unit)
        else:
            (e, c), = unit.num.items()
            inv0 = RingElement(r0, {tuple(-x for x in e): pow(c, -1, r.p)}, _check=False)
        if r.m == 1:
            return True, inv0
        x = inv0._lift(r)
        k = 1
        two = r.const(2)
        while k < r.m:
            x = x * (two - self * x)
            k *= 2
        return True, x

    def is_unit(self):
        return self.unit_check()[0]

    def inverse(self):
        ok, inv = self.unit_check()
        if not ok:
            raise NotAUnit(f"{self.render()} is not a unit in {self.ring!r}")
        return inv

    def divide(self, other):
        """Exact quotient self/other in a one-variable ring modulo p."""
        other = self._other(other)
        if other.is_zero():
            raise ZeroElement("division by zero")
        if self.is_zero():
            return self.ring.zero
        u, poly = other.unit_factorization()
        pe = self.ring.from_dense(0, poly)
        quo = exact_poly_divide(self, poly)
        if quo is None:
            raise NotDivisible(f"{pe.render()} does not divide {self.render()}")
        return quo * u.inverse()

    def ord_at(self, place):
        """Vanishing order modulo p at an irreducible polynomial or at 'inf'."""
        r = self.ring
        if r.dim != 1:
            raise UnsupportedDimension("orders are computed on one-variable rings")
        f = self.mod_p()
        if f.is_zero():
            raise ZeroElement("order of zero")
        r0 = f.ring
        s, dense = f._dense()
        if place in ("inf", "oo", "infinity"):
            top = s + len(dense) - 1
            dd = sum(b * (len(d) - 1) for b, d in zip(f.den, r0._dens))
            return dd - top
        if isinstance(place, str):
            place = r0.parse(place)
        if isinstance(place, RingElement):
            ps, pd = place.reduce(1)._dense() if place.ring.m > 1 else place._dense()
            if ps != 0 or not pd:
                pd = [0] * ps + pd
            place = pd
        pi = _dmonic(_trim([c % r.p for c in place]), r.p)
        if pi == [0, 1]:
            return s
        count = 0
        while True:
            quo, rem = _ddivmod(dense, pi, r.p)
            if rem:
                break
            dense, count = quo, count + 1
        for b, d in zip(f.den, r0._dens):
            if list(d) == pi:
                count -= b
        return count

    def degree(self):
        """Top exponent of the numerator in a one-variable ring."""
        s, dense = self._dense()
        return s + len(dense) - 1 if dense else None

    # -- text -----------------------------------------------------------------
    def render(self):
        r = self.ring
        if self.is_zero():
            return "0"
        body = _render_num(r, self.num)
        if not any(self.den):
            return body
        sign = ""
        if body in ("1", "-1"):
            sign, parts = body[:-1], []
        elif len(self.num) == 1:
            parts = [body]
        else:
            parts = [f"({body})"]
        for k, b in enumerate(self.den):
            if b:
                parts.append(f"({r.render_dense(r.denominators[k])})^-{b}")
        return sign + "*".join(parts)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"RingElement({self.render()!r} in {self.ring!r})"


def _fast_pow(x, e):
    result = x.ring.one
    while e:
        if e & 1:
            result = result * x
        x = x * x
        e >>= 1
    return result


def _cancel(ring, num, den):
    q = ring.q
    exps = [e[0] for e in num]
    s = min(exps)
    dense = [0] * (max(exps) - s + 1)
    for e, c in num.items():
        dense[e[0] - s] = c
    den = list(den)
    changed = False
    for k, b in enumerate(den):
        d = ring._dens[k]
        while b > 0 and len(dense) >= len(d):
            quo, rem = _ddivmod(dense, d, q)
            if rem:
                break
            dense, b, changed = quo, b - 1, True
        den[k] = b
    if changed:
        num = {(s + i,): c for i, c in enumerate(dense) if c}
    return num, tuple(den)


def _invert_unit_mod_p(unit):
    """Inverse of c * t^s * prod d^e / prod d^b over F_p (unit from unit_factorization)."""
    r = unit.ring
    p = r.p
    s, dense = unit._dense()
    mult = []
    for d in r._dens:
        e = 0
        while len(dense) > 1:
            quo, rem = _ddivmod(dense, d, p)
            if rem:
                break
            dense, e = quo, e + 1
        mult.append(e)
    if len(dense) != 1:
        raise NotAUnit("not a unit")
    c = dense[0]
    num = {(-s,): pow(c, -1, p)}
    for k, b in enumerate(unit.den):
        if b:
            num = _mul_dicts(num, r._den_pow(k, b), p)
    return RingElement(r, num, tuple(mult), _check=False)


def exact_poly_divide(x, poly):
    """x / poly for a monic polynomial coprime to the inverted set, or None."""
    r = x.ring
    s, dense = x._dense()
    if s > 0:
        s, dense = 0, [0] * s + dense
    quo, rem = _ddivmod(dense, poly, r.q)
    if rem:
        return None
    return RingElement(r, {(s + i,): c for i, c in enumerate(quo) if c}, x.den, _check=False)


def _render_num(r, num):
    q = r.q
    pieces = []
    for e in sorted(num, reverse=True):
        c = _symmetric(num[e], q)
        mono = "*".join(
            v if x == 1 else f"{v}^{x}" for v, x in zip(r.vars, e) if x
        )
        a = abs(c)
        if mono:
            body = mono if a == 1 else f"{a}*{mono}"
        else:
            body = str(a)
        pieces.append((c < 0, body))
    out = ("-" if pieces[0][0] else "") + pieces[0][1]
    for neg, body in pieces[1:]:
        out += (" - " if neg else " + ") + body
    return out


def render_element(x):
    return x.render()


def parse_element(text, ring):
    return ring.parse(text)


# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


class _Parser:
    def __init__(self, ring, text):
        self.ring = ring
        self.text = text
        self.tokens = []
        pos = 0
        while text[pos:].strip():
            mt = _TOKEN.match(text, pos)
            start = mt.start(mt.lastindex)
            if mt.group(1) is not None:
                self.tokens.append(("int", int(mt.group(1)), start))
            elif mt.group(2) is not None:
                self.tokens.append(("var", mt.group(2), start))
            else:
                ch = mt.group(3)
                if ch not in "+-*^()":
                    raise PolySyntaxError(f"unexpected character {ch!r}", start, text)
                self.tokens.append((ch, ch, start))
            pos = mt.end()
        self.tokens.append(("end", None, len(text)))
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            raise PolySyntaxError(f"expected {kind!r}", tok[2], self.text)
        self.i += 1
        return tok

    def parse(self):
        if self.peek()[0] == "end":
            raise PolySyntaxError("empty expression", 0, self.text)
        value = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise PolySyntaxError(f"unexpected {tok[1]!r}", tok[2], self.text)
        return value

    def expr(self):
        sign = 1
        if self.peek()[0] in ("+", "-"):
            sign = -1 if self.take()[0] == "-" else 1
        value = self.term()
        if sign < 0:
            value = -value
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.factor()
        while self.peek()[0] == "*":
            self.take()
            value = value * self.factor()
        return value

    def factor(self):
        tok = self.peek()
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            neg = False
            if self.peek()[0] == "-":
                self.take()
                neg = True
            e = self.take("int")[1]
            if not neg:
                return base ** e
            if tok[0] == "var":
                l = self.ring.vars.index(tok[1])
                if not self.ring.inverted[l]:
                    raise NegativeExponentOnUninverted(
                        f"{tok[1]}^-{e}: {tok[1]} is not inverted (at column {tok[2] + 1})")
                ex = [0] * self.ring.dim
                ex[l] = -e
                return RingElement(self.ring, {tuple(ex): 1})
            try:
                return base.inverse() ** e
            except (NotAUnit, ZeroElement):
                raise NegativeExponentOnUninverted(
                    f"negative power of a non-unit (at column {tok[2] + 1})") from None
        return base

    def atom(self):
        kind, val, pos = self.peek()
        if kind == "int":
            self.take()
            return self.ring.const(val)
        if kind == "var":
            self.take()
            if val not in self.ring.vars:
                raise PolySyntaxError(f"unknown variable {val!r}", pos, self.text)
            return self.ring.var(val)
        if kind == "(":
            self.take()
            value = self.expr()
            self.take(")")
            return value
        raise PolySyntaxError(f"unexpected {val!r}" if val else "unexpected end of input", pos, self.text)
