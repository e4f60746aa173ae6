"""Residues in Z/p^m with per-value precision.

A :class:`PadicScalar` is an element of the truncated Witt ring
W_m(F_p) = Z/p^m.  Precision travels with the value: a sum or product
lives at the smaller of the two operand precisions, reduction to a lower
precision is explicit, and nothing ever promotes a value to a higher
precision.

Multi-indices are plain tuples of non-negative integers; an ``int`` is
accepted wherever a one-variable index is expected.
"""

from dataclasses import dataclass
from math import factorial

from .errors import FactorialNotInvertible, NotDivisible, PrecisionExhausted


def is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def check_prime(p):
    if not isinstance(p, int) or p < 3 or not is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p!r}")


def valuation(x, p):
    """p-adic valuation of a nonzero integer."""
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


@dataclass(frozen=True)
class PadicScalar:
    p: int
    m: int
    value: int

    def __post_init__(self):
        check_prime(self.p)
        if self.m < 1:
            raise ValueError("precision must be >= 1")
        object.__setattr__(self, "value", self.value % self.p ** self.m)

    @property
    def modulus(self):
        return self.p ** self.m

    def _other(self, other):
        if isinstance(other, int):
            return PadicScalar(self.p, self.m, other)
        if not isinstance(other, PadicScalar):
            return NotImplemented
        if other.p != self.p:
            raise ValueError("mismatched primes")
        return other

    def _binop(self, other, op):
        other = self._other(other)
        if other is NotImplemented:
            return other
        m = min(self.m, other.m)
        return PadicScalar(self.p, m, op(self.value, other.value))

    def __add__(self, other):
        return self._binop(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binop(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binop(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binop(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __neg__(self):
        return PadicScalar(self.p, self.m, -self.value)

    def __eq__(self, other):
        if isinstance(other, int):
            return self.value == other % self.modulus
        if isinstance(other, PadicScalar):
            return (self.p, self.m, self.value) == (other.p, other.m, other.value)
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.m, self.value))

    def is_zero(self):
        return self.value == 0

    def reduce(self, m):
        """Reduce to precision ``m <= self.m``."""
        if m > self.m:
            raise PrecisionExhausted(f"cannot promote precision {self.m} to {m}")
        if m < 1:
            raise PrecisionExhausted("precision must stay >= 1")
        return PadicScalar(self.p, m, self.value)

    def valuation(self):
        """Valuation of the representative, or ``m`` for zero."""
        if self.value == 0:
            return self.m
        return valuation(self.value, self.p)

    def is_unit(self):
        return self.value % self.p != 0

    def inverse(self):
        if not self.is_unit():
            raise NotDivisible(f"{self.value} is not a unit mod {self.p}")
        return PadicScalar(self.p, self.m, pow(self.value, -1, self.modulus))

    def exact_div_pow(self, i):
        return exact_div_pow(self, i)

    def __repr__(self):
        return f"PadicScalar(p={self.p}, m={self.m}, value={self.value})"


def exact_div_pow(x, i):
    """The unique y at precision m - i with p^i * y == x (mod p^m)."""
    if i < 0:
        raise ValueError("i must be >= 0")
    if i >= x.m:
        raise PrecisionExhausted(f"dividing by p^{i} exhausts precision {x.m}")
    q = x.p ** i
    if x.value % q:
        raise NotDivisible(f"{x.p}^{i} does not divide {x.value}")
    return PadicScalar(x.p, x.m - i, x.value // q)


def _as_index(j):
    if isinstance(j, int):
        j = (j,)
    j = tuple(j)
    if any(e < 0 for e in j):
        raise ValueError("multi-index entries must be >= 0")
    return j


def legendre(k, p):
    """ord_p(k!) by Legendre's formula."""
    v, q = 0, p
    while q <= k:
        v += k // q
        q *= p
    return v


def ord_factorial_ratio(j, p):
    """ord_p(p^{|j|} / j!) for a multi-index ``j``."""
    j = _as_index(j)
    return sum(j) - sum(legendre(e, p) for e in j)


def factorial_inverse(j, p):
    """(j!)^{-1} mod p, where j! is the product of the entry factorials."""
    j = _as_index(j)
    if any(e >= p for e in j):
        raise FactorialNotInvertible(f"{j}! is divisible by {p}")
    prod = 1
    for e in j:
        prod = prod * factorial(e) % p
    return PadicScalar(p, 1, pow(prod, -1, p))


def taylor_coefficient(j, p, m):
    """Pair (shift, unit) with p^{|j|}/j! = p^shift * unit, unit taken mod p^m.

    ``shift`` may be >= m, in which case the term vanishes at precision m.
    """
    j = _as_index(j)
    total = 1
    for e in j:
        total *= factorial(e)
    v = sum(legendre(e, p) for e in j)
    unit = total // p ** v
    shift = sum(j) - v
    return shift, pow(unit, -1, p ** m)
