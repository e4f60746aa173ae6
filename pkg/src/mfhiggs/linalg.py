"""Dense matrices over a chart ring, as lists of rows of RingElements.

Columns are the convention for vectors throughout the package: a vector is a
plain list of ring elements and ``matvec(A, v)`` applies ``A`` to it.
"""

from functools import reduce


def zeros(ring, rows, cols=None):
    cols = rows if cols is None else cols
    z = ring.zero
    return [[z] * cols for _ in range(rows)]


def identity(ring, n):
    out = zeros(ring, n)
    for i in range(n):
        out[i][i] = ring.one
    return out


def shape(A):
    return len(A), (len(A[0]) if A else 0)


def matmap(f, A):
    return [[f(x) for x in row] for row in A]


def vecmap(f, v):
    return [f(x) for x in v]


def add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def scale(c, A):
    return [[c * a for a in row] for row in A]


def mul(A, B):
    n, k = shape(A)
    _, m = shape(B)
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = None
            for t in range(k):
                a = A[i][t]
                if a.is_zero():
                    continue
                b = B[t][j]
                if b.is_zero():
                    continue
                acc = a * b if acc is None else acc + a * b
            row.append(acc if acc is not None else A[i][0].ring.zero)
        out.append(row)
    return out


def matvec(A, v):
    out = []
    for row in A:
        acc = None
        for a, x in zip(row, v):
            if a.is_zero() or x.is_zero():
                continue
            acc = a * x if acc is None else acc + a * x
        out.append(acc if acc is not None else row[0].ring.zero)
    return out


def vadd(u, v):
    return [a + b for a, b in zip(u, v)]


def vsub(u, v):
    return [a - b for a, b in zip(u, v)]


def vscale(c, v):
    return [c * a for a in v]


def is_zero_vec(v):
    return all(x.is_zero() for x in v)


def is_zero(A):
    return all(x.is_zero() for row in A for x in row)


def transpose(A):
    return [list(col) for col in zip(*A)]


def column(A, j):
    return [row[j] for row in A]


def from_columns(cols, ring=None, rows=None):
    if not cols:
        return [[] for _ in range(rows or 0)]
    return [list(r) for r in zip(*cols)]


def equal(A, B):
    return shape(A) == shape(B) and all(a == b for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def first_difference(A, B):
    """(row, col) of the first differing entry, or None."""
    for i, (ra, rb) in enumerate(zip(A, B)):
        for j, (a, b) in enumerate(zip(ra, rb)):
            if a != b:
                return i, j
    return None


def kron(A, B):
    ra, ca = shape(A)
    rb, cb = shape(B)
    return [[A[i // rb][j // cb] * B[i % rb][j % cb] for j in range(ca * cb)]
            for i in range(ra * rb)]


def block_diag(A, B, ring):
    ra, ca = shape(A)
    rb, cb = shape(B)
    out = zeros(ring, ra + rb, ca + cb)
    for i in range(ra):
        for j in range(ca):
            out[i][j] = A[i][j]
    for i in range(rb):
        for j in range(cb):
            out[ra + i][ca + j] = B[i][j]
    return out


def power(A, e, ring):
    out = identity(ring, len(A))
    for _ in range(e):
        out = mul(out, A)
    return out


def det(A):
    """Determinant by cofactor expansion with memoised minors (any commutative ring)."""
    n = len(A)
    if n == 0:
        raise ValueError("determinant of an empty matrix")
    memo = {}

    def minor(row, cols):
        if row == n:
            return None
        key = (row, cols)
        if key in memo:
            return memo[key]
        acc = None
        sign = 1
        for j in cols:
            a = A[row][j]
            if not a.is_zero():
                rest = tuple(c for c in cols if c != j)
                sub_det = minor(row + 1, rest)
                term = a if sub_det is None else a * sub_det
                if sign < 0:
                    term = -term
                acc = term if acc is None else acc + term
            sign = -sign
        if acc is None:
            acc = A[0][0].ring.zero
        memo[key] = acc
        return acc

    return minor(0, tuple(range(n)))


def adjugate(A):
    n = len(A)
    ring = A[0][0].ring
    if n == 1:
        return [[ring.one]]
    out = zeros(ring, n)
    for i in range(n):
        for j in range(n):
            m = [[A[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
            d = det(m)
            out[j][i] = d if (i + j) % 2 == 0 else -d
    return out


def inverse(A):
    """Inverse of a matrix whose determinant is a unit; raises NotAUnit otherwise."""
    d = det(A)
    dinv = d.inverse()
    return scale(dinv, adjugate(A))


def sum_matrices(mats, ring, n):
    return reduce(add, mats, zeros(ring, n))
