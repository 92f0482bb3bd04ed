"""Linear algebra over prime fields and the closed-point census of P^1.

Matrices over F_q with exact Gaussian elimination, enumeration of subspaces
by reduced row echelon representatives, monic irreducible polynomials by
sieve, and closed points of the projective line (Infinity plus irreducibles
in the dehomogenized variable y).
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .scalars import _is_prime


# polynomials over F_q: tuples of residues, low degree first, no trailing zeros

def poly_trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def poly_mul(p, r, q):
    if not p or not r:
        return ()
    out = [0] * (len(p) + len(r) - 1)
    for i, x in enumerate(p):
        if x:
            for j, y in enumerate(r):
                out[i + j] = (out[i + j] + x * y) % q
    return poly_trim(out)


def poly_divmod(p, r, q):
    r = poly_trim(r)
    if not r:
        raise ZeroDivisionError("polynomial division by zero")
    p = list(poly_trim(p))
    inv = pow(r[-1], q - 2, q) if q > 2 else r[-1]
    quo = [0] * max(0, len(p) - len(r) + 1)
    while len(p) >= len(r):
        f = (p[-1] * inv) % q
        d = len(p) - len(r)
        quo[d] = f
        for i, y in enumerate(r):
            p[d + i] = (p[d + i] - f * y) % q
        while p and p[-1] == 0:
            p.pop()
    return poly_trim(quo), poly_trim(p)


def poly_eval(p, x, q):
    acc = 0
    for c in reversed(p):
        acc = (acc * x + c) % q
    return acc


class FqMatrix:
    """Immutable matrix over F_q, entries stored reduced mod q."""

    __slots__ = ("q", "a", "_rr")

    def __init__(self, q, entries, shape=None):
        if not _is_prime(q):
            raise ValueError("FqMatrix needs a prime modulus, got %r" % (q,))
        a = np.asarray(entries, dtype=np.int64)
        if shape is not None:
            a = a.reshape(shape)
        if a.ndim != 2:
            raise ValueError("FqMatrix needs a 2-d entry array")
        a = a % q
        a.setflags(write=False)
        self.q = q
        self.a = a
        self._rr = None

    @classmethod
    def zeros(cls, q, rows, cols):
        return cls(q, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, q, n):
        return cls(q, np.eye(n, dtype=np.int64))

    @property
    def rows(self):
        return self.a.shape[0]

    @property
    def cols(self):
        return self.a.shape[1]

    def __matmul__(self, other):
        if self.q != other.q:
            raise ValueError("mixed moduli")
        return FqMatrix(self.q, (self.a @ other.a) % self.q)

    def __add__(self, other):
        return FqMatrix(self.q, self.a + other.a)

    def __sub__(self, other):
        return FqMatrix(self.q, self.a - other.a)

    def __neg__(self):
        return FqMatrix(self.q, -self.a)

    def transpose(self):
        return FqMatrix(self.q, self.a.T)

    def __eq__(self, other):
        if not isinstance(other, FqMatrix):
            return NotImplemented
        return self.q == other.q and self.a.shape == other.a.shape \
            and np.array_equal(self.a, other.a)

    def __hash__(self):
        return hash((self.q, self.a.shape, self.a.tobytes()))

    def rref(self):
        """Reduced row echelon form with its pivot columns."""
        if self._rr is not None:
            return self._rr
        q = self.q
        a = self.a.copy()
        m, n = a.shape
        piv = []
        r = 0
        for c in range(n):
            if r == m:
                break
            hits = np.nonzero(a[r:, c])[0]
            if hits.size == 0:
                continue
            p = r + int(hits[0])
            if p != r:
                a[[r, p]] = a[[p, r]]
            a[r] = (a[r] * pow(int(a[r, c]), q - 2, q)) % q if q > 2 else a[r]
            col = a[:, c].copy()
            col[r] = 0
            a = (a - np.outer(col, a[r])) % q
            piv.append(c)
            r += 1
        a.setflags(write=False)
        out = FqMatrix.__new__(FqMatrix)
        out.q = q
        out.a = a
        out._rr = None
        self._rr = (out, tuple(piv))
        return self._rr

    def __repr__(self):
        return "FqMatrix(q=%d, %r)" % (self.q, self.a.tolist())


def mat_rank(M):
    """Rank by forward elimination only; cheaper than full rref for the
    hom-system probes, which never need the reduced form."""
    q = M.q
    a = M.a % q
    m, n = a.shape
    r = 0
    for c in range(n):
        if r == m:
            break
        col = a[r:, c]
        hits = np.nonzero(col)[0]
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            a[[r, p]] = a[[p, r]]
        prow = a[r, c:]
        if q > 2 and prow[0] != 1:
            prow = (prow * pow(int(prow[0]), q - 2, q)) % q
            a[r, c:] = prow
        below = a[r + 1:, c]
        nz = np.nonzero(below)[0]
        if nz.size:
            rows = nz + r + 1
            a[rows, c:] = (a[rows, c:] - below[nz, None] * prow[None, :]) % q
        r += 1
    return r


def mat_kernel(M):
    """Basis of the right kernel {x : Mx = 0}, as rows of a matrix."""
    R, piv = M.rref()
    n = M.cols
    free = [c for c in range(n) if c not in piv]
    rows = np.zeros((len(free), n), dtype=np.int64)
    for i, f in enumerate(free):
        rows[i, f] = 1
        for j, p in enumerate(piv):
            rows[i, p] = (-R.a[j, f]) % M.q
    return FqMatrix(M.q, rows)


def mat_solve(M, b):
    """One solution of Mx = b as a list of residues, or None."""
    vec = np.asarray(b, dtype=np.int64).reshape(-1) % M.q
    if vec.shape[0] != M.rows:
        raise ValueError("right-hand side length mismatch")
    aug = FqMatrix(M.q, np.column_stack([M.a, vec]))
    R, piv = aug.rref()
    if M.cols in piv:
        return None
    x = [0] * M.cols
    for j, p in enumerate(piv):
        x[p] = int(R.a[j, M.cols])
    return x


def mat_div(A, B):
    """A^{-1} B for invertible square A, via one augmented reduction."""
    if A.rows != A.cols or A.rows != B.rows:
        raise ValueError("shape mismatch")
    n = A.cols
    aug = FqMatrix(A.q, np.concatenate([A.a, B.a], axis=1))
    R, piv = aug.rref()
    if len(piv) != n or tuple(piv) != tuple(range(n)):
        raise ValueError("left factor is singular")
    return FqMatrix(A.q, R.a[:, n:])


def gauss_binomial(n, k, q):
    """Number of k-dimensional subspaces of F_q^n, by the product formula."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    assert num % den == 0
    return num // den


def enumerate_subspaces(n, k, q):
    """All k-dimensional subspaces of F_q^n, one echelon basis matrix each."""
    if k < 0 or k > n:
        raise ValueError("subspace dimension out of range")
    if k == 0:
        yield FqMatrix.zeros(q, 0, n)
        return
    for piv in itertools.combinations(range(n), k):
        pivset = set(piv)
        slots = [(i, c) for i in range(k) for c in range(piv[i] + 1, n)
                 if c not in pivset]
        base = np.zeros((k, n), dtype=np.int64)
        for i, c in enumerate(piv):
            base[i, c] = 1
        for fill in itertools.product(range(q), repeat=len(slots)):
            a = base.copy()
            for (i, c), x in zip(slots, fill):
                a[i, c] = x
            yield FqMatrix(q, a)


@lru_cache(maxsize=None)
def irreducibles(d, q):
    """Monic irreducible polynomials of degree d over F_q, low-to-high tuples."""
    if d < 1:
        raise ValueError("irreducibles needs degree >= 1")
    if not _is_prime(q):
        raise ValueError("irreducibles needs a prime q")
    monic = lambda deg: (tuple(t) + (1,) for t in
                         itertools.product(range(q), repeat=deg))
    reducible = set()
    for i in range(1, d // 2 + 1):
        for p in monic(i):
            for r in monic(d - i):
                reducible.add(poly_mul(p, r, q))
    return tuple(sorted(p for p in monic(d) if p not in reducible))


def point_census(d, q):
    """Closed points of P^1 over F_q of degree d."""
    n = len(irreducibles(d, q))
    return n + 1 if d == 1 else n


class ClosedPoint:
    """A closed point of P^1 over F_q: Infinity, or a monic irreducible in y."""

    __slots__ = ("q", "coeffs")

    def __init__(self, q, coeffs=None):
        if not _is_prime(q):
            raise ValueError("ClosedPoint needs a prime q")
        self.q = q
        if coeffs is None:
            self.coeffs = None
            return
        coeffs = tuple(int(c) % q for c in coeffs)
        if len(coeffs) < 2 or coeffs[-1] != 1:
            raise ValueError("closed point needs a monic polynomial of degree >= 1")
        if coeffs not in irreducibles(len(coeffs) - 1, q):
            raise ValueError("polynomial %r is not irreducible over F_%d" % (coeffs, q))
        self.coeffs = coeffs

    @classmethod
    def infinity(cls, q):
        return cls(q)

    @property
    def is_infinity(self):
        return self.coeffs is None

    @property
    def degree(self):
        return 1 if self.coeffs is None else len(self.coeffs) - 1

    def sort_key(self):
        # Infinity first, then lexicographic on low-to-high coefficients
        return (0,) if self.coeffs is None else (1,) + self.coeffs

    def __eq__(self, other):
        if not isinstance(other, ClosedPoint):
            return NotImplemented
        return self.q == other.q and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.q, self.coeffs))

    def to_json(self):
        return "inf" if self.coeffs is None else list(self.coeffs)

    def __repr__(self):
        if self.coeffs is None:
            return "ClosedPoint(inf; q=%d)" % self.q
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                yv = "y" if i == 1 else "y^%d" % i
                terms.append(yv if c == 1 else "%d*%s" % (c, yv))
        return "ClosedPoint(%s; q=%d)" % (" + ".join(terms), self.q)


@lru_cache(maxsize=None)
def closed_points(d, q):
    """All closed points of degree d, Infinity first."""
    pts = [ClosedPoint(q, p) for p in irreducibles(d, q)]
    if d == 1:
        pts = [ClosedPoint.infinity(q)] + pts
    return tuple(sorted(pts, key=ClosedPoint.sort_key))
