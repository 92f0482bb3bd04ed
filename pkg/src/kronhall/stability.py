"""Slope stability for quiver classes and the semistable characteristic functions.

A stability function is an integer linear form pair (a, b) defining
Z(d) = (a.d) + i(b.d) on dimension vectors, with slope mu(d) = -(a.d)/(b.d).
The element 1^{ss}_alpha collecting the semistable classes of dimension alpha
is computed two independent ways:

  * a recursion that strips, from the full stratum sum one_alpha(alpha),
    every product of smaller semistable strata whose slopes form an
    admissible chain (each class has a unique such filtration, so the
    leftover is exactly the semistable part), and

  * a closed inversion summing signed products of full stratum sums over
    ordered decompositions whose proper prefix sums stay below the slope
    of alpha.

Products are written quotient-first throughout, matching hall_mul: in
[X] * [Y] the right factor Y is the subobject.  A filtration therefore
appears as a product whose slopes increase left to right (the deepest
subobject, of largest slope, sits rightmost).  The variant flags on the
recursion exist to compare this chain order against its mirror images; the
brute-force oracle below picks out the correct one.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce

from .hall import HallElement, hall_mul, one_alpha
from .kronrep import enumerate_iso_classes, euler_form, subobject_census
from .scalars import ScalarQ


@dataclass(frozen=True)
class StabilityFunction:
    """Integer linear forms a, b with Z(d) = (a.d) + i(b.d)."""

    a: tuple
    b: tuple

    def __post_init__(self):
        # the imaginary part must be positive on every nonzero effective class
        for gen in ((1, 0), (0, 1)):
            if self.b[0] * gen[0] + self.b[1] * gen[1] <= 0:
                raise ValueError("b.%r must be positive" % (gen,))

    def z(self, d):
        """Z(d) as an exact (real, imag) integer pair."""
        return (self.a[0] * d[0] + self.a[1] * d[1],
                self.b[0] * d[0] + self.b[1] * d[1])

    def mu(self, d):
        re, im = self.z(d)
        if im == 0:
            raise ValueError("slope undefined on %r" % (d,))
        return Fraction(-re, im)


def default_stability():
    """Z(m,n) = -m + i(m+n): slope m/(m+n), tubes at 1/2, [S1] at 1, [S2] at 0."""
    return StabilityFunction(a=(-1, 0), b=(1, 1))


# chain admissibility, read left (quotient end) to right (subobject end)
_VARIANTS = {
    "inc": lambda prev, cur: cur > prev,
    "inc-weak": lambda prev, cur: cur >= prev,
    "dec": lambda prev, cur: cur < prev,
    "dec-weak": lambda prev, cur: cur <= prev,
}


def _parts_inside(alpha):
    for m in range(alpha[0] + 1):
        for n in range(alpha[1] + 1):
            if m or n:
                yield (m, n)


def _slope_chains(alpha, Z, variant):
    """Ordered decompositions of alpha whose slope chain is admissible."""
    ok = _VARIANTS[variant]

    def rec(rest, prev):
        for part in _parts_inside(rest):
            cur = Z.mu(part)
            if prev is not None and not ok(prev, cur):
                continue
            left = (rest[0] - part[0], rest[1] - part[1])
            if left == (0, 0):
                yield (part,)
            else:
                for tail in rec(left, cur):
                    yield (part,) + tail

    return rec(tuple(alpha), None)


def _cross_euler(chain):
    return sum(euler_form(chain[i], chain[j])
               for i in range(len(chain)) for j in range(i + 1, len(chain)))


@lru_cache(maxsize=None)
def _hn(alpha, Z, q, variant):
    el = one_alpha(alpha, q)
    for chain in _slope_chains(alpha, Z, variant):
        if len(chain) < 2:
            continue
        prod = reduce(hall_mul, (_hn(d, Z, q, variant) for d in chain))
        el = el - prod.scale(ScalarQ.vpow(_cross_euler(chain), q))
    return el


def hn_semistable(alpha, Z=None, q=2, variant="inc"):
    """1^{ss}_alpha via the filtration recursion."""
    if Z is None:
        Z = default_stability()
    return _hn(tuple(alpha), Z, q, variant)


def reineke_semistable(alpha, Z=None, q=2):
    """1^{ss}_alpha via the signed closed inversion over prefix-bounded chains."""
    if Z is None:
        Z = default_stability()
    alpha = tuple(alpha)
    mu_a = Z.mu(alpha)

    def rec(rest, acc):
        for part in _parts_inside(rest):
            left = (rest[0] - part[0], rest[1] - part[1])
            if left == (0, 0):
                yield (part,)
                continue
            nxt = (acc[0] + part[0], acc[1] + part[1])
            if Z.mu(nxt) < mu_a:
                for tail in rec(left, nxt):
                    yield (part,) + tail

    tot = HallElement.zero(q)
    for chain in rec(alpha, (0, 0)):
        prod = reduce(hall_mul, (one_alpha(d, q) for d in chain))
        prod = prod.scale(ScalarQ.vpow(_cross_euler(chain), q))
        tot = tot + (prod if len(chain) % 2 else -prod)
    return tot


def brute_semistable(alpha, Z=None, q=2):
    """Oracle: keep the classes with no subrepresentation of larger slope.

    Every subobject class of every representative is read off the cached
    subspace census, so this is exact and independent of the recursions.
    """
    if Z is None:
        Z = default_stability()
    alpha = tuple(alpha)
    mu_a = Z.mu(alpha)
    one = ScalarQ.one(q)
    terms = {}
    for cls in enumerate_iso_classes(alpha, q):
        ok = True
        for _, sub in subobject_census(cls, q):
            d = sub.dim
            if d == (0, 0) or d == alpha:
                continue
            if Z.mu(d) > mu_a:
                ok = False
                break
        if ok:
            terms[(cls, (0, 0))] = one
    return HallElement(q, terms)


class HNDecomposition:
    """Ordered semistable strata with strictly decreasing slopes."""

    def __init__(self, Z, pieces):
        slopes = [Z.mu(d) for d, _ in pieces]
        for i in range(len(slopes) - 1):
            if slopes[i] <= slopes[i + 1]:
                raise ValueError("slopes must strictly decrease")
        self.stability = Z
        self.pieces = list(pieces)

    def classes(self):
        return [d for d, _ in self.pieces]


def hn_strata(alpha, Z=None, q=2):
    """All filtration types of alpha, deepest (largest slope) stratum first."""
    if Z is None:
        Z = default_stability()
    out = []
    for chain in _slope_chains(tuple(alpha), Z, "inc"):
        pieces = [(d, hn_semistable(d, Z, q)) for d in reversed(chain)]
        out.append(HNDecomposition(Z, pieces))
    return out
