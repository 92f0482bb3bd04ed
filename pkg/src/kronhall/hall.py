"""Twisted Hall algebra of Kronecker-quiver representations, with its
reduced Drinfeld double.

An element of the Hall algebra is a finite sum of basis words [X] K_alpha
with coefficients in Q[sqrt(q)].  The product is Ringel's twisted Hall
product: [X] * [Y] = v^{-<X,Y>} sum_Z F^Z_{X,Y} [Z], where v = q^{-1/2},
F counts subobjects of Z isomorphic to Y with quotient X, and K_alpha is
a grouplike torus element commuting by K_alpha [X] = v^{-(alpha,X)} [X]
K_alpha for the symmetrised Euler form (.,.).

K-classes are stored doubled: the pair kd represents K_{kd/2}.  The
doubled lattice accommodates the half-integral central shifts (powers of
C^{1/2} = K_{(1/2,1/2)}) that the projective-line generators carry; the
symmetrised form stays integer-valued on everything that actually occurs
because the half-integral directions lie in the radical.

The reduced Drinfeld double glues a plus and a minus copy of the Hall
algebra along the Green pairing, identifying the two torus lattices.
Elements are kept in the triangular normal form sum c * [P]+ K [M]-,
and `straighten` rewrites a product [Y]- [X]+ into that form by the
standard coproduct/pairing recursion.
"""

from fractions import Fraction
from functools import lru_cache

from .scalars import ScalarQ, quantum_factorial, specialize
from .kronrep import (
    IsoClass,
    aut_order,
    enumerate_iso_classes,
    euler_form,
    hall_products,
    regular_classes,
    subobject_census,
    subobject_census_capped,
    sym_form,
)


def halfsym(kd, x):
    """Symmetrised Euler form (kd/2, x), for a doubled K-class kd.

    Equals sym_form(kd, x) / 2 and is always an integer.
    """
    return kd[0] * x[0] + kd[1] * x[1] - kd[0] * x[1] - kd[1] * x[0]


def _vp(k, q):
    return ScalarQ.vpow(k, q)


def _k_entry_json(c):
    # doubled storage: even entries are honest integers, odd ones halves
    if c % 2 == 0:
        return c // 2
    return "%d/2" % c


def _k_json(kd):
    return [_k_entry_json(kd[0]), _k_entry_json(kd[1])]


class HallElement:
    """Finite sum of [X] K_alpha terms with ScalarQ coefficients.

    terms maps (IsoClass, kd) to ScalarQ, kd the doubled K-class.
    """

    __slots__ = ("q", "terms")

    def __init__(self, q, terms=None):
        self.q = q
        clean = {}
        if terms:
            for key, c in terms.items():
                if not isinstance(c, ScalarQ):
                    c = ScalarQ.from_rat(Fraction(c), q)
                if not c.is_zero():
                    clean[key] = c
        self.terms = clean

    @classmethod
    def zero(cls, q):
        return cls(q)

    @classmethod
    def one(cls, q):
        return cls(q, {(IsoClass.zero(), (0, 0)): ScalarQ.from_rat(Fraction(1), q)})

    @classmethod
    def cls_(cls, x, q, coeff=1):
        if not isinstance(coeff, ScalarQ):
            coeff = ScalarQ.from_rat(Fraction(coeff), q)
        return cls(q, {(x, (0, 0)): coeff})

    @classmethod
    def k_power(cls, alpha, q):
        """K_alpha for an integer class alpha."""
        kd = (2 * alpha[0], 2 * alpha[1])
        return cls(q, {(IsoClass.zero(), kd): ScalarQ.from_rat(Fraction(1), q)})

    @classmethod
    def k_doubled(cls, kd, q):
        """K_{kd/2}; kd entries may be odd (half-integral class)."""
        return cls(q, {(IsoClass.zero(), tuple(kd)): ScalarQ.from_rat(Fraction(1), q)})

    def is_zero(self):
        return not self.terms

    def scale(self, c):
        if not isinstance(c, ScalarQ):
            c = ScalarQ.from_rat(Fraction(c), self.q)
        return HallElement(self.q, {k: val * c for k, val in self.terms.items()})

    def __add__(self, other):
        if not isinstance(other, HallElement):
            return NotImplemented
        assert self.q == other.q
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return HallElement(self.q, out)

    def __sub__(self, other):
        if not isinstance(other, HallElement):
            return NotImplemented
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def __mul__(self, other):
        if isinstance(other, HallElement):
            return hall_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other):
        if not isinstance(other, HallElement):
            return NotImplemented
        return self.q == other.q and self.terms == other.terms

    def __hash__(self):
        return hash((self.q, frozenset(self.terms.items())))

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: (kv[0][0].sort_key(), kv[0][1]))

    def __repr__(self):
        if not self.terms:
            return "HallElement(0)"
        bits = []
        for (x, kd), c in self.sorted_terms():
            word = []
            if not x.is_zero() or kd == (0, 0):
                word.append("[%r]" % x if not x.is_zero() else "1")
            if kd != (0, 0):
                word.append("K(%s,%s)" % tuple(_k_entry_json(e) for e in kd))
            bits.append("(%r)*%s" % (c, "".join(word)))
        return " + ".join(bits)

    def to_json(self):
        out = []
        for (x, kd), c in self.sorted_terms():
            out.append({"class": x.to_json(), "K": _k_json(kd), "coeff": c.to_json()})
        return out


def hall_mul(a, b):
    """Twisted Hall product of two HallElements."""
    assert a.q == b.q
    q = a.q
    out = {}

    def bump(key, c):
        out[key] = out[key] + c if key in out else c

    for (x, ka), ca in a.terms.items():
        for (y, kb), cb in b.terms.items():
            kd = (ka[0] + kb[0], ka[1] + kb[1])
            base = ca * cb * _vp(-halfsym(ka, y.dim), q)
            if x.is_zero():
                bump((y, kd), base)
            elif y.is_zero():
                bump((x, kd), base)
            else:
                tw = _vp(-euler_form(x.dim, y.dim), q)
                for z, f in hall_products(x, y, q).items():
                    bump((z, kd), base * tw * f)
    return HallElement(q, out)


@lru_cache(maxsize=None)
def _split_pairs(z, q):
    """All coproduct legs of [z]: tuples (quotient, sub, F, P/a_z as Fraction).

    P^z_{x,y} = F^z_{x,y} a_x a_y, and the stored fraction is P / a_z.
    """
    az = aut_order(z, q)
    pairs = []
    for (x, y), f in subobject_census(z, q).items():
        frac = Fraction(f * aut_order(x, q) * aut_order(y, q), az)
        pairs.append((x, y, f, frac))
    pairs.sort(key=lambda t: (t[0].sort_key(), t[1].sort_key()))
    return tuple(pairs)


@lru_cache(maxsize=None)
def _split_pairs_capped(z, q, cap):
    """The coproduct legs of [z] with one side under cap, same tuple shape."""
    az = aut_order(z, q)
    pairs = []
    for (x, y), f in subobject_census_capped(z, q, cap).items():
        frac = Fraction(f * aut_order(x, q) * aut_order(y, q), az)
        pairs.append((x, y, f, frac))
    pairs.sort(key=lambda t: (t[0].sort_key(), t[1].sort_key()))
    return tuple(pairs)


def hall_coproduct(a):
    """Coproduct as a list of (left, right) single-term HallElement pairs.

    Delta([Z] K_gamma) = sum v^{-<X,Y>} (P^Z_{X,Y}/a_Z) [X] K_{Y+gamma}
    (x) [Y] K_gamma, the sum over quotient/sub splits (X, Y) of Z.
    """
    q = a.q
    out = []
    for (z, kd), c in a.terms.items():
        if z.is_zero():
            left = HallElement(q, {(z, kd): c})
            out.append((left, HallElement.k_doubled(kd, q)))
            continue
        for x, y, _f, frac in _split_pairs(z, q):
            coeff = c * _vp(-euler_form(x.dim, y.dim), q) * ScalarQ.from_rat(frac, q)
            kleft = (kd[0] + 2 * y.dim[0], kd[1] + 2 * y.dim[1])
            left = HallElement(q, {(x, kleft): coeff})
            right = HallElement(q, {(y, kd): ScalarQ.from_rat(Fraction(1), q)})
            if not left.is_zero():
                out.append((left, right))
    return out


def green_pair(a, b):
    """Green's Hopf pairing: ([X]K_alpha, [Y]K_beta) = v^{-(alpha,beta)} d_{X,Y} / a_X."""
    assert a.q == b.q
    q = a.q
    tot = ScalarQ.from_rat(Fraction(0), q)
    for (x, ka), ca in a.terms.items():
        for (y, kb), cb in b.terms.items():
            if x != y:
                continue
            e4 = sym_form(ka, kb)
            assert e4 % 4 == 0, "pairing exponent not integral"
            val = _vp(-(e4 // 4), q) * ScalarQ.from_rat(Fraction(1, aut_order(x, q)), q)
            tot = tot + ca * cb * val
    return tot


def divided_power(a, n):
    """[X]^{(n)} = [X]^n / [n]!_v for a single-class element."""
    assert len(a.terms) == 1
    ((x, kd), c), = a.terms.items()
    assert kd == (0, 0), "divided powers only for pure classes"
    q = a.q
    out = HallElement.one(q)
    for _ in range(n):
        out = hall_mul(out, a)
    fact = specialize(quantum_factorial(n), q)
    return out.scale(fact.inverse())


def one_alpha(d, q):
    """Characteristic function of the stack of all reps of dimension d."""
    terms = {}
    one = ScalarQ.from_rat(Fraction(1), q)
    for x in enumerate_iso_classes(tuple(d), q):
        terms[(x, (0, 0))] = one
    return HallElement(q, terms)


def tube_one(r, q):
    """Sum of all regular classes of dimension (r, r)."""
    terms = {}
    one = ScalarQ.from_rat(Fraction(1), q)
    for x in regular_classes(r, q):
        terms[(x, (0, 0))] = one
    return HallElement(q, terms)


class DoubleElement:
    """Element of the reduced Drinfeld double in triangular normal form.

    terms maps (plus: IsoClass, kd, minus: IsoClass) to ScalarQ and the
    triple stands for [plus]+ K_{kd/2} [minus]-.
    """

    __slots__ = ("q", "terms")

    def __init__(self, q, terms=None):
        self.q = q
        clean = {}
        if terms:
            for key, c in terms.items():
                if not isinstance(c, ScalarQ):
                    c = ScalarQ.from_rat(Fraction(c), q)
                if not c.is_zero():
                    clean[key] = c
        self.terms = clean

    @classmethod
    def zero(cls, q):
        return cls(q)

    @classmethod
    def one(cls, q):
        z = IsoClass.zero()
        return cls(q, {(z, (0, 0), z): ScalarQ.from_rat(Fraction(1), q)})

    @classmethod
    def k_doubled(cls, kd, q):
        z = IsoClass.zero()
        return cls(q, {(z, tuple(kd), z): ScalarQ.from_rat(Fraction(1), q)})

    @classmethod
    def from_plus(cls, h):
        """Embed a HallElement into the plus wing."""
        q = h.q
        z = IsoClass.zero()
        return cls(q, {(x, kd, z): c for (x, kd), c in h.terms.items()})

    @classmethod
    def from_minus(cls, h):
        """Embed a HallElement into the minus wing.

        [Y] K_alpha goes to [Y]- K_alpha = v^{-(alpha,Y)} K_alpha [Y]-,
        normal form keeping K in the middle slot.
        """
        q = h.q
        z = IsoClass.zero()
        terms = {}
        for (y, kd), c in h.terms.items():
            key = (z, kd, y)
            val = c * _vp(-halfsym(kd, y.dim), q)
            terms[key] = terms[key] + val if key in terms else val
        return cls(q, terms)

    def is_zero(self):
        return not self.terms

    def scale(self, c):
        if not isinstance(c, ScalarQ):
            c = ScalarQ.from_rat(Fraction(c), self.q)
        return DoubleElement(self.q, {k: val * c for k, val in self.terms.items()})

    def __add__(self, other):
        if not isinstance(other, DoubleElement):
            return NotImplemented
        assert self.q == other.q
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return DoubleElement(self.q, out)

    def __sub__(self, other):
        if not isinstance(other, DoubleElement):
            return NotImplemented
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def __mul__(self, other):
        if isinstance(other, DoubleElement):
            return dmul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other):
        if not isinstance(other, DoubleElement):
            return NotImplemented
        return self.q == other.q and self.terms == other.terms

    def __hash__(self):
        return hash((self.q, frozenset(self.terms.items())))

    def sorted_terms(self):
        return sorted(
            self.terms.items(),
            key=lambda kv: (kv[0][0].sort_key(), kv[0][1], kv[0][2].sort_key()),
        )

    def __repr__(self):
        if not self.terms:
            return "DoubleElement(0)"
        bits = []
        for (p, kd, m), c in self.sorted_terms():
            word = []
            if not p.is_zero():
                word.append("[%r]+" % p)
            if kd != (0, 0):
                word.append("K(%s,%s)" % tuple(_k_entry_json(e) for e in kd))
            if not m.is_zero():
                word.append("[%r]-" % m)
            if not word:
                word.append("1")
            bits.append("(%r)*%s" % (c, "".join(word)))
        return " + ".join(bits)

    def to_json(self):
        out = []
        for (p, kd, m), c in self.sorted_terms():
            out.append({
                "plus": p.to_json(),
                "K": _k_json(kd),
                "minus": m.to_json(),
                "coeff": c.to_json(),
            })
        return out


@lru_cache(maxsize=None)
def straighten(y, x, q):
    """Normal form of [Y]- [X]+ in the reduced double.

    Writing Delta([Y]) = sum ca [A1](x)[A2] and Delta([X]) = sum cb
    [B1](x)[B2] (quotient leg first, K-factors spelled out below), the
    double relation pairs the outer legs against each other.  Isolating
    the extremal term, whose coefficient is exactly 1, gives

      [Y]-[X]+ = sum_{A1 = B2} ca cb / a_{A1} * [B1]+ K_{A1} [A2]-
               - sum_{A2 = B1, not extremal} ca cb / a_{A2}
                   * v^{(A2,B2)} * str(A1, B2) * K_{-A2},

    and the trailing K commutes left past the minus leg of each
    straightened term at the cost of v^{(A2,M)}.
    """
    zero = IsoClass.zero()
    one = ScalarQ.from_rat(Fraction(1), q)
    if y.is_zero():
        return DoubleElement(q, {(x, (0, 0), zero): one})
    if x.is_zero():
        return DoubleElement(q, {(zero, (0, 0), y): one})

    ay = aut_order(y, q)
    ax = aut_order(x, q)
    # only legs whose matched side fits under both dimensions can pair up,
    # so a small operand caps the census of a large one
    cap = (min(y.dim[0], x.dim[0]), min(y.dim[1], x.dim[1]))
    if cap[0] + cap[1] <= 3:
        split = lambda z: _split_pairs_capped(z, q, cap)
    else:
        split = lambda z: _split_pairs(z, q)
    legs_y = [
        (a1, a2, _vp(-euler_form(a1.dim, a2.dim), q) * ScalarQ.from_rat(fr, q))
        for a1, a2, _f, fr in split(y)
    ]
    legs_x = [
        (b1, b2, _vp(-euler_form(b1.dim, b2.dim), q) * ScalarQ.from_rat(fr, q))
        for b1, b2, _f, fr in split(x)
    ]

    out = {}

    def bump(key, c):
        if key in out:
            out[key] = out[key] + c
        else:
            out[key] = c

    for a1, a2, ca in legs_y:
        for b1, b2, cb in legs_x:
            if a1 == b2:
                coeff = ca * cb * ScalarQ.from_rat(Fraction(1, aut_order(a1, q)), q)
                kd = (2 * a1.dim[0], 2 * a1.dim[1])
                bump((b1, kd, a2), coeff)
            if a2 == b1:
                if a2.is_zero():
                    # only the extremal split has both inner legs zero
                    continue
                head = (
                    ca * cb
                    * ScalarQ.from_rat(Fraction(1, aut_order(a2, q)), q)
                    * _vp(sym_form(a2.dim, b2.dim), q)
                )
                sub = straighten(a1, b2, q)
                da2 = a2.dim
                for (p, g, m), ct in sub.terms.items():
                    kd = (g[0] - 2 * da2[0], g[1] - 2 * da2[1])
                    bump((p, kd, m), -head * ct * _vp(sym_form(da2, m.dim), q))
    return DoubleElement(q, out)


@lru_cache(maxsize=None)
def _wing_mul(x, y, q):
    """Pure-class twisted product [x][y] as a tuple of (class, coeff)."""
    if x.is_zero():
        return ((y, ScalarQ.from_rat(Fraction(1), q)),)
    if y.is_zero():
        return ((x, ScalarQ.from_rat(Fraction(1), q)),)
    tw = _vp(-euler_form(x.dim, y.dim), q)
    return tuple(
        (z, tw * ScalarQ.from_rat(Fraction(f), q))
        for z, f in hall_products(x, y, q).items()
    )


def dmul(a, b):
    """Product in the reduced double, output in triangular normal form."""
    assert a.q == b.q
    q = a.q
    terms = {}

    def bump(key, c):
        if key in terms:
            terms[key] = terms[key] + c
        else:
            terms[key] = c

    for (p1, k1, m1), c1 in a.terms.items():
        for (p2, k2, m2), c2 in b.terms.items():
            mid = straighten(m1, p2, q)
            for (r, g, s), ct in mid.terms.items():
                coeff = (
                    c1 * c2 * ct
                    * _vp(-halfsym(k1, r.dim), q)
                    * _vp(-halfsym(k2, s.dim), q)
                )
                kd = (k1[0] + g[0] + k2[0], k1[1] + g[1] + k2[1])
                for w1, cw1 in _wing_mul(p1, r, q):
                    for w2, cw2 in _wing_mul(s, m2, q):
                        bump((w1, kd, w2), coeff * cw1 * cw2)
    return DoubleElement(q, terms)


def dbracket(a, b):
    return dmul(a, b) - dmul(b, a)
