"""Exact coefficient arithmetic.

Laurent polynomials and rational functions in a formal variable v over Q,
the quadratic ring Q[sqrt(q)] that v specializes into (v = q^(-1/2)),
quantum integers and factorials, and truncated formal power series with
exp/log.  No floating point anywhere.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import SpecializeError


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError("cannot coerce %r to an exact rational" % (x,))


def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class LaurentPoly:
    """Laurent polynomial in v, stored as {exponent: nonzero Fraction}."""

    __slots__ = ("c",)

    def __init__(self, coeffs=None):
        c = {}
        if coeffs:
            items = coeffs.items() if isinstance(coeffs, dict) else coeffs
            for k, x in items:
                x = _frac(x)
                if x:
                    y = c.get(k, Fraction(0)) + x
                    if y:
                        c[k] = y
                    elif k in c:
                        del c[k]
        self.c = c

    @classmethod
    def const(cls, x):
        return cls({0: _frac(x)})

    @classmethod
    def vpow(cls, k):
        return cls({k: Fraction(1)})

    def is_zero(self):
        return not self.c

    def coeff(self, k):
        return self.c.get(k, Fraction(0))

    def valuation(self):
        if not self.c:
            raise ValueError("valuation of the zero polynomial")
        return min(self.c)

    def degree(self):
        if not self.c:
            raise ValueError("degree of the zero polynomial")
        return max(self.c)

    def __add__(self, other):
        other = _as_laurent(other)
        if other is NotImplemented:
            return NotImplemented
        c = dict(self.c)
        for k, x in other.c.items():
            y = c.get(k, Fraction(0)) + x
            if y:
                c[k] = y
            elif k in c:
                del c[k]
        out = LaurentPoly.__new__(LaurentPoly)
        out.c = c
        return out

    __radd__ = __add__

    def __neg__(self):
        out = LaurentPoly.__new__(LaurentPoly)
        out.c = {k: -x for k, x in self.c.items()}
        return out

    def __sub__(self, other):
        other = _as_laurent(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _as_laurent(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _as_laurent(other)
        if other is NotImplemented:
            return NotImplemented
        c = {}
        for k1, x1 in self.c.items():
            for k2, x2 in other.c.items():
                k = k1 + k2
                y = c.get(k, Fraction(0)) + x1 * x2
                if y:
                    c[k] = y
                elif k in c:
                    del c[k]
        out = LaurentPoly.__new__(LaurentPoly)
        out.c = c
        return out

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("LaurentPoly powers take a nonnegative integer")
        out = LaurentPoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        other = _as_laurent(other)
        if other is NotImplemented:
            return NotImplemented
        return self.c == other.c

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    def specialize(self, q):
        out = ScalarQ.zero(q)
        for k, x in self.c.items():
            out = out + ScalarQ.vpow(k, q) * x
        return out

    def __repr__(self):
        if not self.c:
            return "0"
        parts = []
        for k in sorted(self.c):
            x = self.c[k]
            if k == 0:
                parts.append(str(x))
            else:
                vk = "v" if k == 1 else "v^%d" % k
                parts.append(vk if x == 1 else ("-" + vk if x == -1 else "%s*%s" % (x, vk)))
        return " + ".join(parts).replace("+ -", "- ")


def _as_laurent(x):
    if isinstance(x, LaurentPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return LaurentPoly({0: x})
    return NotImplemented


# dense polynomial helpers on lists of Fractions, low degree first

def _ptrim(p):
    while p and not p[-1]:
        p.pop()
    return p


def _pmul(p, r):
    out = [Fraction(0)] * (len(p) + len(r) - 1) if p and r else []
    for i, x in enumerate(p):
        if x:
            for j, y in enumerate(r):
                out[i + j] += x * y
    return _ptrim(out)


def _pdivmod(p, r):
    p = list(p)
    if not r:
        raise ZeroDivisionError("polynomial division by zero")
    quo = [Fraction(0)] * max(0, len(p) - len(r) + 1)
    while len(p) >= len(r) and _ptrim(p):
        if len(p) < len(r):
            break
        f = p[-1] / r[-1]
        d = len(p) - len(r)
        quo[d] = f
        for i, y in enumerate(r):
            p[d + i] -= f * y
        _ptrim(p)
    return _ptrim(quo), _ptrim(p)


def _pgcd(p, r):
    a, b = _ptrim(list(p)), _ptrim(list(r))
    while b:
        _, rem = _pdivmod(a, b)
        a, b = b, rem
    if not a:
        return []
    lead = a[-1]
    return [x / lead for x in a]


class RatFun:
    """Rational function in v, kept in a canonical reduced form.

    The denominator is an honest polynomial in v with constant coefficient 1
    and no common factor with the numerator, so == is structural equality.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        num = _as_laurent(num)
        den = _as_laurent(den)
        if num is NotImplemented or den is NotImplemented:
            raise TypeError("RatFun takes Laurent polynomials or rationals")
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            self.num = LaurentPoly()
            self.den = LaurentPoly.const(1)
            return
        nv = num.valuation()
        dv = den.valuation()
        nl = [num.coeff(nv + i) for i in range(num.degree() - nv + 1)]
        dl = [den.coeff(dv + i) for i in range(den.degree() - dv + 1)]
        g = _pgcd(nl, dl)
        if len(g) > 1:
            nl, _ = _pdivmod(nl, g)
            dl, _ = _pdivmod(dl, g)
        s = dl[0]
        self.num = LaurentPoly({nv - dv + i: x / s for i, x in enumerate(nl) if x})
        self.den = LaurentPoly({i: x / s for i, x in enumerate(dl) if x})

    @classmethod
    def vpow(cls, k):
        return cls(LaurentPoly.vpow(k))

    def is_zero(self):
        return self.num.is_zero()

    def __add__(self, other):
        other = _as_ratfun(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFun(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        out = RatFun.__new__(RatFun)
        out.num = -self.num
        out.den = self.den
        return out

    def __sub__(self, other):
        other = _as_ratfun(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _as_ratfun(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _as_ratfun(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFun(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_ratfun(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division of rational functions by zero")
        return RatFun(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        other = _as_ratfun(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, n):
        if not isinstance(n, int):
            raise ValueError("RatFun powers take an integer")
        if n < 0:
            if self.is_zero():
                raise ZeroDivisionError("negative power of zero")
            base = RatFun(self.den, self.num)
            n = -n
        else:
            base = self
        out = RatFun(1)
        for _ in range(n):
            out = out * base
        return out

    def __eq__(self, other):
        other = _as_ratfun(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def specialize(self, q):
        d = self.den.specialize(q)
        if d.is_zero():
            raise SpecializeError(
                "denominator %r vanishes at v = %d^(-1/2)" % (self.den, q))
        return self.num.specialize(q) / d

    def __repr__(self):
        if self.den == LaurentPoly.const(1):
            return repr(self.num)
        return "(%r)/(%r)" % (self.num, self.den)


def _as_ratfun(x):
    if isinstance(x, RatFun):
        return x
    if isinstance(x, (int, Fraction, LaurentPoly)):
        return RatFun(x)
    return NotImplemented


def ratfun_arith(x, y, op):
    """Combine two rational functions with op in {add, sub, mul, div}."""
    x = _as_ratfun(x)
    y = _as_ratfun(y)
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError("unknown op %r" % (op,))


def quantum_int(n):
    """[n] = (v^n - v^-n)/(v - v^-1) as a rational function (denominator 1)."""
    if n == 0:
        return RatFun(0)
    if n < 0:
        return -quantum_int(-n)
    return RatFun(LaurentPoly({n - 1 - 2 * j: 1 for j in range(n)}))


def quantum_factorial(n):
    if n < 0:
        raise ValueError("quantum factorial of a negative integer")
    out = RatFun(1)
    for j in range(2, n + 1):
        out = out * quantum_int(j)
    return out


class ScalarQ:
    """Element a + b*sqrt(q) of Q[sqrt(q)], q a fixed prime."""

    __slots__ = ("q", "a", "b")

    def __init__(self, a, b, q):
        if not _is_prime(q):
            raise ValueError("ScalarQ needs a prime q, got %r" % (q,))
        self.a = _frac(a)
        self.b = _frac(b)
        self.q = q

    @classmethod
    def zero(cls, q):
        return cls(0, 0, q)

    @classmethod
    def one(cls, q):
        return cls(1, 0, q)

    @classmethod
    def from_rat(cls, x, q):
        return cls(_frac(x), 0, q)

    @classmethod
    def vpow(cls, k, q):
        """v^k at v = q^(-1/2)."""
        if k % 2 == 0:
            e = k // 2
            return cls(Fraction(1, q**e) if e >= 0 else Fraction(q**(-e)), 0, q)
        e = (k + 1) // 2
        return cls(0, Fraction(1, q**e) if e >= 0 else Fraction(q**(-e)), q)

    def is_zero(self):
        return not self.a and not self.b

    def _check(self, other):
        if self.q != other.q:
            raise ValueError("mixed specialization primes %d and %d" % (self.q, other.q))

    def __add__(self, other):
        other = _as_scalarq(other, self.q)
        if other is NotImplemented:
            return NotImplemented
        self._check(other)
        return ScalarQ(self.a + other.a, self.b + other.b, self.q)

    __radd__ = __add__

    def __neg__(self):
        return ScalarQ(-self.a, -self.b, self.q)

    def __sub__(self, other):
        other = _as_scalarq(other, self.q)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _as_scalarq(other, self.q)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _as_scalarq(other, self.q)
        if other is NotImplemented:
            return NotImplemented
        self._check(other)
        return ScalarQ(self.a * other.a + self.b * other.b * self.q,
                       self.a * other.b + self.b * other.a, self.q)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q[sqrt(q)]")
        # (a + b s)^-1 = (a - b s)/(a^2 - b^2 q), nonzero since sqrt(q) is irrational
        n = self.a * self.a - self.b * self.b * self.q
        return ScalarQ(self.a / n, -self.b / n, self.q)

    def __truediv__(self, other):
        other = _as_scalarq(other, self.q)
        if other is NotImplemented:
            return NotImplemented
        self._check(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _as_scalarq(other, self.q)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if not isinstance(other, ScalarQ):
            return NotImplemented
        return self.q == other.q and self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b, self.q))

    def to_json(self):
        return {"a": str(self.a), "b": str(self.b), "q": self.q}

    def __repr__(self):
        if not self.b:
            return str(self.a)
        if not self.a:
            return "%s*sqrt(%d)" % (self.b, self.q)
        return "%s + %s*sqrt(%d)" % (self.a, self.b, self.q)


def _as_scalarq(x, q):
    if isinstance(x, ScalarQ):
        return x
    if isinstance(x, (int, Fraction)):
        return ScalarQ(x, 0, q)
    return NotImplemented


def specialize(f, q):
    """Evaluate a RatFun (or LaurentPoly) at v = q^(-1/2) inside Q[sqrt(q)]."""
    if isinstance(f, (int, Fraction)):
        return ScalarQ.from_rat(f, q)
    return f.specialize(q)


class FormalSeries:
    """Truncated power series in t with coefficients in a commutative algebra.

    coeffs is a list indexed by degree, length order+1.  The multiplicative
    unit of the coefficient algebra must be supplied so exp/log can build
    constant terms; the zero is derived as one*0.
    """

    __slots__ = ("coeffs", "one")

    def __init__(self, coeffs, one):
        self.coeffs = list(coeffs)
        if not self.coeffs:
            raise ValueError("FormalSeries needs at least the degree-0 coefficient")
        self.one = one

    @property
    def order(self):
        return len(self.coeffs) - 1

    def coeff(self, r):
        return self.coeffs[r]

    def _zero(self):
        return self.one * 0

    def __add__(self, other):
        if self.order != other.order:
            raise ValueError("series truncation orders differ")
        return FormalSeries([x + y for x, y in zip(self.coeffs, other.coeffs)], self.one)

    def __sub__(self, other):
        if self.order != other.order:
            raise ValueError("series truncation orders differ")
        return FormalSeries([x + (y * (-1)) for x, y in zip(self.coeffs, other.coeffs)], self.one)

    def __mul__(self, other):
        n = min(self.order, other.order)
        out = []
        for d in range(n + 1):
            acc = self._zero()
            for i in range(d + 1):
                acc = acc + self.coeffs[i] * other.coeffs[d - i]
            out.append(acc)
        return FormalSeries(out, self.one)

    def scale(self, c):
        return FormalSeries([x * c for x in self.coeffs], self.one)

    def __eq__(self, other):
        if not isinstance(other, FormalSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __repr__(self):
        return "FormalSeries(%r)" % (self.coeffs,)


def series_exp(s):
    """exp of a series with zero constant term, truncated at s.order."""
    zero = s._zero()
    if not s.coeffs[0] == zero:
        raise ValueError("series_exp needs constant term 0")
    n = s.order
    out = [s.one] + [zero] * n
    term = FormalSeries([s.one] + [zero] * n, s.one)
    for k in range(1, n + 1):
        term = (term * s).scale(Fraction(1, k))
        for d in range(n + 1):
            out[d] = out[d] + term.coeffs[d]
    return FormalSeries(out, s.one)


def series_log(s):
    """log of a series with constant term 1, truncated at s.order."""
    zero = s._zero()
    if not s.coeffs[0] == s.one:
        raise ValueError("series_log needs constant term 1")
    n = s.order
    u = FormalSeries([zero] + s.coeffs[1:], s.one)
    out = [zero] * (n + 1)
    term = FormalSeries([s.one] + [zero] * n, s.one)
    for k in range(1, n + 1):
        term = term * u
        sign = Fraction(1, k) if k % 2 == 1 else Fraction(-1, k)
        for d in range(n + 1):
            out[d] = out[d] + term.coeffs[d] * sign
    return FormalSeries(out, s.one)
