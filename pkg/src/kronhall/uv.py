"""Two symbolic presentations of the quantum affine rank-two algebra.

The Chevalley presentation has generators E_i, F_i, K_i^{±1} (i = 1, 2)
subject to the standard relations (central Z = K_1 K_2, weight commutations,
the E/F commutator, and both cubic Serre relations).  The loop presentation
has generators X_n^± (n in Z), H_r (r != 0), K^{±1} and the central square
root C^{1/2}, subject to the Heisenberg, Hecke-shift, quadratic, and wing
commutator relations.

Elements of either presentation are formal words with exact rational-function
coefficients in v (PresTerm).  The loop side has a normal form: divided
powers of X^+ with indices descending, then H_{r>0}, then K^a C^{b/2}, then
X^- divided powers, then H_{r<0}.  loop_normal_form rewrites any loop word
into that shape.  map_G translates Chevalley generators into loop words,
lusztig_S / coxeter_A implement the braid symmetries on the Chevalley side
and loop_coxeter_A the lattice shift on the loop side, and ev_q evaluates
either presentation in the concrete double DH(Q) at a chosen prime.

One printed convention is corrected here: the wing commutator
[X_m^+, X_n^-] carries K on the Psi^+ term and K^{-1} on the Psi^- term for
every m, n.  The variant with K^{sign(m+n)} on both terms (which would make
[X_0^+, X_0^-] vanish) is inconsistent with the E/F commutator under the
translation map, so the uniform placement is used throughout.

The braid symmetry tables are calibrated against the concrete double rather
than copied from a symmetric-looking display.  Because <S1bar,S2bar> = -2
while <S2bar,S1bar> = 0, the S^+ braid rows take weight v^{-a} where the
S^- rows take v^{-b}, and the four short rows carry the K exponents that
make S^+ and S^- mutually inverse and make the translated squares commute
with the lattice shift.  Each choice is pinned by an evaluation identity
(the braid rows land on [I_1] resp. [P_1] in DH(Q)) and double-checked by
relator preservation; see the tests.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
import re

from .errors import BoundError
from .hall import DoubleElement, HallElement, dmul
from .kronrep import IsoClass
from .p1 import L, T_tilde, c_half, k_line
from .scalars import LaurentPoly, RatFun, quantum_factorial, quantum_int

S1 = IsoClass.I(0)
S2 = IsoClass.P(0)

# Cartan matrix of the affine rank-two diagram; both off-diagonals are -2.
_CARTAN = {(1, 1): 2, (1, 2): -2, (2, 1): -2, (2, 2): 2}

_R1 = RatFun(1)
_V = RatFun.vpow(1)
_VINV = RatFun.vpow(-1)
# v/(v - v^{-1}), the coefficient of the E/F and wing commutators
_VV = _V / (_V - _VINV)


@dataclass(frozen=True)
class RewriteBounds:
    max_steps: int = 200000
    index_window: int = 32
    max_word_len: int = 128


DEFAULT_BOUNDS = RewriteBounds()


def _qint(n):
    return quantum_int(n)


def _qfact(n):
    return quantum_factorial(n)


# ---------------------------------------------------------------------------
# words and PresTerm

def _check_letter(pres, a):
    if pres == "dj":
        if a[0] in ("E", "F") and len(a) == 2 and a[1] in (1, 2):
            return
        if a[0] == "K" and len(a) == 3 and a[1] in (1, 2) and a[2]:
            return
    else:
        if a[0] == "X" and len(a) == 3 and a[2] in (1, -1):
            return
        if a[0] == "H" and len(a) == 2 and a[1] != 0:
            return
        if a[0] in ("K", "C") and len(a) == 2:
            return
    raise ValueError("bad %s letter %r" % (pres, a))


def _strip_word(pres, word):
    """Drop unit K/C letters and merge adjacent ones of the same kind."""
    out = []
    for a in word:
        if a[0] == "K" and pres == "loop":
            if out and out[-1][0] == "K":
                e = out[-1][1] + a[1]
                out.pop()
                if e:
                    out.append(("K", e))
                continue
            if a[1] == 0:
                continue
        elif a[0] == "C":
            if out and out[-1][0] == "C":
                h = out[-1][1] + a[1]
                out.pop()
                if h:
                    out.append(("C", h))
                continue
            if a[1] == 0:
                continue
        elif a[0] == "K":
            if out and out[-1][0] == "K" and out[-1][1] == a[1]:
                e = out[-1][2] + a[2]
                out.pop()
                if e:
                    out.append(("K", a[1], e))
                continue
            if a[2] == 0:
                continue
        out.append(a)
    return tuple(out)


class PresTerm:
    """Formal sum of words in one presentation, RatFun coefficients."""

    __slots__ = ("pres", "terms")

    def __init__(self, pres, terms=None):
        if pres not in ("dj", "loop"):
            raise ValueError("presentation must be 'dj' or 'loop'")
        self.pres = pres
        clean = {}
        if terms:
            for word, c in terms.items():
                if not isinstance(c, RatFun):
                    c = RatFun(c)
                if c.is_zero():
                    continue
                for a in word:
                    _check_letter(pres, a)
                word = _strip_word(pres, word)
                acc = clean.get(word)
                acc = c if acc is None else acc + c
                if acc.is_zero():
                    clean.pop(word, None)
                else:
                    clean[word] = acc
        self.terms = clean

    @classmethod
    def zero(cls, pres):
        return cls(pres)

    @classmethod
    def one(cls, pres):
        return cls(pres, {(): _R1})

    @classmethod
    def letter(cls, pres, a, coeff=1):
        return cls(pres, {(a,): RatFun(coeff)})

    def is_zero(self):
        return not self.terms

    def scale(self, c):
        if not isinstance(c, RatFun):
            c = RatFun(c)
        return PresTerm(self.pres, {w: x * c for w, x in self.terms.items()})

    def _check(self, other):
        if not isinstance(other, PresTerm) or other.pres != self.pres:
            raise ValueError("presentation mismatch")

    def __add__(self, other):
        self._check(other)
        t = dict(self.terms)
        for w, c in other.terms.items():
            t[w] = t[w] + c if w in t else c
        return PresTerm(self.pres, t)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return self.scale(-1)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, RatFun)):
            return self.scale(other)
        self._check(other)
        t = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                c = c1 * c2
                t[w] = t[w] + c if w in t else c
        return PresTerm(self.pres, t)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, RatFun)):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other):
        return (isinstance(other, PresTerm) and other.pres == self.pres
                and other.terms == self.terms)

    def __hash__(self):
        return hash((self.pres, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for w in sorted(self.terms):
            c = self.terms[w]
            body = " ".join(render_letter(a) for a in w) if w else "1"
            bits.append("(%r)*%s" % (c, body))
        return " + ".join(bits)


def render_letter(a):
    if a[0] in ("E", "F"):
        return "%s%d" % (a[0], a[1])
    if a[0] == "K" and len(a) == 3:
        return "K%d" % a[1] if a[2] == 1 else "K%d^%d" % (a[1], a[2])
    if a[0] == "X":
        return "X[%d]%s" % (a[1], "+" if a[2] == 1 else "-")
    if a[0] == "H":
        return "H[%d]" % a[1]
    if a[0] == "K":
        return "K" if a[1] == 1 else "K^%d" % a[1]
    h = a[1]
    if h % 2 == 0:
        return "C" if h == 2 else "C^%d" % (h // 2)
    return "C^{%d/2}" % h


def E(i):
    return PresTerm.letter("dj", ("E", i))


def F(i):
    return PresTerm.letter("dj", ("F", i))


def Kdj(i, e=1):
    if e == 0:
        return PresTerm.one("dj")
    return PresTerm.letter("dj", ("K", i, e))


def X(n, sign):
    return PresTerm.letter("loop", ("X", n, sign))


def H(r):
    return PresTerm.letter("loop", ("H", r))


def Kloop(e=1):
    if e == 0:
        return PresTerm.one("loop")
    return PresTerm.letter("loop", ("K", e))


def Chalf(h=1):
    if h == 0:
        return PresTerm.one("loop")
    return PresTerm.letter("loop", ("C", h))


def divided(gen, m):
    """m-th divided power of a single-letter generator: gen^m / [m]!."""
    if m < 0:
        raise ValueError("divided power needs m >= 0")
    if len(gen.terms) != 1:
        raise ValueError("divided power of a non-letter element")
    (word, c), = gen.terms.items()
    if len(word) != 1 or c != _R1:
        raise ValueError("divided power of a non-letter element")
    return PresTerm(gen.pres, {word * m: _R1 / _qfact(m)})


# ---------------------------------------------------------------------------
# term input language

_TOK_DJ = re.compile(r"^(E|F|K)([12])(?:\^(\(?)(-?\d+)\)?)?$")
_TOK_X = re.compile(r"^X\[(-?\d+)\]([+-])(?:\^(\(?)(\d+)\)?)?$")
_TOK_H = re.compile(r"^H\[(-?\d+)\](?:\^(\d+))?$")
_TOK_K = re.compile(r"^K(?:\^(-?\d+))?$")
_TOK_C = re.compile(r"^C(?:\^(?:\{(-?\d+)(/2)?\}|\((-?\d+)/2\)|(-?\d+)))?$")


def parse_term(s):
    """Parse one product of generator tokens, e.g. 'E1^(2) F2 K1^-1' or
    'X[3]+ H[-2] C^{1/2}'.  Returns a PresTerm."""
    toks = s.split()
    if not toks:
        raise ValueError("empty term")
    out = None
    for pos, tok in enumerate(toks):
        m = _TOK_DJ.match(tok)
        piece = None
        if m:
            kind, i, par, n = m.group(1), int(m.group(2)), m.group(3), m.group(4)
            n = 1 if n is None else int(n)
            if kind == "K":
                if par:
                    raise ValueError("no divided powers of K (token %r, position %d)" % (tok, pos))
                piece = Kdj(i, n)
            else:
                gen = E(i) if kind == "E" else F(i)
                if n < 0:
                    raise ValueError("negative power of %s (token %r, position %d)" % (kind, tok, pos))
                piece = divided(gen, n) if par else reduce(
                    lambda a, b: a * b, [gen] * n, PresTerm.one("dj"))
        elif _TOK_X.match(tok):
            m = _TOK_X.match(tok)
            n0, sgn = int(m.group(1)), 1 if m.group(2) == "+" else -1
            par, p = m.group(3), 1 if m.group(4) is None else int(m.group(4))
            gen = X(n0, sgn)
            piece = divided(gen, p) if par else reduce(
                lambda a, b: a * b, [gen] * p, PresTerm.one("loop"))
        elif _TOK_H.match(tok):
            m = _TOK_H.match(tok)
            r, p = int(m.group(1)), 1 if m.group(2) is None else int(m.group(2))
            if r == 0:
                raise ValueError("H[0] is not a generator (position %d)" % pos)
            piece = reduce(lambda a, b: a * b, [H(r)] * p, PresTerm.one("loop"))
        elif _TOK_K.match(tok) and tok[0] == "K":
            m = _TOK_K.match(tok)
            piece = Kloop(1 if m.group(1) is None else int(m.group(1)))
        elif _TOK_C.match(tok) and tok[0] == "C":
            m = _TOK_C.match(tok)
            if m.group(1) is not None:
                h = int(m.group(1)) if m.group(2) else 2 * int(m.group(1))
            elif m.group(3) is not None:
                h = int(m.group(3))
            elif m.group(4) is not None:
                h = 2 * int(m.group(4))
            else:
                h = 2
            piece = Chalf(h)
        else:
            raise ValueError("cannot parse token %r (position %d)" % (tok, pos))
        out = piece if out is None else out * piece
    return out


# ---------------------------------------------------------------------------
# loop rewriting

def _zone(a):
    if a[0] == "X":
        return 0 if a[2] == 1 else 3
    if a[0] == "H":
        return 1 if a[1] > 0 else 4
    return 2


def _exp_hseries(order, coeff_of_r):
    """Coefficients 1..order of exp(sum_r coeff_of_r(r) H_r t^r) as
    commuting-monomial dicts {((r, mult), ...): RatFun}."""
    es = [{(): _R1}]
    for n in range(1, order + 1):
        acc = {}
        for k in range(1, n + 1):
            ck = coeff_of_r(k) * Fraction(k, n)
            for mono, c in es[n - k].items():
                d = dict(mono)
                d[k] = d.get(k, 0) + 1
                key = tuple(sorted(d.items()))
                c2 = c * ck
                acc[key] = acc[key] + c2 if key in acc else c2
        es.append(acc)
    return es


@lru_cache(maxsize=None)
def _psi_words(t, sign):
    """Psi^{sign}_{sign*t} as [(coeff, H-letter word)], t >= 1."""
    tau = (_VINV - _V) if sign == 1 else (_V - _VINV)
    es = _exp_hseries(t, lambda r: tau)
    out = []
    for mono, c in es[t].items():
        letters = []
        for r, m in mono:
            letters.extend([("H", sign * r)] * m)
        out.append((c, tuple(letters)))
    return tuple(out)


@lru_cache(maxsize=None)
def _pair(u, w):
    """Rewrite rule for the adjacent product u*w, or None if already ordered.

    Returns ((coeff, replacement word), ...) with u*w = sum coeff * repl.
    """
    zu, zw = _zone(u), _zone(w)
    if zu < zw:
        return None
    if zu == zw:
        if zu == 0 or zu == 3:
            a, b, s = u[1], w[1], u[2]
            if a >= b:
                return None
            vs = RatFun.vpow(2 * s)
            if b == a + 1:
                return ((vs, (w, u)),)
            mid1 = ("X", a + 1, s)
            mid2 = ("X", b - 1, s)
            return ((vs, (w, u)), (vs, (mid1, mid2)), (-_R1, (mid2, mid1)))
        if zu == 1:
            return ((_R1, (w, u)),) if u[1] > w[1] else None
        if zu == 4:
            return ((_R1, (w, u)),) if u[1] < w[1] else None
        # K and C commute; canonical order puts K first
        if u[0] == "C" and w[0] == "K":
            return ((_R1, (w, u)),)
        return None
    # zu > zw: move w leftward
    if u[0] == "H":
        r = u[1]
        if w[0] == "X":
            n, s = w[1], w[2]
            shift = ("X", n + r, s)
            twist = ("C", -s * abs(r))
            c = _qint(2 * r) * Fraction(s, r)
            return ((_R1, (w, u)), (c, (shift, twist)))
        if w[0] == "H":
            if u[1] + w[1] != 0:
                return ((_R1, (w, u)),)
            s = w[1]
            c = _qint(2 * s) * Fraction(1, s) / (_V - _VINV)
            return ((_R1, (w, u)), (-c, (("C", -2 * s),)), (c, (("C", 2 * s),)))
        return ((_R1, (w, u)),)
    if u[0] == "K":
        if w[0] == "X":
            return ((RatFun.vpow(-2 * w[2] * u[1]), (w, u)),)
        return ((_R1, (w, u)),)
    if u[0] == "C":
        return ((_R1, (w, u)),)
    # u is X^- ahead of something earlier
    m = u[1]
    if w[0] == "K":
        return ((RatFun.vpow(-2 * w[1]), (w, u)),)
    if w[0] == "C":
        return ((_R1, (w, u)),)
    if w[0] == "H":
        r = w[1]
        shift = ("X", m + r, -1)
        twist = ("C", abs(r))
        c = _qint(2 * r) * Fraction(1, r)
        return ((_R1, (w, u)), (c, (shift, twist)))
    # the wing commutator: u = X_m^-, w = X_n^+
    n = w[1]
    t = n + m
    pieces = [(_R1, (w, u))]
    if t == 0:
        pieces.append((-_VV, (("C", n - m), ("K", 1))))
        pieces.append((_VV, (("C", m - n), ("K", -1))))
    elif t > 0:
        for c, hw in _psi_words(t, 1):
            pieces.append((-_VV * c, hw + (("C", n - m), ("K", 1))))
    else:
        for c, hw in _psi_words(-t, -1):
            pieces.append((_VV * c, hw + (("C", m - n), ("K", -1))))
    return tuple(pieces)


def _find_defect(word, strategy):
    rng = range(len(word) - 1)
    if strategy == "rightmost":
        rng = reversed(rng)
    for i in rng:
        p = _pair(word[i], word[i + 1])
        if p is not None:
            return i, p
    return None


def _rewrite(pres_terms, bounds, strategy):
    work = dict(pres_terms)
    steps = 0
    while True:
        out = {}
        dirty = False
        for word, c in work.items():
            hit = _find_defect(word, strategy)
            if hit is None:
                out[word] = out[word] + c if word in out else c
                continue
            dirty = True
            steps += 1
            if steps > bounds.max_steps:
                raise BoundError("rewriting exceeded %d steps at %s" % (
                    bounds.max_steps, " ".join(render_letter(a) for a in word)))
            i, pieces = hit
            for pc, repl in pieces:
                for a in repl:
                    if a[0] in ("X", "H") and abs(a[1]) > bounds.index_window:
                        raise BoundError("index %d outside window %d in %s" % (
                            a[1], bounds.index_window,
                            " ".join(render_letter(x) for x in word)))
                nw = _strip_word("loop", word[:i] + repl + word[i + 2:])
                if len(nw) > bounds.max_word_len:
                    raise BoundError("word length %d over bound %d" % (
                        len(nw), bounds.max_word_len))
                nc = c * pc
                acc = out.get(nw)
                acc = nc if acc is None else acc + nc
                if acc.is_zero():
                    out.pop(nw, None)
                else:
                    out[nw] = acc
        work = {w: c for w, c in out.items() if not c.is_zero()}
        if not dirty:
            return work


def _collect_sorted(word, coeff):
    """Turn a sorted word into a normal-form key, moving plain X-powers to
    the divided-power basis (X^m = [m]! X^(m))."""
    xp, hp, xm, hn = [], [], [], []
    a = b = 0
    c = coeff
    run_letter, run = None, 0

    def flush():
        nonlocal c, run_letter, run
        if run_letter is None:
            return
        (xp if run_letter[2] == 1 else xm).append((run_letter[1], run))
        c = c * _qfact(run)
        run_letter, run = None, 0

    for a0 in word:
        if a0[0] == "X":
            if run_letter == a0:
                run += 1
            else:
                flush()
                run_letter, run = a0, 1
            continue
        flush()
        if a0[0] == "H":
            side = hp if a0[1] > 0 else hn
            if side and side[-1][0] == a0[1]:
                side[-1] = (a0[1], side[-1][1] + 1)
            else:
                side.append((a0[1], 1))
        elif a0[0] == "K":
            a += a0[1]
        else:
            b += a0[1]
    flush()
    key = (tuple(xp), tuple(hp), a, b, tuple(xm), tuple(hn))
    return key, c


class LoopNormalForm:
    """Sum of ordered monomials X^+ divided powers (indices descending),
    H_{r>0}, K^a C^{b/2}, X^- divided powers, H_{r<0}; RatFun coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: c for k, c in (terms or {}).items() if not c.is_zero()}

    def is_zero(self):
        return not self.terms

    def monomials(self):
        return sorted(self.terms)

    def __eq__(self, other):
        return isinstance(other, LoopNormalForm) and other.terms == self.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    @staticmethod
    def render_key(key):
        xp, hp, a, b, xm, hn = key
        bits = []
        for n, m in xp:
            bits.append("X[%d]+" % n + ("^(%d)" % m if m > 1 else ""))
        for r, m in hp:
            bits.append("H[%d]" % r + ("^%d" % m if m > 1 else ""))
        if a:
            bits.append("K" if a == 1 else "K^%d" % a)
        if b:
            bits.append(render_letter(("C", b)))
        for n, m in xm:
            bits.append("X[%d]-" % n + ("^(%d)" % m if m > 1 else ""))
        for r, m in hn:
            bits.append("H[%d]" % r + ("^%d" % m if m > 1 else ""))
        return " ".join(bits) if bits else "1"

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join("(%r)*%s" % (self.terms[k], self.render_key(k))
                          for k in self.monomials())

    def to_presterm(self):
        t = {}
        for (xp, hp, a, b, xm, hn), c in self.terms.items():
            word = []
            for n, m in xp:
                word.extend([("X", n, 1)] * m)
                c = c / _qfact(m)
            for r, m in hp:
                word.extend([("H", r)] * m)
            if a:
                word.append(("K", a))
            if b:
                word.append(("C", b))
            for n, m in xm:
                word.extend([("X", n, -1)] * m)
                c = c / _qfact(m)
            for r, m in hn:
                word.extend([("H", r)] * m)
            key = tuple(word)
            t[key] = t[key] + c if key in t else c
        return PresTerm("loop", t)


def loop_normal_form(t, bounds=None, strategy="leftmost"):
    """Normal form of a loop element; Chevalley input is routed through
    map_G first."""
    if t.pres == "dj":
        t = map_G(t)
    bounds = bounds or DEFAULT_BOUNDS
    flat = _rewrite(t.terms, bounds, strategy)
    out = {}
    for word, c in flat.items():
        key, c2 = _collect_sorted(word, c)
        acc = out.get(key)
        acc = c2 if acc is None else acc + c2
        if acc.is_zero():
            out.pop(key, None)
        else:
            out[key] = acc
    return LoopNormalForm(out)


# ---------------------------------------------------------------------------
# presentation maps

def _subst(t, pres, table):
    out = PresTerm.zero(pres)
    for word, c in t.terms.items():
        acc = PresTerm.one(pres).scale(c)
        for a in word:
            acc = acc * table(a)
        out = out + acc
    return out


def _g_letter(a):
    if a[0] == "E":
        if a[1] == 1:
            return PresTerm("loop", {(("X", 1, -1), ("K", -1), ("C", 2)): _VINV})
        return X(0, 1)
    if a[0] == "F":
        if a[1] == 1:
            return PresTerm("loop", {(("X", -1, 1), ("K", 1), ("C", -2)): _VINV})
        return X(0, -1)
    i, e = a[1], a[2]
    if i == 1:
        return PresTerm("loop", {(("K", -e), ("C", 2 * e)): _R1})
    return Kloop(e)


def map_G(t):
    """Chevalley-to-loop translation on generators:
    E1 -> v^{-1} X_1^- K^{-1} C,  F1 -> v^{-1} X_{-1}^+ K C^{-1},
    E2 -> X_0^+,  F2 -> X_0^-,  K1 -> K^{-1} C,  K2 -> K."""
    if t.pres != "dj":
        raise ValueError("map_G takes Chevalley input")
    return _subst(t, "loop", _g_letter)


def _braid_sum(i, j):
    # sum_{a+b=2} (-1)^a v^w G_i^(a) G_j G_i^(b) with G = E or F.
    # The weight w is orientation-sensitive: braiding around vertex 1 takes
    # w = -a, around vertex 2 takes w = -b.  (<S1bar,S2bar> = -2 while
    # <S2bar,S1bar> = 0, so the two reflections are not mirror images.)
    def build(kind):
        gen = E if kind == "E" else F
        out = PresTerm.zero("dj")
        for a in range(3):
            b = 2 - a
            c = RatFun.vpow(-a if i == 1 else -b) * ((-1) ** a)
            out = out + (divided(gen(i), a) * gen(j) * divided(gen(i), b)).scale(c)
        return out
    return build


def _s_letter(sign):
    def table(a):
        if sign == 1:
            if a == ("E", 1):
                return _braid_sum(1, 2)("E")
            if a == ("F", 1):
                return _braid_sum(1, 2)("F")
            if a == ("E", 2):
                return (Kdj(1, 1) * F(1)).scale(_VINV)
            if a == ("F", 2):
                return (E(1) * Kdj(1, -1)).scale(_V)
            i, e = a[1], a[2]
            if i == 1:
                return Kdj(1, 2 * e) * Kdj(2, e)
            return Kdj(1, -e)
        if a == ("E", 2):
            return _braid_sum(2, 1)("E")
        if a == ("F", 2):
            return _braid_sum(2, 1)("F")
        if a == ("E", 1):
            return (Kdj(2, -1) * F(2)).scale(_V)
        if a == ("F", 1):
            return (E(2) * Kdj(2, 1)).scale(_VINV)
        i, e = a[1], a[2]
        if i == 1:
            return Kdj(2, -e)
        return Kdj(1, e) * Kdj(2, 2 * e)
    return table


def lusztig_S(t, sign):
    """Braid symmetry S^+ (sign=1) or S^- (sign=-1) on the Chevalley side."""
    if t.pres != "dj":
        raise ValueError("lusztig_S takes Chevalley input")
    if sign not in (1, -1):
        raise ValueError("sign must be +-1")
    return _subst(t, "dj", _s_letter(sign))


def lusztig_table(sign):
    """Letter table of S^+ / S^-, usable as ev_q(t, q, image=...)."""
    if sign not in (1, -1):
        raise ValueError("sign must be +-1")
    return _s_letter(sign)


def coxeter_A(t, m=1):
    """(S^+)^2 iterated m times (m < 0 uses (S^-)^2)."""
    s = 1 if m > 0 else -1
    for _ in range(2 * abs(m)):
        t = lusztig_S(t, s)
    return t


def loop_coxeter_A(t, m=1):
    """Lattice shift on the loop side: X_n^± -> X_{n∓2m}^±, K -> K C^{-2m},
    H_r, Psi_r, C^{1/2} fixed."""
    if t.pres != "loop":
        raise ValueError("loop_coxeter_A takes loop input")

    def table(a):
        if a[0] == "X":
            return X(a[1] - 2 * a[2] * m, a[2])
        if a[0] == "K":
            return PresTerm("loop", {(("K", a[1]), ("C", -4 * a[1] * m)): _R1})
        return PresTerm.letter("loop", a)
    return _subst(t, "loop", table)


def dj_collect_k(t):
    """Equivalent element with all K-letters merged at each word's end."""
    if t.pres != "dj":
        raise ValueError("dj_collect_k takes Chevalley input")
    out = {}
    for word, c in t.terms.items():
        k1 = k2 = 0
        vexp = 0
        core = []
        for a in word:
            if a[0] == "K":
                if a[1] == 1:
                    k1 += a[2]
                else:
                    k2 += a[2]
                continue
            w = _CARTAN[(1, a[1])] * k1 + _CARTAN[(2, a[1])] * k2
            vexp += -w if a[0] == "E" else w
            core.append(a)
        if k1:
            core.append(("K", 1, k1))
        if k2:
            core.append(("K", 2, k2))
        key = tuple(core)
        nc = c * RatFun.vpow(vexp)
        out[key] = out[key] + nc if key in out else nc
    return PresTerm("dj", out)


def bar_involution(t):
    """Coefficient conjugation v -> v^{-1}; letters untouched.  Provided as a
    conversion tool between conventions, with no compatibility asserted."""
    out = {}
    for word, c in t.terms.items():
        num = LaurentPoly({-k: x for k, x in c.num.c.items()})
        den = LaurentPoly({-k: x for k, x in c.den.c.items()})
        out[word] = RatFun(num, den)
    return PresTerm(t.pres, out)


def rescale_minus(t, c):
    """Rescale every lowering letter (F_i or X_n^-) by c; conversion tool."""
    if not isinstance(c, RatFun):
        c = RatFun(c)
    out = {}
    for word, x in t.terms.items():
        k = sum(1 for a in word
                if (a[0] == "F") or (a[0] == "X" and a[2] == -1))
        out[word] = x * c ** k
    return PresTerm(t.pres, out)


# ---------------------------------------------------------------------------
# evaluation in the concrete double

@lru_cache(maxsize=None)
def _letter_image(a, q):
    if a[0] == "E":
        return DoubleElement.from_plus(HallElement.cls_(S1 if a[1] == 1 else S2, q))
    if a[0] == "F":
        return DoubleElement.from_minus(HallElement.cls_(S1 if a[1] == 1 else S2, q))
    if a[0] == "K" and len(a) == 3:
        kd = (2 * a[2], 0) if a[1] == 1 else (0, 2 * a[2])
        return DoubleElement.k_doubled(kd, q)
    if a[0] == "X":
        return L(a[1], 1, q) if a[2] == 1 else L(-a[1], -1, q)
    if a[0] == "H":
        r = a[1]
        if r > 0:
            return T_tilde(r, 1, q)
        return T_tilde(-r, -1, q).scale(-1)
    if a[0] == "K":
        return k_line(q, a[1])
    return c_half(q, a[1])


def ev_q(t, q, image=None):
    """Evaluate either presentation in DH(Q) at the prime q.

    With image (a letter -> PresTerm table) each letter is first replaced
    by its image and that image is evaluated once per distinct letter, so
    the result equals ev_q of the substituted term without expanding the
    substitution word by word.  Shared word prefixes are evaluated once.
    """
    if isinstance(t, LoopNormalForm):
        t = t.to_presterm()
    letters = {}

    def letter_val(a):
        if a not in letters:
            letters[a] = _letter_image(a, q) if image is None else ev_q(image(a), q)
        return letters[a]

    prefixes = {}
    out = DoubleElement.zero(q)
    for word, c in t.terms.items():
        val = DoubleElement.one(q)
        for i, a in enumerate(word):
            key = word[: i + 1]
            got = prefixes.get(key)
            if got is None:
                val = dmul(val, letter_val(a))
                prefixes[key] = val
            else:
                val = got
        out = out + val.scale(c.specialize(q))
    return out


# ---------------------------------------------------------------------------
# torsion-average elements and the integral form

@lru_cache(maxsize=None)
def _p_exp_series(order):
    return _exp_hseries(order, lambda r: _R1 / _qint(r))


def P_elem(r):
    """Loop word with ev_q(P_elem(r)) = the full torsion average of weight r:
    1 + sum_r P_r C^{-r/2} t^r = exp(sum_r H_r/[r] t^r)."""
    if r < 1:
        raise ValueError("P_elem needs r >= 1")
    es = _p_exp_series(r)
    t = {}
    for mono, c in es[r].items():
        word = []
        for s, m in mono:
            word.extend([("H", s)] * m)
        word.append(("C", r))
        t[tuple(word)] = c
    return PresTerm("loop", t)


@lru_cache(maxsize=None)
def _log_in_p(order):
    """Coefficients of log(1 + sum P_s t^s) as polynomials in commuting P_s."""
    f = [{(): _R1}] + [{((s, 1),): _R1} for s in range(1, order + 1)]
    logs = [None]
    for n in range(1, order + 1):
        acc = dict(f[n])
        for k in range(1, n):
            for m1, c1 in logs[k].items():
                for m2, c2 in f[n - k].items():
                    d = dict(m1)
                    for s, mm in m2:
                        d[s] = d.get(s, 0) + mm
                    key = tuple(sorted(d.items()))
                    c = -c1 * c2 * Fraction(k, n)
                    acc[key] = acc[key] + c if key in acc else c
        logs.append({k: c for k, c in acc.items() if not c.is_zero()})
    return logs


def _h_in_ptilde(r):
    """H_r as a polynomial in the torsion averages: H_r = [r] * log-coeff_r."""
    return {m: c * _qint(r) for m, c in _log_in_p(r)[r].items()}


def _cp_mul(p1, p2):
    out = {}
    for m1, c1 in p1.items():
        for m2, c2 in p2.items():
            d = dict(m1)
            for s, mm in m2:
                d[s] = d.get(s, 0) + mm
            key = tuple(sorted(d.items()))
            c = c1 * c2
            out[key] = out[key] + c if key in out else c
    return {m: c for m, c in out.items() if not c.is_zero()}


def _laurent_integral(c):
    if c.den.degree() != 0 or c.den.valuation() != 0:
        return False
    return all(x.denominator == 1 for x in c.num.c.values())


def is_integral(t, bounds=None):
    """Whether the element lies in the integral form spanned by X divided
    powers, torsion averages P_r, and K/C units, with Z[v, v^{-1}]
    coefficients.  Returns {"integral": bool, "failures": [...]}."""
    nf = t if isinstance(t, LoopNormalForm) else loop_normal_form(t, bounds)
    frames = {}
    for (xp, hp, a, b, xm, hn), c in nf.terms.items():
        poly = {(): c}
        for r, m in hp + hn:
            hr = _h_in_ptilde(abs(r))
            if r < 0:
                hr = {tuple((-s, mm) for s, mm in mono): cc
                      for mono, cc in hr.items()}
            for _ in range(m):
                poly = _cp_mul(poly, hr)
        frame = (xp, a, b, xm)
        if frame in frames:
            cur = frames[frame]
            for mono, cc in poly.items():
                cur[mono] = cur[mono] + cc if mono in cur else cc
        else:
            frames[frame] = dict(poly)
    failures = []
    for (xp, a, b, xm), poly in sorted(frames.items()):
        for mono, c in sorted(poly.items()):
            if not c.is_zero() and not _laurent_integral(c):
                desc = LoopNormalForm.render_key((xp, (), a, b, xm, ()))
                pdesc = " ".join("P[%d]%s" % (s, "^%d" % m if m > 1 else "")
                                 for s, m in mono) or "1"
                failures.append("%s * %s: %r" % (desc, pdesc, c))
    return {"integral": not failures, "failures": failures}


# ---------------------------------------------------------------------------
# relator lists and homomorphism verification

def dj_relators():
    """The defining Chevalley relators, as (id, PresTerm) pairs; every one
    must map to zero under any claimed realization."""
    one = PresTerm.one("dj")
    gens = [("E1", E(1)), ("E2", E(2)), ("F1", F(1)), ("F2", F(2))]
    rels = []
    for ze, lab in ((1, "plus"), (-1, "minus")):
        z = Kdj(1, ze) * Kdj(2, ze)
        for gname, g in gens:
            rels.append(("central-z-%s-%s" % (lab, gname), z * g - g * z))
    for i in (1, 2):
        rels.append(("k-inverse-%d" % i, Kdj(i, 1) * Kdj(i, -1) - one))
    for i in (1, 2):
        for j in (1, 2):
            c = _CARTAN[(i, j)]
            rels.append(("kcomm-K%d-E%d" % (i, j),
                         Kdj(i) * E(j) - (E(j) * Kdj(i)).scale(RatFun.vpow(-c))))
            rels.append(("kcomm-K%d-F%d" % (i, j),
                         Kdj(i) * F(j) - (F(j) * Kdj(i)).scale(RatFun.vpow(c))))
    for i in (1, 2):
        for j in (1, 2):
            r = E(i) * F(j) - F(j) * E(i)
            if i == j:
                r = r - (Kdj(i, 1) - Kdj(i, -1)).scale(_VV)
            rels.append(("efcomm-%d%d" % (i, j), r))
    for kind in ("E", "F"):
        gen = E if kind == "E" else F
        for i, j in ((1, 2), (2, 1)):
            r = PresTerm.zero("dj")
            for k in range(4):
                term = divided(gen(i), k) * gen(j) * divided(gen(i), 3 - k)
                r = r + term.scale((-1) ** k)
            rels.append(("serre-%s-%d%d" % (kind.lower(), i, j), r))
    return rels


def verify_hom(relators=None, image_map=None, q_checks=(2, 3),
               symbolic=True, bounds=None, strategy="leftmost"):
    """Push each relator through image_map and decide whether it vanishes,
    symbolically via loop_normal_form and/or concretely via ev_q.

    Failures (including bound exhaustion) are report entries, not
    exceptions.  Returns a list of {id, verdict, normal_form, detail}.
    """
    if relators is None:
        relators = dj_relators()
    if image_map is None:
        image_map = map_G
    report = []
    for name, rel in relators:
        entry = {"id": name, "verdict": True, "normal_form": None, "detail": ""}
        try:
            img = image_map(rel)
            details = []
            if symbolic:
                nf = loop_normal_form(img, bounds, strategy)
                entry["normal_form"] = repr(nf)
                if not nf.is_zero():
                    entry["verdict"] = False
                    details.append("normal form nonzero")
            for q in q_checks:
                if not ev_q(img, q).is_zero():
                    entry["verdict"] = False
                    details.append("ev at q=%d nonzero" % q)
            entry["detail"] = "; ".join(details) if details else "vanishes"
        except BoundError as e:
            entry["verdict"] = False
            entry["detail"] = "bound exhausted: %s" % e
        report.append(entry)
    return report


# ---------------------------------------------------------------------------
# indecomposable membership words

def membership_word(kind, n):
    """Chevalley word whose evaluation lands on the indecomposable P_n or
    I_n (kind 'P' or 'I'), built from braid twists of a simple generator."""
    m, odd = divmod(n, 2)
    if kind == "P":
        w = lusztig_S(E(2), -1) if odd else E(2)
        return coxeter_A(w, -m) if m else w
    if kind == "I":
        w = lusztig_S(E(1), 1) if odd else E(1)
        return coxeter_A(w, m) if m else w
    raise ValueError("kind must be 'P' or 'I'")


def membership_report(kind, n, q):
    """Evaluate the membership word and report the class and the K-twist the
    construction produces (the twist is reported, not prescribed)."""
    w = dj_collect_k(membership_word(kind, n))
    val = ev_q(w, q)
    target = IsoClass.P(n) if kind == "P" else IsoClass.I(n)
    zero = IsoClass.zero()
    twists = {}
    ok = True
    for (plus, kd, minus), c in val.terms.items():
        if plus != target or minus != zero:
            ok = False
            continue
        twists[kd] = repr(c)
    return {"kind": kind, "n": n, "q": q, "class_ok": ok and len(twists) == 1,
            "terms": len(val.terms), "twists": twists}


# ---------------------------------------------------------------------------
# PBW sampling

def _key_weight(key):
    xp, hp, a, b, xm, hn = key
    t = abs(a) + abs(b)
    for n, m in xp + xm:
        t += m * (2 + abs(n))
    for r, m in hp + hn:
        t += m * (1 + abs(r))
    return t


def pbw_monomials(count=56, x_window=1, h_top=2):
    """The `count` smallest normal-form monomial keys over a small index
    window, graded by a total-size weight; deterministic order."""
    xs = [()]
    rng = range(-x_window, x_window + 1)
    xs += [((n, 1),) for n in rng] + [((n, 2),) for n in rng]
    xs += [((n1, 1), (n2, 1)) for n1 in rng for n2 in rng if n1 > n2]
    hs_p = [(), ((1, 1),), ((1, 2),)] + ([((2, 1),)] if h_top >= 2 else [])
    hs_n = [(), ((-1, 1),), ((-1, 2),)] + ([((-2, 1),)] if h_top >= 2 else [])
    kc = [(a, b) for a in (-1, 0, 1) for b in (-1, 0, 1)]
    keys = []
    for xp in xs:
        for hp in hs_p:
            for a, b in kc:
                for xm in xs:
                    for hn in hs_n:
                        keys.append((xp, hp, a, b, xm, hn))
    keys.sort(key=lambda k: (_key_weight(k), k))
    return keys[:count]


def _scalarq_rank(rows):
    """Rank of a list of sparse ScalarQ row vectors (dicts keyed anyhow)."""
    pivots = []
    rank = 0
    for row in rows:
        row = dict(row)
        for col, prow in pivots:
            c = row.get(col)
            if c is None or c.is_zero():
                continue
            for k, x in prow.items():
                y = row.get(k)
                z = y - c * x if y is not None else -(c * x)
                if z.is_zero():
                    row.pop(k, None)
                else:
                    row[k] = z
        live = [(k, c) for k, c in row.items() if not c.is_zero()]
        if not live:
            continue
        col, c = live[0]
        inv = c.inverse()
        pivots.append((col, {k: x * inv for k, x in live}))
        rank += 1
    return rank


def pbw_rank_report(count=56, qs=(2, 3)):
    """Evaluate the smallest PBW monomials and report the rank of their
    images in DH(Q) at each prime."""
    keys = pbw_monomials(count)
    out = {"count": len(keys)}
    full = True
    for q in qs:
        rows = []
        for key in keys:
            el = ev_q(LoopNormalForm({key: _R1}), q)
            rows.append(el.terms)
        r = _scalarq_rank(rows)
        out["rank_q%d" % q] = r
        full = full and r == len(keys)
    out["full"] = full
    return out
