"""Hall algebra and reduced double: frozen examples plus structural laws."""

import random
from fractions import Fraction

from kronhall.hall import (
    DoubleElement,
    HallElement,
    dbracket,
    divided_power,
    dmul,
    green_pair,
    hall_coproduct,
    hall_mul,
    one_alpha,
    straighten,
    tube_one,
)
from kronhall.kronrep import IsoClass, aut_order, enumerate_iso_classes, sym_form
from kronhall.scalars import ScalarQ, quantum_int, specialize

S1 = IsoClass.I(0)   # simple at the source vertex, dim (1, 0)
S2 = IsoClass.P(0)   # simple at the sink vertex, dim (0, 1)


def sc(x, q):
    return ScalarQ.from_rat(Fraction(x), q)


def classes_upto(q, d1, d2, include_zero=False):
    pool = []
    for a in range(d1 + 1):
        for b in range(d2 + 1):
            pool.extend(enumerate_iso_classes((a, b), q))
    if not include_zero:
        pool = [c for c in pool if not c.is_zero()]
    return pool


# ---------------------------------------------------------------- product

def test_mul_simple_split_only():
    # quotient S2, sub S1: only the split class extends
    for q in (2, 3):
        got = hall_mul(HallElement.cls_(S2, q), HallElement.cls_(S1, q))
        assert got == HallElement.cls_(S1 + S2, q)


def test_mul_simples_all_extensions():
    # quotient S1, sub S2: v^2 times the whole dimension-(1,1) stratum
    for q in (2, 3):
        got = hall_mul(HallElement.cls_(S1, q), HallElement.cls_(S2, q))
        assert got == one_alpha((1, 1), q).scale(ScalarQ.vpow(2, q))
        assert len(got.terms) == q + 2


def test_mul_self_extension_count():
    # F^{S1+S1}_{S1,S1} = q + 1 and the twist is v^{-1}
    for q in (2, 3):
        got = hall_mul(HallElement.cls_(S1, q), HallElement.cls_(S1, q))
        want = HallElement.cls_(IsoClass.I(0, 2), q).scale(
            ScalarQ.vpow(-1, q) * sc(q + 1, q))
        assert got == want


def test_unit_and_linearity():
    q = 2
    a = one_alpha((1, 1), q) + HallElement.cls_(S1, q).scale(sc(Fraction(3, 2), q))
    assert hall_mul(HallElement.one(q), a) == a
    assert hall_mul(a, HallElement.one(q)) == a


def test_k_commutation_rule():
    # K_alpha [X] = v^{-(alpha, X)} [X] K_alpha
    q = 2
    rng = random.Random(11)
    pool = classes_upto(q, 2, 2)
    for _ in range(12):
        x = rng.choice(pool)
        alpha = (rng.randint(-2, 2), rng.randint(-2, 2))
        k = HallElement.k_power(alpha, q)
        h = HallElement.cls_(x, q)
        lhs = hall_mul(k, h)
        rhs = hall_mul(h, k).scale(ScalarQ.vpow(-sym_form(alpha, x.dim), q))
        assert lhs == rhs


def test_associativity_small_triples():
    q = 2
    rng = random.Random(23)
    pool = classes_upto(q, 2, 2)
    done = 0
    while done < 20:
        x, y, z = (rng.choice(pool) for _ in range(3))
        d = tuple(a + b + c for a, b, c in zip(x.dim, y.dim, z.dim))
        if d[0] > 4 or d[1] > 4:
            continue
        hx, hy, hz = (HallElement.cls_(c, q) for c in (x, y, z))
        assert hall_mul(hall_mul(hx, hy), hz) == hall_mul(hx, hall_mul(hy, hz))
        done += 1


# ---------------------------------------------------------------- coproduct

def cop_terms(a):
    out = {}
    for l, r in hall_coproduct(a):
        (lk, lc), = l.terms.items()
        (rk, rc), = r.terms.items()
        key = (lk, rk)
        val = lc * rc
        out[key] = out[key] + val if key in out else val
    return {k: v for k, v in out.items() if not v.is_zero()}


def test_coproduct_of_simple():
    q = 2
    z = IsoClass.zero()
    got = cop_terms(HallElement.cls_(S1, q))
    want = {
        ((S1, (0, 0)), (z, (0, 0))): sc(1, q),
        ((z, (2, 0)), (S1, (0, 0))): sc(1, q),
    }
    assert got == want


def test_coproduct_middle_coefficient():
    # Delta([S1+S1]) middle term carries v^{-1} P/a_Z = v^{-1} * 3/6 at q = 2
    q = 2
    z = IsoClass.zero()
    d = IsoClass.I(0, 2)
    got = cop_terms(HallElement.cls_(d, q))
    mid = got[((S1, (2, 0)), (S1, (0, 0)))]
    assert mid == ScalarQ.vpow(-1, q) * sc(Fraction(1, 2), q)
    assert got[((d, (0, 0)), (z, (0, 0)))] == sc(1, q)
    assert got[((z, (4, 0)), (d, (0, 0)))] == sc(1, q)


def test_coproduct_grouplike_k():
    q = 3
    k = HallElement.k_power((1, -1), q)
    ((l, r),) = hall_coproduct(k)
    assert l == k and r == k


def test_coassociativity_small():
    q = 2

    def triple(a, left_first):
        acc = {}
        for l, r in hall_coproduct(a):
            (lk, lc), = l.terms.items()
            (rk, rc), = r.terms.items()
            inner = hall_coproduct(HallElement(q, {(lk if left_first else rk): sc(1, q)}))
            for il, ir in inner:
                (k1, c1), = il.terms.items()
                (k2, c2), = ir.terms.items()
                key = (k1, k2, rk) if left_first else (lk, k1, k2)
                val = lc * c1 * c2 * rc
                acc[key] = acc[key] + val if key in acc else val
        return {k: v for k, v in acc.items() if not v.is_zero()}

    for c in classes_upto(q, 2, 2, include_zero=True):
        h = HallElement.cls_(c, q)
        assert triple(h, True) == triple(h, False), c


# ---------------------------------------------------------------- pairing

def test_pairing_examples():
    for q in (2, 3):
        h1 = HallElement.cls_(S1, q)
        assert green_pair(h1, h1) == sc(Fraction(1, q - 1), q)
        h2 = HallElement.cls_(S2, q)
        assert green_pair(h1, h2) == sc(0, q)
        ka = HallElement.k_power((1, 0), q)
        kb = HallElement.k_power((0, 1), q)
        assert green_pair(ka, kb) == ScalarQ.vpow(2, q)
        t = IsoClass.I(0, 2)
        assert green_pair(HallElement.cls_(t, q), HallElement.cls_(t, q)) == sc(
            Fraction(1, aut_order(t, q)), q)


def test_pairing_symmetry():
    q = 2
    rng = random.Random(5)
    pool = classes_upto(q, 2, 2)
    for _ in range(10):
        x, y = rng.choice(pool), rng.choice(pool)
        a = HallElement(q, {(x, (rng.randint(-1, 1) * 2, 0)): sc(1, q)})
        b = HallElement(q, {(y, (0, rng.randint(-1, 1) * 2)): sc(1, q)})
        assert green_pair(a, b) == green_pair(b, a)


def test_pairing_hopf_compatibility():
    # (a b, c) = sum (a, c') (b, c'') over the coproduct legs of c
    rng = random.Random(17)
    for q in (2, 3):
        pool = classes_upto(q, 3, 3)
        targets = rng.sample(pool, 10)
        # make sure the bound case is exercised
        targets.extend(c for c in pool if c.dim == (3, 3))
        for c in targets[:14]:
            d = c.dim
            for _ in range(2):
                a1 = rng.randint(0, d[0])
                a2 = rng.randint(0, d[1])
                ca = list(enumerate_iso_classes((a1, a2), q))
                cb = list(enumerate_iso_classes((d[0] - a1, d[1] - a2), q))
                if not ca or not cb:
                    continue
                a = HallElement.cls_(rng.choice(ca), q)
                b = HallElement.cls_(rng.choice(cb), q)
                hc = HallElement.cls_(c, q)
                lhs = green_pair(hall_mul(a, b), hc)
                rhs = sc(0, q)
                for l, r in hall_coproduct(hc):
                    rhs = rhs + green_pair(a, l) * green_pair(b, r)
                assert lhs == rhs


# ------------------------------------------------------- divided powers etc

def test_divided_power_exceptional():
    # [X^n] = v^{n(n-1)} [X]^(n) for the exceptional simple S1
    for q in (2, 3):
        e = HallElement.cls_(S1, q)
        for n in (2, 3):
            want = HallElement.cls_(IsoClass.I(0, n), q)
            got = divided_power(e, n).scale(ScalarQ.vpow(n * (n - 1), q))
            assert got == want


def test_characteristic_function_identity():
    # 1_{(a,b)} = v^{-2ab + a(a-1) + b(b-1)} [S1]^(a) [S2]^(b)
    for q in (2, 3):
        e1 = HallElement.cls_(S1, q)
        e2 = HallElement.cls_(S2, q)
        for a, b in [(1, 1), (1, 2), (2, 1), (2, 2)]:
            got = hall_mul(divided_power(e1, a), divided_power(e2, b)).scale(
                ScalarQ.vpow(-2 * a * b + a * (a - 1) + b * (b - 1), q))
            assert got == one_alpha((a, b), q)


def test_stratum_sums():
    assert len(one_alpha((1, 1), 2).terms) == 4
    assert len(tube_one(1, 2).terms) == 3
    assert len(tube_one(1, 3).terms) == 4
    assert all(kd == (0, 0) for (_x, kd) in tube_one(2, 2).terms)


def test_serre_relations():
    for q in (2, 3):
        e1 = HallElement.cls_(S1, q)
        e2 = HallElement.cls_(S2, q)
        q3 = specialize(quantum_int(3), q)

        def word(*els):
            out = HallElement.one(q)
            for e in els:
                out = hall_mul(out, e)
            return out

        for a, b in ((e1, e2), (e2, e1)):
            lhs = (word(a, a, a, b) - q3 * word(a, a, b, a)
                   + q3 * word(a, b, a, a) - word(b, a, a, a))
            assert lhs.is_zero()


# ---------------------------------------------------------------- double

def test_straighten_simple_anchor():
    z = IsoClass.zero()
    for q in (2, 3):
        got = straighten(S1, S1, q)
        want = DoubleElement(q, {
            (S1, (0, 0), S1): sc(1, q),
            (z, (2, 0), z): sc(Fraction(1, q - 1), q),
            (z, (-2, 0), z): sc(Fraction(-1, q - 1), q),
        })
        assert got == want


def test_straighten_cross_terms_commute():
    for q in (2, 3):
        assert straighten(S1, S2, q) == DoubleElement(q, {(S2, (0, 0), S1): sc(1, q)})
        assert straighten(S2, S1, q) == DoubleElement(q, {(S1, (0, 0), S2): sc(1, q)})


def test_double_bracket_of_simples():
    z = IsoClass.zero()
    for q in (2, 3):
        E1 = DoubleElement.from_plus(HallElement.cls_(S1, q))
        F1 = DoubleElement.from_minus(HallElement.cls_(S1, q))
        F2 = DoubleElement.from_minus(HallElement.cls_(S2, q))
        got = dbracket(E1, F1)
        want = DoubleElement(q, {
            (z, (-2, 0), z): sc(Fraction(1, q - 1), q),
            (z, (2, 0), z): sc(Fraction(-1, q - 1), q),
        })
        assert got == want
        assert dbracket(E1, F2).is_zero()


def test_double_k_commutation():
    q = 2
    gamma = (1, -2)
    kg = DoubleElement.k_doubled((2 * gamma[0], 2 * gamma[1]), q)
    for x in (S1, S2, IsoClass.I(1)):
        p = DoubleElement.from_plus(HallElement.cls_(x, q))
        m = DoubleElement.from_minus(HallElement.cls_(x, q))
        s = sym_form(gamma, x.dim)
        assert dmul(kg, p) == dmul(p, kg).scale(ScalarQ.vpow(-s, q))
        assert dmul(kg, m) == dmul(m, kg).scale(ScalarQ.vpow(s, q))


def test_double_wings_are_subalgebras():
    q = 2
    rng = random.Random(3)
    pool = classes_upto(q, 2, 1)
    for _ in range(6):
        x, y = rng.choice(pool), rng.choice(pool)
        hx, hy = HallElement.cls_(x, q), HallElement.cls_(y, q)
        assert dmul(DoubleElement.from_plus(hx), DoubleElement.from_plus(hy)) == \
            DoubleElement.from_plus(hall_mul(hx, hy))
        assert dmul(DoubleElement.from_minus(hx), DoubleElement.from_minus(hy)) == \
            DoubleElement.from_minus(hall_mul(hx, hy))


def test_double_associativity_mixed():
    q = 2
    rng = random.Random(29)
    pool = classes_upto(q, 1, 1)
    els = [DoubleElement.from_plus(HallElement.cls_(c, q)) for c in pool]
    els += [DoubleElement.from_minus(HallElement.cls_(c, q)) for c in pool]
    els.append(DoubleElement.k_doubled((2, 0), q))
    for _ in range(12):
        a, b, c = (rng.choice(els) for _ in range(3))
        assert dmul(dmul(a, b), c) == dmul(a, dmul(b, c))


def _relation_sides(Y, X, q):
    """Both sides of the double compatibility relation for [Y]-, [X]+."""
    from kronhall.hall import _split_pairs, _vp
    from kronhall.kronrep import euler_form

    def legs(z):
        return [
            (t1, t2, _vp(-euler_form(t1.dim, t2.dim), q) * ScalarQ.from_rat(fr, q))
            for t1, t2, _f, fr in _split_pairs(z, q)
        ]

    lhs = DoubleElement.zero(q)
    rhs = DoubleElement.zero(q)
    for a1, a2, ca in legs(Y):
        for b1, b2, cb in legs(X):
            c = ca * cb
            if a2 == b1:
                pre = sc(Fraction(1, aut_order(a2, q)), q)
                ml = DoubleElement.from_minus(HallElement(
                    q, {(a1, (-2 * a2.dim[0], -2 * a2.dim[1])): sc(1, q)}))
                pr = DoubleElement.from_plus(HallElement.cls_(b2, q))
                lhs = lhs + dmul(ml, pr).scale(c * pre)
            if a1 == b2:
                pre = sc(Fraction(1, aut_order(a1, q)), q)
                pl = DoubleElement.from_plus(HallElement(
                    q, {(b1, (2 * b2.dim[0], 2 * b2.dim[1])): sc(1, q)}))
                mr = DoubleElement.from_minus(HallElement.cls_(a2, q))
                rhs = rhs + dmul(pl, mr).scale(c * pre)
    return lhs, rhs


def test_straighten_satisfies_double_relation():
    # substituting the straightened forms back into the defining relation
    q = 2
    rng = random.Random(41)
    pool = classes_upto(q, 2, 2)
    pairs = [(rng.choice(pool), rng.choice(pool)) for _ in range(25)]
    pairs += [(S1, S1), (S2, S2), (S1, S2), (IsoClass.P(1), IsoClass.I(1))]
    for Y, X in pairs:
        lhs, rhs = _relation_sides(Y, X, q)
        assert lhs == rhs, (Y, X)


# ---------------------------------------------------------------- json

def test_double_json_shape_and_order():
    q = 2
    el = DoubleElement(q, {
        (S2, (1, 1), IsoClass.zero()): sc(Fraction(1, 2), q),
        (S1, (-2, 0), S2): sc(3, q),
    })
    js = el.to_json()
    # sorted by (plus, K, minus); integral K entries plain, halves as strings
    assert [t["K"] for t in js] == [[-1, 0], ["1/2", "1/2"]]
    assert js[0]["plus"] == S1.to_json()
    assert js[0]["minus"] == S2.to_json()
    assert js[1]["coeff"] == sc(Fraction(1, 2), q).to_json()


def test_hall_json_roundtrippable_fields():
    q = 3
    el = HallElement(q, {(S1, (2, 0)): sc(2, q), (S2, (0, 0)): ScalarQ.vpow(1, q)})
    js = el.to_json()
    assert {tuple(sorted(t)) for t in map(dict.keys, js)} == {("K", "class", "coeff")}
    assert js[0]["class"] == S1.to_json()
