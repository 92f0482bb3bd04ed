import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kronhall.errors import BoundError
from kronhall.fq import ClosedPoint, FqMatrix, closed_points, mat_rank
from kronhall.kronrep import (
    IsoClass,
    Rep,
    aut_count,
    aut_order,
    canonical_rep,
    decompose,
    enumerate_iso_classes,
    euler_form,
    ext_dim,
    hall_number,
    hall_products,
    hom_dim,
    hom_dim_reps,
    partitions,
    regular_classes,
    subobject_pairs,
    sym_form,
)

S1 = IsoClass.I(0)
S2 = IsoClass.P(0)
DELTA = (1, 1)


def pt(q, coeffs):
    return ClosedPoint(q, coeffs)


def all_reps(d, q):
    d1, d2 = d
    cells = d1 * d2
    for a_bits in itertools.product(range(q), repeat=cells):
        A = FqMatrix(q, np.array(a_bits, dtype=np.int64), shape=(d2, d1))
        for b_bits in itertools.product(range(q), repeat=cells):
            B = FqMatrix(q, np.array(b_bits, dtype=np.int64), shape=(d2, d1))
            yield Rep(q, A, B)


def gl_count(n, q):
    out = 1
    for j in range(n):
        out *= q**n - q**j
    return out


class TestForms:
    def test_examples(self):
        assert euler_form((1, 0), (0, 1)) == -2
        assert euler_form((1, 0), (1, 0)) == 1
        assert sym_form(DELTA, DELTA) == 0

    @given(a=st.tuples(st.integers(-4, 4), st.integers(-4, 4)),
           b=st.tuples(st.integers(-4, 4), st.integers(-4, 4)))
    def test_sym_even_and_delta_radical(self, a, b):
        assert sym_form(a, b) == sym_form(b, a)
        assert sym_form(a, b) % 2 == 0
        assert sym_form(DELTA, a) == 0


class TestCanonicalRep:
    def test_p0(self):
        r = canonical_rep(S2, 2)
        assert r.dim == (0, 1)
        assert r.A.a.shape == (1, 0)

    def test_i0(self):
        assert canonical_rep(S1, 2).dim == (1, 0)

    def test_tube_at_y(self):
        r = canonical_rep(IsoClass.tube(pt(2, (0, 1)), 1), 2)
        assert r.A.a.tolist() == [[1]]
        assert r.B.a.tolist() == [[0]]

    def test_dim_bookkeeping(self):
        c = IsoClass.P(2) + IsoClass.I(1) + IsoClass.tube(pt(2, (1, 1, 1)), (2, 1))
        assert c.dim == (2 + 2 + 6, 3 + 1 + 6)
        assert canonical_rep(c, 2).dim == c.dim


class TestDecompose:
    def test_zero(self):
        assert decompose(Rep(2, FqMatrix.zeros(2, 0, 0), FqMatrix.zeros(2, 0, 0))).is_zero()

    def test_semisimple_one_one(self):
        r = Rep(2, [[0]], [[0]])
        assert decompose(r) == S1 + S2

    def test_tube_at_y_plus_one(self):
        r = Rep(2, [[1]], [[1]])
        assert decompose(r) == IsoClass.tube(pt(2, (1, 1)), 1)

    def test_roundtrip_everything_small(self):
        # complete inversion check on every class with both dims <= 4
        for q in (2, 3):
            for d1 in range(5):
                for d2 in range(5):
                    for c in enumerate_iso_classes((d1, d2), q):
                        assert decompose(canonical_rep(c, q)) == c

    def test_orbit_partition_matches_class_census(self):
        # every representation of dim d falls in exactly one GL-orbit; orbit
        # sizes are |GL| x |GL| / |Aut|, so decomposing all of them must tile
        # the full count
        for d in ((1, 1), (2, 1), (2, 2)):
            q = 2
            tall = {}
            for r in all_reps(d, q):
                c = decompose(r)
                tall[c] = tall.get(c, 0) + 1
            assert set(tall) == set(enumerate_iso_classes(d, q))
            grp = gl_count(d[0], q) * gl_count(d[1], q)
            for c, n in tall.items():
                assert grp % aut_order(c, q) == 0
                assert n == grp // aut_order(c, q)


class TestHom:
    def test_examples(self):
        assert hom_dim(S1, S1, 2) == 1
        assert hom_dim(S1, S2, 2) == 0
        assert hom_dim(S2, IsoClass.P(1), 2) == 2

    def test_direction_tables(self):
        q = 2
        for i in range(3):
            for j in range(3):
                expect = j - i + 1 if j >= i else 0
                assert hom_dim(IsoClass.P(i), IsoClass.P(j), q) == expect
                assert hom_dim(IsoClass.I(j), IsoClass.I(i), q) == expect

    def test_tube_tables(self):
        q = 2
        y = pt(q, (0, 1))
        quad = pt(q, (1, 1, 1))
        for s in range(1, 4):
            for t in range(1, 4):
                assert hom_dim(IsoClass.tube(y, s), IsoClass.tube(y, t), q) == min(s, t)
                assert hom_dim(IsoClass.tube(quad, s), IsoClass.tube(quad, t), q) == 2 * min(s, t)
                assert hom_dim(IsoClass.tube(y, s), IsoClass.tube(quad, t), q) == 0

    def test_vanishing_directions(self):
        q = 3
        y = pt(q, (0, 1))
        assert hom_dim(IsoClass.tube(y, 2), IsoClass.P(1), q) == 0
        assert hom_dim(IsoClass.I(1), IsoClass.P(2), q) == 0
        assert hom_dim(IsoClass.I(2), IsoClass.tube(y, 1), q) == 0

    def test_solver_against_brute_force(self):
        # enumerate every candidate morphism pair on small shapes
        q = 2
        picks = [
            (S1, S1), (S1, S2), (S2, IsoClass.P(1)),
            (IsoClass.tube(pt(q, (0, 1)), 1), IsoClass.tube(pt(q, (0, 1)), 2)),
            (IsoClass.P(1), IsoClass.I(0)), (IsoClass.I(1), IsoClass.I(0)),
            (S1 + S2, IsoClass.tube(pt(q, (1, 1)), 1)),
        ]
        for X, Y in picks:
            rx, ry = canonical_rep(X, q), canonical_rep(Y, q)
            n1 = rx.d1 * ry.d1
            n2 = rx.d2 * ry.d2
            hits = 0
            for bits in itertools.product(range(q), repeat=n1 + n2):
                f1 = np.array(bits[:n1], dtype=np.int64).reshape((ry.d1, rx.d1))
                f2 = np.array(bits[n1:], dtype=np.int64).reshape((ry.d2, rx.d2))
                ok = not ((ry.A.a @ f1 - f2 @ rx.A.a) % q).any() and \
                    not ((ry.B.a @ f1 - f2 @ rx.B.a) % q).any()
                hits += ok
            assert hits == q**hom_dim(X, Y, q)

    def test_ext_nonnegative(self):
        q = 2
        sample = [S1, S2, IsoClass.P(1), IsoClass.I(1),
                  IsoClass.tube(pt(q, (0, 1)), 2), S1 + S2]
        for X in sample:
            for Y in sample:
                assert ext_dim(X, Y, q) >= 0
                assert hom_dim(X, Y, q) - ext_dim(X, Y, q) == euler_form(X.dim, Y.dim)


class TestAut:
    def test_examples(self):
        assert aut_count(S1, 2) == 1
        assert aut_count(S1, 3) == 2
        assert aut_count(IsoClass.I(0, 2), 2) == 6

    def test_bound_error_names_bound(self):
        with pytest.raises(BoundError, match="9"):
            aut_count(IsoClass.I(0, 4), 2)

    def test_formula_matches_enumeration(self):
        ys = {2: pt(2, (0, 1)), 3: pt(3, (0, 1))}
        for q in (2, 3):
            y = ys[q]
            cases = [S1, S2, S1 + S2, IsoClass.P(1), IsoClass.I(0, 2),
                     IsoClass.tube(y, 2), IsoClass.tube(y, (1, 1)),
                     IsoClass.tube(y, (2, 1)), IsoClass.P(0) + IsoClass.P(1),
                     IsoClass.tube(pt(q, (1, 1)), 1) + IsoClass.tube(y, 1)]
            if q == 2:
                cases.append(IsoClass.tube(pt(2, (1, 1, 1)), 1))
            for c in cases:
                assert aut_order(c, q) == aut_count(c, q), c

    def test_tube_aut_values(self):
        y3 = pt(3, (0, 1))
        assert aut_order(IsoClass.tube(y3, 2), 3) == 3 * 2
        assert aut_order(IsoClass.tube(y3, (2, 1)), 3) == 27 * 4


class TestHallNumbers:
    def test_trivial_subobject(self):
        for X in (S1, IsoClass.P(1), IsoClass.tube(pt(2, (0, 1)), 2)):
            assert hall_number(X, X, IsoClass.zero(), 2) == 1
            assert hall_number(X, IsoClass.zero(), X, 2) == 1

    def test_split_and_tubes(self):
        q = 2
        assert hall_number(S1 + S2, S1, S2, q) == 1
        for p in closed_points(1, q):
            assert hall_number(IsoClass.tube(p, 1), S1, S2, q) == 1
            assert hall_number(IsoClass.tube(p, 1), S2, S1, q) == 0

    def test_dimension_mismatch_is_zero(self):
        assert hall_number(S1 + S2, S1, S1, 2) == 0

    def test_bound(self):
        big = IsoClass.I(0, 13)
        with pytest.raises(BoundError):
            hall_number(big, big, IsoClass.zero(), 2)

    def test_products_match_census(self):
        q = 2
        y = pt(q, (0, 1))
        pairs = [(S1, S2), (S2, S1), (S1, S1), (IsoClass.tube(y, 1), S2),
                 (S2, IsoClass.tube(y, 1)), (IsoClass.P(1), S1),
                 (IsoClass.tube(y, 1), IsoClass.tube(y, 1))]
        for X, Y in pairs:
            got = hall_products(X, Y, q)
            d = (X.dim[0] + Y.dim[0], X.dim[1] + Y.dim[1])
            for Z in enumerate_iso_classes(d, q):
                f = hall_number(Z, X, Y, q)
                assert got.get(Z, 0) == f, (X, Y, Z)

    def test_line_extension_count(self):
        # the q+1 lines of F_q^2 realize S1 inside S1+S1
        for q in (2, 3):
            prods = hall_products(S1, S1, q)
            assert prods == {IsoClass.I(0, 2): q + 1}

    def test_torsion_bump(self):
        # subobject S2 inside S2 + T sits q ways
        for q in (2, 3):
            y = pt(q, (0, 1))
            Z = S2 + IsoClass.tube(y, 1)
            assert hall_products(IsoClass.tube(y, 1), S2, q)[Z] == q

    def test_partition_of_stable_pairs(self):
        # sum of F^Z over a class, weighted by orbit size, must re-count the
        # stable pairs seen across every representation of that dimension
        q = 2
        checks = [((1, 1), S1, S2), ((1, 1), S2, S1),
                  ((2, 1), S1, IsoClass.tube(pt(q, (0, 1)), 1)),
                  ((2, 2), IsoClass.tube(pt(q, (0, 1)), 1), IsoClass.tube(pt(q, (0, 1)), 1)),
                  ((2, 2), S1 + S2, S1 + S2)]
        for d, X, Y in checks:
            grp = gl_count(d[0], q) * gl_count(d[1], q)
            lhs = 0
            for Z in enumerate_iso_classes(d, q):
                f = hall_number(Z, X, Y, q)
                if f:
                    lhs += f * (grp // aut_order(Z, q))
            rhs = 0
            for r in all_reps(d, q):
                for sub, quo in subobject_pairs(r, Y.dim):
                    if decompose(sub) == Y and decompose(quo) == X:
                        rhs += 1
            assert lhs == rhs, (d, X, Y)


class TestEnumeration:
    def test_examples(self):
        assert enumerate_iso_classes((1, 0), 2) == (S1,)
        assert enumerate_iso_classes((0, 2), 2) == (IsoClass.P(0, 2),)
        cls = enumerate_iso_classes((1, 1), 2)
        assert len(cls) == 4
        tubes = [c for c in cls if c.regular]
        assert len(tubes) == 3

    def test_q_dependence(self):
        assert len(enumerate_iso_classes((1, 1), 3)) == 5

    def test_regular_classes_weight(self):
        for q in (2, 3):
            for r in range(4):
                for c in regular_classes(r, q):
                    assert c.dim == (r, r)
                    assert not c.prep and not c.preinj

    def test_partitions(self):
        assert list(partitions(4)) == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]
        assert list(partitions(0)) == [()]


class TestIsoClassBasics:
    def test_json_roundtrip(self):
        q = 2
        c = IsoClass.P(1, 2) + IsoClass.I(0) + \
            IsoClass.tube(pt(q, (0, 1)), (2, 1)) + \
            IsoClass.tube(ClosedPoint.infinity(q), 1)
        data = c.to_json()
        assert data["P"] == {"1": 2}
        assert data["R"][0]["point"] == "inf"
        assert IsoClass.from_json(data, q) == c

    def test_direct_sum_merges_partitions(self):
        q = 2
        y = pt(q, (0, 1))
        c = IsoClass.tube(y, 2) + IsoClass.tube(y, (3, 1))
        assert c.regular[y] == (3, 2, 1)

    def test_validation(self):
        with pytest.raises(ValueError):
            IsoClass(prep={-1: 1})
        with pytest.raises(ValueError):
            IsoClass.tube(pt(2, (0, 1)), (0,))

    def test_dim_vs_canonical(self):
        q = 3
        for c in enumerate_iso_classes((2, 2), q):
            assert canonical_rep(c, q).dim == c.dim
