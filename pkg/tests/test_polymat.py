"""Polynomial matrices: rank, minors, Smith and Smith-McMillan forms."""
import random
from fractions import Fraction

import pytest

from zerolab.polymat import (
    MINOR_DIM_CAP,
    PolyMatrix,
    RatMatrix,
    SizeError,
    adjugate,
    all_minors,
    cofactor_determinant,
    determinant,
    gcd_of_minors,
    invariant_polynomials_by_minors,
    minor,
    normal_rank,
    smith_form,
    smith_mcmillan,
    unimodular_inverse,
)
from zerolab.ratpoly import Poly, RatFn

s = Poly.x()


def rand_polymatrix(rng, rows, cols, deg=1, lo=-3, hi=3):
    return PolyMatrix(
        [
            [Poly([rng.randint(lo, hi) for _ in range(deg + 1)]) for _ in range(cols)]
            for _ in range(rows)
        ]
    )


def rand_unimodular(rng, n, ops=6):
    """Product of elementary operations applied to the identity."""
    m = [list(row) for row in PolyMatrix.identity(n).entries]
    for _ in range(ops):
        kind = rng.randint(0, 2)
        i, j = rng.sample(range(n), 2)
        if kind == 0:
            m[i], m[j] = m[j], m[i]
        elif kind == 1:
            c = Fraction(rng.choice([-2, -1, 1, 2, 3]))
            m[i] = [c * x for x in m[i]]
        else:
            q = Poly([rng.randint(-2, 2), rng.randint(-1, 1)])
            m[i] = [x + q * y for x, y in zip(m[i], m[j])]
    return PolyMatrix(m)


# ---------------------------------------------------------------------------


def fixture_2_by_reduction():
    return PolyMatrix(
        [[s, Poly(), Poly()], [Poly(), s, s + 1], [s, s - 1, Poly()]]
    )


def test_normal_rank_fixture():
    assert normal_rank(fixture_2_by_reduction()) == 3
    assert normal_rank(PolyMatrix.zero(2, 3)) == 0


def test_normal_rank_product_construction():
    rng = random.Random(2)
    for _ in range(10):
        k = rng.randint(1, 2)
        X = rand_polymatrix(rng, 3, k)
        Y = rand_polymatrix(rng, k, 4)
        P = X * Y
        if normal_rank(X) == k and normal_rank(Y) == k:
            assert normal_rank(P) == k


def test_minor_empty_and_oracle():
    P = fixture_2_by_reduction()
    assert minor(P, [], []) == Poly([1])
    rng = random.Random(4)
    for _ in range(8):
        M = rand_polymatrix(rng, 4, 4)
        assert determinant(M) == cofactor_determinant(M)


def test_minor_rosenbrock_fixture(dec3):
    from zerolab.zeros import system_matrix

    P = system_matrix(dec3).P
    # drop the first state row / the last output row of the 5x4 block matrix
    assert minor(P, [1, 2, 3, 4], [0, 1, 2, 3]) == -2 * (s + 3)
    assert minor(P, [0, 1, 2, 3], [0, 1, 2, 3]) == (s - 1) * (s + 3)


def test_minor_index_errors():
    P = fixture_2_by_reduction()
    with pytest.raises(IndexError):
        minor(P, [0, 5], [0, 1])


def test_minor_enumeration_cap():
    big = PolyMatrix.identity(MINOR_DIM_CAP + 1)
    with pytest.raises(SizeError):
        all_minors(big, 2)


def test_smith_of_reduction_fixture():
    P = fixture_2_by_reduction()
    dec = smith_form(P)
    assert [dec.S[i, i] for i in range(3)] == [
        Poly([1]),
        Poly([1]),
        (s * (s - 1) * (s + 1)).monic(),
    ]
    assert dec.U_L * P * dec.U_R == dec.S
    for U in (dec.U_L, dec.U_R):
        d = determinant(U)
        assert d.degree == 0 and not d.is_zero()


def test_smith_identity():
    I3 = PolyMatrix.identity(3)
    dec = smith_form(I3)
    assert dec.S == I3 and dec.U_L == I3 and dec.U_R == I3


def test_smith_reconstruction_via_inverse():
    rng = random.Random(9)
    P = rand_polymatrix(rng, 3, 3)
    dec = smith_form(P)
    UL_inv = unimodular_inverse(dec.U_L)
    UR_inv = unimodular_inverse(dec.U_R)
    assert UL_inv * dec.S * UR_inv == P


def test_smith_divisibility_chain_and_minor_quotients():
    rng = random.Random(12)
    for _ in range(6):
        P = rand_polymatrix(rng, 3, 4)
        dec = smith_form(P)
        inv = dec.invariant_polys
        for a, b in zip(inv, inv[1:]):
            assert a.divides(b)
        assert inv == invariant_polynomials_by_minors(P)
        assert len(inv) == normal_rank(P)


def test_smith_equivalence_invariance():
    rng = random.Random(21)
    for _ in range(6):
        P = rand_polymatrix(rng, 3, 3)
        U = rand_unimodular(rng, 3)
        V = rand_unimodular(rng, 3)
        assert smith_form(U * P * V).invariant_polys == smith_form(P).invariant_polys


def test_adjugate_identity():
    rng = random.Random(31)
    M = rand_polymatrix(rng, 3, 3)
    det = determinant(M)
    prod = M * adjugate(M)
    expect = PolyMatrix.diag([det, det, det])
    assert prod == expect


# -- Smith-McMillan ---------------------------------------------------------


def tall_rational_fixture():
    p1 = s * (s + 1) ** 2
    return RatMatrix(
        [
            [RatFn(Poly([1]), p1), RatFn(Poly([-1, 2, 1]), p1), RatFn(s + 2, s + 1)],
            [RatFn(Poly()), RatFn(s + 2, (s + 1) ** 2), RatFn(Poly())],
            [RatFn(Poly()), RatFn(Poly()), RatFn(3 * (s + 2), s + 1)],
            [RatFn(s + 3, p1), RatFn(Poly([-3, 3, 2]), p1), RatFn(s + 2, s + 1)],
        ]
    )


def test_smith_mcmillan_tall_fixture():
    dec = smith_mcmillan(tall_rational_fixture())
    assert dec.eps == (Poly([1]), (s + 2).monic(), (s + 2).monic())
    assert dec.psi == (
        (s * (s + 1) ** 2).monic(),
        ((s + 1) ** 2).monic(),
        (s + 1).monic(),
    )
    assert dec.psi[0] == dec.phi  # first denominator is the lcd
    for e, p in zip(dec.eps, dec.psi):
        from zerolab.ratpoly import poly_gcd

        assert poly_gcd(e, p).degree == 0 or e.is_constant()
    for a, b in zip(dec.eps, dec.eps[1:]):
        assert a.divides(b)
    for a, b in zip(dec.psi, dec.psi[1:]):
        assert b.divides(a)


def test_smith_mcmillan_diagonal_is_fixed_point():
    W = RatMatrix(
        [
            [RatFn(Poly([1]), s * (s + 1)), RatFn(Poly())],
            [RatFn(Poly()), RatFn(s + 2, s + 1)],
        ]
    )
    dec = smith_mcmillan(W)
    assert [str(x) for x in dec.diagonal()] == [
        "(1)/(s^2 + s)",
        "(s + 2)/(s + 1)",
    ]


def test_smith_mcmillan_minor_cross_check():
    rng = random.Random(17)
    for _ in range(5):
        entries = []
        for _i in range(2):
            row = []
            for _j in range(2):
                num = Poly([rng.randint(-3, 3), rng.randint(-2, 2)])
                den = Poly([rng.randint(1, 3), 1])
                row.append(RatFn(num, den))
            entries.append(row)
        W = RatMatrix(entries)
        if W.normal_rank() < 2:
            continue
        dec = smith_mcmillan(W)
        prod_eps = Poly([1])
        for e in dec.eps:
            prod_eps = prod_eps * e
        prod_psi = Poly([1])
        for p in dec.psi:
            prod_psi = prod_psi * p
        d = W.determinant()
        assert RatFn(prod_eps, prod_psi) == RatFn(d.num.monic(), d.den)
