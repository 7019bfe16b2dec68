"""Controllability/observability structure and PBH-based tests."""
import random
from fractions import Fraction

import pytest

from zerolab import qmat
from zerolab.ratpoly import DomainError
from zerolab.statespace import StateSpace


def test_dimension_checks():
    with pytest.raises(DomainError):
        StateSpace([[1, 0]], [[1]], [[1]])
    with pytest.raises(DomainError):
        StateSpace([[1]], [[1], [2]], [[1]])


def test_controllability_block_fixture(asseo4):
    info = asseo4.controllability()
    assert info.controllable
    assert info.nu == 2
    assert info.l_list == (2, 2)


def test_controllability_stair_fixture(stair4):
    info = stair4.controllability()
    assert info.nu == 3
    assert info.l_list == (1, 1, 2)
    assert info.rank_Y == 4


def test_controllability_trivial():
    sysd = StateSpace([[0, 0], [0, 0]], qmat.eye(2), [[1, 0]])
    info = sysd.controllability()
    assert info.controllable and info.nu == 1 and info.l_list == (2,)


def test_observability_fixtures(hidden3, dec3):
    info = hidden3.observability()
    assert not info.controllable
    assert hidden3.n - info.rank_Y == 1
    info2 = dec3.observability()
    assert dec3.n - info2.rank_Y == 1
    full = StateSpace([[1, 2], [3, 4]], [[1], [0]], qmat.eye(2))
    assert full.is_observable()


def test_l_list_monotone_random():
    rng = random.Random(6)
    found = 0
    while found < 12:
        n, r = rng.randint(2, 5), rng.randint(1, 2)
        A = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
        B = [[rng.randint(-2, 2) for _ in range(r)] for _ in range(n)]
        sysd = StateSpace(A, B, qmat.eye(n))
        info = sysd.controllability()
        if not info.controllable or qmat.rank(sysd.B) != r:
            continue
        found += 1
        ll = info.l_list
        assert all(a <= b for a, b in zip(ll, ll[1:]))
        assert ll[-1] == qmat.rank(sysd.B)
        assert sum(ll) == info.rank_Y == n
        assert info.nu * r >= n


def test_pbh_agrees_with_kalman():
    rng = random.Random(8)
    for _ in range(10):
        n = rng.randint(2, 4)
        A = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
        B = [[rng.randint(-2, 2)] for _ in range(n)]
        sysd = StateSpace(A, B, qmat.eye(n))
        kalman = sysd.is_controllable()
        es = sysd.eigenstructure()
        pbh = all(r == n for r in es.pbh_input_ranks)
        assert kalman == pbh


def test_stabilizable_detectable_antenna():
    sysd = StateSpace(
        [["0", "1"], ["0", "-4.6"]], [["0"], ["0.787"]], [["1", "0"]]
    )
    assert sysd.is_stabilizable()
    assert sysd.is_detectable()


def test_not_stabilizable_uncontrolled_unstable_mode():
    sysd = StateSpace([[1, 0], [0, -1]], [[0], [1]], [[1, 0]])
    assert not sysd.is_stabilizable()


def test_stable_system_always_stabilizable():
    rng = random.Random(10)
    for _ in range(8):
        n = rng.randint(2, 4)
        # strictly diagonally dominant negative diagonal => Hurwitz
        A = [
            [
                -(n + 3) if i == j else rng.randint(-1, 1)
                for j in range(n)
            ]
            for i in range(n)
        ]
        B = [[rng.randint(-2, 2)] for _ in range(n)]
        sysd = StateSpace(A, B, qmat.eye(n))
        assert sysd.is_stabilizable()


def test_char_poly_and_rational_eigs(companion3):
    chi = companion3.char_poly()
    assert [str(c) for c in chi.coeffs] == ["-1", "2", "-3", "1"]
    sysd = StateSpace([[1, 0], [0, -1]], [[1], [1]], [[1, 0]])
    assert sorted(sysd.rational_eigenvalues()) == [Fraction(-1), Fraction(1)]


def test_nonzero_feedthrough_rejected_by_zero_machinery():
    from zerolab.statespace import StructuralError
    from zerolab.zeros import system_matrix

    sysd = StateSpace([[1]], [[1]], [[1]], D=[[1]])
    with pytest.raises(StructuralError):
        system_matrix(sysd)


def test_similarity_transform_preserves_char_poly(asseo4):
    N = qmat.qmat([[1, 0, 0, 0], [2, 1, 0, 0], [0, 0, 1, 0], [1, 0, -1, 1]])
    moved = asseo4.transformed(N)
    assert moved.char_poly() == asseo4.char_poly()
