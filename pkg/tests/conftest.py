"""Shared fixture systems used across the test modules.

These are the desk-scale models exercised throughout: small state-space
systems with interesting zero structure.
"""
import pytest

from zerolab.statespace import StateSpace


def make(name):
    return dict(
        # single input companion fixture (3 states)
        companion3=StateSpace(
            [[2, 1, 0], [0, 1, 1], [1, 0, 0]], [[1], [0], [0]], [[1, 0, 0]]
        ),
        # n = 4, r = 2, nu = 2 block companion fixture
        asseo4=StateSpace(
            [[2, 1, 0, 1], [1, 0, 1, 1], [1, 1, 0, 0], [0, 0, 1, 0]],
            [[1, 0], [0, 0], [0, 0], [0, 1]],
            [[1, 0, 0, 0], [0, 1, 1, 0]],
        ),
        # n = 4, r = 2, nu = 3 staircase fixture (stairs 1, 1, 2)
        stair4=StateSpace(
            [[2, 1, 0, 0], [0, 1, 0, 1], [0, 2, 0, 0], [1, 1, 0, 0]],
            [[1, 0], [0, 0], [0, 0], [0, 1]],
            [[1, 0, 0, 0], [0, 0, 1, 1]],
        ),
        # diagonal system with one invariant zero and both decoupling kinds
        dec3=StateSpace(
            [[1, 0, 0], [0, -1, 0], [0, 0, -3]],
            [[0], [-1], [-1]],
            [[1, -1, 0], [0, 2, 0]],
        ),
        # taxonomy showcase: all five zero sets nonempty or distinct
        tax4=StateSpace(
            [[1, 0, 0, 0], [0, -1, 0, 0], [0, 0, -5, 0], [0, 0, 0, 7]],
            [[0], [-1], [-1], [-1]],
            [[1, 0, 2, 1], [0, 0, 2, 1]],
        ),
        # controllable and unobservable SISO with a cancelling mode
        hidden3=StateSpace(
            [[1, 4, 0], [0, -1, 0], [0, 2, -3]],
            [[0], [-1], [-1]],
            [[-1, -1, 0]],
        ),
        # minimal SISO with one invariant zero at the origin
        origin2=StateSpace([[2, 0], [1, 1]], [[1], [0]], [[1, 1]]),
    )[name]


@pytest.fixture
def companion3():
    return make("companion3")


@pytest.fixture
def asseo4():
    return make("asseo4")


@pytest.fixture
def stair4():
    return make("stair4")


@pytest.fixture
def dec3():
    return make("dec3")


@pytest.fixture
def tax4():
    return make("tax4")


@pytest.fixture
def hidden3():
    return make("hidden3")


@pytest.fixture
def origin2():
    return make("origin2")
