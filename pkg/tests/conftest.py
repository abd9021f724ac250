"""Shared profiles and instances."""

import pytest

from absent_votes.ballots import BallotMode, Profile, TieBreakOrder
from absent_votes.rxc3 import Rxc3Instance

# Candidates are numbered from 0: written candidate "1" is id 0, "2" is id 1, and so on.


@pytest.fixture
def p1() -> Profile:
    """2 x [3 > 1], [1 > 4], [2 > 1] over four candidates, top-2."""
    return Profile(BallotMode.top(2), 4, (((2, 0), 2), ((0, 3), 1), ((1, 0), 1)))


@pytest.fixture
def p2() -> Profile:
    """2 x [1 > 3], [2 > 1 > 4], [3] over four candidates, up-to-3."""
    return Profile(BallotMode.up_to(3), 4, (((0, 2), 2), ((1, 0, 3), 1), ((2,), 1)))


@pytest.fixture
def lex4() -> TieBreakOrder:
    return TieBreakOrder.lexicographic(4)


@pytest.fixture
def rxc3_yes() -> Rxc3Instance:
    """q=6 with the unique cover {1, 4}."""
    return Rxc3Instance(6, ((1, 2, 3),) * 3 + ((4, 5, 6),) * 3)


@pytest.fixture
def rxc3_no() -> Rxc3Instance:
    """q=6 with no exact cover."""
    return Rxc3Instance(
        6, ((1, 2, 3), (1, 2, 4), (1, 5, 6), (3, 4, 5), (3, 4, 6), (2, 5, 6))
    )
