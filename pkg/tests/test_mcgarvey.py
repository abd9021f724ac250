"""Tests for realizing weighted majority graphs as profiles."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from absent_votes.ballots import BallotMode, wmg
from absent_votes.mcgarvey import McGarveyError, WmgTarget, realize_wmg, unit_edge_profile


@st.composite
def even_targets(draw, max_m: int = 6) -> tuple[WmgTarget, int]:
    m = draw(st.integers(min_value=2, max_value=max_m))
    length = draw(st.integers(min_value=2, max_value=min(m, 4)))
    edges = {}
    for a in range(m):
        for b in range(a + 1, m):
            edges[a, b] = 2 * draw(st.integers(min_value=-4, max_value=4))
    return WmgTarget.from_edges(m, edges), length


class TestWmgTarget:
    def test_from_edges_sets_reverse(self):
        target = WmgTarget.from_edges(3, {(0, 1): 4, (2, 0): 2})
        assert target.w[1, 0] == -4
        assert target.w[0, 2] == -2

    def test_rejects_odd(self):
        with pytest.raises(McGarveyError, match="odd"):
            WmgTarget.from_edges(3, {(0, 1): 3})

    def test_rejects_asymmetric(self):
        with pytest.raises(McGarveyError, match="antisymmetric"):
            WmgTarget(2, np.array([[0, 2], [2, 0]]))

    def test_rejects_wrong_shape(self):
        with pytest.raises(McGarveyError, match="3x3"):
            WmgTarget(3, np.zeros((2, 2)))


class TestUnitEdge:
    @pytest.mark.parametrize(
        "m,length", [(m, length) for m in range(3, 9) for length in range(2, min(4, m) + 1)]
    )
    def test_single_margin_of_two(self, m, length):
        for a, b in itertools.permutations(range(m), 2):
            profile = unit_edge_profile(m, length, a, b)
            expected = WmgTarget.from_edges(m, {(a, b): 2})
            assert np.array_equal(wmg(profile).w, expected.w), (a, b)
            assert profile.total == math.perm(m, length)

    def test_mode_is_carried(self):
        profile = unit_edge_profile(4, 2, 1, 2, BallotMode.up_to(3))
        assert profile.mode == BallotMode.up_to(3)

    def test_rejects_same_candidate(self):
        with pytest.raises(McGarveyError, match="distinct"):
            unit_edge_profile(4, 2, 1, 1)

    def test_rejects_short_ballots(self):
        with pytest.raises(McGarveyError, match="at least 2"):
            unit_edge_profile(4, 1, 0, 1)

    def test_rejects_length_above_m(self):
        with pytest.raises(McGarveyError, match="exceeds"):
            unit_edge_profile(3, 4, 0, 1)


class TestRealizeWmg:
    def test_zero_target_is_empty(self):
        profile = realize_wmg(WmgTarget.from_edges(4, {}), 2)
        assert profile.total == 0

    def test_heavy_edge_uses_more_blocks(self):
        target = WmgTarget.from_edges(4, {(0, 1): 10})
        profile = realize_wmg(target, 3)
        assert np.array_equal(wmg(profile).w, target.w)
        # two tails per pair, five units
        assert profile.total == 3 * math.perm(4, 3)

    def test_cycle(self):
        target = WmgTarget.from_edges(3, {(0, 1): 2, (1, 2): 2, (2, 0): 2})
        assert np.array_equal(wmg(realize_wmg(target, 2)).w, target.w)

    @given(even_targets())
    @settings(max_examples=200, deadline=None)
    def test_exact_on_random_targets(self, case):
        target, length = case
        profile = realize_wmg(target, length)
        assert np.array_equal(wmg(profile).w, target.w)
        assert all(len(r) == length for r, _ in profile.entries)

    @pytest.mark.slow
    @pytest.mark.parametrize("m,length", [(9, 3), (9, 4), (10, 3)])
    def test_unit_edges_on_larger_blocks(self, m, length):
        profile = unit_edge_profile(m, length, 2, 5)
        assert np.array_equal(
            wmg(profile).w, WmgTarget.from_edges(m, {(2, 5): 2}).w
        )
