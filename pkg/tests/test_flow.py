"""Tests for the max-flow scoring solvers, with the exhaustive solver as oracle."""

import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from absent_votes.ballots import BallotMode, Profile, TieBreakOrder
from absent_votes.flow import (
    SINK,
    SOURCE,
    FlowError,
    FlowNetwork,
    ImmediateAnswer,
    build_wav_network,
    flow_applicable,
    max_flow,
    wav_scoring,
    wav_scoring_down_rounding,
    wav_scoring_topl,
    wav_scoring_up_rounding,
)
from absent_votes.rules import Rounding, Scoring, ScoringVector, Stv
from absent_votes.wav import WavInstance, wav_bruteforce


def scoring_instance(
    m: int,
    mode: BallotMode,
    weights: tuple[int, ...],
    rounding: Rounding,
    rankings: list[tuple[int, ...]],
    t: int,
    target: int,
    tb: TieBreakOrder | None = None,
) -> WavInstance:
    rule = Scoring(ScoringVector(weights), rounding)
    known = Profile.from_rankings(mode, m, rankings)
    return WavInstance(mode, m, known, t, target, rule, tb or TieBreakOrder.lexicographic(m))


def random_instance(rng: random.Random, mode_kind: str, max_m: int = 4) -> WavInstance:
    m = rng.randint(2, max_m)
    length = rng.randint(2, min(3, m))
    tail = rng.randint(0, 8)
    weights = (rng.randint(tail, 8),) + (tail,) * (length - 1)
    if mode_kind == "top":
        mode, rounding = BallotMode.top(length), Rounding.TOP_EXACT
    else:
        mode = BallotMode.up_to(length)
        rounding = Rounding.DOWN if mode_kind == "down" else Rounding.UP
        weights = (rng.randint(0, 8),) + weights[1:] if mode_kind == "up" else weights
        weights = tuple(sorted(weights, reverse=True))
    rankings = []
    for _ in range(rng.randint(0, 6)):
        size = length if mode_kind == "top" else rng.randint(1, length)
        rankings.append(tuple(rng.sample(range(m), size)))
    order = list(range(m))
    rng.shuffle(order)
    return scoring_instance(
        m, mode, weights, rounding, rankings, rng.randint(0, 3), rng.randrange(m),
        TieBreakOrder(tuple(order)),
    )


def assert_agrees_with_oracle(inst: WavInstance) -> None:
    answer = wav_scoring(inst)
    oracle = wav_bruteforce(inst)
    assert answer.yes == oracle.yes
    if answer.yes:
        assert answer.witness.total == inst.t
        assert inst.is_witness(answer.witness)


class TestBuildNetwork:
    def test_example_budgets(self):
        inst = scoring_instance(
            3, BallotMode.top(2), (2, 1), Rounding.TOP_EXACT, [(0, 1)], 2, 2,
            TieBreakOrder((2, 0, 1)),
        )
        net = build_wav_network(inst)
        assert isinstance(net, FlowNetwork)
        assert net.budgets == {0: 2, 1: 3}
        assert net.demand == 2
        assert max_flow(net).value == 2

    def test_node_count(self):
        inst = scoring_instance(
            4, BallotMode.top(3), (3, 1, 1), Rounding.TOP_EXACT, [(0, 1, 2)], 2, 3
        )
        net = build_wav_network(inst)
        m, t, length = 4, 2, 3
        assert net.graph.number_of_nodes() == (length - 1) * t + t * (m - 1) + (m - 1) + 2

    def test_immediate_no(self):
        inst = scoring_instance(
            3, BallotMode.top(2), (2, 1), Rounding.TOP_EXACT, [(0, 1), (0, 1)], 1, 2
        )
        assert build_wav_network(inst) == ImmediateAnswer(False)

    def test_zero_tail_decides_directly(self):
        inst = scoring_instance(
            3, BallotMode.top(2), (1, 0), Rounding.TOP_EXACT, [(0, 1)], 1, 2,
            TieBreakOrder((2, 0, 1)),
        )
        assert build_wav_network(inst) == ImmediateAnswer(True)

    def test_t0_network_has_no_positions(self):
        inst = scoring_instance(3, BallotMode.top(2), (2, 1), Rounding.TOP_EXACT, [], 0, 0)
        net = build_wav_network(inst)
        assert net.demand == 0
        assert max_flow(net).value == 0

    def test_rejects_non_uniform_tail(self):
        inst = scoring_instance(
            4, BallotMode.top(3), (8, 2, 1), Rounding.TOP_EXACT, [(0, 1, 2)], 1, 3
        )
        with pytest.raises(FlowError, match="a_2"):
            build_wav_network(inst)

    def test_rejects_non_scoring_rule(self, p1, lex4):
        inst = WavInstance(p1.mode, 4, p1, 1, 0, Stv(), lex4)
        with pytest.raises(FlowError, match="scoring"):
            build_wav_network(inst)


class TestMaxFlow:
    def test_zero_caps(self):
        graph = nx.DiGraph()
        graph.add_edge(SOURCE, "a", capacity=1)
        graph.add_edge("a", SINK, capacity=0)
        assert max_flow(FlowNetwork(graph)).value == 0

    def test_bipartite_matching(self):
        graph = nx.DiGraph()
        for i in range(3):
            graph.add_edge(SOURCE, ("l", i), capacity=1)
            graph.add_edge(("r", i), SINK, capacity=1)
            for j in range(3):
                graph.add_edge(("l", i), ("r", j), capacity=1)
        net = FlowNetwork(graph)
        result = max_flow(net)
        assert result.value == 3
        assert result.conserves(net)


class TestTopL:
    def test_example_yes(self):
        inst = scoring_instance(
            3, BallotMode.top(2), (2, 1), Rounding.TOP_EXACT, [(0, 1)], 2, 2,
            TieBreakOrder((2, 0, 1)),
        )
        answer = wav_scoring_topl(inst)
        assert answer.yes
        assert all(ranking[0] == 2 for ranking, _ in answer.witness.entries)
        assert inst.is_witness(answer.witness)

    def test_example_no(self):
        inst = scoring_instance(
            3, BallotMode.top(2), (2, 1), Rounding.TOP_EXACT, [(0, 1), (0, 1)], 1, 2
        )
        assert not wav_scoring_topl(inst).yes

    def test_length_two_any_vector(self):
        inst = scoring_instance(
            4, BallotMode.top(2), (5, 3), Rounding.TOP_EXACT, [(0, 1), (1, 2), (0, 3)], 2, 3
        )
        assert_agrees_with_oracle(inst)

    def test_flow_conserves(self):
        inst = scoring_instance(
            4, BallotMode.top(3), (3, 1, 1), Rounding.TOP_EXACT, [(0, 1, 2)] * 2, 3, 3
        )
        net = build_wav_network(inst)
        result = max_flow(net)
        assert result.conserves(net)
        assert all(isinstance(v, int) for v in result.flows.values())


class TestUpRounding:
    def test_p2_no(self, p2, lex4):
        inst = WavInstance(
            p2.mode, 4, p2, 1, 1, Scoring(ScoringVector((8, 2, 1)), Rounding.UP), lex4
        )
        assert not wav_scoring_up_rounding(inst).yes

    def test_p2_yes(self, p2, lex4):
        inst = WavInstance(
            p2.mode, 4, p2, 2, 2, Scoring(ScoringVector((8, 2, 1)), Rounding.UP), lex4
        )
        answer = wav_scoring_up_rounding(inst)
        assert answer.yes
        assert answer.witness == Profile(p2.mode, 4, (((2,), 2),))

    def test_rejects_top_mode(self):
        inst = scoring_instance(3, BallotMode.top(2), (2, 1), Rounding.TOP_EXACT, [], 1, 0)
        with pytest.raises(FlowError):
            wav_scoring_up_rounding(inst)


class TestDownRounding:
    def test_t0_is_winner_check(self, p2, lex4):
        rule = Scoring(ScoringVector((8, 1, 1)), Rounding.DOWN)
        assert wav_scoring_down_rounding(WavInstance(p2.mode, 4, p2, 0, 1, rule, lex4)).yes
        assert not wav_scoring_down_rounding(WavInstance(p2.mode, 4, p2, 0, 0, rule, lex4)).yes

    def test_mixes_lone_and_full_votes(self):
        inst = scoring_instance(
            2, BallotMode.up_to(2), (1, 1), Rounding.DOWN, [(0,), (0,)], 3, 1,
            TieBreakOrder((1, 0)),
        )
        answer = wav_scoring_down_rounding(inst)
        assert answer.yes
        assert answer.witness == Profile(inst.mode, 2, (((1,), 2), ((1, 0), 1)))

    def test_rejects_up_rounding(self, p2, lex4):
        rule = Scoring(ScoringVector((8, 2, 1)), Rounding.UP)
        with pytest.raises(FlowError, match="down"):
            wav_scoring_down_rounding(WavInstance(p2.mode, 4, p2, 1, 0, rule, lex4))


class TestDispatch:
    def test_applicability(self, p1, p2, lex4):
        vector = ScoringVector((8, 2, 1))
        up = WavInstance(p2.mode, 4, p2, 1, 0, Scoring(vector, Rounding.UP), lex4)
        down = WavInstance(p2.mode, 4, p2, 1, 0, Scoring(vector, Rounding.DOWN), lex4)
        assert flow_applicable(up)
        assert not flow_applicable(down)
        assert not flow_applicable(WavInstance(p1.mode, 4, p1, 1, 0, Stv(), lex4))

    def test_wav_scoring_rejects_inapplicable(self, p1, lex4):
        with pytest.raises(FlowError):
            wav_scoring(WavInstance(p1.mode, 4, p1, 1, 0, Stv(), lex4))


class TestOracleEquivalence:
    @pytest.mark.parametrize("mode_kind", ["top", "down", "up"])
    @given(seed=st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=60, deadline=None)
    def test_random_instances(self, mode_kind, seed):
        assert_agrees_with_oracle(random_instance(random.Random(seed), mode_kind))

    @pytest.mark.parametrize("mode_kind", ["top", "down", "up"])
    @given(seed=st.integers(min_value=0, max_value=2**32 - 1), extra=st.integers(1, 2))
    @settings(max_examples=40, deadline=None)
    def test_more_absent_votes_never_hurt(self, mode_kind, seed, extra):
        inst = random_instance(random.Random(seed), mode_kind)
        if wav_scoring(inst).yes:
            larger = WavInstance(
                inst.mode, inst.m, inst.known, inst.t + extra, inst.target, inst.rule, inst.tb
            )
            assert wav_scoring(larger).yes

    @pytest.mark.slow
    @pytest.mark.parametrize("mode_kind", ["top", "down", "up"])
    def test_five_hundred_instances(self, mode_kind):
        rng = random.Random(20240501)
        for _ in range(500):
            assert_agrees_with_oracle(random_instance(rng, mode_kind, max_m=5))
