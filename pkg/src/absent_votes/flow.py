"""Polynomial WAV solvers for positional scoring rules with ``a_2 = ... = a_l``.

With every non-top position worth the same ``A``, the absent voters should all rank
the target first. What remains is filling positions ``2..l`` of each absent vote with
distinct non-target candidates so that no candidate collects more than its slack
allows. That is an integral max-flow problem:

    source -> (vote v, position d) -> (vote v, candidate a) -> candidate a -> sink

with unit capacities everywhere except ``a -> sink``, which carries how many extra
non-top positions ``a`` can absorb without beating the target.
"""

import logging
from collections.abc import Hashable
from dataclasses import dataclass, field

import networkx as nx
from networkx.algorithms.flow import edmonds_karp

from .ballots import CandidateId, Profile, Ranking, TieBreakOrder
from .rules import Rounding, Scoring, ScoringVector, scoring_scores
from .wav import WavAnswer, WavInstance

logger = logging.getLogger("absent_votes.flow")

SOURCE = "source"
SINK = "sink"


class FlowError(Exception):
    """Instance outside the preconditions of the flow solvers."""


@dataclass
class FlowNetwork:
    """A capacitated digraph plus, for WAV networks, the layout it encodes."""

    graph: nx.DiGraph
    source: Hashable = SOURCE
    sink: Hashable = SINK
    votes: int = 0
    length: int = 0
    target: CandidateId | None = None
    budgets: dict[CandidateId, int] = field(default_factory=dict)

    @property
    def demand(self) -> int:
        """Flow value needed to fill every non-top position of every absent vote."""
        return (self.length - 1) * self.votes


@dataclass(frozen=True)
class ImmediateAnswer:
    """The instance was decided without building a network."""

    yes: bool


@dataclass(frozen=True)
class FlowResult:
    value: int
    flows: dict[tuple[Hashable, Hashable], int]

    def conserves(self, net: FlowNetwork) -> bool:
        """Capacity bounds hold on every arc and flow is conserved at inner nodes."""
        balance: dict[Hashable, int] = {node: 0 for node in net.graph.nodes}
        for (u, v), amount in self.flows.items():
            if not 0 <= amount <= net.graph[u][v]["capacity"]:
                return False
            balance[u] -= amount
            balance[v] += amount
        inner_ok = all(b == 0 for n, b in balance.items() if n not in (net.source, net.sink))
        return inner_ok and balance[net.source] == -self.value


def position_node(vote: int, position: int) -> tuple:
    return ("pos", vote, position)


def slot_node(vote: int, candidate: CandidateId) -> tuple:
    return ("slot", vote, candidate)


def candidate_node(candidate: CandidateId) -> tuple:
    return ("cand", candidate)


def _uniform_tail(vector: ScoringVector) -> int:
    if not vector.has_uniform_tail:
        raise FlowError(f"Scoring vector {list(vector.weights)} does not have a_2 = ... = a_l")
    return vector.tail or 0


def _budgets(
    scores: list[int], target: CandidateId, target_total: int, tb: TieBreakOrder
) -> dict[CandidateId, int]:
    """Score each rival may still gain and stay behind the target.

    A rival favored by the tie-break must end strictly below the target.
    """
    return {
        a: target_total - scores[a] - (1 if tb.favored(a, target) else 0)
        for a in range(len(scores))
        if a != target
    }


def _network(
    m: int,
    target: CandidateId,
    votes: int,
    length: int,
    budgets: dict[CandidateId, int],
    unit: int,
) -> FlowNetwork:
    graph = nx.DiGraph()
    graph.add_node(SOURCE)
    graph.add_node(SINK)
    rivals = [a for a in range(m) if a != target]
    for a in rivals:
        graph.add_edge(candidate_node(a), SINK, capacity=budgets[a] // unit)
    for v in range(votes):
        for a in rivals:
            graph.add_edge(slot_node(v, a), candidate_node(a), capacity=1)
        for d in range(2, length + 1):
            graph.add_edge(SOURCE, position_node(v, d), capacity=1)
            for a in rivals:
                graph.add_edge(position_node(v, d), slot_node(v, a), capacity=1)
    return FlowNetwork(graph, SOURCE, SINK, votes, length, target, dict(budgets))


def max_flow(net: FlowNetwork) -> FlowResult:
    """Integral maximum flow by shortest augmenting paths."""
    value, flow_dict = nx.maximum_flow(net.graph, net.source, net.sink, flow_func=edmonds_karp)
    flows = {
        (u, v): int(amount)
        for u, targets in flow_dict.items()
        for v, amount in targets.items()
        if net.graph.has_edge(u, v)
    }
    return FlowResult(int(value), flows)


def _decide(
    m: int,
    target: CandidateId,
    votes: int,
    length: int,
    budgets: dict[CandidateId, int],
    unit: int,
) -> FlowNetwork | ImmediateAnswer:
    if any(b < 0 for b in budgets.values()):
        return ImmediateAnswer(False)
    if unit == 0:
        return ImmediateAnswer(True)
    return _network(m, target, votes, length, budgets, unit)


def build_wav_network(inst: WavInstance) -> FlowNetwork | ImmediateAnswer:
    """Flow network of a top-l scoring instance, or its answer when no network is needed.

    Raises:
        FlowError: The rule is not a scoring rule with a uniform tail, or the ballots are
            not top-l.
    """
    rule = inst.rule
    if not isinstance(rule, Scoring):
        raise FlowError("Flow solver needs a positional scoring rule")
    if inst.mode.is_up_to:
        raise FlowError("build_wav_network handles top-l ballots only")
    unit = _uniform_tail(rule.vector)
    scores = scoring_scores(inst.known, rule.vector, rule.rounding)
    target_total = scores[inst.target] + inst.t * rule.vector.weights[0]
    budgets = _budgets(scores, inst.target, target_total, inst.tb)
    return _decide(inst.m, inst.target, inst.t, inst.mode.length, budgets, unit)


def _filler_votes(m: int, target: CandidateId, votes: int, length: int) -> list[Ranking]:
    others = [a for a in range(m) if a != target][: length - 1]
    return [(target, *others)] * votes


def _decode(net: FlowNetwork, result: FlowResult, m: int) -> list[Ranking]:
    rankings = []
    for v in range(net.votes):
        ranking = [net.target]
        for d in range(2, net.length + 1):
            ranking += [
                a
                for a in range(m)
                if result.flows.get((position_node(v, d), slot_node(v, a)), 0) == 1
            ]
        rankings.append(tuple(ranking))
    return rankings


def _solve_full_votes(
    m: int,
    target: CandidateId,
    votes: int,
    length: int,
    budgets: dict[CandidateId, int],
    unit: int,
) -> list[Ranking] | None:
    """Target-first full ballots meeting the budgets, or None when impossible."""
    decided = _decide(m, target, votes, length, budgets, unit)
    if isinstance(decided, ImmediateAnswer):
        return _filler_votes(m, target, votes, length) if decided.yes else None
    result = max_flow(decided)
    logger.info("Max flow %d of %d needed", result.value, decided.demand)
    if result.value != decided.demand:
        return None
    return _decode(decided, result, m)


def _answer(inst: WavInstance, rankings: list[Ranking]) -> WavAnswer:
    witness = Profile.from_rankings(inst.mode, inst.m, rankings)
    if not inst.is_witness(witness):
        raise FlowError(f"Decoded witness {witness.entries} does not elect the target")
    return WavAnswer(True, witness)


def wav_scoring_topl(inst: WavInstance) -> WavAnswer:
    """Decide a top-l scoring instance whose vector has ``a_2 = ... = a_l``."""
    decided = build_wav_network(inst)
    if isinstance(decided, ImmediateAnswer):
        logger.info("Decided without a network: %s", "yes" if decided.yes else "no")
        if not decided.yes:
            return WavAnswer(False)
        return _answer(inst, _filler_votes(inst.m, inst.target, inst.t, inst.mode.length))
    result = max_flow(decided)
    logger.info("Max flow %d of %d needed", result.value, decided.demand)
    if result.value != decided.demand:
        return WavAnswer(False)
    return _answer(inst, _decode(decided, result, inst.m))


def _check_up_to(inst: WavInstance, rounding: Rounding) -> Scoring:
    rule = inst.rule
    if not isinstance(rule, Scoring) or rule.rounding is not rounding:
        raise FlowError(f"Needs a scoring rule with {rounding.value}-rounding")
    if not inst.mode.is_up_to:
        raise FlowError("Rounding solvers handle up-to-L ballots only")
    return rule


def wav_scoring_up_rounding(inst: WavInstance) -> WavAnswer:
    """Up-rounding: ranking the target alone is an optimal absent vote."""
    _check_up_to(inst, Rounding.UP)
    witness = Profile.from_rankings(inst.mode, inst.m, [(inst.target,)] * inst.t)
    if inst.is_witness(witness):
        return WavAnswer(True, witness)
    return WavAnswer(False)


def wav_scoring_down_rounding(inst: WavInstance) -> WavAnswer:
    """Down-rounding: absent votes are either ``[target]`` alone or full L-ballots.

    Tries ``k = 0..t`` lone-target votes (each worth ``a_L`` to the target) and solves
    the remaining ``t - k`` full ballots by max flow. The smallest successful ``k`` wins.
    """
    rule = _check_up_to(inst, Rounding.DOWN)
    length = inst.mode.length
    unit = _uniform_tail(rule.vector)
    scores = scoring_scores(inst.known, rule.vector, rule.rounding)
    lone = rule.vector.weights[-1]
    top = rule.vector.weights[0]
    for k in range(inst.t + 1):
        full = inst.t - k
        target_total = scores[inst.target] + k * lone + full * top
        budgets = _budgets(scores, inst.target, target_total, inst.tb)
        rankings = _solve_full_votes(inst.m, inst.target, full, length, budgets, unit)
        logger.debug("Down-rounding case k=%d: %s", k, "yes" if rankings is not None else "no")
        if rankings is not None:
            return _answer(inst, [(inst.target,)] * k + rankings)
    return WavAnswer(False)


def flow_applicable(inst: WavInstance) -> bool:
    """Whether one of the polynomial scoring solvers covers this instance."""
    rule = inst.rule
    if not isinstance(rule, Scoring):
        return False
    if rule.rounding is Rounding.UP:
        return True
    return rule.vector.has_uniform_tail


def wav_scoring(inst: WavInstance) -> WavAnswer:
    """Dispatch to the scoring solver matching the ballot mode and rounding."""
    if not flow_applicable(inst):
        raise FlowError("No polynomial solver applies to this rule")
    rounding = inst.rule.rounding  # type: ignore[union-attr]
    if rounding is Rounding.UP:
        return wav_scoring_up_rounding(inst)
    if rounding is Rounding.DOWN:
        return wav_scoring_down_rounding(inst)
    return wav_scoring_topl(inst)
