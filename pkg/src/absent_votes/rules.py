"""Winner computation for STV, Copeland, Maximin and positional scoring rules.

Every rule is resolute: ties are broken by a ``TieBreakOrder`` in which earlier
candidates are favored. Favored candidates win score ties and survive STV
elimination ties.
"""

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from .ballots import (
    BallotMode,
    CandidateId,
    Profile,
    Ranking,
    TieBreakOrder,
    WeightedMajorityGraph,
    wmg,
)

logger = logging.getLogger("absent_votes.rules")


class RuleError(Exception):
    """Rule definition inconsistent with the ballots it is applied to."""


class Rounding(Enum):
    """How a truncated up-to-L ballot maps positions onto the scoring vector."""

    TOP_EXACT = "exact"
    UP = "up"
    DOWN = "down"


@dataclass(frozen=True)
class ScoringVector:
    """Non-increasing, non-negative positional scores ``a_1 >= a_2 >= ... >= 0``."""

    weights: tuple[int, ...]

    def __post_init__(self) -> None:
        weights = tuple(int(a) for a in self.weights)
        if not weights:
            raise RuleError("Scoring vector must not be empty")
        if weights[-1] < 0:
            raise RuleError(f"Scoring vector has a negative entry: {list(weights)}")
        if any(x < y for x, y in zip(weights, weights[1:])):
            raise RuleError(f"Scoring vector is not non-increasing: {list(weights)}")
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return len(self.weights)

    @property
    def tail(self) -> int | None:
        """The common value of ``a_2..a_last`` when they are all equal, else None."""
        rest = set(self.weights[1:])
        if not rest:
            return None
        return rest.pop() if len(rest) == 1 else None

    @property
    def has_uniform_tail(self) -> bool:
        return len(self.weights) == 1 or self.tail is not None

    def position_score(self, position: int, length: int, rounding: Rounding) -> int:
        """Score of the candidate at 0-based ``position`` in a ballot of ``length``."""
        if rounding is Rounding.DOWN:
            return self.weights[len(self.weights) - length + position]
        return self.weights[position]


@dataclass(frozen=True)
class Stv:
    pass


@dataclass(frozen=True)
class Copeland:
    alpha: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        alpha = Fraction(self.alpha)
        if not 0 <= alpha <= 1:
            raise RuleError(f"Copeland alpha must lie in [0, 1], got {alpha}")
        object.__setattr__(self, "alpha", alpha)


@dataclass(frozen=True)
class Maximin:
    pass


@dataclass(frozen=True)
class Scoring:
    vector: ScoringVector
    rounding: Rounding = Rounding.TOP_EXACT


Rule = Stv | Copeland | Maximin | Scoring


@dataclass(frozen=True)
class StvRound:
    """Plurality tally over the surviving candidates and who was eliminated."""

    scores: dict[CandidateId, int] = field(hash=False)
    eliminated: CandidateId


@dataclass(frozen=True)
class StvTrace:
    rounds: tuple[StvRound, ...] = ()

    @property
    def eliminations(self) -> list[CandidateId]:
        return [r.eliminated for r in self.rounds]


def check_rule(rule: Rule, mode: BallotMode, m: int) -> None:
    """Raise RuleError unless the rule can be evaluated on ballots of this mode."""
    if isinstance(rule, Maximin) and m < 2:
        raise RuleError("Maximin needs at least two candidates")
    if not isinstance(rule, Scoring):
        return
    if len(rule.vector) != mode.length:
        raise RuleError(
            f"Scoring vector has {len(rule.vector)} entries, ballots have length {mode.length}"
        )
    if mode.is_up_to and rule.rounding is Rounding.TOP_EXACT:
        raise RuleError("Up-to ballots need an up or down rounding indicator")
    if not mode.is_up_to and rule.rounding is not Rounding.TOP_EXACT:
        raise RuleError("Rounding indicators only apply to up-to ballots")


def run_stv(
    entries: Iterable[tuple[Ranking, int]],
    m: int,
    tb: TieBreakOrder,
    record: bool = True,
) -> tuple[CandidateId, StvTrace]:
    """Single transferable vote over raw (ranking, count) entries.

    Each vote sits with its highest-ranked surviving candidate; votes whose ranked
    candidates are all eliminated are exhausted and count for nobody. One candidate is
    eliminated per round, the tb-least-favored among those with the lowest tally, even
    when every tally is zero.

    Args:
        entries: Rankings with multiplicities; duplicates are allowed.
        m: Number of candidates.
        tb: Tie-break order.
        record: When False, skip building the per-round trace.
    """
    alive = [True] * m
    tally = [0] * m
    piles: list[list[tuple[Ranking, int, int]]] = [[] for _ in range(m)]
    for ranking, count in entries:
        top = ranking[0]
        piles[top].append((ranking, count, 0))
        tally[top] += count

    rounds: list[StvRound] = []
    survivors = list(range(m))
    while len(survivors) > 1:
        low = min(tally[a] for a in survivors)
        loser = tb.worst(a for a in survivors if tally[a] == low)
        if record:
            rounds.append(StvRound({a: tally[a] for a in survivors}, loser))
        alive[loser] = False
        survivors.remove(loser)
        for ranking, count, position in piles[loser]:
            position += 1
            while position < len(ranking) and not alive[ranking[position]]:
                position += 1
            if position < len(ranking):
                heir = ranking[position]
                piles[heir].append((ranking, count, position))
                tally[heir] += count
        piles[loser] = []
        tally[loser] = 0
    return survivors[0], StvTrace(tuple(rounds))


def stv_winner(profile: Profile, tb: TieBreakOrder) -> tuple[CandidateId, StvTrace]:
    """STV winner and the full elimination trace."""
    return run_stv(profile.entries, profile.m, tb)


def copeland_from_wmg(graph: WeightedMajorityGraph, alpha: Fraction) -> list[Fraction]:
    wins = (graph.w > 0).sum(axis=1)
    ties = (graph.w == 0).sum(axis=1) - 1
    return [int(won) + alpha * int(tied) for won, tied in zip(wins, ties)]


def copeland_scores(profile: Profile, alpha: Fraction) -> list[Fraction]:
    """Wins plus ``alpha`` times ties in the pairwise majority comparisons."""
    return copeland_from_wmg(wmg(profile), Fraction(alpha))


def maximin_from_wmg(graph: WeightedMajorityGraph) -> list[int]:
    if graph.m < 2:
        raise RuleError("Maximin needs at least two candidates")
    margins = graph.w.copy()
    np.fill_diagonal(margins, np.iinfo(np.int64).max)
    return [int(x) for x in margins.min(axis=1)]


def maximin_scores(profile: Profile) -> list[int]:
    """Each candidate's worst pairwise margin."""
    return maximin_from_wmg(wmg(profile))


def scoring_row(ranking: Ranking, m: int, vector: ScoringVector, rounding: Rounding) -> list[int]:
    """Per-candidate scores contributed by a single ranking."""
    row = [0] * m
    for position, candidate in enumerate(ranking):
        row[candidate] = vector.position_score(position, len(ranking), rounding)
    return row


def scoring_scores(profile: Profile, vector: ScoringVector, rounding: Rounding) -> list[int]:
    """Positional scores; unranked candidates get nothing from a ballot."""
    check_rule(Scoring(vector, rounding), profile.mode, profile.m)
    scores = [0] * profile.m
    for ranking, count in profile.entries:
        for position, candidate in enumerate(ranking):
            scores[candidate] += count * vector.position_score(position, len(ranking), rounding)
    return scores


def best_by_score(scores: Sequence, tb: TieBreakOrder) -> CandidateId:
    """The tb-most-favored candidate among those with the highest score."""
    top = max(scores)
    return tb.best(c for c in range(len(scores)) if scores[c] == top)


def rule_scores(profile: Profile, rule: Rule) -> list:
    """Per-candidate scores for the score-based rules."""
    if isinstance(rule, Copeland):
        return copeland_scores(profile, rule.alpha)
    if isinstance(rule, Maximin):
        return maximin_scores(profile)
    if isinstance(rule, Scoring):
        return scoring_scores(profile, rule.vector, rule.rounding)
    raise RuleError(f"{type(rule).__name__} does not assign scores")


def winner(profile: Profile, rule: Rule, tb: TieBreakOrder) -> CandidateId:
    """Resolute winner of a profile under a rule."""
    if tb.m != profile.m:
        raise RuleError(f"Tie-break order covers {tb.m} candidates, profile has {profile.m}")
    check_rule(rule, profile.mode, profile.m)
    if isinstance(rule, Stv):
        return stv_winner(profile, tb)[0]
    return best_by_score(rule_scores(profile, rule), tb)
