"""Winner with absent votes: instance types and the exhaustive solver.

The solver walks every anonymous completion (multiset of ``t`` admissible rankings)
in a fixed lexicographic order and returns the first one that makes the target win.
Known-profile work is done once: WMG and score contributions of individual rankings
are precomputed and each trial only adds the deltas of its ``t`` rankings.
"""

import logging
import math
from collections.abc import Iterator
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations_with_replacement, permutations

import numpy as np
import psutil

from .ballots import (
    BallotMode,
    CandidateId,
    Profile,
    Ranking,
    TieBreakOrder,
    ranking_gains,
    wmg,
)
from .rules import (
    Copeland,
    Maximin,
    Rule,
    RuleError,
    Scoring,
    Stv,
    best_by_score,
    check_rule,
    run_stv,
    scoring_row,
    winner,
)

logger = logging.getLogger("absent_votes.wav")

DEFAULT_BUDGET = 10_000_000


class WavError(Exception):
    """Malformed WAV instance or solver failure."""


class BudgetExceededError(WavError):
    """The search space is larger than the configured budget."""

    def __init__(self, needed: int, budget: int, what: str = "anonymous profiles"):
        self.needed = needed
        self.budget = budget
        super().__init__(f"Search needs {needed} {what}, budget is {budget}")


@dataclass(frozen=True)
class WavInstance:
    """Known votes, number of absent votes, target candidate, rule and tie-break."""

    mode: BallotMode
    m: int
    known: Profile
    t: int
    target: CandidateId
    rule: Rule
    tb: TieBreakOrder

    def __post_init__(self) -> None:
        if self.known.m != self.m:
            raise WavError(f"Known profile has {self.known.m} candidates, instance has {self.m}")
        if self.known.mode != self.mode:
            raise WavError(f"Known profile mode {self.known.mode} differs from {self.mode}")
        if self.t < 0:
            raise WavError(f"Absent vote count must be non-negative, got {self.t}")
        if not 0 <= self.target < self.m:
            raise WavError(f"Target {self.target} out of range for m={self.m}")
        if self.tb.m != self.m:
            raise WavError(f"Tie-break order covers {self.tb.m} candidates, expected {self.m}")
        try:
            check_rule(self.rule, self.mode, self.m)
        except RuleError as e:
            raise WavError(str(e)) from e

    def completed(self, witness: Profile) -> Profile:
        """Known votes plus the absent ones."""
        return Profile(self.mode, self.m, self.known.entries + witness.entries)

    def is_witness(self, witness: Profile) -> bool:
        return witness.total == self.t and (
            winner(self.completed(witness), self.rule, self.tb) == self.target
        )


@dataclass(frozen=True)
class WavAnswer:
    yes: bool
    witness: Profile | None = None

    def __bool__(self) -> bool:
        return self.yes


def enumerate_rankings(mode: BallotMode, m: int) -> list[Ranking]:
    """All admissible rankings in lexicographic order (shorter ballots first)."""
    if mode.length > m:
        raise WavError(f"Ballot length {mode.length} exceeds m={m}")
    lengths = range(1, mode.length + 1) if mode.is_up_to else [mode.length]
    return [r for length in lengths for r in permutations(range(m), length)]


def count_anonymous_profiles(num_rankings: int, t: int) -> int:
    """Number of multisets of size ``t`` over ``num_rankings`` rankings."""
    if t == 0:
        return 1
    return math.comb(t + num_rankings - 1, t)


def enumerate_anonymous_profiles(
    rankings: list[Ranking], t: int, mode: BallotMode, m: int
) -> Iterator[Profile]:
    """Every multiset of ``t`` rankings exactly once, in stars-and-bars order."""
    if t < 0:
        raise WavError(f"Absent vote count must be non-negative, got {t}")
    for picks in combinations_with_replacement(range(len(rankings)), t):
        yield Profile.from_rankings(mode, m, (rankings[i] for i in picks))


class _Evaluator:
    """Decides whether a completion, given as ranking indices, elects the target."""

    def __init__(self, inst: WavInstance, rankings: list[Ranking]):
        self.inst = inst
        self.rankings = rankings
        rule = inst.rule
        m = inst.m
        if isinstance(rule, Stv):
            self.known = list(inst.known.entries)
        elif isinstance(rule, (Copeland, Maximin)):
            self.base = wmg(inst.known).w.astype(np.int64)
            self.deltas = np.stack([_vote_margins(r, m) for r in rankings])
            if isinstance(rule, Copeland):
                # Scores compared on the integer scale wins*den + num*ties.
                self.alpha_num = rule.alpha.numerator
                self.alpha_den = rule.alpha.denominator
        elif isinstance(rule, Scoring):
            base = [0] * m
            for ranking, count in inst.known.entries:
                row = scoring_row(ranking, m, rule.vector, rule.rounding)
                base = [x + count * y for x, y in zip(base, row)]
            self.base = np.array(base, dtype=np.int64)
            self.deltas = np.array(
                [scoring_row(r, m, rule.vector, rule.rounding) for r in rankings],
                dtype=np.int64,
            )
        else:
            raise WavError(f"Unsupported rule: {rule!r}")

    def elects_target(self, picks: tuple[int, ...]) -> bool:
        inst = self.inst
        rule = inst.rule
        if isinstance(rule, Stv):
            extra = [(self.rankings[i], 1) for i in picks]
            return run_stv(self.known + extra, inst.m, inst.tb, record=False)[0] == inst.target
        total = self.base + self.deltas[list(picks)].sum(axis=0) if picks else self.base
        if isinstance(rule, Copeland):
            wins = (total > 0).sum(axis=1)
            ties = (total == 0).sum(axis=1) - 1
            scores = (wins * self.alpha_den + ties * self.alpha_num).tolist()
        elif isinstance(rule, Maximin):
            margins = total.copy()
            np.fill_diagonal(margins, np.iinfo(np.int64).max)
            scores = margins.min(axis=1).tolist()
        else:
            scores = total.tolist()
        return best_by_score(scores, inst.tb) == inst.target


def _vote_margins(ranking: Ranking, m: int) -> np.ndarray:
    gains = ranking_gains(ranking, m)
    return gains - gains.T


def _group(first: int, num_rankings: int, t: int) -> Iterator[tuple[int, ...]]:
    """Multisets whose smallest ranking index is ``first``, in enumeration order."""
    for rest in combinations_with_replacement(range(first, num_rankings), t - 1):
        yield (first, *rest)


def _scan_groups(
    inst: WavInstance, rankings: list[Ranking], firsts: range
) -> tuple[int, ...] | None:
    evaluator = _Evaluator(inst, rankings)
    for first in firsts:
        for picks in _group(first, len(rankings), inst.t):
            if evaluator.elects_target(picks):
                return picks
    return None


def worker_count(requested: int) -> int:
    """Resolve a configured worker count; 0 means one per physical core."""
    if requested > 0:
        return requested
    return psutil.cpu_count(logical=False) or psutil.cpu_count() or 1


def _batches(num_rankings: int, batch_count: int) -> list[range]:
    size = max(1, math.ceil(num_rankings / batch_count))
    return [range(i, min(i + size, num_rankings)) for i in range(0, num_rankings, size)]


def wav_bruteforce(
    inst: WavInstance,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
) -> WavAnswer:
    """Decide a WAV instance by exhausting anonymous completions.

    Args:
        inst: The instance.
        budget: Maximum number of completions to enumerate.
        workers: Worker processes; 1 runs in-process, 0 uses every physical core.

    Returns:
        Yes with the enumeration-first witness, or No.

    Raises:
        BudgetExceededError: The enumeration is larger than ``budget``.
    """
    rankings = enumerate_rankings(inst.mode, inst.m)
    needed = count_anonymous_profiles(len(rankings), inst.t)
    if needed > budget:
        raise BudgetExceededError(needed, budget)
    logger.info(
        "Brute force: %d rankings, t=%d, %d completions to check", len(rankings), inst.t, needed
    )

    picks: tuple[int, ...] | None
    if inst.t == 0:
        picks = () if _Evaluator(inst, rankings).elects_target(()) else None
    else:
        picks = _search(inst, rankings, worker_count(workers))

    if picks is None:
        logger.info("Brute force: no completion elects candidate %d", inst.target)
        return WavAnswer(False)
    witness = Profile.from_rankings(inst.mode, inst.m, (rankings[i] for i in picks))
    if not inst.is_witness(witness):
        raise WavError(f"Witness {witness.entries} failed re-verification")
    return WavAnswer(True, witness)


def _search(inst: WavInstance, rankings: list[Ranking], workers: int) -> tuple[int, ...] | None:
    if workers <= 1:
        return _scan_groups(inst, rankings, range(len(rankings)))
    batches = _batches(len(rankings), workers * 4)
    logger.debug("Brute force: %d batches over %d workers", len(batches), workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_scan_groups, inst, rankings, batch) for batch in batches]
        # Batches are contiguous in enumeration order; the first hit in submission order
        # is the globally first witness.
        for future in futures:
            found = future.result()
            if found is not None:
                pool.shutdown(wait=False, cancel_futures=True)
                return found
    return None

