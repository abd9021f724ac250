"""Top-truncated ballots, profiles and weighted majority graphs.

Candidates are dense integer indices ``0..m-1``. A ranking lists distinct candidates
from most to least preferred; every unlisted candidate is tied below all listed ones.
Profiles are anonymous: they store each distinct ranking once with a multiplicity.
"""

from collections import Counter
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

CandidateId = int
Ranking = tuple[int, ...]

TOP = "top"
UP_TO = "up-to"


class BallotError(Exception):
    """Invalid ballot, profile or tie-break order."""


@dataclass(frozen=True)
class BallotMode:
    """Ballot shape: exactly ``length`` candidates, or between 1 and ``length``."""

    kind: str
    length: int

    def __post_init__(self) -> None:
        if self.kind not in (TOP, UP_TO):
            raise BallotError(f"Unknown ballot mode: {self.kind!r}")
        if self.length < 1:
            raise BallotError(f"Ballot length must be at least 1, got {self.length}")

    @classmethod
    def top(cls, length: int) -> "BallotMode":
        return cls(TOP, length)

    @classmethod
    def up_to(cls, length: int) -> "BallotMode":
        return cls(UP_TO, length)

    @property
    def is_up_to(self) -> bool:
        return self.kind == UP_TO

    def absorbs(self, other: "BallotMode") -> bool:
        """Whether every ranking valid under ``other`` is also valid under this mode."""
        if self == other:
            return True
        return self.is_up_to and other.length <= self.length

    def __str__(self) -> str:
        return f"{self.kind}-{self.length}"


class Preference(Enum):
    PREFERS_A = "a"
    PREFERS_B = "b"
    TIE = "tie"


def validate_ranking(ranking: Ranking, mode: BallotMode, m: int) -> str | None:
    """Check a ranking against a ballot mode.

    Returns:
        None when the ranking is valid, otherwise a description of the violation.
    """
    if len(set(ranking)) != len(ranking):
        return f"duplicate candidate in ranking {list(ranking)}"
    if mode.is_up_to:
        if not 1 <= len(ranking) <= mode.length:
            return f"ranking {list(ranking)} has length {len(ranking)}, expected 1..{mode.length}"
    elif len(ranking) != mode.length:
        return f"ranking {list(ranking)} has length {len(ranking)}, expected {mode.length}"
    for candidate in ranking:
        if not 0 <= candidate < m:
            return f"candidate {candidate} out of range for m={m}"
    return None


def prefers(ranking: Ranking, a: CandidateId, b: CandidateId) -> Preference:
    """Compare two candidates within a single ranking."""
    if a == b:
        raise BallotError(f"Cannot compare candidate {a} with itself")
    pos_a = ranking.index(a) if a in ranking else None
    pos_b = ranking.index(b) if b in ranking else None
    if pos_a is None and pos_b is None:
        return Preference.TIE
    if pos_b is None or (pos_a is not None and pos_a < pos_b):
        return Preference.PREFERS_A
    return Preference.PREFERS_B


@dataclass(frozen=True)
class Profile:
    """A multiset of rankings under one ballot mode.

    Entries are canonicalized on construction (sorted by ranking, repeated rankings
    merged), so two profiles compare equal exactly when their multisets are equal.
    """

    mode: BallotMode
    m: int
    entries: tuple[tuple[Ranking, int], ...] = ()

    def __post_init__(self) -> None:
        if self.m < 1:
            raise BallotError(f"Profile needs at least one candidate, got m={self.m}")
        if self.mode.length > self.m:
            raise BallotError(f"Ballot length {self.mode.length} exceeds m={self.m}")
        merged: dict[Ranking, int] = {}
        for ranking, count in self.entries:
            ranking = tuple(ranking)
            if count <= 0:
                raise BallotError(f"Count for {list(ranking)} must be positive, got {count}")
            problem = validate_ranking(ranking, self.mode, self.m)
            if problem:
                raise BallotError(problem)
            merged[ranking] = merged.get(ranking, 0) + count
        object.__setattr__(self, "entries", tuple(sorted(merged.items())))

    @classmethod
    def from_rankings(
        cls, mode: BallotMode, m: int, rankings: Iterable[Ranking]
    ) -> "Profile":
        """Build a profile from individual votes, one entry per vote."""
        counts = Counter(tuple(r) for r in rankings)
        return cls(mode, m, tuple(counts.items()))

    @property
    def total(self) -> int:
        """Number of votes, counting multiplicities."""
        return sum(count for _, count in self.entries)

    def count(self, ranking: Ranking) -> int:
        return dict(self.entries).get(tuple(ranking), 0)

    def __iter__(self) -> Iterator[tuple[Ranking, int]]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True, eq=False)
class WeightedMajorityGraph:
    """Pairwise net margins: ``w[a, b]`` votes prefer a over b, minus the reverse."""

    m: int
    w: np.ndarray

    def __post_init__(self) -> None:
        matrix = np.array(self.w, dtype=np.int64)
        if matrix.shape != (self.m, self.m):
            raise BallotError(f"WMG matrix must be {self.m}x{self.m}, got {matrix.shape}")
        matrix.setflags(write=False)
        object.__setattr__(self, "w", matrix)

    @classmethod
    def zeros(cls, m: int) -> "WeightedMajorityGraph":
        return cls(m, np.zeros((m, m), dtype=np.int64))

    def __getitem__(self, pair: tuple[CandidateId, CandidateId]) -> int:
        a, b = pair
        return int(self.w[a, b])

    def __add__(self, other: "WeightedMajorityGraph") -> "WeightedMajorityGraph":
        if self.m != other.m:
            raise BallotError(f"Cannot add WMGs over {self.m} and {other.m} candidates")
        return WeightedMajorityGraph(self.m, self.w + other.w)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedMajorityGraph):
            return NotImplemented
        return self.m == other.m and np.array_equal(self.w, other.w)

    __hash__ = None  # type: ignore[assignment]

    def is_antisymmetric(self) -> bool:
        return bool(np.array_equal(self.w, -self.w.T))


@dataclass(frozen=True)
class TieBreakOrder:
    """Total priority over candidates; earlier entries are favored."""

    priority: tuple[CandidateId, ...]
    _ranks: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        priority = tuple(self.priority)
        if sorted(priority) != list(range(len(priority))):
            raise BallotError(f"Tie-break order is not a permutation: {list(priority)}")
        object.__setattr__(self, "priority", priority)
        ranks = [0] * len(priority)
        for position, candidate in enumerate(priority):
            ranks[candidate] = position
        object.__setattr__(self, "_ranks", tuple(ranks))

    @classmethod
    def lexicographic(cls, m: int) -> "TieBreakOrder":
        return cls(tuple(range(m)))

    @property
    def m(self) -> int:
        return len(self.priority)

    def rank(self, candidate: CandidateId) -> int:
        """Position of a candidate; 0 is the most favored."""
        return self._ranks[candidate]

    def favored(self, a: CandidateId, b: CandidateId) -> bool:
        """True when ``a`` wins a tie against ``b``."""
        return self.rank(a) < self.rank(b)

    def best(self, candidates: Iterable[CandidateId]) -> CandidateId:
        return min(candidates, key=self.rank)

    def worst(self, candidates: Iterable[CandidateId]) -> CandidateId:
        return max(candidates, key=self.rank)


def ranking_gains(ranking: Ranking, m: int) -> np.ndarray:
    """Row ``a`` column ``b`` is 1 when the ranking puts a strictly above b."""
    gains = np.zeros((m, m), dtype=np.int64)
    below = np.ones(m, dtype=bool)
    for candidate in ranking:
        below[candidate] = False
        gains[candidate, below] = 1
    return gains


def wmg(profile: Profile) -> WeightedMajorityGraph:
    """Weighted majority graph of a profile."""
    m = profile.m
    gains = np.zeros((m, m), dtype=np.int64)
    for ranking, count in profile.entries:
        below = np.ones(m, dtype=bool)
        for candidate in ranking:
            below[candidate] = False
            gains[candidate, below] += count
    return WeightedMajorityGraph(m, gains - gains.T)


def merge(p: Profile, q: Profile) -> Profile:
    """Multiset union of two profiles; the result keeps ``p``'s mode."""
    if p.m != q.m:
        raise BallotError(f"Cannot merge profiles over {p.m} and {q.m} candidates")
    if not p.mode.absorbs(q.mode):
        raise BallotError(f"Ballot mode {q.mode} is not admissible under {p.mode}")
    return Profile(p.mode, p.m, p.entries + q.entries)
