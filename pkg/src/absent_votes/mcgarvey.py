"""Profiles with a prescribed weighted majority graph.

A block holding every ordered l-tuple of distinct candidates once is perfectly
symmetric, so its WMG is zero. Rewriting one of its votes ``[b, a, ...]`` into
``[a, b, ...]`` flips only the comparison between a and b and adds 2 to the margin
``a -> b``. Different rewrites never touch the same vote, so many unit edges can
share one block.
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .ballots import BallotMode, CandidateId, Profile, Ranking

logger = logging.getLogger("absent_votes.mcgarvey")


class McGarveyError(Exception):
    """Target graph or gadget parameters cannot be realized."""


@dataclass(frozen=True, eq=False)
class WmgTarget:
    """An antisymmetric margin matrix with even entries and a zero diagonal."""

    m: int
    w: np.ndarray

    def __post_init__(self) -> None:
        matrix = np.array(self.w, dtype=np.int64)
        if matrix.shape != (self.m, self.m):
            raise McGarveyError(f"Target must be {self.m}x{self.m}, got {matrix.shape}")
        if not np.array_equal(matrix, -matrix.T):
            raise McGarveyError("Target margins are not antisymmetric")
        odd = np.argwhere(matrix % 2 != 0)
        if len(odd):
            a, b = odd[0]
            raise McGarveyError(f"Target margin {a}->{b} is odd ({matrix[a, b]})")
        matrix.setflags(write=False)
        object.__setattr__(self, "w", matrix)

    @classmethod
    def from_edges(
        cls, m: int, edges: dict[tuple[CandidateId, CandidateId], int]
    ) -> "WmgTarget":
        """Build from directed edge weights; each edge also sets its reverse."""
        matrix = np.zeros((m, m), dtype=np.int64)
        for (a, b), weight in edges.items():
            matrix[a, b] += weight
            matrix[b, a] -= weight
        return cls(m, matrix)


def _check_gadget(m: int, length: int) -> None:
    if length < 2:
        raise McGarveyError(f"Gadget needs ballots of length at least 2, got {length}")
    if length > m:
        raise McGarveyError(f"Ballot length {length} exceeds m={m}")


def unit_edge_profile(
    m: int, length: int, a: CandidateId, b: CandidateId, mode: BallotMode | None = None
) -> Profile:
    """Every ordered ``length``-tuple once, one ``[b, a, ...]`` vote flipped to ``[a, b, ...]``.

    The result has ``m!/(m-length)!`` votes and a single non-zero margin ``a -> b = 2``.
    """
    _check_gadget(m, length)
    if a == b:
        raise McGarveyError(f"Unit edge needs two distinct candidates, got {a} twice")
    counts = Counter(permutations(range(m), length))
    swapped = next(r for r in permutations(range(m), length) if r[0] == b and r[1] == a)
    counts[swapped] -= 1
    counts[(a, b, *swapped[2:])] += 1
    mode = mode or BallotMode.top(length)
    return Profile(mode, m, tuple((r, c) for r, c in counts.items() if c))


def realize_wmg(target: WmgTarget, length: int, mode: BallotMode | None = None) -> Profile:
    """A profile whose WMG equals ``target`` exactly.

    Each unit (half the weight of an edge ``a -> b``) rewrites one ``[b, a, tail]`` vote.
    A block offers ``(m-2)!/(m-length)!`` distinct tails per ordered pair, so the number of
    blocks is set by the heaviest edge rather than by the total weight.
    """
    m = target.m
    mode = mode or BallotMode.top(length)
    units = {
        (a, b): int(target.w[a, b]) // 2
        for a in range(m)
        for b in range(m)
        if target.w[a, b] > 0
    }
    if not units:
        return Profile(mode, m)
    _check_gadget(m, length)

    tails_per_pair = math.perm(m - 2, length - 2)
    blocks = max(math.ceil(u / tails_per_pair) for u in units.values())
    counts: Counter[Ranking] = Counter(
        {r: blocks for r in permutations(range(m), length)}
    )
    for (a, b), u in sorted(units.items()):
        others = [x for x in range(m) if x not in (a, b)]
        full, extra = divmod(u, tails_per_pair)
        for k, tail in enumerate(permutations(others, length - 2)):
            uses = full + (1 if k < extra else 0)
            if not uses:
                break
            counts[(b, a, *tail)] -= uses
            counts[(a, b, *tail)] += uses

    profile = Profile(mode, m, tuple((r, c) for r, c in counts.items() if c))
    logger.debug(
        "Realized %d edge units with %d blocks (%d votes)",
        sum(units.values()),
        blocks,
        profile.total,
    )
    return profile
