"""Restricted exact cover by 3-sets.

``q`` elements ``1..q`` and ``q`` sets of size 3, each element in exactly three sets.
The question is whether ``q/3`` of the sets partition the elements. Sets and elements
are 1-indexed throughout, matching the way instances are written down.
"""

import logging
import math
from dataclasses import dataclass
from itertools import combinations

from .wav import BudgetExceededError

logger = logging.getLogger("absent_votes.rxc3")

DEFAULT_COVER_BUDGET = 1_000_000


class Rxc3Error(Exception):
    """Malformed RXC3 instance or solution."""


@dataclass(frozen=True)
class Rxc3Instance:
    q: int
    sets: tuple[tuple[int, int, int], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "sets", tuple(tuple(sorted(s)) for s in self.sets))

    def members(self, index: int) -> tuple[int, ...]:
        """Elements of the 1-indexed set ``index``."""
        return self.sets[index - 1]

    def containing(self, element: int) -> list[int]:
        """1-indexed sets that contain ``element``."""
        return [j for j, s in enumerate(self.sets, start=1) if element in s]


@dataclass(frozen=True)
class Rxc3Solution:
    """Indices (1-based, ascending) of the sets forming an exact cover."""

    indices: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "indices", tuple(sorted(self.indices)))


def validate_rxc3(inst: Rxc3Instance) -> str | None:
    """Structural check; returns None when valid, else the violation."""
    q = inst.q
    if q < 1 or q % 3:
        return f"q must be a positive multiple of 3, got {q}"
    if len(inst.sets) != q:
        return f"expected {q} sets, got {len(inst.sets)}"
    occurrences = [0] * (q + 1)
    for j, s in enumerate(inst.sets, start=1):
        if len(s) != 3 or len(set(s)) != 3:
            return f"set {j} must hold 3 distinct elements, got {list(s)}"
        for x in s:
            if not 1 <= x <= q:
                return f"set {j} has element {x} outside 1..{q}"
            occurrences[x] += 1
    for x in range(1, q + 1):
        if occurrences[x] != 3:
            return f"element {x} appears in {occurrences[x]} sets, expected 3"
    return None


def validate_solution(inst: Rxc3Instance, sol: Rxc3Solution) -> str | None:
    if len(sol.indices) != inst.q // 3:
        return f"cover must use {inst.q // 3} sets, got {len(sol.indices)}"
    if any(not 1 <= j <= inst.q for j in sol.indices):
        return f"set indices must lie in 1..{inst.q}, got {list(sol.indices)}"
    covered = [x for j in sol.indices for x in inst.members(j)]
    if sorted(covered) != list(range(1, inst.q + 1)):
        return f"sets {list(sol.indices)} do not partition 1..{inst.q}"
    return None


def solve_rxc3_bruteforce(
    inst: Rxc3Instance, budget: int = DEFAULT_COVER_BUDGET
) -> Rxc3Solution | None:
    """Lexicographically first exact cover, or None.

    Raises:
        Rxc3Error: The instance is malformed.
        BudgetExceededError: More than ``budget`` index sets would have to be tried.
    """
    problem = validate_rxc3(inst)
    if problem:
        raise Rxc3Error(problem)
    size = inst.q // 3
    needed = math.comb(inst.q, size)
    if needed > budget:
        raise BudgetExceededError(needed, budget, what="index sets")
    for indices in combinations(range(1, inst.q + 1), size):
        sol = Rxc3Solution(indices)
        if validate_solution(inst, sol) is None:
            logger.info("Exact cover found: %s", list(indices))
            return sol
    logger.info("No exact cover among %d index sets", needed)
    return None


def duplicate(inst: Rxc3Instance, copies: int) -> Rxc3Instance:
    """``copies`` disjoint copies; copy ``k`` shifts elements and set indices by ``k*q``."""
    sets = [
        tuple(x + k * inst.q for x in s) for k in range(copies) for s in inst.sets
    ]
    return Rxc3Instance(inst.q * copies, tuple(sets))


def copies_for(q: int, divisor: int) -> int:
    """Smallest number of copies making ``q * copies`` divisible by ``divisor``."""
    return divisor // math.gcd(q, divisor)


def preprocess_rxc3(inst: Rxc3Instance, divisor: int) -> Rxc3Instance:
    """Disjointly duplicate until ``q`` is divisible by ``divisor``.

    A union of disjoint copies has an exact cover iff each copy does, so YES/NO is kept.
    """
    if divisor < 1:
        raise Rxc3Error(f"Divisor must be positive, got {divisor}")
    copies = copies_for(inst.q, divisor)
    if copies == 1:
        return inst
    logger.info("Duplicating RXC3 instance %d times (q=%d -> %d)", copies, inst.q, inst.q * copies)
    return duplicate(inst, copies)


def lift_solution(sol: Rxc3Solution, q: int, copies: int) -> Rxc3Solution:
    """Repeat a cover of the base instance in every copy."""
    return Rxc3Solution(tuple(j + k * q for k in range(copies) for j in sol.indices))
