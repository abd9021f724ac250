"""WAV instances built from RXC3 instances, their witnesses, and claim verification.

Three generators turn an RXC3 instance into a WAV instance whose answer is YES exactly
when the RXC3 instance has an exact cover:

- ``reduce_stv``: 3q+3 candidates (c, w, d_0..d_q, b_i and b_i_bar), t = q/3.
- ``reduce_maximin``: 2q+l candidates (x_i, S_j, c, w_1..w_{l-1}), t = q/(3(l-1)).
- ``reduce_copeland``: 2q+q/2+3 candidates (x_i, S_j, c, b, w_1..w_{q/2+1}),
  t = q/(3(l-1)).

Each generator records the quantities its construction promises (block sizes, margins,
score tables) in ``ReductionOutput.bookkeeping`` so ``verify_reduction`` can check the
generated profile against them without re-deriving anything.
"""

import logging
from collections import Counter
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .ballots import (
    BallotMode,
    CandidateId,
    Profile,
    Ranking,
    TieBreakOrder,
    merge,
    wmg,
)
from .mcgarvey import WmgTarget, realize_wmg
from .rules import (
    Copeland,
    Maximin,
    Stv,
    copeland_from_wmg,
    maximin_from_wmg,
    stv_winner,
    winner,
)
from .rxc3 import (
    DEFAULT_COVER_BUDGET,
    Rxc3Instance,
    Rxc3Solution,
    duplicate,
    lift_solution,
    solve_rxc3_bruteforce,
    validate_rxc3,
    validate_solution,
)
from .wav import DEFAULT_BUDGET, BudgetExceededError, WavInstance, wav_bruteforce

logger = logging.getLogger("absent_votes.reductions")

STV = "stv"
MAXIMIN = "maximin"
COPELAND = "copeland"

MAX_DOUBLINGS = 4

PASS = "pass"
FAIL = "fail"
SKIP = "skip"


class ReductionError(Exception):
    """RXC3 instance or parameters unsuitable for a construction."""


class _NeedsLargerInstance(Exception):
    """The construction cannot be realized at this q; doubling the instance fixes it."""


# Role groups and bookkeeping tables each construction records, with the keys every
# table must carry.
_LAYOUTS: dict[str, tuple[tuple[str, ...], dict[str, tuple[str, ...]]]] = {
    STV: (
        ("c", "w", "d0", "d", "b", "b_bar"),
        {
            "blocks": (),
            "round_table": ("w", "c", "d0", "d"),
            "survivor_offsets": ("b", "b_bar"),
        },
    ),
    MAXIMIN: (
        ("x", "S", "c", "w"),
        {
            "min_scores": ("c", "w", "x", "S"),
            "post_min_scores": ("c", "x"),
            "margins": ("S->x member", "x->S other", "x->c", "S->c"),
        },
    ),
    COPELAND: (
        ("x", "S", "c", "b", "w"),
        {
            "scores": ("c", "x", "b", "S_max", "w_max"),
            "post_scores": ("c", "x", "b", "S_max", "w_max"),
            "margins": ("x->S member", "S->c"),
            "post_margins": ("x->S covering",),
        },
    ),
}


def bookkeeping_problem(kind: str, groups: dict, bookkeeping: dict) -> str | None:
    """Check that a stored reduction carries what ``verify_reduction`` reads.

    Returns None when complete, else the first missing or malformed entry.
    """
    if kind not in _LAYOUTS:
        return f"unknown reduction kind '{kind}', expected one of {sorted(_LAYOUTS)}"
    roles, tables = _LAYOUTS[kind]
    missing = [role for role in roles if role not in groups]
    if missing:
        return f"role group '{missing[0]}' is missing"
    for key in ("candidates", "absent", *tables):
        if key not in bookkeeping:
            return f"bookkeeping entry '{key}' is missing"
    for key in ("candidates", "absent"):
        if not isinstance(bookkeeping[key], int) or isinstance(bookkeeping[key], bool):
            return f"bookkeeping entry '{key}' must be an integer"
    for table, keys in tables.items():
        if not isinstance(bookkeeping[table], dict):
            return f"bookkeeping entry '{table}' must be an object"
        absent = [k for k in keys if k not in bookkeeping[table]]
        if absent:
            return f"bookkeeping entry '{table}' lacks '{absent[0]}'"
    if kind == COPELAND:
        try:
            Fraction(bookkeeping.get("alpha", ""))
        except (TypeError, ValueError, ZeroDivisionError):
            return f"bookkeeping alpha {bookkeeping.get('alpha')!r} is not a fraction"
    return None


@dataclass(frozen=True)
class ReductionOutput:
    """A generated WAV instance with its role map and expected quantities.

    Attributes:
        kind: Which construction produced it ("stv", "maximin" or "copeland").
        instance: The WAV instance; its target is candidate ``c``.
        names: Role tag of every candidate, indexed by candidate id.
        groups: Candidate ids per role family ("x", "S", "w", "d", "b_bar", ...).
        bookkeeping: Quantities the construction promises, JSON-compatible.
        source: RXC3 instance the construction was built from (after duplication).
        base: RXC3 instance as given by the caller.
        copies: How many disjoint copies of ``base`` make up ``source``.
    """

    kind: str
    instance: WavInstance
    names: tuple[str, ...]
    groups: dict[str, tuple[int, ...]] = field(hash=False)
    bookkeeping: dict[str, Any] = field(hash=False)
    source: Rxc3Instance
    base: Rxc3Instance
    copies: int = 1

    @property
    def tb(self) -> TieBreakOrder:
        return self.instance.tb

    def index(self, name: str) -> CandidateId:
        try:
            return self.names.index(name)
        except ValueError:
            raise ReductionError(f"No candidate named '{name}' in the reduction") from None

    def group(self, name: str) -> tuple[int, ...]:
        return self.groups[name]

    def lift(self, sol: Rxc3Solution) -> Rxc3Solution:
        """Accept a cover of either the source or the base instance."""
        if validate_solution(self.source, sol) is None:
            return sol
        if self.copies > 1 and validate_solution(self.base, sol) is None:
            return lift_solution(sol, self.base.q, self.copies)
        problem = validate_solution(self.source, sol)
        raise ReductionError(f"Invalid cover: {problem}")


def _require_valid(inst: Rxc3Instance, length: int) -> None:
    problem = validate_rxc3(inst)
    if problem:
        raise ReductionError(f"Invalid RXC3 instance: {problem}")
    if length < 2:
        raise ReductionError(f"Constructions need ballots of length at least 2, got {length}")


def _mode(length: int, up_to: bool) -> BallotMode:
    return BallotMode.up_to(length) if up_to else BallotMode.top(length)


def _with_retries(
    base: Rxc3Instance, build: Callable[[Rxc3Instance, int], ReductionOutput]
) -> ReductionOutput:
    copies = 1
    source = base
    for _ in range(MAX_DOUBLINGS + 1):
        try:
            return build(source, copies)
        except _NeedsLargerInstance as e:
            copies *= 2
            logger.info("%s; doubling the RXC3 instance (q=%d)", e, base.q * copies)
            source = duplicate(base, copies)
    raise ReductionError(f"Construction still unrealizable after {MAX_DOUBLINGS} doublings")


def _assemble(
    m: int,
    length: int,
    mode: BallotMode,
    gadget: dict[tuple[CandidateId, CandidateId], int],
    explicit: Profile,
    final: dict[tuple[CandidateId, CandidateId], int] | None = None,
) -> Profile:
    """Known profile: a McGarvey part plus explicit votes.

    ``gadget`` edges are realized as given. For pairs in ``final`` the realized margin is
    chosen so that, together with the explicit votes, the pair ends at the given value.
    """
    residual = np.zeros((m, m), dtype=np.int64)
    for (a, b), weight in gadget.items():
        residual[a, b] += weight
        residual[b, a] -= weight
    if final:
        explicit_margins = wmg(explicit).w
        for (a, b), margin in final.items():
            residual[a, b] = margin - explicit_margins[a, b]
            residual[b, a] = -residual[a, b]
    odd = np.argwhere(residual % 2 != 0)
    if len(odd):
        a, b = odd[0]
        raise _NeedsLargerInstance(f"margin {a}->{b} needs odd weight {residual[a, b]}")
    gadget_votes = realize_wmg(WmgTarget(m, residual), length, mode)
    return merge(gadget_votes, explicit)


def _fit(prefix: Iterable[CandidateId], length: int, tb: TieBreakOrder) -> Ranking:
    """Truncate to ``length``, or pad with the lowest-priority unused candidates."""
    ranking = list(prefix)[:length]
    for candidate in reversed(tb.priority):
        if len(ranking) >= length:
            break
        if candidate not in ranking:
            ranking.append(candidate)
    return tuple(ranking)


def _chunks(items: list[int], size: int) -> list[list[int]]:
    return [items[k : k + size] for k in range(0, len(items), size)]


# ---------------------------------------------------------------------------
# STV


def _stv_layout(q: int) -> tuple[list[str], dict[str, tuple[int, ...]]]:
    names = ["c", "w"] + [f"d{j}" for j in range(q + 1)]
    for i in range(1, q + 1):
        names += [f"b{i}", f"b{i}_bar"]
    groups = {
        "c": (0,),
        "w": (1,),
        "d0": (2,),
        "d": tuple(2 + j for j in range(1, q + 1)),
        "b": tuple(q + 3 + 2 * (i - 1) for i in range(1, q + 1)),
        "b_bar": tuple(q + 4 + 2 * (i - 1) for i in range(1, q + 1)),
    }
    return names, groups


def stv_blocks(q: int) -> dict[str, int]:
    """Vote count of each STV block, summed over its indices."""
    return {
        "P1": 12 * q,
        "P2": 12 * q - 1,
        "P3": 10 * q + 2 * q // 3,
        "P4": q * (12 * q - 2),
        "P5_1": 8 * q * q - 4 * q,
        "P5_2": 6 * q,
        "P6_1": 8 * q * q,
        "P6_2": 2 * q,
    }


def reduce_stv(inst: Rxc3Instance, length: int, up_to: bool = False) -> ReductionOutput:
    """STV instance: c wins after q/3 absent votes iff the RXC3 instance has a cover.

    Raises:
        ReductionError: The instance is malformed or q is not divisible by 6.
    """
    _require_valid(inst, length)
    q = inst.q
    if q % 6:
        raise ReductionError(
            f"STV construction needs q divisible by 6, got q={q}; duplicate the instance"
        )
    names, groups = _stv_layout(q)
    idx = {name: k for k, name in enumerate(names)}
    c, w, d0 = idx["c"], idx["w"], idx["d0"]

    def d(j: int) -> int:
        return idx[f"d{j}"]

    def b(i: int) -> int:
        return idx[f"b{i}"]

    def b_bar(i: int) -> int:
        return idx[f"b{i}_bar"]

    priority = [d(j) for j in range(q + 1)]
    for i in range(1, q + 1):
        priority += [b(i), b_bar(i)]
    tb = TieBreakOrder(tuple(priority + [c, w]))
    mode = _mode(length, up_to)

    blocks: list[tuple[Ranking, int]] = [
        ((c, w), 12 * q),
        ((w, c), 12 * q - 1),
        ((d0, w, c), 10 * q + 2 * q // 3),
    ]
    for i in range(1, q + 1):
        blocks.append(((d(i), w, c), 12 * q - 2))
        blocks.append(((b(i), b_bar(i), w, c), 6 * q + 4 * i - 6))
        blocks += [((b(i), d(j), w, c), 2) for j in inst.members(i)]
        blocks.append(((b_bar(i), b(i), w, c), 6 * q + 4 * i - 2))
        blocks.append(((b_bar(i), d0, w, c), 2))
    counts: Counter[Ranking] = Counter()
    for prefix, count in blocks:
        counts[_fit(prefix, length, tb)] += count
    known = Profile(mode, len(names), tuple(counts.items()))

    t = q // 3
    block_sizes = stv_blocks(q)
    bookkeeping = {
        "candidates": 3 * q + 3,
        "absent": t,
        "total_votes": sum(block_sizes.values()),
        "blocks": block_sizes,
        "round_table": {"w": 12 * q - 1, "c": 12 * q, "d0": 12 * q, "d": 12 * q},
        "survivor_offsets": {"b": -2, "b_bar": -5},
    }
    instance = WavInstance(mode, len(names), known, t, c, Stv(), tb)
    logger.info("STV construction: %d candidates, %d known votes, t=%d", len(names), known.total, t)
    return ReductionOutput(STV, instance, tuple(names), groups, bookkeeping, inst, inst, 1)


def stv_witness_from_cover(red: ReductionOutput, sol: Rxc3Solution) -> Profile:
    """One ``[b_i_bar, b_i, c, w]`` vote per cover set, cut or padded to the ballot length."""
    sol = red.lift(sol)
    inst = red.instance
    c, w = red.index("c"), red.index("w")
    votes = [
        _fit((red.index(f"b{i}_bar"), red.index(f"b{i}"), c, w), inst.mode.length, red.tb)
        for i in sol.indices
    ]
    return Profile.from_rankings(inst.mode, inst.m, votes)


# ---------------------------------------------------------------------------
# Maximin


def reduce_maximin(inst: Rxc3Instance, length: int, up_to: bool = False) -> ReductionOutput:
    """Maximin instance with t = q/(3(l-1)) absent votes.

    Raises:
        ReductionError: The instance is malformed or q is not divisible by 3(l-1).
    """
    _require_valid(inst, length)
    divisor = 3 * (length - 1)
    if inst.q % divisor:
        raise ReductionError(
            f"Maximin construction needs q divisible by {divisor}, got q={inst.q}; "
            "duplicate the instance"
        )
    return _with_retries(
        inst, lambda source, copies: _build_maximin(source, inst, copies, length, up_to)
    )


def _build_maximin(
    source: Rxc3Instance, base: Rxc3Instance, copies: int, length: int, up_to: bool
) -> ReductionOutput:
    q = source.q
    t = q // (3 * (length - 1))
    names = [f"x{i}" for i in range(1, q + 1)] + [f"S{j}" for j in range(1, q + 1)]
    names += ["c"] + [f"w{k}" for k in range(1, length)]
    xs = list(range(q))
    sets = list(range(q, 2 * q))
    c = 2 * q
    ws = list(range(2 * q + 1, 2 * q + length))
    groups = {"x": tuple(xs), "S": tuple(sets), "c": (c,), "w": tuple(ws)}
    tb = TieBreakOrder(tuple([c] + xs + sets + ws))
    m = len(names)
    mode = _mode(length, up_to)

    gadget: dict[tuple[int, int], int] = {}
    for j in range(1, q + 1):
        members = source.members(j)
        for i in range(1, q + 1):
            if i in members:
                gadget[(sets[j - 1], xs[i - 1])] = q
            else:
                gadget[(xs[i - 1], sets[j - 1])] = 2 * q
    for y in xs + sets:
        gadget[(y, c)] = q + t + 2
        for wk in ws:
            gadget[(y, wk)] = 2 * q
    for wk in ws:
        gadget[(c, wk)] = 2 * q
    explicit = Profile.from_rankings(mode, m, [(c, *ws)])
    known = _assemble(m, length, mode, gadget, explicit)

    bookkeeping = {
        "candidates": 2 * q + length,
        "absent": t,
        "min_scores": {"c": -q - t - 1, "w": -2 * q - 1, "x": -q, "S": -2 * q},
        "post_min_scores": {"c": -q - 1, "x": -q - 1},
        "margins": {"S->x member": q, "x->S other": 2 * q, "x->c": q + t + 1, "S->c": q + t + 1},
    }
    instance = WavInstance(mode, m, known, t, c, Maximin(), tb)
    logger.info("Maximin construction: %d candidates, %d known votes, t=%d", m, known.total, t)
    return ReductionOutput(
        MAXIMIN, instance, tuple(names), groups, bookkeeping, source, base, copies
    )


def _cover_votes(red: ReductionOutput, sol: Rxc3Solution) -> Profile:
    """Votes ranking c first, then l-1 cover sets each."""
    sol = red.lift(sol)
    inst = red.instance
    c = red.index("c")
    sets = [red.index(f"S{j}") for j in sol.indices]
    votes = [(c, *chunk) for chunk in _chunks(sets, inst.mode.length - 1)]
    return Profile.from_rankings(inst.mode, inst.m, votes)


def maximin_witness_from_cover(red: ReductionOutput, sol: Rxc3Solution) -> Profile:
    return _cover_votes(red, sol)


# ---------------------------------------------------------------------------
# Copeland


def _cyclic_tournament(
    members: list[int], b: int, weight: int, b_beats_first: bool
) -> dict[tuple[int, int], int]:
    """Each member beats the next ``n/2 - 1`` members cyclically.

    Opposite pairs ``(p, p + n/2)`` are decided for the earlier member; the later one
    beats ``b``, and the earlier one loses to ``b`` when ``b_beats_first`` else beats it.
    """
    n = len(members)
    half = n // 2
    edges: dict[tuple[int, int], int] = {}
    for p1 in range(n):
        for p2 in range(p1 + 1, n):
            gap = p2 - p1
            first, second = members[p1], members[p2]
            if gap < half:
                edges[(first, second)] = weight
            elif gap > half:
                edges[(second, first)] = weight
            else:
                edges[(first, second)] = weight
                edges[(second, b)] = weight
                if b_beats_first:
                    edges[(b, first)] = weight
                else:
                    edges[(first, b)] = weight
    return edges


def reduce_copeland(
    inst: Rxc3Instance, length: int, alpha: Fraction, up_to: bool = False
) -> ReductionOutput:
    """Copeland^alpha instance with t = q/(3(l-1)) absent votes.

    Raises:
        ReductionError: The instance is malformed, q is not divisible by 6(l-1), alpha is
            outside [0, 1], or alpha < 1 but not below (q-3)/q.
    """
    _require_valid(inst, length)
    alpha = Fraction(alpha)
    if not 0 <= alpha <= 1:
        raise ReductionError(f"alpha must lie in [0, 1], got {alpha}")
    divisor = 6 * (length - 1)
    if inst.q % divisor:
        raise ReductionError(
            f"Copeland construction needs q divisible by {divisor}, got q={inst.q}; "
            "duplicate the instance"
        )
    if alpha < 1 and alpha >= Fraction(inst.q - 3, inst.q):
        raise ReductionError(
            f"alpha={alpha} must be below (q-3)/q = {Fraction(inst.q - 3, inst.q)} at q={inst.q}"
        )
    return _with_retries(
        inst, lambda source, copies: _build_copeland(source, inst, copies, length, alpha, up_to)
    )


def _build_copeland(
    source: Rxc3Instance,
    base: Rxc3Instance,
    copies: int,
    length: int,
    alpha: Fraction,
    up_to: bool,
) -> ReductionOutput:
    q = source.q
    whole = alpha == 1
    if whole and q < 12:
        raise _NeedsLargerInstance(f"alpha=1 construction needs q >= 12, got q={q}")
    t = q // (3 * (length - 1))
    half = q // 2
    names = [f"x{i}" for i in range(1, q + 1)] + [f"S{j}" for j in range(1, q + 1)]
    names += ["c", "b"] + [f"w{k}" for k in range(1, half + 2)]
    xs = list(range(q))
    sets = list(range(q, 2 * q))
    c, b = 2 * q, 2 * q + 1
    ws = list(range(2 * q + 2, 2 * q + half + 3))
    groups = {"x": tuple(xs), "S": tuple(sets), "c": (c,), "b": (b,), "w": tuple(ws)}
    tb = TieBreakOrder(tuple(sets + xs + [c] + ws + [b]))
    m = len(names)
    mode = _mode(length, up_to)
    heavy = 4 * q

    gadget = _cyclic_tournament(xs, b, heavy, b_beats_first=True)
    gadget.update(_cyclic_tournament(sets, b, heavy, b_beats_first=False))
    for wk in ws:
        for s in sets:
            gadget[(s, wk)] = heavy
        for x in xs:
            gadget[(wk, x)] = heavy
        gadget[(c, wk)] = heavy
        gadget[(b, wk)] = heavy
    final: dict[tuple[int, int], int] = {}
    for j in range(1, q + 1):
        members = source.members(j)
        for i in range(1, q + 1):
            if i in members:
                final[(xs[i - 1], sets[j - 1])] = 0 if whole else 1
            else:
                gadget[(xs[i - 1], sets[j - 1])] = heavy
        final[(sets[j - 1], c)] = t if whole else t - 1
    for x in xs:
        gadget[(x, c)] = heavy
    gadget[(b, c)] = heavy

    votes: list[Ranking] = [(c, *ws[: length - 1])] * 2
    if not whole:
        for j in range(1, q + 1):
            votes += [(sets[j - 1], xs[i - 1], *ws[: length - 2]) for i in source.members(j)]
    explicit = Profile.from_rankings(mode, m, votes)
    known = _assemble(m, length, mode, gadget, explicit, final)

    after_x = Fraction(q + half) + (alpha if not whole else 0)
    bookkeeping = {
        "candidates": 2 * q + half + 3,
        "absent": t,
        "alpha": str(alpha),
        "scores": {
            "c": half + 1,
            "x": q + half + 1,
            "b": q + 2,
            "S_max": q + 6 if whole else q + 3,
            "w_max": q + half,
        },
        "post_scores": {
            "c": q + half + 1,
            "x": str(after_x),
            "b": q + 2,
            "S_max": q + 6 if whole else str(q + 2 + 3 * alpha),
            "w_max": q + half,
        },
        "margins": {"x->S member": 0 if whole else 1, "S->c": t if whole else t - 1},
        "post_margins": {"x->S covering": -1 if whole else 0},
    }
    instance = WavInstance(mode, m, known, t, c, Copeland(alpha), tb)
    logger.info("Copeland construction: %d candidates, %d known votes, t=%d", m, known.total, t)
    return ReductionOutput(
        COPELAND, instance, tuple(names), groups, bookkeeping, source, base, copies
    )


def copeland_witness_from_cover(red: ReductionOutput, sol: Rxc3Solution) -> Profile:
    return _cover_votes(red, sol)


WITNESS_BUILDERS: dict[str, Callable[[ReductionOutput, Rxc3Solution], Profile]] = {
    STV: stv_witness_from_cover,
    MAXIMIN: maximin_witness_from_cover,
    COPELAND: copeland_witness_from_cover,
}


# ---------------------------------------------------------------------------
# Verification


@dataclass(frozen=True)
class Check:
    name: str
    status: str
    detail: str = ""


@dataclass
class VerificationReport:
    checks: list[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(check.status != FAIL for check in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [check for check in self.checks if check.status == FAIL]

    def expect(self, name: str, expected: Any, actual: Any) -> bool:
        passed = expected == actual
        detail = f"{actual}" if passed else f"expected {expected}, found {actual}"
        self.checks.append(Check(name, PASS if passed else FAIL, detail))
        return passed

    def at_most(self, name: str, bound: Any, actual: Any) -> bool:
        passed = actual <= bound
        detail = f"{actual} <= {bound}" if passed else f"expected at most {bound}, found {actual}"
        self.checks.append(Check(name, PASS if passed else FAIL, detail))
        return passed

    def skip(self, name: str, detail: str) -> None:
        self.checks.append(Check(name, SKIP, detail))

    def lines(self) -> list[str]:
        return [f"{c.status.upper():4}  {c.name}: {c.detail}" for c in self.checks]


def _values(scores: list, members: Iterable[int]) -> set:
    return {scores[k] for k in members}


def _single(values: set) -> Any:
    return next(iter(values)) if len(values) == 1 else sorted(values)


def _stv_block_of(red: ReductionOutput, ranking: Ranking) -> str:
    family = {k: name for name, ids in red.groups.items() for k in ids}
    pattern = (family[ranking[0]], family[ranking[1]])
    return {
        ("c", "w"): "P1",
        ("w", "c"): "P2",
        ("d0", "w"): "P3",
        ("d", "w"): "P4",
        ("b", "b_bar"): "P5_1",
        ("b", "d"): "P5_2",
        ("b_bar", "b"): "P6_1",
        ("b_bar", "d0"): "P6_2",
    }.get(pattern, "other")


def _check_stv_structure(red: ReductionOutput, report: VerificationReport) -> None:
    found: Counter[str] = Counter()
    for ranking, count in red.instance.known.entries:
        found[_stv_block_of(red, ranking)] += count
    for block, expected in red.bookkeeping["blocks"].items():
        report.expect(f"block {block} votes", expected, found.get(block, 0))
    report.expect("votes outside the blocks", 0, found.get("other", 0))


def _check_stv_witness(
    red: ReductionOutput, sol: Rxc3Solution, merged: Profile, report: VerificationReport
) -> None:
    q = red.source.q
    elected, trace = stv_winner(merged, red.tb)
    report.expect("STV winner with witness", "c", red.names[elected])
    kept = set(sol.indices)
    expected_out = {red.index(f"b{i}") for i in kept}
    expected_out |= {red.index(f"b{i}_bar") for i in range(1, q + 1) if i not in kept}
    report.expect("first q eliminations", sorted(expected_out), sorted(trace.eliminations[:q]))
    if len(trace.rounds) <= q:
        report.expect("round q+1 exists", True, False)
        return
    table = trace.rounds[q].scores
    expected = red.bookkeeping["round_table"]
    for role in ("w", "c", "d0"):
        report.expect(f"round q+1 score of {role}", expected[role], table.get(red.index(role)))
    report.expect(
        "round q+1 scores of d_j", expected["d"], _single(_values(table, red.group("d")))
    )
    offsets = red.bookkeeping["survivor_offsets"]
    for i in range(1, q + 1):
        name = f"b{i}_bar" if i in kept else f"b{i}"
        offset = offsets["b_bar"] if i in kept else offsets["b"]
        report.expect(
            f"round q+1 score of {name}", 12 * q + 8 * i + offset, table.get(red.index(name))
        )


def _check_maximin_structure(red: ReductionOutput, report: VerificationReport) -> None:
    graph = wmg(red.instance.known)
    scores = maximin_from_wmg(graph)
    for role, expected in red.bookkeeping["min_scores"].items():
        report.expect(f"min-score of {role}", expected, _single(_values(scores, red.group(role))))
    margins = red.bookkeeping["margins"]
    member, other = set(), set()
    for j in range(1, red.source.q + 1):
        s = red.index(f"S{j}")
        members = red.source.members(j)
        for i in range(1, red.source.q + 1):
            x = red.index(f"x{i}")
            if i in members:
                member.add(graph[s, x])
            else:
                other.add(graph[x, s])
    c = red.index("c")
    report.expect("margin S->x (member)", margins["S->x member"], _single(member))
    report.expect("margin x->S (other)", margins["x->S other"], _single(other))
    report.expect("margin x->c", margins["x->c"], _single({graph[x, c] for x in red.group("x")}))
    report.expect("margin S->c", margins["S->c"], _single({graph[s, c] for s in red.group("S")}))


def _check_maximin_witness(
    red: ReductionOutput, sol: Rxc3Solution, merged: Profile, report: VerificationReport
) -> None:
    scores = maximin_from_wmg(wmg(merged))
    report.expect("Maximin winner with witness", "c", red.names[winner(merged, Maximin(), red.tb)])
    post = red.bookkeeping["post_min_scores"]
    report.expect("min-score of c with witness", post["c"], scores[red.index("c")])
    report.expect(
        "min-scores of x with witness", post["x"], _single(_values(scores, red.group("x")))
    )


def _copeland_check_scores(
    red: ReductionOutput,
    scores: list[Fraction],
    table: dict,
    label: str,
    report: VerificationReport,
) -> None:
    for role in ("c", "x", "b"):
        report.expect(
            f"{label} Copeland score of {role}",
            Fraction(table[role]),
            _single(_values(scores, red.group(role))),
        )
    highest = max(_values(scores, red.group("S")))
    report.at_most(f"{label} Copeland scores of S", Fraction(table["S_max"]), highest)
    highest = max(_values(scores, red.group("w")))
    report.at_most(f"{label} Copeland scores of w", Fraction(table["w_max"]), highest)


def _check_copeland_structure(red: ReductionOutput, report: VerificationReport) -> None:
    alpha = Fraction(red.bookkeeping["alpha"])
    graph = wmg(red.instance.known)
    _copeland_check_scores(
        red, copeland_from_wmg(graph, alpha), red.bookkeeping["scores"], "known", report
    )
    margins = red.bookkeeping["margins"]
    member = {
        graph[red.index(f"x{i}"), red.index(f"S{j}")]
        for j in range(1, red.source.q + 1)
        for i in red.source.members(j)
    }
    c = red.index("c")
    report.expect("margin x->S (member)", margins["x->S member"], _single(member))
    report.expect("margin S->c", margins["S->c"], _single({graph[s, c] for s in red.group("S")}))


def _check_copeland_witness(
    red: ReductionOutput, sol: Rxc3Solution, merged: Profile, report: VerificationReport
) -> None:
    alpha = Fraction(red.bookkeeping["alpha"])
    graph = wmg(merged)
    elected = winner(merged, Copeland(alpha), red.tb)
    report.expect("Copeland winner with witness", "c", red.names[elected])
    _copeland_check_scores(
        red, copeland_from_wmg(graph, alpha), red.bookkeeping["post_scores"], "completed", report
    )
    covering = {
        graph[red.index(f"x{i}"), red.index(f"S{j}")]
        for j in sol.indices
        for i in red.source.members(j)
    }
    report.expect(
        "margin x->S (covering) with witness",
        red.bookkeeping["post_margins"]["x->S covering"],
        _single(covering),
    )


_STRUCTURE_CHECKS = {
    STV: _check_stv_structure,
    MAXIMIN: _check_maximin_structure,
    COPELAND: _check_copeland_structure,
}
_WITNESS_CHECKS = {
    STV: _check_stv_witness,
    MAXIMIN: _check_maximin_witness,
    COPELAND: _check_copeland_witness,
}


def verify_reduction(
    red: ReductionOutput,
    inst: Rxc3Instance | None = None,
    wav_budget: int = DEFAULT_BUDGET,
    cover_budget: int = DEFAULT_COVER_BUDGET,
    workers: int = 1,
) -> VerificationReport:
    """Check a generated instance against everything its construction promises.

    Covers candidate and vote counts, block sizes or margins and score tables of the
    known profile, the witness built from a cover (when one exists), and, when the
    RXC3 instance has no cover and the search fits ``wav_budget``, that no completion
    elects the target.

    Raises:
        ReductionError: The reduction lacks a role group or bookkeeping entry it needs.
    """
    problem = bookkeeping_problem(red.kind, red.groups, red.bookkeeping)
    if problem:
        raise ReductionError(f"Cannot verify reduction: {problem}")
    report = VerificationReport()
    instance = red.instance
    book = red.bookkeeping
    if inst is not None:
        report.expect("generated from the given RXC3 instance", True, inst == red.base)
    report.expect("candidates", book["candidates"], instance.m)
    report.expect("role map is a bijection", instance.m, len(set(red.names)))
    report.expect("absent votes", book["absent"], instance.t)
    if "total_votes" in book:
        report.expect("known votes", book["total_votes"], instance.known.total)
    _STRUCTURE_CHECKS[red.kind](red, report)

    try:
        sol = solve_rxc3_bruteforce(red.source, cover_budget)
    except BudgetExceededError as e:
        report.skip("exact cover search", str(e))
        return report

    if sol is not None:
        witness = WITNESS_BUILDERS[red.kind](red, sol)
        report.expect("witness size", instance.t, witness.total)
        _WITNESS_CHECKS[red.kind](red, sol, instance.completed(witness), report)
        return report

    try:
        answer = wav_bruteforce(instance, budget=wav_budget, workers=workers)
    except BudgetExceededError as e:
        report.skip("no completion elects c", str(e))
    else:
        report.expect("no completion elects c", False, answer.yes)
    return report
