"""Ballot files, RXC3 files, reduction sidecars and rule specs.

All files are JSON. Ballot files list one ballot entry per line so that large gadget
profiles stay diffable; see specs/file-formats.md for the exact grammar.
"""

import json
import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

from .ballots import BallotError, BallotMode, CandidateId, Profile, TieBreakOrder
from .reductions import ReductionOutput, bookkeeping_problem
from .rules import (
    Copeland,
    Maximin,
    Rounding,
    Rule,
    RuleError,
    Scoring,
    ScoringVector,
    Stv,
)
from .rxc3 import Rxc3Instance
from .wav import WavError, WavInstance

logger = logging.getLogger("absent_votes.formats")

_MODE_PATTERN = re.compile(r"^(top|up-to)-([1-9][0-9]*)$")


class FormatError(Exception):
    """Unparseable or inconsistent input file."""


@dataclass(frozen=True)
class BallotFile:
    """Candidate names, a profile over them and the tie-break order."""

    candidates: tuple[str, ...]
    profile: Profile
    tiebreak: TieBreakOrder

    def index(self, name: str) -> CandidateId:
        try:
            return self.candidates.index(name)
        except ValueError:
            raise FormatError(f"Unknown candidate: {name}") from None

    def name(self, candidate: CandidateId) -> str:
        return self.candidates[candidate]

    def with_profile(self, profile: Profile) -> "BallotFile":
        return BallotFile(self.candidates, profile, self.tiebreak)


def parse_mode(text: str) -> BallotMode:
    """``top-<l>`` or ``up-to-<L>``."""
    match = _MODE_PATTERN.match(text)
    if not match:
        raise FormatError(f"Invalid ballot mode '{text}', expected top-<l> or up-to-<L>")
    length = int(match.group(2))
    return BallotMode.up_to(length) if match.group(1) == "up-to" else BallotMode.top(length)


def _names(value: Any, what: str) -> list[str]:
    if not isinstance(value, list) or not all(isinstance(v, str) and v for v in value):
        raise FormatError(f"{what} must be a list of non-empty names")
    return value


def _load_json(text: str, what: str) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"Invalid JSON in {what}: {e}") from e
    if not isinstance(data, dict):
        raise FormatError(f"{what} must be a JSON object")
    return data


def _read(path: Path) -> str:
    try:
        return path.read_text()
    except OSError as e:
        raise FormatError(f"Cannot read {path}: {e}") from e


def parse_ballot_file(text: str) -> BallotFile:
    data = _load_json(text, "ballot file")
    for key in ("candidates", "mode", "ballots"):
        if key not in data:
            raise FormatError(f"Missing required field: {key}")
    candidates = _names(data["candidates"], "candidates")
    if len(set(candidates)) != len(candidates):
        raise FormatError("Candidate names must be unique")
    index = {name: k for k, name in enumerate(candidates)}
    mode = parse_mode(data["mode"])

    def ids(names: list[str], what: str) -> tuple[int, ...]:
        unknown = [n for n in names if n not in index]
        if unknown:
            raise FormatError(f"{what} names unknown candidates: {unknown}")
        return tuple(index[n] for n in names)

    if not isinstance(data["ballots"], list):
        raise FormatError("ballots must be a list")
    entries = []
    for k, ballot in enumerate(data["ballots"], start=1):
        if not isinstance(ballot, dict) or "ranking" not in ballot:
            raise FormatError(f"Ballot {k} must be an object with a ranking")
        count = ballot.get("count", 1)
        if not isinstance(count, int) or isinstance(count, bool):
            raise FormatError(f"Ballot {k} count must be an integer")
        ranking = _names(ballot["ranking"], f"Ballot {k} ranking")
        entries.append((ids(ranking, f"Ballot {k}"), count))

    tiebreak = data.get("tiebreak", candidates)
    try:
        profile = Profile(mode, len(candidates), tuple(entries))
        tb = TieBreakOrder(ids(_names(tiebreak, "tiebreak"), "tiebreak"))
    except BallotError as e:
        raise FormatError(str(e)) from e
    if tb.m != len(candidates):
        raise FormatError(f"tiebreak lists {tb.m} candidates, expected {len(candidates)}")
    return BallotFile(tuple(candidates), profile, tb)


def load_ballot_file(path: Path) -> BallotFile:
    return parse_ballot_file(_read(path))


def ballot_lines(bf: BallotFile, profile: Profile | None = None) -> list[str]:
    """One JSON object per ballot entry, in canonical profile order."""
    profile = profile if profile is not None else bf.profile
    return [
        json.dumps({"ranking": [bf.name(a) for a in ranking], "count": count})
        for ranking, count in profile.entries
    ]


def dump_ballot_file(bf: BallotFile) -> str:
    ballots = ",\n".join(f"    {line}" for line in ballot_lines(bf))
    return (
        "{\n"
        f'  "candidates": {json.dumps(list(bf.candidates))},\n'
        f'  "mode": {json.dumps(str(bf.profile.mode))},\n'
        f'  "ballots": [\n{ballots}\n  ],\n'
        f'  "tiebreak": {json.dumps([bf.name(a) for a in bf.tiebreak.priority])}\n'
        "}\n"
    )


def write_ballot_file(path: Path, bf: BallotFile) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_ballot_file(bf))


def parse_rule_spec(text: str) -> Rule:
    """``stv``, ``maximin``, ``copeland:<alpha>`` or ``score:<v1,..,vk>[:up|:down]``."""
    head, _, rest = text.strip().partition(":")
    try:
        if head == "stv" and not rest:
            return Stv()
        if head == "maximin" and not rest:
            return Maximin()
        if head == "copeland":
            return Copeland(Fraction(rest or "0"))
        if head == "score" and rest:
            weights, _, rounding = rest.partition(":")
            vector = ScoringVector(tuple(int(v) for v in weights.split(",")))
            if not rounding:
                return Scoring(vector)
            if rounding not in (Rounding.UP.value, Rounding.DOWN.value):
                raise FormatError(f"Unknown rounding '{rounding}', expected up or down")
            return Scoring(vector, Rounding(rounding))
    except (ValueError, ZeroDivisionError, RuleError) as e:
        raise FormatError(f"Invalid rule spec '{text}': {e}") from e
    raise FormatError(
        f"Invalid rule spec '{text}', expected stv, maximin, copeland:<alpha> "
        "or score:<v1,..,vk>[:up|:down]"
    )


def format_rule_spec(rule: Rule) -> str:
    if isinstance(rule, Stv):
        return "stv"
    if isinstance(rule, Maximin):
        return "maximin"
    if isinstance(rule, Copeland):
        return f"copeland:{rule.alpha}"
    spec = "score:" + ",".join(str(a) for a in rule.vector.weights)
    if rule.rounding is not Rounding.TOP_EXACT:
        spec += f":{rule.rounding.value}"
    return spec


def parse_rxc3(text: str) -> Rxc3Instance:
    """``{"q": <int>, "sets": [[x, y, z], ...]}``; validity is checked by the consumer."""
    data = _load_json(text, "RXC3 file")
    q, sets = data.get("q"), data.get("sets")
    if not isinstance(q, int) or isinstance(q, bool):
        raise FormatError("RXC3 file needs an integer q")
    if not isinstance(sets, list) or not all(
        isinstance(s, list) and all(isinstance(x, int) for x in s) for s in sets
    ):
        raise FormatError("RXC3 sets must be a list of integer lists")
    return Rxc3Instance(q, tuple(tuple(s) for s in sets))


def load_rxc3(path: Path) -> Rxc3Instance:
    return parse_rxc3(_read(path))


def rxc3_data(inst: Rxc3Instance) -> dict:
    return {"q": inst.q, "sets": [list(s) for s in inst.sets]}


def dump_rxc3(inst: Rxc3Instance) -> str:
    return json.dumps(rxc3_data(inst)) + "\n"


def reduction_ballot_file(red: ReductionOutput) -> BallotFile:
    return BallotFile(red.names, red.instance.known, red.tb)


def dump_reduction_sidecar(red: ReductionOutput) -> str:
    inst = red.instance
    data = {
        "kind": red.kind,
        "rule": format_rule_spec(inst.rule),
        "mode": str(inst.mode),
        "absent": inst.t,
        "target": red.names[inst.target],
        "groups": {name: [red.names[k] for k in ids] for name, ids in red.groups.items()},
        "bookkeeping": red.bookkeeping,
        "source": rxc3_data(red.source),
        "base": rxc3_data(red.base),
        "copies": red.copies,
    }
    return json.dumps(data, indent=2) + "\n"


def write_reduction(prefix: Path, red: ReductionOutput) -> tuple[Path, Path]:
    """Write ``<prefix>.ballots.json`` and ``<prefix>.reduction.json``."""
    ballots_path = prefix.with_name(prefix.name + ".ballots.json")
    sidecar_path = prefix.with_name(prefix.name + ".reduction.json")
    write_ballot_file(ballots_path, reduction_ballot_file(red))
    sidecar_path.write_text(dump_reduction_sidecar(red))
    logger.info("Wrote %s and %s", ballots_path, sidecar_path)
    return ballots_path, sidecar_path


def sidecar_path_for(ballots_path: Path) -> Path:
    stem = ballots_path.name.removesuffix(".json").removesuffix(".ballots")
    return ballots_path.with_name(stem + ".reduction.json")


def parse_reduction(bf: BallotFile, sidecar_text: str) -> ReductionOutput:
    data = _load_json(sidecar_text, "reduction sidecar")
    required = ("kind", "rule", "mode", "absent", "target", "groups", "bookkeeping", "source")
    missing = [key for key in required if key not in data]
    if missing:
        raise FormatError(f"Missing required field: {missing[0]}")
    if parse_mode(data["mode"]) != bf.profile.mode:
        raise FormatError(f"Sidecar mode {data['mode']} differs from {bf.profile.mode}")
    for key in ("absent", "copies"):
        value = data.get(key, 1)
        if not isinstance(value, int) or isinstance(value, bool) or value < 0:
            raise FormatError(f"Sidecar {key} must be a non-negative integer, got {value!r}")
    if data.get("copies", 1) < 1:
        raise FormatError(f"Sidecar copies must be at least 1, got {data['copies']}")
    if not isinstance(data["groups"], dict) or not isinstance(data["bookkeeping"], dict):
        raise FormatError("Sidecar groups and bookkeeping must be JSON objects")
    groups = {
        name: tuple(bf.index(n) for n in _names(members, f"Group {name}"))
        for name, members in data["groups"].items()
    }
    problem = bookkeeping_problem(data["kind"], groups, data["bookkeeping"])
    if problem:
        raise FormatError(f"Invalid reduction sidecar: {problem}")
    source = parse_rxc3(json.dumps(data["source"]))
    base = parse_rxc3(json.dumps(data.get("base", data["source"])))
    try:
        instance = WavInstance(
            bf.profile.mode,
            len(bf.candidates),
            bf.profile,
            data["absent"],
            bf.index(data["target"]),
            parse_rule_spec(data["rule"]),
            bf.tiebreak,
        )
    except WavError as e:
        raise FormatError(str(e)) from e
    return ReductionOutput(
        data["kind"],
        instance,
        bf.candidates,
        groups,
        data["bookkeeping"],
        source,
        base,
        data.get("copies", 1),
    )


def load_reduction(ballots_path: Path, sidecar_path: Path | None = None) -> ReductionOutput:
    bf = load_ballot_file(ballots_path)
    return parse_reduction(bf, _read(sidecar_path or sidecar_path_for(ballots_path)))

