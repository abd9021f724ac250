"""Tests for ballot files, rule specs, RXC3 files and reduction sidecars."""

import json
import tempfile
from fractions import Fraction
from pathlib import Path

import pytest

from absent_votes.ballots import BallotMode, TieBreakOrder
from absent_votes.formats import (
    BallotFile,
    FormatError,
    dump_ballot_file,
    dump_reduction_sidecar,
    dump_rxc3,
    format_rule_spec,
    load_reduction,
    parse_ballot_file,
    parse_mode,
    parse_reduction,
    parse_rule_spec,
    parse_rxc3,
    reduction_ballot_file,
    sidecar_path_for,
    write_reduction,
)
from absent_votes.reductions import reduce_copeland, reduce_maximin, reduce_stv
from absent_votes.rules import Copeland, Maximin, Rounding, Scoring, ScoringVector, Stv

P1_FILE = """\
{
  "candidates": ["1", "2", "3", "4"],
  "mode": "top-2",
  "ballots": [
    {"ranking": ["3", "1"], "count": 2},
    {"ranking": ["1", "4"]},
    {"ranking": ["2", "1"], "count": 1}
  ]
}
"""


def ballot_json(**overrides) -> str:
    data = {
        "candidates": ["a", "b", "c"],
        "mode": "top-2",
        "ballots": [{"ranking": ["a", "b"], "count": 1}],
    }
    data.update(overrides)
    return json.dumps(data)


class TestParseMode:
    def test_modes(self):
        assert parse_mode("top-2") == BallotMode.top(2)
        assert parse_mode("up-to-3") == BallotMode.up_to(3)

    @pytest.mark.parametrize("text", ["top2", "top-0", "up-to", "down-2", ""])
    def test_invalid(self, text):
        with pytest.raises(FormatError, match="Invalid ballot mode"):
            parse_mode(text)


class TestBallotFile:
    def test_parse_p1(self, p1, lex4):
        bf = parse_ballot_file(P1_FILE)
        assert bf.candidates == ("1", "2", "3", "4")
        assert bf.profile == p1
        assert bf.tiebreak == lex4

    def test_dump_then_parse(self, p2):
        bf = BallotFile(("p", "q", "r", "s"), p2, TieBreakOrder((3, 1, 0, 2)))
        assert parse_ballot_file(dump_ballot_file(bf)) == bf

    def test_dump_has_one_line_per_ballot(self, p1, lex4):
        text = dump_ballot_file(BallotFile(("1", "2", "3", "4"), p1, lex4))
        ballot_lines = [line for line in text.splitlines() if '"ranking"' in line]
        assert len(ballot_lines) == len(p1.entries)

    def test_explicit_tiebreak(self):
        bf = parse_ballot_file(ballot_json(tiebreak=["c", "a", "b"]))
        assert bf.tiebreak == TieBreakOrder((2, 0, 1))

    def test_missing_field(self):
        data = json.loads(ballot_json())
        del data["mode"]
        with pytest.raises(FormatError, match="Missing required field: mode"):
            parse_ballot_file(json.dumps(data))

    def test_invalid_json(self):
        with pytest.raises(FormatError, match="Invalid JSON"):
            parse_ballot_file("{not json")

    def test_not_an_object(self):
        with pytest.raises(FormatError, match="JSON object"):
            parse_ballot_file("[1, 2]")

    def test_duplicate_names(self):
        with pytest.raises(FormatError, match="unique"):
            parse_ballot_file(ballot_json(candidates=["a", "a", "c"]))

    def test_unknown_candidate(self):
        with pytest.raises(FormatError, match="unknown candidates"):
            parse_ballot_file(ballot_json(ballots=[{"ranking": ["a", "z"]}]))

    def test_wrong_length_ranking(self):
        with pytest.raises(FormatError, match="length"):
            parse_ballot_file(ballot_json(ballots=[{"ranking": ["a"]}]))

    def test_non_integer_count(self):
        with pytest.raises(FormatError, match="count must be an integer"):
            parse_ballot_file(ballot_json(ballots=[{"ranking": ["a", "b"], "count": "2"}]))

    def test_partial_tiebreak(self):
        with pytest.raises(FormatError, match="tiebreak lists 2 candidates"):
            parse_ballot_file(ballot_json(tiebreak=["a", "b"]))

    def test_unknown_name_lookup(self):
        with pytest.raises(FormatError, match="Unknown candidate: z"):
            parse_ballot_file(ballot_json()).index("z")


class TestRuleSpec:
    @pytest.mark.parametrize(
        "text,rule",
        [
            ("stv", Stv()),
            ("maximin", Maximin()),
            ("copeland", Copeland(Fraction(0))),
            ("copeland:1/2", Copeland(Fraction(1, 2))),
            ("copeland:0.5", Copeland(Fraction(1, 2))),
            ("score:2,1", Scoring(ScoringVector((2, 1)))),
            ("score:8,2,1:up", Scoring(ScoringVector((8, 2, 1)), Rounding.UP)),
            ("score:8,2,1:down", Scoring(ScoringVector((8, 2, 1)), Rounding.DOWN)),
        ],
    )
    def test_parse(self, text, rule):
        assert parse_rule_spec(text) == rule

    @pytest.mark.parametrize(
        "text", ["stv", "maximin", "copeland:1/2", "score:2,1", "score:8,2,1:down"]
    )
    def test_format_is_canonical(self, text):
        assert format_rule_spec(parse_rule_spec(text)) == text

    @pytest.mark.parametrize(
        "text", ["borda", "stv:1", "copeland:x", "copeland:1/0", "score:", "score:1,2"]
    )
    def test_invalid(self, text):
        with pytest.raises(FormatError, match="Invalid rule spec"):
            parse_rule_spec(text)

    def test_unknown_rounding(self):
        with pytest.raises(FormatError, match="Unknown rounding"):
            parse_rule_spec("score:3,2,1:sideways")


class TestRxc3File:
    def test_parse(self, rxc3_yes):
        assert parse_rxc3(dump_rxc3(rxc3_yes)) == rxc3_yes

    def test_needs_integer_q(self):
        with pytest.raises(FormatError, match="integer q"):
            parse_rxc3('{"q": "6", "sets": []}')

    def test_sets_must_be_lists(self):
        with pytest.raises(FormatError, match="integer lists"):
            parse_rxc3('{"q": 3, "sets": [1, 2, 3]}')


class TestReductionFiles:
    def test_sidecar_path(self):
        assert sidecar_path_for(Path("out/run.ballots.json")) == Path("out/run.reduction.json")
        assert sidecar_path_for(Path("run.json")) == Path("run.reduction.json")

    @pytest.mark.parametrize("kind", ["stv", "maximin", "copeland"])
    def test_write_then_load(self, rxc3_yes, kind):
        if kind == "stv":
            red = reduce_stv(rxc3_yes, 3)
        elif kind == "maximin":
            red = reduce_maximin(rxc3_yes, 2, up_to=True)
        else:
            red = reduce_copeland(rxc3_yes, 2, Fraction(1))
        with tempfile.TemporaryDirectory() as tmpdir:
            ballots_path, sidecar_path = write_reduction(Path(tmpdir) / "run", red)
            assert ballots_path.name == "run.ballots.json"
            assert sidecar_path.name == "run.reduction.json"
            assert load_reduction(ballots_path) == red

    def test_sidecar_mode_must_match(self, rxc3_yes):
        red = reduce_maximin(rxc3_yes, 2)
        with tempfile.TemporaryDirectory() as tmpdir:
            _, sidecar_path = write_reduction(Path(tmpdir) / "run", red)
            data = json.loads(sidecar_path.read_text())
        data["mode"] = "top-3"
        with pytest.raises(FormatError, match="differs"):
            parse_reduction(reduction_ballot_file(red), json.dumps(data))

    def test_sidecar_missing_field(self, rxc3_yes):
        red = reduce_maximin(rxc3_yes, 2)
        with pytest.raises(FormatError, match="Missing required field: kind"):
            parse_reduction(reduction_ballot_file(red), '{"rule": "maximin"}')

    @pytest.mark.parametrize(
        "field,value,message",
        [
            ("kind", "borda", "unknown reduction kind 'borda'"),
            ("absent", "2", "absent must be a non-negative integer"),
            ("absent", -1, "absent must be a non-negative integer"),
            ("copies", 0, "copies must be at least 1"),
            ("groups", ["x"], "must be JSON objects"),
        ],
    )
    def test_sidecar_rejects_bad_field(self, rxc3_yes, field, value, message):
        red = reduce_maximin(rxc3_yes, 2)
        data = json.loads(dump_reduction_sidecar(red))
        data[field] = value
        with pytest.raises(FormatError, match=message):
            parse_reduction(reduction_ballot_file(red), json.dumps(data))

    @pytest.mark.parametrize(
        "drop,message",
        [
            (("bookkeeping", "margins"), "bookkeeping entry 'margins' is missing"),
            (("bookkeeping", "min_scores", "c"), "'min_scores' lacks 'c'"),
            (("groups", "S"), "role group 'S' is missing"),
        ],
    )
    def test_sidecar_needs_bookkeeping(self, rxc3_yes, drop, message):
        red = reduce_maximin(rxc3_yes, 2)
        data = json.loads(dump_reduction_sidecar(red))
        *path, key = drop
        table = data
        for step in path:
            table = table[step]
        del table[key]
        with pytest.raises(FormatError, match=f"Invalid reduction sidecar: {message}"):
            parse_reduction(reduction_ballot_file(red), json.dumps(data))

    def test_copeland_sidecar_needs_fractional_alpha(self, rxc3_yes):
        red = reduce_copeland(rxc3_yes, 2, Fraction(1))
        data = json.loads(dump_reduction_sidecar(red))
        data["bookkeeping"]["alpha"] = "half"
        with pytest.raises(FormatError, match="not a fraction"):
            parse_reduction(reduction_ballot_file(red), json.dumps(data))

    def test_missing_sidecar(self, rxc3_yes):
        red = reduce_maximin(rxc3_yes, 2)
        with tempfile.TemporaryDirectory() as tmpdir:
            ballots_path, sidecar_path = write_reduction(Path(tmpdir) / "run", red)
            sidecar_path.unlink()
            with pytest.raises(FormatError, match="Cannot read"):
                load_reduction(ballots_path)
