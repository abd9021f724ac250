"""Command-line interface for absent-votes."""

import argparse
import logging
import sys
from enum import IntEnum
from pathlib import Path

from . import __version__
from .ballots import BallotError, Profile
from .config import DEFAULT_CONFIG_PATH, Config, ConfigError, load_config_or_default
from .flow import FlowError, flow_applicable, wav_scoring
from .formats import (
    FormatError,
    dump_ballot_file,
    load_ballot_file,
    load_reduction,
    load_rxc3,
    parse_rule_spec,
    write_ballot_file,
    write_reduction,
)
from .logging import setup_logging
from .reductions import (
    ReductionError,
    ReductionOutput,
    reduce_copeland,
    reduce_maximin,
    reduce_stv,
    verify_reduction,
)
from .rules import Copeland, Maximin, RuleError, Stv, rule_scores, stv_winner, winner
from .rxc3 import Rxc3Error, preprocess_rxc3, solve_rxc3_bruteforce
from .wav import BudgetExceededError, WavAnswer, WavError, WavInstance, wav_bruteforce

logger = logging.getLogger("absent_votes.cli")

INPUT_ERRORS = (
    BallotError,
    FlowError,
    FormatError,
    ReductionError,
    RuleError,
    Rxc3Error,
    WavError,
)


class ExitCode(IntEnum):
    YES = 0
    NO = 1
    INPUT_ERROR = 2
    BUDGET_EXCEEDED = 3


def main(argv: list[str] | None = None) -> int:
    """Main entry point."""
    parser = argparse.ArgumentParser(
        prog="absent-votes",
        description="Decide whether absent top-truncated ballots can elect a candidate",
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"%(prog)s {__version__}",
    )
    parser.add_argument(
        "--config",
        "-c",
        type=Path,
        default=None,
        help=f"Config file path (default: {DEFAULT_CONFIG_PATH}, if present)",
    )
    parser.add_argument(
        "--verbose",
        "-v",
        action="store_true",
        help="Enable verbose (debug) logging",
    )

    subparsers = parser.add_subparsers(dest="command", required=True)

    # winner command
    winner_parser = subparsers.add_parser("winner", help="Tabulate a ballot file")
    winner_parser.add_argument("file", type=Path, help="Ballot file")
    winner_parser.add_argument(
        "--rule",
        "-r",
        required=True,
        help="stv | maximin | copeland:<alpha> | score:<v1,..,vk>[:up|:down]",
    )

    # wav command
    wav_parser = subparsers.add_parser("wav", help="Decide winner with absent votes")
    wav_parser.add_argument("file", type=Path, help="Ballot file with the known votes")
    wav_parser.add_argument("--rule", "-r", required=True, help="Rule spec")
    wav_parser.add_argument(
        "--absent", "-t", type=int, required=True, help="Number of absent votes"
    )
    wav_parser.add_argument("--target", required=True, help="Candidate to make the winner")
    wav_parser.add_argument(
        "--method",
        choices=["auto", "bruteforce", "flow"],
        default="auto",
        help="Solver (default: flow when applicable, else bruteforce)",
    )
    wav_parser.add_argument(
        "--budget", type=int, help="Maximum completions to enumerate (overrides config)"
    )
    wav_parser.add_argument(
        "--workers", type=int, help="Brute-force worker processes, 0 = all cores"
    )
    wav_parser.add_argument(
        "--output",
        "-o",
        type=Path,
        help="Write the completed profile (known plus witness) to this ballot file",
    )

    # reduce command
    reduce_parser = subparsers.add_parser("reduce", help="Build a WAV instance from RXC3")
    reduce_parser.add_argument("rxc3", type=Path, help="RXC3 file")
    reduce_parser.add_argument(
        "--rule", "-r", required=True, help="stv | maximin | copeland:<alpha>"
    )
    reduce_parser.add_argument(
        "--length", "-l", type=int, required=True, help="Ballot length"
    )
    reduce_parser.add_argument(
        "--up-to", action="store_true", help="Emit up-to-L ballots instead of top-l"
    )
    reduce_parser.add_argument(
        "--duplicate",
        action="store_true",
        help="Duplicate the RXC3 instance until q meets the divisibility requirement",
    )
    reduce_parser.add_argument(
        "--output",
        "-o",
        type=Path,
        required=True,
        help="Output prefix for <prefix>.ballots.json and <prefix>.reduction.json",
    )

    # verify command
    verify_parser = subparsers.add_parser("verify", help="Check a generated reduction")
    verify_parser.add_argument("ballots", type=Path, help="<prefix>.ballots.json")
    verify_parser.add_argument(
        "--sidecar", type=Path, help="Reduction sidecar (default: <prefix>.reduction.json)"
    )
    verify_parser.add_argument(
        "--rxc3", type=Path, help="RXC3 file the reduction must have been built from"
    )
    verify_parser.add_argument(
        "--budget", type=int, help="Maximum completions for the NO check (overrides config)"
    )
    verify_parser.add_argument("--workers", type=int, help="Brute-force worker processes")

    # cover command
    cover_parser = subparsers.add_parser("cover", help="Solve an RXC3 file by brute force")
    cover_parser.add_argument("rxc3", type=Path, help="RXC3 file")

    args = parser.parse_args(argv)

    try:
        config = load_config_or_default(args.config)
    except ConfigError as e:
        print(f"Error: {e}", file=sys.stderr)
        return ExitCode.INPUT_ERROR

    setup_logging(config.log_dir, config.log_retention_days, args.verbose)

    commands = {
        "winner": cmd_winner,
        "wav": cmd_wav,
        "reduce": cmd_reduce,
        "verify": cmd_verify,
        "cover": cmd_cover,
    }
    try:
        return commands[args.command](config, args)
    except BudgetExceededError as e:
        print(f"Error: {e}", file=sys.stderr)
        return ExitCode.BUDGET_EXCEEDED
    except INPUT_ERRORS as e:
        print(f"Error: {e}", file=sys.stderr)
        return ExitCode.INPUT_ERROR


def cmd_winner(config: Config, args: argparse.Namespace) -> int:
    """Handle winner command - print the winner and how it was reached."""
    bf = load_ballot_file(args.file)
    rule = parse_rule_spec(args.rule)
    profile, tb = bf.profile, bf.tiebreak

    if isinstance(rule, Stv):
        elected, trace = stv_winner(profile, tb)
        print(bf.name(elected))
        for number, round_ in enumerate(trace.rounds, start=1):
            tally = ", ".join(f"{bf.name(a)}={n}" for a, n in round_.scores.items())
            print(f"  Round {number}: {tally}; eliminated {bf.name(round_.eliminated)}")
        return ExitCode.YES

    print(bf.name(winner(profile, rule, tb)))
    for candidate, score in enumerate(rule_scores(profile, rule)):
        print(f"  {bf.name(candidate)}: {score}")
    return ExitCode.YES


def _solver_settings(config: Config, args: argparse.Namespace) -> tuple[int, int]:
    budget = args.budget if args.budget is not None else config.solver.budget
    workers = args.workers if args.workers is not None else config.solver.workers
    return budget, workers


def cmd_wav(config: Config, args: argparse.Namespace) -> int:
    """Handle wav command - decide and print a witness on YES."""
    bf = load_ballot_file(args.file)
    rule = parse_rule_spec(args.rule)
    inst = WavInstance(
        bf.profile.mode,
        len(bf.candidates),
        bf.profile,
        args.absent,
        bf.index(args.target),
        rule,
        bf.tiebreak,
    )
    budget, workers = _solver_settings(config, args)

    method = args.method
    if method == "auto":
        method = "flow" if flow_applicable(inst) else "bruteforce"
    logger.info("Deciding with %s (t=%d, target %s)", method, inst.t, args.target)

    answer: WavAnswer
    if method == "flow":
        answer = wav_scoring(inst)
    else:
        answer = wav_bruteforce(inst, budget=budget, workers=workers)

    if not answer.yes:
        print("NO")
        return ExitCode.NO

    witness = answer.witness or Profile(inst.mode, inst.m)
    print("YES")
    print(dump_ballot_file(bf.with_profile(witness)), end="")
    if args.output:
        write_ballot_file(args.output, bf.with_profile(inst.completed(witness)))
        logger.info("Wrote completed profile to %s", args.output)
    return ExitCode.YES


def _build_reduction(config: Config, args: argparse.Namespace) -> ReductionOutput:
    inst = load_rxc3(args.rxc3)
    rule = parse_rule_spec(args.rule)
    length = args.length
    if length < 2:
        raise ReductionError(f"Ballot length must be at least 2, got {length}")
    if isinstance(rule, Stv):
        divisor = 6
    elif isinstance(rule, Maximin):
        divisor = 3 * (length - 1)
    elif isinstance(rule, Copeland):
        divisor = 6 * (length - 1)
    else:
        raise ReductionError(f"No construction for rule '{args.rule}'")
    if args.duplicate:
        inst = preprocess_rxc3(inst, divisor)

    if isinstance(rule, Stv):
        return reduce_stv(inst, length, up_to=args.up_to)
    if isinstance(rule, Maximin):
        return reduce_maximin(inst, length, up_to=args.up_to)
    return reduce_copeland(inst, length, rule.alpha, up_to=args.up_to)


def cmd_reduce(config: Config, args: argparse.Namespace) -> int:
    """Handle reduce command - write the instance file and its sidecar."""
    red = _build_reduction(config, args)
    ballots_path, sidecar_path = write_reduction(args.output, red)
    print(f"Candidates: {red.instance.m}")
    print(f"Known votes: {red.instance.known.total}")
    print(f"Absent votes: {red.instance.t}")
    print(f"Target: {red.names[red.instance.target]}")
    print(f"Wrote {ballots_path}")
    print(f"Wrote {sidecar_path}")
    return ExitCode.YES


def cmd_verify(config: Config, args: argparse.Namespace) -> int:
    """Handle verify command - print every check, fail on any failed claim."""
    red = load_reduction(args.ballots, args.sidecar)
    source = load_rxc3(args.rxc3) if args.rxc3 else None
    budget, workers = _solver_settings(config, args)
    report = verify_reduction(
        red,
        source,
        wav_budget=budget,
        cover_budget=config.solver.cover_budget,
        workers=workers,
    )
    for line in report.lines():
        print(line)
    if not report.ok:
        names = ", ".join(check.name for check in report.failures)
        print(f"Error: failed checks: {names}", file=sys.stderr)
        return ExitCode.NO
    return ExitCode.YES


def cmd_cover(config: Config, args: argparse.Namespace) -> int:
    """Handle cover command - print a cover's set indices, or NO."""
    inst = load_rxc3(args.rxc3)
    sol = solve_rxc3_bruteforce(inst, config.solver.cover_budget)
    if sol is None:
        print("NO")
        return ExitCode.NO
    print(" ".join(str(j) for j in sol.indices))
    return ExitCode.YES


if __name__ == "__main__":
    sys.exit(main())
