"""Command-line front end.

Exit codes: 0 success, 1 usage or configuration error, 2 runtime
constraint (size limit or exhausted retries).
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from aqc import reports
from aqc.analysis import Decoder
from aqc.codebook import (
    CodeBook,
    Strategy,
    format_letter_sequence,
    generate_codebook,
    parse_letter_sequence,
    validate_codebook,
)
from aqc.errors import AQCError, ConstraintError
from aqc.protocol import DEFAULT_INITIAL_GUESS, transmit
from aqc.quantum import parse_channel

EXIT_OK, EXIT_USAGE, EXIT_CONSTRAINT = 0, 1, 2


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def load_codebook(path: "str | Path") -> CodeBook:
    """Read a codebook document, or a text file with two letter-sequence lines (s0, s1)."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError:
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if len(lines) != 2:
            raise ConfigError(f"{path}: expected a JSON codebook or two letter lines")
        return validate_codebook(parse_letter_sequence(lines[0]),
                                 parse_letter_sequence(lines[1]))
    return CodeBook.from_dict(doc)


# -- experiment configuration --------------------------------------------

REPORT_KINDS = ("error_rate", "info", "disturbance")
CONFIG_FIELDS = {"report", "n_pairs", "codebook_strategy", "codebook", "channel",
                 "decoder", "initial_guess", "trials", "seed", "output", "format"}


@dataclass
class ExperimentConfig:
    report: str
    n_pairs: list[int]
    codebook_strategy: Strategy
    codebook: Path | None
    channels: list
    decoders: list[Decoder]
    initial_guess: int
    trials: int
    seed: int
    output: Path
    format: str


def _as_list(value):
    return value if isinstance(value, list) else [value]


def load_config(path: "str | Path") -> ExperimentConfig:
    """Parse and validate an experiment config; errors name the line or field."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be an object")

    def fail(name, msg):
        raise ConfigError(f"{path}: field {name!r}: {msg}")

    unknown = sorted(set(doc) - CONFIG_FIELDS)
    if unknown:
        fail(unknown[0], "unknown field")
    for name in ("seed", "trials", "output"):
        if name not in doc:
            fail(name, "required")

    seed = doc["seed"]
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        fail("seed", "must be a non-negative integer")
    trials = doc["trials"]
    if not isinstance(trials, int) or isinstance(trials, bool) or trials < 1:
        fail("trials", "must be an integer >= 1")

    report = doc.get("report", "error_rate")
    if report not in REPORT_KINDS:
        fail("report", f"must be one of {', '.join(REPORT_KINDS)}")
    if report != "error_rate" and trials < 100:
        fail("trials", f"{report} reports need at least 100 trials")

    fmt = doc.get("format", "csv")
    if fmt not in ("csv", "json"):
        fail("format", "must be 'csv' or 'json'")

    codebook = None
    if "codebook" in doc:
        if "n_pairs" in doc:
            fail("codebook", "give either 'codebook' or 'n_pairs', not both")
        codebook = path.parent / doc["codebook"]
        if not codebook.is_file():
            fail("codebook", f"file {str(codebook)!r} does not exist")
        n_pairs = []
    else:
        n_pairs = _as_list(doc.get("n_pairs", []))
        if not n_pairs or not all(isinstance(n, int) and n >= 2 for n in n_pairs):
            fail("n_pairs", "must be an integer >= 2 or a non-empty list of them")

    try:
        strategy = Strategy.parse(doc.get("codebook_strategy", "cyclic"))
    except ValueError as exc:
        fail("codebook_strategy", str(exc))
    try:
        channels = [parse_channel(c) for c in _as_list(doc.get("channel", "noiseless"))]
    except (ValueError, AttributeError) as exc:
        fail("channel", str(exc))
    try:
        decoders = [Decoder.parse(d) for d in _as_list(doc.get("decoder", "statistical"))]
    except ValueError as exc:
        fail("decoder", str(exc))
    guess = doc.get("initial_guess", DEFAULT_INITIAL_GUESS)
    if guess not in (0, 1):
        fail("initial_guess", "must be 0 or 1")

    return ExperimentConfig(report, n_pairs, strategy, codebook, channels, decoders,
                            guess, trials, seed, path.parent / doc["output"], fmt)


def run_experiment(cfg: ExperimentConfig) -> list[dict]:
    if cfg.codebook is not None:
        books = [load_codebook(cfg.codebook)]
    else:
        books = [reports.codebook_for(n, cfg.seed, cfg.codebook_strategy)
                 for n in cfg.n_pairs]
    rows = []
    for cb in books:
        for channel in cfg.channels:
            if cfg.report == "disturbance":
                rows.append(reports.disturbance_row(cb, channel, cfg.trials, cfg.seed))
                continue
            build = reports.error_rate_row if cfg.report == "error_rate" else reports.info_row
            for decoder in cfg.decoders:
                rows.append(build(cb, channel, decoder, cfg.trials, cfg.seed,
                                  cfg.initial_guess))
    return rows


# -- commands --------------------------------------------------------------

def cmd_gen_codebook(args) -> int:
    cb = generate_codebook(args.pairs, np.random.default_rng(args.seed),
                           args.strategy, max_attempts=args.max_attempts)
    Path(args.output).write_text(cb.to_json(), encoding="utf-8")
    print(format_letter_sequence(cb.s0))
    print(format_letter_sequence(cb.s1))
    return EXIT_OK


def cmd_transmit(args) -> int:
    cb = load_codebook(args.codebook)
    transcript = transmit(cb, args.bit, parse_channel(args.channel), args.seed,
                          args.initial_guess)
    sys.stdout.write(transcript.to_json())
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = load_config(args.config)
    if args.output:
        cfg.output = Path(args.output)
    rows = run_experiment(cfg)
    text = reports.to_csv(rows) if cfg.format == "csv" else reports.to_json_lines(rows)
    cfg.output.write_text(text, encoding="utf-8")
    print(f"wrote {len(rows)} row(s) to {cfg.output}")
    return EXIT_OK


def cmd_report(args) -> int:
    rows = reports.read_csv(Path(args.check).read_text(encoding="utf-8"))
    problems = reports.check_rows(rows)
    for msg in problems:
        print(msg, file=sys.stderr)
    if problems:
        return EXIT_USAGE
    print(f"ok: {len(rows)} row(s) consistent")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="aqc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen-codebook", help="generate a codebook file")
    p.add_argument("--pairs", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--strategy", type=Strategy.parse, default=Strategy.CYCLIC,
                   help="cyclic (default) or rejection")
    p.add_argument("--max-attempts", type=int, default=1000)
    p.add_argument("--output", "-o", default="codebook.json")
    p.set_defaults(func=cmd_gen_codebook)

    p = sub.add_parser("transmit", help="send one bit and print the transcript")
    p.add_argument("--codebook", required=True)
    p.add_argument("--bit", type=int, choices=(0, 1), required=True)
    p.add_argument("--channel", default="noiseless",
                   help="noiseless | flip:<p> | intercept:<theta>")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--initial-guess", type=int, choices=(0, 1),
                   default=DEFAULT_INITIAL_GUESS)
    p.set_defaults(func=cmd_transmit)

    p = sub.add_parser("experiment", help="run a sweep from a JSON config")
    p.add_argument("config")
    p.add_argument("--output", "-o", help="override the config's output path")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("report", help="re-validate a report CSV")
    p.add_argument("--check", required=True, metavar="CSV")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConstraintError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONSTRAINT
    except (AQCError, ConfigError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
