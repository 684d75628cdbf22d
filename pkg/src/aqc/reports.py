"""Flat report rows, CSV / JSON-lines output, and re-validation of CSVs.

Column order is fixed::

    n_pairs, cycles, channel, decoder, trials, exact, closed_form, mc, ci, seed

``decoder`` also tells which quantity a row carries:

* ``statistical`` / ``conclusive``: decoder failure probability
* ``mi:statistical`` / ``mi:conclusive``: I(sent bit; decision) in bits
* ``none``: fraction of transmitted pairs with opposite z outcomes

``cycles`` holds the cycle half-lengths joined by ``;``.  Empty cells mean
"not computed".
"""
from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from aqc import analysis
from aqc.codebook import CodeBook, generate_codebook
from aqc.quantum import (
    ChannelModel,
    FlipNoise,
    InterceptResend,
    Noiseless,
    intercept_resend_anticorr_exact,
    parse_channel,
)

COLUMNS = ("n_pairs", "cycles", "channel", "decoder", "trials",
           "exact", "closed_form", "mc", "ci", "seed")
CHECK_TOL = 1e-12


def _cell(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(float(x))
    return str(x)


def _num(x):
    return None if x is None else float(x)


def _row(cb, channel, decoder, trials, exact, closed, mc, ci, seed) -> dict:
    return {
        "n_pairs": cb.n_pairs,
        "cycles": ";".join(map(str, cb.cycles)),
        "channel": str(channel),
        "decoder": decoder,
        "trials": trials,
        "exact": _num(exact),
        "closed_form": _num(closed),
        "mc": _num(mc),
        "ci": _num(ci),
        "seed": seed,
    }


def error_rate_row(cb, channel, decoder, trials, seed, initial_guess=1) -> dict:
    rep = analysis.estimate_error_rate(cb, channel, decoder, trials, seed, initial_guess)
    return _row(cb, channel, analysis.Decoder.parse(decoder).value, trials,
                rep.exact_prob, rep.closed_form_prob, rep.mc_estimate,
                rep.mc_ci_halfwidth, seed)


def info_row(cb, channel, decoder, trials, seed, initial_guess=1) -> dict:
    decoder = analysis.Decoder.parse(decoder)
    rep = analysis.info_report(trials, cb, channel, decoder, seed, initial_guess)
    exact = closed = None
    if isinstance(channel, Noiseless) and cb.n_pairs <= analysis.MAX_ENUM_PAIRS:
        exact = analysis.exact_mutual_information(cb, decoder, initial_guess)
        closed = info_closed_form(cb.cycles)
    return _row(cb, channel, f"mi:{decoder.value}", trials, exact, closed,
                rep.mutual_information_bits, None, seed)


def anticorr_closed_form(channel: ChannelModel) -> float:
    """Per-pair anticorrelation probability of a transmitted singlet."""
    if isinstance(channel, Noiseless):
        return 1.0
    if isinstance(channel, FlipNoise):
        return (1 - channel.p) ** 2 + channel.p ** 2
    half = channel.theta / 2
    return math.cos(half) ** 4 + math.sin(half) ** 4


def anticorr_exact(channel: ChannelModel) -> float:
    if isinstance(channel, InterceptResend):
        return intercept_resend_anticorr_exact(channel.theta)
    return anticorr_closed_form(channel)


def info_closed_form(cycles) -> float:
    # noiseless decoding is an erasure channel with uniform input
    return 1.0 - analysis.false_matching_anticorr_prob(cycles)


def disturbance_row(cb, channel, trials, seed) -> dict:
    mc = analysis.true_pair_anticorr_rate(cb, channel, trials, seed)
    n = trials * cb.n_pairs
    ci = analysis.binomial_ci_halfwidth(round(mc * n), n)
    return _row(cb, channel, "none", trials, anticorr_exact(channel),
                anticorr_closed_form(channel), mc, ci, seed)


def to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow([_cell(row[c]) for c in COLUMNS])
    return buf.getvalue()


def to_json_lines(rows) -> str:
    return "".join(json.dumps({c: row[c] for c in COLUMNS}) + "\n" for row in rows)


def read_csv(text: str) -> list[dict]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != COLUMNS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    return list(reader)


def recompute_closed_form(row: dict) -> float | None:
    """Closed-form value implied by a row's configuration columns."""
    cycles = [int(k) for k in row["cycles"].split(";") if k]
    channel = parse_channel(row["channel"])
    decoder = row["decoder"]
    if decoder == "none":
        return anticorr_closed_form(channel)
    if not isinstance(channel, Noiseless) or int(row["n_pairs"]) > analysis.MAX_ENUM_PAIRS:
        return None
    if decoder.startswith("mi:"):
        return info_closed_form(cycles)
    return analysis.false_matching_anticorr_prob(cycles)


def check_rows(rows: list[dict]) -> list[str]:
    """Return a message per row whose closed_form cell disagrees with recomputation."""
    problems = []
    for line, row in enumerate(rows, start=2):
        expected = recompute_closed_form(row)
        cell = row["closed_form"]
        if expected is None:
            if cell:
                problems.append(f"line {line}: closed_form {cell} where none applies")
            continue
        if not cell:
            problems.append(f"line {line}: closed_form missing, expected {expected!r}")
        elif abs(float(cell) - expected) > CHECK_TOL:
            problems.append(f"line {line}: closed_form {cell} != recomputed {expected!r}")
    return problems


def codebook_for(n_pairs: int, seed: int, strategy) -> CodeBook:
    """Deterministic codebook for one sweep point."""
    return generate_codebook(n_pairs, np.random.default_rng([seed, n_pairs]), strategy)
