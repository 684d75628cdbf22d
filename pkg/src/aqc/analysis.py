"""Exact enumeration oracles, closed forms, and Monte Carlo statistics."""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import asdict, dataclass
from typing import Iterable

import numpy as np
from scipy import stats

from aqc.codebook import CodeBook, CycleDecomposition
from aqc.errors import TooLarge
from aqc.protocol import (
    AMBIGUOUS_CODE,
    DEFAULT_INITIAL_GUESS,
    INCONCLUSIVE_CODE,
    decision_code,
    decode_conclusive,
    decode_conclusive_batch,
    decode_statistical,
    decode_statistical_batch,
)
from aqc.quantum import (
    ChannelModel,
    InterceptResend,
    Noiseless,
    OutcomeVector,
    intercept_resend_anticorr_exact,
    sample_batch,
)

MAX_ENUM_PAIRS = 12
CHUNK_SIZE = 1 << 16
Z95 = 1.959963984540054


class Decoder(str, enum.Enum):
    STATISTICAL = "statistical"
    CONCLUSIVE = "conclusive"

    @classmethod
    def parse(cls, text: "str | Decoder") -> "Decoder":
        try:
            return cls(text.strip().lower() if isinstance(text, str) else text)
        except ValueError:
            raise ValueError(f"unknown decoder {text!r}") from None


# -- exact enumeration -----------------------------------------------------

def enumerate_noiseless(cb: CodeBook, bit: int = 0) -> list[tuple[float, OutcomeVector]]:
    """Every noiseless outcome vector for transmitted ``bit`` with its probability.

    Each true pair independently shows up-down or down-up; all ``2**N``
    combinations are equally likely.
    """
    n = cb.n_pairs
    if n > MAX_ENUM_PAIRS:
        raise TooLarge(f"enumeration is limited to N <= {MAX_ENUM_PAIRS}")
    pairs = cb.matching(bit).as_array()
    prob = 2.0 ** -n
    out = []
    for choice in itertools.product((True, False), repeat=n):
        spins = np.empty(2 * n, dtype=bool)
        spins[pairs[:, 0]] = choice
        spins[pairs[:, 1]] = np.logical_not(choice)
        out.append((prob, OutcomeVector(spins)))
    return out


def exact_false_anticorr_prob(cb: CodeBook, bit: int = 0) -> float:
    """P(every pair of the non-transmitted matching shows opposite spins)."""
    false_pairs = cb.matching(1 - bit).pairs
    return sum(
        p for p, ov in enumerate_noiseless(cb, bit)
        if all(ov.spin(lo) != ov.spin(hi) for lo, hi in false_pairs)
    )


def _run_decoder(ov: OutcomeVector, cb: CodeBook, decoder: Decoder, initial_guess: int):
    if decoder is Decoder.STATISTICAL:
        return decode_statistical(ov, cb)
    return decode_conclusive(ov, cb, initial_guess)


def exact_outcome_distribution(
    cb: CodeBook, decoder: "Decoder | str", initial_guess: int = DEFAULT_INITIAL_GUESS
) -> np.ndarray:
    """Joint P(sent bit, decision code) under a noiseless channel, shape (2, 4)."""
    decoder = Decoder.parse(decoder)
    joint = np.zeros((2, 4))
    for bit in (0, 1):
        for p, ov in enumerate_noiseless(cb, bit):
            res = _run_decoder(ov, cb, decoder, initial_guess)
            joint[bit, decision_code(res.decision)] += 0.5 * p
    return joint


def exact_failure_prob(
    cb: CodeBook, decoder: "Decoder | str", initial_guess: int = DEFAULT_INITIAL_GUESS
) -> float:
    joint = exact_outcome_distribution(cb, decoder, initial_guess)
    # sum the failure cells directly; dyadic weights keep this exact
    return float(joint[0, 1:].sum() + joint[1, 0] + joint[1, 2:].sum())


def false_matching_anticorr_prob(cycles: "CycleDecomposition | Iterable[int]") -> float:
    """Closed form: product over alternating cycles of ``2**(1 - k)``.

    Within a cycle of half-length k the k true-pair orientations are free,
    and the k false pairs impose k parity constraints of which only k - 1
    are independent.
    """
    if isinstance(cycles, CycleDecomposition):
        cycles = cycles.half_lengths
    return math.prod(2.0 ** (1 - k) for k in cycles)


def expected_pairs_examined(
    cb: CodeBook,
    initial_guess: int = DEFAULT_INITIAL_GUESS,
    true_bit: int | None = None,
    given_decision: bool = False,
) -> float:
    """Exact mean of the conclusive decoder's ``pairs_examined``, noiseless.

    Averages over a uniform sent bit unless ``true_bit`` is given.  With
    ``given_decision`` the mean is conditioned on the decoder reaching a bit.
    """
    bits = (0, 1) if true_bit is None else (true_bit,)
    total = weight = 0.0
    for bit in bits:
        for p, ov in enumerate_noiseless(cb, bit):
            res = decode_conclusive(ov, cb, initial_guess)
            if given_decision and res.decision.bit is None:
                continue
            total += p * res.pairs_examined
            weight += p
    return total / weight if weight else math.nan


# -- Monte Carlo -----------------------------------------------------------

def chunk_rngs(seed: int, trials: int, chunk_size: int = CHUNK_SIZE):
    """Yield ``(generator, size)`` per chunk; chunk i is seeded from (seed, i)."""
    for i, start in enumerate(range(0, trials, chunk_size)):
        ss = np.random.SeedSequence(seed, spawn_key=(i,))
        yield np.random.default_rng(ss), min(chunk_size, trials - start)


def simulate_transmissions(
    cb: CodeBook, channel: ChannelModel, rng: np.random.Generator, trials: int
) -> tuple[np.ndarray, np.ndarray]:
    """Uniform random bits and the sampled outcome rows for each."""
    bits = rng.integers(0, 2, size=trials)
    pairs = np.where(bits[:, None, None] == 1, cb.s1.as_array(), cb.s0.as_array())
    return bits, sample_batch(pairs, channel, rng, 2 * cb.n_pairs)


def decode_batch(spins, cb, decoder: Decoder, initial_guess: int) -> np.ndarray:
    if decoder is Decoder.STATISTICAL:
        return decode_statistical_batch(spins, cb)
    return decode_conclusive_batch(spins, cb, initial_guess)[0]


def run_decisions(
    cb: CodeBook,
    channel: ChannelModel,
    decoder: "Decoder | str",
    trials: int,
    seed: int,
    initial_guess: int = DEFAULT_INITIAL_GUESS,
) -> tuple[np.ndarray, np.ndarray]:
    """Sent bits and decision codes for ``trials`` seeded transmissions."""
    decoder = Decoder.parse(decoder)
    all_bits, all_dec = [], []
    for rng, size in chunk_rngs(seed, trials):
        bits, spins = simulate_transmissions(cb, channel, rng, size)
        all_bits.append(bits)
        all_dec.append(decode_batch(spins, cb, decoder, initial_guess))
    return np.concatenate(all_bits), np.concatenate(all_dec)


def binomial_ci_halfwidth(successes: int, trials: int) -> float:
    """95% half-width: normal approximation, Clopper-Pearson for rare events."""
    p = successes / trials
    if min(successes, trials - successes) >= 10:
        return Z95 * math.sqrt(p * (1 - p) / trials)
    lo = stats.beta.ppf(0.025, successes, trials - successes + 1) if successes else 0.0
    hi = (stats.beta.ppf(0.975, successes + 1, trials - successes)
          if successes < trials else 1.0)
    return float(max(p - lo, hi - p))


@dataclass(frozen=True)
class ErrorReport:
    exact_prob: float | None
    closed_form_prob: float | None
    mc_estimate: float
    mc_ci_halfwidth: float
    trials: int
    wrong_bit: int
    ambiguous: int
    inconclusive: int

    @property
    def failures(self) -> int:
        return self.wrong_bit + self.ambiguous + self.inconclusive

    def sigma(self, p: float | None = None) -> float:
        """Binomial standard error at ``p`` (default: the exact value)."""
        if p is None:
            p = self.exact_prob if self.exact_prob is not None else self.mc_estimate
        return math.sqrt(p * (1 - p) / self.trials)

    def to_dict(self) -> dict:
        return asdict(self)


def estimate_error_rate(
    cb: CodeBook,
    channel: ChannelModel,
    decoder: "Decoder | str",
    trials: int,
    seed: int,
    initial_guess: int = DEFAULT_INITIAL_GUESS,
) -> ErrorReport:
    """Monte Carlo failure rate; a failure is a wrong bit, a tie or no decision.

    The exact and closed-form fields are filled for noiseless channels with
    ``N <= 12``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    decoder = Decoder.parse(decoder)
    bits, dec = run_decisions(cb, channel, decoder, trials, seed, initial_guess)
    wrong = int(np.sum((dec < 2) & (dec != bits)))
    ambiguous = int(np.sum(dec == AMBIGUOUS_CODE))
    inconclusive = int(np.sum(dec == INCONCLUSIVE_CODE))
    failures = wrong + ambiguous + inconclusive

    exact = closed = None
    if isinstance(channel, Noiseless) and cb.n_pairs <= MAX_ENUM_PAIRS:
        exact = exact_failure_prob(cb, decoder, initial_guess)
        closed = false_matching_anticorr_prob(cb.cycles)
    return ErrorReport(exact, closed, failures / trials,
                       binomial_ci_halfwidth(failures, trials), trials,
                       wrong, ambiguous, inconclusive)


# -- information measures -----------------------------------------------

def plugin_entropy(samples) -> float:
    """Maximum-likelihood entropy estimate in bits."""
    _, counts = np.unique(np.asarray(samples), return_counts=True)
    p = counts / counts.sum()
    return float(-(p * np.log2(p)).sum())


def plugin_mutual_information(x, y) -> float:
    """Plug-in estimate of I(X; Y) in bits, no bias correction."""
    x, y = np.asarray(x), np.asarray(y)
    joint = np.stack([x, y], axis=1)
    return plugin_entropy(x) + plugin_entropy(y) - _joint_entropy(joint)


def _joint_entropy(rows: np.ndarray) -> float:
    _, counts = np.unique(rows, axis=0, return_counts=True)
    p = counts / counts.sum()
    return float(-(p * np.log2(p)).sum())


def mutual_information_of(joint: np.ndarray) -> float:
    """I(X; Y) in bits of an explicit joint distribution matrix."""
    joint = np.asarray(joint, dtype=float)
    px = joint.sum(axis=1, keepdims=True)
    py = joint.sum(axis=0, keepdims=True)
    nz = joint > 0
    return float((joint[nz] * np.log2(joint[nz] / (px @ py)[nz])).sum())


@dataclass(frozen=True)
class InfoReport:
    source_entropy_bits: float
    mutual_information_bits: float
    sample_count: int


def info_report(
    trials: int,
    cb: CodeBook,
    channel: ChannelModel,
    decoder: "Decoder | str",
    seed: int,
    initial_guess: int = DEFAULT_INITIAL_GUESS,
) -> InfoReport:
    """Empirical source entropy and plug-in I(sent bit; decision).

    Ties and no-decision outcomes are kept as a single third symbol.
    """
    if trials < 100:
        raise ValueError("info_report needs at least 100 trials")
    bits, dec = run_decisions(cb, channel, decoder, trials, seed, initial_guess)
    symbols = np.minimum(dec, 2)
    return InfoReport(plugin_entropy(bits), plugin_mutual_information(bits, symbols),
                      trials)


def exact_mutual_information(
    cb: CodeBook, decoder: "Decoder | str", initial_guess: int = DEFAULT_INITIAL_GUESS
) -> float:
    """I(sent bit; decision) for a noiseless channel, by enumeration."""
    joint = exact_outcome_distribution(cb, decoder, initial_guess)
    merged = np.column_stack([joint[:, 0], joint[:, 1], joint[:, 2] + joint[:, 3]])
    return mutual_information_of(merged)


# -- disturbance -------------------------------------------------------------

def true_pair_anticorr_rate(
    cb: CodeBook, channel: ChannelModel, trials: int, seed: int
) -> float:
    """Fraction of transmitted pairs whose z outcomes are opposite."""
    hits = total = 0
    for rng, size in chunk_rngs(seed, trials):
        bits, spins = simulate_transmissions(cb, channel, rng, size)
        anti0 = spins[:, cb.s0.as_array()[:, 0]] != spins[:, cb.s0.as_array()[:, 1]]
        anti1 = spins[:, cb.s1.as_array()[:, 0]] != spins[:, cb.s1.as_array()[:, 1]]
        hits += int(np.where(bits[:, None] == 1, anti1, anti0).sum())
        total += size * cb.n_pairs
    return hits / total


def disturbance_report(cb: CodeBook, theta: float, trials: int, seed: int) -> float:
    """Monte Carlo true-pair anticorrelation under intercept-resend at ``theta``.

    Compare with :func:`aqc.quantum.intercept_resend_anticorr_exact`.
    """
    if trials < 100:
        raise ValueError("disturbance_report needs at least 100 trials")
    return true_pair_anticorr_rate(cb, InterceptResend(theta), trials, seed)


def disturbance_exact(theta: float) -> float:
    return intercept_resend_anticorr_exact(theta)
