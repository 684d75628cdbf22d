"""Alice's encoder, Bob's two decoders and per-transmission transcripts."""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import numpy as np

from aqc.codebook import CodeBook, Matching
from aqc.quantum import (
    ChannelModel,
    OutcomeVector,
    PairData,
    check_length,
    classify_pair_data,
    parse_channel,
    sample_outcomes,
)

DEFAULT_INITIAL_GUESS = 1


class Decision(str, enum.Enum):
    ZERO = "0"
    ONE = "1"
    AMBIGUOUS = "ambiguous"
    INCONCLUSIVE = "inconclusive"

    @classmethod
    def of_bit(cls, bit: int) -> "Decision":
        return cls.ONE if bit else cls.ZERO

    @property
    def bit(self) -> int | None:
        return {"0": 0, "1": 1}.get(self.value)


@dataclass(frozen=True)
class DecodeResult:
    decision: Decision
    pairs_examined: int
    particles_examined: int
    anticorr_counts: tuple[int, int]


def encode(bit: int, cb: CodeBook) -> Matching:
    """The arrangement Alice transmits for ``bit``."""
    if bit not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {bit!r}")
    return cb.matching(bit)


def _anticorr_count(outcomes: OutcomeVector, m: Matching) -> int:
    return sum(
        classify_pair_data(outcomes.measure(lo), outcomes.measure(hi))
        is PairData.EPR_DATA
        for lo, hi in m.pairs
    )


def decode_statistical(outcomes: OutcomeVector, cb: CodeBook) -> DecodeResult:
    """Pick the matching under which more pairs look like singlets."""
    check_length(outcomes, 2 * cb.n_pairs)
    c0 = _anticorr_count(outcomes, cb.s0)
    c1 = _anticorr_count(outcomes, cb.s1)
    if c0 == c1:
        decision = Decision.AMBIGUOUS
    else:
        decision = Decision.of_bit(int(c1 > c0))
    return DecodeResult(decision, 2 * cb.n_pairs, len(outcomes), (c0, c1))


def examination_order(cb: CodeBook, initial_guess: int) -> list[tuple[int, int]]:
    """Sequence of ``(guess, pair index)`` steps taken by the conclusive decoder.

    Under guess ``b`` the decoder tests the next pair of ``s_{1-b}``; the
    guess alternates after every inconclusive test.
    """
    steps = []
    for i in range(cb.n_pairs):
        steps.append((initial_guess, i))
        steps.append((1 - initial_guess, i))
    return steps


def decode_conclusive(
    outcomes: OutcomeVector, cb: CodeBook, initial_guess: int = DEFAULT_INITIAL_GUESS
) -> DecodeResult:
    """Alternating-guess decoder that stops on the first equal-spin pair.

    Equal spins on a pair of ``s_m`` cannot come from a singlet, so ``s_m``
    was not sent and the bit is ``1 - m``.
    """
    check_length(outcomes, 2 * cb.n_pairs)
    seen: set[int] = set()
    # anticorrelated pairs observed so far, indexed by matching
    counts = [0, 0]
    for step, (guess, i) in enumerate(examination_order(cb, initial_guess), start=1):
        lo, hi = cb.matching(1 - guess).pairs[i]
        seen.update((lo, hi))
        data = classify_pair_data(outcomes.measure(lo), outcomes.measure(hi))
        if data is PairData.CONCLUSIVE_NON_EPR:
            return DecodeResult(Decision.of_bit(guess), step, len(seen), tuple(counts))
        counts[1 - guess] += 1
    return DecodeResult(Decision.INCONCLUSIVE, 2 * cb.n_pairs, len(seen), tuple(counts))


# -- vectorized decoders for Monte Carlo ----------------------------------
# Integer codes: 0/1 are bits, AMBIGUOUS_CODE / INCONCLUSIVE_CODE failures.

AMBIGUOUS_CODE = 2
INCONCLUSIVE_CODE = 3


def _pair_anticorr(spins: np.ndarray, m: Matching) -> np.ndarray:
    idx = m.as_array()
    return spins[:, idx[:, 0]] != spins[:, idx[:, 1]]


def decode_statistical_batch(spins: np.ndarray, cb: CodeBook) -> np.ndarray:
    c0 = _pair_anticorr(spins, cb.s0).sum(axis=1)
    c1 = _pair_anticorr(spins, cb.s1).sum(axis=1)
    return np.where(c0 == c1, AMBIGUOUS_CODE, (c1 > c0).astype(np.int64))


def decode_conclusive_batch(
    spins: np.ndarray, cb: CodeBook, initial_guess: int = DEFAULT_INITIAL_GUESS
) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(decision codes, pairs_examined)`` for every row of ``spins``."""
    order = examination_order(cb, initial_guess)
    guesses = np.array([g for g, _ in order])
    tested = np.array([cb.matching(1 - g).pairs[i] for g, i in order]) - 1
    conclusive = spins[:, tested[:, 0]] == spins[:, tested[:, 1]]
    hit = conclusive.any(axis=1)
    first = conclusive.argmax(axis=1)
    decision = np.where(hit, guesses[first], INCONCLUSIVE_CODE)
    pairs_examined = np.where(hit, first + 1, len(order))
    return decision, pairs_examined


def decision_code(d: Decision) -> int:
    if d.bit is not None:
        return d.bit
    return AMBIGUOUS_CODE if d is Decision.AMBIGUOUS else INCONCLUSIVE_CODE


# -- transcripts ------------------------------------------------------------

@dataclass(frozen=True)
class Transcript:
    codebook: CodeBook
    bit: int
    channel: ChannelModel
    seed: int
    outcomes: OutcomeVector
    statistical: DecodeResult
    conclusive: DecodeResult

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "bit": self.bit,
            "channel": str(self.channel),
            "outcomes": self.outcomes.to_string(),
            "statistical": {
                "decision": self.statistical.decision.value,
                "counts": list(self.statistical.anticorr_counts),
            },
            "conclusive": {
                "decision": self.conclusive.decision.value,
                "pairs_examined": self.conclusive.pairs_examined,
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict()) + "\n"


def transmit(
    cb: CodeBook,
    bit: int,
    channel: ChannelModel,
    seed: int,
    initial_guess: int = DEFAULT_INITIAL_GUESS,
) -> Transcript:
    """Encode, sample Bob's measurements and run both decoders."""
    rng = np.random.default_rng(seed)
    outcomes = sample_outcomes(encode(bit, cb), channel, rng)
    # decoders record reads in the mask; each works on its own copy
    stat = decode_statistical(OutcomeVector(outcomes.spins), cb)
    concl = decode_conclusive(OutcomeVector(outcomes.spins), cb, initial_guess)
    return Transcript(cb, bit, channel, seed, outcomes, stat, concl)


def replay(cb: CodeBook, record: dict, initial_guess: int = DEFAULT_INITIAL_GUESS) -> Transcript:
    """Re-run a serialized transcript record from its seed."""
    return transmit(cb, int(record["bit"]), parse_channel(record["channel"]),
                     int(record["seed"]), initial_guess)
