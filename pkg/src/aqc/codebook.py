"""Pairing sequences (perfect matchings) and the two-sequence codebook.

Positions are 1-based throughout: a matching on ``N`` pairs covers the
positions ``1..2N``.  A pair is stored as ``(lo, hi)`` with ``lo < hi`` and
the pairs of a matching are kept sorted by ``lo``.
"""
from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from aqc.errors import (
    EmptySequence,
    InvalidMatching,
    LabelCountError,
    OddLength,
    OverlapError,
    RetryExhausted,
    SizeMismatch,
    TooSmall,
)

DEFAULT_RETRY_CAP = 1000

_TOKEN_SPLIT = re.compile(r"[\s,]+")


class Pair(NamedTuple):
    lo: int
    hi: int

    @classmethod
    def of(cls, a: int, b: int) -> "Pair":
        a, b = int(a), int(b)
        if a == b:
            raise InvalidMatching(f"pair joins position {a} to itself")
        return cls(min(a, b), max(a, b))


@dataclass(frozen=True)
class Matching:
    """A perfect matching on positions ``1..2N``."""

    pairs: tuple[Pair, ...]

    def __post_init__(self):
        pairs = tuple(sorted(Pair.of(*p) for p in self.pairs))
        if not pairs:
            raise InvalidMatching("a matching needs at least one pair")
        seen = sorted(x for p in pairs for x in p)
        if seen != list(range(1, 2 * len(pairs) + 1)):
            raise InvalidMatching(
                f"pairs do not cover positions 1..{2 * len(pairs)} exactly once"
            )
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def from_pairs(cls, pairs: Iterable[Iterable[int]]) -> "Matching":
        return cls(tuple(Pair.of(*p) for p in pairs))

    @property
    def n_pairs(self) -> int:
        return len(self.pairs)

    @property
    def n_positions(self) -> int:
        return 2 * len(self.pairs)

    def partner(self) -> dict[int, int]:
        """Map every position to the position it is paired with."""
        out = {}
        for lo, hi in self.pairs:
            out[lo] = hi
            out[hi] = lo
        return out

    def as_array(self) -> np.ndarray:
        """Pairs as an ``(N, 2)`` array of 0-based indices."""
        return np.asarray(self.pairs, dtype=np.intp) - 1

    def to_list(self) -> list[list[int]]:
        return [[lo, hi] for lo, hi in self.pairs]

    def __str__(self) -> str:
        return format_letter_sequence(self)


@dataclass(frozen=True)
class CycleDecomposition:
    """Half-lengths of the alternating cycles of the union of two matchings."""

    half_lengths: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "half_lengths", tuple(sorted(self.half_lengths, reverse=True))
        )


@dataclass(frozen=True)
class CodeBook:
    """The shared secret: two edge-disjoint matchings ``s0`` and ``s1``.

    Build through :func:`validate_codebook` so the invariants are checked.
    """

    s0: Matching
    s1: Matching
    cycles: tuple[int, ...] = field(default=())

    @property
    def n_pairs(self) -> int:
        return self.s0.n_pairs

    def matching(self, bit: int) -> Matching:
        return self.s1 if bit else self.s0

    def to_dict(self) -> dict:
        return {
            "n_pairs": self.n_pairs,
            "s0": self.s0.to_list(),
            "s1": self.s1.to_list(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict()) + "\n"

    @classmethod
    def from_dict(cls, doc: dict) -> "CodeBook":
        try:
            n_pairs = int(doc["n_pairs"])
            s0 = Matching.from_pairs(doc["s0"])
            s1 = Matching.from_pairs(doc["s1"])
        except (KeyError, TypeError) as exc:
            raise InvalidMatching(f"malformed codebook document: {exc!r}") from exc
        cb = validate_codebook(s0, s1)
        if cb.n_pairs != n_pairs:
            raise SizeMismatch(
                f"n_pairs field says {n_pairs}, matchings have {cb.n_pairs}"
            )
        return cb

    @classmethod
    def from_json(cls, text: str) -> "CodeBook":
        return cls.from_dict(json.loads(text))


# -- letter notation ------------------------------------------------------

def parse_letter_sequence(text: str) -> Matching:
    """Parse a letter sequence such as ``"A B B C D A"`` into a matching.

    Tokens are separated by whitespace and/or commas; surrounding braces are
    ignored.  Positions that carry the same label form one pair.
    """
    body = text.strip().strip("{}").strip()
    tokens = [t for t in _TOKEN_SPLIT.split(body) if t]
    if not tokens:
        raise EmptySequence("letter sequence is empty")
    if len(tokens) % 2:
        raise OddLength(f"{len(tokens)} tokens; a pairing needs an even count")
    positions: dict[str, list[int]] = {}
    for pos, tok in enumerate(tokens, start=1):
        positions.setdefault(tok, []).append(pos)
    bad = {k: len(v) for k, v in positions.items() if len(v) != 2}
    if bad:
        label, count = next(iter(bad.items()))
        raise LabelCountError(f"label {label!r} occurs {count} time(s), expected 2")
    return Matching.from_pairs(positions.values())


def letter_label(index: int) -> str:
    """Spreadsheet-style label: 0 -> A, 25 -> Z, 26 -> AA, ..."""
    out = ""
    index += 1
    while index:
        index, rem = divmod(index - 1, 26)
        out = chr(ord("A") + rem) + out
    return out


def format_letter_sequence(m: Matching) -> str:
    """Render a matching as letters, labelled in first-occurrence order."""
    tokens = [""] * m.n_positions
    # pairs are sorted by lo, which is exactly first-occurrence order
    for i, (lo, hi) in enumerate(m.pairs):
        tokens[lo - 1] = tokens[hi - 1] = letter_label(i)
    return " ".join(tokens)


# -- validation and structure --------------------------------------------

def _alternating_cycles(s0: Matching, s1: Matching) -> list[int]:
    p0, p1 = s0.partner(), s1.partner()
    unvisited = set(p0)
    halves = []
    while unvisited:
        start = min(unvisited)
        pos, k = start, 0
        while True:
            unvisited.discard(pos)
            nxt = p0[pos]
            unvisited.discard(nxt)
            pos = p1[nxt]
            k += 1
            if pos == start:
                break
        halves.append(k)
    return halves


def validate_codebook(s0: Matching, s1: Matching) -> CodeBook:
    """Check that ``s0`` and ``s1`` form a usable codebook and return it."""
    if s0.n_pairs != s1.n_pairs:
        raise SizeMismatch(f"s0 has {s0.n_pairs} pairs, s1 has {s1.n_pairs}")
    if s0.n_pairs < 2:
        raise TooSmall("two disjoint perfect matchings need at least 4 positions")
    in_s1 = set(s1.pairs)
    for pair in s0.pairs:
        if pair in in_s1:
            raise OverlapError(pair)
    return CodeBook(s0, s1, tuple(sorted(_alternating_cycles(s0, s1), reverse=True)))


def cycle_decomposition(s0: Matching, s1: Matching) -> CycleDecomposition:
    return CycleDecomposition(validate_codebook(s0, s1).cycles)


# -- generation ----------------------------------------------------------

class Strategy(str, enum.Enum):
    CYCLIC = "cyclic"
    REJECTION_UNIFORM = "rejection"

    @classmethod
    def parse(cls, text: "str | Strategy") -> "Strategy":
        if isinstance(text, Strategy):
            return text
        key = text.strip().lower().replace("_", "-")
        aliases = {"cyclic": cls.CYCLIC, "rejection": cls.REJECTION_UNIFORM,
                   "rejection-uniform": cls.REJECTION_UNIFORM,
                   "rejectionuniform": cls.REJECTION_UNIFORM,
                   "uniform": cls.REJECTION_UNIFORM}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown strategy {text!r}") from None


def random_matching(n_pairs: int, rng: np.random.Generator) -> Matching:
    """Uniformly random perfect matching on ``1..2*n_pairs``."""
    perm = rng.permutation(2 * n_pairs) + 1
    return Matching.from_pairs(perm.reshape(-1, 2).tolist())


def generate_codebook(
    n_pairs: int,
    rng: np.random.Generator,
    strategy: "Strategy | str" = Strategy.CYCLIC,
    max_attempts: int = DEFAULT_RETRY_CAP,
) -> CodeBook:
    strategy = Strategy.parse(strategy)
    if n_pairs < 2:
        raise TooSmall("two disjoint perfect matchings need at least 4 positions")

    if strategy is Strategy.CYCLIC:
        ring = (rng.permutation(2 * n_pairs) + 1).tolist()
        s0 = [(ring[2 * i], ring[2 * i + 1]) for i in range(n_pairs)]
        s1 = [(ring[2 * i + 1], ring[(2 * i + 2) % (2 * n_pairs)])
              for i in range(n_pairs)]
        return validate_codebook(Matching.from_pairs(s0), Matching.from_pairs(s1))

    for _ in range(max_attempts):
        s0 = random_matching(n_pairs, rng)
        s1 = random_matching(n_pairs, rng)
        if not set(s0.pairs) & set(s1.pairs):
            return validate_codebook(s0, s1)
    raise RetryExhausted(f"no disjoint pair of matchings in {max_attempts} attempts")


REFERENCE_S1 = "A B B C D A E F E F C D"
REFERENCE_S0 = "B A D C D A E E F F B C"


def reference_codebook() -> CodeBook:
    """The 12-position reference code (cycle half-lengths 4 and 2)."""
    s1 = parse_letter_sequence(REFERENCE_S1)
    s0 = parse_letter_sequence(REFERENCE_S0)
    return validate_codebook(s0, s1)
