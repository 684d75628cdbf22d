"""Measurement sampling for transmitted pairings, plus dense-state oracles.

Spins are held as booleans in arrays (``True`` is up).  The public
:class:`Spin` enum is used at the API edges and for serialization.
"""
from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from aqc.codebook import CodeBook, Matching
from aqc.errors import LengthMismatch, TooLarge

MAX_DENSE_PAIRS = 8
# explicit rho @ rho only up to this Hilbert-space dimension
_EXPLICIT_RHO_DIM = 1024


class Spin(str, enum.Enum):
    UP = "U"
    DOWN = "D"

    @classmethod
    def from_bool(cls, up) -> "Spin":
        return cls.UP if up else cls.DOWN


class PairData(str, enum.Enum):
    EPR_DATA = "epr"
    CONCLUSIVE_NON_EPR = "conclusive"


def classify_pair_data(a: Spin, b: Spin) -> PairData:
    """Opposite spins are consistent with a singlet; equal spins rule it out."""
    return PairData.EPR_DATA if a != b else PairData.CONCLUSIVE_NON_EPR


class OutcomeVector:
    """z-spin results for positions ``1..2N`` of one transmission.

    Spins are fixed at construction.  ``measure`` reads a position and
    records it in ``measured_mask``, which only ever gains positions.
    """

    __slots__ = ("_spins", "_mask")

    def __init__(self, spins):
        self._spins = np.array(spins, dtype=bool)
        self._spins.setflags(write=False)
        self._mask = np.zeros(len(self._spins), dtype=bool)

    def __len__(self):
        return len(self._spins)

    def __eq__(self, other):
        if not isinstance(other, OutcomeVector):
            return NotImplemented
        return np.array_equal(self._spins, other._spins)

    def __repr__(self):
        return f"OutcomeVector({self.to_string()!r})"

    @property
    def spins(self) -> np.ndarray:
        return self._spins

    @property
    def measured_mask(self) -> np.ndarray:
        return self._mask.copy()

    def spin(self, position: int) -> Spin:
        return Spin.from_bool(self._spins[position - 1])

    def measure(self, position: int) -> Spin:
        self._mask[position - 1] = True
        return self.spin(position)

    def to_string(self) -> str:
        return "".join("U" if s else "D" for s in self._spins)

    @classmethod
    def from_string(cls, text: str) -> "OutcomeVector":
        text = text.strip()
        if set(text) - {"U", "D"}:
            raise ValueError(f"outcome string may contain only U/D: {text!r}")
        return cls([c == "U" for c in text])


# -- channel models -------------------------------------------------------

@dataclass(frozen=True)
class Noiseless:
    def __str__(self):
        return "noiseless"


@dataclass(frozen=True)
class FlipNoise:
    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"flip probability must lie in [0, 1], got {self.p}")

    def __str__(self):
        return f"flip:{self.p!r}"


@dataclass(frozen=True)
class InterceptResend:
    """Eve measures each true pair at angle ``theta`` from z and resends."""

    theta: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")

    def __str__(self):
        return f"intercept:{self.theta!r}"


ChannelModel = Union[Noiseless, FlipNoise, InterceptResend]

_ANGLE = re.compile(
    r"^\s*(?:(?P<num>[0-9.eE+-]+)\s*\*?\s*)?pi(?:\s*/\s*(?P<den>[0-9.eE+-]+))?\s*$"
)


def parse_angle(text) -> float:
    """Accept a number or a multiple of pi such as ``pi/4`` or ``3*pi/4``."""
    if isinstance(text, (int, float)):
        return float(text)
    m = _ANGLE.match(text)
    if m:
        num = float(m["num"]) if m["num"] else 1.0
        den = float(m["den"]) if m["den"] else 1.0
        return num * math.pi / den
    return float(text)


def parse_channel(text: str) -> ChannelModel:
    """Parse ``noiseless``, ``flip:<p>`` or ``intercept:<theta>``."""
    kind, _, arg = text.strip().partition(":")
    kind = kind.lower()
    try:
        if kind == "noiseless" and not arg:
            return Noiseless()
        if kind == "flip":
            return FlipNoise(float(arg))
        if kind in ("intercept", "intercept-resend"):
            return InterceptResend(parse_angle(arg))
    except ValueError as exc:
        raise ValueError(f"bad channel {text!r}: {exc}") from None
    raise ValueError(f"bad channel {text!r}")


# -- sampling -------------------------------------------------------------

def sample_batch(
    pairs: np.ndarray,
    channel: ChannelModel,
    rng: np.random.Generator,
    n_positions: int,
) -> np.ndarray:
    """Sample z outcomes for a batch of transmissions.

    ``pairs`` holds the 0-based true pairs of every trial, shape
    ``(trials, N, 2)``.  Returns a ``(trials, 2N)`` boolean array.
    """
    trials, n_pairs, _ = pairs.shape
    lo, hi = pairs[..., 0], pairs[..., 1]
    spins = np.empty((trials, n_positions), dtype=bool)

    # which particle of each singlet comes out up (noiseless) or which one
    # Eve finds in the theta-up eigenstate (intercept-resend)
    first_up = rng.random((trials, n_pairs)) < 0.5
    if isinstance(channel, InterceptResend):
        half = channel.theta / 2
        p_up = np.empty((trials, n_positions))
        np.put_along_axis(p_up, lo, np.where(first_up, math.cos(half) ** 2,
                                             math.sin(half) ** 2), axis=1)
        np.put_along_axis(p_up, hi, np.where(first_up, math.sin(half) ** 2,
                                             math.cos(half) ** 2), axis=1)
        return rng.random((trials, n_positions)) < p_up

    np.put_along_axis(spins, lo, first_up, axis=1)
    np.put_along_axis(spins, hi, ~first_up, axis=1)
    if isinstance(channel, FlipNoise):
        spins ^= rng.random((trials, n_positions)) < channel.p
    elif not isinstance(channel, Noiseless):
        raise TypeError(f"unknown channel {channel!r}")
    return spins


def sample_outcome_batch(
    true_matching: Matching,
    channel: ChannelModel,
    rng: np.random.Generator,
    trials: int,
) -> np.ndarray:
    pairs = np.broadcast_to(true_matching.as_array(),
                            (trials, true_matching.n_pairs, 2))
    return sample_batch(pairs, channel, rng, true_matching.n_positions)


def sample_outcomes(
    true_matching: Matching, channel: ChannelModel, rng: np.random.Generator
) -> OutcomeVector:
    return OutcomeVector(sample_outcome_batch(true_matching, channel, rng, 1)[0])


# -- two-qubit oracle -----------------------------------------------------

OUTCOME_LABELS = ("UU", "UD", "DU", "DD")


def basis_state(theta: float, up: bool) -> np.ndarray:
    """Spin eigenstate along the axis at angle ``theta`` from z (x-z plane)."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([c, s] if up else [-s, c], dtype=complex)


@dataclass(frozen=True)
class TwoQubitState:
    """Amplitudes over the basis (up-up, up-down, down-up, down-down)."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(4)
        if abs(np.vdot(amps, amps).real - 1.0) > 1e-12:
            raise ValueError("two-qubit state is not normalized")
        object.__setattr__(self, "amplitudes", amps)


SINGLET = TwoQubitState(np.array([0, 1, -1, 0]) / math.sqrt(2))


@dataclass(frozen=True)
class Product:
    """Product state: particle a along ``theta_a``, particle b along ``theta_b``."""

    theta_a: float
    up_a: bool
    theta_b: float
    up_b: bool

    def state(self) -> TwoQubitState:
        return TwoQubitState(np.kron(basis_state(self.theta_a, self.up_a),
                                     basis_state(self.theta_b, self.up_b)))


def two_qubit_oracle(
    prep: "TwoQubitState | Product", measure_angle: float = 0.0
) -> dict[str, float]:
    """Exact joint outcome distribution for measuring both particles at one angle."""
    state = prep.state() if isinstance(prep, Product) else prep
    out = {}
    for label in OUTCOME_LABELS:
        proj = np.kron(basis_state(measure_angle, label[0] == "U"),
                       basis_state(measure_angle, label[1] == "U"))
        out[label] = float(abs(np.vdot(proj, state.amplitudes)) ** 2)
    return out


def intercept_resend_anticorr_exact(theta: float) -> float:
    """P(z outcomes anticorrelated) for a singlet after intercept-resend at theta."""
    total = 0.0
    for label, p_eve in two_qubit_oracle(SINGLET, theta).items():
        if p_eve == 0.0:
            continue
        resent = Product(theta, label[0] == "U", theta, label[1] == "U")
        dist = two_qubit_oracle(resent, 0.0)
        total += p_eve * (dist["UD"] + dist["DU"])
    return float(total)


# -- full codeword states -------------------------------------------------

def codeword_state(matching: Matching) -> np.ndarray:
    """State vector of the 2N particles, a singlet on every pair.

    Qubit order is position order, position 1 most significant; each
    singlet carries the sign ``|up>_lo |down>_hi - |down>_lo |up>_hi``.
    """
    n = matching.n_pairs
    if n > MAX_DENSE_PAIRS:
        raise TooLarge(f"dense codeword states are limited to N <= {MAX_DENSE_PAIRS}")
    singlet = SINGLET.amplitudes.reshape(2, 2)
    psi = np.ones((), dtype=complex)
    for _ in range(n):
        psi = np.multiply.outer(psi, singlet)
    # axes are currently (lo1, hi1, lo2, hi2, ...); move to position order
    order = [p - 1 for pair in matching.pairs for p in pair]
    psi = np.moveaxis(psi, list(range(2 * n)), order)
    return psi.reshape(-1)


def global_state_purity(matching: Matching) -> float:
    """Tr(rho^2) of the full codeword density matrix."""
    psi = codeword_state(matching)
    if psi.size <= _EXPLICIT_RHO_DIM:
        rho = np.outer(psi, psi.conj())
        return float(np.trace(rho @ rho).real)
    # rho is rank one: Tr(rho^2) = <psi|psi>^2, no need to materialize it
    return float(np.vdot(psi, psi).real ** 2)


def codeword_overlap(cb: CodeBook) -> complex:
    """Inner product <psi(s0)|psi(s1)> of the two codeword states."""
    return complex(np.vdot(codeword_state(cb.s0), codeword_state(cb.s1)))


def check_length(outcomes: OutcomeVector, n_positions: int) -> None:
    if len(outcomes) != n_positions:
        raise LengthMismatch(
            f"outcome vector has {len(outcomes)} positions, codebook has {n_positions}"
        )

