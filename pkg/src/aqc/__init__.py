"""Simulator for bit encoding by two disjoint arrangements of EPR singlet pairs."""

from aqc.codebook import (
    CodeBook,
    Matching,
    Pair,
    Strategy,
    cycle_decomposition,
    format_letter_sequence,
    generate_codebook,
    parse_letter_sequence,
    reference_codebook,
    validate_codebook,
)
from aqc.protocol import (
    Decision,
    DecodeResult,
    decode_conclusive,
    decode_statistical,
    encode,
    transmit,
)
from aqc.quantum import (
    FlipNoise,
    InterceptResend,
    Noiseless,
    OutcomeVector,
    Spin,
    parse_channel,
    sample_outcomes,
)

__version__ = "0.1.0"
