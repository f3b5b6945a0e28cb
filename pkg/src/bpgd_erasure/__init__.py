"""Erasure decoding of CSS quantum LDPC codes with BP and guided decimation."""

__version__ = "0.1.0"

from .bp import BpConfig, BpState, DecodeResult, Status, bp_decode, bp_run, bpgd_decode
from .channel import ErasureInstance, sample_instance, syndrome_of
from .codes import (
    CodeFormatError,
    CodeValidationError,
    CssCode,
    LiftedBase,
    Side,
    TannerGraph,
    bundled_code,
    hgp,
    lifted_product,
    load_code,
    resolve_code,
    steane_code,
)
from .combinatorial import Outcome, classify, ml_erasure_outcome, peel_decode, pruned_peel_decode
from .gf2 import BitMatrix, BitVector
from .harness import DecoderConfig, PointStats, SweepSpec, confidence_interval, emit, run_sweep

__all__ = [
    "BitMatrix", "BitVector", "BpConfig", "BpState", "CodeFormatError", "CodeValidationError",
    "CssCode", "DecodeResult", "DecoderConfig", "ErasureInstance", "LiftedBase", "Outcome",
    "PointStats", "Side", "Status", "SweepSpec", "TannerGraph", "bp_decode", "bp_run",
    "bpgd_decode", "bundled_code", "classify", "confidence_interval", "emit", "hgp",
    "lifted_product", "load_code", "ml_erasure_outcome", "peel_decode", "pruned_peel_decode",
    "resolve_code", "run_sweep", "sample_instance", "steane_code", "syndrome_of",
]
