"""Rank-metric signatures from double circulant codes (RVDC and cRVDC)."""

from .errors import (
    DimensionMismatch, IndexOutOfRange, InvalidChallenge, InvalidParams, InvalidRank,
    MalformedSignature, MalformedTranscript, PhaseViolation, RVDCError, Singular,
    StreamExhausted, ZeroInverse,
)
from .field import GF2m
from .matrix import BinMatrix
from .params import CANONICAL, RVDC_96, RVDC_125, RVDC_193, RVDC_252, TOY, ParamSet
from .ring import ChallengeA, DCRing, KeyPair, PublicKey, SecretKey, keygen
from .signature import (
    SCHEME_CRVDC, SCHEME_RVDC, sign, sign_crvdc, sign_rvdc, size_model, verify,
    verify_crvdc, verify_rvdc,
)

__version__ = "0.1.0"
