"""Hash and XOF instantiation with call accounting.

Commitment and challenge evaluations go through :meth:`HashSuite.digest`,
:meth:`HashSuite.xof` or :meth:`HashSuite.challenge_stream` and are counted
in ``calls``.  Seed and randomness expansion (:meth:`HashSuite.expand`) is
not a commitment and is left out of the count.
"""

import hashlib
import threading

from .bits import XofStream
from .errors import InvalidParams

PREFIX_CHALLENGE = b"\x00"
PREFIX_P = b"\x01"
PREFIX_Q = b"\x02"

# Hash profile ids, part of the parameter-set identifier.
PROFILE_SHA2 = 0
PROFILE_LEGACY_SHA1 = 1

# Challenge-1 derivation modes.
MODE_XOF = 0
MODE_CHUNKED = 1


def _sha2_for(h):
    if h <= 256:
        return hashlib.sha256
    if h <= 384:
        return hashlib.sha384
    if h <= 512:
        return hashlib.sha512
    raise InvalidParams(f"no fixed-digest hash with {h} output bits")


class HashSuite:
    def __init__(self, h, profile=PROFILE_SHA2):
        if h % 8:
            raise InvalidParams("digest length must be a whole number of bytes")
        if profile == PROFILE_LEGACY_SHA1:
            if h != 160:
                raise InvalidParams("the SHA-1 profile only provides 160-bit digests")
            self._fn = hashlib.sha1
        elif profile == PROFILE_SHA2:
            self._fn = _sha2_for(h)
        else:
            raise InvalidParams(f"unknown hash profile {profile}")
        self.h = h
        self.nbytes = h // 8
        self.profile = profile
        self.calls = 0
        self._lock = threading.Lock()

    def reset_counter(self):
        self.calls = 0

    def _count(self):
        with self._lock:
            self.calls += 1

    def digest(self, *parts):
        """Fixed-length hash H(part1 || part2 || ...) truncated to h bits."""
        self._count()
        return self._fn(b"".join(parts)).digest()[: self.nbytes]

    def xof(self, nbits, *parts):
        """SHAKE256 output truncated to ``nbits`` (a multiple of 8)."""
        self._count()
        return hashlib.shake_256(b"".join(parts)).digest(nbits // 8)

    def challenge_stream(self, *parts):
        self._count()
        return XofStream(PREFIX_CHALLENGE + b"".join(parts))

    def chunked_stream(self, *parts):
        """Concatenation H(data || 1) || H(data || 2) || ... as a bit stream."""
        return _ChunkedStream(self, b"".join(parts))

    @staticmethod
    def expand(*parts):
        return XofStream(b"".join(parts))


class _ChunkedStream:
    def __init__(self, suite, data):
        self._suite = suite
        self._data = data
        self._buf = b""
        self._counter = 0
        self.pos = 0

    def read_bits(self, nbits):
        end = self.pos + nbits
        while 8 * len(self._buf) < end:
            self._counter += 1
            self._buf += self._suite.digest(self._data, self._counter.to_bytes(4, "little"))
        lo, hi = self.pos >> 3, (end + 7) >> 3
        value = int.from_bytes(self._buf[lo:hi], "little") >> (self.pos & 7)
        self.pos = end
        return value & ((1 << nbits) - 1)
