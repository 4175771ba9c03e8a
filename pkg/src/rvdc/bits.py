"""Little-endian bit packing and SHAKE256-backed bit streams.

Bit ``t`` of a packed stream lives in byte ``t // 8`` at position ``t % 8``.
Every wire format in the package is built from these two classes.
"""

import hashlib
import os

from .errors import MalformedSignature, StreamExhausted


class BitWriter:
    def __init__(self):
        self._chunks = []
        self.nbits = 0

    def write(self, value, nbits):
        if nbits == 0:
            return
        if value >> nbits:
            raise ValueError(f"value does not fit in {nbits} bits")
        self._chunks.append(format(value, f"0{nbits}b")[::-1])
        self.nbits += nbits

    def write_bytes(self, data):
        self.write(int.from_bytes(data, "little"), 8 * len(data))

    def to_bytes(self):
        s = "".join(self._chunks)[::-1]
        return (int(s, 2) if s else 0).to_bytes((self.nbits + 7) // 8, "little")


class BitReader:
    """Sequential reader over a finite byte string.

    Reading past the end raises :class:`MalformedSignature` carrying the
    byte offset, so parsers never crash on truncated input.
    """

    def __init__(self, data, base_offset=0):
        self._data = bytes(data)
        self._s = format(int.from_bytes(self._data, "little"), f"0{8 * len(self._data)}b")[::-1]
        self.pos = 0
        self.base_offset = base_offset

    @property
    def nbits(self):
        return len(self._s)

    def remaining(self):
        return len(self._s) - self.pos

    def read(self, nbits):
        if nbits == 0:
            return 0
        end = self.pos + nbits
        if end > len(self._s):
            raise MalformedSignature("input truncated", self.base_offset + self.pos // 8)
        value = int(self._s[self.pos:end][::-1], 2)
        self.pos = end
        return value

    def read_bits(self, nbits):
        try:
            return self.read(nbits)
        except MalformedSignature as exc:
            raise StreamExhausted(str(exc)) from None

    def read_bytes(self, nbytes):
        return self.read(8 * nbytes).to_bytes(nbytes, "little")

    def finish(self):
        """Check that only zero padding (< 8 bits) remains."""
        rest = self.remaining()
        if rest >= 8:
            raise MalformedSignature("trailing data", self.base_offset + self.pos // 8)
        if rest and self.read(rest):
            raise MalformedSignature("nonzero padding bits", self.base_offset + (self.pos - 1) // 8)


class XofStream:
    """Unbounded bit stream SHAKE256(seed), read sequentially.

    Also serves as the package's random number generator: it exposes
    ``getrandbits`` so it can stand in wherever ``random.Random`` would.
    """

    def __init__(self, seed=None):
        if seed is None:
            seed = os.urandom(32)
        self._shake = hashlib.shake_256(bytes(seed))
        self._buf = b""
        self.pos = 0

    def _ensure(self, nbytes):
        if nbytes > len(self._buf):
            self._buf = self._shake.digest(max(nbytes, 2 * len(self._buf), 256))

    def read_bits(self, nbits):
        if nbits == 0:
            return 0
        start, end = self.pos, self.pos + nbits
        lo, hi = start >> 3, (end + 7) >> 3
        self._ensure(hi)
        value = int.from_bytes(self._buf[lo:hi], "little") >> (start & 7)
        self.pos = end
        return value & ((1 << nbits) - 1)

    getrandbits = read_bits

    def randbelow(self, n):
        if n <= 0:
            raise ValueError("upper bound must be positive")
        k = n.bit_length()
        while True:
            v = self.read_bits(k)
            if v < n:
                return v

    def bytes(self, nbytes):
        return self.read_bits(8 * nbytes).to_bytes(nbytes, "little")


def bits_from_list(bits):
    """A finite stream over an explicit bit sequence (mainly for tests)."""
    w = BitWriter()
    for b in bits:
        w.write(b & 1, 1)
    reader = BitReader(w.to_bytes())
    reader._s = reader._s[: w.nbits]
    return reader
