"""Arithmetic in GF(2^m) over the polynomial basis 1, X, ..., X^(m-1).

Field elements are plain Python ints in ``[0, 2^m)``; bit ``i`` is the
coefficient of ``X^i``.  A :class:`GF2m` instance carries the modulus and
every operation, in the style of ``gf.mul(a, b)``.
"""

from functools import cached_property

from . import gf2poly
from .errors import IndexOutOfRange, InvalidParams, ZeroInverse

# Minimal-weight irreducible trinomials for the production extension degrees.
DEFAULT_MODULI = {
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: (1 << 5) | (1 << 2) | 1,
    29: (1 << 29) | (1 << 2) | 1,
    31: (1 << 31) | (1 << 3) | 1,
    41: (1 << 41) | (1 << 3) | 1,
    47: (1 << 47) | (1 << 5) | 1,
}


def find_irreducible(m):
    """Lowest-weight irreducible of degree m: first trinomial, else first pentanomial."""
    top = (1 << m) | 1
    for t in range(1, m):
        if gf2poly.is_irreducible(top | (1 << t)):
            return top | (1 << t)
    for a in range(1, m):
        for b in range(a + 1, m):
            for c in range(b + 1, m):
                f = top | (1 << a) | (1 << b) | (1 << c)
                if gf2poly.is_irreducible(f):
                    return f
    raise InvalidParams(f"no irreducible polynomial of degree {m} found")


class GF2m:
    """The field GF(2^m) defined by an irreducible ``reduction`` polynomial."""

    def __init__(self, m, reduction=None):
        if m < 1:
            raise InvalidParams("extension degree must be positive")
        if reduction is None:
            reduction = DEFAULT_MODULI.get(m) or find_irreducible(m)
        if gf2poly.degree(reduction) != m or not reduction & 1:
            raise InvalidParams("reduction polynomial must have degree m and constant term 1")
        if not gf2poly.is_irreducible(reduction):
            raise InvalidParams(f"{gf2poly.poly_str(reduction)} is reducible over GF(2)")
        self.m = m
        self.reduction = reduction
        self.order = 1 << m
        self.mask = self.order - 1
        self.nbytes = (m + 7) // 8
        # X^m = tail(X) mod reduction
        self._tail = reduction ^ (1 << m)
        self._tail_bits = [i for i in range(m) if (self._tail >> i) & 1]

    def __repr__(self):
        return f"GF2m({self.m}, {gf2poly.poly_str(self.reduction)})"

    def __eq__(self, other):
        return isinstance(other, GF2m) and (self.m, self.reduction) == (other.m, other.reduction)

    def __hash__(self):
        return hash((self.m, self.reduction))

    zero = 0
    one = 1

    def add(self, a, b):
        return a ^ b

    sub = add

    def reduce(self, a):
        m, mask = self.m, self.mask
        while a >> m:
            hi = a >> m
            a &= mask
            for t in self._tail_bits:
                a ^= hi << t
        return a

    def mul(self, a, b):
        return self.reduce(gf2poly.clmul(a, b))

    def square(self, a):
        return self.reduce(gf2poly.spread(a, 2))

    def pow(self, a, e):
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.square(a)
            e >>= 1
        return result

    def inv(self, a):
        if a == 0:
            raise ZeroInverse("zero has no multiplicative inverse")
        return gf2poly.xgcd_inverse(a, self.reduction)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def sample(self, rng):
        return rng.getrandbits(self.m)

    def basis_element(self, i):
        """The i-th basis element (1-based): X^(i-1)."""
        if not 1 <= i <= self.m:
            raise IndexOutOfRange(f"basis index {i} outside 1..{self.m}")
        return 1 << (i - 1)

    def to_bits(self, a):
        return [(a >> i) & 1 for i in range(self.m)]

    def from_bits(self, bits):
        bits = list(bits)
        if len(bits) != self.m:
            raise IndexOutOfRange(f"expected {self.m} bits, got {len(bits)}")
        return sum(b << i for i, b in enumerate(bits))

    def to_bytes(self, a):
        return a.to_bytes(self.nbytes, "little")

    def from_bytes(self, data):
        a = int.from_bytes(data, "little")
        if len(data) != self.nbytes or a >> self.m:
            raise ValueError("not a canonical field element encoding")
        return a

    @cached_property
    def is_prime_degree(self):
        m = self.m
        return m >= 2 and all(m % d for d in range(2, int(m**0.5) + 1))
