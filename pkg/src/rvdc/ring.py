"""The ring R_k = GF(2^m)[X] / (X^k - p(X)) and double circulant codes.

Ring elements are length-k tuples of field elements, position j holding
the coefficient of X^j.  Codewords of the systematic double circulant code
generated by g are ``(x, x*g)``, a length n = 2k vector.

Rotation conventions.  ``rot(i, x)`` is the literal left rotation
``(x_{i+1}, ..., x_k, x_1, ..., x_i)``, i.e. multiplication by X^(k-i).
A challenge ``a = (alpha_1..alpha_k)`` acts through the binary polynomial
``sum_i alpha_i X^(i mod k)``, so that

    gamma_prime(a, x) = sum_i alpha_i rot(k - i, x)
    gamma(a, y)       = sum_i alpha_i drot(k - i, y)

and both maps are multiplication by the same polynomial, blockwise for
gamma.  With the convolution encoding this makes
``gamma(a, encode(x, g)) == encode(gamma_prime(a, x), g)`` for every a.
"""

from collections import OrderedDict
from dataclasses import dataclass
from functools import cached_property

from . import gf2poly
from . import rankmetric as rm
from .bits import BitReader, BitWriter
from .errors import DimensionMismatch, IndexOutOfRange, InvalidChallenge, MalformedSignature
from .matrix import rank_of


@dataclass(frozen=True)
class ChallengeA:
    """First verifier challenge; ``bits`` holds alpha_1 in bit 0."""

    k: int
    bits: int

    def __post_init__(self):
        if not 0 <= self.bits < (1 << self.k):
            raise InvalidChallenge("challenge has bits beyond k")
        if self.bits == 0 or self.bits == (1 << self.k) - 1:
            raise InvalidChallenge("challenge components must not all be equal")

    @classmethod
    def from_alphas(cls, alphas):
        alphas = list(alphas)
        return cls(len(alphas), sum((a & 1) << i for i, a in enumerate(alphas)))

    @property
    def alphas(self):
        return tuple((self.bits >> i) & 1 for i in range(self.k))

    @property
    def poly(self):
        # alpha_i -> X^(i mod k): bit i-1 moves to bit i, alpha_k wraps to X^0
        k = self.k
        return ((self.bits << 1) | (self.bits >> (k - 1))) & ((1 << k) - 1)

    def to_bytes(self):
        return self.bits.to_bytes((self.k + 7) // 8, "little")


def is_admissible(bits, k):
    return 0 < bits < (1 << k) - 1


class DCRing:
    def __init__(self, field, k, tail=1):
        """``tail`` is the binary polynomial p(X) of the modulus X^k - p(X)."""
        if k < 2:
            raise IndexOutOfRange("ring dimension must be at least 2")
        if gf2poly.degree(tail) >= k:
            raise ValueError("p(X) must have degree below k")
        self.field = field
        self.k = k
        self.n = 2 * k
        self.tail = tail
        self.cyclic = tail == 1
        m = field.m
        self._slot = s = 2 * m - 1
        self._low_k = (1 << (k * s)) - 1
        self._hi_mask = rm.slot_ones(k, s) * ((1 << (s - m)) - 1)
        self._lo_mask = rm.slot_ones(k, s) * field.mask
        self._full_mask = (1 << (k * m)) - 1
        self._multipliers = OrderedDict()
        self._seen = OrderedDict()

    def __repr__(self):
        return f"DCRing({self.field!r}, k={self.k})"

    @cached_property
    def modulus(self):
        return (1 << self.k) ^ self.tail

    @cached_property
    def modulus_factors(self):
        return gf2poly.factor(self.modulus)

    def zero(self):
        return (0,) * self.k

    def one(self):
        return (1,) + (0,) * (self.k - 1)

    def monomial(self, i):
        out = [0] * self.k
        out[i % self.k] = 1
        return tuple(out)

    def sample(self, rng):
        m = self.field.m
        return tuple(rng.getrandbits(m) for _ in range(self.k))

    def add(self, a, b):
        return rm.add(a, b)

    def _check(self, *xs):
        for x in xs:
            if len(x) != self.k:
                raise DimensionMismatch(f"ring element must have {self.k} coefficients")

    def ring_mul(self, a, b):
        """Product in R_k, evaluated as one Kronecker-packed carryless product."""
        self._check(a, b)
        k, m, s = self.k, self.field.m, self._slot
        z = gf2poly.clmul(rm.pack(a, s), rm.pack(b, s))
        if self.cyclic:
            z = (z & self._low_k) ^ (z >> (k * s))
            z = self._reduce_slots(z)
            mask = self.field.mask
            return tuple((z >> (j * s)) & mask for j in range(k))
        coeffs = [self.field.reduce(c) for c in rm.unpack(z, 2 * k - 1, s)]
        return self._fold(coeffs)

    def _reduce_slots(self, z):
        m = self.field.m
        tail_bits = self.field._tail_bits
        lo_mask, hi_mask = self._lo_mask, self._hi_mask
        while True:
            hi = (z >> m) & hi_mask
            if not hi:
                return z
            z &= lo_mask
            for t in tail_bits:
                z ^= hi << t

    def _fold(self, coeffs):
        k = self.k
        tail_terms = [i for i in range(k) if (self.tail >> i) & 1]
        coeffs = list(coeffs)
        for t in range(len(coeffs) - 1, k - 1, -1):
            c = coeffs[t]
            if c:
                for i in tail_terms:
                    coeffs[t - k + i] ^= c
        return tuple(coeffs[:k])

    def poly_mul(self, c, x):
        """Multiply ring element x by the binary polynomial c (an int)."""
        self._check(x)
        k, m = self.k, self.field.m
        if not self.cyclic:
            return self.ring_mul(tuple((c >> i) & 1 for i in range(k)), x)
        packed = rm.pack(x, m)
        full, width = self._full_mask, k * m
        out = 0
        i = 0
        while c:
            if c & 1:
                sh = i * m
                out ^= ((packed << sh) | (packed >> (width - sh))) & full if sh else packed
            c >>= 1
            i += 1
        return rm.unpack(out, k, m)

    def rot(self, i, x):
        self._check(x)
        if not 0 <= i <= self.k:
            raise IndexOutOfRange(f"rotation {i} outside 0..{self.k}")
        i %= self.k
        return tuple(x[i:]) + tuple(x[:i])

    def drot(self, i, y):
        if len(y) != self.n:
            raise DimensionMismatch(f"expected a vector of length {self.n}")
        k = self.k
        return self.rot(i, y[:k]) + self.rot(i, y[k:])

    def gamma_prime(self, a, x):
        if a.k != self.k:
            raise InvalidChallenge("challenge length differs from k")
        return self.poly_mul(a.poly, x)

    def gamma(self, a, y):
        if a.k != self.k:
            raise InvalidChallenge("challenge length differs from k")
        if len(y) != self.n:
            raise DimensionMismatch(f"expected a vector of length {self.n}")
        k = self.k
        return self.poly_mul(a.poly, y[:k]) + self.poly_mul(a.poly, y[k:])

    def mul_fixed(self, x, g):
        """x * g, switching to a precomputed table once g has been seen twice."""
        if not self.cyclic:
            return self.ring_mul(x, g)
        table = self._multipliers.get(g)
        if table is None:
            if g not in self._seen:
                self._seen[g] = None
                if len(self._seen) > 64:
                    self._seen.popitem(last=False)
                return self.ring_mul(x, g)
            self._check(x, g)
            table = self._multipliers[g] = self._build_table(g)
            if len(self._multipliers) > 8:
                self._multipliers.popitem(last=False)
        self._check(x)
        m = self.field.m
        out = 0
        for row, byte in zip(table, rm.pack(x, m).to_bytes(len(table), "little")):
            if byte:
                out ^= row[byte]
        return rm.unpack(out, self.k, m)

    def _build_table(self, g):
        """Byte-window tables of the GF(2)-linear map x -> x*g on packed x."""
        field, k, m = self.field, self.k, self.field.m
        full, width = self._full_mask, k * m
        # X^b * g for every bit position b, packed
        shifted = []
        cur = tuple(g)
        for _ in range(m):
            shifted.append(rm.pack(cur, m))
            cur = tuple(field.reduce(c << 1) for c in cur)
        cols = []
        for i in range(k):
            sh = i * m
            for b in range(m):
                v = shifted[b]
                cols.append(((v << sh) | (v >> (width - sh))) & full if sh else v)
        nbytes = (width + 7) // 8
        cols.extend([0] * (8 * nbytes - width))
        table = []
        for t in range(nbytes):
            row = [0] * 256
            base = cols[8 * t : 8 * t + 8]
            for v in range(1, 256):
                low = v & -v
                row[v] = row[v ^ low] ^ base[low.bit_length() - 1]
            table.append(row)
        return table

    def encode(self, x, g):
        """x . [I_k | circ(g)] = (x, x*g)."""
        return tuple(x) + self.mul_fixed(x, g)

    @cached_property
    def gamma_kernels(self):
        """Bases (as n-bit ints) of the largest kernels of non-invertible gammas.

        Multiplication by an admissible c has kernel equal to the multiples of
        M / gcd(c, M); the maximal ones are the multiples of a single
        irreducible factor f of M, applied to both blocks.
        """
        k = self.k
        all_ones = (1 << k) - 1
        out = []
        for f in sorted(set(self.modulus_factors)):
            if f == self.modulus:
                continue
            cofactor = gf2poly.polydivmod(self.modulus, f)[0]
            if cofactor == all_ones:
                continue
            dim = k - gf2poly.degree(f)
            block = [f << i for i in range(dim)]
            out.append(tuple(block) + tuple(b << k for b in block))
        return out

    def gamma_preserves_rank(self, e, r):
        """True if every admissible gamma maps e to a vector of rank r."""
        _, coords = rm.compress(e, r)
        for kernel in self.gamma_kernels:
            if rank_of(coords.rows + kernel) != r + len(kernel):
                return False
        return True


@dataclass(frozen=True)
class SecretKey:
    x: tuple
    e: tuple


@dataclass(frozen=True)
class PublicKey:
    y: tuple
    g: tuple
    r: int


@dataclass(frozen=True)
class KeyPair:
    sk: SecretKey
    pk: PublicKey


def keygen(ring, r, rng):
    """Fresh key pair: y = (x, x*g) + e with w_R(e) = r.

    Error vectors that some admissible challenge would push below rank r
    are redrawn, so the honest prover passes every weight check.
    """
    field = ring.field
    x = ring.sample(rng)
    while True:
        e = rm.sample_rank_exact(field, ring.n, r, rng)
        if ring.gamma_preserves_rank(e, r):
            break
    g = ring.sample(rng)
    y = rm.add(ring.encode(x, g), e)
    return KeyPair(SecretKey(x, e), PublicKey(y, g, r))


def r_field_bits(r):
    return (r - 1).bit_length() if r > 1 else 0


def secret_key_bytes(params, sk):
    field = params.field
    w = BitWriter()
    rm.write_vector(w, field, sk.x)
    rm.write_vector(w, field, sk.e)
    return params.param_id + w.to_bytes()


def public_key_bytes(params, pk):
    """param id || y || g || (r - 1) in ceil(log2 r) bits."""
    field = params.field
    w = BitWriter()
    rm.write_vector(w, field, pk.y)
    rm.write_vector(w, field, pk.g)
    w.write(pk.r - 1, r_field_bits(params.r))
    return params.param_id + w.to_bytes()


def _strip_header(params, data, what):
    data = bytes(data)
    if len(data) < 4:
        raise MalformedSignature(f"{what} too short for the parameter header", len(data))
    if data[:4] != params.param_id:
        raise MalformedSignature(f"{what} was made for a different parameter set", 0)
    return data[4:]


def secret_key_from_bytes(params, data):
    body = _strip_header(params, data, "secret key")
    reader = BitReader(body, base_offset=4)
    field = params.field
    x = rm.read_vector(reader, field, params.k)
    e = rm.read_vector(reader, field, params.n)
    reader.finish()
    return SecretKey(x, e)


def public_key_from_bytes(params, data):
    body = _strip_header(params, data, "public key")
    reader = BitReader(body, base_offset=4)
    field = params.field
    y = rm.read_vector(reader, field, params.n)
    g = rm.read_vector(reader, field, params.k)
    r = reader.read(r_field_bits(params.r)) + 1
    reader.finish()
    return PublicKey(y, g, r)
