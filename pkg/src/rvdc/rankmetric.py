"""Vectors over GF(2^m) under the rank metric.

A vector of length n is a tuple of field elements (ints).  Its matrix
expansion phi(v) is the m x n binary matrix whose column j holds the
coefficients of v_j; the rank weight is the GF(2) rank of that matrix.

Several maps are evaluated on a *packed* form in which coordinate j
occupies bits ``[j*m, (j+1)*m)`` of a single int, so that one big-int
operation acts on all coordinates at once.
"""

from functools import lru_cache

from .bits import BitWriter
from .errors import DimensionMismatch, InvalidRank
from .gf2poly import spread
from .matrix import BinMatrix, rank_of


@lru_cache(maxsize=None)
def slot_ones(n, width):
    return spread((1 << n) - 1, width)


def pack(v, width):
    out = 0
    for j, x in enumerate(v):
        out |= x << (j * width)
    return out


def unpack(packed, n, width):
    mask = (1 << width) - 1
    return tuple((packed >> (j * width)) & mask for j in range(n))


def expand_phi(field, v):
    return BinMatrix.from_columns(v, field.m)


def collapse_phi(field, mat):
    if mat.nrows != field.m:
        raise DimensionMismatch(f"expected {field.m} rows, got {mat.nrows}")
    return tuple(mat.columns)


def rank_weight(v):
    # column rank of phi(v) equals its row rank
    return rank_of(v)


def add(u, v):
    if len(u) != len(v):
        raise DimensionMismatch("vector lengths differ")
    return tuple(a ^ b for a, b in zip(u, v))


def scale(field, c, v):
    return tuple(field.mul(c, x) for x in v)


def _spread_rows(p, width):
    cache = p.__dict__.setdefault("_spread_rows", {})
    rows = cache.get(width)
    if rows is None:
        rows = cache[width] = tuple(spread(r, width) for r in p.rows)
    return rows


def pi_map(field, p, q, v):
    """phi^-1(Q . phi(v) . P)."""
    m, n = field.m, len(v)
    if p.nrows != n or p.ncols != n or q.nrows != m or q.ncols != m:
        raise DimensionMismatch("P must be n x n and Q must be m x m")
    ones = slot_ones(n, m)
    packed = pack(v, m)
    qv = 0
    for i, qcol in enumerate(q.columns):
        plane = (packed >> i) & ones
        if plane and qcol:
            qv ^= plane * qcol
    mask = field.mask
    out = 0
    for j, sp in enumerate(_spread_rows(p, m)):
        w = (qv >> (j * m)) & mask
        if w and sp:
            out ^= w * sp
    return unpack(out, n, m)


def pi_inverse(field, p, q, v):
    return pi_map(field, p.inverse(), q.inverse(), v)


def combine(field, basis, coords):
    """Vector whose coordinate j is sum_s coords[s, j] * basis[s]."""
    out = 0
    for b, row in zip(basis, coords.rows):
        if b and row:
            out ^= b * spread(row, field.m)
    return unpack(out, coords.ncols, field.m)


def sample_rank_exact(field, n, r, rng):
    """A random vector of rank weight exactly r, built as phi^-1(U . V).

    U is m x r (its columns are r independent field elements spanning the
    support) and V is r x n; both are drawn full rank by rejection.
    """
    if not 1 <= r <= min(field.m, n):
        raise InvalidRank(f"rank {r} outside 1..{min(field.m, n)}")
    while True:
        basis = tuple(field.sample(rng) for _ in range(r))
        if rank_of(basis) == r:
            break
    while True:
        coords = BinMatrix(r, n, tuple(rng.getrandbits(n) for _ in range(r)))
        if coords.rank() == r:
            break
    return combine(field, basis, coords)


def compress(v, r):
    """Factor a rank-r vector as (support basis, r x n coordinate matrix).

    The basis is the first r linearly independent coordinates scanning
    left to right, so the encoding is canonical.
    """
    n = len(v)
    basis = []
    echelon = {}
    coords = [0] * r
    for j, x in enumerate(v):
        y, mask = x, 0
        while y:
            top = y.bit_length() - 1
            hit = echelon.get(top)
            if hit is None:
                break
            y ^= hit[0]
            mask ^= hit[1]
        if y:
            s = len(basis)
            if s == r:
                raise InvalidRank(f"vector has rank greater than {r}")
            basis.append(x)
            echelon[y.bit_length() - 1] = (y, mask ^ (1 << s))
            coords[s] |= 1 << j
        else:
            s = 0
            while mask:
                if mask & 1:
                    coords[s] |= 1 << j
                mask >>= 1
                s += 1
    if len(basis) != r:
        raise InvalidRank(f"vector has rank {len(basis)}, expected {r}")
    return tuple(basis), BinMatrix(r, n, tuple(coords))


def decompress(field, basis, coords):
    return combine(field, basis, coords)


def is_valid_factorisation(basis, coords, r):
    return len(basis) == r and rank_of(basis) == r and coords.rank() == r


def vector_bytes(field, v):
    nb = field.nbytes
    return b"".join(x.to_bytes(nb, "little") for x in v)


def write_vector(writer: BitWriter, field, v):
    for x in v:
        writer.write(x, field.m)


def read_vector(reader, field, n):
    return tuple(reader.read(field.m) for _ in range(n))
