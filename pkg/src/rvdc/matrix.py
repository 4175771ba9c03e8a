"""Dense matrices over GF(2) with rows packed into ints.

Row ``i`` is an int whose bit ``j`` is entry ``(i, j)``.  Matrices are
immutable; every operation returns a new :class:`BinMatrix`.
"""

from dataclasses import dataclass
from functools import cached_property, lru_cache

from .bits import BitReader, BitWriter
from .errors import DimensionMismatch, Singular


def rank_of(vectors):
    """Rank of a collection of bit vectors (ints) over GF(2)."""
    basis = {}
    for v in vectors:
        while v:
            top = v.bit_length() - 1
            b = basis.get(top)
            if b is None:
                basis[top] = v
                break
            v ^= b
    return len(basis)


@lru_cache(maxsize=None)
def _slot_ones(count, width):
    return int(("0" * (width - 1) + "1") * count, 2) if count else 0


def rank_packed(block, count, width):
    """Rank of ``count`` rows of ``width`` bits packed low row first.

    Column-by-column elimination where one big-int multiply xors the pivot
    row into every other row that has the pivot bit.
    """
    avail = _slot_ones(count, width)
    mask = (1 << width) - 1
    rank = 0
    for c in range(width):
        sel = (block >> c) & avail
        if not sel:
            continue
        low = sel & -sel
        pivot = (block >> (low.bit_length() - 1)) & mask
        avail ^= low
        sel ^= low
        rank += 1
        if sel:
            block ^= sel * pivot
        if not avail:
            break
    return rank


@dataclass(frozen=True, eq=True)
class BinMatrix:
    nrows: int
    ncols: int
    rows: tuple

    def __post_init__(self):
        if len(self.rows) != self.nrows:
            raise DimensionMismatch(f"expected {self.nrows} rows, got {len(self.rows)}")
        limit = 1 << self.ncols
        if any(not 0 <= r < limit for r in self.rows):
            raise ValueError("row has bits outside the column range")

    @classmethod
    def from_rows(cls, rows, ncols):
        rows = tuple(rows)
        return cls(len(rows), ncols, rows)

    @classmethod
    def from_lists(cls, lists):
        lists = [list(r) for r in lists]
        ncols = len(lists[0]) if lists else 0
        return cls.from_rows((sum((b & 1) << j for j, b in enumerate(r)) for r in lists), ncols)

    @classmethod
    def zeros(cls, nrows, ncols):
        return cls(nrows, ncols, (0,) * nrows)

    @classmethod
    def identity(cls, dim):
        return cls(dim, dim, tuple(1 << i for i in range(dim)))

    @classmethod
    def from_columns(cls, cols, nrows):
        cols = list(cols)
        rows = [0] * nrows
        for j, c in enumerate(cols):
            while c:
                low = c & -c
                rows[low.bit_length() - 1] |= 1 << j
                c ^= low
        return cls(nrows, len(cols), tuple(rows))

    def __getitem__(self, ij):
        i, j = ij
        return (self.rows[i] >> j) & 1

    def to_lists(self):
        return [[(r >> j) & 1 for j in range(self.ncols)] for r in self.rows]

    @cached_property
    def columns(self):
        if not self.nrows or not self.ncols:
            return (0,) * self.ncols
        # transpose through bit strings: row i as text, entry j at index j
        width = self.ncols
        texts = [format(r, f"0{width}b")[::-1] for r in self.rows]
        return tuple(int("".join(col)[::-1], 2) for col in zip(*texts))

    def transpose(self):
        return BinMatrix(self.ncols, self.nrows, self.columns)

    def rank(self):
        return rank_of(self.rows)

    def is_invertible(self):
        return self.nrows == self.ncols and self.rank() == self.nrows

    def __add__(self, other):
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise DimensionMismatch("matrix shapes differ")
        return BinMatrix(self.nrows, self.ncols, tuple(a ^ b for a, b in zip(self.rows, other.rows)))

    def __matmul__(self, other):
        return mul(self, other)

    def apply(self, v):
        """Matrix-vector product M . v with v a column given as an int."""
        out = 0
        for i, r in enumerate(self.rows):
            out |= ((r & v).bit_count() & 1) << i
        return out

    def inverse(self):
        return inverse(self)

    def to_bytes(self):
        w = BitWriter()
        for r in self.rows:
            w.write(r, self.ncols)
        return w.to_bytes()

    @classmethod
    def from_bytes(cls, data, nrows, ncols):
        reader = BitReader(data)
        m = cls(nrows, ncols, tuple(reader.read(ncols) for _ in range(nrows)))
        reader.finish()
        return m


def mul(a, b):
    if a.ncols != b.nrows:
        raise DimensionMismatch(f"cannot multiply {a.nrows}x{a.ncols} by {b.nrows}x{b.ncols}")
    brows = b.rows
    out = []
    for r in a.rows:
        acc = 0
        while r:
            low = r & -r
            acc ^= brows[low.bit_length() - 1]
            r ^= low
        out.append(acc)
    return BinMatrix(a.nrows, b.ncols, tuple(out))


def inverse(m):
    if m.nrows != m.ncols:
        raise DimensionMismatch("only square matrices can be inverted")
    n = m.nrows
    # augmented rows: low n bits = M, high n bits = identity
    rows = [r | (1 << (n + i)) for i, r in enumerate(m.rows)]
    for col in range(n):
        bit = 1 << col
        pivot = next((i for i in range(col, n) if rows[i] & bit), None)
        if pivot is None:
            raise Singular("matrix is not invertible")
        rows[col], rows[pivot] = rows[pivot], rows[col]
        p = rows[col]
        for i in range(n):
            if i != col and rows[i] & bit:
                rows[i] ^= p
    return BinMatrix(n, n, tuple(r >> n for r in rows))


def from_stream(nrows, ncols, stream):
    """Fill a matrix row-major from ``stream.read_bits`` (first row first)."""
    block = stream.read_bits(nrows * ncols)
    mask = (1 << ncols) - 1
    return BinMatrix(nrows, ncols, tuple((block >> (i * ncols)) & mask for i in range(nrows)))


def sample_invertible(dim, rng):
    """Uniform element of GL(dim, 2).

    Rows are drawn one at a time, redrawing any row in the span of the
    previous ones; each row is then uniform outside that span, which is
    exactly the uniform distribution on invertible matrices.
    """
    rows = []
    basis = {}
    while len(rows) < dim:
        v = cand = rng.getrandbits(dim)
        while v:
            top = v.bit_length() - 1
            b = basis.get(top)
            if b is None:
                basis[top] = v
                rows.append(cand)
                break
            v ^= b
    return BinMatrix(dim, dim, tuple(rows))


def invertible_from_stream(dim, stream):
    """First invertible dim x dim candidate among successive stream blocks."""
    mask = (1 << dim) - 1
    while True:
        block = stream.read_bits(dim * dim)
        if rank_packed(block, dim, dim) == dim:
            return BinMatrix(dim, dim, tuple((block >> (i * dim)) & mask for i in range(dim)))

