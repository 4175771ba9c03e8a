"""Polynomials over GF(2) packed into Python ints.

Bit ``i`` of an int is the coefficient of ``X^i``.  Besides the usual
arithmetic this module carries the factorisation helpers used to check
reduction polynomials and the structure of ``X^k - 1``.
"""

import random

# byte value -> its 8 bits widened to w-byte big-endian slots
_SPREAD = {
    w: [b"".join(((v >> i) & 1).to_bytes(w, "big") for i in range(7, -1, -1)) for v in range(256)]
    for w in (1, 2, 3)
}
_PARITY = bytes(0x30 | (i & 1) for i in range(256))


def degree(a):
    return a.bit_length() - 1


def spread(x, width):
    """Move bit ``i`` of ``x`` to bit ``i * width``."""
    if x == 0:
        return 0
    table = str.maketrans({"0": "0" * width, "1": "0" * (width - 1) + "1"})
    return int(format(x, "b").translate(table), 2)


def _clmul_small(a, b):
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def clmul(a, b):
    """Carryless product of two binary polynomials.

    Large operands go through one big integer multiplication: every bit is
    widened to a byte slot so that the integer convolution never carries,
    and the parity of each slot is the GF(2) coefficient.
    """
    if a == 0 or b == 0:
        return 0
    na, nb = a.bit_length(), b.bit_length()
    short = min(na, nb)
    if short <= 12:
        return _clmul_small(a, b) if nb <= na else _clmul_small(b, a)
    w = 1 if short < 0x100 else 2 if short < 0x10000 else 3
    sa = _widen(a, na, w)
    sb = _widen(b, nb, w)
    nslots = 8 * (((na + 7) >> 3) + ((nb + 7) >> 3))
    raw = (sa * sb).to_bytes(nslots * w, "big")
    return int(raw[w - 1 :: w].translate(_PARITY), 2)


def _widen(x, nbits, w):
    table = _SPREAD[w]
    return int.from_bytes(b"".join(map(table.__getitem__, x.to_bytes((nbits + 7) >> 3, "big"))), "big")


def polymod(a, f):
    df = f.bit_length()
    while a.bit_length() >= df:
        a ^= f << (a.bit_length() - df)
    return a


def polydivmod(a, f):
    if f == 0:
        raise ZeroDivisionError("division by the zero polynomial")
    q = 0
    df = f.bit_length()
    while a.bit_length() >= df:
        s = a.bit_length() - df
        q |= 1 << s
        a ^= f << s
    return q, a


def mulmod(a, b, f):
    return polymod(clmul(a, b), f)


def gcd(a, b):
    while b:
        a, b = b, polymod(a, b)
    return a


def xgcd_inverse(a, f):
    """Inverse of ``a`` modulo ``f`` by the extended Euclidean algorithm, or None."""
    r0, r1 = f, polymod(a, f)
    s0, s1 = 0, 1
    while r1:
        q, r = polydivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 ^ clmul(q, s1)
    if r0 != 1:
        return None
    return polymod(s0, f)


def is_irreducible(f):
    """Ben-Or test: gcd(X^(2^i) - X, f) = 1 for every i <= deg(f) / 2."""
    d = degree(f)
    if d < 1:
        return False
    if d == 1:
        return True
    x = 0b10
    h = x
    for _ in range(d // 2):
        h = mulmod(h, h, f)
        if gcd(h ^ x, f) != 1:
            return False
    return True


def derivative(f):
    # char 2: only odd-degree terms survive, each dropping one degree
    r = 0
    i = 1
    f >>= 1
    while f:
        if f & 1:
            r |= 1 << (i - 1)
        f >>= 2
        i += 2
    return r


def _sqrt_of_square(f):
    r = 0
    i = 0
    while f:
        if f & 1:
            r |= 1 << i
        f >>= 2
        i += 1
    return r


def _distinct_degree(f):
    out = []
    h = 0b10
    i = 1
    while degree(f) >= 2 * i:
        h = mulmod(h, h, f)
        g = gcd(h ^ 0b10, f)
        if g != 1:
            out.append((g, i))
            f = polydivmod(f, g)[0]
            h = polymod(h, f)
        i += 1
    if degree(f) > 0:
        out.append((f, degree(f)))
    return out


def _equal_degree(g, d, rng):
    if degree(g) == d:
        return [g]
    while True:
        a = rng.getrandbits(degree(g)) | 1
        t = s = a
        for _ in range(d - 1):
            s = mulmod(s, s, g)
            t ^= s
        h = gcd(t, g)
        if 0 < degree(h) < degree(g):
            return _equal_degree(h, d, rng) + _equal_degree(polydivmod(g, h)[0], d, rng)


def factor(f):
    """Irreducible factors of ``f`` with multiplicity, sorted ascending."""
    if degree(f) < 1:
        return []
    rng = random.Random(0xF2)
    df = derivative(f)
    if df == 0:
        half = factor(_sqrt_of_square(f))
        return sorted(half + half)
    squarefree = polydivmod(f, gcd(f, df))[0]
    distinct = []
    for g, d in _distinct_degree(squarefree):
        distinct.extend(_equal_degree(g, d, rng))
    out = []
    rest = f
    for p in distinct:
        while True:
            q, r = polydivmod(rest, p)
            if r:
                break
            out.append(p)
            rest = q
    return sorted(out + factor(rest))


def poly_str(f):
    if f == 0:
        return "0"
    terms = []
    for i in range(degree(f), -1, -1):
        if (f >> i) & 1:
            terms.append("1" if i == 0 else "X" if i == 1 else f"X^{i}")
    return " + ".join(terms)
