"""Security estimates, round counts and parameter validation.

Everything exponential is kept either as an exact integer or as a base-2
logarithm; q^(m(n-k)) is far beyond float range at production sizes.
"""

import math
from dataclasses import dataclass, field

from . import gf2poly
from .errors import IndexOutOfRange, InvalidParams


def _check(q, m, n, k, r):
    if q < 2 or min(m, n, k, r) < 1:
        raise InvalidParams(f"invalid parameters q={q} m={m} n={n} k={k} r={r}")


def _alg_exponent(n, k, r, halve=False):
    num = (r + 1) * (k + 1) - (n + 1)
    den = 2 * r if halve else r
    return r * -(-num // den)  # exact integer ceiling


def wf_algebraic(q, m, n, k, r):
    """log2 of r^3 k^3 q^(r ceil(((r+1)(k+1) - (n+1)) / r))."""
    _check(q, m, n, k, r)
    return 3 * math.log2(r * k) + _alg_exponent(n, k, r) * math.log2(q)


def wf_combinatorial(q, m, n, k, r):
    """log2 of (n-k)^3 m^3 q^(r (k+1) m / n - m)."""
    _check(q, m, n, k, r)
    if n <= k:
        raise InvalidParams("combinatorial estimate needs n > k")
    return 3 * math.log2((n - k) * m) + (r * (k + 1) * m / n - m) * math.log2(q)


def wf_quantum(q, m, n, k, r):
    """(log2 C, log2 D): the classical estimates with the exponential term square-rooted.

    For C the halving sits inside the ceiling; for D only the leading
    r (k+1) m / n term is halved.  Both conventions reproduce the reference
    values bit for bit.
    """
    _check(q, m, n, k, r)
    if n <= k:
        raise InvalidParams("combinatorial estimate needs n > k")
    lq = math.log2(q)
    c = 3 * math.log2(r * k) + _alg_exponent(n, k, r, halve=True) * lq
    d = 3 * math.log2((n - k) * m) + (r * (k + 1) * m / (2 * n) - m) * lq
    return c, d


def round_probability(q, k, rho):
    return (q**k + rho) / (2 * q**k)


def rounds_for_security(l, q, k, rho):
    """delta = ceil(l / -log2 p) with p = (q^k + rho) / (2 q^k)."""
    if rho < 0 or rho >= q**k:
        raise InvalidParams("rho must satisfy 0 <= rho < q^k")
    if l <= 0:
        raise InvalidParams("security level must be positive")
    if rho == 0:
        return l
    # exact rational comparison: smallest d with p^d <= 2^-l
    num, den = q**k + rho, 2 * q**k
    d = math.ceil(l / -math.log2(num / den))
    while d > 1 and (num ** (d - 1)) << l <= den ** (d - 1):
        d -= 1
    while (num**d) << l > den**d:
        d += 1
    return d


def gaussian_binomial(n, r, q=2):
    """Number of r-dimensional subspaces of F_q^n."""
    if not 0 <= r <= n:
        raise IndexOutOfRange(f"need 0 <= r <= n, got n={n} r={r}")
    num = den = 1
    for i in range(r):
        num *= q**n - q**i
        den *= q**r - q**i
    return num // den


def log2_int(x):
    """log2 of a (possibly huge) positive integer."""
    if x <= 0:
        raise ValueError("log2 of a non-positive integer")
    shift = max(x.bit_length() - 64, 0)
    return math.log2(x >> shift) + shift


def log2_one_minus_epsilon(q, m, n, k, r, rho):
    return rho * log2_int(gaussian_binomial(n, r, q)) - m * (n - k) * (rho - 1) * math.log2(q)


def uniqueness_probability(q, m, n, k, r, rho):
    """epsilon = 1 - [n r]^rho / q^(m(n-k)(rho-1)), clamped to [0, 1]."""
    _check(q, m, n, k, r)
    if rho < 1:
        raise InvalidParams("rho must be at least 1")
    if r > n:
        raise InvalidParams("r cannot exceed n")
    t = log2_one_minus_epsilon(q, m, n, k, r, rho)
    if t >= 0:
        return 0.0
    return min(1.0, max(0.0, -math.expm1(t * math.log(2))))


def rank_ball_size(q, m, n, d):
    """Number of m x n matrices over F_q of rank at most d."""
    total = 0
    for i in range(min(d, m, n) + 1):
        prod = 1
        for j in range(i):
            prod *= q**m - q**j
        total += gaussian_binomial(n, i, q) * prod
    return total


def rank_gv_distance(q, m, n, k):
    """Smallest d whose rank ball volume reaches q^(m(n-k))."""
    if q < 2 or m < 1 or n < 1 or not 0 <= k <= n:
        raise InvalidParams("invalid code parameters")
    target = q ** (m * (n - k))
    for d in range(min(m, n) + 1):
        if rank_ball_size(q, m, n, d) >= target:
            return d
    return min(m, n)


def _is_prime(m):
    if m < 2:
        return False
    return all(m % p for p in range(2, math.isqrt(m) + 1))


@dataclass
class SecurityReport:
    log2_A: float
    log2_B: float
    log2_C: float
    log2_D: float
    classical_level: int
    quantum_level: int
    gv_distance: int
    log2_one_minus_eps: float
    warnings: list = field(default_factory=list)

    def as_dict(self):
        return dict(self.__dict__)


def validate(params):
    """Work factors plus advisory warnings for a parameter set.

    Accepts anything with q, m, n, k, r, rho attributes.
    """
    q, m, n, k, r, rho = params.q, params.m, params.n, params.k, params.r, params.rho
    a = wf_algebraic(q, m, n, k, r)
    b = wf_combinatorial(q, m, n, k, r)
    c, d = wf_quantum(q, m, n, k, r)
    gv = rank_gv_distance(q, m, n, k)
    warnings = []
    if n <= r * (k + 1):
        warnings.append(f"n <= r(k+1) ({n} <= {r * (k + 1)}): Groebner-basis condition not met, algebraic attack counted in A")
    if r >= gv:
        warnings.append(f"r = {r} is not below the rank GV distance {gv}")
    if not _is_prime(m):
        warnings.append(f"m = {m} is composite: GF(2^m) has proper subfields")
    if q == 2 and len(gf2poly.factor((1 << k) ^ 1)) > 2:
        warnings.append(f"X^{k} - 1 has more than two irreducible factors over GF(2)")
    return SecurityReport(
        log2_A=a,
        log2_B=b,
        log2_C=c,
        log2_D=d,
        classical_level=math.ceil(min(a, b)),
        quantum_level=math.ceil(min(c, d)),
        gv_distance=gv,
        log2_one_minus_eps=log2_one_minus_epsilon(q, m, n, k, r, rho),
        warnings=warnings,
    )
