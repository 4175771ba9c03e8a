import random

import pytest

from rvdc import rankmetric as rm
from rvdc.errors import DimensionMismatch, IndexOutOfRange, InvalidChallenge, MalformedSignature
from rvdc.field import GF2m
from rvdc.params import CANONICAL, RVDC_96, TOY
from rvdc.ring import (
    ChallengeA, DCRing, keygen, public_key_bytes, public_key_from_bytes, secret_key_bytes,
    secret_key_from_bytes,
)

from conftest import keypair_for


def schoolbook(F, k, a, b, tail=1):
    prod = [0] * (2 * k - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] ^= F.mul(x, y)
    for t in range(2 * k - 2, k - 1, -1):
        c, prod[t] = prod[t], 0
        for i in range(k):
            if (tail >> i) & 1:
                prod[t - k + i] ^= c
    return tuple(prod[:k])


def literal_rot(x, i):
    # left rotation by i: (x_{i+1}, ..., x_k, x_1, ..., x_i)
    return tuple(x[i:]) + tuple(x[:i])


def literal_gamma_prime(ring, a, x):
    k = ring.k
    out = (0,) * k
    for i, alpha in enumerate(a.alphas, 1):
        if alpha:
            out = rm.add(out, literal_rot(x, (k - i) % k))
    return out


def random_challenge(k, rng):
    while True:
        bits = rng.getrandbits(k)
        if 0 < bits < (1 << k) - 1:
            return ChallengeA(k, bits)


def test_ring_mul_small_oracle():
    rng = random.Random(0)
    for m in (3, 5, 8):
        F = GF2m(m)
        for k in (2, 3, 4):
            R = DCRing(F, k)
            for _ in range(100):
                a, b = R.sample(rng), R.sample(rng)
                assert R.ring_mul(a, b) == schoolbook(F, k, a, b)


def test_ring_mul_production_and_fixed_tables():
    rng = random.Random(1)
    for p in CANONICAL:
        R = p.ring
        g = R.sample(rng)
        for _ in range(20):
            a = R.sample(rng)
            expect = schoolbook(p.field, p.k, a, g)
            assert R.ring_mul(a, g) == expect
            assert R.mul_fixed(a, g) == expect


def test_ring_mul_general_tail():
    F = GF2m(5)
    rng = random.Random(2)
    R = DCRing(F, 4, tail=0b11)  # X^4 - (X + 1)
    for _ in range(100):
        a, b = R.sample(rng), R.sample(rng)
        assert R.ring_mul(a, b) == schoolbook(F, 4, a, b, tail=0b11)
        assert R.mul_fixed(a, b) == R.ring_mul(a, b)


def test_ring_basics():
    F = GF2m(5)
    R = DCRing(F, 3)
    x = (3, 7, 11)
    assert R.ring_mul(R.one(), x) == x
    assert R.ring_mul(R.monomial(1), x) == (11, 3, 7)
    with pytest.raises(DimensionMismatch):
        R.ring_mul((1, 2), x)


def test_rotations():
    F = GF2m(5)
    R = DCRing(F, 3)
    x = (1, 2, 3)
    assert R.rot(3, x) == x
    assert R.rot(1, x) == (2, 3, 1)
    y = (1, 2, 3, 4, 5, 6)
    assert R.drot(1, y) == R.rot(1, y[:3]) + R.rot(1, y[3:])
    with pytest.raises(IndexOutOfRange):
        R.rot(4, x)
    with pytest.raises(DimensionMismatch):
        R.drot(1, x)


def test_gamma_prime_matches_rotation_sum():
    rng = random.Random(3)
    for m, k in ((5, 3), (29, 11), (41, 17)):
        R = DCRing(GF2m(m), k)
        for _ in range(200):
            a, x = random_challenge(k, rng), R.sample(rng)
            assert R.gamma_prime(a, x) == literal_gamma_prime(R, a, x)


def test_gamma_single_term_is_rotation():
    R = DCRing(GF2m(5), 3)
    x = (1, 2, 3)
    y = (1, 2, 3, 4, 5, 6)
    for j in range(1, 3):
        a = ChallengeA.from_alphas([1 if i == j else 0 for i in range(1, 4)])
        assert R.gamma_prime(a, x) == R.rot(3 - j, x)
        assert R.gamma(a, y) == R.drot(3 - j, y)


def test_gamma_linear():
    rng = random.Random(4)
    R = RVDC_96.ring
    for _ in range(100):
        a = random_challenge(R.k, rng)
        y = tuple(R.field.sample(rng) for _ in range(R.n))
        z = tuple(R.field.sample(rng) for _ in range(R.n))
        assert R.gamma(a, rm.add(y, z)) == rm.add(R.gamma(a, y), R.gamma(a, z))


def test_challenge_validation():
    with pytest.raises(InvalidChallenge):
        ChallengeA(3, 0)
    with pytest.raises(InvalidChallenge):
        ChallengeA(3, 7)
    with pytest.raises(InvalidChallenge):
        ChallengeA(3, 8)
    a = ChallengeA.from_alphas([1, 0, 1])
    assert a.alphas == (1, 0, 1)
    R = DCRing(GF2m(5), 4)
    with pytest.raises(InvalidChallenge):
        R.gamma_prime(a, R.zero())


def test_encode():
    rng = random.Random(5)
    R = DCRing(GF2m(5), 3)
    g = R.sample(rng)
    assert R.encode(R.zero(), g) == (0,) * 6
    x = R.sample(rng)
    assert R.encode(x, R.zero()) == x + (0, 0, 0)
    # multiplying x by X shifts both blocks of the codeword right by one
    shifted = R.ring_mul(R.monomial(1), x)
    assert R.encode(shifted, g) == R.drot(2, R.encode(x, g))


@pytest.mark.parametrize("params", CANONICAL + (TOY,), ids=[p.name for p in CANONICAL + (TOY,)])
def test_gamma_commutes_with_encode(params):
    R = params.ring
    rng = random.Random(6)
    for _ in range(1000):
        a, x, g = random_challenge(R.k, rng), R.sample(rng), R.sample(rng)
        assert R.gamma(a, R.encode(x, g)) == R.encode(R.gamma_prime(a, x), g)


def test_gamma_never_increases_rank():
    rng = random.Random(7)
    R = RVDC_96.ring
    for _ in range(300):
        e = rm.sample_rank_exact(R.field, R.n, 7, rng)
        a = random_challenge(R.k, rng)
        assert rm.rank_weight(R.gamma(a, e)) <= 7
        # the all-ones polynomial collapses each block to a single value
        all_ones = (1 << R.k) - 1
        collapsed = R.poly_mul(all_ones, e[: R.k]) + R.poly_mul(all_ones, e[R.k:])
        assert rm.rank_weight(collapsed) <= 2


@pytest.mark.parametrize("params", CANONICAL, ids=[p.name for p in CANONICAL])
def test_keygen(params):
    rng = random.Random(8)
    R = params.ring
    for _ in range(5):
        kp = keygen(R, params.r, rng)
        assert rm.rank_weight(kp.sk.e) == params.r
        assert rm.add(kp.pk.y, R.encode(kp.sk.x, kp.pk.g)) == kp.sk.e
        assert R.gamma_preserves_rank(kp.sk.e, params.r)


def test_gamma_preserves_rank_for_every_challenge_small():
    # k = 7: X^7 - 1 has three factors, so non-invertible challenges exist
    F = GF2m(29)
    R = DCRing(F, 7)
    rng = random.Random(9)
    kept = 0
    for _ in range(40):
        e = rm.sample_rank_exact(F, 14, 3, rng)
        robust = R.gamma_preserves_rank(e, 3)
        kept += robust
        ranks = {rm.rank_weight(R.gamma(ChallengeA(7, b), e)) for b in range(1, 127)}
        assert robust == (ranks == {3})
    assert kept > 0


@pytest.mark.parametrize("params", CANONICAL, ids=[p.name for p in CANONICAL])
def test_key_serialisation(params):
    kp = keypair_for(params)
    sk_data = secret_key_bytes(params, kp.sk)
    pk_data = public_key_bytes(params, kp.pk)
    expect_sk = params.m * (params.k + params.n)
    expect_pk = params.m * (params.n + params.k) + (params.r - 1).bit_length()
    assert len(sk_data) == 4 + (expect_sk + 7) // 8
    assert len(pk_data) == 4 + (expect_pk + 7) // 8
    assert secret_key_from_bytes(params, sk_data) == kp.sk
    assert public_key_from_bytes(params, pk_data) == kp.pk
    with pytest.raises(MalformedSignature):
        public_key_from_bytes(params, pk_data[:-1])
    with pytest.raises(MalformedSignature):
        secret_key_from_bytes(params, sk_data + b"\0")
    with pytest.raises(MalformedSignature):
        public_key_from_bytes(params, b"\xff\xff" + pk_data[2:])
