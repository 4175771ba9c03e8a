import json
import random
from collections import Counter
from dataclasses import replace

import pytest

from rvdc import protocol as pr
from rvdc import rankmetric as rm
from rvdc.errors import MalformedTranscript, PhaseViolation
from rvdc.params import RVDC_96, TOY
from rvdc.ring import ChallengeA

from conftest import keypair_for


def honest_round(params, kp, rng, b=None):
    state, c1, c2 = pr.prover_commit(params, kp.sk, kp.pk, rng)
    a = pr.verifier_challenge_a(params, rng)
    c3 = pr.prover_commit2(state, a)
    b = pr.verifier_challenge_b(rng) if b is None else b
    rsp1, rsp2 = pr.prover_respond(state, b)
    return state, pr.Transcript(c1, c2, a, c3, b, rsp1, rsp2)


def test_commit_deterministic_and_sized():
    kp = keypair_for(RVDC_96)
    _, c1, c2 = pr.prover_commit(RVDC_96, kp.sk, kp.pk, random.Random(5))
    _, d1, d2 = pr.prover_commit(RVDC_96, kp.sk, kp.pk, random.Random(5))
    assert (c1, c2) == (d1, d2)
    assert len(c1) * 8 == 160 == len(c2) * 8


def test_distinct_rounds_distinct_u():
    kp = keypair_for(RVDC_96)
    rng = random.Random(6)
    us = {pr.prover_commit(RVDC_96, kp.sk, kp.pk, rng)[0].u for _ in range(1000)}
    assert len(us) == 1000


def test_challenge_a_distribution():
    rng = random.Random(7)
    assert {pr.sample_challenge_a(2, rng).bits for _ in range(200)} == {1, 2}
    counts = Counter(pr.sample_challenge_a(3, rng).bits for _ in range(10_000))
    assert set(counts) == {1, 2, 3, 4, 5, 6}
    bits = [pr.verifier_challenge_b(rng) for _ in range(10_000)]
    assert abs(sum(bits) / 10_000 - 0.5) < 5 * 0.005


def test_phase_order_enforced():
    kp = keypair_for(RVDC_96)
    rng = random.Random(8)
    state = pr.ProverState(RVDC_96, kp.sk, kp.pk)
    with pytest.raises(PhaseViolation):
        state.commit2(pr.sample_challenge_a(RVDC_96.k, rng))
    with pytest.raises(PhaseViolation):
        state.respond(0)
    state.commit(rng)
    with pytest.raises(PhaseViolation):
        state.commit(rng)
    with pytest.raises(PhaseViolation):
        state.respond(1)
    state.commit2(pr.sample_challenge_a(RVDC_96.k, rng))
    state.respond(1)
    with pytest.raises(PhaseViolation):
        state.respond(0)


def test_c3_rewriting_via_public_key():
    """Pi(uG + Gamma_a(e)) equals Pi((u + Gamma'_a(x)) G + Gamma_a(y))."""
    params = RVDC_96
    kp = keypair_for(params)
    rng = random.Random(9)
    h = params.hasher()
    for _ in range(50):
        state, t = honest_round(params, kp, rng, b=0)
        P, Q = t.rsp1
        via_y = rm.pi_map(params.field, P, Q, pr.verifier_b0_vector(params, kp.pk, t.a, t.rsp2))
        assert h.digest(pr.ser_vector(params.field, via_y)) == t.c3


def test_c3_sensitive_to_a():
    params = RVDC_96
    kp = keypair_for(params)
    rng = random.Random(10)
    for _ in range(1000):
        state, c1, c2 = pr.prover_commit(params, kp.sk, kp.pk, rng)
        a = pr.verifier_challenge_a(params, rng)
        flipped = a.bits ^ (1 << rng.randrange(params.k))
        if not 0 < flipped < (1 << params.k) - 1:
            continue
        e_a = rm.pi_map(params.field, state.P, state.Q, params.ring.gamma(a, kp.sk.e))
        e_b = rm.pi_map(params.field, state.P, state.Q, params.ring.gamma(ChallengeA(params.k, flipped), kp.sk.e))
        assert e_a != e_b


def test_completeness_and_rejections():
    params = RVDC_96
    kp = keypair_for(params)
    rng = random.Random(11)
    for i in range(200):
        state, t = honest_round(params, kp, rng, b=i % 2)
        assert pr.verifier_check(params, kp.pk, t)
        if t.b == 1:
            heavy = rm.sample_rank_exact(params.field, params.n, params.r + 1, rng)
            # keep c3 consistent so only the weight check can fail
            h = params.hasher()
            c3 = h.digest(pr.ser_vector(params.field, rm.add(t.rsp1, heavy)))
            assert not pr.verifier_check(params, kp.pk, replace(t, rsp2=heavy, c3=c3))
        else:
            j = rng.randrange(params.k)
            v = list(t.rsp2)
            v[j] ^= 1 << rng.randrange(params.m)
            assert not pr.verifier_check(params, kp.pk, replace(t, rsp2=tuple(v)))


def test_b0_perturbation_rejected_often():
    params = TOY
    kp = keypair_for(params)
    rng = random.Random(12)
    for _ in range(1000):
        _, t = honest_round(params, kp, rng, b=0)
        v = list(t.rsp2)
        v[rng.randrange(params.k)] ^= 1 << rng.randrange(params.m)
        assert not pr.verifier_check(params, kp.pk, replace(t, rsp2=tuple(v)))


def test_malformed_transcripts():
    params = RVDC_96
    kp = keypair_for(params)
    rng = random.Random(13)
    _, t = honest_round(params, kp, rng, b=0)
    with pytest.raises(MalformedTranscript):
        pr.verifier_check(params, kp.pk, replace(t, b=1))
    with pytest.raises(MalformedTranscript):
        pr.verifier_check(params, kp.pk, replace(t, rsp2=t.rsp2[:-1]))
    with pytest.raises(MalformedTranscript):
        pr.verifier_check(params, kp.pk, replace(t, b=2))


def test_cheaters_win_on_their_branch():
    params = TOY
    kp = keypair_for(params)
    rng = random.Random(14)
    for guess in (0, 1):
        for _ in range(100):
            adv = pr.cheat_strategy(params, kp.pk, guess)
            c1, c2 = adv.commit(rng)
            a = pr.verifier_challenge_a(params, rng)
            c3 = adv.commit2(a)
            rsp = adv.respond(guess)
            assert pr.verifier_check(params, kp.pk, pr.Transcript(c1, c2, a, c3, guess, *rsp))


def test_cheating_rate_toy():
    params = TOY
    kp = keypair_for(params)
    rate = pr.run_cheating_experiment(params, kp.pk, 10_000, random.Random(15))
    assert 0.47 <= rate <= 0.53
    assert rate ** params.delta < 1 and 0.53 ** 81 < 2 ** -64


def test_zk_simulator():
    params = RVDC_96
    kp = keypair_for(params)
    rng = random.Random(16)
    for b in (0, 1):
        for _ in range(100):
            t = pr.zk_simulate(params, kp.pk, b, rng)
            assert t.b == b
            assert pr.verifier_check(params, kp.pk, t)
            if b == 1:
                assert rm.rank_weight(t.rsp2) == params.r


def test_transcript_lines():
    params = TOY
    kp = keypair_for(params)
    _, t = honest_round(params, kp, random.Random(17), b=0)
    lines = pr.transcript_lines(params, t, 0)
    recs = [json.loads(line) for line in lines]
    assert [r["pass"] for r in recs] == [1, 2, 3, 4, 5]
    assert bytes.fromhex(recs[2]["payload_hex"]) == t.c3
    payload_bits = pr.response_bits(params, 0)
    assert len(bytes.fromhex(recs[4]["payload_hex"])) == (payload_bits + 7) // 8


def test_response_bits():
    p = RVDC_96
    assert pr.response_bits(p, 0) == 22 * 22 + 29 * 29 + 29 * 11
    assert pr.response_bits(p, 1) == 2 * 29 * 22
