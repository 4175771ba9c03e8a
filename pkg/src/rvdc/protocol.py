"""The five-pass identification protocol.

Messages: (c1, c2) -> a -> c3 -> b -> (rsp1, rsp2).  Prover and verifier
are plain state machines that exchange Python values; ``transcript_lines``
turns a finished run into JSON lines with hex payloads.
"""

import json
from dataclasses import dataclass
from enum import Enum

from . import matrix
from . import rankmetric as rm
from .bits import BitWriter
from .errors import InvalidRank, MalformedTranscript, PhaseViolation
from .matrix import BinMatrix
from .ring import ChallengeA


# -- serialisation used inside hashes ---------------------------------------

def ser_matrices(p, q):
    return p.to_bytes() + q.to_bytes()


def ser_vector(field, v):
    return rm.vector_bytes(field, v)


# -- per-round building blocks, shared with the signature schemes -------------

def masked_codeword(params, pk, u):
    return params.ring.encode(u, pk.g)


def verifier_b0_vector(params, pk, a, rsp2):
    """rsp2 . G + Gamma_a(y), the vector whose image under Pi must hash to c3."""
    ring = params.ring
    return rm.add(ring.encode(rsp2, pk.g), ring.gamma(a, pk.y))


def sample_challenge_a(k, rng):
    while True:
        bits = rng.getrandbits(k)
        if 0 < bits < (1 << k) - 1:
            return ChallengeA(k, bits)


# -- prover ------------------------------------------------------------------

class Phase(Enum):
    START = 0
    COMMITTED = 1
    COMMITTED3 = 2
    DONE = 3


class ProverState:
    def __init__(self, params, sk, pk, hasher=None):
        self.params = params
        self.sk = sk
        self.pk = pk
        self.hasher = hasher or params.hasher()
        self.phase = Phase.START
        self.u = self.P = self.Q = None
        self.c1 = self.c2 = self.c3 = None
        self.a = None

    def _require(self, phase, what):
        if self.phase is not phase:
            raise PhaseViolation(f"{what} called in phase {self.phase.name}")

    def commit(self, rng):
        self._require(Phase.START, "commit")
        p = self.params
        self.u = p.ring.sample(rng)
        self.P = matrix.sample_invertible(p.n, rng)
        self.Q = matrix.sample_invertible(p.m, rng)
        self._uG = rm.pi_map(p.field, self.P, self.Q, masked_codeword(p, self.pk, self.u))
        self.c1 = self.hasher.digest(ser_matrices(self.P, self.Q))
        self.c2 = self.hasher.digest(ser_vector(p.field, self._uG))
        self.phase = Phase.COMMITTED
        return self.c1, self.c2

    def commit2(self, a):
        self._require(Phase.COMMITTED, "commit2")
        p = self.params
        # Pi is linear: Pi(uG + Gamma_a(e)) = Pi(uG) + Pi(Gamma_a(e))
        self._ge = rm.pi_map(p.field, self.P, self.Q, p.ring.gamma(a, self.sk.e))
        self.a = a
        self.c3 = self.hasher.digest(ser_vector(p.field, rm.add(self._uG, self._ge)))
        self.phase = Phase.COMMITTED3
        return self.c3

    def respond(self, b):
        self._require(Phase.COMMITTED3, "respond")
        if b not in (0, 1):
            raise MalformedTranscript("challenge bit must be 0 or 1")
        self.phase = Phase.DONE
        if b == 0:
            return (self.P, self.Q), rm.add(self.u, self.params.ring.gamma_prime(self.a, self.sk.x))
        return self._uG, self._ge


def prover_commit(params, sk, pk, rng, hasher=None):
    state = ProverState(params, sk, pk, hasher)
    c1, c2 = state.commit(rng)
    return state, c1, c2


def prover_commit2(state, a):
    return state.commit2(a)


def prover_respond(state, b):
    return state.respond(b)


# -- verifier ----------------------------------------------------------------

def verifier_challenge_a(params, rng):
    return sample_challenge_a(params.k, rng)


def verifier_challenge_b(rng):
    return rng.getrandbits(1)


@dataclass(frozen=True)
class Transcript:
    c1: bytes
    c2: bytes
    a: ChallengeA
    c3: bytes
    b: int
    rsp1: object
    rsp2: object


def _check_vector(v, length, field):
    if not isinstance(v, tuple) or len(v) != length or any(not 0 <= x <= field.mask for x in v):
        raise MalformedTranscript(f"expected a vector of {length} field elements")


def verifier_check(params, pk, t, hasher=None):
    """True iff the branch-b equations hold for transcript t."""
    hasher = hasher or params.hasher()
    field, n, k, m = params.field, params.n, params.k, params.m
    if t.b not in (0, 1) or not isinstance(t.a, ChallengeA) or t.a.k != k:
        raise MalformedTranscript("bad challenge values")
    if t.b == 0:
        if not (isinstance(t.rsp1, tuple) and len(t.rsp1) == 2):
            raise MalformedTranscript("b=0 response must carry (P, Q)")
        P, Q = t.rsp1
        if not (isinstance(P, BinMatrix) and isinstance(Q, BinMatrix)):
            raise MalformedTranscript("b=0 response must carry two binary matrices")
        if (P.nrows, P.ncols, Q.nrows, Q.ncols) != (n, n, m, m):
            raise MalformedTranscript("P must be n x n and Q must be m x m")
        _check_vector(t.rsp2, k, field)
        if hasher.digest(ser_matrices(P, Q)) != t.c1:
            return False
        v = rm.pi_map(field, P, Q, verifier_b0_vector(params, pk, t.a, t.rsp2))
        return hasher.digest(ser_vector(field, v)) == t.c3
    _check_vector(t.rsp1, n, field)
    _check_vector(t.rsp2, n, field)
    if hasher.digest(ser_vector(field, t.rsp1)) != t.c2:
        return False
    if hasher.digest(ser_vector(field, rm.add(t.rsp1, t.rsp2))) != t.c3:
        return False
    return rm.rank_weight(t.rsp2) == pk.r


def run_round(params, prover, pk, rng, hasher=None):
    """One full interaction; returns (transcript, accepted)."""
    c1, c2 = prover.commit(rng)
    a = verifier_challenge_a(params, rng)
    c3 = prover.commit2(a)
    b = verifier_challenge_b(rng)
    rsp1, rsp2 = prover.respond(b)
    t = Transcript(c1, c2, a, c3, b, rsp1, rsp2)
    return t, verifier_check(params, pk, t, hasher)


# -- cheating provers (no secret key) -------------------------------------------

class CheatingProver:
    """Impersonator that prepares to answer exactly one value of b.

    guess 0: commits honestly to (P, Q) and answers with u + Gamma'_a(x~)
    for a random x~, computing c3 from y as the verifier will; c2 is junk.
    guess 1: commits to Pi(uG) and to Pi(uG) + z with z a random rank-r
    vector standing in for Pi(Gamma_a(e)).
    """

    def __init__(self, params, pk, guess_b, hasher=None):
        self.params = params
        self.pk = pk
        self.guess = guess_b
        self.hasher = hasher or params.hasher()
        self.phase = Phase.START

    def commit(self, rng):
        p = self.params
        self.phase = Phase.COMMITTED
        self.u = p.ring.sample(rng)
        self.P = matrix.sample_invertible(p.n, rng)
        self.Q = matrix.sample_invertible(p.m, rng)
        self.rng = rng
        if self.guess == 0:
            self.x_fake = p.ring.sample(rng)
            c1 = self.hasher.digest(ser_matrices(self.P, self.Q))
            c2 = bytes(rng.getrandbits(8) for _ in range(self.hasher.nbytes))
        else:
            self._uG = rm.pi_map(p.field, self.P, self.Q, masked_codeword(p, self.pk, self.u))
            c1 = bytes(rng.getrandbits(8) for _ in range(self.hasher.nbytes))
            c2 = self.hasher.digest(ser_vector(p.field, self._uG))
        return c1, c2

    def commit2(self, a):
        p = self.params
        self.a = a
        if self.guess == 0:
            self._rsp2 = rm.add(self.u, p.ring.gamma_prime(a, self.x_fake))
            v = rm.pi_map(p.field, self.P, self.Q, verifier_b0_vector(p, self.pk, a, self._rsp2))
            return self.hasher.digest(ser_vector(p.field, v))
        self._z = rm.sample_rank_exact(p.field, p.n, self.pk.r, self.rng)
        return self.hasher.digest(ser_vector(p.field, rm.add(self._uG, self._z)))

    def respond(self, b):
        self.phase = Phase.DONE
        p = self.params
        if b == 0:
            if self.guess == 0:
                return (self.P, self.Q), self._rsp2
            # best effort: well-formed but unprepared
            return (self.P, self.Q), self.u
        if self.guess == 1:
            return self._uG, self._z
        v = rm.pi_map(p.field, self.P, self.Q, masked_codeword(p, self.pk, self.u))
        return v, rm.sample_rank_exact(p.field, p.n, self.pk.r, self.rng)


def cheat_strategy(params, pk, guess_b, hasher=None):
    return CheatingProver(params, pk, guess_b, hasher)


def run_cheating_experiment(params, pk, trials, rng, guess=None):
    """Fraction of single rounds an impersonator gets accepted in.

    ``guess`` fixes the adversary's branch; by default it is drawn uniformly
    per trial.
    """
    hasher = params.hasher()
    wins = 0
    for _ in range(trials):
        g = rng.getrandbits(1) if guess is None else guess
        _, ok = run_round(params, CheatingProver(params, pk, g, hasher), pk, rng, hasher)
        wins += ok
    return wins / trials


# -- zero-knowledge simulator -------------------------------------------------------

def zk_simulate(params, pk, branch, rng, hasher=None):
    """A transcript for the given branch built from the public key alone."""
    hasher = hasher or params.hasher()
    field, ring = params.field, params.ring
    a = sample_challenge_a(params.k, rng)
    junk = bytes(rng.getrandbits(8) for _ in range(hasher.nbytes))
    if branch == 0:
        P = matrix.sample_invertible(params.n, rng)
        Q = matrix.sample_invertible(params.m, rng)
        v = ring.sample(rng)
        c1 = hasher.digest(ser_matrices(P, Q))
        c3 = hasher.digest(ser_vector(field, rm.pi_map(field, P, Q, verifier_b0_vector(params, pk, a, v))))
        return Transcript(c1, junk, a, c3, 0, (P, Q), v)
    v = tuple(field.sample(rng) for _ in range(params.n))
    z = rm.sample_rank_exact(field, params.n, pk.r, rng)
    c2 = hasher.digest(ser_vector(field, v))
    c3 = hasher.digest(ser_vector(field, rm.add(v, z)))
    return Transcript(junk, c2, a, c3, 1, v, z)


# -- transcript dump ----------------------------------------------------------------

def response_bytes(params, t):
    w = BitWriter()
    if t.b == 0:
        P, Q = t.rsp1
        for row in P.rows:
            w.write(row, params.n)
        for row in Q.rows:
            w.write(row, params.m)
        rm.write_vector(w, params.field, t.rsp2)
    else:
        rm.write_vector(w, params.field, t.rsp1)
        rm.write_vector(w, params.field, t.rsp2)
    return w.to_bytes()


def transcript_lines(params, t, round_index=None):
    payloads = [t.c1 + t.c2, t.a.to_bytes(), t.c3, bytes([t.b]), response_bytes(params, t)]
    out = []
    for i, data in enumerate(payloads, 1):
        rec = {"pass": i, "payload_hex": data.hex()}
        if round_index is not None:
            rec = {"round": round_index, **rec}
        out.append(json.dumps(rec))
    return out


def response_bits(params, b):
    """Payload size of a branch-b response in bits."""
    m, n, k = params.m, params.n, params.k
    return n * n + m * m + m * k if b == 0 else 2 * m * n


__all__ = [
    "ProverState", "Phase", "Transcript", "prover_commit", "prover_commit2", "prover_respond",
    "verifier_challenge_a", "verifier_challenge_b", "verifier_check", "run_round",
    "CheatingProver", "cheat_strategy", "run_cheating_experiment", "zk_simulate",
    "transcript_lines", "response_bits", "InvalidRank",
]
