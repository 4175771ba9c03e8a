"""Parameter sets and their 4-byte identifiers.

Identifier layout: 2-byte little-endian set code (the secpar value for the
named sets, 0 for ad-hoc sets), 1 byte hash profile, 1 byte challenge-1
derivation mode.
"""

import json
from dataclasses import dataclass, replace
from functools import cached_property

from .analysis import rounds_for_security
from .errors import InvalidParams
from .field import DEFAULT_MODULI, GF2m, find_irreducible
from .hashing import MODE_CHUNKED, MODE_XOF, PROFILE_LEGACY_SHA1, PROFILE_SHA2, HashSuite
from .ring import DCRing

ALLOWED_H = (160, 256, 384, 512)


@dataclass(frozen=True)
class ParamSet:
    name: str
    secpar: int
    level: int  # target impersonation security l, drives delta
    m: int
    n: int
    k: int
    r: int
    rho: int
    delta: int
    h: int
    q: int = 2
    reduction: int = 0  # 0 selects the default modulus for m
    profile: int = PROFILE_SHA2
    mode: int = MODE_XOF
    code: int = 0

    def __post_init__(self):
        if self.q != 2:
            raise InvalidParams("only q = 2 is supported")
        if self.n != 2 * self.k:
            raise InvalidParams("double circulant codes need n = 2k")
        if not 1 <= self.r <= min(self.m, self.n):
            raise InvalidParams(f"r must lie in 1..min(m, n), got {self.r}")
        if self.h not in ALLOWED_H:
            raise InvalidParams(f"h must be one of {ALLOWED_H}")
        if self.profile == PROFILE_LEGACY_SHA1 and self.h != 160:
            raise InvalidParams("the legacy SHA-1 profile is only defined for h = 160")
        if self.profile not in (PROFILE_SHA2, PROFILE_LEGACY_SHA1):
            raise InvalidParams(f"unknown hash profile {self.profile}")
        if self.mode not in (MODE_XOF, MODE_CHUNKED):
            raise InvalidParams(f"unknown challenge mode {self.mode}")
        expected = rounds_for_security(self.level, self.q, self.k, self.rho)
        if self.delta != expected:
            raise InvalidParams(f"delta = {self.delta} but level {self.level} needs {expected} rounds")
        if not 0 <= self.code < 1 << 16:
            raise InvalidParams("set code must fit in two bytes")

    @property
    def lam(self):
        return self.h // 2

    @cached_property
    def field(self):
        red = self.reduction or DEFAULT_MODULI.get(self.m) or find_irreducible(self.m)
        return GF2m(self.m, red)

    @cached_property
    def ring(self):
        return DCRing(self.field, self.k)

    @property
    def param_id(self):
        return self.code.to_bytes(2, "little") + bytes([self.profile, self.mode])

    def hasher(self):
        """A fresh hash suite; each carries its own call counter."""
        return HashSuite(self.h, self.profile)

    def with_options(self, **kw):
        return replace(self, **kw)

    def as_dict(self):
        return {
            "name": self.name, "secpar": self.secpar, "level": self.level, "q": self.q,
            "m": self.m, "n": self.n, "k": self.k, "r": self.r, "rho": self.rho,
            "delta": self.delta, "h": self.h, "reduction": self.reduction,
            "profile": self.profile, "mode": self.mode, "code": self.code,
        }


def _named(name, secpar, level, m, k, r, h):
    return ParamSet(name, secpar, level, m, 2 * k, k, r, 10, rounds_for_security(level, 2, k, 10), h, code=secpar)


RVDC_96 = _named("rvdc-96", 96, 80, 29, 11, 7, 160)
RVDC_125 = _named("rvdc-125", 125, 128, 31, 13, 8, 256)
RVDC_193 = _named("rvdc-193", 193, 192, 41, 17, 10, 384)
RVDC_252 = _named("rvdc-252", 252, 256, 47, 19, 12, 512)
TOY = ParamSet("toy", 16, 16, 5, 6, 3, 2, 1, rounds_for_security(16, 2, 3, 1), 160, code=16)

CANONICAL = (RVDC_96, RVDC_125, RVDC_193, RVDC_252)
NAMED = {p.name: p for p in CANONICAL + (TOY,)}
ALIASES = {"80": RVDC_96, "128": RVDC_125, "192": RVDC_193, "256": RVDC_252}


def by_name(name):
    key = str(name).lower()
    if key in NAMED:
        return NAMED[key]
    if key in ALIASES:
        return ALIASES[key]
    for p in NAMED.values():
        if key == str(p.secpar):
            return p
    raise InvalidParams(f"unknown parameter set {name!r}; known: {', '.join(NAMED)}")


def from_dict(d):
    d = dict(d)
    q = d.pop("q", 2)
    k = d["k"]
    d.setdefault("n", 2 * k)
    d.setdefault("name", "custom")
    d.setdefault("secpar", 0)
    d.setdefault("rho", 10)
    if "level" not in d:
        raise InvalidParams("explicit parameters need a target level")
    d.setdefault("delta", rounds_for_security(d["level"], q, k, d["rho"]))
    return ParamSet(q=q, **d)


def load(spec):
    """Named set, or a path to a JSON file with explicit parameters."""
    try:
        return by_name(spec)
    except InvalidParams:
        pass
    try:
        with open(spec) as fh:
            data = json.load(fh)
    except OSError:
        raise InvalidParams(f"unknown parameter set {spec!r}") from None
    except json.JSONDecodeError as exc:
        raise InvalidParams(f"parameter file {spec!r} is not valid JSON: {exc}") from None
    return from_dict(data)


def from_param_id(pid, candidates=None):
    """Resolve a 4-byte identifier against the named sets."""
    pid = bytes(pid[:4])
    if len(pid) != 4:
        raise InvalidParams("parameter id needs four bytes")
    code = int.from_bytes(pid[:2], "little")
    for p in candidates or NAMED.values():
        if p.code == code:
            return p.with_options(profile=pid[2], mode=pid[3])
    raise InvalidParams(f"no known parameter set with code {code}")
