"""Command-line front end: ``rvdc <command> [options]``.

Exit codes: 0 success / signature accepted, 1 signature rejected or
self-test mismatch, 2 malformed input or bad usage.
"""

import argparse
import csv
import io
import json
import os
import statistics
import sys
import time
from pathlib import Path

from . import analysis, protocol
from . import params as P
from . import signature as S
from .bits import XofStream
from .errors import InvalidParams, MalformedSignature, RVDCError
from .ring import keygen, public_key_bytes, public_key_from_bytes, secret_key_bytes, secret_key_from_bytes

ENV_PARAMS = "RVDC_DEFAULT_PARAMS"
KAT_PATH = Path(__file__).with_name("data") / "kat.jsonl"

EXIT_OK, EXIT_REJECT, EXIT_MALFORMED = 0, 1, 2


class UsageError(Exception):
    pass


def _err(msg):
    print(f"rvdc: {msg}", file=sys.stderr)


def _parse_seed(text):
    if text is None:
        return None
    try:
        seed = bytes.fromhex(text)
    except ValueError:
        raise UsageError(f"--seed must be hex, got {text!r}") from None
    if not seed:
        raise UsageError("--seed must not be empty")
    return seed


def keygen_rng(seed):
    """Deterministic key-generation randomness; fresh entropy if seed is None."""
    return XofStream(b"rvdc-keygen" + seed) if seed is not None else XofStream()


def resolve_params(spec, header=None):
    """--params, then the environment, then a file header, then the 96-bit set."""
    if spec is None:
        spec = os.environ.get(ENV_PARAMS)
    if spec is not None:
        params = P.load(spec)
    elif header is not None:
        params = P.from_param_id(header)
    else:
        params = P.RVDC_96
    report = analysis.validate(params)
    if params.code == 0:
        for w in report.warnings:
            _err(f"warning: {w}")
    return params


def _read(path, what):
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {what} {path}: {exc.strerror}") from None


def _msg_bytes(args):
    if args.msg is None:
        return sys.stdin.buffer.read()
    return _read(args.msg, "message")


def _pub_path(sk_path):
    p = Path(sk_path)
    return p.with_suffix(".pk") if p.suffix == ".sk" else Path(str(p) + ".pk")


# -- commands ------------------------------------------------------------------------

def cmd_keygen(args):
    if not args.out:
        raise UsageError("keygen needs --out BASE (writes BASE.sk and BASE.pk)")
    params = resolve_params(args.params)
    kp = keygen(params.ring, params.r, keygen_rng(_parse_seed(args.seed)))
    base = Path(args.out)
    Path(str(base) + ".sk").write_bytes(secret_key_bytes(params, kp.sk))
    Path(str(base) + ".pk").write_bytes(public_key_bytes(params, kp.pk))
    print(f"wrote {base}.sk and {base}.pk ({params.name})")
    return EXIT_OK


def cmd_sign(args):
    if not args.key or not args.out:
        raise UsageError("sign needs --key SK and --out SIG")
    sk_data = _read(args.key, "secret key")
    params = resolve_params(args.params, sk_data[:4] if len(sk_data) >= 4 else None)
    pub = args.pub or _pub_path(args.key)
    sk = secret_key_from_bytes(params, sk_data)
    pk = public_key_from_bytes(params, _read(pub, "public key"))
    scheme = S.SCHEMES[args.scheme]
    sgn = S.sign(scheme, sk, pk, _msg_bytes(args), params, seed=_parse_seed(args.seed), threads=args.threads)
    data = S.to_bytes(params, sgn)
    Path(args.out).write_bytes(data)
    print(f"wrote {args.out}: {args.scheme} signature, {len(data)} bytes")
    return EXIT_OK


def cmd_verify(args):
    if not args.key or not args.sig:
        raise UsageError("verify needs --key PK and --sig SIG")
    pk_data = _read(args.key, "public key")
    params = resolve_params(args.params, pk_data[:4] if len(pk_data) >= 4 else None)
    pk = public_key_from_bytes(params, pk_data)
    sig_data = _read(args.sig, "signature")
    ok = S.verify(pk, _msg_bytes(args), params, sig_data)
    print("accept" if ok else "reject")
    return EXIT_OK if ok else EXIT_REJECT


def cmd_id_demo(args):
    params = resolve_params(args.params)
    seed = _parse_seed(args.seed)
    rng = keygen_rng(seed)
    kp = keygen(params.ring, params.r, rng)
    run_rng = XofStream(b"rvdc-demo" + seed) if seed is not None else XofStream()
    rounds = args.rounds if args.rounds is not None else params.delta
    hasher = params.hasher()
    dump = open(args.out, "w") if args.out else sys.stdout
    info = sys.stdout if args.out else sys.stderr
    accepted = 0
    try:
        for i in range(rounds):
            if args.cheat:
                prover = protocol.CheatingProver(params, kp.pk, run_rng.getrandbits(1), hasher)
            else:
                prover = protocol.ProverState(params, kp.sk, kp.pk, hasher)
            t, ok = protocol.run_round(params, prover, kp.pk, run_rng, hasher)
            accepted += ok
            for line in protocol.transcript_lines(params, t, i):
                print(line, file=dump)
            a = "".join(map(str, t.a.alphas))
            print(f"round {i}: a={a} b={t.b} {'accept' if ok else 'reject'}", file=info)
    finally:
        if args.out:
            dump.close()
    rate = accepted / rounds if rounds else 0.0
    who = "cheating prover" if args.cheat else "honest prover"
    print(f"{who}: {accepted}/{rounds} rounds accepted (rate {rate:.3f})", file=info)
    if args.cheat and rounds:
        print(f"probability of passing all {params.delta} rounds ~ {rate ** params.delta:.3e}", file=info)
    return EXIT_OK


PARAM_COLUMNS = [
    "secpar", "q", "m", "n", "k", "r", "rho", "delta", "h", "log2_A", "log2_B", "log2_C", "log2_D",
    "gv_distance", "sk_bits", "pk_bits", "rvdc_sgn_bits", "crvdc_sgn_bits",
]


def params_rows(sets=None):
    rows = []
    for p in sets or P.CANONICAL:
        rep = analysis.validate(p)
        rv = S.size_model(p, S.SCHEME_RVDC)
        cr = S.size_model(p, S.SCHEME_CRVDC)
        rows.append({
            "secpar": p.secpar, "q": p.q, "m": p.m, "n": p.n, "k": p.k, "r": p.r, "rho": p.rho,
            "delta": p.delta, "h": p.h,
            "log2_A": round(rep.log2_A, 3), "log2_B": round(rep.log2_B, 3),
            "log2_C": round(rep.log2_C, 3), "log2_D": round(rep.log2_D, 3),
            "gv_distance": rep.gv_distance, "sk_bits": rv["sk_bits"], "pk_bits": rv["pk_bits"],
            "rvdc_sgn_bits": rv["expected_sgn_bits"], "crvdc_sgn_bits": cr["expected_sgn_bits"],
        })
    return rows


def format_params(rows, fmt):
    if fmt == "json":
        return json.dumps(rows, indent=2)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=PARAM_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue().rstrip("\n")
    lines = ["| " + " | ".join(PARAM_COLUMNS) + " |", "|" + "---|" * len(PARAM_COLUMNS)]
    for row in rows:
        lines.append("| " + " | ".join(str(row[c]) for c in PARAM_COLUMNS) + " |")
    return "\n".join(lines)


def cmd_params(args):
    sets = [P.load(args.params)] if args.params else None
    print(format_params(params_rows(sets), args.format))
    return EXIT_OK


def _median_rate(fn, iterations, warmup, before=None):
    for _ in range(warmup):
        if before:
            before()
        fn()
    times = []
    for _ in range(iterations):
        if before:
            before()
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    med = statistics.median(times)
    return 1.0 / med if med > 0 else float("inf")


def bench(params, scheme, iterations=30, warmup=3, seed=b"bench"):
    """ops/sec medians for keygen, sign and verify plus hash-call counts."""
    rng = keygen_rng(seed)
    kp = keygen(params.ring, params.r, rng)
    msg = b"benchmark message"
    counter = iter(range(1 << 30))
    keygen_ops = _median_rate(lambda: keygen(params.ring, params.r, rng), iterations, warmup)
    sign_ops = _median_rate(
        lambda: S.sign(scheme, kp.sk, kp.pk, msg, params, seed=seed + next(counter).to_bytes(4, "little")),
        iterations, warmup,
    )
    sgn = S.sign(scheme, kp.sk, kp.pk, msg, params, seed=seed)
    # seed-derived matrices are memoised; start every verification cold
    verify_ops = _median_rate(lambda: S.verify(kp.pk, msg, params, sgn), iterations, warmup,
                              before=S._derive_pq.cache_clear)
    hs = params.hasher()
    S.sign(scheme, kp.sk, kp.pk, msg, params, seed=seed, hasher=hs)
    hv = params.hasher()
    S._derive_pq.cache_clear()
    S.verify(kp.pk, msg, params, sgn, hasher=hv)
    return {
        "params": params.name, "scheme": "crvdc" if scheme == S.SCHEME_CRVDC else "rvdc",
        "keygen_ops": keygen_ops, "sign_ops": sign_ops, "verify_ops": verify_ops,
        "sign_hash_calls": hs.calls, "verify_hash_calls": hv.calls, "delta": params.delta,
    }


def cmd_bench(args):
    if args.iterations < 30:
        raise UsageError("bench needs at least 30 iterations for a stable median")
    sets = [P.load(args.params)] if args.params else list(P.CANONICAL)
    schemes = [S.SCHEMES[args.scheme]] if args.scheme else [S.SCHEME_RVDC, S.SCHEME_CRVDC]
    results = []
    for p in sets:
        for sc in schemes:
            r = bench(p, sc, args.iterations, seed=_parse_seed(args.seed) or b"bench")
            results.append(r)
            if args.format != "json":
                print(f"{r['params']:>9} {r['scheme']:>5}  keygen {r['keygen_ops']:10.2f}/s  "
                      f"sign {r['sign_ops']:8.2f}/s  verify {r['verify_ops']:8.2f}/s  "
                      f"hashes sign={r['sign_hash_calls']} verify={r['verify_hash_calls']}")
    if args.format == "json":
        print(json.dumps(results, indent=2))
    return EXIT_OK


def make_kat(params, scheme, seed, msg):
    kp = keygen(params.ring, params.r, keygen_rng(seed))
    sgn = S.sign(scheme, kp.sk, kp.pk, msg, params, seed=seed)
    return {
        "params": params.name,
        "scheme": "crvdc" if scheme == S.SCHEME_CRVDC else "rvdc",
        "master_seed_hex": seed.hex(),
        "msg_hex": msg.hex(),
        "sk_hex": secret_key_bytes(params, kp.sk).hex(),
        "pk_hex": public_key_bytes(params, kp.pk).hex(),
        "sgn_hex": S.to_bytes(params, sgn).hex(),
    }


def check_kat(vec):
    """List of mismatching fields for one test vector (empty when it passes)."""
    params = P.by_name(vec["params"])
    scheme = S.SCHEMES[vec["scheme"]]
    fresh = make_kat(params, scheme, bytes.fromhex(vec["master_seed_hex"]), bytes.fromhex(vec["msg_hex"]))
    bad = [f for f in ("sk_hex", "pk_hex", "sgn_hex") if fresh[f] != vec[f]]
    pk = public_key_from_bytes(params, bytes.fromhex(vec["pk_hex"]))
    if not S.verify(pk, bytes.fromhex(vec["msg_hex"]), params, bytes.fromhex(vec["sgn_hex"])):
        bad.append("verify")
    return bad


def cmd_selftest(args):
    path = Path(args.kat) if args.kat else KAT_PATH
    try:
        vectors = [json.loads(line) for line in path.read_text().splitlines() if line.strip()]
    except OSError as exc:
        raise UsageError(f"cannot read test vectors {path}: {exc.strerror}") from None
    failures = 0
    for i, vec in enumerate(vectors):
        bad = check_kat(vec)
        status = "ok" if not bad else "FAIL (" + ", ".join(bad) + ")"
        print(f"vector {i}: {vec['params']} {vec['scheme']} {status}")
        failures += bool(bad)
    print(f"{len(vectors) - failures}/{len(vectors)} test vectors passed")
    return EXIT_OK if failures == 0 and vectors else EXIT_REJECT


# -- argument parsing -----------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--params", help="named set (rvdc-96, rvdc-125, rvdc-193, rvdc-252, toy) or a JSON file")
    common.add_argument("--seed", help="hex seed for deterministic runs")
    common.add_argument("--format", choices=("md", "csv", "json"), default="md")

    ap = argparse.ArgumentParser(prog="rvdc", description="RVDC / cRVDC rank-metric signatures")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", parents=[common], help="generate a key pair")
    p.add_argument("--out", help="output base name")
    p.set_defaults(func=cmd_keygen)

    for name, func in (("sign", cmd_sign), ("verify", cmd_verify)):
        p = sub.add_parser(name, parents=[common], help=f"{name} a message")
        p.add_argument("--scheme", choices=tuple(S.SCHEMES), default="rvdc")
        p.add_argument("--msg", help="message file (default: standard input)")
        p.add_argument("--key", help="secret key for sign, public key for verify")
        p.add_argument("--pub", help="public key for sign (default: next to the secret key)")
        p.add_argument("--sig", help="signature file to verify")
        p.add_argument("--out", help="signature output path")
        p.add_argument("--threads", type=int, default=1)
        p.set_defaults(func=func)

    p = sub.add_parser("id-demo", parents=[common], help="run the identification protocol in-process")
    p.add_argument("--rounds", type=int)
    p.add_argument("--cheat", action="store_true", help="replace the prover by an impersonator")
    p.add_argument("--out", help="write the JSON-lines transcript here")
    p.set_defaults(func=cmd_id_demo)

    p = sub.add_parser("params", parents=[common], help="print parameter and size tables")
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("bench", parents=[common], help="measure keygen/sign/verify throughput")
    p.add_argument("--scheme", choices=tuple(S.SCHEMES))
    p.add_argument("--iterations", type=int, default=30)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("selftest", parents=[common], help="check the embedded test vectors")
    p.add_argument("--kat", help="alternative JSON-lines vector file")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_MALFORMED
    try:
        return args.func(args)
    except MalformedSignature as exc:
        _err(f"malformed input: {exc}")
        return EXIT_MALFORMED
    except (UsageError, InvalidParams) as exc:
        _err(str(exc))
        return EXIT_MALFORMED
    except RVDCError as exc:
        _err(f"error: {exc}")
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
