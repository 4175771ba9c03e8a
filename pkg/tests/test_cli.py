import json

import pytest

from rvdc import cli
from rvdc.params import RVDC_96, TOY


@pytest.fixture
def work(tmp_path, monkeypatch):
    monkeypatch.delenv(cli.ENV_PARAMS, raising=False)
    msg = tmp_path / "msg.txt"
    msg.write_bytes(b"attack at dawn")
    return tmp_path


def run(*argv):
    return cli.main([str(a) for a in argv])


@pytest.mark.parametrize("params", ["toy", "rvdc-96", "rvdc-125", "rvdc-193", "rvdc-252"])
def test_pipeline(work, params):
    base = work / "key"
    assert run("keygen", "--params", params, "--seed", "01", "--out", base) == 0
    for scheme in ("rvdc", "crvdc"):
        sig = work / f"{scheme}.sig"
        assert run("sign", "--scheme", scheme, "--key", f"{base}.sk", "--msg", work / "msg.txt", "--out", sig) == 0
        assert run("verify", "--key", f"{base}.pk", "--msg", work / "msg.txt", "--sig", sig) == 0


def test_reject_and_malformed(work, capsys):
    base = work / "key"
    run("keygen", "--params", "toy", "--out", base)
    sig = work / "s.sig"
    run("sign", "--key", f"{base}.sk", "--msg", work / "msg.txt", "--out", sig)
    other = work / "other.txt"
    other.write_bytes(b"attack at dusk")
    assert run("verify", "--key", f"{base}.pk", "--msg", other, "--sig", sig) == 1
    short = work / "short.sig"
    short.write_bytes(sig.read_bytes()[:40])
    capsys.readouterr()
    assert run("verify", "--key", f"{base}.pk", "--msg", work / "msg.txt", "--sig", short) == 2
    assert "offset" in capsys.readouterr().err
    assert run("verify", "--key", work / "missing.pk", "--sig", sig) == 2
    assert run("frobnicate") == 2


def test_seeded_outputs_identical(work):
    for d in ("a", "b"):
        run("keygen", "--params", "toy", "--seed", "abcd", "--out", work / d)
        run("sign", "--key", work / f"{d}.sk", "--msg", work / "msg.txt", "--seed", "99", "--out", work / f"{d}.sig")
    for ext in (".sk", ".pk", ".sig"):
        assert (work / f"a{ext}").read_bytes() == (work / f"b{ext}").read_bytes()


def test_env_default_params(work, monkeypatch):
    monkeypatch.setenv(cli.ENV_PARAMS, "toy")
    run("keygen", "--out", work / "k")
    assert (work / "k.pk").read_bytes()[:4] == TOY.param_id


def test_explicit_param_file(work):
    spec = work / "p.json"
    spec.write_text(json.dumps({"level": 16, "m": 7, "k": 5, "r": 2, "rho": 1, "h": 160}))
    assert run("keygen", "--params", spec, "--out", work / "k") == 0
    assert run("sign", "--params", spec, "--key", work / "k.sk", "--msg", work / "msg.txt", "--out", work / "s") == 0
    assert run("verify", "--params", spec, "--key", work / "k.pk", "--msg", work / "msg.txt", "--sig", work / "s") == 0
    bad = work / "bad.json"
    bad.write_text(json.dumps({"level": 16, "m": 7, "k": 5, "r": 9, "h": 160}))
    assert run("keygen", "--params", bad, "--out", work / "k2") == 2


def test_id_demo(work, capsys):
    out1, out2 = work / "t1.jsonl", work / "t2.jsonl"
    assert run("id-demo", "--params", "rvdc-96", "--rounds", "20", "--seed", "07", "--out", out1) == 0
    text = capsys.readouterr().out
    assert "20/20 rounds accepted" in text
    run("id-demo", "--params", "rvdc-96", "--rounds", "20", "--seed", "07", "--out", out2)
    assert out1.read_text() == out2.read_text()
    recs = [json.loads(line) for line in out1.read_text().splitlines()]
    assert len(recs) == 100 and {"pass", "payload_hex"} <= set(recs[0])
    capsys.readouterr()
    run("id-demo", "--params", "toy", "--rounds", "2000", "--cheat", "--seed", "01", "--out", work / "c.jsonl")
    line = [l for l in capsys.readouterr().out.splitlines() if "cheating prover" in l][0]
    rate = float(line.split("rate ")[1].rstrip(")"))
    assert 0.45 < rate < 0.55


@pytest.mark.parametrize("fmt", ["md", "csv", "json"])
def test_params_table(capsys, fmt):
    assert run("params", "--format", fmt) == 0
    first = capsys.readouterr().out
    run("params", "--format", fmt)
    assert capsys.readouterr().out == first
    for value in ("957", "960", "1437915", "95.8"):
        assert value in first


def test_selftest(capsys):
    assert run("selftest") == 0
    assert "test vectors passed" in capsys.readouterr().out


def test_selftest_detects_mismatch(tmp_path):
    lines = cli.KAT_PATH.read_text().splitlines()
    vec = json.loads(lines[0])
    vec["msg_hex"] = "00" + vec["msg_hex"]
    bad = tmp_path / "bad.jsonl"
    bad.write_text(json.dumps(vec) + "\n")
    assert run("selftest", "--kat", bad) == 1


def test_bench_small(capsys):
    assert run("bench", "--iterations", "5") == 2
    res = cli.bench(TOY, 0, iterations=30)
    assert res["sign_hash_calls"] == 3 * TOY.delta + 2
    assert res["verify_hash_calls"] == 2 * TOY.delta + 2
    assert res["keygen_ops"] > res["sign_ops"]
