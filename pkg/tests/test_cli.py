import subprocess
import sys

import pytest

from dircut.cli import (
    EXIT_INTERNAL,
    EXIT_NOCUT,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_USAGE,
    RunRecord,
    digest,
    main,
)
from dircut.io import parse_graph, parse_sparsified

TWO = "2 1 directed edge\n0 1 5\n"
K3 = "3 6 directed vertex\n0 1\n1 1\n2 1\n0 1\n1 0\n0 2\n2 0\n1 2\n2 1\n"


@pytest.fixture
def files(tmp_path):
    out = {}
    for name, text in {"two": TWO, "k3": K3, "bad": "2 1 directed edge\n0 1 zz\n"}.items():
        path = tmp_path / f"{name}.txt"
        path.write_text(text)
        out[name] = str(path)
    ring = "6 7 directed edge\n" + "".join(f"{i} {(i + 1) % 6} {3 + i}\n" for i in range(6)) + "0 3 2\n"
    (tmp_path / "ring.txt").write_text(ring)
    out["ring"] = str(tmp_path / "ring.txt")
    vring = "5 6 directed vertex\n" + "".join(f"{i} {i + 1}\n" for i in range(5))
    vring += "".join(f"{i} {(i + 1) % 5}\n" for i in range(5)) + "0 2\n"
    (tmp_path / "vring.txt").write_text(vring)
    out["vring"] = str(tmp_path / "vring.txt")
    return out


def _run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_two_vertex_record(files, capsys):
    code, out, _ = _run(capsys, "ec-rooted", files["two"], "--root", "0", "--eps", "0.2", "--seed", "7")
    rec = RunRecord.parse(out)
    assert code == EXIT_OK
    assert rec.fields["weight"] == "5" and rec.fields["seed"] == "7" and rec.fields["eps"] == "1/5"
    assert rec.fields["input_digest"] == digest(parse_graph(TWO))
    assert "elapsed" not in rec.fields


def test_exact_vc_global_nocut(files, capsys):
    code, out, _ = _run(capsys, "exact", "vc-global", files["k3"])
    assert code == EXIT_NOCUT and RunRecord.parse(out).fields["result"] == "nocut"


def test_parse_error_exit(files, capsys):
    code, _, err = _run(capsys, "ec-global", files["bad"])
    assert code == EXIT_PARSE and "line 2" in err


def test_unknown_flag_is_usage_error(files, capsys):
    code, _, err = _run(capsys, "ec-global", files["two"], "--bogus")
    assert code == EXIT_USAGE and "usage" in err


def test_wrong_graph_kind_is_usage_error(files, capsys):
    code, _, err = _run(capsys, "vc-rooted", files["two"], "--root", "0")
    assert code == EXIT_USAGE and "vertex-weighted" in err


def test_bad_constant_key(files, capsys):
    code, _, _ = _run(capsys, "ec-global", files["two"], "--constants", "nope=1")
    assert code == EXIT_USAGE


def test_strict_violation_is_internal_error(files, capsys, monkeypatch):
    import dircut.cli as cli

    def boom(*a, **k):
        raise AssertionError("injected")

    monkeypatch.setattr(cli, "approx_rooted_ec", boom)
    code, _, err = _run(capsys, "ec-rooted", files["two"], "--root", "0")
    assert code == EXIT_INTERNAL and "injected" in err


@pytest.mark.parametrize(
    "argv",
    [
        ("ec-rooted", "ring", "--root", "0"),
        ("ec-global", "ring"),
        ("vc-rooted", "vring", "--root", "0"),
        ("vc-global", "vring"),
    ],
)
def test_with_oracle_passes(files, capsys, argv):
    argv = [files.get(a, a) for a in argv]
    code, out, _ = _run(capsys, *argv, "--with-oracle", "--seed", "3")
    rec = RunRecord.parse(out)
    assert code == EXIT_OK and rec.fields["oracle_check"] == "pass"


def test_exact_variants(files, capsys):
    code, out, _ = _run(capsys, "exact", "ec-rooted", files["ring"], "--root", "0")
    assert code == EXIT_OK and RunRecord.parse(out).fields["weight"] == "3"
    code, _, _ = _run(capsys, "exact", "ec-rooted", files["ring"])
    assert code == EXIT_USAGE


def test_constants_override_changes_tau(files, capsys):
    _, base, _ = _run(capsys, "sparsify", files["ring"], "--root", "0", "--k", "1", "--lambda", "3")
    _, finer, _ = _run(
        capsys, "sparsify", files["ring"], "--root", "0", "--k", "1", "--lambda", "3", "--constants", "c_tau=1/128,c_w=256"
    )
    assert parse_sparsified(finer)[1] < parse_sparsified(base)[1]


def test_sparsify_output_parses(files, capsys):
    code, out, _ = _run(capsys, "sparsify", files["vring"], "--root", "0", "--k", "2", "--lambda", "2")
    g, tau = parse_sparsified(out)
    assert code == EXIT_OK and g.n == 9 and tau > 0


def test_local_query(files, capsys):
    code, out, _ = _run(capsys, "local-query", files["ring"], "--root", "0", "--t", "1", "--k", "1", "--lambda", "3")
    rec = RunRecord.parse(out)
    assert code == EXIT_OK and rec.fields["verdict"] == "cut" and rec.fields["weight"] == "3"


def test_seed_from_environment(files, capsys, monkeypatch):
    monkeypatch.setenv("DIRCUT_SEED", "41")
    _, out, _ = _run(capsys, "ec-global", files["ring"])
    assert RunRecord.parse(out).fields["seed"] == "41"


def test_timing_only_on_request(files, capsys):
    _, out, _ = _run(capsys, "ec-global", files["ring"], "--timing")
    assert "elapsed" in RunRecord.parse(out).fields


def test_record_round_trip(files, capsys):
    _, out, _ = _run(capsys, "ec-global", files["ring"])
    assert RunRecord.parse(out).render() == out


def test_stdin_and_subprocess_determinism(files):
    cmd = [sys.executable, "-m", "dircut.cli", "vc-global", "-", "--seed", "5"]
    text = open(files["vring"]).read()
    a = subprocess.run(cmd, input=text, capture_output=True, text=True)
    b = subprocess.run(cmd, input=text, capture_output=True, text=True)
    assert a.returncode == 0 and a.stdout == b.stdout and a.stdout


def test_bench_table(capsys):
    code, out, _ = _run(capsys, "bench", "--family", "random", "--sizes", "16,32", "--trials", "2", "--eps", "0.25")
    rec = RunRecord.parse(out).fields
    assert code == EXIT_OK
    assert {k for k in rec if k.endswith(".traversals")} == {
        f"bench.n{n}.t{t}.traversals" for n in (16, 32) for t in (0, 1)
    }
    assert "exponent" in rec
