import io
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chernsimons.cli import run
from chernsimons.cyclo import Level
from chernsimons.formats import ParseError, detect_kind, format_manifold, format_network, parse_manifold, parse_network
from chernsimons.states import modular_gate
from chernsimons.surgery import random_presentation, state_from_presentation
from chernsimons.tensornet import clifford_word, network_gate, random_word

from conftest import hopf_state

SAMPLES = Path(__file__).resolve().parent.parent / "samples"
HOPF = "level 3\ncomponent a boundary\ncomponent b boundary\nlink a b 1\n"


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    rc = run([str(a) for a in argv], out, err)
    return rc, out.getvalue(), err.getvalue()


# parsing ----------------------------------------------------------------------------

def test_parse_hopf_manifold():
    p = parse_manifold(HOPF)
    assert p.names == ["a", "b"]
    assert p.linking.tolist() == [[0, 1], [1, 0]]
    assert state_from_presentation(p).amps.equals(hopf_state(Level(3)).amps)


def test_parse_shift_network():
    net = parse_network((SAMPLES / "shift.net").read_text())
    assert network_gate(net).equals(modular_gate(Level(5), "X"))


def test_comments_and_whitespace():
    text = "# header\n  level   3  # trailing\n\ncomponent a boundary\n\tcomponent b boundary\nlink a b 1\n"
    assert format_manifold(parse_manifold(text)) == HOPF


def test_symmetric_link_redeclaration_is_deduplicated():
    assert parse_manifold(HOPF + "link b a 1\n").linking[0, 1] == 1


@pytest.mark.parametrize(
    ("text", "message", "line", "col"),
    [
        ("level 4\ncomponent a boundary\n", "level must be an odd prime", 1, 7),
        ("level 3\ncomponent a surgery rep 1\n", "rep label only on boundary", 2, 21),
        ("level 3\ncomponent a boundary\ncomponent a surgery\n", "duplicate component name", 3, 11),
        (HOPF + "link b a 2\n", "asymmetric link redeclaration", 5, 10),
        ("level 3\ncomponent a boundary\nlink a c 1\n", "unknown component 'c'", 3, 8),
        ("level 3\ncomponent a boundary\nframe a x\n", "expected an integer framing", 3, 9),
        ("level 3\ncomponent a ghost\n", "role must be", 2, 13),
        ("level 3\ncomponent a boundary rep 3\n", "rep label 3 is outside", 2, 26),
        ("level 3\nlevel 5\ncomponent a boundary\n", "level declared twice", 2, 1),
        ("level 3\ncomponent a boundary\nknot a\n", "unknown statement 'knot'", 3, 1),
        ("component a boundary\n", "missing 'level'", 1, 1),
    ],
)
def test_manifold_errors(text, message, line, col):
    with pytest.raises(ParseError, match=message) as info:
        parse_manifold(text)
    assert (info.value.line, info.value.col) == (line, col)
    assert str(info.value).startswith(f"line {line}, col {col}: ")


@pytest.mark.parametrize(
    ("text", "message", "line"),
    [
        ("level 3\nnode f fusion\nwire f.out f.in3\nopen f.in1 f.in2\n", "has no port 'in3'", 3),
        ("level 3\nnode f fusion\nnode g S\nwire f.out g.in\nopen f.out\n", "port already wired: f.out", 5),
        ("level 3\nnode f fusion\nopen f.in1 f.out\n", "dangling port f.in2", 1),
        ("level 3\nnode q ket\n", "needs an integer value", 2),
        ("level 3\nnode q hadamard\n", "unknown node kind", 2),
        ("node q S\n", "'level' must come before", 1),
        ("level 3\nnode f fusion\nwire f.in1 f.in2\n", "must join an out port to an in port", 3),
        ("level 3\nnode f S\nwire f.out g\n", "expected <node>.<port>", 3),
    ],
)
def test_network_errors(text, message, line):
    with pytest.raises(ParseError, match=message) as info:
        parse_network(text)
    assert info.value.line == line


def test_detect_kind():
    assert detect_kind(HOPF) == "manifold"
    assert detect_kind((SAMPLES / "fusion.net").read_text()) == "network"
    with pytest.raises(ParseError):
        detect_kind("level 3\n")


@given(st.integers(0, 2**32 - 1), st.sampled_from([3, 5, 7, 13]))
def test_manifold_round_trip(seed, k):
    p = random_presentation(Level(k), np.random.default_rng(seed), label_prob=0.3)
    text = format_manifold(p)
    q = parse_manifold(text)
    assert format_manifold(q) == text
    assert q.names == p.names and np.array_equal(q.linking, p.linking)
    assert [c.rep_label for c in q.components] == [c.rep_label for c in p.components]


@given(st.integers(0, 2**32 - 1))
def test_network_round_trip(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 3))
    net = clifford_word(Level(5), random_word(rng, n, 4), n)
    text = format_network(net)
    assert format_network(parse_network(text)) == text


# commands -----------------------------------------------------------------------------

def test_ghz_on_fusion_network():
    rc, out, _ = cli("ghz", "-f", SAMPLES / "fusion.net", "--A", "f.in1", "--B", "f.in2", "--C", "f.out")
    assert rc == 0 and out.strip() == "g=1"
    rc, out, _ = cli("ghz", "--json", "-f", SAMPLES / "fusion.net", "--A", "f.in1", "--B", "f.in2", "--C", "f.out")
    data = json.loads(out)
    assert data["g"] == 1 and isinstance(data["g"], int)
    assert data["entropies_dits"] == {"A": 1, "B": 1, "C": 1}


def test_entropy_on_hopf():
    rc, out, _ = cli("entropy", "-f", SAMPLES / "hopf.mf", "--region", "a")
    assert rc == 0 and out.startswith("S(a) = 1 dit")
    rc, out, _ = cli("--json", "entropy", "-f", SAMPLES / "hopf.mf", "--region", "a")
    e = json.loads(out)["entropy"]
    assert e["exact_dits"] == 1
    assert e["nats"] == pytest.approx(np.log(3), abs=1e-12)


def test_verlinde():
    rc, out, _ = cli("verlinde", "--r", "5", "--genus", "2")
    assert rc == 0
    assert "dim genus 2 14" in out.splitlines()
    rc, out, _ = cli("verlinde", "--r", "5", "--genus", "2", "--json")
    data = json.loads(out)
    assert data["dim"] == 14 and data["anyons"] == 3 and data["inequality"] is True


def test_eval_json_carries_exact_and_float_amplitudes():
    rc, out, _ = cli("eval", "--json", "-f", SAMPLES / "hopf.mf")
    assert rc == 0
    state = json.loads(out)["state"]
    assert state["level"] == 3 and [s["name"] for s in state["sites"]] == ["a", "b"]
    amps = state["amplitudes"]
    assert len(amps) == 9
    w = np.exp(2j * np.pi / 3)
    for a in amps:
        j, l = a["index"]
        assert complex(*a["value"]) == pytest.approx(w ** (-j * l), abs=1e-12)
        assert len(a["coeffs"]) == 4 and a["kden"] == 0


def test_json_is_byte_stable():
    args = ("eval", "--json", "-f", SAMPLES / "framed.mf")
    assert cli(*args)[1] == cli(*args)[1]
    args = ("check-stabilizer", "--json", "-f", SAMPLES / "framed.mf")
    assert cli(*args)[1] == cli(*args)[1]


def test_check_stabilizer_and_tableau():
    rc, out, _ = cli("check-stabilizer", "-f", SAMPLES / "framed.mf")
    assert rc == 0 and out.startswith("stabilizer: yes")
    rc, out, _ = cli("check-stabilizer", "-f", SAMPLES / "hopf.mf")
    assert "converse-unproven" in out
    rc, out, _ = cli("tableau", "--json", "-f", SAMPLES / "framed.mf")
    assert rc == 0 and len(json.loads(out)["generators"]) == 2
    rc, out, _ = cli("tableau", "-f", SAMPLES / "fusion.net")
    assert rc == 0 and len(out.strip().splitlines()) >= 3


def test_sign_flip_conjugates():
    a = json.loads(cli("eval", "--json", "-f", SAMPLES / "framed.mf")[1])["state"]["amplitudes"]
    b = json.loads(cli("eval", "--json", "--sign-flip", "-f", SAMPLES / "framed.mf")[1])["state"]["amplitudes"]
    for x, y in zip(a, b):
        assert x["value"][0] == pytest.approx(y["value"][0]) and x["value"][1] == pytest.approx(-y["value"][1])


@pytest.mark.parametrize(
    ("argv", "rc", "needle"),
    [
        (["eval", "-f", SAMPLES / "ill_defined.mf"], 2, "ill-defined"),
        (["tableau", "-f", SAMPLES / "ill_defined.mf"], 2, "ill-defined"),
        (["eval"], 1, "-f/--file"),
        (["eval", "-f", "/nonexistent/x.mf"], 1, "-f: cannot read"),
        (["verlinde", "--r", "4"], 1, "--r"),
        (["verlinde", "--r", "5", "--genus", "-1"], 1, "--genus"),
        (["entropy", "-f", SAMPLES / "hopf.mf", "--region", "zz"], 1, "--region"),
        (["ghz", "-f", SAMPLES / "fusion.net", "--A", "f.in1", "--B", "f.in1", "--C", "f.out"], 1, "partition"),
        (["frobnicate"], 1, "invalid choice"),
    ],
)
def test_exit_codes(argv, rc, needle):
    code, out, err = cli(*argv)
    assert code == rc
    assert needle in err and out == ""


def test_parse_error_exit_code(tmp_path):
    f = tmp_path / "bad.mf"
    f.write_text("level 3\ncomponent a surgery rep 1\n")
    rc, _, err = cli("eval", "-f", f)
    assert rc == 1 and "line 2, col 21" in err


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "chernsimons", "verlinde", "--r", "7"],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0 and "dim genus 2 30" in r.stdout
