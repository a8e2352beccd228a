import json
import os

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopfforge import corpus
from hopfforge.cli import main
from hopfforge.coproduct import MAPS
from hopfforge.instance import (
    E_tables, InstanceError, coproduct_tables, dense_algebra_spec, functional_spec, load_instance, parse_instance,
)

GOLDEN = os.path.join(os.path.dirname(__file__), "golden")
INSTANCES = os.path.join(GOLDEN, "instances")


def write(tmp_path, name, data):
    p = tmp_path / f"{name}.json"
    p.write_text(data if isinstance(data, str) else json.dumps(data))
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# ------------------------------------------------------------ instance format

@pytest.mark.parametrize("mutate,where", [
    (lambda d: d.pop("algebra"), "$.algebra"),
    (lambda d: d["algebra"].update(kind="lattice"), "$.algebra.kind"),
    (lambda d: d["algebra"]["products"].append([0, 9, []]), "$.algebra.products"),
    (lambda d: d["algebra"].update(unit=["1/1", "1/1"]), "$.algebra.unit"),
    (lambda d: d["functionals"].update(bad=[["nope", "1/1"]]), "$.functionals.bad[0][0]"),
    (lambda d: d["functionals"].update(bad=[["e", "x/y"]]), "$.functionals.bad[0][1]"),
    (lambda d: d["integrals"].update(left=["missing"]), "$.integrals.left[0]"),
    (lambda d: d["coproduct"].update(kind="mystery"), "$.coproduct.kind"),
    (lambda d: d.update(scalars="complex"), "$.scalars"),
])
def test_malformed_instances_name_the_location(mutate, where):
    data = corpus.generate("z2")
    mutate(data)
    with pytest.raises(InstanceError) as err:
        parse_instance(data)
    assert err.value.path.startswith(where)


def test_dimension_cap(monkeypatch):
    monkeypatch.setenv("HOPFFORGE_MAX_DIM", "3")
    with pytest.raises(InstanceError, match="exceeds the cap"):
        parse_instance(corpus.generate("z4"))
    monkeypatch.setenv("HOPFFORGE_MAX_DIM", "4")
    assert parse_instance(corpus.generate("z4")).algebra.dim == 4


def test_file_name_is_the_default_instance_name(tmp_path):
    data = corpus.generate("z2")
    data.pop("name")
    inst = load_instance(write(tmp_path, "my-z2", data))
    assert inst.name == "my-z2"


@given(st.sampled_from(["z3", "s3", "fun-s3", "fun-z4", "pair-groupoid-2", "fun-bundle-z2-pt"]))
@settings(max_examples=12, deadline=None)
def test_explicit_round_trip_preserves_canonical_maps(name):
    inst = parse_instance(corpus.generate(name), name)
    A = inst.algebra
    data = {
        "algebra": dense_algebra_spec(A),
        "coproduct": coproduct_tables(inst.coproduct),
        "functionals": {n: functional_spec(A, f) for n, f in inst.functionals.items()},
        "integrals": {"left": inst.left, "right": inst.right},
    }
    if isinstance(inst.E, dict):
        data["E"] = E_tables(A, inst.E)
    back = parse_instance(json.loads(json.dumps(data)), name)
    assert back.algebra.table() == A.table()
    assert back.functionals == inst.functionals
    assert back.E == inst.E
    for m in MAPS:
        assert back.coproduct.t_matrix(m) == inst.coproduct.t_matrix(m)


# ----------------------------------------------------------------------- CLI

def test_verify_exit_codes(capsys):
    code, out, _ = run(capsys, "verify", os.path.join(INSTANCES, "s3.json"))
    assert code == 0 and json.loads(out)["exitCode"] == 0
    code, out, _ = run(capsys, "verify", os.path.join(INSTANCES, "neg-zero-product.json"))
    assert code == 1
    failed = [c["checkId"] for c in json.loads(out)["checks"] if c["status"] == "fail"]
    assert "algebra.nondegenerate" in failed


def test_truncated_file_is_malformed_input(tmp_path, capsys):
    text = corpus.generate_text("z2")
    path = write(tmp_path, "trunc", text[: len(text) // 2])
    code, out, err = run(capsys, "verify", path)
    assert code == 2
    assert f"{path}:" in err
    assert json.loads(out)["exitCode"] == 2


def test_worst_exit_code_wins(tmp_path, capsys):
    bad = write(tmp_path, "bad", "{}")
    code, _, _ = run(capsys, "verify", os.path.join(INSTANCES, "z2.json"), bad,
                     os.path.join(INSTANCES, "neg-non-regular.json"))
    assert code == 2


def test_bad_flags_are_malformed_input(capsys):
    assert main(["verify"]) == 2
    assert main(["verify", "x.json", "--jobs", "0"]) == 2
    assert main(["verify", "x.json", "--format", "yaml"]) == 2
    assert main(["construct", "x.json", "--emit", "unicorn"]) == 2
    capsys.readouterr()


def test_bad_env_cap_is_malformed_input(monkeypatch, capsys):
    monkeypatch.setenv("HOPFFORGE_MAX_DIM", "lots")
    code, _, err = run(capsys, "verify", os.path.join(INSTANCES, "z2.json"))
    assert code == 2 and "HOPFFORGE_MAX_DIM" in err


def test_classify_text_output(capsys):
    code, out, _ = run(capsys, "classify", os.path.join(INSTANCES, "zint-window-4.json"), "--format", "text")
    assert code == 0
    assert "verdict: MultiplierHopf(window-verified)" in out
    assert "window-pass" in out


def test_classify_flags_a_wrong_expectation(tmp_path, capsys):
    data = corpus.generate("z2")
    data["expect"] = "Hopf"
    code, out, _ = run(capsys, "classify", write(tmp_path, "z2", data))
    assert code == 1
    assert json.loads(out)["classification"]["label"] == "HopfInvertibleS"


def test_window_flag_overrides_the_file(capsys):
    code, out, _ = run(capsys, "verify", os.path.join(INSTANCES, "zint-window-8.json"), "--window", "2")
    assert code == 0
    rep = json.loads(out)
    assert rep["classification"]["label"] == "MultiplierHopf(window-verified)"


def test_construct_emits_counit_and_antipode(capsys):
    code, out, _ = run(capsys, "construct", os.path.join(INSTANCES, "fun-z3.json"), "--emit", "counit,antipode")
    assert code == 0
    art = json.loads(out)["artifacts"]
    assert art["counit"] == [["e", "1/1"]]
    assert art["antipode"] == [["e", [["e", "1/1"]]], ["g1", [["g2", "1/1"]]], ["g2", [["g1", "1/1"]]]]


def test_construct_emits_E_and_F(capsys):
    code, out, _ = run(capsys, "construct", os.path.join(INSTANCES, "pair-groupoid-2.json"), "--emit", "E,F")
    assert code == 0
    art = json.loads(out)["artifacts"]
    assert art["E"]["element"] == [[[0, 0], "1/1"], [[3, 3], "1/1"]]
    assert set(art["F"]) == {"F1", "F2", "F3", "F4"}


def test_construct_refuses_weak_antipode(capsys):
    code, out, _ = run(capsys, "construct", os.path.join(INSTANCES, "pair-groupoid-2.json"), "--emit", "antipode")
    assert code == 1
    assert json.loads(out)["checks"][-1]["checkId"] == "construct.antipode"


def test_parallel_jobs_keep_order_and_bytes(capsys):
    files = [os.path.join(INSTANCES, f"{n}.json") for n in ("z3", "fun-s3", "pair-groupoid-2", "neg-no-E")]
    c1, serial, _ = run(capsys, "verify", *files)
    c2, parallel, _ = run(capsys, "verify", *files, "--jobs", "3")
    assert c1 == c2 == 1
    assert serial == parallel


def test_timing_is_opt_in(capsys):
    _, plain, _ = run(capsys, "verify", os.path.join(INSTANCES, "z2.json"))
    _, timed, _ = run(capsys, "verify", os.path.join(INSTANCES, "z2.json"), "--timing")
    assert "timing" not in json.loads(plain)
    rep = json.loads(timed)
    assert "timing" in rep and all("timing" in c for c in rep["checks"])


def test_corpus_command(tmp_path, capsys):
    code, out, _ = run(capsys, "corpus", "--list")
    assert code == 0 and out.split() == corpus.names()
    code, _, _ = run(capsys, "corpus", "z2", "s3", "--out", str(tmp_path))
    assert code == 0
    assert (tmp_path / "s3.json").read_text() == corpus.generate_text("s3")
    assert main(["corpus", "nope", "--out", str(tmp_path)]) == 2


@pytest.mark.parametrize("name", corpus.names())
def test_reports_match_golden(name, capsys):
    code, out, _ = run(capsys, "verify", os.path.join(INSTANCES, f"{name}.json"))
    with open(os.path.join(GOLDEN, "reports", f"{name}.json"), encoding="utf-8") as fh:
        assert out == fh.read()
    assert code == json.loads(out)["exitCode"]
