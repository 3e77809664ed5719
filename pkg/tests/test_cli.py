import json

import pytest

from kitlab import io
from kitlab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate(capsys):
    assert run(capsys, "validate", "C6")[0] == 0
    code, _, err = run(capsys, "validate", str(io.FIXTURE_DIR / "bad_C6_nonassoc.json"))
    assert code == 1 and "NonAssociative" in err
    code, _, err = run(capsys, "validate", "bad_Iso2_kit")
    assert code == 1 and "NotConjugationClosed" in err


def test_validate_parse_error(capsys, tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{\n  \"kind\": }")
    code, _, err = run(capsys, "validate", str(p))
    assert code == 1 and "line 2 column" in err


def test_kit_orth_trivial(capsys):
    code, out, _ = run(capsys, "kit", "orth", "trivial", "C6")
    assert code == 0 and "[maximal]" in out


def test_enumerate_boolean(capsys):
    code, out, _ = run(capsys, "kit", "enumerate", "--boolean", str(io.FIXTURE_DIR / "C6.json"))
    assert code == 0 and out.splitlines()[0] == "4 Boolean kits"
    code, out, _ = run(capsys, "kit", "enumerate", "--boolean", "C6", "--json")
    assert json.loads(out)["count"] == 4


def test_limp_byte_for_byte(capsys, tmp_path):
    for a, b in [("C6_kit_g2", "C6_kit_g3"), ("C6_kit_trivial", "C6_kit_maximal")]:
        _, limp, _ = run(capsys, "kit", "connect", "limp", a, b, "--json")
        _, ob, _ = run(capsys, "kit", "orth", b, "--json")
        (tmp_path / "ob.json").write_text(ob)
        _, t, _ = run(capsys, "kit", "connect", "tensor", a, str(tmp_path / "ob.json"), "--json")
        (tmp_path / "t.json").write_text(t)
        _, rhs, _ = run(capsys, "kit", "orth", str(tmp_path / "t.json"), "--json")
        assert limp == rhs


def test_kit_boolean_exit_codes(capsys, tmp_path):
    assert run(capsys, "kit", "boolean", "C6_kit_g3")[0] == 0
    p = tmp_path / "k.json"
    p.write_text(json.dumps({"kind": "kit", "groupoid": "S3",
                             "family": {"*": [["id", "(01)"], ["id", "(02)"], ["id", "(12)"]]}}))
    assert run(capsys, "kit", "boolean", str(p))[0] == 1


def test_bang_budget(capsys):
    code, _, err = run(capsys, "kit", "connect", "bang", "trivial:C6", "--length", "9")
    assert code == 3 and "budget" in err


def test_prof_commands(capsys):
    code, out, _ = run(capsys, "prof", "compose", "id", "C6_hom")
    assert code == 0 and "isomorphic to the non-identity argument: yes" in out
    code, out, _ = run(capsys, "prof", "stabilized", "C2_fixed_biset", "trivial:C2", "trivial:C2")
    assert code == 1 and "forward clause" in out
    assert run(capsys, "prof", "stabilized", "C2_fixed_biset", "maximal:C2", "maximal:C2")[0] == 0
    code, out, _ = run(capsys, "prof", "apply", "C6_hom", "C6_q3", "--json")
    assert json.loads(out)["sizes"] == {"*": 3}
    code, out, _ = run(capsys, "prof", "dual", "C2_fixed_biset", "--json")
    assert json.loads(out)["kind"] == "profunctor"
    assert run(capsys, "prof", "symlift", "C6_hom", "--length", "2")[0] == 0


def test_species_commands(capsys):
    assert run(capsys, "species", "eval", "pairs", "--set-size", "3")[1].strip() == "6"
    assert run(capsys, "species", "eval", str(io.FIXTURE_DIR / "freeS2.json"), "--set-size", "3")[1].strip() == "9"
    code, out, _ = run(capsys, "species", "poly", "freeF", "--json")
    assert code == 0 and json.loads(out)["coefficients"] == {"0": 1, "1": 1, "2": 1, "3": 2}
    assert run(capsys, "species", "poly", "pairs")[0] == 1
    assert run(capsys, "species", "free", "nonfree3")[0] == 1
    assert run(capsys, "species", "por", "--sizes", "2,1,3,2")[1].strip() == "(6,3)"
    assert run(capsys, "species", "roundtrip", "por")[0] == 0
    code, out, _ = run(capsys, "species", "trace", "freeS2", "--json")
    assert json.loads(out)["sizes"] == {'*|["*", "*"]': 2}
    assert run(capsys, "species", "derive", "freeF")[0] == 0


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["kit", "frobnicate"])
    assert exc.value.code == 2
    assert run(capsys, "species", "por", "--sizes", "1,2")[0] == 2
    assert run(capsys, "prof", "compose", "C6", "C6_hom")[0] == 2


def test_laws_budget_zero(capsys):
    code, out, _ = run(capsys, "laws", "--suite", "exponential", "--budget", "0", "--json")
    rep = json.loads(out)
    assert code == 3
    assert rep["laws"] and all(r["status"] == "budget" for r in rep["laws"])


def test_laws_deterministic(capsys):
    a = run(capsys, "laws", "--suite", "profunctors", "--seed", "42", "--json", "--omit-times")
    b = run(capsys, "laws", "--suite", "profunctors", "--seed", "42", "--json", "--omit-times")
    assert a == b and a[0] == 0
    assert json.loads(a[1])["seed"] == 42
