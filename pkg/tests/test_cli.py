import json

import pytest

from zsiglab.cli import cache_path, main
from zsiglab.sequences import SequenceSpec


@pytest.fixture(autouse=True)
def cache_dir(tmp_path, monkeypatch):
    d = tmp_path / "cache"
    monkeypatch.setenv("ZCACHE_DIR", str(d))
    return d


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_zsigmondy_powerdiff(capsys):
    code, out, _ = run(capsys, "zsigmondy", "--kind", "powerdiff", "--u", "2", "--v", "1", "--n-max", "20")
    assert code == 0
    assert json.loads(out)["zsigmondy"] == [1, 6]


def test_vojta_check(capsys):
    code, out, _ = run(capsys, "vojta-check", "--N", "2", "--d", "3", "--deg-f", "7")
    assert code == 0
    body = json.loads(out)
    assert {k: body[k] for k in ("satisfied", "lhs", "rhs")} == {"satisfied": True, "lhs": "7", "rhs": "6"}


def test_vojta_check_variants(capsys):
    code, out, _ = run(capsys, "vojta-check", "--d", "3", "--deg-d", "2", "--N", "2", "--j", "1", "--deg-delta", "6")
    assert json.loads(out) == {"satisfied": False, "lhs": "2", "rhs": "2", "which": "DegDjDj"}
    code, out, _ = run(capsys, "vojta-check", "--d", "4", "--deg-d", "1", "--deg-neg-canonical", "5", "--min-j")
    assert json.loads(out) == {"which": "MinJ", "j": 2}


def test_seq_eds(capsys):
    code, out, _ = run(capsys, "seq", "--kind", "eds", "--init", "1,1,-1,1", "--n-max", "10")
    terms = json.loads(out)["terms"]
    assert code == 0 and terms[-1] == {"n": 10, "value": "-4"}
    code, out, _ = run(capsys, "seq", "--kind", "eds", "--init", "1,1,-1,1", "--n-max", "10", "--format", "csv")
    assert out.splitlines()[0] == "n,a_n" and out.splitlines()[-1] == "10,-4"


def test_validation_error_exit_2(capsys):
    code, out, err = run(capsys, "zsigmondy", "--kind", "powerdiff", "--u", "4", "--v", "2", "--n-max", "5")
    assert code == 2 and out == ""
    assert "error" in json.loads(err)
    code, _, err = run(capsys, "vojta-check", "--N", "1", "--d", "2", "--deg-f", "9")
    assert code == 2 and json.loads(err)["error"] == "degree_too_small"
    code, _, err = run(capsys, "nonsense")
    assert code == 2 and json.loads(err)["error"] == "usage"


def test_resource_limit_exit_3(capsys):
    args = ["zsigmondy", "--kind", "dynvalue", "--morphism", "X^2+Y^2;Y^2", "--form", "X-3*Y",
            "--start", "1,1", "--n-max", "40", "--digit-ceiling", "300"]
    code, out, _ = run(capsys, *args)
    body = json.loads(out)
    assert code == 3 and body["truncated"] is True and body["records"]


def test_config_file_and_override_precedence(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"spec": {"kind": "powerdiff", "params": {"u": "2", "v": "1"}}, "n_max": 10}))
    code, out, _ = run(capsys, "zsigmondy", "--config", str(cfg))
    assert json.loads(out)["horizon"] == 10
    code, out, _ = run(capsys, "zsigmondy", "--config", str(cfg), "--n-max", "12", "--u", "3")
    body = json.loads(out)
    assert body["horizon"] == 12 and body["spec"]["params"]["u"] == "3"
    code, out, _ = run(capsys, "zsigmondy", "--config", str(cfg), "--n-max", "12", "--set", "n_max=7",
                       "--set", "spec.params.u=5")
    body = json.loads(out)
    assert body["horizon"] == 7 and body["spec"]["params"]["u"] == "5"


def test_bare_spec_config(capsys, tmp_path):
    cfg = tmp_path / "spec.json"
    cfg.write_text(json.dumps({"kind": "lucas", "params": {"p": "1", "q": "-1"}}))
    code, out, _ = run(capsys, "zsigmondy", "--config", str(cfg), "--n-max", "20", "--format", "csv")
    rows = out.splitlines()
    assert rows[0] == "n,digits,c_n_digits,has_primitive,b_n"
    assert [r.split(",")[0] for r in rows[1:] if r.split(",")[3] == "false"] == ["1", "2", "6", "12"]


def test_byte_identical_output(capsys):
    args = ["zsigmondy", "--kind", "lucas", "--p", "3", "--q", "-7", "--n-max", "40"]
    assert run(capsys, *args)[1] == run(capsys, *args)[1]


def test_warm_cache_matches_cold(capsys, cache_dir):
    args = ["experiment", "--kind", "dynvalue", "--morphism", "X^3;Y^3;Z^3",
            "--form", "X*Y*Z*(X+Y+Z)*(X+2*Y+4*Z)*(X+3*Y+9*Z)*(X+4*Y+16*Z)", "--start", "1,2,3", "--n-max", "5"]
    zargs = ["zsigmondy"] + args[1:]
    cold = run(capsys, *zargs)[1]
    files = list(cache_dir.glob("*.jsonl"))
    assert len(files) == 1
    lines = files[0].read_text().splitlines()
    assert [json.loads(line)["n"] for line in lines] == list(range(6))
    warm = run(capsys, *zargs)[1]
    assert cold == warm
    assert len(files[0].read_text().splitlines()) == 6
    spec = SequenceSpec.from_json(json.loads(cold)["spec"])
    assert cache_path(spec) == files[0]
    code, out, _ = run(capsys, *args)
    assert code == 0
    assert json.loads(out)["verdicts"][0]["which"] == "Thm0.1"


def test_heights_subcommand(capsys):
    code, out, _ = run(capsys, "heights", "--kind", "dynvalue", "--morphism", "X^2;Y^2", "--form", "X",
                       "--start", "2,1", "--n-max", "5", "--no-cache")
    body = json.loads(out)
    assert code == 0 and body["height"]["final_estimate"] == "0.69314718056"
    code, out, _ = run(capsys, "heights", "--value", "63", "--exclude", "3")
    body = json.loads(out)
    assert body["sum"] == "1.94591014906" and body["complete"] is True


def test_output_file(capsys, tmp_path):
    target = tmp_path / "r.json"
    code, out, _ = run(capsys, "vojta-check", "--N", "1", "--d", "3", "--deg-f", "4", "-o", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["satisfied"] is False
