import json

import pytest
from click.testing import CliRunner

from ltx.cli import COMMANDS, audit_all, canonical_suite, main, normalize, run
from ltx.errors import InputError
from ltx.report import report_discrepancies

SMOKE = {
    "ring": {"p": 5, "kind": "unramified", "k": 2},
    "group-law": {"p": 3, "u": [[2]], "degree": 5},
    "log-exp-check": {"p": 3, "u": [[2]], "degree": 10, "samples": 3},
    "rep-info": {"p": 3, "u": [[2, 0], [0, 4]], "dN": 1},
    "twist-solve": {"p": 3, "u": [[0, 1], [1, 0]]},
    "h2": {"p": 3, "u": [[4]], "dN": 1},
    "audit-tame": {"p": 3, "u": [[2]], "m": 1, "e": 2, "d": 2},
    "audit-wild": {"p": 3, "u": [[4]], "m": 1, "e": 3, "d": 1},
    "ucris": {"p": 3, "u": [[2]], "dK": 2, "dprime": 2},
    "ucris-funct": {"p": 3, "u": [[2]]},
    "gauss-sum": {"q": 5},
    "characters": {"group": "3,2"},
    "conductor": {"kind": "tame", "p": 3, "d": 2},
    "block-det": {"samples": 5},
    "eps-d": {"p": 5, "u": [[2]], "q": 5},
    "e-matrix": {"p": 3, "u": [[4]], "m": 1, "d": 2, "case": "T"},
    "weak-rep": {"p": 3, "u": [[2]], "m": 1, "d": 1, "case": "I"},
    "weak-audit": {"p": 3, "u": [[2]], "m": 1, "d": 1, "case": "I", "fillings": 2},
    "audit-all": {"suite": [{"command": "h2", "p": 3, "u": [[4]], "dN": 1}], "workers": 1},
}


def invoke(*args, env=None):
    res = CliRunner().invoke(main, list(args), env=env or {})
    return res.exit_code, res.output


def test_every_command_has_a_smoke_config():
    assert set(SMOKE) == set(COMMANDS)


@pytest.mark.parametrize("command", sorted(SMOKE))
def test_command_smoke(command):
    rep = run({"command": command, **SMOKE[command]})
    assert rep.passed, [c.name for c in rep.checks if not c.passed]
    js = rep.to_json()
    assert js["command"] == command
    for chk in js["checks"]:
        assert {"name", "identity", "status", "precision", "witness"} <= set(chk)


def test_h2_example():
    rep = run({"command": "h2", "p": 3, "r": 1, "u": [[4]], "dN": 1})
    assert rep.passed and rep.data["omega"] == 1


def test_group_law_example_axioms_pass():
    rep = run({"command": "group-law", "p": 3, "r": 1, "u": [[1]], "degree": 9, "pseries": False})
    assert rep.passed


def test_group_law_u1_reports_classical_p_series_failure():
    rep = run({"command": "group-law", "p": 3, "r": 1, "u": [[1]], "degree": 9})
    failed = [c.name for c in rep.checks if not c.passed]
    assert len(failed) == 1 and failed[0].startswith("[p]: ")


@pytest.mark.parametrize("bad", [
    {"command": "h2", "p": 3, "u": "[[4, 1]]"},
    {"command": "h2", "p": 3, "u": "not json"},
    {"command": "h2", "p": 3, "u": [[3]]},
    {"command": "h2", "p": 2, "u": [[1]]},
    {"command": "h2", "p": 9, "u": [[1]]},
    {"command": "nope"},
    {"command": "h2", "p": 3, "u": [[4]], "r": 2},
    {"command": "h2", "p": 3, "u": [[4]], "prec": 0},
])
def test_invalid_configs_rejected(bad):
    with pytest.raises(InputError):
        normalize(bad)


def test_exit_codes():
    code, out = invoke("h2", "--p", "3", "--u", "[[4]]", "--dN", "1")
    assert code == 0 and json.loads(out)["status"] == "pass"
    code, _ = invoke("h2", "--p", "3", "--u", "[[4, 1]]")
    assert code == 2
    code, _ = invoke("h2", "--p", "2", "--u", "[[1]]")
    assert code == 2
    code, _ = invoke("group-law", "--p", "3", "--u", "[[1]]", "--degree", "9")
    assert code == 1
    code, out = invoke("twist-solve", "--p", "3", "--u", "[[2]]")
    assert code == 3
    assert json.loads(out.strip().splitlines()[-1])["history"][0]["k"] == 2


def test_config_file_and_out(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"p": 3, "u": [[4]], "dN": 1}))
    out = tmp_path / "r.json"
    code, _ = invoke("h2", "--config", str(cfg), "--out", str(out))
    assert code == 0
    assert json.loads(out.read_text())["data"]["omega"] == 1


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"p": 3, "u": [[4]], "dN": 1}))
    code, out = invoke("h2", "--config", str(cfg), "--u", "[[10]]")
    assert code == 0 and json.loads(out)["data"]["omega"] == 2


def test_unreadable_config(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert invoke("h2", "--config", str(bad))[0] == 2
    assert invoke("h2", "--config", str(tmp_path / "missing.json"))[0] == 2


def test_precision_env_var():
    code, out = invoke("h2", "--p", "3", "--u", "[[4]]", env={"LTX_PRECISION": "35"})
    assert code == 0 and json.loads(out)["params"]["prec"] == 35
    assert invoke("h2", "--p", "3", "--u", "[[4]]", env={"LTX_PRECISION": "x"})[0] == 2


def test_reports_are_reproducible():
    cfg = {"command": "log-exp-check", "p": 3, "u": [[2]], "degree": 10, "samples": 4, "seed": 9}
    a = json.dumps(run(cfg).to_json(timing=False), sort_keys=True)
    b = json.dumps(run(cfg).to_json(timing=False), sort_keys=True)
    assert a == b


@pytest.mark.parametrize("command", ["h2", "audit-tame", "gauss-sum", "ucris", "conductor", "block-det"])
def test_raising_precision_keeps_exact_passes(command):
    lo = run({"command": command, **SMOKE[command], "prec": 20})
    hi = run({"command": command, **SMOKE[command], "prec": 40})
    assert lo.passed and hi.passed
    assert report_discrepancies(lo.to_json(timing=False), hi.to_json(timing=False)) == []


def test_audit_all_empty_suite():
    rep = audit_all([], workers=1)
    assert rep.passed and rep.checks == []


def test_audit_all_named_failure():
    suite = [{"command": "h2", "p": 3, "u": [[4]], "dN": 1},
             {"command": "h2", "p": 3, "u": [[1]], "dN": 1}]
    rep = audit_all(suite, workers=1)
    failed = [c.name for c in rep.checks if not c.passed]
    assert failed == ["[1:h2] HypothesisFViolated"]


def test_audit_all_order_stable_in_parallel():
    suite = [{"command": "gauss-sum", "q": q} for q in (3, 5, 7, 9)]
    seq = audit_all(suite, workers=1)
    par = audit_all(suite, workers=4)
    assert [c.name for c in seq.checks] == [c.name for c in par.checks]


def test_audit_all_cli_list_config(tmp_path):
    cfg = tmp_path / "suite.json"
    cfg.write_text(json.dumps([{"command": "h2", "p": 3, "u": [[4]], "dN": 1}]))
    code, out = invoke("audit-all", "--config", str(cfg), "--workers", "1")
    assert code == 0 and json.loads(out)["summary"]["pass"] >= 1


def test_canonical_suite_shape():
    suite = canonical_suite(25)
    assert all(c["prec"] == 25 for c in suite)
    assert {c["command"] for c in suite} >= {"group-law", "log-exp-check", "twist-solve", "ucris",
                                              "gauss-sum", "conductor", "weak-audit", "block-det"}
