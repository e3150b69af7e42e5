import json

import pytest

from dhecke.harness import (admissible_primes, cm_verify, eisenstein_check, main, run_instance,
                            search_instances, ss_inspect, sweep)


def verdicts(recs):
    return {r["verdict"] for r in recs}


def strip_timing(recs):
    return [json.dumps({k: v for k, v in r.items() if k != "ms"}, sort_keys=True, default=str)
            for r in recs]


def test_admissible_primes():
    assert admissible_primes(23) == [(11, 1)]
    assert admissible_primes(101) == [(5, 2)]
    assert admissible_primes(13) == []


@pytest.mark.parametrize("N", [11, 23])
def test_eisenstein_check_passes(N):
    recs = eisenstein_check(N)
    assert recs and verdicts(recs) == {"pass"}
    assert {r["check"] for r in recs} >= {"eprime-hecke", "eprime-UN-fixed", "kappa1-symbol",
                                           "sigma1-hecke", "merel-constant"}


@pytest.mark.parametrize("name", ["eprime", "kappa1", "sigma1", "merel"])
def test_injected_failures_are_caught(name):
    recs = eisenstein_check(23, corrupt=(name, 2), reverify=False)
    assert "fail" in verdicts(recs)


def test_log_anchor_rescaling_keeps_verdicts():
    assert verdicts(eisenstein_check(23, anchor=(5, 3), reverify=False)) == {"pass"}


def test_ss_inspect_record():
    (r,) = ss_inspect(23)
    assert r["verdict"] == "pass"
    assert r["instance"]["weights"] == [2, 1, 3]


def test_search_instances():
    assert search_instances("cm") == []
    cm = search_instances("cm", 50, 50)
    assert len(cm) == 12
    assert {"kind": "cm", "D": -23, "N": 11, "p": 5, "t": 1} in cm
    for inst in cm:
        assert inst["D"] % inst["N"] and (inst["N"] - 1) % inst["p"] ** inst["t"] == 0
    rm = search_instances("rm", 21, 60)
    assert {(i["D"], i["N"]) for i in rm} >= {(21, 59)}


def test_cm_verify_d23_n11():
    recs = cm_verify(-23, 11)
    assert verdicts(recs) == {"pass"}
    conj = [r for r in recs if r["check"] == "cm-conjecture-form"][0]
    assert 18 % conj["multiplier"] == 0


def test_character_and_its_inverse_agree():
    a = cm_verify(-23, 43, psi_index=0, reverify=False)
    b = cm_verify(-23, 43, psi_index=1, reverify=False)
    assert verdicts(a) == verdicts(b) == {"pass"}


def test_split_level_is_trivial():
    recs = cm_verify(-23, 29)
    assert [r["check"] for r in recs] == ["cm-split-trivial"]
    assert recs[0]["verdict"] == "pass"


def test_degenerate_instance_is_skipped():
    (r,) = run_instance({"kind": "cm", "D": -47, "N": 11, "p": 5, "t": 1})
    assert r["verdict"] == "skip"


def test_sweep_is_deterministic_and_ordered():
    insts = search_instances("cm", 23, 50)[:3]
    a = sweep(insts, jobs=1)
    b = sweep(insts, jobs=2)
    assert strip_timing(a) == strip_timing(b)


def test_cli_exit_codes(tmp_path, capsys):
    out = tmp_path / "r.jsonl"
    assert main(["ss-inspect", "--level", "23", "--out", str(out)]) == 0
    assert main(["eisenstein-check", "--level", "11", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) > 1 and all(json.loads(x)["verdict"] == "pass" for x in lines)
    assert main(["cm-verify", "--disc", "-23", "--level", "11"]) == 0
    printed = capsys.readouterr().out.splitlines()
    assert printed and all(json.loads(x)["check"].startswith("cm-") for x in printed)
    with pytest.raises(SystemExit):
        main(["cm-verify", "--level", "11"])
