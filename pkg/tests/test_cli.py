"""Command-line interface: exit codes, JSON shape, determinism."""

from __future__ import annotations

import json
import subprocess
import sys

import pytest

from iqselmer.cli import main
from iqselmer.congruent import SHA_HYPOTHESIS


def run_cli(capsys, *argv: str) -> tuple[int, str]:
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_selrank_reference_output(capsys):
    code, out = run_cli(capsys, "selrank", "--disc", "-3", "--b", "17")
    assert code == 0
    payload = json.loads(out)
    assert payload["dim_phi"] == 3
    assert payload["dim_phihat"] == 2
    assert payload["sel_rank2"] == 3
    assert payload["disc"] == -3
    assert payload["cases_fired"] == sorted(payload["cases_fired"])


def test_selrank_generators(capsys):
    code, out = run_cli(capsys, "selrank", "--disc", "-3", "--b", "17", "--show-generators")
    assert code == 0
    payload = json.loads(out)
    assert [g["rep"] for g in payload["generators_phi"]] == ["-1", "2", "17"]
    assert [g["rep"] for g in payload["generators_phihat"]] == ["-1", "17"]
    assert [g["torsion"] for g in payload["generators_phihat"]] == [False, True]


def test_selrank_table_mode(capsys):
    code, out = run_cli(capsys, "selrank", "--disc", "-3", "--b", "17", "--table", "--show-generators")
    assert code == 0
    assert "2-Selmer rank" in out
    assert "17*" in out  # torsion class marker
    assert "{" not in out


def test_selrank_unsupported_field(capsys):
    code, out = run_cli(capsys, "selrank", "--disc", "-7", "--b", "5")
    assert code == 1
    payload = json.loads(out)
    assert payload["error"]["type"] == "UnsupportedField"


def test_selrank_ramified_coefficient(capsys):
    code, out = run_cli(capsys, "selrank", "--disc", "-3", "--b", "15")
    assert code == 1
    assert json.loads(out)["error"]["type"] == "RamifiedFactor"


def test_usage_error_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["selrank", "--disc", "-3"])  # --b missing
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["selrank", "--disc", "-3", "--b", "17", "--json", "--table"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_verify_squares_reference_output(capsys):
    code, out = run_cli(capsys, "verify", "squares-mod8")
    assert code == 0
    payload = json.loads(out)
    assert payload["expected"] == 6
    assert payload["found"] == 6
    assert payload["pass"] is True
    assert payload["fourth_found"] == 3


def test_congruent_check_carries_hypothesis(capsys):
    code, out = run_cli(capsys, "congruent", "check", "--disc", "-3", "--n", "82")
    assert code == 0
    payload = json.loads(out)
    assert payload["q_criterion"] == "Bastien"
    assert payload["k_status"] == "CongruentConditionalK"
    assert payload["conditional_on"] == SHA_HYPOTHESIS
    assert payload["sel_rank"] == 3


def test_congruent_check_not_squarefree(capsys):
    code, out = run_cli(capsys, "congruent", "check", "--disc", "-3", "--n", "12")
    assert code == 1
    assert json.loads(out)["error"]["type"] == "NotSquarefree"


def test_congruent_scan_json_lines(capsys):
    code, out = run_cli(capsys, "congruent", "scan", "--disc", "-3", "--max", "30")
    assert code == 0
    rows = [json.loads(line) for line in out.splitlines()]
    ns = [r["n"] for r in rows]
    assert ns == sorted(ns)
    assert 10 in ns and 12 not in ns  # squarefree n only
    for r in rows:
        if r["k_status"] == "CongruentConditionalK":
            assert r["conditional_on"] == SHA_HYPOTHESIS
        else:
            assert r["conditional_on"] is None


def test_congruent_scan_only_new_subset(capsys):
    code, full = run_cli(capsys, "congruent", "scan", "--disc", "-3", "--max", "100")
    assert code == 0
    code, new = run_cli(capsys, "congruent", "scan", "--disc", "-3", "--max", "100", "--only-new")
    assert code == 0
    assert set(new.splitlines()) <= set(full.splitlines())
    ns = [json.loads(line)["n"] for line in new.splitlines()]
    assert 10 in ns and 82 in ns


def test_verify_charsum_clean_range(capsys):
    code, out = run_cli(capsys, "verify", "charsum", "--degree", "2", "--qmax", "30")
    assert code == 0
    payload = json.loads(out)
    assert payload["pass"] is True and payload["exceptions"] == {}


def test_verify_charsum_degree4_known_exceptions(capsys):
    code, out = run_cli(capsys, "verify", "charsum", "--degree", "4", "--qmax", "7")
    assert code == 0
    payload = json.loads(out)
    assert payload["pass"] is True
    assert payload["exceptions"] == {"5": [[1, 2], [2, 3], [3, 2], [4, 3]]}
    # q = 9 carries real exceptions, so the scan reports them and fails honestly
    code, out = run_cli(capsys, "verify", "charsum", "--degree", "4", "--qmax", "10")
    assert code == 0
    payload = json.loads(out)
    assert payload["pass"] is False
    assert payload["mismatches"] == [9]
    assert len(payload["exceptions"]["9"]) == 8


def test_verify_trace_lemma(capsys):
    code, out = run_cli(capsys, "verify", "trace-lemma", "--disc", "-11", "--pmax", "150")
    assert code == 0
    payload = json.loads(out)
    assert payload["pass"] is True
    assert payload["split_primes_checked"] > 5
    assert payload["exceptions"] == []


def test_verify_oracle_small_sweep(capsys):
    code, out = run_cli(capsys, "verify", "oracle", "--disc", "-3", "--bmax", "6")
    assert code == 0
    payload = json.loads(out)
    assert payload["pass"] is True
    assert payload["undecided"] == [] and payload["disagreements"] == []
    assert payload["place_checks"] > 50


def test_verify_theorems_small_sweep(capsys):
    code, out = run_cli(capsys, "verify", "theorems", "--disc", "-19", "--pmax", "25")
    assert code == 0
    payload = json.loads(out)
    assert payload["pass"] is True and payload["mismatches"] == []
    assert payload["curves_checked"] == sum(payload["families"].values())


def test_output_deterministic_across_thread_counts(capsys, monkeypatch):
    monkeypatch.setenv("SELMER_THREADS", "1")
    _, serial = run_cli(capsys, "verify", "theorems", "--disc", "-3", "--pmax", "30")
    monkeypatch.setenv("SELMER_THREADS", "4")
    _, threaded = run_cli(capsys, "verify", "theorems", "--disc", "-3", "--pmax", "30")
    assert serial == threaded
    _, scan1 = run_cli(capsys, "congruent", "scan", "--disc", "-3", "--max", "60")
    monkeypatch.setenv("SELMER_THREADS", "1")
    _, scan2 = run_cli(capsys, "congruent", "scan", "--disc", "-3", "--max", "60")
    assert scan1 == scan2


def test_console_entry_point_end_to_end():
    proc = subprocess.run(
        [sys.executable, "-m", "iqselmer", "selrank", "--disc", "-3", "--b", "17"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["sel_rank2"] == 3
    proc = subprocess.run(
        [sys.executable, "-m", "iqselmer", "selrank", "--disc", "-7", "--b", "5"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 1
    proc = subprocess.run(
        [sys.executable, "-m", "iqselmer", "nope"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 2
