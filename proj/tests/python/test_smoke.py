import os
import subprocess

import pytest

import laudit


def test_auc_matches_pair_count():
    members = [0.9, 0.5, 0.5, 0.1]
    nonmembers = [0.5, 0.2, 0.0]
    pairs = sum(1.0 if a > b else 0.5 if a == b else 0.0 for a in members for b in nonmembers)
    assert laudit.auc(members, nonmembers) == pytest.approx(pairs / 12, abs=1e-12)
    assert laudit.asr([1.0, 2.0], [0.0, 0.5]) == 1.0
    assert laudit.tpr_at_fpr([1.0, 2.0], [0.0, 3.0], 0.5) == 1.0


def test_errors_surface_as_exceptions():
    with pytest.raises(laudit.LauditError):
        laudit.auc([], [1.0])
    with pytest.raises(laudit.LauditError):
        laudit.tpr_at_fpr([1.0], [0.0], 1.5)


def test_registers_and_laundering():
    regs = laudit.registers()
    assert len(regs) == 23
    assert regs[0][2] == "ly"
    text = "The harbor wakes under grey skies. Boats drift past the pier."
    out = laudit.launder(1, text)
    assert out.startswith("In the heart of")
    assert laudit.launder(1, text) == out
    prompt = laudit.laundering_prompt(1, ["imagery"])
    assert "imagery adjective" in prompt


def test_scenario_audit_recovers_register():
    res = laudit.audit_scenario({"true_register": "en", "n_base": 1000})
    assert res["verdict"]["verdict"] == "laundering-evidence"
    assert res["verdict"]["selected_register"] == 2
    assert res["ground_truth"]["register_id"] == 2


def test_cli_entry_points(tmp_path):
    assert laudit.run_cli(["bogus"]) == 2
    cli = os.environ.get("LAUDIT_CLI")
    if cli:
        proc = subprocess.run([cli, "scenario", "--negative-control", "--out", str(tmp_path)], capture_output=True, text=True)
        assert proc.returncode == 0
        assert (tmp_path / "verdict.json").exists()
