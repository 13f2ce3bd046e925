"""CLI surface: subcommands, exit codes, JSON schema stability."""

import json
import os
import subprocess
import sys


from padicdyn import __version__
from padicdyn.cli import main
from padicdyn.oracle import Certificate


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run_cli(capsys, *argv, "--format", "json")
    return code, (json.loads(out) if out.strip() else None), err


# -- analyze -----------------------------------------------------------------------


def test_analyze_minimal_case(capsys):
    code, doc, _ = run_json(capsys, "analyze", "--p", "3", "--n", "2", "--l", "1", "--depth", "3")
    assert code == 0
    assert set(doc) == {"tool_version", "command", "parameters", "results"}
    assert doc["tool_version"] == __version__
    v = doc["results"]["verdict"]
    assert v == {"minimal": True, "uniquely_ergodic": True, "ergodic": True}


def test_analyze_non_minimal_evidence(capsys):
    code, doc, _ = run_json(capsys, "analyze", "--p", "3", "--n", "4", "--l", "1")
    assert code == 0
    res = doc["results"]
    assert res["verdict"]["minimal"] is False
    assert res["generated_mod_p2"] == [1, 4, 7]
    assert res["invariant_ball"] == {"depth": 1, "center": 4, "radius_exponent": 2}


def test_analyze_rejects_two(capsys):
    code, out, err = run_cli(capsys, "analyze", "--p", "2", "--n", "3", "--l", "1")
    assert code == 2
    assert "odd prime" in err


def test_analyze_rejects_non_unit_exponent(capsys):
    code, _, err = run_cli(capsys, "analyze", "--p", "3", "--n", "6", "--l", "1")
    assert code == 2


def test_parse_failure_is_usage_error(capsys):
    assert main(["analyze", "--p", "three"]) == 1
    capsys.readouterr()
    assert main(["no-such-command"]) == 1
    capsys.readouterr()


def test_json_output_is_byte_identical(capsys):
    args = ("analyze", "--p", "5", "--n", "2", "--l", "1", "--depth", "3")
    code1, out1, _ = run_cli(capsys, *args, "--format", "json")
    code2, out2, _ = run_cli(capsys, *args, "--format", "json")
    assert code1 == code2 == 0
    assert out1 == out2


# -- orbit --------------------------------------------------------------------------


def test_orbit_command(capsys):
    code, doc, _ = run_json(
        capsys, "orbit", "--p", "3", "--n", "2", "--l", "1", "--x0", "4", "--steps", "6"
    )
    assert code == 0
    res = doc["results"]
    assert res["orbit"] == [4, 16, 13, 7, 49, 52]
    assert res["depth1_ball_orbit"] == [4, 7, 4, 7, 4, 7]
    row = res["birkhoff"][0]
    assert row["ball_center"] == 4 and row["average"] == "1/2" and row["haar"] == "1/2"


def test_orbit_trapped_average(capsys):
    code, doc, _ = run_json(
        capsys, "orbit", "--p", "3", "--n", "4", "--l", "1", "--x0", "4", "--steps", "10"
    )
    assert code == 0
    rows = {r["ball_center"]: r for r in doc["results"]["birkhoff"]}
    assert rows[7]["average"] == "0" and rows[7]["haar"] == "1/2"


def test_orbit_zero_steps_is_usage(capsys):
    code, _, err = run_cli(
        capsys, "orbit", "--p", "3", "--n", "2", "--l", "1", "--x0", "4", "--steps", "0"
    )
    assert code == 1


def test_orbit_off_sphere_is_domain_error(capsys):
    code, _, err = run_cli(
        capsys, "orbit", "--p", "3", "--n", "2", "--l", "1", "--x0", "10", "--steps", "3"
    )
    assert code == 2


# -- verify -------------------------------------------------------------------------


def test_verify_power_scaling_passes(capsys):
    code, doc, _ = run_json(capsys, "verify", "lemma1", "--p", "3", "--K", "4", "--n-max", "9")
    assert code == 0
    certs = doc["results"]["certificates"]
    assert len(certs) == 1 and certs[0]["status"] == "PASS"
    assert certs[0]["claim"] == "power-difference-scaling"


def test_verify_alias_matches_functional_name(capsys):
    code1, doc1, _ = run_json(capsys, "verify", "lemma1", "--p", "3", "--K", "3", "--n-max", "4")
    code2, doc2, _ = run_json(
        capsys, "verify", "power-scaling", "--p", "3", "--K", "3", "--n-max", "4"
    )
    assert code1 == code2 == 0
    assert doc1["results"] == doc2["results"]


def test_verify_minimal_multi_prime(capsys):
    code, doc, _ = run_json(capsys, "verify", "minimal", "--p", "3,5", "--depth", "3")
    assert code == 0
    certs = doc["results"]["certificates"]
    assert [c["parameters"]["p"] for c in certs] == [3, 5]
    assert all(c["status"] == "PASS" for c in certs)


def test_verify_unique_needs_n(capsys):
    code, _, err = run_cli(capsys, "verify", "unique", "--p", "3")
    assert code == 2
    code, doc, _ = run_json(capsys, "verify", "unique", "--p", "3", "--n", "2", "--l", "1", "--k", "2")
    assert code == 0


def test_verify_log_isometry(capsys):
    code, doc, _ = run_json(capsys, "verify", "log-isometry", "--p", "3,5", "--K", "4")
    assert code == 0
    assert len(doc["results"]["certificates"]) == 2


def test_verify_generation(capsys):
    code, doc, _ = run_json(capsys, "verify", "generation", "--p", "3", "--l-max", "4")
    assert code == 0


def test_verify_cap_exceeded_is_exit_two(capsys):
    code, _, err = run_cli(capsys, "verify", "lemma1", "--p", "3", "--K", "14", "--n-max", "4")
    assert code == 2


def test_verify_out_writes_certificate_stream(capsys, tmp_path):
    out_file = tmp_path / "certs.jsonl"
    code, _, _ = run_cli(
        capsys, "verify", "minimal", "--p", "3", "--depth", "3", "--out", str(out_file)
    )
    assert code == 0
    lines = out_file.read_text().splitlines()
    assert len(lines) == 1
    cert = json.loads(lines[0])
    assert cert["claim"] == "minimality-criterion" and cert["status"] == "PASS"


def test_verify_jobs_deterministic(capsys):
    base = ("verify", "minimal", "--p", "5", "--depth", "3", "--format", "json")
    code1, out1, _ = run_cli(capsys, *base, "--jobs", "1")
    code2, out2, _ = run_cli(capsys, *base, "--jobs", "2")
    assert code1 == code2 == 0
    assert out1 == out2


def test_verify_failure_exit_code(capsys, monkeypatch):
    import padicdyn.cli as cli_mod

    failing = Certificate(
        claim="log-isometry",
        parameters={"p": 3, "K": 4},
        status="FAIL",
        annotations={},
        witness={"kind": "synthetic"},
        digest="0" * 64,
    )
    monkeypatch.setattr(cli_mod, "certify_log_isometry", lambda *a, **k: failing)
    code, _, _ = run_cli(capsys, "verify", "log-isometry", "--p", "3")
    assert code == 3


# -- perturb ------------------------------------------------------------------------


def test_perturb_level_two(capsys):
    code, doc, _ = run_json(
        capsys, "perturb", "--p", "3", "--n", "2", "--l", "2", "--q", "81"
    )
    assert code == 0
    res = doc["results"]
    assert res["congruence"]["asserted"] is True
    assert res["congruence"]["mismatch_count"] == 0
    assert all(row["holds"] for row in res["sphere_invariance"])
    assert res["necessary_condition"]["agree"] is True


def test_perturb_level_one_reports_discrepancies(capsys):
    code, doc, _ = run_json(
        capsys, "perturb", "--p", "3", "--n", "2", "--l", "1", "--q", "27"
    )
    assert code == 0
    res = doc["results"]
    assert res["congruence"]["asserted"] is False
    assert res["congruence"]["mismatch_count"] > 0
    assert all(row["holds"] for row in res["sphere_invariance"])


def test_perturb_gate_names_the_offender(capsys):
    code, _, err = run_cli(capsys, "perturb", "--p", "3", "--n", "2", "--l", "1", "--q", "9")
    assert code == 2
    assert "coefficient 0" in err


def test_perturb_marginal_mode(capsys):
    code, doc, _ = run_json(
        capsys, "perturb", "--p", "3", "--n", "2", "--l", "1", "--q", "9", "--marginal"
    )
    assert code == 0
    assert doc["results"]["note"].startswith("observational")


# -- roots --------------------------------------------------------------------------


def test_roots_in_z7(capsys):
    code, doc, _ = run_json(capsys, "roots", "--p", "7", "--d", "3", "--K", "3")
    assert code == 0
    res = doc["results"]
    assert res["count"] == 3
    assert [r["residue"] for r in res["roots"]] == [1, 18, 324]
    assert res["note"] is None


def test_roots_in_z17_notes_the_gap(capsys):
    code, doc, _ = run_json(capsys, "roots", "--p", "17", "--d", "3", "--K", "3")
    assert code == 0
    res = doc["results"]
    assert res["count"] == 1
    assert "gcd(3, 16) = 1" in res["note"]


def test_roots_plus_minus_one(capsys):
    code, doc, _ = run_json(capsys, "roots", "--p", "5", "--d", "2", "--K", "4")
    assert code == 0
    assert [r["residue"] for r in doc["results"]["roots"]] == [1, 5**4 - 1]


def test_roots_rejects_two(capsys):
    code, _, _ = run_cli(capsys, "roots", "--p", "2", "--d", "3")
    assert code == 2


# -- module entry point ---------------------------------------------------------------


def test_module_invocation_subprocess():
    env = dict(os.environ)
    env["PYTHONPATH"] = os.pathsep.join(
        [os.path.join(os.path.dirname(__file__), "..", "src"), env.get("PYTHONPATH", "")]
    )
    proc = subprocess.run(
        [sys.executable, "-m", "padicdyn", "analyze", "--p", "3", "--n", "2", "--l", "1"],
        capture_output=True,
        text=True,
        env=env,
    )
    assert proc.returncode == 0
    assert "verdict: minimal=True" in proc.stdout
