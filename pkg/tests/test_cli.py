import json

import pytest

from quadchase.cli import main
from quadchase.syntax import parse_nquads, parse_query, parse_rules


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def fx(fixtures_dir, name):
    return str(fixtures_dir / name)


def test_validate_good_inputs(capsys, fixtures_dir):
    code, out, _ = run(capsys, "validate", fx(fixtures_dir, "example1.nq"),
                       fx(fixtures_dir, "example1.qrules"),
                       fx(fixtures_dir, "beat.ccq"))
    assert code == 0
    assert "1 quads" in out and "3 rules" in out and "1 free vars" in out


def test_validate_bad_input(capsys, tmp_path):
    bad = tmp_path / "bad.nq"
    bad.write_bytes(b"<a> <b> <c> .")
    code, _, err = run(capsys, "validate", str(bad))
    assert code == 2
    assert "graph label" in err


def test_validate_unknown_extension(capsys, tmp_path):
    other = tmp_path / "file.txt"
    other.write_text("hi")
    code, _, err = run(capsys, "validate", str(other))
    assert code == 2


def test_check_cyclic_example1(capsys, fixtures_dir):
    code, out, _ = run(capsys, "check", fx(fixtures_dir, "example1.nq"),
                       fx(fixtures_dir, "example1.qrules"))
    assert code == 1
    assert "triple-generating contexts: {c2}" in out
    assert "(c1, c2, c1)" in out


def test_check_acyclic_fig3(capsys, fixtures_dir):
    code, out, _ = run(capsys, "check", fx(fixtures_dir, "fig3.nq"),
                       fx(fixtures_dir, "fig3.qrules"))
    assert code == 0
    assert "context acyclic: yes (max level 2)" in out


def test_deps_json_and_dot(capsys, fixtures_dir):
    code, out, _ = run(capsys, "deps", fx(fixtures_dir, "fig3.nq"),
                       fx(fixtures_dir, "fig3.qrules"), "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["context_acyclic"] is True
    assert doc["levels"] == {"c1": 1, "c2": 0, "c3": 2, "c4": 0}
    code, out, _ = run(capsys, "deps", fx(fixtures_dir, "example1.nq"),
                       fx(fixtures_dir, "example1.qrules"), "--dot")
    assert code == 0
    assert out.startswith("digraph")
    assert '"c2" [label="c2 *"' in out


def test_chase_refuses_cyclic_without_budget(capsys, fixtures_dir,
                                             tmp_path):
    code, _, err = run(capsys, "chase", fx(fixtures_dir, "example1.nq"),
                       fx(fixtures_dir, "example1.qrules"),
                       "-o", str(tmp_path / "out.nq"))
    assert code == 2
    assert "not context acyclic" in err


def test_chase_force_and_query_pipeline(capsys, fixtures_dir, tmp_path):
    out_nq = tmp_path / "out.nq"
    code, _, _ = run(capsys, "chase", fx(fixtures_dir, "example1.nq"),
                     fx(fixtures_dir, "example1.qrules"),
                     "-o", str(out_nq), "--force-unrestricted")
    assert code == 0
    assert len(parse_nquads(out_nq.read_bytes())) == 4
    code, out, _ = run(capsys, "query", str(out_nq),
                       fx(fixtures_dir, "example1.ccq"))
    assert code == 0 and out.strip() == "true"


def test_chase_budget_exhausted_exit_code(capsys, fixtures_dir, tmp_path):
    out_nq = tmp_path / "out.nq"
    stats = tmp_path / "stats.json"
    code, _, err = run(capsys, "chase", fx(fixtures_dir, "example1.nq"),
                       fx(fixtures_dir, "example1.qrules"),
                       "-o", str(out_nq), "--local-semantics", "rdfs-core",
                       "--max-iterations", "10", "--stats", str(stats))
    assert code == 3
    assert "budget exhausted" in err
    doc = json.loads(stats.read_text())
    assert doc["status"] == "budget-exhausted"
    assert doc["context_acyclic"] is False
    assert len(doc["iterations"]) == 10
    assert doc["saturation"] is None


def test_chase_stats_with_saturation(capsys, fixtures_dir, tmp_path):
    out_nq = tmp_path / "out.nq"
    stats = tmp_path / "stats.json"
    code, _, _ = run(capsys, "chase", fx(fixtures_dir, "fig3.nq"),
                     fx(fixtures_dir, "fig3.qrules"),
                     "-o", str(out_nq), "--stats", str(stats))
    assert code == 0
    doc = json.loads(stats.read_text())
    assert doc["status"] == "complete"
    assert doc["generating_iterations"] <= 3
    assert set(doc["saturation"]) >= {"c1", "c2", "c3", "c4"}


def test_chase_inconsistent_exit_code(capsys, tmp_path):
    data = tmp_path / "d.nq"
    data.write_bytes(b"<s> <p> <o> <c1> .\n")
    rules = tmp_path / "r.qrules"
    rules.write_text("chk: c1(?x,<p>,?y) -> .\n")
    code, _, err = run(capsys, "chase", str(data), str(rules),
                       "-o", str(tmp_path / "out.nq"))
    assert code == 4
    assert "inconsistent" in err
    assert "constraint chk violated" in err


def test_query_select_formats(capsys, fixtures_dir):
    code, out, _ = run(capsys, "query", fx(fixtures_dir, "beat.nq"),
                       fx(fixtures_dir, "beat.ccq"))
    assert code == 0
    assert out.splitlines() == ["?x", "<uruguay>"]
    code, out, _ = run(capsys, "query", fx(fixtures_dir, "beat.nq"),
                       fx(fixtures_dir, "beat.ccq"), "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc == {"vars": ["?x"], "tuples": [["<uruguay>"]],
                   "complete": True}


def test_query_boolean_false_exit(capsys, fixtures_dir, tmp_path):
    q = tmp_path / "q.ccq"
    q.write_text("ask { worldcup(<italy>, <beat>, <uruguay>) }\n")
    code, out, _ = run(capsys, "query", fx(fixtures_dir, "beat.nq"),
                       str(q))
    assert code == 1 and out.strip() == "false"


def test_query_partial_chase_flag(capsys, fixtures_dir, tmp_path):
    manifest = tmp_path / "stats.json"
    manifest.write_text(json.dumps({"status": "budget-exhausted"}))
    with pytest.warns(UserWarning, match="partial"):
        code, out, _ = run(capsys, "query", fx(fixtures_dir, "beat.nq"),
                           fx(fixtures_dir, "beat.ccq"), "--format", "json",
                           "--chase-stats", str(manifest))
    assert code == 0
    assert json.loads(out)["complete"] is False


def test_encode_horn_pipeline(capsys, tmp_path):
    phi = tmp_path / "phi.horn"
    phi.write_text("t -> P\nP -> f\n")
    outdir = tmp_path / "enc"
    code, _, _ = run(capsys, "encode", "horn", str(phi), "-o", str(outdir))
    assert code == 0
    system = outdir / "system.nq"
    rules = outdir / "rules.qrules"
    query = outdir / "query.ccq"
    assert system.exists() and rules.exists() and query.exists()
    parse_rules(rules.read_bytes())
    parse_query(query.read_bytes())
    chased = tmp_path / "chase.nq"
    code, _, _ = run(capsys, "chase", str(system), str(rules),
                     "-o", str(chased))
    assert code == 0
    code, out, _ = run(capsys, "query", str(chased), str(query))
    assert code == 0 and out.strip() == "true"


def test_encode_cfg_and_dtm(capsys, tmp_path):
    g1 = tmp_path / "g1.cfg"
    g1.write_text("S1 -> t1\n")
    g2 = tmp_path / "g2.cfg"
    g2.write_text("S2 -> t1\n")
    outdir = tmp_path / "cfg"
    code, _, _ = run(capsys, "encode", "cfg", str(g1), str(g2),
                     "-o", str(outdir))
    assert code == 0
    assert (outdir / "rules.qrules").exists()

    machine = tmp_path / "m.dtm"
    machine.write_text("states: q0 qA\nalphabet: a _\nblank: _\n"
                       "start: q0\naccept: qA\ndelta: q0 a -> qA a R\n")
    outdir = tmp_path / "dtm"
    code, _, _ = run(capsys, "encode", "dtm", str(machine), "--input", "a",
                     "--n", "1", "-o", str(outdir))
    assert code == 0
    chased = tmp_path / "dchase.nq"
    code, _, _ = run(capsys, "chase", str(outdir / "system.nq"),
                     str(outdir / "rules.qrules"), "-o", str(chased))
    assert code == 0
    code, out, _ = run(capsys, "query", str(chased),
                       str(outdir / "query.ccq"))
    assert code == 0 and out.strip() == "true"


def test_encode_wrong_arity(capsys, tmp_path):
    g1 = tmp_path / "g1.cfg"
    g1.write_text("S1 -> t1\n")
    code, _, err = run(capsys, "encode", "cfg", str(g1), "-o",
                       str(tmp_path / "x"))
    assert code == 2


def test_explain_semantics(capsys):
    code, out, _ = run(capsys, "explain-semantics")
    assert code == 0
    assert "simple (0 rules)" in out
    assert "rdfs-core (7 rules)" in out
    assert "resource-typing" in out
    code, out, _ = run(capsys, "explain-semantics", "rdfs-core",
                       "--no-rdfs-resource-rule")
    assert code == 0
    assert "rdfs-core (6 rules)" in out


def test_missing_file_is_usage_error(capsys):
    code, _, err = run(capsys, "chase", "nope.nq", "nope.qrules",
                       "-o", "out.nq")
    assert code == 2


def test_env_var_semantics(capsys, fixtures_dir, tmp_path, monkeypatch):
    monkeypatch.setenv("QUADCHASE_SEMANTICS", "rdfs-core")
    out_nq = tmp_path / "out.nq"
    code, _, _ = run(capsys, "chase", fx(fixtures_dir, "example1.nq"),
                     fx(fixtures_dir, "example1.qrules"),
                     "-o", str(out_nq), "--max-iterations", "5")
    assert code == 3  # rdfs-core picked up from the environment: diverges
