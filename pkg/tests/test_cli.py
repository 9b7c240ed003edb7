import json

from geodd.cli import EXIT_INPUT_ERROR, EXIT_LIMIT, EXIT_NOT_PROVED, EXIT_PROVED, main
from geodd.render import parse_structured


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestProve:
    def test_theorem1_prose_status_zero(self, problem_dir, capsys):
        code, out, _ = run(
            capsys, "prove", str(problem_dir / "theorem1.p"), "--format", "prose"
        )
        assert code == EXIT_PROVED
        assert "Proved: theorem1" in out
        assert "[ABCD] is a parallelogram" in out
        assert "Therefore AB = CD; AD = BC." in out

    def test_theorem2_status_zero(self, problem_dir, capsys):
        code, out, _ = run(capsys, "prove", str(problem_dir / "theorem2.p"))
        assert code == EXIT_PROVED
        assert "cong(A,C,B,D)" in out

    def test_false_conjecture_status_one_with_advice(self, problem_dir, capsys):
        code, _, err = run(capsys, "prove", str(problem_dir / "false.p"))
        assert code == EXIT_NOT_PROVED
        assert "decision procedure" in err
        assert "area method" in err

    def test_missing_file_status_two(self, capsys):
        code, _, err = run(capsys, "prove", "nowhere.p")
        assert code == EXIT_INPUT_ERROR
        assert "error:" in err

    def test_syntax_error_status_two(self, tmp_path, capsys):
        bad = tmp_path / "bad.p"
        bad.write_text("fof(oops,axiom,(![A] : unknown(A))).")
        code, _, err = run(capsys, "prove", str(bad))
        assert code == EXIT_INPUT_ERROR

    def test_limit_status_three(self, problem_dir, capsys):
        code, _, err = run(
            capsys, "prove", str(problem_dir / "theorem1.p"), "--max-facts", "4"
        )
        assert code == EXIT_LIMIT
        assert "maxFacts" in err

    def test_structured_to_file(self, problem_dir, capsys):
        out_file = problem_dir / "t1.json"
        code, _, _ = run(
            capsys,
            "prove", str(problem_dir / "theorem1.p"),
            "--format", "structured", "--out", str(out_file),
        )
        assert code == EXIT_PROVED
        doc = json.loads(out_file.read_text())
        assert doc["format"] == "geodd-trace/1"
        assert doc["catalog"]["selectors"] == ["year7"]

    def test_explicit_rules_file(self, problem_dir, capsys):
        code, _, _ = run(
            capsys,
            "prove", str(problem_dir / "theorem1.p"),
            "--rules", str(problem_dir / "year7.ax"),
        )
        assert code == EXIT_PROVED

    def test_config_file_with_flag_override(self, problem_dir, capsys):
        cfg = problem_dir / "run.json"
        cfg.write_text(json.dumps({"format": "prose", "limits": {"max_facts": 4}}))
        code, _, err = run(
            capsys, "prove", str(problem_dir / "theorem1.p"), "--config", str(cfg)
        )
        assert code == EXIT_LIMIT  # config file limit applies
        code, out, _ = run(
            capsys,
            "prove", str(problem_dir / "theorem1.p"),
            "--config", str(cfg), "--max-facts", "100000",
        )
        assert code == EXIT_PROVED
        assert "Therefore" in out  # prose from config survives


class TestSaturate:
    def test_stats_and_exhaustion(self, problem_dir, capsys):
        code, out, _ = run(capsys, "saturate", str(problem_dir / "theorem2.p"))
        assert code == EXIT_PROVED
        assert "exhausted: True" in out
        assert "facts by predicate:" in out

    def test_fact_dump(self, problem_dir, capsys):
        code, out, _ = run(capsys, "saturate", str(problem_dir / "theorem1.p"), "--facts")
        assert code == EXIT_PROVED
        assert "parallelogram(A,B,C,D)  [hyp.]" in out


class TestCheck:
    def test_problem_audit_clean(self, problem_dir, capsys):
        code, out, _ = run(
            capsys, "check", str(problem_dir / "theorem1.p"), "--models", "10"
        )
        assert code == EXIT_PROVED
        assert "0 violations" in out

    def test_trace_audit_clean(self, problem_dir, capsys):
        trace_file = problem_dir / "t2.json"
        run(
            capsys,
            "prove", str(problem_dir / "theorem2.p"),
            "--format", "structured", "--out", str(trace_file),
        )
        code, out, _ = run(capsys, "check", str(trace_file), "--models", "5")
        assert code == EXIT_PROVED
        assert "trace check: ok" in out

    def test_model_file(self, problem_dir, capsys):
        model = problem_dir / "model.txt"
        model.write_text("# square\nA 0.0 0.0\nB 4.0 0.0\nC 5.0 2.0\nD 1.0 2.0\n")
        code, out, _ = run(
            capsys, "check", str(problem_dir / "theorem1.p"), "--model-file", str(model)
        )
        assert code == EXIT_PROVED
        assert "1 models" in out

    def test_unsatisfying_model_file(self, problem_dir, capsys):
        model = problem_dir / "bad_model.txt"
        model.write_text("A 0.0 0.0\nB 1.0 0.0\nC 5.0 2.0\nD 1.0 2.0\n")
        code, _, err = run(
            capsys, "check", str(problem_dir / "theorem1.p"), "--model-file", str(model)
        )
        assert code == EXIT_INPUT_ERROR


class TestRender:
    def test_round_trip_byte_identical_table(self, problem_dir, capsys):
        trace_file = problem_dir / "t1.json"
        code, direct_table, _ = run(capsys, "prove", str(problem_dir / "theorem1.p"))
        assert code == EXIT_PROVED
        run(
            capsys,
            "prove", str(problem_dir / "theorem1.p"),
            "--format", "structured", "--out", str(trace_file),
        )
        code, rendered, _ = run(capsys, "render", str(trace_file), "--format", "table")
        assert code == EXIT_PROVED
        direct_lines = direct_table.splitlines()[1:]  # drop the "Proved:" banner
        assert rendered.splitlines() == direct_lines

    def test_prose_render(self, problem_dir, capsys):
        trace_file = problem_dir / "t1.json"
        run(
            capsys,
            "prove", str(problem_dir / "theorem1.p"),
            "--format", "structured", "--out", str(trace_file),
        )
        code, out, _ = run(capsys, "render", str(trace_file), "--format", "prose")
        assert code == EXIT_PROVED
        assert "Therefore AB = CD; AD = BC." in out

    def test_bad_version_rejected(self, tmp_path, capsys):
        bogus = tmp_path / "bogus.json"
        bogus.write_text(json.dumps({"format": "geodd-trace/99"}))
        code, _, err = run(capsys, "render", str(bogus))
        assert code == EXIT_INPUT_ERROR
        assert "unknown trace format" in err


class TestLemma:
    def test_lemma_flow(self, problem_dir, capsys):
        lemmas = problem_dir / "lemmas.ax"
        code, out, _ = run(
            capsys,
            "lemma", str(problem_dir / "theorem1.p"),
            "--name", "theorem1", "--append-to", str(lemmas),
        )
        assert code == EXIT_PROVED
        assert "appended" in out
        assert "fof(theorem1,axiom," in lemmas.read_text()

        trace_file = problem_dir / "t2lemma.json"
        code, out, _ = run(
            capsys,
            "prove", str(problem_dir / "theorem2.p"),
            "--lemma-file", str(lemmas),
            "--format", "structured", "--out", str(trace_file),
        )
        assert code == EXIT_PROVED
        trace, _ = parse_structured(trace_file.read_text())
        assert any(s.label == "theorem1" and s.kind == "lemma" for s in trace.steps)

    def test_lemma_appended_to_plain_catalog_still_proves(self, problem_dir, capsys):
        catalog = problem_dir / "year7plus.ax"
        catalog.write_text((problem_dir / "year7.ax").read_text())
        run(
            capsys,
            "lemma", str(problem_dir / "theorem1.p"),
            "--name", "theorem1", "--append-to", str(catalog),
        )
        code, out, _ = run(
            capsys, "prove", str(problem_dir / "theorem2.p"), "--rules", str(catalog)
        )
        assert code == EXIT_PROVED
        assert any("theorem1" in line for line in out.splitlines())

    def test_unproved_lemma_not_appended(self, problem_dir, capsys):
        catalog = problem_dir / "untouched.ax"
        catalog.write_text("% empty\n")
        code, _, err = run(
            capsys,
            "lemma", str(problem_dir / "false.p"),
            "--name", "nope", "--append-to", str(catalog),
        )
        assert code == EXIT_NOT_PROVED
        assert catalog.read_text() == "% empty\n"


class TestFlags:
    def test_no_eqtrans_still_proves_theorem1(self, problem_dir, capsys):
        # the direct angle route does not need chaining
        code, _, _ = run(capsys, "prove", str(problem_dir / "theorem1.p"), "--no-eqtrans")
        assert code == EXIT_PROVED

    def test_all_pairs_flag(self, problem_dir, capsys):
        code, _, _ = run(capsys, "prove", str(problem_dir / "theorem1.p"), "--all-pairs")
        assert code == EXIT_PROVED

    def test_eqangle_exchange_flag(self, problem_dir, capsys):
        code, _, _ = run(
            capsys, "prove", str(problem_dir / "theorem1.p"), "--eqangle-exchange"
        )
        assert code == EXIT_PROVED

    def test_seed_recorded_in_structured(self, problem_dir, capsys):
        out_file = problem_dir / "seeded.json"
        run(
            capsys,
            "prove", str(problem_dir / "theorem1.p"),
            "--seed", "99", "--format", "structured", "--out", str(out_file),
        )
        doc = json.loads(out_file.read_text())
        assert doc["config"]["seed"] == 99
        assert doc["config"]["rng"] == "PCG64"
