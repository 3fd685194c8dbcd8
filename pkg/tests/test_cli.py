import hashlib
import json
import os

import pytest
from click.testing import CliRunner

from quizforge import corpus
from quizforge.cli import main


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def example_file(tmp_path):
    def write(ex_id):
        doc = corpus.load_example_document(ex_id)
        p = tmp_path / f"example{ex_id}.quiz.json"
        p.write_text(json.dumps(doc), encoding="utf-8")
        return str(p)
    return write


class TestGenerate:
    def test_writes_bank_and_prints_hash(self, runner, example_file, tmp_path):
        res = runner.invoke(main, ["generate", example_file(1),
                                   "--n", "3", "--seed", "7",
                                   "--out", str(tmp_path)])
        assert res.exit_code == 0, res.output
        lines = res.output.strip().splitlines()
        path = lines[0]
        assert os.path.exists(path)
        with open(path, "rb") as fh:
            digest = hashlib.sha256(fh.read()).hexdigest()
        assert lines[1] == f"sha256: {digest}"

    def test_n_zero_is_validation_error(self, runner, example_file, tmp_path):
        res = runner.invoke(main, ["generate", example_file(1),
                                   "--n", "0", "--out", str(tmp_path)])
        assert res.exit_code == 1
        assert "n must be" in res.output

    def test_missing_file_is_io_error(self, runner, tmp_path):
        res = runner.invoke(main, ["generate", str(tmp_path / "nope.json")])
        assert res.exit_code == 3

    def test_invalid_template_is_validation_error(self, runner, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{\"schema\": \"nope\"}", encoding="utf-8")
        res = runner.invoke(main, ["generate", str(p)])
        assert res.exit_code == 1

    def test_random_seed_reported_on_stderr(self, runner, example_file,
                                            tmp_path):
        res = runner.invoke(main, ["generate", example_file(1), "--n", "1",
                                   "--out", str(tmp_path)])
        assert res.exit_code == 0
        assert "seed: " in res.output

    def test_bad_story_is_generation_error(self, runner, example_file,
                                           tmp_path):
        res = runner.invoke(main, ["generate", example_file(1), "--n", "1",
                                   "--seed", "1", "--story", "9",
                                   "--out", str(tmp_path)])
        assert res.exit_code == 2


class TestPreview:
    def test_text_format_fields(self, runner, example_file):
        res = runner.invoke(main, ["preview", example_file(1), "--seed", "42"])
        assert res.exit_code == 0
        for field in ("quizname:", "category:", "qtxt:", "htxt:", "atxt:"):
            assert field in res.output

    def test_deterministic(self, runner, example_file):
        args = ["preview", example_file(2), "--seed", "42", "--index", "3"]
        assert runner.invoke(main, args).output == \
            runner.invoke(main, args).output

    def test_html_format(self, runner, example_file):
        res = runner.invoke(main, ["preview", example_file(1), "--seed", "1",
                                   "--format", "html"])
        assert res.output.startswith("<!DOCTYPE html>")

    def test_story_selection(self, runner, example_file):
        res = runner.invoke(main, ["preview", example_file(12), "--seed", "1",
                                   "--story", "2"])
        assert res.exit_code == 0
        assert "likely voters" in res.output


class TestValidate:
    def test_valid_template(self, runner, example_file):
        res = runner.invoke(main, ["validate", example_file(3)])
        assert res.exit_code == 0
        assert "ok" in res.output

    def test_invalid_template(self, runner, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps({"schema": "quizforge-template-v1"}),
                     encoding="utf-8")
        res = runner.invoke(main, ["validate", str(p)])
        assert res.exit_code == 1

    def test_validates_generated_xml(self, runner, example_file, tmp_path):
        gen = runner.invoke(main, ["generate", example_file(1), "--n", "2",
                                   "--seed", "5", "--out", str(tmp_path)])
        path = gen.output.strip().splitlines()[0]
        res = runner.invoke(main, ["validate", path])
        assert res.exit_code == 0

    def test_malformed_xml(self, runner, tmp_path):
        p = tmp_path / "broken.xml"
        p.write_text("<quiz><unclosed>", encoding="utf-8")
        res = runner.invoke(main, ["validate", str(p)])
        assert res.exit_code == 1


class TestGrade:
    def test_grades_against_template(self, runner, example_file, tmp_path):
        # example 1 instance: find its correct answer, then submit it
        from quizforge import cloze, template
        t = corpus.load_example(1)
        inst = template.instantiate(t, seed=42, index=0)
        answers = tmp_path / "answers.json"
        answers.write_text(json.dumps(list(inst.correct_answers)),
                           encoding="utf-8")
        res = runner.invoke(main, ["grade", example_file(1), str(answers),
                                   "--seed", "42", "--index", "0"])
        assert res.exit_code == 0
        assert "(100.0%)" in res.output

    def test_wrong_answer_scores_zero(self, runner, example_file, tmp_path):
        answers = tmp_path / "answers.json"
        answers.write_text(json.dumps(["999999"]), encoding="utf-8")
        res = runner.invoke(main, ["grade", example_file(1), str(answers),
                                   "--seed", "42", "--index", "0"])
        assert res.exit_code == 0
        assert "(0.0%)" in res.output

    def test_answers_dict_form(self, runner, example_file, tmp_path):
        answers = tmp_path / "answers.json"
        answers.write_text(json.dumps({"answers": ["1"]}), encoding="utf-8")
        res = runner.invoke(main, ["grade", example_file(1), str(answers),
                                   "--seed", "42"])
        assert res.exit_code == 0

    def test_grades_against_xml(self, runner, example_file, tmp_path):
        gen = runner.invoke(main, ["generate", example_file(1), "--n", "1",
                                   "--seed", "42", "--out", str(tmp_path)])
        path = gen.output.strip().splitlines()[0]
        answers = tmp_path / "answers.json"
        answers.write_text(json.dumps(["0"]), encoding="utf-8")
        res = runner.invoke(main, ["grade", path, str(answers)])
        assert res.exit_code == 0
        assert "field 1" in res.output

    def test_bad_answers_json(self, runner, example_file, tmp_path):
        answers = tmp_path / "answers.json"
        answers.write_text("not json", encoding="utf-8")
        res = runner.invoke(main, ["grade", example_file(1), str(answers),
                                   "--seed", "1"])
        assert res.exit_code == 1


class TestPaste:
    def test_file_to_stdout(self, runner, tmp_path):
        src = tmp_path / "data.txt"
        src.write_text("x\ty\n1\t2\n3\t4\n", encoding="utf-8")
        res = runner.invoke(main, ["paste", "--in", str(src)])
        assert res.exit_code == 0
        assert res.output.splitlines()[0] == "x,y"

    def test_space_separated(self, runner, tmp_path):
        src = tmp_path / "data.txt"
        src.write_text("1.5 2.5 3.5\n", encoding="utf-8")
        res = runner.invoke(main, ["paste", "--in", str(src)])
        assert res.exit_code == 0
        assert res.output.splitlines() == ["1.5", "2.5", "3.5"]

    def test_output_file(self, runner, tmp_path):
        src = tmp_path / "data.txt"
        src.write_text("7\t8\n", encoding="utf-8")
        out = tmp_path / "out.csv"
        res = runner.invoke(main, ["paste", "--in", str(src),
                                   "--out", str(out)])
        assert res.exit_code == 0
        assert out.read_bytes() == b"7\r\n8\r\n"

    def test_unparseable_input(self, runner, tmp_path):
        src = tmp_path / "data.txt"
        src.write_text("  \n ", encoding="utf-8")
        res = runner.invoke(main, ["paste", "--in", str(src)])
        assert res.exit_code == 1


class TestExamples:
    def test_lists_fifteen(self, runner):
        res = runner.invoke(main, ["examples"])
        assert res.exit_code == 0
        assert len(res.output.strip().splitlines()) == 15
        assert "Mean" in res.output
