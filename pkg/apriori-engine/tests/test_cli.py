import pytest

import cli
from conftest import engine_path


def model_path(name):
    return engine_path("models", name)


def test_check_prints_profile(capsys):
    assert cli.main(["check", model_path("m0.km")]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "epistemic: yes" in out
    assert "8 worlds" in out
    assert "✅ Model parsed" in out


def test_check_inconsistent_model(capsys):
    assert cli.main(["check", model_path("mcp_apb2.km")]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "Point: Areal" in out
    assert "epistemic: no" in out


def test_check_missing_file(capsys):
    assert cli.main(["check", model_path("missing.km")]) == cli.EXIT_USAGE
    assert "File not found" in capsys.readouterr().out


@pytest.mark.parametrize("terms, code, shown", [
    (["B a false"], cli.EXIT_OK, "B a false at Areal: true"),
    (["B b false"], cli.EXIT_FALSE, "B b false at Areal: false"),
    (["AB", "ma & mb"], cli.EXIT_OK, "(ma & mb) at AB: true"),
])
def test_eval(terms, code, shown, capsys):
    assert cli.main(["eval", model_path("mcp_apb2.km")] + terms) == code
    assert shown in capsys.readouterr().out


def test_eval_false_formula(capsys):
    assert cli.main(["eval", model_path("m0.km"), "0", "ma"]) == cli.EXIT_FALSE
    assert "ma at 0: false" in capsys.readouterr().out


def test_eval_needs_a_world(capsys):
    assert cli.main(["eval", model_path("m0.km"), "ma"]) == cli.EXIT_USAGE
    assert "declares no point" in capsys.readouterr().out


def test_eval_parse_error(capsys):
    assert cli.main(["eval", model_path("m0.km"), "A", "ma &"]) == cli.EXIT_USAGE
    assert "parse-error" in capsys.readouterr().out


def test_eval_on_generated_model(capsys):
    assert cli.main(["--trunc-n", "8", "eval", "@consecutive", "B a n_b_2"]) == cli.EXIT_OK


def test_run_corpus(capsys):
    assert cli.main(["run", "--corpus", "--workers", "2"]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "STEP 1: Running" in out
    assert "scenario(s) passed" in out


def test_run_single_scenario(capsys):
    assert cli.main(["run", engine_path("scenarios", "mcp_standard.kms")]) == cli.EXIT_OK
    assert "✅ mcp_standard" in capsys.readouterr().out


def test_run_missing_scenario(capsys):
    assert cli.main(["run", engine_path("scenarios", "nowhere.kms")]) == cli.EXIT_USAGE


def test_run_without_target(capsys):
    assert cli.main(["run"]) == cli.EXIT_USAGE


def test_export_dot(tmp_path, capsys):
    out = tmp_path / "m0.dot"
    assert cli.main(["export-dot", model_path("m0.km"), str(out), "--point", "A"]) == cli.EXIT_OK
    text = out.read_text(encoding="utf-8")
    assert text.startswith('digraph "M0"')
    assert "peripheries=2" in text
    assert "8 nodes" in capsys.readouterr().out


def test_export_dot_unknown_point(tmp_path, capsys):
    out = tmp_path / "m0.dot"
    assert cli.main(["export-dot", model_path("m0.km"), str(out), "--point", "ZZ"]) == cli.EXIT_USAGE
    assert "invalid-model" in capsys.readouterr().out
    assert not out.exists()


def test_export_dot_unwritable_target(tmp_path, capsys):
    out = tmp_path / "missing_dir" / "m0.dot"
    assert cli.main(["export-dot", model_path("m0.km"), str(out)]) == cli.EXIT_USAGE
    assert "❌" in capsys.readouterr().out


def test_synth_emits_update(tmp_path, capsys):
    emitted = tmp_path / "found.kmu"
    code = cli.main(["synth", engine_path("problems", "mcp_a.synth"), "--emit", str(emitted)])
    assert code == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "✅ Accepted c001" in out
    assert "candidate details" in out
    assert emitted.read_text(encoding="utf-8").startswith("update mcp_a_c001 for a")


def test_synth_exhausted(capsys):
    assert cli.main(["synth", engine_path("problems", "empty.synth")]) == cli.EXIT_FALSE
    assert "Exhausted after 0 candidate(s)" in capsys.readouterr().out


def test_bad_env_file(tmp_path, capsys):
    env = tmp_path / "bad.env"
    env.write_text("TRUNC_N=3\n", encoding="utf-8")
    assert cli.main(["--env-file", str(env), "check", model_path("m0.km")]) == cli.EXIT_USAGE
    assert "config-error" in capsys.readouterr().out


def test_unknown_verb():
    with pytest.raises(SystemExit) as info:
        cli.main(["frobnicate"])
    assert info.value.code == cli.EXIT_USAGE
