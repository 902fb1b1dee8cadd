import os

import pytest

import run_log
from errors import ConfigError
from settings import MIN_TRUNC_N, default_settings, load_settings


def write_env(tmp_path, text):
    path = tmp_path / "engine.env"
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_bundled_file_matches_defaults(engine_dir):
    assert load_settings(os.path.join(engine_dir, "apriori.env")) == default_settings()


def test_env_file_values(tmp_path):
    env = write_env(tmp_path, "TRUNC_N=9\nRELAXED_FRAMES=yes\nCORPUS_WORKERS=2\n")
    settings = load_settings(env)
    assert settings["trunc_n"] == 9
    assert settings["relaxed_frames"] is True
    assert settings["corpus_workers"] == 2
    assert settings["gc_unreachable"] is False


def test_overrides_win(tmp_path):
    env = write_env(tmp_path, "TRUNC_N=9\n")
    settings = load_settings(env, {"trunc_n": 15, "gc_unreachable": True, "relaxed_frames": None})
    assert settings["trunc_n"] == 15
    assert settings["gc_unreachable"] is True
    assert settings["relaxed_frames"] is False


def test_unknown_key_is_warned_about(tmp_path):
    logger = run_log.Logger()
    load_settings(write_env(tmp_path, "COLOR=blue\n"), logger=logger)
    assert any("COLOR" in entry for entry in logger.warnings())


@pytest.mark.parametrize("text", ["TRUNC_N=five\n", f"TRUNC_N={MIN_TRUNC_N - 1}\n", "GC_UNREACHABLE=maybe\n"])
def test_bad_values(tmp_path, text):
    with pytest.raises(ConfigError):
        load_settings(write_env(tmp_path, text))


def test_override_below_minimum(tmp_path):
    with pytest.raises(ConfigError):
        load_settings(write_env(tmp_path, ""), {"trunc_n": 2})


def test_unknown_override(tmp_path):
    with pytest.raises(ConfigError):
        load_settings(write_env(tmp_path, ""), {"colour": "blue"})


def test_named_file_must_exist(tmp_path):
    with pytest.raises(ConfigError):
        load_settings(str(tmp_path / "absent.env"))
