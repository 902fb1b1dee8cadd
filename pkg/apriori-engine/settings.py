"""
Engine Settings

Defaults live in a project file (`apriori.env`) parsed as plain data. The
process environment is never read, so runs are reproducible from the files
on disk plus the command line.
"""

import os

from dotenv import dotenv_values

from errors import ConfigError

# --- CONFIGURATION ---
DEFAULT_ENV_FILE = "apriori.env"

DEFAULTS = {
    "TRUNC_N": "12",
    "RELAXED_FRAMES": "false",
    "GC_UNREACHABLE": "false",
    "CORPUS_WORKERS": "4",
    "SYNTH_WORKERS": "1",
}

MIN_TRUNC_N = 6

_TRUE_WORDS = {"1", "true", "yes", "on"}
_FALSE_WORDS = {"0", "false", "no", "off"}


def _to_bool(key, raw):
    word = str(raw).strip().lower()
    if word in _TRUE_WORDS:
        return True
    if word in _FALSE_WORDS:
        return False
    raise ConfigError(f"{key} must be a boolean, got '{raw}'")


def _to_int(key, raw, minimum):
    try:
        value = int(str(raw).strip())
    except ValueError as e:
        raise ConfigError(f"{key} must be an integer, got '{raw}'") from e
    if value < minimum:
        raise ConfigError(f"{key} must be at least {minimum}, got {value}")
    return value


def load_settings(env_file=None, overrides=None, logger=None):
    """
    Builds the settings dict from defaults, the env file and CLI overrides.

    Returns: dict with trunc_n, relaxed_frames, gc_unreachable,
    corpus_workers, synth_workers.
    """
    raw = dict(DEFAULTS)

    path = env_file or DEFAULT_ENV_FILE
    if os.path.isfile(path):
        values = dotenv_values(path)
        for key, value in values.items():
            if key not in DEFAULTS:
                if logger is not None:
                    logger.warn(f"Unknown setting '{key}' in {path} ignored")
                continue
            if value is not None:
                raw[key] = value
    elif env_file is not None:
        raise ConfigError(f"Settings file not found: {env_file}")

    settings = {
        "trunc_n": _to_int("TRUNC_N", raw["TRUNC_N"], MIN_TRUNC_N),
        "relaxed_frames": _to_bool("RELAXED_FRAMES", raw["RELAXED_FRAMES"]),
        "gc_unreachable": _to_bool("GC_UNREACHABLE", raw["GC_UNREACHABLE"]),
        "corpus_workers": _to_int("CORPUS_WORKERS", raw["CORPUS_WORKERS"], 1),
        "synth_workers": _to_int("SYNTH_WORKERS", raw["SYNTH_WORKERS"], 1),
    }

    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in settings:
            raise ConfigError(f"Unknown setting override '{key}'")
        settings[key] = value

    if settings["trunc_n"] < MIN_TRUNC_N:
        raise ConfigError(f"trunc_n must be at least {MIN_TRUNC_N}, got {settings['trunc_n']}")
    return settings


def default_settings():
    """Settings without any env file; used by library callers and tests."""
    return {
        "trunc_n": int(DEFAULTS["TRUNC_N"]),
        "relaxed_frames": False,
        "gc_unreachable": False,
        "corpus_workers": int(DEFAULTS["CORPUS_WORKERS"]),
        "synth_workers": int(DEFAULTS["SYNTH_WORKERS"]),
    }
