import os
import sys

import pytest

ENGINE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ENGINE_DIR not in sys.path:
    sys.path.insert(0, ENGINE_DIR)

import model_io  # noqa: E402
import run_log  # noqa: E402
from kripke import PointedModel  # noqa: E402
from settings import default_settings  # noqa: E402


def engine_path(*parts):
    return os.path.join(ENGINE_DIR, *parts)


@pytest.fixture
def engine_dir():
    return ENGINE_DIR


@pytest.fixture
def logger():
    return run_log.Logger()


@pytest.fixture
def settings():
    return default_settings()


@pytest.fixture
def m0():
    model, _ = model_io.load_model(engine_path("models", "m0.km"))
    return model


@pytest.fixture
def mcp():
    """Three muddy children after a's inconsistency, pointed at Areal."""
    model, point = model_io.load_model(engine_path("models", "mcp_apb2.km"))
    return PointedModel(model, point)


@pytest.fixture
def mcp_update(settings):
    return model_io.load_update(engine_path("updates", "mcp_a.kmu"), settings)
