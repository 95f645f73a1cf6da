from __future__ import annotations

import pytest

from cinebot.catalog import default_catalog
from cinebot.nlg import load_templates
from cinebot.nlu import LexiconIndex, load_patterns
from cinebot.policy import PolicyConfig
from cinebot.service import Engine, SessionStore


@pytest.fixture(scope="session")
def catalog():
    catalog, _report = default_catalog()
    return catalog


@pytest.fixture(scope="session")
def registry():
    return load_patterns()


@pytest.fixture(scope="session")
def templates():
    return load_templates()


@pytest.fixture(scope="session")
def config():
    return PolicyConfig()


@pytest.fixture(scope="session")
def index(catalog):
    return LexiconIndex(catalog)


@pytest.fixture()
def engine_factory(catalog, registry, templates, config, tmp_path):
    """Build engines sharing one session directory, like process restarts."""

    def build(session_dir=None, **kwargs) -> Engine:
        store = SessionStore(session_dir or tmp_path / "sessions")
        return Engine(catalog, registry, templates, config, store, **kwargs)

    return build


@pytest.fixture()
def engine(engine_factory):
    return engine_factory()
