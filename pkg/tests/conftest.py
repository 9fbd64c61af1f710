import os

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=200, deadline=None)
settings.register_profile("thorough", max_examples=2000, deadline=None)
settings.load_profile(os.environ.get("DISPOSABLE_HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def vtm():
    from disposable.disposability import vtm_stream
    return vtm_stream()


@pytest.fixture(scope="session")
def env():
    from disposable.predicate import DISPO_DELTA, DISPO_POS, PredicateEnv
    e = PredicateEnv.default()
    e.define("dispo_pos", DISPO_POS)
    e.define("dispo_delta", DISPO_DELTA)
    return e


@pytest.fixture(scope="session")
def dispo_pos(env):
    return env.predicates["dispo_pos"]


@pytest.fixture(scope="session")
def phase1():
    from disposable.construction import construct
    return construct(1)
