import random

import pytest

from srtmkit.models.structure import Signature
from srtmkit.services import corpus


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run tests marked slow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return random.Random(20240601)


@pytest.fixture
def condprod():
    return corpus.load_machine("condprod", "nat")


@pytest.fixture
def unary_sig():
    return corpus.load_signature("unary")


@pytest.fixture
def unary2():
    structure, _ = corpus.load_structure("unary2", "nat")
    return structure


@pytest.fixture
def empty_sig():
    return Signature()
