import os

import numpy as np
import pytest

from siegelcurv import curves, quadrics
from siegelcurv.hodge import GramCache, build_frame


def pytest_addoption(parser):
    parser.addoption("--slow", action="store_true", default=False, help="run slow tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running test, enabled with --slow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--slow"):
        return
    skip = pytest.mark.skip(reason="needs --slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def cache_dir(tmp_path_factory):
    d = os.environ.get("CACHE_DIR")
    return d if d else str(tmp_path_factory.mktemp("gram-cache"))


@pytest.fixture(scope="session")
def gram_cache(cache_dir):
    return GramCache(cache_dir)


class Frames:
    """Session store of frames and quadric spaces keyed by a short name."""

    builders = {
        "g2": lambda: curves.hyperelliptic([-1, 0, 0, 0, 0, 1]),
        "sextic": lambda: curves.hyperelliptic([1, 0, 0, 0, 0, 0, -1]),
        "g3": lambda: curves.hyperelliptic([-1, 0, 0, 0, 0, 0, 0, 1]),
        "g4": lambda: curves.hyperelliptic([-1] + [0] * 8 + [1]),
        "g5": lambda: curves.hyperelliptic([-1] + [0] * 10 + [1]),
        "tri4": lambda: curves.trigonal([-1, 0, 0, 0, 0, 0, 1]),
        "quintic": curves.fermat_quintic,
    }

    def __init__(self, cache):
        self.cache = cache
        self._frames = {}
        self._spaces = {}

    def frame(self, name):
        if name not in self._frames:
            self._frames[name] = build_frame(self.builders[name](), 1e-7, self.cache)
        return self._frames[name]

    def space(self, name):
        if name not in self._spaces:
            self._spaces[name] = quadrics.i2_basis(self.frame(name), seed=0)
        return self._spaces[name]


@pytest.fixture(scope="session")
def frames(gram_cache):
    return Frames(gram_cache)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
