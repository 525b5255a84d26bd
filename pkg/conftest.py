import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from geometry.surface_group import build_surface_group  # noqa: E402
from dynamics.systems.twist import make_twist  # noqa: E402

TWIST_CORE = "a2"
TWIST_THETA = 0.2
TWIST_WIDTH = 0.3


@pytest.fixture(scope="session")
def genus2():
    return build_surface_group(2)


@pytest.fixture(scope="session")
def twist(genus2):
    return make_twist(genus2, TWIST_CORE, TWIST_THETA, TWIST_WIDTH)


@pytest.fixture(autouse=True)
def _thread_cap(monkeypatch):
    monkeypatch.setenv("ROTLAB_THREADS", "2")
