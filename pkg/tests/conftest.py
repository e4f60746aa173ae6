import os

import pytest
from hypothesis import settings

from mfhiggs.fixture import load

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
FIXTURES = os.path.join(ROOT, "fixtures")

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def fixture_path(*parts):
    return os.path.join(FIXTURES, *parts)


@pytest.fixture
def kum5():
    return load(fixture_path("kummer_p5.json")).chart()


@pytest.fixture
def sym2():
    return load(fixture_path("sym2_p5.json")).chart()
