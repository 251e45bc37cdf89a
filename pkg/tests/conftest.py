from __future__ import annotations

import os

import pytest
from hypothesis import HealthCheck, settings

from sylvan.rank_functions import FieldRank
from sylvan.rings.extensions import CrossedProduct, poly_ext
from sylvan.rings.groups import ZdGroup
from sylvan.scalars import QQ

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=300, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def qz():
    """Q[Z] with the field rank on Q."""
    return CrossedProduct(QQ, ZdGroup(1), rank=FieldRank(QQ))


@pytest.fixture(scope="session")
def qz2():
    return CrossedProduct(QQ, ZdGroup(2), rank=FieldRank(QQ))


@pytest.fixture(scope="session")
def qt():
    return poly_ext(QQ, rank=FieldRank(QQ))


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
