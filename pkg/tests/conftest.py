import pytest

from slice_guard.catalog import build_base_scenario


@pytest.fixture(scope="session")
def base():
    return build_base_scenario(42)
