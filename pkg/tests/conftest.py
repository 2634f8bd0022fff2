import pytest

from radarkat.scenariogen import generate_builtins


@pytest.fixture(scope="session")
def builtin_scenarios(tmp_path_factory):
    """The three built-in scenarios, generated once per test session."""
    root = tmp_path_factory.mktemp("scenarios")
    return generate_builtins(root)


@pytest.fixture(scope="session")
def scenario_root(builtin_scenarios):
    first = next(iter(builtin_scenarios.values()))
    return first.path.parent
