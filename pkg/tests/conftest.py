import pytest

from offgridopt.config import build_config, build_context

# the documented default seed for reproducing the bundled-dataset results
RUN_SEED = 42


@pytest.fixture(scope="session")
def default_config():
    return build_config({})


@pytest.fixture(scope="session")
def annual_ctx(default_config):
    """Default system (LI + 16 kW DE) on the bundled dataset, seed 42."""
    return build_context(default_config, seed=RUN_SEED)
